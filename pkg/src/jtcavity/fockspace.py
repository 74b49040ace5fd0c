"""Truncated tensor-product Hilbert spaces and dense operator algebra.

Every Hamiltonian and observable in the package is a dense complex matrix on
a :class:`HilbertSpace` built from an ordered list of factors.  The package
convention is (qubit, boson mode 1, boson mode 2); embeddings use Kronecker
products in factor order, so factor 0 varies slowest.

Operators are immutable after construction (the underlying array is marked
read-only), which makes them safe to share across threads and to reuse as
cached building blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10


class SpaceMismatchError(ValueError):
    """Raised when combining operators or states on different spaces."""


@dataclass(frozen=True)
class Factor:
    kind: str  # "qubit" or "boson"
    dim: int


def qubit() -> Factor:
    return Factor("qubit", 2)


def boson(dim: int) -> Factor:
    """Bosonic factor truncated to Fock levels 0..dim-1."""
    return Factor("boson", dim)


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered tensor product of qubit and truncated boson factors."""

    factors: tuple[Factor, ...]

    def __post_init__(self):
        if len(self.factors) == 0:
            raise ValueError("a Hilbert space needs at least one factor")
        for i, f in enumerate(self.factors):
            if f.kind == "qubit":
                if f.dim != 2:
                    raise ValueError(f"factor {i}: qubit factors must have dim 2, got {f.dim}")
            elif f.kind == "boson":
                if f.dim < 2:
                    raise ValueError(f"factor {i}: boson factors need dim >= 2, got {f.dim}")
            else:
                raise ValueError(f"factor {i}: unknown factor kind {f.kind!r}")

    @property
    def total_dim(self) -> int:
        n = 1
        for f in self.factors:
            n *= f.dim
        return n

    def dims(self) -> tuple[int, ...]:
        return tuple(f.dim for f in self.factors)


def space_new(factor_specs: Iterable[Factor | tuple[str, int]]) -> HilbertSpace:
    """Build a space from Factor objects or ("qubit"|"boson", dim) tuples."""
    factors = []
    for spec in factor_specs:
        if isinstance(spec, Factor):
            factors.append(spec)
        else:
            kind, dim = spec
            factors.append(Factor(kind, int(dim)))
    return HilbertSpace(tuple(factors))


def _frozen(matrix: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(matrix, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix tagged with the space on which it acts."""

    space: HilbertSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.matrix
        d = self.space.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match total_dim {d}")
        object.__setattr__(self, "matrix", _frozen(m))

    # -- algebra ----------------------------------------------------------
    def _check(self, other: "Operator"):
        if self.space != other.space:
            raise SpaceMismatchError("operators act on different Hilbert spaces")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) < tol

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def dagger(op: Operator) -> Operator:
    return op.dag()


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def anticommutator(a: Operator, b: Operator) -> Operator:
    return a @ b + b @ a


# ---------------------------------------------------------------------------
# factor-local building blocks and embeddings
# ---------------------------------------------------------------------------

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Qubit basis convention: index 0 = excited |e>, index 1 = ground |g>, so that
# sigma_z|e> = +|e> and the lowering operator sigma = (sigma_x - i sigma_y)/2
# maps |e> -> |g>.


def _lowering_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def embed(space: HilbertSpace, local: np.ndarray, factor_index: int) -> Operator:
    """Embed a single-factor matrix with identities on all other factors."""
    nfac = len(space.factors)
    if not 0 <= factor_index < nfac:
        raise IndexError(f"factor index {factor_index} out of range for {nfac} factors")
    d = space.factors[factor_index].dim
    if local.shape != (d, d):
        raise ValueError(f"local matrix shape {local.shape} does not match factor dim {d}")
    out = np.array([[1.0 + 0.0j]])
    for i, f in enumerate(space.factors):
        blk = local if i == factor_index else np.eye(f.dim, dtype=complex)
        out = np.kron(out, blk)
    return Operator(space, out)


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def annihilator(space: HilbertSpace, factor_index: int) -> Operator:
    """Truncated lowering operator a of a bosonic factor."""
    f = space.factors[factor_index]
    if f.kind != "boson":
        raise ValueError(f"factor {factor_index} is {f.kind}, not a boson")
    return embed(space, _lowering_matrix(f.dim), factor_index)


def creator(space: HilbertSpace, factor_index: int) -> Operator:
    return annihilator(space, factor_index).dag()


def number_op(space: HilbertSpace, factor_index: int) -> Operator:
    a = annihilator(space, factor_index)
    return a.dag() @ a


def pauli(space: HilbertSpace, axis: str, factor_index: int) -> Operator:
    f = space.factors[factor_index]
    if f.kind != "qubit":
        raise ValueError(f"factor {factor_index} is {f.kind}, not a qubit")
    if axis not in _PAULI:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    return embed(space, _PAULI[axis], factor_index)


def qubit_lowering(space: HilbertSpace, factor_index: int) -> Operator:
    """sigma = (sigma_x - i sigma_y)/2, mapping |e> to |g>."""
    sx = pauli(space, "x", factor_index)
    sy = pauli(space, "y", factor_index)
    return 0.5 * (sx - 1j * sy)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def basis_state(space: HilbertSpace, occupations: Sequence[int]) -> np.ndarray:
    """State vector |n_0, n_1, ...> in the tensor-product basis.

    For qubit factors the occupation is 0 (excited) or 1 (ground); use the
    ``qubit_ground``/``qubit_excited`` helpers to avoid remembering this.
    """
    if len(occupations) != len(space.factors):
        raise ValueError("one occupation per factor required")
    index = 0
    for f, n in zip(space.factors, occupations):
        if not 0 <= n < f.dim:
            raise ValueError(f"occupation {n} outside factor of dim {f.dim}")
        index = index * f.dim + n
    vec = np.zeros(space.total_dim, dtype=complex)
    vec[index] = 1.0
    return vec


QUBIT_EXCITED = 0
QUBIT_GROUND = 1


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive-semidefinite state on a HilbertSpace."""

    space: HilbertSpace
    matrix: np.ndarray = field(repr=False)
    validate: bool = True

    def __post_init__(self):
        m = self.matrix
        d = self.space.total_dim
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match total_dim {d}")
        if self.validate:
            tr = np.trace(m)
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"trace {tr} differs from 1 by more than {TRACE_TOL}")
            if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
                raise ValueError("density matrix is not Hermitian within tolerance")
            w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
            if w.min() < -POSITIVITY_TOL:
                raise ValueError(f"negative eigenvalue {w.min():.3e} beyond tolerance")
        object.__setattr__(self, "matrix", _frozen(m))

    def expect(self, op: Operator) -> complex:
        return expectation(op, self)


def pure_density(space: HilbertSpace, vec: np.ndarray) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(space, np.outer(v, v.conj()))


def fock_density(space: HilbertSpace, occupations: Sequence[int]) -> DensityMatrix:
    return pure_density(space, basis_state(space, occupations))


def thermal_density(space: HilbertSpace, factor_index: int, n_th: float) -> DensityMatrix:
    """Product state: thermal occupation n_th in one boson factor, ground elsewhere."""
    blocks = []
    for i, f in enumerate(space.factors):
        if i == factor_index:
            if f.kind != "boson":
                raise ValueError("thermal factor must be bosonic")
            n = np.arange(f.dim)
            p = (n_th / (1.0 + n_th)) ** n / (1.0 + n_th)
            p = p / p.sum()  # renormalise the truncated geometric tail
            blocks.append(np.diag(p).astype(complex))
        else:
            blk = np.zeros((f.dim, f.dim), dtype=complex)
            idx = QUBIT_GROUND if f.kind == "qubit" else 0
            blk[idx, idx] = 1.0
            blocks.append(blk)
    out = np.array([[1.0 + 0.0j]])
    for blk in blocks:
        out = np.kron(out, blk)
    return DensityMatrix(space, out)


def expectation(op: Operator, rho: DensityMatrix) -> complex:
    """Tr(op rho); real within 1e-10 when op is Hermitian."""
    if op.space != rho.space:
        raise SpaceMismatchError("operator and state act on different spaces")
    return complex(np.trace(op.matrix @ rho.matrix))


def truncation_safe_projector(space: HilbertSpace, margin: int = 1) -> Operator:
    """Projector onto basis states with every boson level below dim - margin.

    Canonical commutation relations and ladder identities hold exactly on
    this subspace; the top Fock level of each truncated mode violates them.
    """
    keep = np.ones(space.total_dim, dtype=bool)
    dims = space.dims()
    for idx in np.ndindex(*dims):
        flat = 0
        for d, n in zip(dims, idx):
            flat = flat * d + n
        for f, n in zip(space.factors, idx):
            if f.kind == "boson" and n >= f.dim - margin:
                keep[flat] = False
    return Operator(space, np.diag(keep.astype(complex)))
