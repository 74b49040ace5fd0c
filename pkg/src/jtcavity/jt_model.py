"""Two-frequency Jahn-Teller model: effective parameters and Hamiltonians.

The raw circuit inputs are the two resonator frequencies, the two qubit-mode
couplings and the hopping strength.  A rotation onto normal modes concentrates
the qubit coupling in a privileged mode alpha_1 (coupling k_eff) and leaves a
disadvantaged mode alpha_2 coupled only through the hopping c_2.  Both the
lab-frame Hamiltonian and the rotating-frame hybrid form built on
eta = alpha_1 + k_eff sigma_x are provided, together with the Bogoliubov-type
polariton rotation that diagonalises the quadratic part.

Tensor factor convention everywhere: (qubit, mode alpha_1, mode alpha_2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fockspace import (
    HilbertSpace,
    Operator,
    annihilator,
    boson,
    commutator,
    embed,
    identity,
    number_op,
    pauli,
    qubit,
)


@dataclass(frozen=True)
class RawParams:
    """Raw model inputs (dimensionless, units of a reference frequency).

    ``J`` overrides the hopping derived from the frequency difference when
    set; ``omega_q=None`` selects resonance with the effective mode.
    """

    omega1: float
    omega2: float
    k1: float
    k2: float
    omega_q: float | None = None
    J: float | None = None

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("mode frequencies must be positive")
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("couplings must be non-negative")
        if self.k1 == 0 and self.k2 == 0:
            raise ValueError("at least one qubit-mode coupling must be nonzero")


@dataclass(frozen=True)
class EffectiveParams:
    """Derived single-privileged-mode quantities.

    ``theta`` is the mixing half-angle from tan(2 theta) = c2/(omega_eff -
    omega_prime); ``theta_diag`` uses tan(2 theta) = 2 c2/(omega_eff -
    omega_prime), the angle that actually diagonalises the 2x2 quadratic
    block whose eigenvalues are (E1, E2).  Both coincide for
    omega_eff = omega_prime (theta = pi/4) and as c2 -> 0.
    """

    omega_eff: float
    omega_prime: float
    k_eff: float
    c2: float
    delta: float
    theta: float
    theta_diag: float
    E1: float
    E2: float
    omega_q: float
    c2_source: str  # "J" when set directly, else "delta"


def effective_params(raw: RawParams) -> EffectiveParams:
    """Map raw circuit parameters onto the effective two-mode model."""
    k_sq = raw.k1**2 + raw.k2**2
    if k_sq == 0.0:
        raise ValueError("degenerate k_eff = 0")
    k_eff = math.sqrt(k_sq)
    omega_eff = (raw.omega1 * raw.k1**2 + raw.omega2 * raw.k2**2) / k_sq
    omega_prime = (raw.omega1 * raw.k2**2 + raw.omega2 * raw.k1**2) / k_sq
    delta = raw.omega1 - raw.omega2
    if raw.J is not None:
        c2, source = float(raw.J), "J"
    else:
        c2, source = delta * raw.k1 * raw.k2 / k_sq, "delta"
    gap = omega_eff - omega_prime
    root = math.sqrt(gap**2 + 4.0 * c2**2)
    E1 = 0.5 * ((omega_eff + omega_prime) + root)
    E2 = 0.5 * ((omega_eff + omega_prime) - root)
    theta = 0.5 * math.atan2(c2, gap)
    theta_diag = 0.5 * math.atan2(2.0 * c2, gap)
    omega_q = raw.omega_q if raw.omega_q is not None else omega_eff
    return EffectiveParams(
        omega_eff=omega_eff,
        omega_prime=omega_prime,
        k_eff=k_eff,
        c2=c2,
        delta=delta,
        theta=theta,
        theta_diag=theta_diag,
        E1=E1,
        E2=E2,
        omega_q=omega_q,
        c2_source=source,
    )


def build_space(n: int, n2: int | None = None) -> HilbertSpace:
    """Standard (qubit, boson n, boson n2) space; n2 defaults to n."""
    return HilbertSpace((qubit(), boson(n), boson(n2 if n2 is not None else n)))


def _mode_ops(space: HilbertSpace):
    a1 = annihilator(space, 1)
    a2 = annihilator(space, 2)
    sx = pauli(space, "x", 0)
    return a1, a2, sx


def build_hamiltonian_effective(space: HilbertSpace, p: EffectiveParams,
                                omega_q: float | None = None) -> Operator:
    """Lab-frame Hamiltonian on the normal modes.

    H = (omega_q/2) sigma_z
        + omega_eff [a1' a1 + k_eff (a1 + a1') sigma_x]
        + omega_prime a2' a2
        + c2 [(a1' a2 + a1 a2') + k_eff (a2 + a2') sigma_x]
    """
    wq = p.omega_q if omega_q is None else omega_q
    a1, a2, sx = _mode_ops(space)
    sz = pauli(space, "z", 0)
    x1 = a1 + a1.dag()
    x2 = a2 + a2.dag()
    h = 0.5 * wq * sz
    h = h + p.omega_eff * (a1.dag() @ a1 + p.k_eff * (x1 @ sx))
    h = h + p.omega_prime * (a2.dag() @ a2)
    h = h + p.c2 * ((a1.dag() @ a2 + a1 @ a2.dag()) + p.k_eff * (x2 @ sx))
    return h


def jt_center_hamiltonian(space: HilbertSpace, p: EffectiveParams,
                          omega_q: float | None = None) -> Operator:
    """Lab-frame Hamiltonian with the inter-mode coupling removed.

    This is the piece whose commutators with the mode-1 quadratures close,
    so the quadrature-qubit matrix-element identity is exact for it (the
    disadvantaged mode enters only as a spectator ladder).
    """
    wq = p.omega_q if omega_q is None else omega_q
    a1, a2, sx = _mode_ops(space)
    sz = pauli(space, "z", 0)
    x1 = a1 + a1.dag()
    h = 0.5 * wq * sz
    h = h + p.omega_eff * (a1.dag() @ a1 + p.k_eff * (x1 @ sx))
    h = h + p.omega_prime * (a2.dag() @ a2)
    return h


def hybrid_mode(space: HilbertSpace, k_eff: float) -> Operator:
    """eta = alpha_1 + k_eff sigma_x, a bosonic lowering operator."""
    a1, _, sx = _mode_ops(space)
    return a1 + k_eff * sx


def build_hamiltonian_hybrid(space: HilbertSpace, p: EffectiveParams) -> Operator:
    """Rotating-frame Hamiltonian in terms of the hybrid mode.

    H = omega_eff eta' eta - omega_eff k_eff^2 sigma_x
        + omega_prime a2' a2 + c2 (a2' eta + eta' a2)
    """
    _, a2, sx = _mode_ops(space)
    eta = hybrid_mode(space, p.k_eff)
    h = p.omega_eff * (eta.dag() @ eta) - (p.omega_eff * p.k_eff**2) * sx
    h = h + p.omega_prime * (a2.dag() @ a2)
    h = h + p.c2 * (a2.dag() @ eta + eta.dag() @ a2)
    return h


def normal_mode_map() -> np.ndarray:
    """Orthonormal mode rotation (alpha_1, alpha_2) = M (a_1, a_2).

    M = [[1, 1], [1, -1]]/sqrt(2) is self-inverse, so the same matrix also
    recovers the bare cavity modes from the normal modes.
    """
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def bare_mode_ops(space: HilbertSpace) -> tuple[Operator, Operator]:
    """Bare cavity lowering operators a_1, a_2 from the normal-mode factors."""
    alpha1 = annihilator(space, 1)
    alpha2 = annihilator(space, 2)
    m = normal_mode_map()
    a1 = m[0, 0] * alpha1 + m[0, 1] * alpha2
    a2 = m[1, 0] * alpha1 + m[1, 1] * alpha2
    return a1, a2


def polariton_ops(space: HilbertSpace, p: EffectiveParams, *,
                  photonic: bool = False,
                  angle: float | None = None) -> tuple[Operator, Operator]:
    """Polariton lowering operators p1, p2.

    p1 = cos(theta) b + sin(theta) alpha_2 and p2 = -sin(theta) b +
    cos(theta) alpha_2 with b = eta (default) or b = alpha_1 when
    ``photonic`` is set.  The photonic variant drops the qubit shift and is
    what photon counters at the ports resolve; at theta = pi/4 it reduces to
    the bare cavity modes.  The rotation angle defaults to ``theta_diag`` so
    the pair diagonalises the quadratic part of the hybrid Hamiltonian.
    """
    th = p.theta_diag if angle is None else angle
    a1 = annihilator(space, 1)
    a2 = annihilator(space, 2)
    base = a1 if photonic else hybrid_mode(space, p.k_eff)
    c, s = math.cos(th), math.sin(th)
    p1 = c * base + s * a2
    p2 = (-s) * base + c * a2
    return p1, p2


# ---------------------------------------------------------------------------
# consistency reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameComparison:
    """Agreement between the lab-frame and hybrid Hamiltonian forms.

    The hybrid form equals the lab form minus the qubit splitting term and
    the sigma_x shift, up to the constant omega_eff k_eff^2 (from
    sigma_x^2 = 1 inside eta' eta).  ``spectral_offset`` reports that
    constant as measured from the eigenvalues; ``max_deviation`` is the
    residual spread after removing it, and ``matrix_residual`` checks the
    operator identity directly.
    """

    spectral_offset: float
    max_deviation: float
    matrix_residual: float
    consistent: bool


def compare_hamiltonian_forms(space: HilbertSpace, p: EffectiveParams,
                              omega_q: float | None = None,
                              tol: float = 1e-9) -> FrameComparison:
    wq = p.omega_q if omega_q is None else omega_q
    h_lab = build_hamiltonian_effective(space, p, wq)
    sz = pauli(space, "z", 0)
    sx = pauli(space, "x", 0)
    h_rot = h_lab - 0.5 * wq * sz - (p.omega_eff * p.k_eff**2) * sx
    h_hyb = build_hamiltonian_hybrid(space, p)

    e_rot = np.linalg.eigvalsh(h_rot.matrix)
    e_hyb = np.linalg.eigvalsh(h_hyb.matrix)
    diff = e_hyb - e_rot
    offset = float(np.mean(diff))
    max_dev = float(np.max(np.abs(diff - offset)))

    shift = (p.omega_eff * p.k_eff**2) * identity(space)
    residual = float(np.max(np.abs((h_hyb - h_rot - shift).matrix)))
    return FrameComparison(
        spectral_offset=offset,
        max_deviation=max_dev,
        matrix_residual=residual,
        consistent=bool(max_dev < tol),
    )


@dataclass(frozen=True)
class ImpedanceReport:
    """Eigenbasis residuals of the quadrature-qubit matrix-element identity.

    For H whose mode-1 commutators close (no inter-mode hopping), the exact
    truncated-space consequences of [H, a1 +- a1'] are, for every eigenpair,

        <n|a1'|n'> (1 - dE/omega_eff) = -k_eff <n|sigma_x D|n'>
        <n|a1 |n'> (1 + dE/omega_eff) = -k_eff <n|sigma_x D|n'>

    with dE = E_n - E_n' and D = [a1, a1'] (identity except the top Fock
    level).  ``max_residual`` is the largest violation of either form.
    ``max_residual_quadrature`` reports the quadrature combination
    <n|a1+a1'|n'>(1 - dE/omega_eff) + 2 k_eff <n|sigma_x|n'>, which is how
    the relation is usually quoted; it is not an operator identity and is
    listed for reference only.

    ``transmission_pairs`` are eigenpairs with dE = omega_eff (within
    ``match_tol``), where the quadrature decouples from the qubit:
    <n|sigma_x|n'> must vanish.  ``degenerate_pairs`` have E_n = E_n', where
    <n|eta + eta'|n'> must vanish.
    """

    max_residual: float
    max_residual_quadrature: float
    transmission_pairs: tuple[tuple[int, int], ...]
    max_sigma_x_at_match: float
    degenerate_pairs: tuple[tuple[int, int], ...]
    max_eta_quadrature_degenerate: float


def impedance_matching_check(h: Operator, p: EffectiveParams, *,
                             match_tol: float = 1e-8,
                             degeneracy_tol: float = 1e-10) -> ImpedanceReport:
    if not h.is_hermitian(1e-10):
        raise ValueError("impedance check requires a Hermitian Hamiltonian")
    space = h.space
    a1, _, sx = _mode_ops(space)
    energies, v = np.linalg.eigh(h.matrix)
    d_comm = commutator(a1, a1.dag())
    eta = hybrid_mode(space, p.k_eff)

    def to_eig(op: Operator) -> np.ndarray:
        return v.conj().T @ op.matrix @ v

    adag_e = to_eig(a1.dag())
    a_e = to_eig(a1)
    sxd_e = to_eig(sx @ d_comm)
    sx_e = to_eig(sx)
    x1_e = adag_e + a_e
    eta_quad_e = to_eig(eta + eta.dag())

    de = energies[:, None] - energies[None, :]
    ratio = de / p.omega_eff
    res_raise = adag_e * (1.0 - ratio) + p.k_eff * sxd_e
    res_lower = a_e * (1.0 + ratio) + p.k_eff * sxd_e
    max_residual = float(max(np.max(np.abs(res_raise)), np.max(np.abs(res_lower))))
    res_quad = x1_e * (1.0 - ratio) + 2.0 * p.k_eff * sx_e
    max_quad = float(np.max(np.abs(res_quad)))

    match_mask = np.abs(de - p.omega_eff) < match_tol
    t_pairs = tuple(zip(*np.nonzero(match_mask)))
    max_sx = float(np.max(np.abs(sx_e[match_mask]))) if t_pairs else 0.0

    degen_mask = (np.abs(de) < degeneracy_tol) & ~np.eye(len(energies), dtype=bool)
    d_pairs = tuple(zip(*np.nonzero(degen_mask)))
    max_eta = float(np.max(np.abs(eta_quad_e[degen_mask]))) if d_pairs else 0.0

    return ImpedanceReport(
        max_residual=max_residual,
        max_residual_quadrature=max_quad,
        transmission_pairs=t_pairs,
        max_sigma_x_at_match=max_sx,
        degenerate_pairs=d_pairs,
        max_eta_quadrature_degenerate=max_eta,
    )
