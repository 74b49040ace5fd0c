"""Two-time correlations, power spectra, coherence functions, port outputs.

Correlations follow the quantum regression theorem,
<A(tau) B(0)> = Tr[A exp(L tau)(B rho)], propagated with the exact sparse
exponential route.  The power spectrum is the one-sided transform of C(tau)
extended by Hermitian symmetry C(-tau) = C*(tau),

    P(omega) = 2 Re int_0^T C(tau) w(tau) exp(-i omega tau) dtau,

evaluated by trapezoidal quadrature under an exponential taper w(tau) =
exp(-tau/T_w).  In this sign convention emission lines of a mode at
frequency w0 appear at omega = -w0 and absorption lines at +w0.

Port observables split a quadrature into its energy-lowering (positive
frequency) and raising parts in the eigenbasis of a reference Hamiltonian;
which Hamiltonian defines the basis is the caller's choice (dressed basis
of the interacting model, or the decoupled model for bare-mode photon
content).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fockspace import DensityMatrix, Operator, SpaceMismatchError, annihilator
from .jt_model import bare_mode_ops
from .liouville import Liouvillian, propagate_family
from .series import TimeSeries, require_uniform

STATIONARITY_TOL = 1e-8
DECAY_WARN_FRACTION = 1e-6
DEGENERACY_TOL = 1e-10
DENOMINATOR_FLOOR = 1e-12


@dataclass
class CorrelationSeries:
    tau: np.ndarray
    values: np.ndarray
    operators: tuple[str, str]
    state_label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = require_uniform(self.tau, "tau grid")
        self.values = np.asarray(self.values)
        self.meta.setdefault("units", "dimensionless")


@dataclass
class SpectrumSeries:
    omega: np.ndarray
    values: np.ndarray
    window: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# input/output port observables
# ---------------------------------------------------------------------------


def positive_frequency_part(h: Operator, o: Operator, *,
                            degeneracy_tol: float = DEGENERACY_TOL
                            ) -> tuple[Operator, tuple[tuple[int, int], ...]]:
    """Energy-lowering part of O in the eigenbasis of H.

    X+ = sum_{E_j < E_k} <j|O|k> |j><k|, X- = (X+)'.  Degenerate pairs
    (|E_j - E_k| below tolerance) are assigned by ascending eigenvalue index
    and returned for inspection.
    """
    if h.space != o.space:
        raise SpaceMismatchError("H and O act on different spaces")
    if not h.is_hermitian(1e-10):
        raise ValueError("positive-frequency split needs a Hermitian H")
    energies, v = np.linalg.eigh(h.matrix)
    o_eig = v.conj().T @ o.matrix @ v
    de = energies[:, None] - energies[None, :]  # E_j - E_k on (j, k)
    idx = np.arange(len(energies))
    degenerate = np.abs(de) <= degeneracy_tol
    lowering = (de < -degeneracy_tol) | (degenerate & (idx[:, None] < idx[None, :]))
    x_eig = np.where(lowering, o_eig, 0.0)
    flagged = degenerate & (idx[:, None] < idx[None, :]) & (np.abs(o_eig) > 1e-12)
    pairs = tuple((int(j), int(k)) for j, k in zip(*np.nonzero(flagged)))
    return Operator(h.space, v @ x_eig @ v.conj().T), pairs


def port_quadratures(space) -> dict[str, Operator]:
    """Hermitian quadratures measured at the output ports.

    Ports "1"/"2" carry the bare cavity fields; ports "3_1"/"3_2" carry the
    normal-mode combinations, with 3_1 = (1 + 2)/sqrt(2) under the
    orthonormal mode map.
    """
    a1, a2 = bare_mode_ops(space)
    alpha1 = annihilator(space, 1)
    alpha2 = annihilator(space, 2)
    return {
        "1": a1 + a1.dag(),
        "2": a2 + a2.dag(),
        "3_1": alpha1 + alpha1.dag(),
        "3_2": alpha2 + alpha2.dag(),
    }


def output_flux(h: Operator, o: Operator, gamma0: float, rho: DensityMatrix) -> float:
    """Photon output rate gamma0 <X- X+> for the quadrature O.

    H fixes the eigenbasis used for the positive-frequency split; pass the
    decoupled Hamiltonian to count bare-mode photons in an interacting
    state, or the interacting one for the dressed (true emission) rate.
    """
    if gamma0 < 0:
        raise ValueError("gamma0 must be non-negative")
    xplus, _ = positive_frequency_part(h, o)
    value = np.trace(xplus.dag().matrix @ xplus.matrix @ rho.matrix)
    return gamma0 * float(value.real)


# ---------------------------------------------------------------------------
# quantum regression
# ---------------------------------------------------------------------------


def two_time_corr(liouv: Liouvillian, rho: DensityMatrix, a: Operator,
                  b: Operator, tau_grid: np.ndarray, *,
                  labels: tuple[str, str] = ("A", "B"),
                  state_label: str = "") -> CorrelationSeries:
    """<A(tau) B(0)> = Tr[A exp(L tau)(B rho)] on a uniform tau grid.

    The metadata records the stationarity residual max|L rho| (the spectrum
    transform warns when the state was not stationary) and the one-time
    means Tr[A rho], Tr[B rho] used for elastic subtraction.
    """
    for op in (a, b):
        if op.space != liouv.space:
            raise SpaceMismatchError("correlation operator on a different space")
    if rho.space != liouv.space:
        raise SpaceMismatchError("state on a different space")
    tau = require_uniform(np.asarray(tau_grid, float), "tau grid")
    seed = b.matrix @ rho.matrix
    evolved = propagate_family(liouv, [seed], tau)[:, 0]
    values = np.einsum("ij,tji->t", a.matrix, evolved)
    stat_residual = float(np.max(np.abs(liouv.apply(np.asarray(rho.matrix)))))
    meta = {
        "stationarity_residual": stat_residual,
        "mean_A": complex(np.trace(a.matrix @ rho.matrix)),
        "mean_B": complex(np.trace(b.matrix @ rho.matrix)),
    }
    return CorrelationSeries(tau=tau, values=values, operators=labels,
                             state_label=state_label, meta=meta)


def power_spectrum(corr: CorrelationSeries, omega_grid: np.ndarray, *,
                   taper_ratio: float = 5.0,
                   subtract_elastic: bool = True) -> SpectrumSeries:
    """One-sided tapered transform of the correlation series.

    The elastic (coherent) component Tr[A rho] Tr[B rho] is subtracted by
    default and reported in the window metadata; without subtraction it
    would alias into a taper-broadened line at omega = 0.
    """
    tau = corr.tau
    window = float(tau[-1] - tau[0])
    t_w = window / taper_ratio
    values = corr.values.astype(complex).copy()
    elastic = 0.0 + 0.0j
    if subtract_elastic and "mean_A" in corr.meta:
        elastic = corr.meta["mean_A"] * corr.meta["mean_B"]
        values = values - elastic

    warnings = []
    peak = float(np.max(np.abs(values)))
    if peak > 0 and abs(values[-1]) > DECAY_WARN_FRACTION * peak:
        warnings.append(
            f"correlation decayed to {abs(values[-1]) / peak:.2e} of its peak "
            "at the window end; spectrum may show truncation ringing"
        )
    if corr.meta.get("stationarity_residual", 0.0) > STATIONARITY_TOL:
        warnings.append(
            "state was not stationary "
            f"(|L rho| = {corr.meta['stationarity_residual']:.2e})"
        )

    taper = np.exp(-(tau - tau[0]) / t_w)
    weights = np.full(len(tau), tau[1] - tau[0])
    weights[0] *= 0.5
    weights[-1] *= 0.5
    integrand = values * taper * weights
    omega = np.asarray(omega_grid, dtype=float)
    phases = np.exp(-1j * np.outer(omega, tau - tau[0]))
    p = 2.0 * np.real(phases @ integrand)
    return SpectrumSeries(
        omega=omega,
        values=p,
        window={
            "taper": "exponential",
            "t_w": t_w,
            "window": window,
            "elastic_weight": elastic,
            "subtract_elastic": subtract_elastic,
        },
        warnings=tuple(warnings),
    )


def g2_batch(liouv: Liouvillian, rho0: DensityMatrix, ops: Sequence[Operator],
             tau_grid: np.ndarray, *, t: float = 0.0,
             labels: Sequence[str] | None = None) -> list[CorrelationSeries]:
    """Second-order coherences of several modes from one propagation family.

    For each operator O,

        g2(tau) = Tr[O'O exp(L tau)(O rho(t) O')]
                  / (Tr[O'O rho(t)] Tr[O'O rho(t + tau)]),

    the time- and normally-ordered photon-counting form, with the
    non-stationary normalisation evaluated at both measurement times.
    Samples with vanishing denominator are NaN-masked (mask in metadata).
    """
    labels = list(labels) if labels is not None else [f"O{i}" for i in range(len(ops))]
    for op in ops:
        if op.space != liouv.space:
            raise SpaceMismatchError("operator on a different space")
    tau = require_uniform(np.asarray(tau_grid, float), "tau grid")
    rho_t = np.asarray(rho0.matrix, dtype=complex)
    if t > 0.0:
        rho_t = propagate_family(liouv, [rho_t], np.array([0.0, t]))[-1, 0]
    n_ops = [op.dag().matrix @ op.matrix for op in ops]
    n_t = [float(np.real(np.trace(n @ rho_t))) for n in n_ops]
    for label, n in zip(labels, n_t):
        if n <= DENOMINATOR_FLOOR:
            raise ValueError(
                f"<O'O>(t) = {n:.3e} for {label!r} is too small for g2 normalisation"
            )
    seeds = [op.matrix @ rho_t @ op.matrix.conj().T for op in ops]
    evolved = propagate_family(liouv, [rho_t] + seeds, tau)
    out = []
    for i, (label, n_op) in enumerate(zip(labels, n_ops)):
        n_tau = np.real(np.einsum("ij,tji->t", n_op, evolved[:, 0]))
        numer = np.real(np.einsum("ij,tji->t", n_op, evolved[:, 1 + i]))
        denom = n_t[i] * n_tau
        mask = denom > DENOMINATOR_FLOOR
        values = np.full(len(tau), np.nan)
        values[mask] = numer[mask] / denom[mask]
        out.append(CorrelationSeries(
            tau=tau,
            values=values,
            operators=(label, label),
            state_label=f"rho(t={t:g})",
            meta={"mask": mask, "n_of_t": n_t[i], "n_of_t_plus_tau": n_tau},
        ))
    return out


def g2(liouv: Liouvillian, rho0: DensityMatrix, o: Operator,
       tau_grid: np.ndarray, *, t: float = 0.0,
       label: str = "O") -> CorrelationSeries:
    """Single-operator wrapper around :func:`g2_batch`."""
    return g2_batch(liouv, rho0, [o], tau_grid, t=t, labels=[label])[0]


def population_imbalance(t: np.ndarray, n1: np.ndarray, n2: np.ndarray, *,
                         label: str = "z") -> tuple[TimeSeries, TimeSeries]:
    """z(t) = (n1 - n2)/(n1 + n2) and the total occupation N = n1 + n2.

    Samples where the total drops below 1e-12 are NaN-masked.
    """
    n1 = np.real(np.asarray(n1))
    n2 = np.real(np.asarray(n2))
    total = n1 + n2
    z = np.full(total.shape, np.nan)
    ok = total > DENOMINATOR_FLOOR
    z[ok] = (n1[ok] - n2[ok]) / total[ok]
    zs = TimeSeries(t=np.asarray(t, float), values=z, label=label,
                    meta={"mask": ok})
    ns = TimeSeries(t=np.asarray(t, float), values=total, label="total")
    return zs, ns
