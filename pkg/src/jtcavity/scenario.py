"""Scenario runner: build the model from a configuration, compute, export.

Every scenario computes its observables twice, at the configured truncation
N and at N + 2, and reports the maximum sup-norm relative drift between the
two; drift above 1e-4 marks the run as non-converged (exit code 2).  All
file output is funnelled through a single writer that emits CSV with
17-significant-digit values, LF line endings and a provenance header, plus
a JSON manifest cross-referencing every file by content hash.  Identical
configurations produce byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .config import CONVERGENCE_DRIFT_TOL, ScenarioConfig
from .correlations import (
    g2_batch,
    population_imbalance,
    port_quadratures,
    positive_frequency_part,
    power_spectrum,
    two_time_corr,
)
from .fockspace import (
    DensityMatrix,
    annihilator,
    basis_state,
    expectation,
    fock_density,
    pure_density,
)
from .jt_model import (
    EffectiveParams,
    RawParams,
    bare_mode_ops,
    build_hamiltonian_effective,
    build_hamiltonian_hybrid,
    build_space,
    effective_params,
    polariton_ops,
)
from .liouville import (
    DissipationParams,
    IntegratorFailure,
    build_liouvillian,
    evolve,
    steady_state,
)
from .series import TimeSeries
from .spikes import SpikeConfig, classify_regime, detect_spikes, gain_ratio, phase_locking

EXIT_OK = 0
EXIT_NONCONVERGED = 2
EXIT_INTEGRATOR = 3


@dataclass
class ScenarioBundle:
    """Everything a scenario produced, before and after serialisation."""

    name: str
    config: ScenarioConfig
    tables: dict[str, dict[str, np.ndarray]]
    summary: dict[str, Any]
    drift: float | None
    converged: bool
    exit_code: int
    files: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# model assembly
# ---------------------------------------------------------------------------


def raw_params_from_config(cfg: ScenarioConfig, *, J: float | None = None) -> RawParams:
    k = cfg["model.k"]
    k1 = cfg["model.k1"] if k is None else k
    k2 = cfg["model.k2"] if k is None else k
    return RawParams(
        omega1=cfg["model.omega1"],
        omega2=cfg["model.omega2"],
        k1=k1,
        k2=k2,
        omega_q=cfg["model.omega_q"],
        J=J if J is not None else cfg["model.J"],
    )


@dataclass
class Model:
    space: Any
    params: EffectiveParams
    hamiltonian: Any
    liouvillian: Any


def build_model(cfg: ScenarioConfig, *, truncation: int | None = None,
                J: float | None = None) -> Model:
    n = truncation if truncation is not None else cfg["model.truncation"]
    space = build_space(n)
    p = effective_params(raw_params_from_config(cfg, J=J))
    if cfg["model.frame"] == "rotating":
        h = build_hamiltonian_hybrid(space, p)
    else:
        h = build_hamiltonian_effective(space, p)
    diss = DissipationParams(
        kappa1=cfg["dissipation.kappa1"],
        kappa2=cfg["dissipation.kappa2"],
        gamma=cfg["dissipation.gamma"],
        gamma_phi=cfg["dissipation.gamma_phi"],
        n_th=cfg["dissipation.n_th"],
    )
    liouv = build_liouvillian(h, diss, dissipate_on=cfg["model.dissipate_on"])
    return Model(space=space, params=p, hamiltonian=h, liouvillian=liouv)


def initial_state(model: Model, descriptor: str) -> DensityMatrix:
    space = model.space
    if descriptor == "vacuum":
        return fock_density(space, [1, 0, 0])  # qubit index 1 = ground
    if descriptor == "cavity1_photon":
        return fock_density(space, [1, 1, 0])
    if descriptor == "bare1_photon":
        a1, _ = bare_mode_ops(space)
        vac = basis_state(space, [1, 0, 0])
        return pure_density(space, a1.dag().matrix @ vac)
    if descriptor == "ground":
        _, v = np.linalg.eigh(model.hamiltonian.matrix)
        return pure_density(space, v[:, 0])
    raise ValueError(f"unknown initial state descriptor {descriptor!r}")


def _tau_grid(cfg: ScenarioConfig) -> np.ndarray:
    n = int(round(cfg["run.tau_max"] / cfg["run.dtau"])) + 1
    return np.linspace(0.0, cfg["run.tau_max"], n)


def _g2_ops(model: Model, which: str):
    if which == "polariton_photonic":
        p1, p2 = polariton_ops(model.space, model.params, photonic=True)
        return {"p1": p1, "p2": p2}
    if which == "polariton_hybrid":
        p1, p2 = polariton_ops(model.space, model.params, photonic=False)
        return {"p1": p1, "p2": p2}
    if which == "ports":
        quads = port_quadratures(model.space)
        xr, _ = positive_frequency_part(model.hamiltonian, quads["3_1"])
        xt, _ = positive_frequency_part(model.hamiltonian, quads["3_2"])
        return {"R": xr, "T": xt}
    raise ValueError(f"unknown g2 operator selection {which!r}")


# ---------------------------------------------------------------------------
# per-kind computations: each returns (tables, summary)
# ---------------------------------------------------------------------------


def _compute_spectrum(cfg: ScenarioConfig, truncation: int):
    j_values = cfg["model.J_list"] or (cfg["model.J"],)
    omega = np.linspace(cfg["run.omega_min"], cfg["run.omega_max"],
                        cfg["run.omega_points"])
    tau = _tau_grid(cfg)
    tables: dict[str, dict[str, np.ndarray]] = {}
    summary: dict[str, Any] = {"J_values": list(j_values)}
    for j in j_values:
        model = build_model(cfg, truncation=truncation, J=j)
        rho_ss = steady_state(model.liouvillian)
        quad = port_quadratures(model.space)["3_1"]
        corr = two_time_corr(model.liouvillian, rho_ss, quad, quad, tau,
                             labels=("X3_1", "X3_1"), state_label="steady")
        spec = power_spectrum(corr, omega)
        tables[f"spectrum_J{j:g}"] = {"omega": omega, "P": spec.values}
        summary[f"spectrum_J{j:g}"] = {
            "warnings": list(spec.warnings),
            "elastic_weight": abs(spec.window["elastic_weight"]),
            "taper_t_w": spec.window["t_w"],
        }
    return tables, summary


def _compute_g2(cfg: ScenarioConfig, truncation: int):
    model = build_model(cfg, truncation=truncation)
    rho0 = initial_state(model, cfg["run.initial_state"])
    tau = _tau_grid(cfg)
    ops = _g2_ops(model, cfg["run.g2_operators"])
    names = list(ops)
    observables = {
        "n_alpha1": annihilator(model.space, 1).dag() @ annihilator(model.space, 1),
        "n_alpha2": annihilator(model.space, 2).dag() @ annihilator(model.space, 2),
    }
    for name, op in ops.items():
        observables[f"n_{name}"] = op.dag() @ op
    series = g2_batch(model.liouvillian, rho0, list(ops.values()), tau,
                      t=cfg["run.t_start"], labels=names)
    traj = evolve(rho0, model.liouvillian, tau, observables, method="expm",
                  validate_states=False)
    z_c, total_c = population_imbalance(
        tau, traj.expectations["n_alpha1"].real, traj.expectations["n_alpha2"].real)
    z_p, _ = population_imbalance(
        tau, traj.expectations[f"n_{names[0]}"].real,
        traj.expectations[f"n_{names[1]}"].real)
    cols = {"tau": tau}
    for name, s in zip(names, series):
        cols[f"g2_{name}"] = s.values
    cols["z_c"] = z_c.values
    cols["z_p"] = z_p.values
    cols["n_total"] = total_c.values
    summary = {
        "g2_zero": {name: float(s.values[0]) for name, s in zip(names, series)},
        "regime_z_c": classify_regime(z_c).__dict__,
        "trace_drift": traj.trace_drift,
    }
    return {"series": cols}, summary


def _compute_imbalance(cfg: ScenarioConfig, truncation: int):
    model = build_model(cfg, truncation=truncation)
    rho0 = initial_state(model, cfg["run.initial_state"])
    tau = _tau_grid(cfg)
    observables = {
        "n_alpha1": annihilator(model.space, 1).dag() @ annihilator(model.space, 1),
        "n_alpha2": annihilator(model.space, 2).dag() @ annihilator(model.space, 2),
    }
    traj = evolve(rho0, model.liouvillian, tau, observables, method="expm",
                  validate_states=False)
    n1 = traj.expectations["n_alpha1"].real
    n2 = traj.expectations["n_alpha2"].real
    z, total = population_imbalance(tau, n1, n2)
    regime = classify_regime(z)
    cols = {"tau": tau, "n1": n1, "n2": n2, "z": z.values, "n_total": total.values}
    return {"series": cols}, {"regime": regime.__dict__, "trace_drift": traj.trace_drift}


def _compute_spikes(cfg: ScenarioConfig, truncation: int):
    model = build_model(cfg, truncation=truncation)
    rho0 = initial_state(model, cfg["run.initial_state"])
    tau = _tau_grid(cfg)
    ops = _g2_ops(model, cfg["run.g2_operators"])
    if set(ops) != {"R", "T"}:
        raise ValueError("spike runs need run.g2_operators = ports")
    quads = port_quadratures(model.space)
    observables = {
        "n_alpha1": annihilator(model.space, 1).dag() @ annihilator(model.space, 1),
        "n_alpha2": annihilator(model.space, 2).dag() @ annihilator(model.space, 2),
        "flux_3_1": ops["R"].dag() @ ops["R"],
        "flux_3_2": ops["T"].dag() @ ops["T"],
    }
    series = g2_batch(model.liouvillian, rho0, [ops["R"], ops["T"]], tau,
                      t=cfg["run.t_start"], labels=["R", "T"])
    g2_r, g2_t = series
    traj = evolve(rho0, model.liouvillian, tau, observables, method="expm",
                  validate_states=False)
    n1 = traj.expectations["n_alpha1"].real
    n2 = traj.expectations["n_alpha2"].real
    z, total = population_imbalance(tau, n1, n2)

    spike_cfg = SpikeConfig(
        threshold_sigma=cfg["run.spike_threshold_sigma"],
        min_separation=cfg["run.spike_min_separation"],
    )
    g2_t_series = TimeSeries(t=tau, values=g2_t.values, label="g2_T")
    train = detect_spikes(g2_t_series, spike_cfg)
    sync = phase_locking(train, TimeSeries(t=tau, values=z.values, label="z_c"))
    regime = classify_regime(TimeSeries(t=tau, values=z.values))
    gain = gain_ratio(TimeSeries(t=tau, values=n1), TimeSeries(t=tau, values=n2))

    cols = {
        "tau": tau,
        "g2_T": g2_t.values,
        "g2_R": g2_r.values,
        "n1": n1,
        "n2": n2,
        "flux_3_1": cfg_gamma0(cfg) * traj.expectations["flux_3_1"].real,
        "flux_3_2": cfg_gamma0(cfg) * traj.expectations["flux_3_2"].real,
        "z": z.values,
    }
    spike_cols = {
        "time": train.spike_times,
        "amplitude": train.amplitudes,
        "kind": np.array([1.0 if k == "peak" else -1.0 for k in train.kinds]),
    }
    sync_cols = {
        "lock_ratio": np.array([sync.lock_ratio]),
        "mean_phase_offset": np.array([sync.mean_phase_offset]),
        "n_spikes": np.array([float(sync.n_spikes)]),
        "gain_summary": np.array([gain.summary]),
        "transmitted_fraction": np.array([gain.transmitted_fraction]),
        "regime_mean": np.array([regime.mean]),
        "regime_amplitude": np.array([regime.amplitude]),
        "zero_crossings": np.array([float(regime.zero_crossings)]),
    }
    summary = {
        "n_spikes": len(train),
        "sync_regime": sync.regime,
        "lock_ratio": sync.lock_ratio,
        "regime": regime.__dict__,
        "gain_summary": gain.summary,
        "transmitted_fraction": gain.transmitted_fraction,
        "trace_drift": traj.trace_drift,
    }
    return {"series": cols, "spikes": spike_cols, "sync": sync_cols}, summary


def cfg_gamma0(cfg: ScenarioConfig) -> float:
    g0 = cfg["run.gamma0"]
    return cfg["dissipation.kappa1"] if g0 is None else g0


def _compute_flux(cfg: ScenarioConfig, truncation: int):
    """Port fluxes of the lab-frame ground state and the steady state.

    Bare-filter fluxes count photons of the decoupled modes inside the
    interacting state (virtual-photon content); dressed-filter fluxes use
    the interacting eigenbasis and vanish identically on the ground state.
    """
    lab_cfg_values = dict(cfg.values)
    lab_cfg_values["model.frame"] = "lab"
    lab_cfg = ScenarioConfig(values=lab_cfg_values, sources=cfg.sources,
                             preset=cfg.preset)
    model = build_model(lab_cfg, truncation=truncation)
    gamma0 = cfg_gamma0(cfg)
    quads = port_quadratures(model.space)
    rho_ground = initial_state(model, "ground")
    rho_ss = steady_state(model.liouvillian)

    # decoupled reference Hamiltonian for the bare-mode filter
    p0 = model.params
    zero = EffectiveParams(
        omega_eff=p0.omega_eff, omega_prime=p0.omega_prime, k_eff=0.0,
        c2=0.0, delta=p0.delta, theta=0.0, theta_diag=0.0,
        E1=max(p0.omega_eff, p0.omega_prime), E2=min(p0.omega_eff, p0.omega_prime),
        omega_q=p0.omega_q, c2_source="J",
    )
    h_free = build_hamiltonian_effective(model.space, zero)

    rows = {"port": [], "flux_bare_ground": [], "flux_dressed_ground": [],
            "flux_bare_steady": [], "flux_dressed_steady": []}
    port_index = {"1": 1.0, "2": 2.0, "3_1": 31.0, "3_2": 32.0}
    for name, quad in quads.items():
        rows["port"].append(port_index[name])
        for label, href in (("bare", h_free), ("dressed", model.hamiltonian)):
            xplus, _ = positive_frequency_part(href, quad)
            nop = xplus.dag() @ xplus
            rows[f"flux_{label}_ground"].append(gamma0 * expectation(nop, rho_ground).real)
            rows[f"flux_{label}_steady"].append(gamma0 * expectation(nop, rho_ss).real)
    cols = {k: np.asarray(v) for k, v in rows.items()}
    summary = {
        "gamma0": gamma0,
        "ground_bare_flux_port3_1": cols["flux_bare_ground"][2],
        "ground_dressed_flux_port3_1": cols["flux_dressed_ground"][2],
    }
    return {"flux": cols}, summary


_COMPUTE = {
    "spectrum": _compute_spectrum,
    "g2": _compute_g2,
    "imbalance": _compute_imbalance,
    "spikes": _compute_spikes,
    "flux": _compute_flux,
}


# ---------------------------------------------------------------------------
# convergence, writing, orchestration
# ---------------------------------------------------------------------------


def _table_drift(ref: dict[str, np.ndarray], other: dict[str, np.ndarray]) -> float:
    skip = {"tau", "omega", "t", "port", "time", "kind"}
    drift = 0.0
    for name, col in ref.items():
        if name in skip or name not in other:
            continue
        a = np.asarray(col, dtype=float)
        b = np.asarray(other[name], dtype=float)
        if a.shape != b.shape:
            return float("inf")
        both = np.isfinite(a) & np.isfinite(b)
        if not np.array_equal(np.isfinite(a), np.isfinite(b)):
            return float("inf")
        if not both.any():
            continue
        scale = max(float(np.max(np.abs(b[both]))), 1e-12)
        drift = max(drift, float(np.max(np.abs(a[both] - b[both]))) / scale)
    return drift


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _write_table(path: Path, cols: dict[str, np.ndarray], header: list[str]):
    names = list(cols)
    arrays = [np.asarray(cols[n]) for n in names]
    n_rows = arrays[0].shape[0] if arrays else 0
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n_rows):
            fh.write(",".join(_fmt(a[i]) for a in arrays) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def output_dir(cfg: ScenarioConfig, name: str) -> Path:
    base = os.environ.get("JTCAVITY_OUTDIR", cfg["output.directory"])
    return Path(base) / name


def run_scenario(cfg: ScenarioConfig, *, name: str | None = None,
                 write: bool = True) -> ScenarioBundle:
    """Compute a scenario, check truncation convergence, export artifacts."""
    kind = cfg["run.kind"]
    if kind == "sweep":
        return run_sweep(cfg, name=name, write=write)
    if kind not in _COMPUTE:
        raise ValueError(f"unknown run kind {kind!r}")
    scenario_name = name or cfg.preset or kind
    compute = _COMPUTE[kind]
    n = cfg["model.truncation"]

    try:
        tables, summary = compute(cfg, n)
        drift = None
        converged = True
        if cfg["output.convergence_check"]:
            tables_hi, _ = compute(cfg, n + 2)
            drift = max(
                (_table_drift(tables[k], tables_hi[k]) for k in tables), default=0.0
            )
            converged = drift <= CONVERGENCE_DRIFT_TOL
    except IntegratorFailure as err:
        bundle = ScenarioBundle(
            name=scenario_name, config=cfg, tables={}, summary={"error": str(err)},
            drift=None, converged=False, exit_code=EXIT_INTEGRATOR,
        )
        return bundle

    exit_code = EXIT_OK if converged else EXIT_NONCONVERGED
    bundle = ScenarioBundle(
        name=scenario_name, config=cfg, tables=tables, summary=summary,
        drift=drift, converged=converged, exit_code=exit_code,
    )
    if write:
        _write_bundle(bundle)
    return bundle


def _write_bundle(bundle: ScenarioBundle):
    cfg = bundle.config
    out = output_dir(cfg, bundle.name)
    out.mkdir(parents=True, exist_ok=True)
    cfg_hash = cfg.config_hash()
    header = [
        f"jtcavity {__version__}",
        f"scenario = {bundle.name}",
        f"config_hash = {cfg_hash}",
    ]
    header += [f"config: {line}" for line in cfg.canonical_text().strip().splitlines()]
    header += [f"assumption: {line}" for line in cfg.assumption_ledger()]
    if bundle.drift is not None:
        header.append(
            f"convergence: drift = {_fmt(bundle.drift)}, "
            f"threshold = {_fmt(CONVERGENCE_DRIFT_TOL)}, "
            f"converged = {str(bundle.converged).lower()}"
        )
    files = {}
    for table_name, cols in bundle.tables.items():
        path = out / f"{table_name}.csv"
        _write_table(path, cols, header)
        files[path.name] = _sha256(path)

    plot_path = out / f"plot_{bundle.name}.py"
    plot_path.write_text(_plot_script(bundle), newline="\n")
    files[plot_path.name] = _sha256(plot_path)

    manifest = {
        "scenario": bundle.name,
        "version": __version__,
        "config_hash": cfg_hash,
        "config": cfg.canonical_text().strip().splitlines(),
        "provenance": cfg.provenance_table(),
        "assumptions": cfg.assumption_ledger(),
        "convergence": {
            "drift": bundle.drift,
            "threshold": CONVERGENCE_DRIFT_TOL,
            "converged": bundle.converged,
        },
        "summary": _jsonable(bundle.summary),
        "files": files,
        "exit_code": bundle.exit_code,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n",
        newline="\n",
    )
    bundle.files = sorted(files) + ["manifest.json"]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return "nan"
    return obj


def _plot_script(bundle: ScenarioBundle) -> str:
    """Standalone matplotlib script for the exported CSVs (not imported here)."""
    csvs = [f"{t}.csv" for t in bundle.tables]
    lines = [
        '"""Plot the exported series of scenario %s (generated file)."""' % bundle.name,
        "import csv",
        "from pathlib import Path",
        "",
        "import matplotlib.pyplot as plt",
        "",
        "HERE = Path(__file__).parent",
        "",
        "def load(name):",
        "    rows = [r for r in open(HERE / name) if not r.startswith('#')]",
        "    reader = csv.reader(rows)",
        "    names = next(reader)",
        "    data = {n: [] for n in names}",
        "    for row in reader:",
        "        for n, v in zip(names, row):",
        "            data[n].append(float(v))",
        "    return data",
        "",
        "fig, axes = plt.subplots(%d, 1, figsize=(7, %d), squeeze=False)"
        % (len(csvs), 3 * len(csvs)),
        "",
    ]
    for i, name in enumerate(csvs):
        lines += [
            f"data = load({name!r})",
            "names = list(data)",
            f"ax = axes[{i}][0]",
            "x = data[names[0]]",
            "for col in names[1:]:",
            "    ax.plot(x, data[col], label=col)",
            "ax.set_xlabel(names[0])",
            f"ax.set_title({name!r})",
            "ax.legend(fontsize=7)",
            "",
        ]
    lines += ["fig.tight_layout()", f"fig.savefig(HERE / '{bundle.name}.png', dpi=150)", ""]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# parameter sweeps
# ---------------------------------------------------------------------------


def _sweep_point(args) -> dict[str, float | str]:
    cfg_values, sources, k, j = args
    values = dict(cfg_values)
    values.update({
        "model.k": k, "model.k1": None, "model.k2": None, "model.J": j,
        "run.kind": "g2",
    })
    point_cfg = ScenarioConfig(values=values, sources=sources)
    row: dict[str, float | str] = {"k": k, "J": j}
    try:
        model = build_model(point_cfg)
        rho0 = initial_state(model, point_cfg["run.initial_state"])
        tau = _tau_grid(point_cfg)
        p1, p2 = polariton_ops(model.space, model.params, photonic=True)
        series = g2_batch(model.liouvillian, rho0, [p1, p2], tau, labels=["p1", "p2"])
        n1_op = annihilator(model.space, 1).dag() @ annihilator(model.space, 1)
        n2_op = annihilator(model.space, 2).dag() @ annihilator(model.space, 2)
        quads = port_quadratures(model.space)
        xr, _ = positive_frequency_part(model.hamiltonian, quads["3_1"])
        xt, _ = positive_frequency_part(model.hamiltonian, quads["3_2"])
        traj = evolve(rho0, model.liouvillian, tau,
                      {"n1": n1_op, "n2": n2_op,
                       "f1": xr.dag() @ xr, "f2": xt.dag() @ xt},
                      method="expm", validate_states=False)
        n1 = traj.expectations["n1"].real
        n2 = traj.expectations["n2"].real
        z, _ = population_imbalance(tau, n1, n2)
        regime = classify_regime(TimeSeries(t=tau, values=z.values))
        gain = gain_ratio(TimeSeries(t=tau, values=n1), TimeSeries(t=tau, values=n2))
        g0 = cfg_gamma0(point_cfg)
        row.update({
            "g2_p1_0": float(series[0].values[0]),
            "g2_p2_0": float(series[1].values[0]),
            "regime": regime.label,
            "gain_summary": gain.summary,
            "flux_3_1_mean": g0 * float(np.mean(traj.expectations["f1"].real)),
            "flux_3_2_mean": g0 * float(np.mean(traj.expectations["f2"].real)),
            "error": "",
        })
    except Exception as err:  # per-point failures propagate as a row column
        row.update({
            "g2_p1_0": float("nan"), "g2_p2_0": float("nan"), "regime": "",
            "gain_summary": float("nan"), "flux_3_1_mean": float("nan"),
            "flux_3_2_mean": float("nan"), "error": f"{type(err).__name__}: {err}",
        })
    return row


def run_sweep(cfg: ScenarioConfig, *, name: str | None = None,
              write: bool = True) -> ScenarioBundle:
    """Grid sweep over (k, J); one row per point, deterministic order."""
    scenario_name = name or cfg.preset or "sweep"
    k_list = cfg["run.sweep_k_list"]
    j_list = cfg["run.sweep_J_list"]
    points = [(k, j) for k in sorted(k_list) for j in sorted(j_list)]
    args = [(dict(cfg.values), dict(cfg.sources), k, j) for k, j in points]
    workers = max(1, int(cfg["run.workers"]))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, args))
    else:
        rows = [_sweep_point(a) for a in args]

    numeric = ["k", "J", "g2_p1_0", "g2_p2_0", "gain_summary",
               "flux_3_1_mean", "flux_3_2_mean"]
    cols: dict[str, np.ndarray] = {
        key: np.array([float(r[key]) for r in rows]) for key in numeric
    }
    regime_code = {"": -1.0, "localized": 0.0, "delocalized": 1.0, "mixed": 2.0}
    cols["regime_code"] = np.array([regime_code[r["regime"]] for r in rows])
    errors = [r["error"] for r in rows]
    summary = {
        "points": len(rows),
        "regimes": [r["regime"] for r in rows],
        "errors": errors,
        "failed_points": sum(1 for e in errors if e),
    }
    bundle = ScenarioBundle(
        name=scenario_name, config=cfg, tables={"sweep": cols}, summary=summary,
        drift=None, converged=True, exit_code=EXIT_OK,
    )
    if write:
        _write_bundle(bundle)
    return bundle
