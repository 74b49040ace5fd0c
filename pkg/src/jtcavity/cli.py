"""Command-line interface.

Subcommands::

    jtcavity preset fig2a|fig2b|fig3a|fig3b|fig3c|fig4a|fig4b  [options]
    jtcavity spectrum|g2|flux|imbalance|spikes|sweep           [options]
    jtcavity check

Options: ``--config FILE`` (dotted-key document), repeatable
``--set key=value`` overrides, ``--truncation N``, ``--output-dir DIR``.
The environment variable ``JTCAVITY_OUTDIR`` overrides the output directory.
Exit codes: 0 success, 1 usage/config error, 2 truncation not converged,
3 integrator failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import PRESETS, ConfigError, parse_config
from .scenario import run_scenario

RUN_KINDS = ("spectrum", "g2", "flux", "imbalance", "spikes", "sweep")


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="dotted-key configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a single key")
    parser.add_argument("--truncation", type=int, help="boson Fock truncation")
    parser.add_argument("--output-dir", help="output directory")
    parser.add_argument("--name", help="scenario name (output subdirectory)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jtcavity",
        description="two-frequency Jahn-Teller coupled-cavity simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in RUN_KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} scenario")
        _add_common(p)
    p = sub.add_parser("preset", help="run a figure preset")
    p.add_argument("preset_name", choices=sorted(PRESETS))
    _add_common(p)
    sub.add_parser("check", help="run the quick invariant battery")
    return parser


def _collect_overrides(args) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.truncation is not None:
        overrides["model.truncation"] = str(args.truncation)
    if args.output_dir is not None:
        overrides["output.directory"] = args.output_dir
    return overrides


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        return run_check()
    try:
        overrides = _collect_overrides(args)
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        preset = args.preset_name if args.command == "preset" else None
        if preset is None:
            overrides.setdefault("run.kind", args.command)
        cfg = parse_config(text, overrides=overrides, preset=preset)
        bundle = run_scenario(cfg, name=args.name)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    if bundle.exit_code == 0:
        status = "ok"
    elif bundle.exit_code == 2:
        status = f"NOT CONVERGED (drift {bundle.drift:.3e} > 1e-4)"
    else:
        status = "INTEGRATOR FAILURE"
    print(f"scenario {bundle.name}: {status}")
    if bundle.drift is not None:
        print(f"truncation drift: {bundle.drift:.3e}")
    for f in bundle.files:
        print(f"wrote {f}")
    return bundle.exit_code


# ---------------------------------------------------------------------------
# invariant battery
# ---------------------------------------------------------------------------


def run_check() -> int:
    """Fast self-test of the core identities; prints one line per check."""
    from . import (
        DissipationParams,
        Liouvillian,
        RawParams,
        annihilator,
        build_hamiltonian_hybrid,
        build_liouvillian,
        build_space,
        commutator,
        compare_hamiltonian_forms,
        effective_params,
        evolve,
        expectation,
        impedance_matching_check,
        jt_center_hamiltonian,
        number_op,
        polariton_ops,
        steady_state,
        two_time_corr,
    )
    from .fockspace import fock_density, space_new, truncation_safe_projector

    failures = 0

    def report(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        mark = "PASS" if ok else "FAIL"
        print(f"[{mark}] {name}" + (f" ({detail})" if detail else ""))
        failures += 0 if ok else 1

    rng = np.random.default_rng(7)
    for _ in range(20):
        w1, w2 = rng.uniform(0.5, 2.0, 2)
        k1, k2 = rng.uniform(0.05, 1.0, 2)
        p = effective_params(RawParams(omega1=w1, omega2=w2, k1=k1, k2=k2))
        ok = (abs(p.E1 + p.E2 - p.omega_eff - p.omega_prime) < 1e-12
              and abs(p.E1 * p.E2 - (p.omega_eff * p.omega_prime - p.c2**2)) < 1e-12)
        if not ok:
            break
    report("effective-parameter trace/determinant identities", ok)

    p = effective_params(RawParams(omega1=1.0, omega2=0.8, k1=0.6, k2=0.3))
    ok = (abs(p.omega_eff - 0.96) < 1e-12 and abs(p.omega_prime - 0.84) < 1e-12
          and abs(p.c2 - 0.08) < 1e-12 and abs(p.E1 - 1.0) < 1e-12)
    report("worked parameter example", ok)

    space = build_space(6)
    fc = compare_hamiltonian_forms(space, p)
    report("lab vs hybrid frame agreement", fc.consistent,
           f"offset {fc.spectral_offset:.3f}, deviation {fc.max_deviation:.1e}")

    rep = impedance_matching_check(jt_center_hamiltonian(space, p), p)
    report("impedance-matching identity", rep.max_residual < 1e-8,
           f"max residual {rep.max_residual:.1e}")

    h = build_hamiltonian_hybrid(space, p)
    proj = truncation_safe_projector(space)
    p1, p2 = polariton_ops(space, p)
    resid = max(
        float(np.max(np.abs((proj @ (commutator(h, op) + e * op) @ proj).matrix)))
        for op, e in ((p1, p.E1), (p2, p.E2))
    )
    report("polaritons diagonalise the quadratic part", resid < 1e-9,
           f"residual {resid:.1e}")

    sp1 = space_new([("boson", 20)])
    a = annihilator(sp1, 0)
    liouv = Liouvillian(1.0 * number_op(sp1, 0),
                        [("decay", a, 0.00115), ("pump", a.dag(), 0.00015)])
    rss = steady_state(liouv)
    nss = expectation(number_op(sp1, 0), rss).real
    report("thermal steady state <n> = 0.15", abs(nss - 0.15) < 1e-6,
           f"<n> = {nss:.8f}")

    t = np.linspace(0.0, 200.0, 101)
    traj = evolve(fock_density(sp1, [2]), liouv, t, {"n": number_op(sp1, 0)})
    report("trace preserved along evolution", traj.trace_drift < 1e-8,
           f"drift {traj.trace_drift:.1e}")

    x = a + a.dag()
    corr = two_time_corr(Liouvillian(1.3 * number_op(sp1, 0), []),
                         fock_density(sp1, [1]), x, x, np.linspace(0, 20, 401))
    expected = 2 * np.exp(-1.3j * corr.tau) + np.exp(1.3j * corr.tau)
    err = float(np.max(np.abs(corr.values - expected)))
    report("regression theorem vs closed-system oracle", err < 1e-8, f"err {err:.1e}")

    print("all checks passed" if failures == 0 else f"{failures} check(s) FAILED")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
