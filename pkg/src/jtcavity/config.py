"""Scenario configuration: flat dotted-key documents, presets, provenance.

Grammar (one entry per line)::

    # comment
    model.k = 0.35355339059327373
    run.kind = spectrum
    model.J_list = 0.0, 0.5, 1.0

Keys are validated against a closed registry; unknown keys, bad types and
violated invariants are reported with the key path and line number.  Every
default carries a provenance note distinguishing measured/published values
from artifact assumptions, and the resolved configuration records which
assumptions are in effect so output headers can disclose them.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any

SQRT2 = math.sqrt(2.0)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class KeySpec:
    type: str            # "float" | "int" | "str" | "bool" | "float_list" | "opt_float"
    default: Any
    provenance: str      # "published" | "assumption" | "artifact"
    note: str = ""
    choices: tuple[str, ...] | None = None


REGISTRY: dict[str, KeySpec] = {
    # -- model -------------------------------------------------------------
    "model.omega1": KeySpec("float", 1.0, "assumption",
                            "resonator frequency 1; source material gives none"),
    "model.omega2": KeySpec("float", 0.9, "assumption",
                            "resonator frequency 2 (delta = 0.1)"),
    "model.k": KeySpec("opt_float", None, "artifact",
                       "per-mode coupling shorthand, sets k1 = k2 = k"),
    "model.k1": KeySpec("opt_float", None, "artifact", "qubit coupling to mode 1"),
    "model.k2": KeySpec("opt_float", None, "artifact", "qubit coupling to mode 2"),
    "model.omega_q": KeySpec("opt_float", None, "assumption",
                             "qubit frequency; default resonance with omega_eff"),
    "model.J": KeySpec("opt_float", None, "artifact",
                       "hopping strength; overrides the delta-derived c2 when set"),
    "model.J_list": KeySpec("float_list", None, "artifact",
                            "hopping sweep for spectrum runs"),
    "model.truncation": KeySpec("int", 6, "artifact",
                                "boson Fock truncation per mode"),
    "model.frame": KeySpec("str", "rotating", "artifact",
                           "Hamiltonian frame for dynamics runs",
                           choices=("rotating", "lab")),
    "model.dissipate_on": KeySpec("str", "normal", "artifact",
                                  "damp the normal modes (as the master equation "
                                  "is written) or the bare cavity modes",
                                  choices=("normal", "bare")),
    # -- dissipation (published rates) --------------------------------------
    "dissipation.kappa1": KeySpec("float", 0.001, "published", "cavity loss rate 1"),
    "dissipation.kappa2": KeySpec("float", 0.001, "published", "cavity loss rate 2"),
    "dissipation.gamma": KeySpec("float", 0.001, "published", "qubit relaxation rate"),
    "dissipation.gamma_phi": KeySpec("float", 0.01, "published", "qubit dephasing rate"),
    "dissipation.n_th": KeySpec("float", 0.15, "published",
                                "thermal occupation (about 100 mK)"),
    # -- run ----------------------------------------------------------------
    "run.kind": KeySpec("str", None, "artifact", "what to compute",
                        choices=("spectrum", "g2", "flux", "imbalance",
                                 "spikes", "sweep")),
    "run.tau_max": KeySpec("float", 150.0, "artifact", "delay-grid extent"),
    "run.dtau": KeySpec("float", 0.05, "artifact", "delay-grid spacing"),
    "run.omega_min": KeySpec("float", -3.0, "artifact", "spectrum grid start"),
    "run.omega_max": KeySpec("float", 3.0, "artifact", "spectrum grid end"),
    "run.omega_points": KeySpec("int", 2401, "artifact", "spectrum grid size"),
    "run.initial_state": KeySpec("str", "cavity1_photon", "artifact",
                                 "initial state descriptor",
                                 choices=("vacuum", "cavity1_photon",
                                          "bare1_photon", "ground")),
    "run.t_start": KeySpec("float", 0.0, "assumption",
                           "measurement start time for coherence runs"),
    "run.g2_operators": KeySpec("str", "polariton_photonic", "artifact",
                                "mode pair probed by the coherence functions",
                                choices=("polariton_photonic", "polariton_hybrid",
                                         "ports")),
    "run.gamma0": KeySpec("opt_float", None, "assumption",
                          "output port coupling; default kappa1"),
    "run.spike_threshold_sigma": KeySpec("float", 4.0, "artifact",
                                         "spike threshold in running-MAD units"),
    "run.spike_min_separation": KeySpec("float", 1.0, "artifact",
                                        "minimum spike spacing (time units)"),
    "run.sweep_k_list": KeySpec("float_list", None, "artifact",
                                "per-mode couplings for sweep runs"),
    "run.sweep_J_list": KeySpec("float_list", None, "artifact",
                                "hoppings for sweep runs"),
    "run.workers": KeySpec("int", 1, "artifact", "parallel sweep workers"),
    # -- output ---------------------------------------------------------------
    "output.directory": KeySpec("str", "out", "artifact", "output directory"),
    "output.convergence_check": KeySpec("bool", True, "artifact",
                                        "re-run at truncation + 2 and report drift"),
}

REQUIRED_KEYS = ("run.kind",)
CONVERGENCE_DRIFT_TOL = 1e-4


def _parse_value(key: str, spec: KeySpec, raw: str, line_no: int):
    raw = raw.strip()
    try:
        if spec.type == "float":
            return float(raw)
        if spec.type == "opt_float":
            return None if raw.lower() == "none" else float(raw)
        if spec.type == "int":
            v = float(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        if spec.type == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError
        if spec.type == "float_list":
            if raw.lower() == "none":
                return None
            return tuple(float(x) for x in raw.split(","))
        if spec.type == "str":
            return raw
    except ValueError:
        raise ConfigError(
            f"line {line_no}: key {key!r} expects {spec.type}, got {raw!r}"
        ) from None
    raise ConfigError(f"line {line_no}: unhandled type for key {key!r}")


@dataclass
class ScenarioConfig:
    """Fully resolved configuration with per-key provenance."""

    values: dict[str, Any]
    sources: dict[str, str]            # key -> "default" | "preset" | "user"
    preset: str | None = None

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def canonical_text(self) -> str:
        lines = []
        for key in sorted(self.values):
            v = self.values[key]
            if isinstance(v, tuple):
                v = ", ".join(format(x, ".17g") for x in v)
            elif isinstance(v, float):
                v = format(v, ".17g")
            lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]

    def assumption_ledger(self) -> list[str]:
        """Active defaults whose values are artifact assumptions."""
        out = []
        for key, spec in REGISTRY.items():
            if spec.provenance == "assumption":
                origin = self.sources.get(key, "default")
                val = self.values.get(key)
                out.append(f"{key} = {val} ({origin}; {spec.note})")
        return out

    def provenance_table(self) -> dict[str, dict[str, Any]]:
        return {
            key: {
                "value": self.values.get(key),
                "source": self.sources.get(key, "default"),
                "provenance": REGISTRY[key].provenance,
                "note": REGISTRY[key].note,
            }
            for key in sorted(REGISTRY)
        }


def _validate(values: dict[str, Any]):
    kind = values.get("run.kind")
    if kind is None:
        raise ConfigError(f"missing required keys: {', '.join(REQUIRED_KEYS)}")
    if values["model.truncation"] < 2:
        raise ConfigError("model.truncation must be at least 2")
    if values["run.tau_max"] <= 0 or values["run.dtau"] <= 0:
        raise ConfigError("run.tau_max and run.dtau must be positive")
    k, k1, k2 = values["model.k"], values["model.k1"], values["model.k2"]
    if k is None and (k1 is None or k2 is None):
        raise ConfigError("set model.k, or both model.k1 and model.k2")
    if k is not None and (k1 is not None or k2 is not None):
        raise ConfigError("model.k conflicts with model.k1/model.k2")
    if kind == "spectrum" and values["model.J_list"] is None and values["model.J"] is None:
        raise ConfigError("spectrum runs need model.J or model.J_list")
    if kind == "sweep":
        if values["run.sweep_k_list"] is None or values["run.sweep_J_list"] is None:
            raise ConfigError("sweep runs need run.sweep_k_list and run.sweep_J_list")
    for key, spec in REGISTRY.items():
        if spec.choices is not None and values.get(key) is not None:
            if values[key] not in spec.choices:
                raise ConfigError(
                    f"key {key!r}: {values[key]!r} not one of {spec.choices}"
                )


def _resolve(entries: dict[str, Any], sources: dict[str, str],
             preset: str | None) -> ScenarioConfig:
    values = {key: spec.default for key, spec in REGISTRY.items()}
    values.update(entries)
    _validate(values)
    cfg = ScenarioConfig(values=values, sources=sources, preset=preset)
    return cfg


def parse_config(text: str, *, overrides: dict[str, str] | None = None,
                 preset: str | None = None) -> ScenarioConfig:
    """Parse a dotted-key document, apply overrides, fill defaults."""
    entries: dict[str, Any] = {}
    sources: dict[str, str] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        entries.update(PRESETS[preset])
        sources.update({k: "preset" for k in PRESETS[preset]})

    for line_no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in REGISTRY:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        entries[key] = _parse_value(key, REGISTRY[key], raw, line_no)
        sources[key] = "user"

    for key, raw in (overrides or {}).items():
        if key not in REGISTRY:
            raise ConfigError(f"override: unknown key {key!r}")
        entries[key] = _parse_value(key, REGISTRY[key], raw, 0)
        sources[key] = "user"

    return _resolve(entries, sources, preset)


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------
# Coupling values quoted as k = x/sqrt(2) are per-mode couplings k1 = k2, so
# the combined k_eff = sqrt(2) k reaches x.  With k1 = k2 the two effective
# mode frequencies coincide and the polariton mixing angle is exactly pi/4.

PRESETS: dict[str, dict[str, Any]] = {
    "fig2a": {
        "run.kind": "spectrum",
        "model.k": 0.5 / SQRT2,
        "model.J_list": (0.0, 0.5, 1.0),
        "run.tau_max": 300.0,
        "run.dtau": 0.06,
        "run.omega_min": -3.0,
        "run.omega_max": 3.0,
        "run.omega_points": 2401,
    },
    "fig2b": {
        "run.kind": "spectrum",
        "model.k": 1.0 / SQRT2,
        "model.J_list": (0.0, 0.5, 1.0),
        "run.tau_max": 300.0,
        "run.dtau": 0.06,
        "run.omega_min": -3.0,
        "run.omega_max": 3.0,
        "run.omega_points": 2401,
    },
    "fig3a": {
        "run.kind": "g2",
        "model.k": 0.1 / SQRT2,
        "model.J": 0.5,
        "run.tau_max": 150.0,
        "run.dtau": 0.05,
    },
    "fig3b": {
        "run.kind": "g2",
        "model.k": 0.5 / SQRT2,
        "model.J": 0.5,
        "run.tau_max": 150.0,
        "run.dtau": 0.05,
    },
    "fig3c": {
        "run.kind": "g2",
        "model.k": 1.0 / SQRT2,
        "model.J": 0.5,
        "run.tau_max": 150.0,
        "run.dtau": 0.05,
    },
    "fig4a": {
        "run.kind": "spikes",
        "model.k": 0.1,
        "model.J": 0.5,
        "run.tau_max": 150.0,
        "run.dtau": 0.05,
        "run.g2_operators": "ports",
    },
    "fig4b": {
        "run.kind": "spikes",
        "model.k": 0.5,
        "model.J": 1.0,
        "run.tau_max": 150.0,
        "run.dtau": 0.05,
        "run.g2_operators": "ports",
    },
}
