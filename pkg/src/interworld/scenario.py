"""Scenario files: TOML with a mandatory unit suffix on every physical key.

Pressure is the quantity most easily misread (SI pascal vs. torr vs. nbar),
so nothing is ever assumed: ``pressure_torr = 1e-9`` and ``pressure_pa =
1.333e-7`` are both accepted, a bare ``pressure = ...`` is not.

Example::

    schema_version = 1

    [trap]
    temperature_k = 300.0
    pressure_torr = 1e-9
    ...

    [pulse_policy.branch1]
    kind = "mwi_pi"
    pi_time_s = 1.0

    [timeline]
    wait_before_readout_s = 2.0

    [run]
    n_trials = 1000
    seed = 7
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import tomli_w

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .constants import ATOMIC_MASS, DIPOLE_MU_B_OVER_C, NBAR, TORR
from .decoherence import TrapConfig
from .drive import ExcitationModel, PulseKind, PulseSpec, make_mwi_pulse, make_pi_pulse
from .protocol import ProtocolScenario
from .quantum import DEFAULT_STAGE_TIMES, Branch, Stage

SCHEMA_VERSION = 1

UNITS = {
    "temperature": {"k": 1.0},
    "pressure": {"pa": 1.0, "torr": TORR, "nbar": NBAR, "mbar": 100.0, "bar": 1e5},
    "mass": {"kg": 1.0, "u": ATOMIC_MASS},
    "area": {"m2": 1.0, "cm2": 1e-4},
    "field": {"v_per_m": 1.0},
    "rate": {"per_s": 1.0},
    "length": {"m": 1.0, "um": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "dipole": {"c_m": 1.0, "mu_b_over_c": DIPOLE_MU_B_OVER_C},
}
# Unit written back by serialize_scenario.
SI = {"temperature": "k", "pressure": "pa", "mass": "kg", "area": "m2", "field": "v_per_m",
      "rate": "per_s", "length": "m", "time": "s", "dipole": "c_m"}

TRAP_KEYS = {
    "temperature": ("temperature", "temperature"),
    "pressure": ("pressure", "pressure"),
    "gas_molecule_mass": ("mass", "gas_molecule_mass"),
    "elastic_cross_section": ("area", "elastic_cross_section_sigma_c"),
    "photon_cross_section": ("area", "photon_cross_section"),
    "confining_field": ("field", "confining_field_E_c"),
    "field_variability_fraction": (None, "field_variability_fraction_f_v"),
    "field_variability_frequency": ("rate", "field_variability_frequency"),
    "trap_extension": ("length", "trap_extension_d"),
    "ion_mass": ("mass", "ion_mass"),
}
PULSE_KEYS = {
    "kind": (str, None),
    "pi_time": ("time", None),
    "duration": ("time", None),
    "field": ("field", None),
    "dipole_moment": ("dipole", None),
    "carrier_frequency": ("rate", None),
}
TIMELINE_KEYS = {
    "t0": ("time", Stage.T0),
    "t1": ("time", Stage.T1),
    "t2": ("time", Stage.T2),
    "excitation_start": ("time", Stage.EXCITATION_WINDOW),
    "wait_before_readout": ("time", None),
}
RUN_KEYS = {
    "n_trials": (int, None),
    "seed": (int, None),
    "model": (str, None),
    "photon_split": (None, None),
    "hyperfine_frequency": ("rate", None),
}


class ScenarioError(Exception):
    """Base class; ``key`` and ``line`` locate the problem when known."""

    def __init__(self, message, key=None, line=None, path=None):
        self.key, self.line, self.path = key, line, path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class ScenarioNotFoundError(ScenarioError):
    pass


class ScenarioSyntaxError(ScenarioError, ValueError):
    pass


class UnknownKeyError(ScenarioError, ValueError):
    pass


class UnitMismatchError(ScenarioError, ValueError):
    pass


class InvariantError(ScenarioError, ValueError):
    pass


_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\s]+?)\s*\]")
_KEY = re.compile(r"^\s*([A-Za-z0-9_]+)\s*=")


def _key_lines(text):
    """Map (section, key) to its 1-based line number."""
    lines, section = {}, ""
    for n, raw in enumerate(text.splitlines(), start=1):
        if m := _HEADER.match(raw):
            section = m.group(1).replace(" ", "")
            lines.setdefault((section, None), n)
        elif m := _KEY.match(raw):
            lines.setdefault((section, m.group(1)), n)
    return lines


class _Reader:
    def __init__(self, text, path=None):
        self.lines = _key_lines(text)
        self.path = path
        self.raw = {}  # (section, canonical name) -> key as written

    def fail(self, cls, message, section, key=None):
        key = self.raw.get((section, key), key)
        line = self.lines.get((section, key)) or self.lines.get((section, None))
        dotted = f"{section}.{key}" if section and key else (key or section)
        raise cls(message, key=dotted, line=line, path=self.path)

    def section(self, table, name, spec):
        """Convert one table to {canonical name: SI value}."""
        if not isinstance(table, dict):
            self.fail(ScenarioSyntaxError, "expected a table", name)
        out = {}
        for key, value in table.items():
            base, dim, unit = self._split(key, spec, name)
            self.raw[(name, base)] = key
            kind = spec[base][0]
            if kind is str or kind is int:
                if dim is not None:
                    self.fail(UnitMismatchError, f"{base} takes no unit", name, key)
                ok = isinstance(value, str) if kind is str else isinstance(value, int) and not isinstance(value, bool)
                if not ok:
                    self.fail(InvariantError, f"expected {kind.__name__}, got {value!r}", name, key)
                out[base] = value
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.fail(InvariantError, f"expected a number, got {value!r}", name, key)
            if not math.isfinite(value):
                self.fail(InvariantError, "value must be finite", name, key)
            if base in out:
                self.fail(InvariantError, f"{base} given more than once", name, key)
            out[base] = float(value) * (UNITS[dim][unit] if dim else 1.0)
        return out

    def _split(self, key, spec, section):
        if key in spec:
            dim = spec[key][0]
            if isinstance(dim, str):
                self.fail(UnitMismatchError, f"missing unit suffix (one of {sorted(UNITS[dim])})", section, key)
            return key, None, None
        for base in sorted(spec, key=len, reverse=True):
            if key.startswith(base + "_"):
                dim = spec[base][0]
                unit = key[len(base) + 1:]
                if not isinstance(dim, str):
                    self.fail(UnknownKeyError, f"unknown key (did you mean {base!r}?)", section, key)
                if unit not in UNITS[dim]:
                    self.fail(
                        UnitMismatchError,
                        f"{unit!r} is not a {dim} unit; use one of {sorted(UNITS[dim])}",
                        section,
                        key,
                    )
                return base, dim, unit
        self.fail(UnknownKeyError, "unknown key", section, key)


def _pulse(reader, table, branch, section):
    v = reader.section(table, section, PULSE_KEYS)
    try:
        kind = PulseKind(v.get("kind", "custom"))
    except ValueError:
        reader.fail(InvariantError, f"kind must be one of {[k.value for k in PulseKind]}", section, "kind")
    dipole = v.get("dipole_moment", DIPOLE_MU_B_OVER_C)
    omega = v.get("carrier_frequency")
    extra = {} if omega is None else {"omega": omega}
    try:
        if "pi_time" in v:
            if {"duration", "field"} & v.keys():
                reader.fail(InvariantError, "give either pi_time or duration+field", section)
            if kind is PulseKind.CUSTOM:
                reader.fail(InvariantError, "pi_time needs kind 'pi' or 'mwi_pi'", section, "kind")
            maker = make_pi_pulse if kind is PulseKind.PI else make_mwi_pulse
            return maker(v["pi_time"], dipole, branch=branch, **extra)
        if not {"duration", "field"} <= v.keys():
            reader.fail(InvariantError, "pulse needs pi_time or both duration and field", section)
        return PulseSpec(v["duration"], v["field"], dipole, omega or PulseSpec.carrier_frequency_omega, kind, branch)
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        reader.fail(InvariantError, str(exc), section)


def loads_scenario(text: str, path=None) -> ProtocolScenario:
    reader = _Reader(text, path)
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioSyntaxError(str(exc), path=path) from exc

    allowed = {"schema_version", "trap", "pulse_policy", "timeline", "run"}
    for key in doc:
        if key not in allowed:
            reader.fail(UnknownKeyError, "unknown key", "", key)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        reader.fail(InvariantError, f"schema_version must be {SCHEMA_VERSION}, got {version!r}", "", "schema_version")
    if "trap" not in doc:
        reader.fail(InvariantError, "missing [trap] section", "")

    trap_values = reader.section(doc["trap"], "trap", TRAP_KEYS)
    missing = [k for k in TRAP_KEYS if k not in trap_values and k != "photon_cross_section"]
    if missing:
        reader.fail(InvariantError, f"missing trap keys {missing}", "trap")
    for base, value in trap_values.items():
        if TRAP_KEYS[base][1] in TrapConfig._MAY_BE_ZERO:
            if value < 0:
                reader.fail(InvariantError, "must be nonnegative", "trap", base)
        elif not value > 0:
            reader.fail(InvariantError, "must be positive", "trap", base)
    try:
        trap = TrapConfig(**{TRAP_KEYS[k][1]: v for k, v in trap_values.items()})
    except ValueError as exc:
        reader.fail(InvariantError, str(exc), "trap")

    policy = {}
    pol = doc.get("pulse_policy", {})
    if not isinstance(pol, dict):
        reader.fail(ScenarioSyntaxError, "expected a table", "pulse_policy")
    for name, table in pol.items():
        try:
            branch = Branch(name)
        except ValueError:
            reader.fail(UnknownKeyError, "pulse_policy entries are branch1/branch2", "pulse_policy", name)
        policy[branch] = _pulse(reader, table, branch, f"pulse_policy.{name}")

    tl = reader.section(doc.get("timeline", {}), "timeline", TIMELINE_KEYS)
    stage_times = dict(DEFAULT_STAGE_TIMES)
    for base, (_, stage) in TIMELINE_KEYS.items():
        if stage is not None and base in tl:
            stage_times[stage] = tl[base]

    run = reader.section(doc.get("run", {}), "run", RUN_KEYS)
    kwargs = {}
    if "model" in run:
        try:
            kwargs["model"] = ExcitationModel(run["model"])
        except ValueError:
            reader.fail(InvariantError, f"model must be one of {[m.value for m in ExcitationModel]}", "run", "model")
    for key in ("n_trials", "seed", "photon_split", "hyperfine_frequency"):
        if key in run:
            kwargs[key] = run[key]
    if "wait_before_readout" in tl:
        kwargs["wait_before_readout"] = tl["wait_before_readout"]
    try:
        return ProtocolScenario(trap=trap, pulse_policy=policy, stage_times=stage_times, **kwargs)
    except ValueError as exc:
        reader.fail(InvariantError, str(exc), "run" if "run" in doc else "")


def parse_scenario(path) -> ProtocolScenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ScenarioNotFoundError("scenario file not found", path=path) from exc
    except OSError as exc:
        raise ScenarioNotFoundError(f"cannot read scenario file: {exc.strerror}", path=path) from exc
    return loads_scenario(text, path)


def _si(base, dim):
    return f"{base}_{SI[dim]}"


def scenario_to_dict(scenario: ProtocolScenario) -> dict:
    trap = {}
    for base, (dim, attr) in TRAP_KEYS.items():
        trap[_si(base, dim) if dim else base] = getattr(scenario.trap, attr)
    policy = {}
    for branch, pulse in scenario.pulse_policy.items():
        if pulse is None:
            continue
        policy[branch.value] = {
            "kind": pulse.kind.value,
            "duration_s": pulse.duration,
            "field_v_per_m": pulse.field_strength,
            "dipole_moment_c_m": pulse.dipole_moment,
            "carrier_frequency_per_s": pulse.carrier_frequency_omega,
        }
    timeline = {_si(base, "time"): scenario.stage_times[stage] for base, (_, stage) in TIMELINE_KEYS.items() if stage is not None}
    timeline["wait_before_readout_s"] = scenario.wait_before_readout
    doc = {
        "schema_version": SCHEMA_VERSION,
        "trap": trap,
        "timeline": timeline,
        "run": {
            "n_trials": scenario.n_trials,
            "seed": scenario.seed,
            "model": scenario.model.value,
            "photon_split": scenario.photon_split,
            "hyperfine_frequency_per_s": scenario.hyperfine_frequency,
        },
    }
    if policy:
        doc["pulse_policy"] = policy
    return doc


def serialize_scenario(scenario: ProtocolScenario) -> str:
    """TOML text in SI units that :func:`loads_scenario` maps back exactly."""
    return tomli_w.dumps(scenario_to_dict(scenario))


def write_scenario(scenario: ProtocolScenario, path) -> Path:
    path = Path(path)
    path.write_text(serialize_scenario(scenario), encoding="utf-8")
    return path


def reference_scenario_path() -> Path:
    return Path(__file__).with_name("data") / "reference.toml"
