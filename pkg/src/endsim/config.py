"""
Run configuration: a flat, typed ``key = value unit`` text format.

Every physical quantity carries an explicit unit. Lines look like::

    # comment
    source.mass = 2e9 amu
    mask.orders = -2 -1 1 2
    mask.period = auto
    evolution.t = 1 T_M

``T_M`` (the Talbot time of the configured particle and period), ``d``
(the grating period) and ``R_M`` (the crystal radius) are accepted as
units by the keys that describe evolution times and electron positions.
Keys missing from a file take their value from the bundled ``case_study``
preset. Every value is validated at load time; errors name the key.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .constants import UNITS
from .crystal import CrystalSpec, d_spacing, order_amplitudes
from .grating import MaskSpec, aligned_coefficients, misaligned_coefficients
from .interference import EvolutionParams
from .physics import BeamSpec, GaussianState, source_state, talbot_time

__all__ = ["ConfigError", "RunConfig", "SCHEMA", "PRESETS", "load_config", "parse_assignment"]

PRESETS = ("case_study",)

_DIMENSION = {
    "length": ("m", "mm", "um", "nm", "pm", "A"),
    "time": ("s", "ms", "us", "ns"),
    "mass": ("kg", "amu"),
    "energy": ("J", "eV", "keV", "MeV"),
    "frequency": ("Hz", "kHz", "MHz"),
    "temperature": ("K", "mK", "uK", "nK"),
    "wavenumber": ("1/m", "1/nm"),
    "angle": ("rad", "mrad", "urad"),
    "momentum": ("kg*m/s",),
    "dimensionless": ("1",),
}
_UNITS = dict(UNITS, **{"kg*m/s": 1.0})
_RELATIVE = {"time": ("T_M",), "length": ("d", "R_M")}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class _Field:
    kind: str  # quantity | quantities | int | ints | choice
    dimension: str = "dimensionless"
    positive: bool = True
    signed: bool = False
    auto: bool = False
    relative: bool = False
    minimum: int | None = None
    length: int | None = None
    choices: tuple[str, ...] = ()


SCHEMA: dict[str, _Field] = {
    "crystal.lattice_constant": _Field("quantity", "length"),
    "crystal.atomic_number": _Field("int", minimum=1),
    "crystal.radius": _Field("quantity", "length"),
    "crystal.half_thickness": _Field("quantity", "length"),
    "beam.energy": _Field("quantity", "energy"),
    "beam.spot_hwhm": _Field("quantity", "length"),
    "mask.reference": _Field("ints", length=3),
    "mask.orders": _Field("ints"),
    "mask.pinhole_width": _Field("quantity"),
    "mask.period": _Field("quantity", "length", auto=True),
    "source.mass": _Field("quantity", "mass"),
    "source.trap_frequency": _Field("quantity", "frequency"),
    "source.temperature": _Field("quantity", "temperature", positive=False),
    "source.sigma_x": _Field("quantity", "length", auto=True),
    "source.sigma_p": _Field("quantity", "momentum", auto=True),
    "evolution.t0": _Field("quantity", "time", relative=True),
    "evolution.t": _Field("quantity", "time", positive=False, relative=True),
    "evolution.t_max": _Field("quantity", "time", relative=True),
    "evolution.t_points": _Field("int", minimum=2),
    "alignment.mode": _Field("choice", choices=("perfect", "general", "small_pinhole")),
    "alignment.sigma_beta": _Field("quantity", "angle"),
    "alignment.x": _Field("quantity", "length", positive=False, signed=True, relative=True),
    "alignment.y": _Field("quantity", "length", positive=False, signed=True, relative=True),
    "macro.t": _Field("quantity", "time", relative=True),
    "macro.sigma_q_min": _Field("quantity", "wavenumber"),
    "macro.sigma_q_max": _Field("quantity", "wavenumber"),
    "macro.n_scan": _Field("int", minimum=3),
    "macro.rtol": _Field("quantity"),
    "output.grid": _Field("int", minimum=16),
    "output.half_width": _Field("quantity"),
    "output.format": _Field("choice", choices=("csv", "csv+json")),
    "systematics.impact_parameter": _Field("quantity", "length"),
    "systematics.cavity_radius": _Field("quantity", "length"),
    "table.masses": _Field("quantities", "mass"),
    "table.d": _Field("quantity", "length", auto=True),
}


def _format_number(v) -> str:
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _parse_number(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(key, f"value must be finite, got {text!r}")
    return v


def _parse_int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _check_unit(unit: str, spec: _Field, key: str) -> None:
    allowed = _DIMENSION[spec.dimension] + (_RELATIVE.get(spec.dimension, ()) if spec.relative else ())
    if unit not in allowed:
        raise ConfigError(key, f"unit {unit!r} does not match dimension {spec.dimension} "
                               f"(allowed: {', '.join(allowed)})")


def _parse_value(key: str, text: str):
    """Parse the right-hand side of ``key = text`` into (value, unit)."""
    spec = SCHEMA.get(key)
    if spec is None:
        raise ConfigError(key, "unknown key")
    tokens = text.split()
    if not tokens:
        raise ConfigError(key, "missing value")

    if spec.kind == "choice":
        if len(tokens) != 1 or tokens[0] not in spec.choices:
            raise ConfigError(key, f"expected one of {spec.choices}, got {text!r}")
        return tokens[0], ""

    if spec.kind in ("int", "ints"):
        values = tuple(_parse_int(tok, key) for tok in tokens)
        if spec.kind == "int":
            if len(values) != 1:
                raise ConfigError(key, f"expected a single integer, got {text!r}")
            if spec.minimum is not None and values[0] < spec.minimum:
                raise ConfigError(key, f"must be >= {spec.minimum}")
            return values[0], ""
        if spec.length is not None and len(values) != spec.length:
            raise ConfigError(key, f"expected {spec.length} integers, got {len(values)}")
        return values, ""

    if spec.auto and tokens == ["auto"]:
        return "auto", ""
    if spec.kind == "quantity":
        if spec.dimension == "dimensionless" and len(tokens) == 1:
            tokens = tokens + ["1"]
        if len(tokens) != 2:
            raise ConfigError(key, f"expected '<number> <unit>', got {text!r}")
        unit = tokens[1]
        _check_unit(unit, spec, key)
        v = _parse_number(tokens[0], key)
        if spec.positive and not v > 0:
            raise ConfigError(key, f"must be positive, got {v!r}")
        if not (spec.positive or spec.signed) and v < 0:
            raise ConfigError(key, f"must be non-negative, got {v!r}")
        return v, unit

    # list of quantities sharing one trailing unit
    if len(tokens) < 2:
        raise ConfigError(key, f"expected '<numbers...> <unit>', got {text!r}")
    unit = tokens[-1]
    _check_unit(unit, spec, key)
    values = tuple(_parse_number(tok, key) for tok in tokens[:-1])
    if spec.positive and not all(v > 0 for v in values):
        raise ConfigError(key, "all values must be positive")
    return values, unit


def parse_assignment(line: str) -> tuple[str, str]:
    """Split ``key = value`` (or ``key=value``) into stripped parts."""
    if "=" not in line:
        raise ConfigError(line.strip() or "<empty>", "expected 'key = value'")
    key, _, value = line.partition("=")
    return key.strip(), value.strip()


def _parse_text(text: str) -> dict:
    entries = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = parse_assignment(line)
        if key in entries:
            raise ConfigError(key, "duplicate key")
        entries[key] = _parse_value(key, value)
    return entries


def _preset_text(name: str) -> str:
    return resources.files("endsim").joinpath("presets", f"{name}.cfg").read_text(encoding="utf-8")


@contextmanager
def _blame(*keys: str):
    try:
        yield
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError("/".join(keys), str(exc).strip("'\"")) from None


class RunConfig:
    """Validated configuration. Values keep the units they were given in."""

    def __init__(self, entries: dict | None = None):
        merged = _parse_text(_preset_text("case_study"))
        merged.update(entries or {})
        self.entries = dict(sorted(merged.items(), key=lambda kv: list(SCHEMA).index(kv[0])))
        self.validate()

    # construction

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls(_parse_text(text))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_header(cls, text: str) -> "RunConfig":
        """Re-parse the config echo embedded in a CSV header."""
        lines, inside = [], False
        for raw in text.splitlines():
            if not raw.startswith("#"):
                break
            body = raw[1:].strip()
            if body == "config:":
                inside = True
            elif inside and raw.startswith("#   "):
                lines.append(body)
            elif inside:
                break
        if not lines:
            raise ConfigError("<header>", "no config echo found")
        return cls.from_text("\n".join(lines))

    def with_overrides(self, assignments) -> "RunConfig":
        entries = dict(self.entries)
        for a in assignments:
            key, value = parse_assignment(a)
            entries[key] = _parse_value(key, value)
        return RunConfig(entries)

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.entries == other.entries

    def __repr__(self):
        return f"RunConfig({len(self.entries)} entries)"

    def echo(self) -> list[str]:
        """Canonical ``key = value unit`` lines; re-parse to an equal config."""
        out = []
        for key, (value, unit) in self.entries.items():
            if isinstance(value, tuple):
                text = " ".join(_format_number(v) for v in value)
            elif isinstance(value, str):
                text = value
            else:
                text = _format_number(value)
            out.append(f"{key} = {text} {unit}".rstrip())
        return out

    # resolution to SI

    def value(self, key):
        return self.entries[key][0]

    def si(self, key: str):
        value, unit = self.entries[key]
        if value == "auto":
            raise ConfigError(key, "value is 'auto' and has no direct SI value")
        if unit == "T_M":
            scale = self.talbot_time()
        elif unit == "d":
            scale = self.period()
        elif unit == "R_M":
            scale = self.si("crystal.radius")
        else:
            scale = _UNITS[unit] if unit else 1.0
        if isinstance(value, tuple):
            return tuple(v * scale for v in value)
        return value * scale

    # domain objects

    def crystal(self) -> CrystalSpec:
        with _blame("crystal.radius", "crystal.half_thickness", "crystal.lattice_constant"):
            return CrystalSpec(self.si("crystal.lattice_constant"), self.value("crystal.atomic_number"),
                               self.si("crystal.radius"), self.si("crystal.half_thickness"))

    def beam(self) -> BeamSpec:
        with _blame("beam.energy", "beam.spot_hwhm"):
            return BeamSpec.from_spot_hwhm(self.si("beam.energy"), self.si("beam.spot_hwhm"))

    def period(self) -> float:
        if self.value("mask.period") == "auto":
            with _blame("mask.reference"):
                return d_spacing(self.value("mask.reference"), self.si("crystal.lattice_constant"))
        return self.si("mask.period")

    def mask(self) -> MaskSpec:
        with _blame("mask.orders", "mask.pinhole_width"):
            return MaskSpec(self.period(), self.value("mask.orders"), self.si("mask.pinhole_width"))

    def amplitudes(self) -> dict[int, float]:
        with _blame("mask.reference", "mask.orders"):
            return order_amplitudes(self.value("mask.reference"), self.mask().orders, self.crystal(), self.beam())

    def mass(self) -> float:
        return self.si("source.mass")

    def talbot_time(self) -> float:
        return talbot_time(self.mass(), self.period())

    def state(self) -> GaussianState:
        M = self.mass()
        with _blame("source.trap_frequency", "source.temperature"):
            base = source_state(M, 2 * math.pi * self.si("source.trap_frequency"), self.si("source.temperature"))
        sx = base.sigma_x if self.value("source.sigma_x") == "auto" else self.si("source.sigma_x")
        sp = base.sigma_p if self.value("source.sigma_p") == "auto" else self.si("source.sigma_p")
        with _blame("source.sigma_x", "source.sigma_p"):
            return GaussianState(M, sx, sp)

    def evolution(self, t: float | None = None) -> EvolutionParams:
        with _blame("evolution.t0", "evolution.t"):
            return EvolutionParams(self.si("evolution.t0"), self.si("evolution.t") if t is None else t,
                                   self.state(), self.period())

    def coefficients(self, mode: str | None = None, y: float | None = None):
        """Grating coefficients for the configured alignment (or ``mode``/``y`` overrides)."""
        mode = self.value("alignment.mode") if mode is None else mode
        x = self.si("alignment.x")
        y = self.si("alignment.y") if y is None else y
        f = self.amplitudes()
        if mode == "perfect":
            return aligned_coefficients(self.mask(), f, x, y)
        with _blame("alignment.sigma_beta", "alignment.mode"):
            return misaligned_coefficients(self.mask(), f, self.si("alignment.sigma_beta"), y, x, mode)

    def validate(self) -> None:
        """Build every domain object once so invariant violations surface at load time."""
        missing = [k for k in SCHEMA if k not in self.entries]
        if missing:
            raise ConfigError(missing[0], "missing key")
        self.crystal()
        self.beam()
        self.state()
        self.evolution()
        self.coefficients()
        lo, hi = self.si("macro.sigma_q_min"), self.si("macro.sigma_q_max")
        if not lo < hi:
            raise ConfigError("macro.sigma_q_min", "must be below macro.sigma_q_max")
        if 1 / hi < 1e-9 * (1 - 1e-12):
            raise ConfigError("macro.sigma_q_max", "restricted to 1/sigma_q >= 1 nm")
        if self.si("evolution.t_max") <= 0:
            raise ConfigError("evolution.t_max", "must be positive")
        if self.value("table.d") != "auto":
            self.si("table.d")


def load_config(name_or_path: str | None) -> RunConfig:
    """Load a preset by name or a config file by path; None gives the case study."""
    if name_or_path is None or name_or_path in PRESETS:
        return RunConfig()
    path = Path(name_or_path)
    if not path.is_file():
        raise ConfigError("--config", f"no preset or file named {name_or_path!r}")
    return RunConfig.from_file(path)
