"""INI-style run configuration.

Sections and keys (all keys case-insensitive)::

    [scenario]
    alice = 5, 5, 3          ; x, y, z in metres
    bob = 5, 4.5, 0
    eve = 4.93, 1.73, 0
    ratio = 300              ; optional: H_E := H_B / ratio, eve is then ignored
    sigma_b = 1              ; noise standard deviations
    sigma_e = 1

    [pd]                     ; every key optional, defaults shown
    m = 6
    area_cm2 = 1             ; or area_m2 (mutually exclusive)
    filter_gain = 1
    concentrator_gain = 3
    fov_deg = 75             ; or fov_rad

    [constraints]
    mode = avg               ; avg | peak
    xi = 0.2
    p_db = 50                ; or p (linear); dB is 10*log10(P / 1)
    a_db = 50                ; peak mode only; or a
    p_equals_a = false       ; peak mode: tie P to A (also during A sweeps)

    [sweep]
    variable = P             ; P | A | xi | ratio | alpha
    start = 25               ; P and A grids are in dB
    stop = 85
    num = 61
    spacing = linear         ; linear | log (log is for ratio)

    [region]
    x_range = 0, 10
    y_range = 0, 10
    nx = 200
    ny = 200
    z = 0                    ; defaults to bob's height

    [output]
    path = out.csv
    format = csv
    shannon = false
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

from .scenario import PdParams, Position

SWEEP_VARIABLES = ("P", "A", "xi", "ratio", "alpha")

_ALLOWED = {
    "scenario": {"alice", "bob", "eve", "ratio", "sigma_b", "sigma_e"},
    "pd": {"m", "area_cm2", "area_m2", "filter_gain", "concentrator_gain", "fov_deg", "fov_rad"},
    "constraints": {"mode", "xi", "p", "p_db", "a", "a_db", "p_equals_a"},
    "sweep": {"variable", "start", "stop", "num", "spacing"},
    "region": {"x_range", "y_range", "nx", "ny", "z"},
    "output": {"path", "format", "shannon"},
}


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based when it can be located."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class ConstraintSpec:
    mode: str
    xi: float
    P: float
    A: float | None = None
    p_equals_a: bool = False


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    num: int
    spacing: str = "linear"

    def grid(self) -> list[float]:
        if self.num == 1:
            return [self.start]
        if self.spacing == "log":
            a, b = math.log10(self.start), math.log10(self.stop)
            return [10.0 ** (a + (b - a) * k / (self.num - 1)) for k in range(self.num)]
        return [self.start + (self.stop - self.start) * k / (self.num - 1) for k in range(self.num)]


@dataclass(frozen=True)
class RegionSpec:
    x_range: tuple[float, float] = (0.0, 10.0)
    y_range: tuple[float, float] = (0.0, 10.0)
    nx: int = 200
    ny: int = 200
    z: float | None = None


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"
    shannon: bool = False


@dataclass(frozen=True)
class RunConfig:
    alice: Position
    bob: Position
    eve: Position | None
    pd: PdParams
    sigma_b: float
    sigma_e: float
    constraints: ConstraintSpec
    ratio: float | None = None
    sweep: SweepSpec | None = None
    region: RegionSpec | None = None
    output: OutputSpec = field(default_factory=OutputSpec)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            index.setdefault((section, None), n)
            continue
        m = re.match(r"^([^=:;#\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), n)
    return index


class _Reader:
    def __init__(self, text: str):
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
        try:
            self.cp.read_string(text)
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            raise ConfigError(f"malformed configuration: {exc.message}", line) from exc
        self.lines = _line_index(text)

    def err(self, section: str, key: str | None, message: str) -> ConfigError:
        line = self.lines.get((section, key)) or self.lines.get((section, None))
        return ConfigError(message, line, f"{section}.{key}" if key else section)

    def has(self, section: str, key: str | None = None) -> bool:
        if not self.cp.has_section(section):
            return False
        return key is None or self.cp.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        return self.cp.get(section, key).strip()

    def number(self, section: str, key: str, default: float | None = None) -> float:
        if not self.has(section, key):
            if default is None:
                raise self.err(section, None, f"missing required key '{key}'")
            return default
        try:
            v = float(self.raw(section, key))
        except ValueError:
            raise self.err(section, key, f"not a number: {self.raw(section, key)!r}") from None
        if not math.isfinite(v):
            raise self.err(section, key, "value must be finite")
        return v

    def integer(self, section: str, key: str, default: int) -> int:
        if not self.has(section, key):
            return default
        try:
            return int(self.raw(section, key))
        except ValueError:
            raise self.err(section, key, f"not an integer: {self.raw(section, key)!r}") from None

    def boolean(self, section: str, key: str, default: bool) -> bool:
        if not self.has(section, key):
            return default
        try:
            return self.cp.getboolean(section, key)
        except ValueError:
            raise self.err(section, key, f"not a boolean: {self.raw(section, key)!r}") from None

    def vector(self, section: str, key: str, n: int) -> tuple[float, ...]:
        parts = [p.strip() for p in self.raw(section, key).split(",")]
        try:
            vals = tuple(float(p) for p in parts)
        except ValueError:
            raise self.err(section, key, f"expected {n} comma-separated numbers") from None
        if len(vals) != n or not all(math.isfinite(v) for v in vals):
            raise self.err(section, key, f"expected {n} comma-separated finite numbers")
        return vals

    def position(self, section: str, key: str) -> Position:
        if not self.has(section, key):
            raise self.err(section, None, f"missing required key '{key}'")
        return Position(*self.vector(section, key, 3))

    def linear_or_db(self, section: str, lin: str, db: str) -> float | None:
        has_lin, has_db = self.has(section, lin), self.has(section, db)
        if has_lin and has_db:
            raise self.err(section, db, f"'{lin}' and '{db}' are mutually exclusive")
        if has_db:
            return db_to_linear(self.number(section, db))
        if has_lin:
            return self.number(section, lin)
        return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run configuration.

    Raises
    ------
    ConfigError
        Unknown sections/keys, conflicting units or out-of-range values,
        pointing at the offending line where possible.
    """
    r = _Reader(text)
    for section in r.cp.sections():
        if section not in _ALLOWED:
            raise r.err(section, None, f"unknown section [{section}]")
        for key in r.cp.options(section):
            if key not in _ALLOWED[section]:
                raise r.err(section, key, f"unknown key '{key}'")
    for required in ("scenario", "constraints"):
        if not r.has(required):
            raise ConfigError(f"missing section [{required}]")

    alice = r.position("scenario", "alice")
    bob = r.position("scenario", "bob")
    ratio = r.number("scenario", "ratio") if r.has("scenario", "ratio") else None
    if ratio is not None and not ratio > 0.0:
        raise r.err("scenario", "ratio", "ratio must be positive")
    eve = r.position("scenario", "eve") if r.has("scenario", "eve") else None
    if eve is None and ratio is None:
        raise r.err("scenario", None, "need 'eve' or 'ratio'")
    sigma_b = r.number("scenario", "sigma_b", 1.0)
    sigma_e = r.number("scenario", "sigma_e", 1.0)
    for key, v in (("sigma_b", sigma_b), ("sigma_e", sigma_e)):
        if not v > 0.0:
            raise r.err("scenario", key, "noise std must be positive")
    for who, p in (("bob", bob), ("eve", eve)):
        if p is not None and not alice.z > p.z:
            raise r.err("scenario", who, "transmitter must be above the receivers")

    if r.has("pd", "area_cm2") and r.has("pd", "area_m2"):
        raise r.err("pd", "area_m2", "'area_cm2' and 'area_m2' are mutually exclusive")
    if r.has("pd", "fov_deg") and r.has("pd", "fov_rad"):
        raise r.err("pd", "fov_rad", "'fov_deg' and 'fov_rad' are mutually exclusive")
    fov = r.number("pd", "fov_rad") if r.has("pd", "fov_rad") else math.radians(r.number("pd", "fov_deg", 75.0))
    area = r.number("pd", "area_m2") if r.has("pd", "area_m2") else r.number("pd", "area_cm2", 1.0) * 1e-4
    try:
        pd = PdParams(
            m=r.number("pd", "m", 6.0),
            area=area,
            filter_gain=r.number("pd", "filter_gain", 1.0),
            concentrator_gain=r.number("pd", "concentrator_gain", 3.0),
            fov=fov,
        )
    except ValueError as exc:
        raise r.err("pd", None, str(exc)) from None

    mode = r.raw("constraints", "mode").lower() if r.has("constraints", "mode") else None
    if mode not in ("avg", "peak"):
        raise r.err("constraints", "mode", "mode must be 'avg' or 'peak'")
    xi = r.number("constraints", "xi")
    if not 0.0 < xi <= 1.0:
        raise r.err("constraints", "xi", f"dimming target must lie in (0, 1], got {xi}")
    p_equals_a = r.boolean("constraints", "p_equals_a", False)
    A = r.linear_or_db("constraints", "a", "a_db")
    P = r.linear_or_db("constraints", "p", "p_db")
    if mode == "avg":
        if A is not None or p_equals_a:
            raise r.err("constraints", "mode", "peak settings given in avg mode")
        if P is None:
            raise r.err("constraints", None, "need 'p' or 'p_db'")
    else:
        if A is None:
            raise r.err("constraints", None, "peak mode needs 'a' or 'a_db'")
        if p_equals_a:
            if P is not None:
                raise r.err("constraints", "p_equals_a", "p_equals_a conflicts with an explicit P")
            P = A
        elif P is None:
            raise r.err("constraints", None, "need 'p' or 'p_db' (or p_equals_a = true)")
        if not A > 0.0:
            raise r.err("constraints", "a", "peak intensity must be positive")
        if P > A:
            raise r.err("constraints", None, "nominal intensity must not exceed the peak (P <= A)")
    if not P > 0.0:
        raise r.err("constraints", "p", "nominal intensity must be positive")
    constraints = ConstraintSpec(mode, xi, P, A, p_equals_a)

    sweep = None
    if r.has("sweep"):
        var = r.raw("sweep", "variable") if r.has("sweep", "variable") else None
        canon = {v.lower(): v for v in SWEEP_VARIABLES}
        if var is None or var.lower() not in canon:
            raise r.err("sweep", "variable", f"variable must be one of {SWEEP_VARIABLES}")
        var = canon[var.lower()]
        if var in ("A", "alpha") and mode != "peak":
            raise r.err("sweep", "variable", f"sweeping {var} requires peak mode")
        spacing = r.raw("sweep", "spacing").lower() if r.has("sweep", "spacing") else "linear"
        if spacing not in ("linear", "log"):
            raise r.err("sweep", "spacing", "spacing must be 'linear' or 'log'")
        sweep = SweepSpec(
            var, r.number("sweep", "start"), r.number("sweep", "stop"), r.integer("sweep", "num", 2), spacing
        )
        if sweep.num < 1:
            raise r.err("sweep", "num", "num must be >= 1")
        if sweep.num > 1 and not sweep.stop > sweep.start:
            raise r.err("sweep", "stop", "sweep grid must be strictly increasing")
        if spacing == "log" and not sweep.start > 0.0:
            raise r.err("sweep", "start", "log spacing needs a positive start")
        if var in ("xi", "alpha") and not (0.0 < sweep.start and sweep.stop <= 1.0):
            raise r.err("sweep", "start", f"{var} grid must lie in (0, 1]")
        if var == "ratio" and not sweep.start > 0.0:
            raise r.err("sweep", "start", "ratio grid must be positive")

    region = None
    if r.has("region"):
        region = RegionSpec(
            x_range=r.vector("region", "x_range", 2) if r.has("region", "x_range") else (0.0, 10.0),
            y_range=r.vector("region", "y_range", 2) if r.has("region", "y_range") else (0.0, 10.0),
            nx=r.integer("region", "nx", 200),
            ny=r.integer("region", "ny", 200),
            z=r.number("region", "z") if r.has("region", "z") else None,
        )
        if region.nx < 2 or region.ny < 2:
            raise r.err("region", "nx", "grid needs at least 2 cells per axis")
        for key in ("x_range", "y_range"):
            lo, hi = getattr(region, key)
            if not hi > lo:
                raise r.err("region", key, "range must be increasing")
        z = bob.z if region.z is None else region.z
        if not alice.z > z:
            raise r.err("region", "z", "receiver plane must lie below the transmitter")

    output = OutputSpec()
    if r.has("output"):
        fmt = r.raw("output", "format").lower() if r.has("output", "format") else "csv"
        if fmt != "csv":
            raise r.err("output", "format", "only 'csv' is supported")
        output = OutputSpec(
            path=r.raw("output", "path") if r.has("output", "path") else None,
            format=fmt,
            shannon=r.boolean("output", "shannon", False),
        )

    return RunConfig(
        alice=alice,
        bob=bob,
        eve=eve,
        pd=pd,
        sigma_b=sigma_b,
        sigma_e=sigma_e,
        constraints=constraints,
        ratio=ratio,
        sweep=sweep,
        region=region,
        output=output,
    )


def _vec(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def serialize_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config` on validated configurations (linear units)."""
    lines = ["[scenario]", f"alice = {_vec((cfg.alice.x, cfg.alice.y, cfg.alice.z))}"]
    lines.append(f"bob = {_vec((cfg.bob.x, cfg.bob.y, cfg.bob.z))}")
    if cfg.eve is not None:
        lines.append(f"eve = {_vec((cfg.eve.x, cfg.eve.y, cfg.eve.z))}")
    if cfg.ratio is not None:
        lines.append(f"ratio = {cfg.ratio!r}")
    lines += [f"sigma_b = {cfg.sigma_b!r}", f"sigma_e = {cfg.sigma_e!r}", ""]
    pd = cfg.pd
    lines += [
        "[pd]",
        f"m = {pd.m!r}",
        f"area_m2 = {pd.area!r}",
        f"filter_gain = {pd.filter_gain!r}",
        f"concentrator_gain = {pd.concentrator_gain!r}",
        f"fov_rad = {pd.fov!r}",
        "",
    ]
    c = cfg.constraints
    lines += ["[constraints]", f"mode = {c.mode}", f"xi = {c.xi!r}"]
    if c.mode == "peak":
        lines.append(f"a = {c.A!r}")
        if c.p_equals_a:
            lines.append("p_equals_a = true")
        else:
            lines.append(f"p = {c.P!r}")
    else:
        lines.append(f"p = {c.P!r}")
    lines.append("")
    if cfg.sweep is not None:
        s = cfg.sweep
        lines += [
            "[sweep]",
            f"variable = {s.variable}",
            f"start = {s.start!r}",
            f"stop = {s.stop!r}",
            f"num = {s.num}",
            f"spacing = {s.spacing}",
            "",
        ]
    if cfg.region is not None:
        g = cfg.region
        lines += ["[region]", f"x_range = {_vec(g.x_range)}", f"y_range = {_vec(g.y_range)}", f"nx = {g.nx}", f"ny = {g.ny}"]
        if g.z is not None:
            lines.append(f"z = {g.z!r}")
        lines.append("")
    o = cfg.output
    lines += ["[output]", f"format = {o.format}", f"shannon = {'true' if o.shannon else 'false'}"]
    if o.path is not None:
        lines.append(f"path = {o.path}")
    return "\n".join(lines) + "\n"
