"""Experiment configuration: a flat ``key = value`` file with section headers.

Example::

    [field]
    spec = harmonic:2d:k=2:cos
    center = 0, 0

    [radii]
    start = 0.2
    stop = 1.0
    count = 20
    spacing = geometric

    [quad]
    order2d = 128

Unknown sections or keys are rejected so typos surface as usage errors.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .errors import FreqlabError


class ConfigError(FreqlabError, ValueError):
    """The configuration file is missing, malformed or inconsistent."""


# default tolerances for closed-form fields
TOLERANCES = {
    "identity_rtol": 1e-9,  # floor for the radial-derivative identities
    "fd_safety": 10.0,  # multiple of the estimated finite-difference error
    "consistency_rtol": 1e-9,  # Gauss-Green, Cauchy-Schwarz
    "rellich": 1e-8,  # Rellich-Necas residual relative to r*Dsurf
    "monotone": 1e-9,
    "harnack_rtol": 1e-9,
    "representation_rtol": 1e-6,
    "vanishing": 1e-9,
    "growth": 1e-6,
    "scaling_rtol": 1e-9,
}

# grid-backed fields only satisfy the identities up to discretisation error
GRID_TOLERANCES = {
    **TOLERANCES,
    "consistency_rtol": 1e-2,
    "rellich": 1e-2,
    "monotone": 1e-3,
    "harnack_rtol": 1e-3,
    "representation_rtol": 1e-3,
    "vanishing": 1e-3,
    "growth": 1e-3,
}

_SCHEMA = {
    "field": {"spec", "center", "n"},
    "radii": {"start", "stop", "count", "spacing"},
    "frequency": {"p", "floor"},
    "quad": {"order2d", "order3d", "radial_nodes"},
    "tolerance": set(TOLERANCES),
    "drift": {"m", "c_p", "safety"},
    "checks": {"harnack_s", "harnack_t", "scaling_taus", "poincare", "poincare_gamma0", "poincare_c_p", "doubling_factor"},
    "solver": {"a", "b", "h", "equation", "drift", "p", "epsilon", "boundary", "tol", "max_iter", "damping", "chain"},
    "output": {"csv", "report", "grid"},
}


@dataclass
class SolverConfig:
    a: float = -1.0
    b: float = 1.0
    h: float = 1 / 64
    equation: str = "laplace"
    drift: tuple[float, float] = (0.0, 0.0)
    p: float = 2.0
    epsilon: float = 1e-6
    boundary: str = "harmonic:2d:k=3:cos"
    tol: float = 1e-10
    max_iter: int = 20000
    damping: float = 1.0
    chain: str = "none"


@dataclass
class ExperimentConfig:
    field: str | None = None
    center: tuple[float, ...] | None = None
    n: int | None = None
    start: float = 0.2
    stop: float = 1.0
    count: int = 20
    spacing: str = "geometric"
    p: float | None = None
    floor: float = 1e-14
    order2d: int = 128
    order3d: int = 32
    radial_nodes: int = 48
    tolerances: dict = dc_field(default_factory=dict)
    drift_M: float | None = None
    C_p: float = 1.0
    safety: float = 0.9
    harnack_s: float | None = None
    harnack_t: float | None = None
    scaling_taus: tuple[float, ...] = (0.5, 2.0)
    poincare: bool | None = None
    poincare_gamma0: float = 0.5
    poincare_C_p: float = 1.0
    doubling_factor: float = 4.0
    solver: SolverConfig | None = None
    csv_name: str = "profile.csv"
    report_name: str = "report.txt"
    grid_name: str | None = None

    def validate(self):
        if not 0 < self.start < self.stop:
            raise ConfigError(f"radii: need 0 < start < stop (got start={self.start:g}, stop={self.stop:g})")
        if self.count < 3:
            raise ConfigError("radii: count must be at least 3")
        if self.spacing not in ("geometric", "linear"):
            raise ConfigError(f"radii: unknown spacing {self.spacing!r}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance.{k} must be positive")
        if self.p is not None and not self.p > 1:
            raise ConfigError("frequency.p must exceed 1")
        if any(not t > 0 for t in self.scaling_taus):
            raise ConfigError("checks.scaling_taus must be positive")
        return self

    def tolerance(self, key: str, grid: bool = False) -> float:
        base = GRID_TOLERANCES if grid else TOLERANCES
        return float(self.tolerances.get(key, base[key]))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(" ", "").split(",") if t)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a configuration file; raises :class:`ConfigError`."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        with path.open(encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return config_from_parser(parser)


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_parser(parser)


def config_from_parser(parser: configparser.ConfigParser) -> ExperimentConfig:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(parser[section]) - _SCHEMA[section]
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {', '.join(sorted(extra))}")
    cfg = ExperimentConfig()
    try:
        if parser.has_section("field"):
            sec = parser["field"]
            cfg.field = sec.get("spec")
            if "center" in sec:
                cfg.center = _floats(sec["center"])
            if "n" in sec:
                cfg.n = sec.getint("n")
        if parser.has_section("radii"):
            sec = parser["radii"]
            cfg.start = sec.getfloat("start", cfg.start)
            cfg.stop = sec.getfloat("stop", cfg.stop)
            cfg.count = sec.getint("count", cfg.count)
            cfg.spacing = sec.get("spacing", cfg.spacing)
        if parser.has_section("frequency"):
            sec = parser["frequency"]
            if "p" in sec:
                cfg.p = sec.getfloat("p")
            cfg.floor = sec.getfloat("floor", cfg.floor)
        if parser.has_section("quad"):
            sec = parser["quad"]
            cfg.order2d = sec.getint("order2d", cfg.order2d)
            cfg.order3d = sec.getint("order3d", cfg.order3d)
            cfg.radial_nodes = sec.getint("radial_nodes", cfg.radial_nodes)
        if parser.has_section("tolerance"):
            cfg.tolerances = {k: float(v) for k, v in parser["tolerance"].items()}
        if parser.has_section("drift"):
            sec = parser["drift"]
            if "m" in sec:
                cfg.drift_M = sec.getfloat("m")
            cfg.C_p = sec.getfloat("c_p", cfg.C_p)
            cfg.safety = sec.getfloat("safety", cfg.safety)
        if parser.has_section("checks"):
            sec = parser["checks"]
            if "harnack_s" in sec:
                cfg.harnack_s = sec.getfloat("harnack_s")
            if "harnack_t" in sec:
                cfg.harnack_t = sec.getfloat("harnack_t")
            if "scaling_taus" in sec:
                cfg.scaling_taus = _floats(sec["scaling_taus"])
            if "poincare" in sec:
                cfg.poincare = sec.getboolean("poincare")
            cfg.poincare_gamma0 = sec.getfloat("poincare_gamma0", cfg.poincare_gamma0)
            cfg.poincare_C_p = sec.getfloat("poincare_c_p", cfg.poincare_C_p)
            cfg.doubling_factor = sec.getfloat("doubling_factor", cfg.doubling_factor)
        if parser.has_section("solver"):
            sec = parser["solver"]
            s = SolverConfig()
            s.a = sec.getfloat("a", s.a)
            s.b = sec.getfloat("b", s.b)
            s.h = sec.getfloat("h", s.h)
            s.equation = sec.get("equation", s.equation)
            if "drift" in sec:
                d = _floats(sec["drift"])
                if len(d) != 2:
                    raise ConfigError("solver.drift needs two components")
                s.drift = d
            s.p = sec.getfloat("p", s.p)
            s.epsilon = sec.getfloat("epsilon", s.epsilon)
            s.boundary = sec.get("boundary", s.boundary)
            s.tol = sec.getfloat("tol", s.tol)
            s.max_iter = sec.getint("max_iter", s.max_iter)
            s.damping = sec.getfloat("damping", s.damping)
            s.chain = sec.get("chain", s.chain)
            if s.chain not in ("none", "sweep", "verify"):
                raise ConfigError(f"solver.chain must be none, sweep or verify (got {s.chain!r})")
            cfg.solver = s
        if parser.has_section("output"):
            sec = parser["output"]
            cfg.csv_name = sec.get("csv", cfg.csv_name)
            cfg.report_name = sec.get("report", cfg.report_name)
            cfg.grid_name = sec.get("grid", cfg.grid_name)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value: {exc}") from None
    return cfg.validate()
