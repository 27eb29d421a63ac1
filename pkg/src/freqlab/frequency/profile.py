"""Radial moments of a field about a centre and the frequency functions built on them."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import FrequencyUndefined, FreqlabError, ParameterError
from ..fields import ScalarField, as_point
from ..quadrature import BallRule, ball_nodes, build_ball_rule, sphere_area, sphere_nodes
from ..report import PROFILE_COLUMNS, fmt

KINDS = ("classical", "drift", "p", "p_tilde")
DEFAULT_FLOOR = 1e-14


@dataclass(frozen=True)
class RadialSample:
    """Sphere and ball integrals of one field at one radius.

    ``I = ∫_{∂B} u²``, ``D = ∫_B |∇u|²``, ``H = ∫_{∂B} u u_ν``,
    ``Dsurf = ∫_{∂B} |∇u|²``, ``Nsurf = ∫_{∂B} u_ν²``, ``Ip = ∫_{∂B} |u|^p``,
    ``Dp = ∫_B |∇u|^p``.  ``lap_mass = ∫_B u Δu`` and
    ``rn_volume = ∫_B (2 (x·∇u) Δu + (n-2) u Δu)`` feed the Gauss-Green and
    Rellich-Necas checks.  Failed samples carry NaNs and an ``error`` message.
    """

    r: float
    n: int
    I: float
    D: float
    H: float
    Dsurf: float
    Nsurf: float
    lap_mass: float
    rn_volume: float
    p: float | None = None
    Ip: float = float("nan")
    Dp: float = float("nan")
    error: str | None = None

    @property
    def rn_residual(self) -> float:
        """|Rellich-Necas balance| on this sphere, where ``x·ν = r`` and ``x·∇u = r u_ν``."""
        r, n = self.r, self.n
        return abs(self.rn_volume + r * self.Dsurf - 2 * r * self.Nsurf - (n - 2) * self.H)

    @property
    def area(self) -> float:
        return sphere_area(self.n) * self.r ** (self.n - 1)

    @classmethod
    def failure(cls, r, n, p, message):
        nan = float("nan")
        return cls(r, n, nan, nan, nan, nan, nan, nan, nan, p, nan, nan, message)


def radial_moments(
    field: ScalarField,
    center,
    r: float,
    p: float | None = None,
    rule: BallRule | None = None,
    r_inner: float = 0.0,
) -> RadialSample:
    """All sphere/ball moments of ``field`` on ``B_r(center)`` with one field sweep each."""
    c = as_point(center, field.n)
    n = field.n
    if rule is None:
        rule = _cached_rule(n)
    if rule.n != n:
        raise ParameterError("quadrature rule dimension does not match the field")
    if p is not None and not p > 1:
        raise ParameterError(f"p must exceed 1, got {p}")

    sp, nu, sw = sphere_nodes(c, r, rule.sphere)
    u, g, lap_s = field.evaluate(sp)
    un = np.einsum("ij,ij->i", g, nu)
    g2 = np.einsum("ij,ij->i", g, g)
    I = float(sw @ u**2)
    H = float(sw @ (u * un))
    Dsurf = float(sw @ g2)
    Nsurf = float(sw @ un**2)

    bp, bw, rel = ball_nodes(c, r, rule, r_inner)
    ub, gb, lapb = field.evaluate(bp)
    gb2 = np.einsum("ij,ij->i", gb, gb)
    D = float(bw @ gb2)
    lap_mass = float(bw @ (ub * lapb))
    xg = np.einsum("ij,ij->i", rel, gb)
    rn_volume = float(bw @ ((2 * xg + (n - 2) * ub) * lapb))

    Ip = Dp = float("nan")
    if p is not None:
        Ip = float(sw @ np.abs(u) ** p)
        Dp = float(bw @ gb2 ** (p / 2))
    return RadialSample(float(r), n, I, D, H, Dsurf, Nsurf, lap_mass, rn_volume, p, Ip, Dp)


_RULES: dict[int, BallRule] = {}


def _cached_rule(n: int) -> BallRule:
    if n not in _RULES:
        _RULES[n] = build_ball_rule(n)
    return _RULES[n]


def frequency_value(sample: RadialSample, kind: str = "classical", floor: float = DEFAULT_FLOOR) -> float:
    """Evaluate one frequency function on a sample.

    ``classical = r D / I``, ``drift = r H / I``, ``p = r^(p-1) Dp / Ip``,
    ``p_tilde = r Dp / Ip``.  The drift kind may be negative.  When the
    denominator is at most ``floor`` times the sample's own scale
    (``I + r D`` or ``Ip + r^(p-1) Dp``) :class:`FrequencyUndefined` is raised.
    """
    r = sample.r
    if kind in ("classical", "drift"):
        den = sample.I
        scale = sample.I + r * sample.D
        num = r * (sample.D if kind == "classical" else sample.H)
    elif kind in ("p", "p_tilde"):
        if sample.p is None:
            raise ParameterError(f"kind {kind!r} needs a sample computed with p")
        p = sample.p
        den = sample.Ip
        scale = sample.Ip + r ** (p - 1) * sample.Dp
        num = (r ** (p - 1) if kind == "p" else r) * sample.Dp
    else:
        raise ParameterError(f"unknown frequency kind {kind!r}; expected one of {KINDS}")
    if not (den > floor * scale) or math.isnan(num):
        raise FrequencyUndefined(r, den, floor * scale)
    return num / den


@dataclass(frozen=True)
class RadialProfile:
    center: np.ndarray
    n: int
    p: float | None
    samples: tuple[RadialSample, ...]

    def __post_init__(self):
        r = self.radii
        if np.any(np.diff(r) <= 0):
            raise ParameterError("profile radii must be strictly increasing")

    @property
    def radii(self) -> np.ndarray:
        return np.array([s.r for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples], dtype=float)

    def frequencies(self, kind: str = "classical", floor: float = DEFAULT_FLOOR) -> np.ndarray:
        """Frequency at every radius, NaN where undefined."""
        out = np.empty(len(self.samples))
        for i, s in enumerate(self.samples):
            try:
                out[i] = frequency_value(s, kind, floor)
            except FrequencyUndefined:
                out[i] = np.nan
        return out

    def window(self, lo: float, hi: float) -> "RadialProfile":
        """Sub-profile with ``lo <= r <= hi`` (relative slack 1e-12)."""
        keep = tuple(s for s in self.samples if lo * (1 - 1e-12) <= s.r <= hi * (1 + 1e-12))
        return RadialProfile(self.center, self.n, self.p, keep)

    def to_csv(self) -> str:
        lines = [",".join(PROFILE_COLUMNS)]
        kinds = {"F": "classical", "F_drift": "drift", "F_p": "p", "F_p_tilde": "p_tilde"}
        for s in self.samples:
            row = []
            for col in PROFILE_COLUMNS:
                if col in kinds:
                    try:
                        val = frequency_value(s, kinds[col])
                    except (FrequencyUndefined, ParameterError):
                        val = float("nan")
                elif col == "rn_residual":
                    val = s.rn_residual
                else:
                    val = getattr(s, col)
                row.append(fmt(val))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def radius_grid(start: float, stop: float, count: int, spacing: str = "geometric") -> np.ndarray:
    if not 0 < start < stop:
        raise ParameterError(f"radius range needs 0 < start < stop, got {start}, {stop}")
    if count < 3:
        raise ParameterError("radius grid needs at least 3 radii")
    if spacing == "geometric":
        return np.geomspace(start, stop, count)
    if spacing == "linear":
        return np.linspace(start, stop, count)
    raise ParameterError(f"unknown radius spacing {spacing!r}")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FREQLAB_THREADS", "1")))
    except ValueError:
        return 1


def sweep_profile(
    field: ScalarField,
    center,
    radii: Sequence[float],
    p: float | None = None,
    rule: BallRule | None = None,
    workers: int | None = None,
    r_inner: float = 0.0,
) -> RadialProfile:
    """One :class:`RadialSample` per radius; failures are recorded per sample."""
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or len(radii) == 0:
        raise ParameterError("radii must be a non-empty 1-d sequence")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ParameterError("radii must be positive and strictly increasing")
    c = as_point(center, field.n)
    if rule is None:
        rule = _cached_rule(field.n)

    def one(r):
        try:
            return radial_moments(field, c, r, p, rule, r_inner)
        except FreqlabError as exc:
            return RadialSample.failure(float(r), field.n, p, f"{type(exc).__name__}: {exc}")

    workers = default_workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = tuple(pool.map(one, radii))
    else:
        samples = tuple(one(r) for r in radii)
    return RadialProfile(c, field.n, p, samples)
