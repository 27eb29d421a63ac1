"""Fixed-order quadrature on spheres and balls in two and three dimensions.

Circles use the uniform (trapezoid) rule, which is spectrally accurate for
smooth periodic integrands.  Two-spheres use Gauss-Legendre nodes in the
polar cosine times a uniform azimuthal rule.  Balls are integrated shell by
shell with Gauss-Legendre nodes in the radius.

Angular nodes are offset by half a step, so the rule never samples the
coordinate hyperplanes; together with the antipodal symmetry of an even node
count this makes integrals of fields that vanish on a half-space exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

MIN_ORDER = 4
DEFAULT_ORDER_2D = 128
DEFAULT_ORDER_3D = 32
DEFAULT_RADIAL_NODES = 48


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return 2 * math.pi if n == 2 else 4 * math.pi


def ball_volume(n: int, r: float = 1.0) -> float:
    return sphere_area(n) * r**n / n


@dataclass(frozen=True, eq=False)
class SphereRule:
    n: int
    nodes: np.ndarray  # (m, n) unit vectors
    weights: np.ndarray  # (m,) positive, sum to the unit-sphere area
    order: int


@dataclass(frozen=True, eq=False)
class BallRule:
    sphere: SphereRule
    radial_nodes: np.ndarray  # Gauss-Legendre abscissae on [0, 1]
    radial_weights: np.ndarray

    @property
    def n(self) -> int:
        return self.sphere.n


def build_rule(n: int, order: int) -> SphereRule:
    """Angular rule: ``order`` circle nodes (n=2) or ``order x 2*order`` (n=3)."""
    if n not in (2, 3):
        raise ParameterError(f"dimension must be 2 or 3, got {n}")
    if int(order) != order or order < MIN_ORDER:
        raise ParameterError(f"quadrature order must be an integer >= {MIN_ORDER}, got {order}")
    order = int(order)
    if n == 2:
        theta = 2 * np.pi * (np.arange(order) + 0.5) / order
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(order, 2 * np.pi / order)
    else:
        ct, wt = np.polynomial.legendre.leggauss(order)
        naz = 2 * order
        phi = 2 * np.pi * (np.arange(naz) + 0.5) / naz
        C, P = np.meshgrid(ct, phi, indexing="ij")
        S = np.sqrt(1 - C**2)
        nodes = np.stack([S * np.cos(P), S * np.sin(P), C], axis=-1).reshape(-1, 3)
        weights = np.repeat(wt * (2 * np.pi / naz), naz)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereRule(n, nodes, weights, order)


def build_ball_rule(n: int, order: int | None = None, radial_nodes: int = DEFAULT_RADIAL_NODES) -> BallRule:
    if order is None:
        order = DEFAULT_ORDER_2D if n == 2 else DEFAULT_ORDER_3D
    if radial_nodes < 1:
        raise ParameterError("radial_nodes must be positive")
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    return BallRule(build_rule(n, order), (x + 1) / 2, w / 2)


def default_rule(n: int) -> BallRule:
    return build_ball_rule(n)


def sphere_nodes(center, r: float, rule: SphereRule):
    """Points on ``∂B_r(center)``, their outward normals and surface weights."""
    if not r > 0:
        raise ParameterError(f"radius must be positive, got {r}")
    c = np.asarray(center, dtype=float)
    return c + r * rule.nodes, rule.nodes, rule.weights * r ** (rule.n - 1)


def ball_nodes(center, r: float, rule: BallRule, r_inner: float = 0.0):
    """Points of the shell rule on ``B_r(center) \\ B_{r_inner}(center)``.

    Returns ``(points, weights, rel)`` with ``rel = points - center``.
    """
    if not r > 0:
        raise ParameterError(f"radius must be positive, got {r}")
    if not 0 <= r_inner < r:
        raise ParameterError(f"inner radius must lie in [0, r), got {r_inner}")
    c = np.asarray(center, dtype=float)
    n = rule.n
    s = r_inner + (r - r_inner) * rule.radial_nodes
    ws = (r - r_inner) * rule.radial_weights * s ** (n - 1)
    rel = (s[:, None, None] * rule.sphere.nodes[None, :, :]).reshape(-1, n)
    w = (ws[:, None] * rule.sphere.weights[None, :]).reshape(-1)
    return c + rel, w, rel


def boundary_integral(f, center, r: float, rule: SphereRule) -> float:
    """``∫_{∂B_r(center)} f dS`` for a vectorised point function ``f``."""
    pts, _, w = sphere_nodes(center, r, rule)
    return float(np.dot(w, f(pts)))


def volume_integral(f, center, r: float, rule: BallRule, r_inner: float = 0.0) -> float:
    """``∫_{B_r(center)} f dx`` (an annulus when ``r_inner > 0``)."""
    pts, w, _ = ball_nodes(center, r, rule, r_inner)
    return float(np.dot(w, f(pts)))
