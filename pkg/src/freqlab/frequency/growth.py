"""Constants and growth bounds for the frequency of drift equations ``Δu = b·∇u``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegeneratePointError, ParameterError, PreconditionError
from ..report import VerificationReport, failed
from .profile import RadialProfile


@dataclass(frozen=True)
class DriftConstants:
    M: float
    C_p: float
    n: int
    safety: float
    r2: float
    alpha: float
    beta: float


def drift_constants(
    M: float, C_p: float, n: int, safety: float = 0.9, r_max: float | None = None
) -> DriftConstants:
    """Radius bound and exponents for the frequency inequality of a drift equation.

    ``r2 = safety / (2 sqrt(C_p) M)`` keeps ``sqrt(C_p) M r < 1/2``.  The two
    case-wise bounds on ``F'`` are merged into one that holds in either case:
    ``alpha = max(n - 2 + 6 M r2, n - 1)`` and ``beta = 2 (M r2)² / (n - 1)``.
    ``r_max`` (e.g. the radius of the domain) caps ``r2``; with the cap the
    harmonic constants ``alpha = n - 1``, ``beta = 0`` are recovered as ``M -> 0``.
    """
    if not M > 0 or not C_p > 0:
        raise ParameterError("M and C_p must be positive")
    if not 0 < safety < 1:
        raise ParameterError("safety factor must lie in (0, 1)")
    if n not in (2, 3):
        raise ParameterError("dimension must be 2 or 3")
    if r_max is not None and not r_max > 0:
        raise ParameterError("r_max must be positive")
    r2 = safety / (2 * math.sqrt(C_p) * M)
    if r_max is not None:
        r2 = min(r2, float(r_max))
    alpha = max(n - 2 + 6 * M * r2, n - 1)
    beta = 2 * (M * r2) ** 2 / (n - 1)
    return DriftConstants(float(M), float(C_p), n, float(safety), r2, alpha, beta)


def integrated_bound(F_rho: float, r: float, rho: float, alpha: float, beta: float) -> float:
    """Right side of ``F(r) <= (rho/r)^alpha F(rho) + beta ((rho/r)^alpha - 1)``."""
    q = (rho / r) ** alpha
    return q * F_rho + beta * (q - 1)


def check_growth_bound(
    profile: RadialProfile, constants: DriftConstants, tol: float = 1e-6, rtol: float = 1e-9
) -> list[VerificationReport]:
    """Energy-flux bound and integrated frequency inequality below ``r2``.

    Per radius: ``H >= 0`` and ``D <= 2H`` (tolerance ``rtol`` relative).
    Over all sampled pairs ``r < rho``: the integrated inequality for the
    drift frequency (absolute ``tol``, worst pair reported), plus the sup
    bound over the whole window.  The metadata records which of the two
    cases ``I Dsurf <= 4 H²`` / ``> 4 H²`` held at each radius.
    """
    r = profile.radii
    if r[-1] > constants.r2 * (1 + 1e-12):
        raise PreconditionError(f"profile radius {r[-1]:g} exceeds the small-radius bound r2={constants.r2:g}")
    if constants.n != profile.n:
        raise ParameterError("constants and profile dimensions differ")
    I = profile.column("I")
    if np.any(~(I > 0)):
        raise DegeneratePointError("I vanishes on the profile")
    D = profile.column("D")
    H = profile.column("H")
    Ds = profile.column("Dsurf")

    reports = []
    for i in range(len(r)):
        scale = abs(D[i]) + abs(H[i])
        reports.append(VerificationReport("flux_nonnegative", -H[i], 0.0, rtol * scale, {"r": r[i]}))
        reports.append(VerificationReport("energy_flux", D[i], 2 * H[i], rtol * scale, {"r": r[i]}))

    F = profile.frequencies("drift")
    if np.any(np.isnan(F)):
        reports.append(failed("growth_pairs", "drift frequency undefined"))
        return reports
    a, b = constants.alpha, constants.beta
    worst = None
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            m = integrated_bound(F[j], r[i], r[j], a, b) - F[i]
            if worst is None or m < worst[0]:
                worst = (m, i, j)
    case_a = int(np.sum(I * Ds <= 4 * H**2))
    meta = {"alpha": a, "beta": b, "r2": constants.r2, "cases_A": case_a, "cases_B": len(r) - case_a}
    if worst is not None:
        _, i, j = worst
        reports.append(
            VerificationReport(
                "growth_pairs", F[i], integrated_bound(F[j], r[i], r[j], a, b), tol, {"r": r[i], "rho": r[j], **meta}
            )
        )
    sup_bound = integrated_bound(F[-1], r[0], r[-1], a, b)
    reports.append(VerificationReport("growth_sup", float(F.max()), sup_bound, tol, {"r": r[0], "rho": r[-1], **meta}))
    return reports
