"""Identity and inequality checks for the classical and drift frequency.

Every check returns :class:`~freqlab.report.VerificationReport` objects with an
explicit margin; none of them raises on a failed inequality.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import DegeneratePointError, FrequencyUndefined, ParameterError, PreconditionError
from ..fields import ScalarField, as_point
from ..quadrature import BallRule, ball_nodes, sphere_nodes
from ..report import VerificationReport, equality, failed, skip
from .profile import RadialProfile, _cached_rule, frequency_value

FD_SAFETY = 10.0


def rellich_necas_residual(field: ScalarField, center, r: float, rule: BallRule | None = None):
    """Residuals of the Rellich-Necas identity on ``B_r(center)``.

    ``general`` balances the volume term against the boundary integrand
    ``|∇u|²(x·ν) - 2(x·∇u)u_ν - (n-2)u u_ν`` evaluated literally (``x``
    relative to the centre).  ``harmonic_form`` is the sphere form
    ``|r Dsurf - 2 r Nsurf - (n-2) D|``, valid when ``Δu = 0``.
    """
    c = as_point(center, field.n)
    n = field.n
    rule = rule or _cached_rule(n)
    sp, nu, sw = sphere_nodes(c, r, rule.sphere)
    u, g, _ = field.evaluate(sp)
    x = sp - c
    un = np.einsum("ij,ij->i", g, nu)
    g2 = np.einsum("ij,ij->i", g, g)
    xnu = np.einsum("ij,ij->i", x, nu)
    xg = np.einsum("ij,ij->i", x, g)
    boundary = float(sw @ (g2 * xnu - 2 * xg * un - (n - 2) * u * un))

    bp, bw, rel = ball_nodes(c, r, rule)
    ub, gb, lapb = field.evaluate(bp)
    volume = float(bw @ ((2 * np.einsum("ij,ij->i", rel, gb) + (n - 2) * ub) * lapb))
    D = float(bw @ np.einsum("ij,ij->i", gb, gb))
    general = abs(volume + boundary)
    harmonic_form = abs(r * float(sw @ g2) - 2 * r * float(sw @ un**2) - (n - 2) * D)
    return general, harmonic_form


def _derivative(r, y):
    """Second-order finite-difference derivative and an error estimate.

    The estimate is the gap to a not-a-knot cubic-spline derivative.
    """
    fd = np.gradient(y, r, edge_order=2)
    spline = CubicSpline(r, y)(r, 1)
    return fd, np.abs(fd - spline)


def identity_checks(profile: RadialProfile, rtol: float = 1e-9, safety: float = FD_SAFETY) -> list[VerificationReport]:
    """Radial-derivative identities at every sampled radius.

    * ``I_prime``: ``I' = (n-1)/r I + 2H``.
    * ``hardt_lin``: ``d/dr (r^(2-n) D) = r^(1-n) (2 r Nsurf + (n-2)(H - D) - V)``
      with ``V`` the Rellich-Necas volume term; for harmonic fields
      ``H = D`` and ``V = 0`` so the right side is ``2 r^(2-n) Nsurf``.
    * ``log_I_prime``: ``(log I)' = (n-1)/r + 2 F/r`` with the drift frequency.

    Derivatives come from centred differences on the radius grid; the
    tolerance is ``safety`` times the estimated truncation error, floored at
    ``rtol`` times the magnitude of the right side.
    """
    if len(profile.samples) < 3:
        raise ParameterError("identity checks need at least 3 samples")
    r = profile.radii
    n = profile.n
    I = profile.column("I")
    D = profile.column("D")
    H = profile.column("H")
    N = profile.column("Nsurf")
    V = profile.column("rn_volume")
    if not np.all(np.isfinite(I)):
        return [failed("identity_checks", "profile contains failed samples")]

    reports = []
    dI, eI = _derivative(r, I)
    rhs_a = (n - 1) / r * I + 2 * H
    for i in range(len(r)):
        tol = max(safety * eI[i], rtol * abs(rhs_a[i]))
        reports.append(equality("I_prime", dI[i], rhs_a[i], tol, r=r[i]))

    scaled = r ** (2 - n) * D
    dS, eS = _derivative(r, scaled)
    rhs_b = r ** (1 - n) * (2 * r * N + (n - 2) * (H - D) - V)
    for i in range(len(r)):
        tol = max(safety * eS[i], rtol * abs(rhs_b[i]))
        reports.append(equality("hardt_lin", dS[i], rhs_b[i], tol, r=r[i]))

    if np.all(I > 0):
        F = r * H / I
        dL, eL = _derivative(r, np.log(I))
        rhs_c = (n - 1) / r + 2 * F / r
        for i in range(len(r)):
            tol = max(safety * eL[i], rtol * abs(rhs_c[i]))
            reports.append(equality("log_I_prime", dL[i], rhs_c[i], tol, r=r[i]))
    else:
        reports.append(skip("log_I_prime", "I vanishes on the profile"))
    return reports


def consistency_checks(profile: RadialProfile, rtol: float = 1e-9) -> list[VerificationReport]:
    """Per-radius Gauss-Green balance, the Cauchy-Schwarz step and ``Nsurf <= Dsurf``."""
    reports = []
    for s in profile.samples:
        if s.error:
            reports.append(failed("gauss_green", s.error, r=s.r))
            continue
        scale = abs(s.H) + abs(s.D) + abs(s.lap_mass)
        reports.append(equality("gauss_green", s.H, s.D + s.lap_mass, rtol * scale + 1e-300, r=s.r))
        reports.append(
            VerificationReport("cauchy_schwarz", s.H**2, s.I * s.Nsurf, rtol * s.I * s.Nsurf, {"r": s.r})
        )
        reports.append(VerificationReport("normal_le_full_gradient", s.Nsurf, s.Dsurf, rtol * s.Dsurf, {"r": s.r}))
    return reports


def check_monotone_F(profile: RadialProfile, tol: float = 1e-9, kind: str = "classical") -> VerificationReport:
    """``F(r_{i+1}) >= F(r_i) - tol`` for consecutive samples; reports the worst pair."""
    F = profile.frequencies(kind)
    r = profile.radii
    if len(r) < 2:
        raise ParameterError("monotonicity needs at least 2 samples")
    if np.any(np.isnan(F)):
        bad = ", ".join(f"{x:.6g}" for x in r[np.isnan(F)])
        return failed("monotone_F", f"frequency undefined at r = {bad}", kind=kind)
    drops = F[1:] - F[:-1]
    i = int(np.argmin(drops))
    return VerificationReport(
        "monotone_F", F[i], F[i + 1], tol, {"r": r[i], "r_next": r[i + 1], "kind": kind, "F_min": F.min(), "F_max": F.max()}
    )


def _index_of(r_values, target, what):
    i = int(np.argmin(np.abs(r_values - target)))
    if abs(r_values[i] - target) > 1e-9 * max(1.0, abs(target)):
        raise PreconditionError(f"{what}={target:g} is not a sampled radius")
    return i


def check_harnack(
    profile: RadialProfile, s: float, t: float, kind: str = "classical", rtol: float = 1e-9
) -> list[VerificationReport]:
    """Harnack-type bounds for ``I`` on ``[s, t]`` over the sampled radii.

    ``harnack``: ``max I <= (t/s)^(n-1+2 sup F) min I``.
    ``harnack_averaged``: the same for ``I/|∂B_r|`` with exponent ``2 F(t)``
    (``2 sup F`` for the drift kind, whose frequency need not be monotone).
    """
    r = profile.radii
    if not s < t:
        raise PreconditionError("Harnack interval needs s < t")
    if s < r[0] * (1 - 1e-12) or t > r[-1] * (1 + 1e-12):
        raise PreconditionError(f"[{s:g}, {t:g}] is outside the profile range [{r[0]:g}, {r[-1]:g}]")
    win = profile.window(s, t)
    if len(win.samples) < 2:
        raise PreconditionError("Harnack interval contains fewer than 2 samples")
    I = win.column("I")
    if np.any(~(I > 0)):
        raise DegeneratePointError("I vanishes inside the Harnack interval")
    F = win.frequencies(kind)
    if np.any(np.isnan(F)):
        raise DegeneratePointError("frequency undefined inside the Harnack interval")
    n = profile.n
    supF = float(F.max())
    ratio = t / s
    bound = ratio ** (n - 1 + 2 * supF) * I.min()
    meta = {"s": s, "t": t, "sup_F": supF, "kind": kind}
    out = [VerificationReport("harnack", float(I.max()), bound, rtol * bound, dict(meta))]

    avg = I / np.array([x.area for x in win.samples])
    F_end = float(F[-1]) if kind == "classical" else supF
    bound_avg = ratio ** (2 * F_end) * avg.min()
    meta["F_t"] = F_end
    out.append(VerificationReport("harnack_averaged", float(avg.max()), bound_avg, rtol * bound_avg, meta))
    return out


def _log_trapezoid(r, F):
    """``∫ F(t) dt/t`` by the trapezoid rule in ``log t``."""
    x = np.log(r)
    return float(np.sum(0.5 * (F[1:] + F[:-1]) * np.diff(x)))


def representation_I(
    profile: RadialProfile, r: float, R: float, rtol: float = 1e-6, kind: str = "drift", safety: float = FD_SAFETY
) -> VerificationReport:
    """Reconstruct ``I(r)`` from ``I(R)`` and the frequency on ``[r, R]``.

    ``Î(r) = R^(1-n) I(R) exp(-2 ∫_r^R F(t) dt/t) r^(n-1)``; the integral uses the
    trapezoid rule in ``log t`` over the profile samples.  The drift kind
    (``r H / I``) makes the reconstruction exact for any smooth field; it
    coincides with the classical kind for harmonic fields.  The tolerance is
    ``rtol`` or ``safety`` times the estimated trapezoid error (gap to a
    cubic-spline integral), whichever is larger.
    """
    radii = profile.radii
    if not r < R:
        raise PreconditionError("representation formula needs r < R")
    i = _index_of(radii, r, "r")
    j = _index_of(radii, R, "R")
    F = profile.frequencies(kind)[i : j + 1]
    if np.any(np.isnan(F)):
        raise DegeneratePointError("frequency undefined on [r, R]")
    n = profile.n
    I_R = profile.samples[j].I
    I_r = profile.samples[i].I
    gamma = R ** (1 - n) * I_R
    x = np.log(radii[i : j + 1])
    integral = _log_trapezoid(radii[i : j + 1], F)
    quad_err = abs(integral - float(CubicSpline(x, F).integrate(x[0], x[-1]))) if len(x) >= 4 else 0.0
    I_hat = gamma * math.exp(-2 * integral) * r ** (n - 1)
    rel = abs(I_hat - I_r) / abs(I_r)
    tol = max(rtol, safety * 2 * quad_err)
    meta = {"r": r, "R": R, "I_hat": I_hat, "I": I_r, "gamma": gamma, "kind": kind, "trapezoid_error": quad_err}
    return VerificationReport("representation_I", rel, 0.0, tol, meta)


def vanishing_order(profile: RadialProfile, R: float, tol: float = 1e-9):
    """Growth exponent at the centre from the frequency at ``R``.

    Returns ``(gamma, beta, report)`` with ``beta = 2 F(R)`` and
    ``gamma = I(R) R^(-beta-n+1)``; the report checks
    ``I(r) >= gamma r^(beta+n-1) - tol`` for every sampled ``r < R``
    (worst radius reported, ``tol`` absolute).
    """
    radii = profile.radii
    j = _index_of(radii, R, "R")
    try:
        F_R = frequency_value(profile.samples[j], "classical")
    except FrequencyUndefined as exc:
        raise DegeneratePointError(str(exc)) from exc
    n = profile.n
    beta = 2 * F_R
    I_R = profile.samples[j].I
    gamma = I_R * R ** (-beta - n + 1)
    if j == 0:
        return gamma, beta, failed("vanishing_order", "no sampled radius below R", R=R)
    r = radii[:j]
    I = profile.column("I")[:j]
    lower = gamma * r ** (beta + n - 1)
    k = int(np.argmin(I - lower))
    rep = VerificationReport("vanishing_order", float(lower[k]), float(I[k]), tol, {"r": r[k], "R": R, "beta": beta, "gamma": gamma})
    return gamma, beta, rep


def poincare_ratio(
    field: ScalarField,
    center,
    r: float,
    gamma_0: float = 0.5,
    C_p: float = 1.0,
    rule: BallRule | None = None,
    zero_atol: float = 0.0,
):
    """``∫_B u² / (r² ∫_B |∇u|²)`` for a field vanishing on a fraction of ``B_r``.

    The zero-set fraction is measured with the ball quadrature weights and must
    be at least ``gamma_0``.  Returns ``(ratio, report)``; the report checks
    ``ratio <= C_p``.
    """
    if not 0 < gamma_0 < 1:
        raise ParameterError("gamma_0 must lie in (0, 1)")
    c = as_point(center, field.n)
    rule = rule or _cached_rule(field.n)
    pts, w, _ = ball_nodes(c, r, rule)
    u, g, _ = field.evaluate(pts)
    frac = float(w[np.abs(u) <= zero_atol].sum() / w.sum())
    if frac < gamma_0 * (1 - 1e-12):
        raise PreconditionError(f"zero set covers {frac:.4f} of the ball, below gamma_0={gamma_0:g}")
    energy = float(w @ np.einsum("ij,ij->i", g, g))
    if energy == 0.0:
        raise DegeneratePointError("gradient energy vanishes on the ball")
    ratio = float(w @ u**2) / (r**2 * energy)
    rep = VerificationReport("poincare", ratio, C_p, 0.0, {"r": r, "zero_fraction": frac, "gamma_0": gamma_0})
    return ratio, rep
