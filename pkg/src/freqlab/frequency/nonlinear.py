"""Scaling laws and the weak doubling property of the p-frequencies."""

from __future__ import annotations

import numpy as np

from ..errors import DegeneratePointError, FrequencyUndefined, ParameterError
from ..fields import DilatedField, ScalarField, as_point
from ..quadrature import BallRule
from ..report import VerificationReport, failed
from .profile import KINDS, RadialProfile, frequency_value, radial_moments


def check_weak_doubling(profile: RadialProfile, factor: float = 4.0):
    """Largest sampled ``r*`` with ``max Ip <= factor * min Ip`` on ``[r_b, r*]``.

    ``r_b`` is the first sampled radius.  Returns ``(r_star, reports)``:
    ``weak_doubling`` passes iff ``r*`` lies beyond ``r_b``;
    ``weak_doubling_anchor`` checks ``Ip(r*) <= factor * Ip(r)`` for ``r <= r*``.
    """
    if profile.p is None:
        raise ParameterError("weak doubling needs a profile computed with p")
    Ip = profile.column("Ip")
    r = profile.radii
    if not np.any(Ip > 0):
        raise DegeneratePointError("Ip vanishes on the whole profile")
    if np.any(~(Ip > 0)):
        raise DegeneratePointError("Ip vanishes inside the profile")
    run_max = np.maximum.accumulate(Ip)
    run_min = np.minimum.accumulate(Ip)
    ok = run_max <= factor * run_min
    # the prefix condition is monotone, so the first failure ends the window
    j = int(np.argmin(ok)) - 1 if not ok.all() else len(r) - 1
    r_star = float(r[j])
    meta = {"r": r_star, "r_b": float(r[0]), "factor": factor, "ratio": float(run_max[j] / run_min[j])}
    if j > 0:
        reports = [VerificationReport("weak_doubling", float(run_max[j]), float(factor * run_min[j]), 0.0, meta)]
    else:
        reports = [failed("weak_doubling", "no sample beyond r_b satisfies the bound", **meta)]
    anchor = Ip[j]
    reports.append(
        VerificationReport("weak_doubling_anchor", float(anchor), float(factor * Ip[: j + 1].min()), 0.0, meta)
    )
    return r_star, reports


def check_scaling(
    field: ScalarField,
    center,
    tau: float,
    radii,
    kind: str = "classical",
    p: float | None = None,
    rtol: float = 1e-9,
    rule: BallRule | None = None,
) -> list[VerificationReport]:
    """Compare the frequency of ``v(x) = u(tau x)`` with that of ``u``.

    For ``B_r(c)`` the dilated ball is ``B_{tau r}(tau c)``.  Kinds classical,
    drift and p satisfy ``F^v(r) = F^u(tau r)``; p_tilde picks up the factor
    ``tau^(p-2)``.
    """
    if kind not in KINDS:
        raise ParameterError(f"unknown kind {kind!r}")
    if kind in ("p", "p_tilde") and p is None:
        raise ParameterError(f"kind {kind!r} needs p")
    c = as_point(center, field.n)
    v = DilatedField(field, tau)
    factor = tau ** (p - 2) if kind == "p_tilde" else 1.0
    out = []
    for r in radii:
        sv = radial_moments(v, c, r, p, rule)
        su = radial_moments(field, tau * c, tau * r, p, rule)
        try:
            fv = frequency_value(sv, kind)
            fu = factor * frequency_value(su, kind)
        except FrequencyUndefined as exc:
            raise DegeneratePointError(str(exc)) from exc
        rel = abs(fv - fu) / max(abs(fu), 1e-300)
        out.append(
            VerificationReport(
                f"scaling_{kind}", rel, 0.0, rtol, {"r": float(r), "tau": tau, "F_v": fv, "F_u_scaled": fu}
            )
        )
    return out
