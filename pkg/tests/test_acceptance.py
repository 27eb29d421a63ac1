"""Acceptance criteria 1-11, each at its stated tolerance.

Every criterion is a function returning ``(ok, detail)``.  Under pytest the
PASS/FAIL lines are printed in the terminal summary; run this file directly
(``python tests/test_acceptance.py``) to print them without pytest.
"""

import math
import sys

import numpy as np
import pytest

from freqlab.battery import grid_frequency_error
from freqlab.config import SolverConfig
from freqlab.fields import make_field
from freqlab.frequency import (
    check_growth_bound,
    check_harnack,
    check_monotone_F,
    check_scaling,
    check_weak_doubling,
    drift_constants,
    poincare_ratio,
    radial_moments,
    radius_grid,
    rellich_necas_residual,
    representation_I,
    sweep_profile,
    vanishing_order,
)
from freqlab.quadrature import build_ball_rule
from freqlab.solver import BVP, SolveOptions, convergence_study, solve, to_field

PI = math.pi
RESULTS: dict[int, str] = {}


def exp_cos(P):
    """Harmonic, and not annihilated by the 5-point stencil."""
    return np.exp(P[:, 0]) * np.cos(P[:, 1])


class _Oracle:
    value = staticmethod(exp_cos)


def criterion_1():
    worst = 0.0
    radii = radius_grid(0.1, 1.0, 20, "geometric")
    for k in (1, 2, 3):
        F = sweep_profile(make_field(f"harmonic:2d:k={k}:cos"), (0, 0), radii).frequencies("classical")
        worst = max(worst, float(np.max(np.abs(F - k))))
    return worst <= 1e-8, f"max |F - k| = {worst:.3e} (tol 1e-8)"


def criterion_2():
    fields2 = ["harmonic:2d:k=1:cos", "harmonic:2d:k=2:cos", "harmonic:2d:k=3:sin", "harmonic:2d:k=4:cos",
               "harmonic:2d:k=1:cos + 0.5*harmonic:2d:k=5:sin"]
    fields3 = ["harmonic:3d:k=2:m=0", "harmonic:3d:k=3:m=-2"]
    worst_h = 0.0
    for spec in fields2 + fields3:
        f = make_field(spec)
        c = np.full(f.n, 0.1)
        for r in (0.3, 0.7, 1.0):
            _, h = rellich_necas_residual(f, c, r)
            worst_h = max(worst_h, h / (r * radial_moments(f, c, r).Dsurf))
    f = make_field("drift-exp:b=1,0")
    worst_g = max(rellich_necas_residual(f, (0.1, 0.0), r)[0] for r in (0.1, 0.3, 0.5))
    ok = worst_h <= 1e-10 and worst_g <= 1e-8
    return ok, f"harmonic_form rel {worst_h:.3e} (tol 1e-10), drift general {worst_g:.3e} (tol 1e-8)"


def criterion_3():
    prof = sweep_profile(make_field("harmonic:2d:k=2:cos"), (0, 0), radius_grid(0.5, 1.0, 11, "geometric"))
    rep = check_harnack(prof, 0.5, 1.0, "classical")[0]
    rel = abs(rep.lhs - rep.rhs) / rep.rhs
    return rel <= 1e-9, f"max I = {rep.lhs:.15g}, bound = {rep.rhs:.15g}, rel gap {rel:.3e} (tol 1e-9)"


def criterion_4():
    worst = 0.0
    radii = radius_grid(0.25, 1.0, 16, "geometric")
    for spec in ("harmonic:2d:k=1:cos", "harmonic:2d:k=2:cos", "harmonic:2d:k=3:sin"):
        prof = sweep_profile(make_field(spec), (0, 0), radii)
        for r in radii[:-1]:
            worst = max(worst, representation_I(prof, r, 1.0, rtol=1e-6, kind="classical").lhs)
    sol = solve(BVP(-1, 1, 1 / 256, exp_cos))
    grid_radii = radius_grid(0.1, 0.9, 40, "geometric")
    gprof = sweep_profile(to_field(sol), (0, 0), grid_radii)
    grid_rel = max(representation_I(gprof, r, 0.9, rtol=1e-3).lhs for r in grid_radii[:-1])
    ok = worst <= 1e-6 and grid_rel <= 1e-3
    return ok, f"homogeneous rel {worst:.3e} (tol 1e-6), grid h=1/256 rel {grid_rel:.3e} (tol 1e-3)"


def criterion_5():
    prof = sweep_profile(make_field("harmonic:2d:k=2:cos"), (0, 0), radius_grid(0.1, 1.0, 20, "geometric"))
    gamma, beta, rep = vanishing_order(prof, 1.0, tol=1e-9)
    ok = abs(beta - 4) <= 1e-8 and abs(gamma - PI) <= 1e-8 and rep.margin >= -1e-9
    return ok, f"beta = {beta:.12g}, gamma = {gamma:.12g}, worst margin {rep.margin:.3e}"


def criterion_6():
    c = drift_constants(M=1, C_p=1, n=2, safety=0.9)
    prof = sweep_profile(make_field("drift-exp:b=1,0"), (0, 0), radius_grid(0.01, c.r2, 30, "geometric"))
    reps = check_growth_bound(prof, c, tol=1e-6)
    H = prof.column("H")
    D = prof.column("D")
    flux_ok = bool(np.all(H >= 0) and np.all(D <= 2 * H))
    pairs = next(r for r in reps if r.name == "growth_pairs")
    ok = flux_ok and pairs.margin >= -1e-6 and all(r.passed for r in reps)
    return ok, f"r2 = {c.r2:g}, H >= 0 and D <= 2H: {flux_ok}, worst pair margin {pairs.margin:.3e} (tol -1e-6)"


def criterion_7():
    rule = build_ball_rule(2)
    worst = 0.0
    u = make_field("harmonic:2d:k=1:cos + 0.4*harmonic:2d:k=3:sin + 0.2*drift-exp:b=0.5,0.3")
    radii = [0.2, 0.35, 0.5]
    for tau in (0.5, 2.0):
        for kind, p in [("classical", None), ("drift", None), ("p", 1.5), ("p", 3.0), ("p_tilde", 1.5), ("p_tilde", 3.0)]:
            for rep in check_scaling(u, (0.05, -0.1), tau, radii, kind, p=p, rtol=1e-9, rule=rule):
                worst = max(worst, rep.lhs)
    return worst <= 1e-9, f"max relative scaling error {worst:.3e} (tol 1e-9)"


def criterion_8():
    prof = sweep_profile(make_field("harmonic:2d:k=1:cos"), (0, 0), radius_grid(0.2, 0.6, 200, "geometric"), p=3)
    r_star, reps = check_weak_doubling(prof, 4.0)
    ratio = r_star / prof.radii[0]
    target = 4 ** (1 / 4)
    ok = abs(ratio - target) <= 0.02 * target and all(r.passed for r in reps)
    return ok, f"r*/r_b = {ratio:.6f}, sqrt(2) = {target:.6f} (2%)"


def criterion_9():
    lap = convergence_study(BVP(-1, 1, 1 / 16, exp_cos), _Oracle, levels=3)
    de = make_field("drift-exp:b=1,0")
    dr = convergence_study(BVP(-1, 1, 1 / 16, de, "drift", (1.0, 0.0)), de, levels=3)
    orders = lap.orders + dr.orders
    z3 = make_field("harmonic:2d:k=3:cos")
    a = solve(BVP(-1, 1, 1 / 32, z3))
    b = solve(BVP(-1, 1, 1 / 32, z3, "plaplace", p=2.0))
    p2 = float(np.max(np.abs(a.values - b.values)))
    aff = make_field("affine:a=0.7,-1.3:l0=0.2")
    aff_err = 0.0
    for p in (1.5, 3.0):
        s = solve(BVP(0.5, 1.5, 1 / 16, aff, "plaplace", p=p), SolveOptions(tol=1e-12))
        xs, ys = s.coords
        X, Y = np.meshgrid(xs, ys)
        aff_err = max(aff_err, float(np.max(np.abs(s.values - (0.7 * X - 1.3 * Y + 0.2)))))
    ok = all(abs(o - 2) <= 0.2 for o in orders) and p2 <= 1e-8 and aff_err <= 1e-12
    return ok, (f"laplace orders {', '.join(f'{o:.3f}' for o in lap.orders)}, drift orders "
                f"{', '.join(f'{o:.3f}' for o in dr.orders)}, |p=2 - laplace| {p2:.2e}, affine error {aff_err:.2e}")


def criterion_10():
    s = SolverConfig(a=-1, b=1, h=1 / 128, boundary="harmonic:2d:k=3:cos")
    sol = solve(BVP(s.a, s.b, s.h, make_field(s.boundary, 2)), SolveOptions(tol=s.tol))
    rule = build_ball_rule(2)
    radii = radius_grid(0.2, 0.95, 20, "geometric")
    prof = sweep_profile(to_field(sol), (0, 0), radii, rule=rule)
    est = grid_frequency_error(s, np.zeros(2), radii, rule, prof)
    rep = check_monotone_F(prof, tol=10 * est)
    return rep.passed, f"worst step {rep.rhs - rep.lhs:.3e}, tol = 10 x {est:.3e}"


def criterion_11():
    ratio, _ = poincare_ratio(make_field("ramp:a=1,0"), (0, 0), 1.0, gamma_0=0.5)
    return abs(ratio - 0.25) <= 1e-6, f"ratio = {ratio:.12g} (0.25 +- 1e-6)"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def _run(i):
    ok, detail = CRITERIA[i]()
    line = f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[i] = line
    print(line)
    return ok, detail


@pytest.mark.parametrize("i", sorted(CRITERIA))
def test_criterion(i):
    ok, detail = _run(i)
    assert ok, detail


if __name__ == "__main__":
    results = [_run(i)[0] for i in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
