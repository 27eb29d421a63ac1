"""Assemble fields, profiles and verification batteries from a configuration."""

from __future__ import annotations

import logging

import numpy as np

from .config import ExperimentConfig, SolverConfig
from .errors import FreqlabError, PreconditionError
from .fields import GridField, RampField, ScalarField, make_field
from .frequency import (
    check_growth_bound,
    check_harnack,
    check_monotone_F,
    check_scaling,
    check_weak_doubling,
    consistency_checks,
    drift_constants,
    identity_checks,
    poincare_ratio,
    radius_grid,
    representation_I,
    sweep_profile,
    vanishing_order,
)
from .frequency.profile import RadialProfile
from .quadrature import BallRule, build_ball_rule
from .report import VerificationReport, failed, skip
from .solver import BVP, GridSolution, SolveOptions, solve, to_field

log = logging.getLogger(__name__)


def make_bvp(s: SolverConfig, h: float | None = None) -> BVP:
    return BVP(
        s.a, s.b, s.h if h is None else h, make_field(s.boundary, 2), s.equation, tuple(s.drift), s.p, s.epsilon
    )


def run_solver(s: SolverConfig, h: float | None = None) -> GridSolution:
    return solve(make_bvp(s, h), SolveOptions(tol=s.tol, max_iter=s.max_iter, damping=s.damping))


def build_field(cfg: ExperimentConfig) -> tuple[ScalarField, GridSolution | None]:
    """The configured field; ``spec = solve`` runs the solver and wraps the result."""
    if cfg.field is None:
        raise PreconditionError("no field configured ([field] spec)")
    if cfg.field.strip() == "solve":
        if cfg.solver is None:
            raise PreconditionError("field 'solve' needs a [solver] section")
        sol = run_solver(cfg.solver)
        return to_field(sol), sol
    return make_field(cfg.field, cfg.n), None


def build_rule(cfg: ExperimentConfig, n: int) -> BallRule:
    return build_ball_rule(n, cfg.order2d if n == 2 else cfg.order3d, cfg.radial_nodes)


def center_of(cfg: ExperimentConfig, n: int) -> np.ndarray:
    c = np.zeros(n) if cfg.center is None else np.asarray(cfg.center, dtype=float)
    if c.shape != (n,):
        raise PreconditionError(f"center has {c.size} coordinates, field dimension is {n}")
    return c


def radii_of(cfg: ExperimentConfig) -> np.ndarray:
    return radius_grid(cfg.start, cfg.stop, cfg.count, cfg.spacing)


def run_sweep(field: ScalarField, cfg: ExperimentConfig, rule: BallRule | None = None, p=None) -> RadialProfile:
    rule = rule or build_rule(cfg, field.n)
    return sweep_profile(field, center_of(cfg, field.n), radii_of(cfg), p if p is not None else cfg.p, rule)


def grid_frequency_error(s: SolverConfig, center, radii, rule: BallRule, profile: RadialProfile) -> float:
    """Richardson estimate of the discretisation error in the classical frequency.

    Re-solves at ``2h`` and returns ``max |F_h - F_2h| / 3`` (second-order scheme).
    """
    coarse = to_field(run_solver(s, 2 * s.h))
    prof2 = sweep_profile(coarse, center, radii, None, rule)
    diff = np.abs(profile.frequencies("classical") - prof2.frequencies("classical"))
    return float(np.nanmax(diff) / 3)


def _samples_ok(profile: RadialProfile) -> list[VerificationReport]:
    return [failed("sample", s.error, r=s.r) for s in profile.samples if s.error]


def run_verify(field: ScalarField, cfg: ExperimentConfig, rule: BallRule | None = None, solver_cfg: SolverConfig | None = None):
    """Run the verification battery; returns ``(profile, reports)``.

    Precondition violations (radii beyond ``r2`` for drift fields, a field
    lacking the zero set needed for the Poincare ratio) raise.
    """
    grid = isinstance(field, GridField)
    tol = lambda key: cfg.tolerance(key, grid)  # noqa: E731
    rule = rule or build_rule(cfg, field.n)
    c = center_of(cfg, field.n)
    radii = radii_of(cfg)
    harmonic = field.equation == "laplace"
    drift = field.equation == "drift"

    constants = None
    if drift:
        M = cfg.drift_M if cfg.drift_M is not None else float(np.linalg.norm(field.drift_b))
        constants = drift_constants(M, cfg.C_p, field.n, cfg.safety)
        if radii[-1] > constants.r2 * (1 + 1e-12):
            raise PreconditionError(
                f"radii reach {radii[-1]:g} but the drift bound requires r <= r2 = {constants.r2:.6g}"
            )

    profile = sweep_profile(field, c, radii, cfg.p, rule)
    reports = _samples_ok(profile)
    if reports:
        return profile, reports

    reports += identity_checks(profile, tol("identity_rtol"), tol("fd_safety"))
    reports += consistency_checks(profile, tol("consistency_rtol"))
    for s in profile.samples:
        scale = max(s.r * s.Dsurf, abs(s.rn_volume), 1e-300)
        reports.append(VerificationReport("rellich_necas", s.rn_residual / scale, 0.0, tol("rellich"), {"r": s.r}))

    kind = "classical" if harmonic else "drift"
    undefined = radii[np.isnan(profile.frequencies(kind, cfg.floor))]
    if undefined.size:
        # the degenerate case I(r) = 0: frequency checks are skipped, not failed
        cause = f"{kind} frequency undefined at r = {', '.join(f'{x:.6g}' for x in undefined)}"
        names = ["monotone_F", "vanishing_order"] if harmonic else []
        names += ["harnack", "representation_I", "scaling"] + (["growth_pairs"] if drift else [])
        reports += [skip(name, cause) for name in names]
        return profile, reports

    if harmonic:
        mono_tol = tol("monotone")
        if grid and solver_cfg is not None and "monotone" not in cfg.tolerances:
            mono_tol = 10 * grid_frequency_error(solver_cfg, c, radii, rule, profile)
        reports.append(check_monotone_F(profile, mono_tol))
        try:
            reports.append(vanishing_order(profile, radii[-1], tol("vanishing"))[2])
        except FreqlabError as exc:
            reports.append(failed("vanishing_order", str(exc)))

    s_ = cfg.harnack_s if cfg.harnack_s is not None else radii[0]
    t_ = cfg.harnack_t if cfg.harnack_t is not None else radii[-1]
    try:
        reports += check_harnack(profile, s_, t_, kind, tol("harnack_rtol"))
    except FreqlabError as exc:
        reports.append(failed("harnack", str(exc)))
    try:
        reports.append(representation_I(profile, radii[0], radii[-1], tol("representation_rtol")))
    except FreqlabError as exc:
        reports.append(failed("representation_I", str(exc)))

    kinds = ["classical", "drift"] + (["p", "p_tilde"] if cfg.p is not None else [])
    for tau in cfg.scaling_taus:
        sub = [r for r in radii if tau * r <= radii[-1] * (1 + 1e-12)]
        for k in kinds:
            try:
                reports += check_scaling(field, c, tau, sub, k, cfg.p, tol("scaling_rtol"), rule)
            except FreqlabError as exc:
                reports.append(failed(f"scaling_{k}", f"tau={tau:g}: {exc}"))

    if drift:
        reports += check_growth_bound(profile, constants, tol("growth"), tol("consistency_rtol"))

    if cfg.poincare or (cfg.poincare is None and isinstance(field, RampField)):
        ratio, rep = poincare_ratio(field, c, radii[-1], cfg.poincare_gamma0, cfg.poincare_C_p, rule)
        reports.append(rep)
    return profile, reports


def run_doubling(field: ScalarField, cfg: ExperimentConfig, rule: BallRule | None = None):
    """p-kind sweep plus the weak doubling check; ``p`` defaults to 2."""
    p = cfg.p if cfg.p is not None else 2.0
    profile = run_sweep(field, cfg, rule, p)
    reports = _samples_ok(profile)
    if reports:
        return profile, reports, float("nan")
    r_star, reps = check_weak_doubling(profile, cfg.doubling_factor)
    return profile, reps, r_star
