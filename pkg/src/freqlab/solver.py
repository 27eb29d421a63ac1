"""Finite-difference Dirichlet solvers on a square.

* Laplace: 5-point stencil, conjugate gradients.
* Drift ``Δu = b·∇u`` (constant ``b``): 5-point Laplacian plus centred first
  differences, BiCGSTAB.
* p-Laplace: damped Newton on the regularised energy
  ``∫ (|∇u|² + ε²)^(p/2) / p`` discretised with piecewise-linear elements on
  the grid's triangulation (each cell cut along its rising diagonal).  For
  ``p = 2`` the discrete system is exactly the 5-point Laplacian, and affine
  data are reproduced exactly for every ``p``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonconvergenceError, ParameterError
from .fields import GridField, ScalarField

log = logging.getLogger(__name__)

EQUATIONS = ("laplace", "drift", "plaplace")


@dataclass(frozen=True)
class BVP:
    """Dirichlet problem on ``[a, b]²`` with grid spacing ``h``.

    ``boundary`` is a :class:`ScalarField` or a vectorised callable mapping an
    ``(m, 2)`` array to boundary values.
    """

    a: float
    b: float
    h: float
    boundary: ScalarField | Callable
    equation: str = "laplace"
    drift: tuple[float, float] = (0.0, 0.0)
    p: float = 2.0
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ParameterError(f"unknown equation {self.equation!r}")
        if not self.h > 0 or not self.b > self.a:
            raise ParameterError("need h > 0 and b > a")
        cells = (self.b - self.a) / self.h
        if abs(cells - round(cells)) > 1e-9 * max(1.0, cells):
            raise ParameterError(f"h={self.h:g} does not divide [{self.a:g}, {self.b:g}]")
        if round(cells) - 1 < 3:
            raise ParameterError("grid needs at least 3x3 interior points")
        if self.equation == "drift":
            peclet = float(np.linalg.norm(self.drift)) * self.h / 2
            if not peclet < 1:
                raise ParameterError(f"mesh Peclet number |b| h / 2 = {peclet:.3g} must be < 1")
        if self.equation == "plaplace":
            if not self.p > 1:
                raise ParameterError("p-Laplace needs p > 1")
            if not self.epsilon >= 0:
                raise ParameterError("epsilon must be non-negative")

    @property
    def nodes(self) -> int:
        return int(round((self.b - self.a) / self.h)) + 1

    def with_h(self, h: float) -> "BVP":
        return replace(self, h=h)


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    max_iter: int = 20000
    damping: float = 1.0  # initial Newton step length
    min_step: float = 2.0**-20
    method: str | None = None  # "cg" or "bicgstab"; default by equation


@dataclass(frozen=True, eq=False)
class GridSolution:
    """Nodal values ``values[i, j]`` at ``(x0 + j h, y0 + i h)``."""

    values: np.ndarray
    h: float
    x0: float
    y0: float
    residual: float
    iterations: int
    equation: str = "laplace"
    drift: tuple[float, float] | None = None
    p: float | None = None
    energy_history: tuple[float, ...] = dc_field(default=())

    @property
    def coords(self):
        ny, nx = self.values.shape
        return self.x0 + self.h * np.arange(nx), self.y0 + self.h * np.arange(ny)


def _grid(bvp: BVP):
    N = bvp.nodes
    x = bvp.a + bvp.h * np.arange(N)
    X, Y = np.meshgrid(x, x)  # X varies along columns, Y along rows
    boundary = np.ones((N, N), dtype=bool)
    boundary[1:-1, 1:-1] = False
    return N, X, Y, boundary


def _boundary_values(bvp: BVP, X, Y, mask):
    pts = np.stack([X[mask], Y[mask]], axis=1)
    g = bvp.boundary
    vals = g.value(pts) if isinstance(g, ScalarField) else np.asarray(g(pts), dtype=float)
    return vals


def _operator(N: int, h: float, drift=(0.0, 0.0)) -> sp.csr_matrix:
    """``-h² (Δ_h - b·∇_h)`` on the full ``N x N`` node set (rows valid at interior nodes)."""
    bx, by = drift
    ones = np.ones(N)

    def tri(bc):
        lower = -(1 + bc * h / 2) * ones[:-1]  # neighbour at index - 1
        upper = -(1 - bc * h / 2) * ones[:-1]  # neighbour at index + 1
        return sp.diags([lower, 2 * ones, upper], [-1, 0, 1])

    eye = sp.identity(N)
    return (sp.kron(eye, tri(bx)) + sp.kron(tri(by), eye)).tocsr()


def _linear_solve(A, rhs, method, options: SolveOptions):
    count = [0]

    def cb(_):
        count[0] += 1

    norm = np.linalg.norm(rhs)
    if norm == 0.0:
        return np.zeros_like(rhs), 0.0, 0
    solver = spla.cg if method == "cg" else spla.bicgstab
    x, info = solver(A, rhs, rtol=options.tol, atol=0.0, maxiter=options.max_iter, callback=cb)
    res = float(np.linalg.norm(rhs - A @ x) / norm)
    if info != 0 or not res <= options.tol * (1 + 1e-6):
        raise NonconvergenceError(f"{method} did not reach rtol={options.tol:g}", res, count[0])
    return x, res, count[0]


def _solve_linear(bvp: BVP, options: SolveOptions, drift=(0.0, 0.0), method="cg"):
    N, X, Y, bmask = _grid(bvp)
    U = np.zeros((N, N))
    U[bmask] = _boundary_values(bvp, X, Y, bmask)
    A = _operator(N, bvp.h, drift)
    inner = ~bmask.ravel()
    A_ii = A[inner][:, inner]
    rhs = -(A[inner][:, ~inner] @ U.ravel()[~inner])
    x, res, its = _linear_solve(A_ii.tocsr(), rhs, method, options)
    U.ravel()[inner] = x
    return U, res, its


class _PLaplaceEnergy:
    """Discrete regularised p-energy on the triangulated grid."""

    def __init__(self, N: int, h: float, p: float, eps: float):
        self.p = p
        self.eps2 = eps * eps
        self.area = h * h / 2
        idx = np.arange(N * N).reshape(N, N)
        bl, br = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
        tl, tr = idx[1:, :-1].ravel(), idx[1:, 1:].ravel()
        m = bl.size
        rows = np.arange(2 * m)
        # lower-right triangle (bl, br, tr): ux = br - bl, uy = tr - br
        # upper-left triangle (bl, tl, tr):  ux = tr - tl, uy = tl - bl
        gx = sp.csr_matrix(
            (np.concatenate([-np.ones(m), np.ones(m), -np.ones(m), np.ones(m)]) / h,
             (np.concatenate([rows[:m], rows[:m], rows[m:], rows[m:]]), np.concatenate([bl, br, tl, tr]))),
            shape=(2 * m, N * N),
        )
        gy = sp.csr_matrix(
            (np.concatenate([-np.ones(m), np.ones(m), -np.ones(m), np.ones(m)]) / h,
             (np.concatenate([rows[:m], rows[:m], rows[m:], rows[m:]]), np.concatenate([br, tr, bl, tl]))),
            shape=(2 * m, N * N),
        )
        self.gx, self.gy = gx, gy

    def _s(self, u):
        ux, uy = self.gx @ u, self.gy @ u
        return ux, uy, ux * ux + uy * uy + self.eps2

    def energy(self, u) -> float:
        _, _, s = self._s(u)
        return float(self.area * np.sum(s ** (self.p / 2)) / self.p)

    def gradient(self, u):
        ux, uy, s = self._s(u)
        c = self.area * s ** ((self.p - 2) / 2)
        return self.gx.T @ (c * ux) + self.gy.T @ (c * uy)

    def hessian(self, u):
        ux, uy, s = self._s(u)
        p = self.p
        a = self.area * s ** ((p - 2) / 2)
        d = self.area * (p - 2) * s ** ((p - 4) / 2)
        bxx = sp.diags(a + d * ux * ux)
        byy = sp.diags(a + d * uy * uy)
        bxy = sp.diags(d * ux * uy)
        gx, gy = self.gx, self.gy
        return (gx.T @ bxx @ gx + gx.T @ bxy @ gy + gy.T @ bxy @ gx + gy.T @ byy @ gy).tocsr()


def _solve_plaplace(bvp: BVP, options: SolveOptions):
    N, X, Y, bmask = _grid(bvp)
    inner = ~bmask.ravel()
    # the Laplace solution with the same data is the starting iterate
    start_opts = replace(options, tol=min(options.tol, 1e-10))
    U0, _, _ = _solve_linear(bvp, start_opts, method="cg")
    u = U0.ravel().copy()
    E = _PLaplaceEnergy(N, bvp.h, bvp.p, bvp.epsilon)
    energy = E.energy(u)
    history = [energy]
    h2 = bvp.h**2
    its = 0
    while True:
        g = E.gradient(u)[inner]
        opt = float(np.max(np.abs(g))) / h2 if g.size else 0.0
        if opt <= options.tol:
            break
        if its >= options.max_iter:
            raise NonconvergenceError("Newton iteration limit reached", opt, its)
        Hs = E.hessian(u)[inner][:, inner].tocsc()
        delta = spla.spsolve(Hs, -g)
        step = options.damping
        # below this predicted decrease the energy test is dominated by round-off
        flat = abs(float(g @ delta)) <= 64 * np.finfo(float).eps * abs(energy)
        gnorm = float(np.linalg.norm(g))
        while True:
            trial = u.copy()
            trial[inner] += step * delta
            e_new = E.energy(trial)
            if e_new <= energy:
                break
            if flat and np.linalg.norm(E.gradient(trial)[inner]) < gnorm:
                break
            step /= 2
            if step < options.min_step:
                raise NonconvergenceError("line search below minimum step", opt, its)
        u = trial
        energy = e_new
        history.append(energy)
        its += 1
    return u.reshape(N, N), opt, its, tuple(history)


def solve(bvp: BVP, options: SolveOptions | None = None) -> GridSolution:
    """Solve ``bvp``; raises :class:`NonconvergenceError` when ``tol`` is not met."""
    options = options or SolveOptions()
    if bvp.equation == "laplace":
        U, res, its = _solve_linear(bvp, options, method=options.method or "cg")
        return GridSolution(U, bvp.h, bvp.a, bvp.a, res, its, "laplace")
    if bvp.equation == "drift":
        U, res, its = _solve_linear(bvp, options, tuple(bvp.drift), method=options.method or "bicgstab")
        return GridSolution(U, bvp.h, bvp.a, bvp.a, res, its, "drift", drift=tuple(map(float, bvp.drift)))
    U, res, its, hist = _solve_plaplace(bvp, options)
    log.debug("p-Laplace Newton finished in %d steps, optimality %.3e", its, res)
    return GridSolution(U, bvp.h, bvp.a, bvp.a, res, its, "plaplace", p=bvp.p, energy_history=hist)


def to_field(sol: GridSolution) -> GridField:
    """Wrap a solution as a grid-backed field (admissible on the box inset by one cell)."""
    if sol.equation != "imported" and not math.isfinite(sol.residual):
        raise ParameterError("solution did not converge")
    return GridField(
        sol.values,
        sol.h,
        sol.x0,
        sol.y0,
        name=f"grid:{sol.equation}:h={sol.h:g}",
        equation=sol.equation,
        drift_b=sol.drift,
        p=sol.p,
    )


@dataclass(frozen=True)
class ConvergenceResult:
    hs: tuple[float, ...]
    errors: tuple[float, ...]
    orders: tuple[float, ...]


def convergence_study(bvp: BVP, exact: ScalarField, levels: int = 3, options: SolveOptions | None = None) -> ConvergenceResult:
    """Max nodal error at ``h, h/2, h/4, ...`` and the observed orders ``log2(e_k / e_{k+1})``."""
    hs, errs = [], []
    for k in range(levels):
        b = bvp.with_h(bvp.h / 2**k)
        sol = solve(b, options)
        xs, ys = sol.coords
        X, Y = np.meshgrid(xs, ys)
        pts = np.stack([X[1:-1, 1:-1].ravel(), Y[1:-1, 1:-1].ravel()], axis=1)
        err = float(np.max(np.abs(sol.values[1:-1, 1:-1].ravel() - exact.value(pts))))
        hs.append(b.h)
        errs.append(err)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = tuple(float(np.log2(errs[i] / errs[i + 1])) for i in range(levels - 1))
    return ConvergenceResult(tuple(hs), tuple(errs), orders)


def write_grid(sol: GridSolution, path) -> Path:
    """Plain-text grid: header ``n rows cols h x0 y0`` then one row of values per line."""
    path = Path(path)
    rows, cols = sol.values.shape
    lines = [f"2 {rows} {cols} {sol.h:.17g} {sol.x0:.17g} {sol.y0:.17g}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in sol.values]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_grid(path) -> GridSolution:
    text = Path(path).read_text(encoding="utf-8").split("\n")
    head = text[0].split()
    if len(head) != 6 or head[0] != "2":
        raise ParameterError(f"{path}: bad grid header {text[0]!r}")
    rows, cols = int(head[1]), int(head[2])
    h, x0, y0 = map(float, head[3:])
    body = [ln for ln in text[1:] if ln.strip()]
    if len(body) != rows:
        raise ParameterError(f"{path}: expected {rows} rows, found {len(body)}")
    values = np.array([[float(v) for v in ln.split()] for ln in body])
    if values.shape != (rows, cols):
        raise ParameterError(f"{path}: expected {cols} columns")
    return GridSolution(values, h, x0, y0, float("nan"), 0, "imported")
