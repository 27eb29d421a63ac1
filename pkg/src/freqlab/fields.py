"""Catalog of scalar fields with exact (or grid-interpolated) derivatives.

Every field evaluates vectorised over an ``(m, n)`` array of points and
returns the value, the gradient and the Laplacian.  Closed-form fields are
exact solutions of the Laplace, drift (``Δu = b·∇u``) or p-Laplace equation;
grid-backed fields wrap a finite-difference solution.

Fields are also addressable by catalog strings such as
``"harmonic:2d:k=3:cos"``, ``"drift-exp:b=2,0"`` or ``"p-radial:p=3"``; see
:func:`parse_field`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DegeneratePointError, DomainError, FieldSpecError

# Real solid harmonics of degree <= 4 in three variables, unnormalised.
# Key (k, m): m >= 0 is the cos(m phi) member, m < 0 the sin(|m| phi) member.
# Values map exponent triples (i, j, l) of x^i y^j z^l to integer coefficients.
SOLID_HARMONICS_3D: dict[tuple[int, int], dict[tuple[int, int, int], int]] = {
    (0, 0): {(0, 0, 0): 1},
    (1, -1): {(0, 1, 0): 1},
    (1, 0): {(0, 0, 1): 1},
    (1, 1): {(1, 0, 0): 1},
    (2, -2): {(1, 1, 0): 1},
    (2, -1): {(0, 1, 1): 1},
    (2, 0): {(0, 0, 2): 2, (0, 2, 0): -1, (2, 0, 0): -1},
    (2, 1): {(1, 0, 1): 1},
    (2, 2): {(0, 2, 0): -1, (2, 0, 0): 1},
    (3, -3): {(0, 3, 0): -1, (2, 1, 0): 3},
    (3, -2): {(1, 1, 1): 1},
    (3, -1): {(0, 1, 2): 4, (0, 3, 0): -1, (2, 1, 0): -1},
    (3, 0): {(0, 0, 3): 2, (0, 2, 1): -3, (2, 0, 1): -3},
    (3, 1): {(1, 0, 2): 4, (1, 2, 0): -1, (3, 0, 0): -1},
    (3, 2): {(0, 2, 1): -1, (2, 0, 1): 1},
    (3, 3): {(1, 2, 0): -3, (3, 0, 0): 1},
    (4, -4): {(1, 3, 0): -1, (3, 1, 0): 1},
    (4, -3): {(0, 3, 1): -1, (2, 1, 1): 3},
    (4, -2): {(1, 1, 2): 6, (1, 3, 0): -1, (3, 1, 0): -1},
    (4, -1): {(0, 1, 3): 4, (0, 3, 1): -3, (2, 1, 1): -3},
    (4, 0): {(0, 0, 4): 8, (0, 2, 2): -24, (0, 4, 0): 3, (2, 0, 2): -24, (2, 2, 0): 6, (4, 0, 0): 3},
    (4, 1): {(1, 0, 3): 4, (1, 2, 1): -3, (3, 0, 1): -3},
    (4, 2): {(0, 2, 2): -6, (0, 4, 0): 1, (2, 0, 2): 6, (4, 0, 0): -1},
    (4, 3): {(1, 2, 1): -3, (3, 0, 1): 1},
    (4, 4): {(0, 4, 0): 1, (2, 2, 0): -6, (4, 0, 0): 1},
}
MAX_DEGREE_3D = 4


def as_point(x, n: int | None = None) -> np.ndarray:
    """Return ``x`` as a float vector, checking its length against ``n``."""
    p = np.asarray(x, dtype=float).reshape(-1)
    if n is not None and p.shape[0] != n:
        raise ValueError(f"point has {p.shape[0]} coordinates, expected {n}")
    if p.shape[0] not in (2, 3):
        raise ValueError("only dimensions 2 and 3 are supported")
    return p


# ---------------------------------------------------------------------------
# Field specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarmonicPolynomial:
    degree: int
    basis: str | int = "cos"  # 2D: "cos"/"sin"; 3D: order m in [-degree, degree]


@dataclass(frozen=True)
class Affine:
    coeffs: tuple[float, ...]
    l0: float = 0.0


@dataclass(frozen=True)
class DriftExponential:
    b: tuple[float, ...]


@dataclass(frozen=True)
class PRadial:
    p: float
    r_min: float = 0.1


@dataclass(frozen=True)
class Ramp:
    """``max(a·x + l0, 0) ** power``; vanishes on a half-space."""

    coeffs: tuple[float, ...]
    l0: float = 0.0
    power: float = 1.0


@dataclass(frozen=True)
class GridBacked:
    solution: Any  # freqlab.solver.GridSolution
    order: int = 1


@dataclass(frozen=True)
class Combination:
    terms: tuple[tuple[float, Any], ...]


FieldSpec = HarmonicPolynomial | Affine | DriftExponential | PRadial | Ramp | GridBacked | Combination


# ---------------------------------------------------------------------------
# Field implementations
# ---------------------------------------------------------------------------


class ScalarField:
    """Base class: an immutable scalar field on (a subset of) R^n.

    Subclasses implement ``_evaluate`` and ``_hessian`` on validated
    ``(m, n)`` point arrays.  ``equation`` names the PDE the field solves
    exactly (``"laplace"``, ``"drift"``, ``"plaplace"`` or ``None``).
    """

    n: int
    name: str = "field"
    equation: str | None = None
    drift_b: np.ndarray | None = None
    p: float | None = None
    domain_note: str = "all of R^n"

    def admissible(self, X: np.ndarray) -> np.ndarray:
        return np.ones(X.shape[0], dtype=bool)

    def _points(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n:
            raise ValueError(f"points have dimension {X.shape[1]}, field has {self.n}")
        ok = self.admissible(X)
        if not np.all(ok):
            bad = X[~ok][0]
            raise DomainError(f"{self.name}: point {bad.tolist()} outside admissible domain ({self.domain_note})")
        return X

    def evaluate(self, X):
        """Return ``(u, grad, lap)`` with shapes ``(m,)``, ``(m, n)``, ``(m,)``."""
        return self._evaluate(self._points(X))

    def hessian(self, X) -> np.ndarray:
        return self._hessian(self._points(X))

    def value(self, X) -> np.ndarray:
        return self.evaluate(X)[0]

    def _evaluate(self, X):
        raise NotImplementedError

    def _hessian(self, X):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.n}>"


class Harmonic2D(ScalarField):
    """``Re z^k`` (cos member) or ``Im z^k`` (sin member) with ``z = x1 + i x2``."""

    equation = "laplace"

    def __init__(self, k: int, basis: str = "cos"):
        self.n = 2
        self.k = int(k)
        self.use_sin = basis == "sin"
        self.name = f"harmonic:2d:k={k}:{basis}"

    def _part(self, w):
        return w.imag if self.use_sin else w.real

    def _evaluate(self, X):
        z = X[:, 0] + 1j * X[:, 1]
        k = self.k
        u = self._part(z**k) if k > 0 else np.full(len(z), 0.0 if self.use_sin else 1.0)
        if k >= 1:
            dz = k * z ** (k - 1)
            # d/dx f = f'(z), d/dy f = i f'(z)
            grad = np.stack([self._part(dz), self._part(1j * dz)], axis=1)
        else:
            grad = np.zeros_like(X)
        return u, grad, np.zeros(len(z))

    def _hessian(self, X):
        z = X[:, 0] + 1j * X[:, 1]
        k = self.k
        H = np.zeros((len(z), 2, 2))
        if k >= 2:
            d2 = k * (k - 1) * z ** (k - 2)
            H[:, 0, 0] = self._part(d2)
            H[:, 0, 1] = H[:, 1, 0] = self._part(1j * d2)
            H[:, 1, 1] = -H[:, 0, 0]
        return H


class PolynomialField(ScalarField):
    """A polynomial given by a ``{exponent tuple: coefficient}`` table."""

    def __init__(self, terms: dict, n: int, name: str = "polynomial", equation: str | None = None):
        self.n = n
        self.name = name
        self.equation = equation
        self.exps = np.array(list(terms.keys()), dtype=int).reshape(-1, n)
        self.coefs = np.array(list(terms.values()), dtype=float)

    def _monomials(self, X, shift):
        # product over axes of x_d^(e_d - shift_d) with exponent clipped at zero
        e = self.exps - shift
        out = np.ones((X.shape[0], len(self.coefs)))
        for d in range(self.n):
            out *= X[:, d : d + 1] ** np.maximum(e[:, d], 0)
        return out

    def _deriv(self, X, order):
        shift = np.array(order)
        factor = np.ones(len(self.coefs))
        for d, o in enumerate(order):
            for j in range(o):
                factor *= self.exps[:, d] - j
        factor[np.any(self.exps < shift, axis=1)] = 0.0
        return self._monomials(X, shift) @ (self.coefs * factor)

    def _unit(self, *axes):
        o = [0] * self.n
        for a in axes:
            o[a] += 1
        return tuple(o)

    def _evaluate(self, X):
        u = self._deriv(X, (0,) * self.n)
        grad = np.stack([self._deriv(X, self._unit(d)) for d in range(self.n)], axis=1)
        lap = sum(self._deriv(X, self._unit(d, d)) for d in range(self.n))
        return u, grad, lap

    def _hessian(self, X):
        H = np.empty((X.shape[0], self.n, self.n))
        for i in range(self.n):
            for j in range(i, self.n):
                H[:, i, j] = H[:, j, i] = self._deriv(X, self._unit(i, j))
        return H


class AffineField(ScalarField):
    equation = "laplace"

    def __init__(self, coeffs, l0=0.0):
        self.a = np.asarray(coeffs, dtype=float)
        self.n = len(self.a)
        self.l0 = float(l0)
        self.name = "affine:a=" + ",".join(f"{c:g}" for c in self.a) + f":l0={self.l0:g}"

    def _evaluate(self, X):
        m = X.shape[0]
        return X @ self.a + self.l0, np.tile(self.a, (m, 1)), np.zeros(m)

    def _hessian(self, X):
        return np.zeros((X.shape[0], self.n, self.n))


class DriftExponentialField(ScalarField):
    """``u = exp(b·x)``, which solves ``Δu = b·∇u`` since both equal ``|b|² u``."""

    equation = "drift"

    def __init__(self, b):
        self.drift_b = np.asarray(b, dtype=float)
        self.n = len(self.drift_b)
        self.name = "drift-exp:b=" + ",".join(f"{c:g}" for c in self.drift_b)

    def _evaluate(self, X):
        u = np.exp(X @ self.drift_b)
        return u, u[:, None] * self.drift_b, u * (self.drift_b @ self.drift_b)

    def _hessian(self, X):
        u = np.exp(X @ self.drift_b)
        return u[:, None, None] * np.outer(self.drift_b, self.drift_b)


class PRadialField(ScalarField):
    """The fundamental p-harmonic ``|x|^((p-n)/(p-1))`` on ``{|x| >= r_min}``."""

    equation = "plaplace"

    def __init__(self, p: float, n: int, r_min: float = 0.1):
        self.p = float(p)
        self.n = n
        self.r_min = float(r_min)
        self.exponent = (self.p - n) / (self.p - 1.0)
        self.name = f"p-radial:p={self.p:g}:n={n}:rmin={self.r_min:g}"
        self.domain_note = f"|x| >= {self.r_min:g}"

    def admissible(self, X):
        return np.linalg.norm(X, axis=1) >= self.r_min * (1 - 1e-12)

    def _evaluate(self, X):
        a = self.exponent
        r = np.linalg.norm(X, axis=1)
        u = r**a
        grad = (a * r ** (a - 2))[:, None] * X
        lap = a * (self.n + a - 2) * r ** (a - 2)
        return u, grad, lap

    def _hessian(self, X):
        a = self.exponent
        r = np.linalg.norm(X, axis=1)
        H = (a * r ** (a - 2))[:, None, None] * np.eye(self.n)
        H += (a * (a - 2) * r ** (a - 4))[:, None, None] * np.einsum("mi,mj->mij", X, X)
        return H


class RampField(ScalarField):
    """``max(a·x + l0, 0) ** power``; identically zero on a half-space."""

    def __init__(self, coeffs, l0=0.0, power=1.0):
        self.a = np.asarray(coeffs, dtype=float)
        self.n = len(self.a)
        self.l0 = float(l0)
        self.power = float(power)
        self.name = "ramp:a=" + ",".join(f"{c:g}" for c in self.a) + f":l0={self.l0:g}:power={self.power:g}"

    def _evaluate(self, X):
        s = np.maximum(X @ self.a + self.l0, 0.0)
        q = self.power
        u = s**q
        ds = np.where(s > 0, q * s ** (q - 1), 0.0)
        d2 = np.where(s > 0, q * (q - 1) * s ** (q - 2), 0.0) if q != 1 else np.zeros_like(s)
        return u, ds[:, None] * self.a, d2 * (self.a @ self.a)

    def _hessian(self, X):
        s = np.maximum(X @ self.a + self.l0, 0.0)
        q = self.power
        d2 = np.where(s > 0, q * (q - 1) * s ** (q - 2), 0.0) if q != 1 else np.zeros_like(s)
        return d2[:, None, None] * np.outer(self.a, self.a)


class CombinationField(ScalarField):
    """Linear combination ``sum_i c_i u_i`` of fields of equal dimension."""

    def __init__(self, terms: Sequence[tuple[float, ScalarField]]):
        if not terms:
            raise FieldSpecError("empty linear combination")
        self.terms = [(float(c), f) for c, f in terms]
        dims = {f.n for _, f in self.terms}
        if len(dims) != 1:
            raise FieldSpecError("combined fields must share the dimension")
        self.n = dims.pop()
        self.name = " + ".join(f"{c:g}*{f.name}" for c, f in self.terms)
        eqs = {f.equation for _, f in self.terms}
        if eqs == {"laplace"}:
            self.equation = "laplace"
        elif len(self.terms) == 1:
            self.equation = self.terms[0][1].equation
            self.drift_b = self.terms[0][1].drift_b
            self.p = self.terms[0][1].p
        else:
            self.equation = None

    def admissible(self, X):
        ok = np.ones(X.shape[0], dtype=bool)
        for _, f in self.terms:
            ok &= f.admissible(X)
        return ok

    def _evaluate(self, X):
        u = np.zeros(X.shape[0])
        grad = np.zeros_like(X)
        lap = np.zeros(X.shape[0])
        for c, f in self.terms:
            fu, fg, fl = f._evaluate(X)
            u += c * fu
            grad += c * fg
            lap += c * fl
        return u, grad, lap

    def _hessian(self, X):
        return sum(c * f._hessian(X) for c, f in self.terms)


class DilatedField(ScalarField):
    """``v(x) = u(tau x)`` for ``tau > 0``."""

    def __init__(self, base: ScalarField, tau: float):
        if not tau > 0:
            raise ValueError("tau must be positive")
        self.base = base
        self.tau = float(tau)
        self.n = base.n
        self.name = f"dilate({base.name}, tau={self.tau:g})"
        self.equation = base.equation
        self.p = base.p
        if base.drift_b is not None:
            # v solves the drift equation with coefficient tau*b(tau x)
            self.drift_b = self.tau * base.drift_b

    def admissible(self, X):
        return self.base.admissible(self.tau * X)

    def _evaluate(self, X):
        u, g, lap = self.base._evaluate(self.tau * X)
        return u, self.tau * g, self.tau**2 * lap

    def _hessian(self, X):
        return self.tau**2 * self.base._hessian(self.tau * X)


class GridField(ScalarField):
    """Bilinear interpolant of nodal data on a uniform 2D grid.

    ``values[i, j]`` sits at ``(x0 + j*h, y0 + i*h)``.  Nodal gradients use
    centred differences (second-order one-sided at the edges), the Laplacian
    the 5-point stencil; both are interpolated bilinearly.  Queries must lie
    in the grid box inset by one cell.
    """

    def __init__(self, values, h, x0, y0, name="grid", equation=None, drift_b=None, p=None):
        self.n = 2
        self.values = np.array(values, dtype=float)
        self.values.setflags(write=False)
        self.h = float(h)
        self.x0 = float(x0)
        self.y0 = float(y0)
        self.name = name
        self.equation = equation
        self.drift_b = None if drift_b is None else np.asarray(drift_b, dtype=float)
        self.p = p
        ny, nx = self.values.shape
        if nx < 4 or ny < 4:
            raise FieldSpecError("grid-backed field needs at least 4x4 nodes")
        self.lo = np.array([self.x0 + self.h, self.y0 + self.h])
        self.hi = np.array([self.x0 + (nx - 2) * self.h, self.y0 + (ny - 2) * self.h])
        self.domain_note = f"[{self.lo[0]:g}, {self.hi[0]:g}] x [{self.lo[1]:g}, {self.hi[1]:g}]"

        v = self.values
        hh = self.h
        gy, gx = np.gradient(v, hh, edge_order=2)
        lap = np.full_like(v, np.nan)
        lap[1:-1, 1:-1] = (v[1:-1, 2:] + v[1:-1, :-2] + v[2:, 1:-1] + v[:-2, 1:-1] - 4 * v[1:-1, 1:-1]) / hh**2
        uxx = np.full_like(v, np.nan)
        uyy = np.full_like(v, np.nan)
        uxx[:, 1:-1] = (v[:, 2:] - 2 * v[:, 1:-1] + v[:, :-2]) / hh**2
        uyy[1:-1, :] = (v[2:, :] - 2 * v[1:-1, :] + v[:-2, :]) / hh**2
        uxy = np.gradient(gx, hh, axis=0, edge_order=2)
        self._nodal = np.stack([v, gx, gy, lap, uxx, uxy, uyy])

    def admissible(self, X):
        tol = 1e-12 * max(1.0, float(np.max(np.abs(self.hi))))
        return np.all((X >= self.lo - tol) & (X <= self.hi + tol), axis=1)

    def _interp(self, X):
        ny, nx = self.values.shape
        s = (X[:, 0] - self.x0) / self.h
        t = (X[:, 1] - self.y0) / self.h
        j = np.clip(np.floor(s).astype(int), 0, nx - 2)
        i = np.clip(np.floor(t).astype(int), 0, ny - 2)
        fs = s - j
        ft = t - i
        A = self._nodal
        return (
            A[:, i, j] * (1 - fs) * (1 - ft)
            + A[:, i, j + 1] * fs * (1 - ft)
            + A[:, i + 1, j] * (1 - fs) * ft
            + A[:, i + 1, j + 1] * fs * ft
        )

    def _evaluate(self, X):
        v, gx, gy, lap, *_ = self._interp(X)
        return v, np.stack([gx, gy], axis=1), lap

    def _hessian(self, X):
        *_, uxx, uxy, uyy = self._interp(X)
        H = np.empty((X.shape[0], 2, 2))
        H[:, 0, 0] = uxx
        H[:, 0, 1] = H[:, 1, 0] = uxy
        H[:, 1, 1] = uyy
        return H


# ---------------------------------------------------------------------------
# Construction, parsing and evaluation
# ---------------------------------------------------------------------------


def _check_dim(n):
    if n not in (2, 3):
        raise FieldSpecError(f"dimension must be 2 or 3, got {n}")


def make_field(spec, n: int | None = None) -> ScalarField:
    """Build a field from a spec object or a catalog string.

    ``n`` is required for specs that do not fix the dimension themselves
    (harmonic polynomials, p-radial); otherwise it is checked for agreement.
    """
    if isinstance(spec, str):
        spec, parsed_n = parse_field(spec)
        if n is None:
            n = parsed_n
        elif parsed_n is not None and parsed_n != n:
            raise FieldSpecError(f"field string fixes n={parsed_n}, requested n={n}")

    if isinstance(spec, HarmonicPolynomial):
        n = 2 if n is None else n
        _check_dim(n)
        k = spec.degree
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise FieldSpecError(f"harmonic degree must be a non-negative integer, got {k!r}")
        if n == 2:
            if spec.basis not in ("cos", "sin"):
                raise FieldSpecError("2D harmonic basis must be 'cos' or 'sin'")
            if k == 0 and spec.basis == "sin":
                raise FieldSpecError("degree 0 has no sin member")
            return Harmonic2D(k, spec.basis)
        if k > MAX_DEGREE_3D:
            raise FieldSpecError(f"3D harmonic catalog stops at degree {MAX_DEGREE_3D}")
        try:
            m = int(spec.basis)
        except (TypeError, ValueError):
            raise FieldSpecError("3D harmonic basis must be an integer order m") from None
        if abs(m) > k:
            raise FieldSpecError(f"order m={m} out of range for degree {k}")
        return PolynomialField(SOLID_HARMONICS_3D[(k, m)], 3, name=f"harmonic:3d:k={k}:m={m}", equation="laplace")

    if isinstance(spec, Affine):
        f = AffineField(spec.coeffs, spec.l0)
    elif isinstance(spec, DriftExponential):
        b = np.asarray(spec.b, dtype=float)
        if not np.all(np.isfinite(b)):
            raise FieldSpecError("drift vector b must be finite")
        f = DriftExponentialField(b)
    elif isinstance(spec, PRadial):
        n = 2 if n is None else n
        _check_dim(n)
        if not spec.p > 1:
            raise FieldSpecError("p-radial requires p > 1")
        if math.isclose(spec.p, n):
            raise FieldSpecError(f"p-radial requires p != n (got p={spec.p:g}, n={n})")
        if not spec.r_min > 0:
            raise FieldSpecError("p-radial requires r_min > 0")
        return PRadialField(spec.p, n, spec.r_min)
    elif isinstance(spec, Ramp):
        f = RampField(spec.coeffs, spec.l0, spec.power)
    elif isinstance(spec, GridBacked):
        from .solver import to_field

        f = to_field(spec.solution)
    elif isinstance(spec, Combination):
        f = CombinationField([(c, make_field(s, n)) for c, s in spec.terms])
    else:
        raise FieldSpecError(f"unknown field spec {spec!r}")
    _check_dim(f.n)
    if n is not None and f.n != n:
        raise FieldSpecError(f"field has dimension {f.n}, requested n={n}")
    return f


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split(","))


def _parse_single(text: str):
    parts = [p.strip() for p in text.strip().split(":")]
    kind, rest = parts[0], parts[1:]
    opts: dict[str, str] = {}
    flags: list[str] = []
    for p in rest:
        if "=" in p:
            key, val = p.split("=", 1)
            opts[key.strip()] = val.strip()
        else:
            flags.append(p)
    n = int(opts.pop("n")) if "n" in opts else None
    try:
        if kind == "harmonic":
            for fl in flags:
                if fl in ("2d", "3d"):
                    n = int(fl[0])
            basis: str | int = "cos"
            if "sin" in flags:
                basis = "sin"
            if "m" in opts:
                basis = int(opts.pop("m"))
            elif n == 3:
                basis = 0
            spec = HarmonicPolynomial(int(opts.pop("k")), basis)
        elif kind == "affine":
            spec = Affine(_floats(opts.pop("a")), float(opts.pop("l0", 0.0)))
        elif kind == "const":
            c = float(opts.pop("c"))
            spec = Affine((0.0,) * (n or 2), c)
        elif kind == "drift-exp":
            spec = DriftExponential(_floats(opts.pop("b")))
        elif kind == "p-radial":
            spec = PRadial(float(opts.pop("p")), float(opts.pop("rmin", 0.1)))
        elif kind == "ramp":
            spec = Ramp(_floats(opts.pop("a")), float(opts.pop("l0", 0.0)), float(opts.pop("power", 1.0)))
        else:
            raise FieldSpecError(f"unknown field kind {kind!r} in {text!r}")
    except KeyError as exc:
        raise FieldSpecError(f"missing parameter {exc.args[0]!r} in field {text!r}") from None
    except ValueError as exc:
        if isinstance(exc, FieldSpecError):
            raise
        raise FieldSpecError(f"malformed field {text!r}: {exc}") from None
    if opts:
        raise FieldSpecError(f"unknown parameters {sorted(opts)} in field {text!r}")
    return spec, n


def parse_field(text: str):
    """Parse a catalog string into ``(spec, n)``; ``n`` is ``None`` if unfixed.

    Supported kinds::

        harmonic:2d:k=3:cos     harmonic:2d:k=2:sin     harmonic:3d:k=2:m=-1
        affine:a=1,0:l0=0.5     const:c=5[:n=3]         drift-exp:b=2,0
        p-radial:p=3[:n=2][:rmin=0.1]                   ramp:a=1,0[:l0=0][:power=3]

    Terms may be combined linearly: ``"affine:a=1,0 + 0.1*harmonic:2d:k=2:cos"``.
    """
    if not isinstance(text, str) or not text.strip():
        raise FieldSpecError("empty field specification")
    pieces = [p for p in text.split(" + ")]
    terms = []
    dims = set()
    for piece in pieces:
        piece = piece.strip()
        coef = 1.0
        if "*" in piece:
            c, piece = piece.split("*", 1)
            try:
                coef = float(c)
            except ValueError:
                raise FieldSpecError(f"bad coefficient {c!r} in {text!r}") from None
        spec, n = _parse_single(piece)
        if n is None and isinstance(spec, (Affine, DriftExponential, Ramp)):
            n = len(spec.b if isinstance(spec, DriftExponential) else spec.coeffs)
        if n is not None:
            dims.add(n)
        terms.append((coef, spec))
    if len(dims) > 1:
        raise FieldSpecError(f"inconsistent dimensions in {text!r}")
    n = dims.pop() if dims else None
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1], n
    return Combination(tuple(terms)), n


def eval_bundle(field: ScalarField, x) -> tuple[float, np.ndarray, float]:
    """Value, gradient and Laplacian of ``field`` at the single point ``x``."""
    X = as_point(x, field.n)[None, :]
    u, g, lap = field.evaluate(X)
    return float(u[0]), g[0].copy(), float(lap[0])


def pde_residual(field: ScalarField, x, equation: str, b=None, p: float | None = None, epsilon: float | None = None) -> float:
    """Pointwise residual of ``equation`` in {"laplace", "drift", "plaplace"}.

    The p-Laplacian is expanded by the chain rule,
    ``|∇u|^(p-2) (Δu + (p-2) ∇uᵀ D²u ∇u / |∇u|²)``.  At a critical point it
    raises :class:`DegeneratePointError` unless ``epsilon`` is given, in which
    case ``|∇u|²`` is replaced by ``|∇u|² + epsilon²``.
    """
    X = as_point(x, field.n)[None, :]
    u, g, lap = field.evaluate(X)
    g = g[0]
    lap = float(lap[0])
    if equation == "laplace":
        return abs(lap)
    if equation == "drift":
        if b is None:
            raise ValueError("drift residual needs the coefficient vector b")
        return abs(lap - float(np.dot(np.asarray(b, dtype=float), g)))
    if equation == "plaplace":
        if p is None:
            raise ValueError("p-Laplace residual needs p")
        s = float(g @ g)
        if epsilon is not None:
            s += epsilon**2
        elif s == 0.0:
            raise DegeneratePointError(f"p-Laplace residual undefined at critical point {X[0].tolist()}")
        if s == 0.0:
            return 0.0
        H = field.hessian(X)[0]
        return abs(s ** ((p - 2) / 2) * (lap + (p - 2) * float(g @ H @ g) / s))
    raise ValueError(f"unknown equation {equation!r}")
