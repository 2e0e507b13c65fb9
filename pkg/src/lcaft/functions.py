"""Vector-valued functions on group models and their L_p norms.

A :class:`VecFunction` stores finitely many atoms: an integer index per axis
and a coefficient vector.  How an atom is read depends on the axis:

* point axes (``Cyclic``, ``Lattice``, ``SubgroupAxis``): the value at that point;
* a primal ``RealGrid`` axis: the constant value on cell ``m``;
* a ``Torus`` axis: the coefficient of ``exp(i m s)``;
* a dual ``RealGrid`` axis: the coefficient of
  ``exp(i m delta s) sin(delta s / 2) / (s / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .exceptions import DomainError, NumericError, ValidationError
from .groups import GroupModel, RealGrid, Torus, make_group, parse_group

DEFAULT_TOL = 1e-9


def conjugate_exponent(q: float) -> float:
    if q == 1:
        return math.inf
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def vector_norm(v, q):
    """l_q norm over the last axis of a complex array."""
    a = np.abs(v)
    if math.isinf(q):
        return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    if q == 2:
        return np.sqrt(np.sum(a * a, axis=-1))
    return np.sum(a**q, axis=-1) ** (1.0 / q)


@dataclass(frozen=True)
class BanachSpec:
    """Finite-dimensional complex l_q space."""

    dim: int
    q: float = 2.0

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError("dim", f"must be an integer ≥ 1, got {self.dim!r}")
        q = float(self.q)
        if not q >= 1:
            raise ValidationError("q", f"must lie in [1, inf], got {self.q!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "q", q)

    def dual(self) -> "BanachSpec":
        return BanachSpec(self.dim, conjugate_exponent(self.q))

    def norm(self, v):
        return vector_norm(np.asarray(v), self.q)

    def to_json(self):
        return {"dim": self.dim, "q": _json_float(self.q)}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["dim"]), float(d["q"]))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A complex matrix T: X -> Y between finite-dimensional l_q spaces."""

    matrix: np.ndarray
    domain: BanachSpec
    codomain: BanachSpec

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.shape != (self.codomain.dim, self.domain.dim):
            raise ValidationError(
                "matrix",
                f"shape {m.shape} does not match codomain dim {self.codomain.dim} "
                f"x domain dim {self.domain.dim}",
            )
        if not np.all(np.isfinite(m)):
            raise NumericError("operator matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dim, q=2.0):
        s = BanachSpec(dim, q)
        return cls(np.eye(dim), s, s)

    @classmethod
    def from_matrix(cls, matrix, q_domain=2.0, q_codomain=2.0):
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(m, BanachSpec(m.shape[1], q_domain), BanachSpec(m.shape[0], q_codomain))

    @property
    def is_zero(self):
        return not np.any(self.matrix)

    def __call__(self, v):
        return np.asarray(v) @ self.matrix.T

    def to_json(self):
        return {
            "matrix": [[[_json_float(z.real), _json_float(z.imag)] for z in row] for row in self.matrix],
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
        }


@dataclass(frozen=True)
class NormResult:
    value: float
    error: float = 0.0

    def __float__(self):
        return self.value


def _canonical(points, values):
    """Sort atoms lexicographically and sum duplicates."""
    if len(points) == 0:
        return points.reshape(0, points.shape[1]), values.reshape(0, values.shape[1])
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    if len(uniq) == len(points):
        order = np.argsort(inverse, kind="stable")
        return points[order], values[order]
    out = np.zeros((len(uniq), values.shape[1]), dtype=complex)
    np.add.at(out, inverse, values)
    return uniq, out


@dataclass(frozen=True, eq=False)
class VecFunction:
    """Finitely supported Y-valued function on a group model (immutable)."""

    model: GroupModel
    space: BanachSpec
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        model = make_group(self.model)
        pts = np.array(self.points, dtype=np.int64)
        vals = np.array(self.values, dtype=complex)
        if pts.ndim == 1:
            pts = pts.reshape(-1, model.ndim) if model.ndim > 1 else pts.reshape(-1, 1)
        if vals.ndim == 1 and self.space.dim == 1:
            vals = vals.reshape(-1, 1)
        if pts.shape[1:] != (model.ndim,) or vals.shape != (len(pts), self.space.dim):
            raise ValidationError(
                "values", f"expected {len(pts)} coefficient vectors of length {self.space.dim}"
            )
        if not np.all(np.isfinite(vals)):
            raise NumericError("function has non-finite coefficients")
        for k, ax in enumerate(model.axes):
            if ax.is_spectral or len(pts) == 0:
                continue
            lo, hi = ax.index_range()
            if pts[:, k].min() < lo or pts[:, k].max() > hi:
                raise DomainError(f"support index outside {ax} on axis {k}")
        pts, vals = _canonical(pts, vals)
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dict(cls, model, space, mapping):
        model = make_group(model)
        if isinstance(space, int):
            space = BanachSpec(space)
        pts = [tuple(np.atleast_1d(k)) for k in mapping]
        vals = [np.atleast_1d(v) for v in mapping.values()]
        return cls(model, space, np.array(pts, dtype=np.int64).reshape(-1, model.ndim),
                   np.array(vals, dtype=complex).reshape(-1, space.dim))

    @classmethod
    def zero(cls, model, space):
        model = make_group(model)
        return cls(model, space, np.zeros((0, model.ndim), np.int64), np.zeros((0, space.dim)))

    @property
    def representation(self):
        axes = self.model.axes
        if any(isinstance(a, RealGrid) and a.dual for a in axes):
            return "SincSeries"
        if any(isinstance(a, Torus) for a in axes):
            return "TrigPoly"
        if any(isinstance(a, RealGrid) for a in axes):
            return "Step"
        return "PointValues"

    @property
    def support_size(self):
        return len(self.points)

    @property
    def is_zero(self):
        return not np.any(self.values)

    def with_values(self, values, space=None):
        return VecFunction(self.model, space or self.space, self.points, values)

    def __mul__(self, c):
        return self.with_values(self.values * complex(c))

    __rmul__ = __mul__

    def __add__(self, other):
        if self.model != other.model or self.space != other.space:
            raise DomainError("cannot add functions on different models or spaces")
        return VecFunction(self.model, self.space, np.vstack([self.points, other.points]),
                           np.vstack([self.values, other.values]))

    def __sub__(self, other):
        return self + (-1) * other

    def as_dict(self):
        return {tuple(int(i) for i in p): v.copy() for p, v in zip(self.points, self.values)}

    def evaluate(self, x):
        """Value at a point; continuous axes take real coordinates."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.model.ndim,):
            raise DomainError(f"point needs {self.model.ndim} coordinates")
        weight = np.ones(len(self.points), dtype=complex)
        for k, ax in enumerate(self.model.axes):
            col = self.points[:, k]
            if isinstance(ax, Torus):
                weight *= np.exp(1j * col * x[k])
            elif isinstance(ax, RealGrid) and ax.dual:
                weight *= np.exp(1j * col * ax.delta * x[k]) * ax.delta * quadrature.sinc_ratio(ax.delta * x[k] / 2)
            elif isinstance(ax, RealGrid):
                weight *= np.abs(x[k] / ax.delta - col) <= 0.5
            else:
                weight *= col == x[k]
        return weight @ self.values

    def to_json(self):
        return {
            "model": str(self.model),
            "space": self.space.to_json(),
            "representation": self.representation,
            "support": self.points.tolist(),
            "coefficients": [[[_json_float(z.real), _json_float(z.imag)] for z in row] for row in self.values],
        }

    @classmethod
    def from_json(cls, d):
        model = parse_group(d["model"])
        space = BanachSpec.from_json(d["space"])
        vals = np.array([[complex(re, im) for re, im in row] for row in d["coefficients"]], dtype=complex)
        pts = np.array(d["support"], dtype=np.int64).reshape(-1, model.ndim)
        return cls(model, space, pts, vals.reshape(-1, space.dim))


def _json_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------


def _spectral_kernel(ax, r):
    """Density on u in [-pi, pi] (already divided by 2 pi) for a spectral axis."""
    if isinstance(ax, Torus):
        return lambda u: np.full_like(u, 1.0 / (2 * math.pi))
    # Dual real axis: fold R onto [-pi, pi] via s = (u + 2 pi n) / delta.
    scale = ax.delta ** (r - 1.0) / (2 * math.pi)
    return lambda u: scale * quadrature.sinc_periodization(u / 2.0, r)


def _spectral_integral(m, coeffs, axes, q, r, rtol, min_panels):
    """Integral of ||sum_a c_a exp(i m_a . u)||_q^r against the axis kernels.

    Returns (value, error).  The last spectral axis is integrated outermost.
    """
    # Merge atoms that share spectral indices.
    m, coeffs = _canonical(m, coeffs)
    if not np.any(coeffs):
        return 0.0, 0.0
    ax = axes[-1]
    kernel = _spectral_kernel(ax, r)
    col = m[:, -1].astype(float)
    span = float(col.max() - col.min()) if len(col) else 0.0
    panels = max(min_panels, int(math.ceil(span / 2.0)) + 1)
    breaks = [-math.pi, 0.0, math.pi]

    if len(axes) == 1:
        def f(u):
            vals = np.exp(1j * np.outer(u, col)) @ coeffs
            return vector_norm(vals, q) ** r * kernel(u)

        res = quadrature.integrate(f, breaks, rtol=rtol, atol=1e-300, min_panels=panels)
        return res.value, res.error

    inner_err = [0.0]
    rest, rest_axes = m[:, :-1], axes[:-1]

    def g(u):
        out = np.empty(len(u))
        for i, ui in enumerate(u):
            v, e = _spectral_integral(rest, coeffs * np.exp(1j * col * ui)[:, None], rest_axes,
                                      q, r, rtol * 0.1, min_panels)
            inner_err[0] = max(inner_err[0], e)
            out[i] = v
        return out * kernel(u)

    res = quadrature.integrate(g, breaks, rtol=rtol, atol=1e-300, min_panels=panels)
    # Inner errors enter through a kernel of unit mass (times delta^(r-1) for R axes).
    mass = 1.0 if isinstance(ax, Torus) else ax.delta ** (r - 1.0)
    return res.value, res.error + inner_err[0] * mass


def lp_norm(f: VecFunction, p: float, tol: float = DEFAULT_TOL, min_panels: int = 2,
            method: str = "periodized", cutoff: float | None = None) -> NormResult:
    """``(integral ||f(s)||^p dmu(s))^(1/p)`` with an error estimate.

    Discrete parts are exact weighted sums.  Torus axes are integrated by
    adaptive quadrature.  Dual real axes are folded onto ``[-pi, pi]``
    with the periodized sinc kernel (``method="periodized"``), or
    integrated directly on ``[-cutoff, cutoff]`` with the analytic tail
    bound ``|spectrum(s)| <= 2 sum_m ||g_m|| / |s|`` (``method="direct"``).
    """
    p = float(p)
    if not (p > 1 and math.isfinite(p)):
        raise DomainError(f"norm exponent must lie in (1, inf), got {p}")
    if not np.all(np.isfinite(f.values)):
        raise NumericError("function has non-finite coefficients")
    q = f.space.q
    axes = f.model.axes
    spec_idx = [k for k, a in enumerate(axes) if a.is_spectral]
    point_idx = [k for k, a in enumerate(axes) if not a.is_spectral]
    if f.support_size == 0:
        return NormResult(0.0, 0.0)

    if not spec_idx:
        w = np.ones(len(f.points))
        for k in point_idx:
            w *= axes[k].point_weight()
        total = float(np.sum(w * vector_norm(f.values, q) ** p))
        return NormResult(total ** (1.0 / p), 0.0)

    if method == "direct":
        return _direct_sinc_norm(f, p, tol, cutoff)

    w_axes = [axes[k] for k in point_idx]
    keys = f.points[:, point_idx]
    groups, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    weight = math.prod(a.point_weight() for a in w_axes) if w_axes else 1.0
    total, err = 0.0, 0.0
    spec_axes = [axes[k] for k in spec_idx]
    for gi in range(len(groups)):
        sel = inverse == gi
        v, e = _spectral_integral(f.points[sel][:, spec_idx], f.values[sel], spec_axes, q, p, tol, min_panels)
        total += weight * v
        err += weight * e
    return NormResult(total ** (1.0 / p), _root_error(total, err, p))


def _root_error(total, err, p):
    """Bound on |(I + e)^(1/p) - I^(1/p)| for |e| <= err."""
    if err == 0:
        return 0.0
    if total > 2 * err:
        return err / (p * (total - err) ** (1.0 - 1.0 / p))
    return (total + err) ** (1.0 / p)


def _direct_sinc_norm(f, p, tol, cutoff):
    axes = f.model.axes
    spec_idx = [k for k, a in enumerate(axes) if a.is_spectral]
    if len(spec_idx) != 1 or not isinstance(axes[spec_idx[0]], RealGrid):
        raise DomainError("direct quadrature needs exactly one dual real axis")
    k0 = spec_idx[0]
    ax = axes[k0]
    point_idx = [k for k in range(len(axes)) if k != k0]
    weight = math.prod(axes[k].point_weight() for k in point_idx) if point_idx else 1.0
    keys = f.points[:, point_idx]
    groups, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    total, err = 0.0, 0.0
    for gi in range(len(groups)):
        sel = inverse == gi
        col = f.points[sel][:, k0].astype(float)
        coeffs = f.values[sel]
        S = float(np.sum(vector_norm(coeffs, f.space.q)))
        if cutoff is None:
            # Smallest R with tail below tol.
            R = (((2 * S) ** p * 2 / ((p - 1) * 2 * math.pi * tol)) ** (1.0 / (p - 1.0))) if S else 1.0
        else:
            R = float(cutoff)
        tail = (2 * S) ** p * 2.0 / ((p - 1.0) * R ** (p - 1.0)) / (2 * math.pi)

        def h(s):
            vals = np.exp(1j * np.outer(s, col * ax.delta)) @ coeffs
            factor = ax.delta * quadrature.sinc_ratio(ax.delta * s / 2)
            return vector_norm(vals, f.space.q) ** p * np.abs(factor) ** p / (2 * math.pi)

        panels = max(4, int(math.ceil(R * ax.delta / math.pi)))
        res = quadrature.integrate(h, [-R, 0.0, R], rtol=tol, atol=1e-300, min_panels=panels // 2 + 1)
        total += weight * res.value
        err += weight * (res.error + tail)
    return NormResult(total ** (1.0 / p), _root_error(total, err, p))


# --------------------------------------------------------------------------
# operator action and random witnesses
# --------------------------------------------------------------------------


def apply_operator(T: OperatorSpec, f: VecFunction) -> VecFunction:
    """Pointwise action of T on every coefficient vector."""
    if f.space.dim != T.domain.dim:
        raise DomainError(f"operator domain dim {T.domain.dim} != function space dim {f.space.dim}")
    return VecFunction(f.model, T.codomain, f.points, f.values @ T.matrix.T)


def index_ranges(model):
    """Inclusive integer range of support indices on each axis."""
    return [ax.index_range() for ax in model.axes]


def random_function(model, support_size: int, space, seed=0) -> VecFunction:
    """Seeded random witness.

    The support is drawn without replacement from the product of the
    axes' index ranges.  Coefficients are i.i.d. standard complex normal,
    ``(N(0,1) + i N(0,1)) / sqrt(2)`` per component.
    """
    model = make_group(model)
    if isinstance(space, int):
        space = BanachSpec(space)
    if support_size < 1:
        raise DomainError("support size must be ≥ 1")
    ranges = index_ranges(model)
    sizes = [hi - lo + 1 for lo, hi in ranges]
    total = math.prod(sizes)
    if support_size > total:
        raise DomainError(f"support size {support_size} exceeds the {total} available indices of {model}")
    rng = np.random.default_rng(seed)
    flat = np.sort(rng.choice(total, size=support_size, replace=False))
    idx = np.stack(np.unravel_index(flat, sizes), axis=1) + np.array([lo for lo, _ in ranges])
    vals = (rng.standard_normal((support_size, space.dim)) + 1j * rng.standard_normal((support_size, space.dim)))
    return VecFunction(model, space, idx, vals / math.sqrt(2.0))


def delta_function(model, space, vector=None, point=None) -> VecFunction:
    """Single atom ``delta_point (x) vector`` (defaults: identity point, first basis vector)."""
    model = make_group(model)
    if isinstance(space, int):
        space = BanachSpec(space)
    if point is None:
        point = tuple(0 for _ in model.axes)
    if vector is None:
        vector = np.eye(space.dim)[0]
    return VecFunction(model, space, np.array([point], dtype=np.int64).reshape(1, -1),
                       np.asarray(vector, dtype=complex).reshape(1, -1))


__all__ = [
    "BanachSpec", "OperatorSpec", "VecFunction", "NormResult", "lp_norm", "apply_operator",
    "random_function", "delta_function", "conjugate_exponent", "vector_norm",
]
