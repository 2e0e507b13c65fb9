"""Fourier transforms on group models and the transfer maps between models.

The transfer maps are the witness constructions used to move a function
between ``Z x G``, ``R x G`` and ``Z^2 x G``, and between a finite group
and its subgroups:

* :func:`step_extension` / :func:`grid_discretize`: lattice sequences to
  step functions on a delta-grid and back;
* :func:`interleave`: collapse ``Z^2`` onto ``Z`` by ``(l1, l2) -> l1 + A l2``
  with a unimodular modulation;
* :func:`zero_extend`: extend by zero from an open subgroup;
* :func:`weil_decompose`: split a function on G into its coset pieces on H.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CapabilityError, DomainError
from .functions import OperatorSpec, VecFunction, apply_operator
from .groups import (
    Cyclic,
    GroupModel,
    Lattice,
    RealGrid,
    SubgroupAxis,
    SubgroupDecomposition,
    Torus,
    dual_group,
    make_group,
)


def _dft_axis(points, values, k, matrix):
    """Apply a dense character matrix along axis ``k`` of an atom list."""
    n_out = matrix.shape[0]
    K = len(points)
    new_pts = np.repeat(points, n_out, axis=0)
    new_pts[:, k] = np.tile(np.arange(n_out), K)
    coef = matrix[:, points[:, k]].T
    new_vals = (values[:, None, :] * coef[:, :, None]).reshape(K * n_out, values.shape[1])
    return new_pts, new_vals


def fourier(g, f: VecFunction, axes=None) -> VecFunction:
    """Fourier transform ``Ff(chi) = integral f(s) pair(s, chi) dmu(s)``.

    Finite axes get an exact DFT, lattice axes become trigonometric
    polynomials, step functions become sinc series, and torus axes with a
    trigonometric polynomial give back point values on the lattice.
    Factors are processed in declared order.  ``axes`` restricts the
    transform to the listed axis positions; the others pass through.
    """
    g = make_group(g if g is not None else f.model)
    if f.model != g:
        raise DomainError(f"function lives on {f.model}, not on {g}")
    pts = np.array(f.points)
    vals = np.array(f.values)
    todo = set(range(g.ndim)) if axes is None else {int(a) for a in axes}
    out_axes = [ax.dual_axis() if k in todo else ax for k, ax in enumerate(g.axes)]
    for k, ax in enumerate(g.axes):
        if k not in todo:
            continue
        if isinstance(ax, (Cyclic, SubgroupAxis)):
            pts, vals = _dft_axis(pts, vals, k, ax.dft_matrix())
        elif isinstance(ax, Lattice):
            pass
        elif isinstance(ax, Torus):
            # integral of exp(i m s) exp(i k s) ds / 2 pi picks out k = -m
            pts[:, k] = -pts[:, k]
        elif isinstance(ax, RealGrid) and not ax.dual:
            pass
        else:
            raise CapabilityError(f"no Fourier transform for {f.representation} data on axis {ax}")
    return VecFunction(GroupModel(tuple(out_axes)), f.space, pts, vals)


def tensor_transform(g, T: OperatorSpec, f: VecFunction) -> VecFunction:
    """``[F^G, T] f``, computed as ``fourier(g, T f)``."""
    return fourier(g, apply_operator(T, f))


# --------------------------------------------------------------------------
# Z <-> R step functions
# --------------------------------------------------------------------------


def _find_axis(model, kind, dual=False, axis=None):
    if axis is not None:
        ax = model.axes[axis]
        if not isinstance(ax, kind) or getattr(ax, "dual", False) != dual:
            raise DomainError(f"axis {axis} of {model} is not a {kind.__name__}")
        return axis
    for k, ax in enumerate(model.axes):
        if isinstance(ax, kind) and getattr(ax, "dual", False) == dual:
            return k
    raise DomainError(f"{model} has no {kind.__name__} axis")


def step_extension(f: VecFunction, delta: float = 1.0, axis: int | None = None) -> VecFunction:
    """Lattice coefficient ``g_m`` becomes the value on cell ``[delta(m-1/2), delta(m+1/2)]``."""
    k = _find_axis(f.model, Lattice, axis=axis)
    axes = list(f.model.axes)
    axes[k] = RealGrid(delta, axes[k].N)
    return VecFunction(GroupModel(tuple(axes)), f.space, f.points, f.values)


def grid_discretize(f: VecFunction, axis: int | None = None) -> VecFunction:
    """Cell coefficients of a step function (or of its sinc series) as a lattice sequence."""
    try:
        k = _find_axis(f.model, RealGrid, axis=axis)
    except DomainError:
        try:
            k = _find_axis(f.model, RealGrid, dual=True, axis=axis)
        except DomainError:
            raise DomainError(f"{f.model} carries no delta-grid axis to discretize") from None
    axes = list(f.model.axes)
    axes[k] = Lattice(axes[k].M)
    return VecFunction(GroupModel(tuple(axes)), f.space, f.points, f.values)


# --------------------------------------------------------------------------
# interleaving Z^2 -> Z
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InterleavingPlan:
    """Index map ``(l1, l2) -> l1 + A * l2`` on two lattice axes."""

    A: int
    axes: tuple = (0, 1)

    def __post_init__(self):
        if self.A < 1 or self.A % 2 == 0:
            raise DomainError(f"A must be an odd positive integer, got {self.A}")

    def index(self, l1, l2):
        return l1 + self.A * l2

    @property
    def reach(self):
        return (self.A - 1) // 2


def make_interleaving(f: VecFunction, axes: tuple | None = None) -> InterleavingPlan:
    """Plan with ``A = 2 max|l1| + 1`` over the support of ``f``."""
    if axes is None:
        lat = [k for k, a in enumerate(f.model.axes) if isinstance(a, Lattice)]
        if len(lat) < 2:
            raise DomainError(f"{f.model} needs two lattice axes to interleave")
        axes = (lat[0], lat[1])
    i, j = axes
    l1 = f.points[:, i]
    A = 2 * int(np.abs(l1).max(initial=0)) + 1
    plan = InterleavingPlan(A, (i, j))
    images = {(plan.index(a, b),) + tuple(np.delete(p, [i, j])) for p, a, b in zip(f.points, l1, f.points[:, j])}
    assert len(images) == len(f.points), "interleaving map is not injective on the support"
    return plan


def interleave(f: VecFunction, plan: InterleavingPlan, s2: float) -> VecFunction:
    """Move ``g_{l1,l2}`` to index ``l1 + A l2`` with the factor ``exp(i s2 A l2)``."""
    i, j = plan.axes
    if not (isinstance(f.model.axes[i], Lattice) and isinstance(f.model.axes[j], Lattice)):
        raise DomainError("plan axes must both be lattice axes")
    l1 = f.points[:, i]
    l2 = f.points[:, j]
    if len(l1) and int(np.abs(l1).max()) > plan.reach:
        raise DomainError(f"support reaches |l1| = {int(np.abs(l1).max())} beyond the plan's {plan.reach}")
    k = plan.index(l1, l2)
    vals = f.values * np.exp(1j * s2 * plan.A * l2)[:, None]
    pts = np.array(f.points)
    pts[:, i] = k
    pts = np.delete(pts, j, axis=1)
    axes = list(f.model.axes)
    window = max(axes[i].N, int(np.abs(k).max(initial=0)))
    axes[i] = Lattice(window)
    del axes[j]
    return VecFunction(GroupModel(tuple(axes)), f.space, pts, vals)


def interleave_family(f: VecFunction, plan: InterleavingPlan) -> VecFunction:
    """All interleavings at once: a trigonometric polynomial in ``s2``.

    The result lives on ``T x Z x (rest)``; its slice at angle ``s2`` is
    ``interleave(f, plan, s2)``.
    """
    i, j = plan.axes
    l1 = f.points[:, i]
    l2 = f.points[:, j]
    k = plan.index(l1, l2)
    rest = np.delete(np.array(f.points), [i, j], axis=1)
    pts = np.column_stack([plan.A * l2, k, rest]).astype(np.int64)
    others = [a for n, a in enumerate(f.model.axes) if n not in (i, j)]
    window = max(f.model.axes[i].N, int(np.abs(k).max(initial=0)))
    res = max(8, int(np.abs(pts[:, 0]).max(initial=0)))
    return VecFunction(GroupModel((Torus(res), Lattice(window), *others)), f.space, pts, f.values)


def embed_axis(f: VecFunction, position: int, axis) -> VecFunction:
    """View ``f`` on a model with one more discrete axis, pinned at index 0."""
    if not isinstance(axis, (Lattice, Cyclic)) or getattr(axis, "dual", False):
        raise CapabilityError(f"can only pin a lattice or cyclic axis, got {axis}")
    axes = list(f.model.axes)
    axes.insert(position, axis)
    pts = np.insert(np.array(f.points), position, 0, axis=1)
    return VecFunction(GroupModel(tuple(axes)), f.space, pts, f.values)


# --------------------------------------------------------------------------
# subgroups
# --------------------------------------------------------------------------


def zero_extend(f: VecFunction, target) -> VecFunction:
    """Extend ``f`` by zero from an open subgroup.

    ``target`` is a :class:`SubgroupDecomposition` (finite subgroup into its
    parent), a model differing from ``f.model`` by one lattice axis turned
    into a unit real grid (via :func:`step_extension`), or a model that
    contains ``f.model``'s axes in order plus extra discrete axes (pinned
    at 0).
    """
    if isinstance(target, SubgroupDecomposition):
        k = next((i for i, a in enumerate(f.model.axes) if isinstance(a, SubgroupAxis) and not a.dual), None)
        if k is None or f.model.axes[k] != target.model.axes[0]:
            raise DomainError(f"{f.model} is not the subgroup model of this decomposition")
        elements = np.array(target.elements, dtype=np.int64).reshape(target.order, -1)
        pts = np.array(f.points)
        new_pts = np.hstack([pts[:, :k], elements[pts[:, k]], pts[:, k + 1:]])
        axes = f.model.axes[:k] + target.parent.axes + f.model.axes[k + 1:]
        return VecFunction(GroupModel(axes), f.space, new_pts, f.values)

    target = make_group(target)
    src = f.model.axes
    dst = target.axes
    if len(src) == len(dst):
        diff = [k for k in range(len(src)) if src[k] != dst[k]]
        if (len(diff) == 1 and isinstance(src[diff[0]], Lattice) and isinstance(dst[diff[0]], RealGrid)
                and dst[diff[0]].delta == 1.0 and not dst[diff[0]].dual):
            return step_extension(f, 1.0, axis=diff[0])
    # subsequence embedding with pinned extra axes
    out, si = f, 0
    for k, ax in enumerate(dst):
        if si < len(src) and _fits(src[si], ax):
            si += 1
            continue
        out = embed_axis(out, k, ax)
    if si != len(src):
        raise CapabilityError(f"no supported embedding of {f.model} into {target}")
    return VecFunction(target, f.space, out.points, out.values)


def _fits(a, b):
    if a == b:
        return True
    return isinstance(a, Lattice) and isinstance(b, Lattice) and a.N <= b.N


def weil_decompose(f: VecFunction, H: SubgroupDecomposition) -> list:
    """Coset pieces ``h -> f(s_i + h)`` as functions on ``H.model``, one per representative."""
    if f.model != H.parent:
        raise DomainError(f"decomposition belongs to {H.parent}, function lives on {f.model}")
    lookup = {tuple(int(c) for c in p): v for p, v in zip(f.points, f.values)}
    pieces = []
    for s in H.representatives:
        pts, vals = [], []
        for j, h in enumerate(H.elements):
            v = lookup.get(H.add(s, h))
            if v is not None:
                pts.append([j])
                vals.append(v)
        pieces.append(VecFunction(H.model, f.space, np.array(pts, dtype=np.int64).reshape(-1, 1),
                                  np.array(vals, dtype=complex).reshape(-1, f.space.dim)))
    return pieces


def weil_sides(f: VecFunction, H: SubgroupDecomposition, p: float):
    """Both sides of Weil's formula for ``||f||^p``.

    Left: ``sum_G ||f||^p`` with counting measure.  Right:
    ``sum_i (1/n) integral_H ||f(s_i + h)||^p dmu_H`` where the quotient
    carries unit total mass and ``mu_H`` is counting measure scaled by n.
    """
    from .functions import vector_norm

    lhs = float(np.sum(vector_norm(f.values, f.space.q) ** p))
    n = H.index
    rhs = 0.0
    for piece in weil_decompose(f, H):
        rhs += (1.0 / n) * n * float(np.sum(vector_norm(piece.values, f.space.q) ** p))
    return lhs, rhs


__all__ = [
    "fourier", "tensor_transform", "step_extension", "grid_discretize", "InterleavingPlan",
    "make_interleaving", "interleave", "interleave_family", "embed_axis", "zero_extend", "weil_decompose", "weil_sides",
]
