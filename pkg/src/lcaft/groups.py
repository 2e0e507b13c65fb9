"""Computable models of locally compact abelian groups.

A :class:`GroupModel` is a flat product of leaf axes.  Each axis knows its
dual axis, its character pairing and its Haar normalization:

========================  ===============================  ======================
axis                      support index                    Haar mass / density
========================  ===============================  ======================
``Cyclic(n)``             ``0 .. n-1``                     1 (dual side: 1/n)
``Lattice(N)``            ``-N .. N``                      1
``Torus(res)``            angle in ``[-pi, pi]``           ds/(2 pi)
``RealGrid(delta, M)``    cell ``-M .. M`` (real s)        delta per cell
``RealGrid(..., dual)``   frequency (real)                 ds/(2 pi)
``SubgroupAxis``          index into the element list      1 (dual side: 1/|H|)
========================  ===============================  ======================

The pairing is ``exp(+i <s, chi>)`` everywhere, with no conjugation.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError, GroupSpecError, ValidationError

TWO_PI = 2.0 * math.pi


def _check_int(field, value, minimum):
    if isinstance(value, bool) or int(value) != value:
        raise ValidationError(field, f"must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(field, f"must be ≥ {minimum}, got {value}")
    return int(value)


# --------------------------------------------------------------------------
# leaf axes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cyclic:
    """The cyclic group Z_n (or its dual, which carries mass 1/n per point)."""

    n: int
    dual: bool = False

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise ValidationError("order", f"must be an integer, got {self.n!r}")
        if self.n < 2:
            raise ValidationError("order", "order must be ≥ 2")
        object.__setattr__(self, "n", int(self.n))

    is_spectral = False
    is_finite = True

    def dual_axis(self):
        return Cyclic(self.n, not self.dual)

    def index_range(self):
        return 0, self.n - 1

    @property
    def size(self):
        return self.n

    def point_weight(self):
        return 1.0 / self.n if self.dual else 1.0

    def weight(self, x):
        self.check_point(x)
        return self.point_weight()

    def check_point(self, x):
        if isinstance(x, (bool, np.bool_)) or int(x) != x or not 0 <= x < self.n:
            raise DomainError(f"{x!r} is not a point of {self}")

    def check_dual_point(self, y):
        self.dual_axis().check_point(y)

    def pair(self, x, y):
        return np.exp(1j * TWO_PI * ((int(x) * int(y)) % self.n) / self.n)

    def dft_matrix(self):
        """Rows: dual points, columns: points; includes this side's Haar mass."""
        a = np.arange(self.n)
        phase = np.outer(a, a) % self.n
        return np.exp(1j * TWO_PI * phase / self.n) * self.point_weight()

    def __str__(self):
        return f"Z{self.n}" + ("'" if self.dual else "")


@dataclass(frozen=True)
class Lattice:
    """The integers, with support restricted to the window ``-N .. N``."""

    N: int

    def __post_init__(self):
        object.__setattr__(self, "N", _check_int("window", self.N, 1))

    is_spectral = False
    is_finite = False
    dual = False

    def dual_axis(self):
        return Torus(max(8, 2 * self.N + 1))

    def index_range(self):
        return -self.N, self.N

    @property
    def size(self):
        return 2 * self.N + 1

    def point_weight(self):
        return 1.0

    def weight(self, x):
        self.check_point(x)
        return 1.0

    def check_point(self, x):
        if isinstance(x, (bool, np.bool_)) or int(x) != x or abs(x) > self.N:
            raise DomainError(f"{x!r} is not a point of {self}")

    def check_dual_point(self, y):
        Torus(8).check_point(y)

    def pair(self, x, y):
        return np.exp(1j * float(y) * int(x))

    def __str__(self):
        return f"Zlat[{self.N}]"


@dataclass(frozen=True)
class Torus:
    """The circle group, parametrized by angles in [-pi, pi] with ds/(2 pi).

    Functions on it are trigonometric polynomials; ``res`` bounds their
    frequencies and sets the node count of sampled evaluations.
    """

    res: int = 64

    def __post_init__(self):
        object.__setattr__(self, "res", _check_int("resolution", self.res, 8))

    is_spectral = True
    is_finite = False
    dual = False

    def dual_axis(self):
        return Lattice(self.res)

    def index_range(self):
        return -self.res, self.res

    @property
    def size(self):
        return 2 * self.res + 1

    def weight(self, x):
        self.check_point(x)
        return 1.0 / TWO_PI

    def check_point(self, x):
        x = float(x)
        if not (math.isfinite(x) and -math.pi <= x <= math.pi):
            raise DomainError(f"{x!r} is not an angle in [-pi, pi]")

    def check_dual_point(self, y):
        if isinstance(y, (bool, np.bool_)) or int(y) != y:
            raise DomainError(f"{y!r} is not an integer frequency")

    def pair(self, x, y):
        return np.exp(1j * float(x) * int(y))

    def __str__(self):
        return f"T[{self.res}]"


@dataclass(frozen=True)
class RealGrid:
    """The real line seen through step functions on cells of width ``delta``.

    The primal side holds cells ``[delta (m - 1/2), delta (m + 1/2)]`` for
    ``|m| <= M``.  The dual side (``dual=True``) is the continuous frequency
    axis; functions there are sinc series and are never sampled on a grid.
    """

    delta: float
    M: int
    dual: bool = False

    def __post_init__(self):
        d = float(self.delta)
        if not (math.isfinite(d) and d > 0):
            raise ValidationError("delta", f"must be positive, got {self.delta!r}")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "M", _check_int("window", self.M, 1))

    is_finite = False

    @property
    def is_spectral(self):
        return self.dual

    def dual_axis(self):
        return RealGrid(self.delta, self.M, not self.dual)

    def index_range(self):
        return -self.M, self.M

    @property
    def size(self):
        return 2 * self.M + 1

    def point_weight(self):
        return self.delta

    def weight(self, x):
        self.check_point(x)
        return 1.0 / TWO_PI if self.dual else self.delta

    def check_point(self, x):
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"{x!r} is not a real number")
        if not self.dual and abs(x) > self.delta * (self.M + 0.5):
            raise DomainError(f"{x!r} lies outside the grid of {self}")

    def check_dual_point(self, y):
        self.dual_axis().check_point(y)

    def pair(self, x, y):
        return np.exp(1j * float(x) * float(y))

    def __str__(self):
        return f"R[delta={self.delta!r},M={self.M}]" + ("'" if self.dual else "")


@dataclass(frozen=True)
class SubgroupAxis:
    """A subgroup H of a finite product of cyclic groups, as a single axis.

    Points are indices into ``elements``.  Dual points are indices into
    ``dual_reps``: one character of the parent per coset of the annihilator,
    which realizes H' as G'/H^perp.
    """

    parent: tuple
    elements: tuple
    dual_reps: tuple
    dual: bool = False

    is_spectral = False
    is_finite = True

    def dual_axis(self):
        return SubgroupAxis(self.parent, self.elements, self.dual_reps, not self.dual)

    @property
    def order(self):
        return len(self.elements)

    @property
    def size(self):
        return self.order

    def index_range(self):
        return 0, self.order - 1

    def point_weight(self):
        return 1.0 / self.order if self.dual else 1.0

    def weight(self, x):
        self.check_point(x)
        return self.point_weight()

    def check_point(self, x):
        if isinstance(x, (bool, np.bool_)) or int(x) != x or not 0 <= x < self.order:
            raise DomainError(f"{x!r} is not a point index of {self}")

    def check_dual_point(self, y):
        self.dual_axis().check_point(y)

    def _parent_pair(self, a, b):
        phase = sum((ai * bi % n) / n for ai, bi, n in zip(a, b, self.parent))
        return np.exp(1j * TWO_PI * phase)

    def pair(self, x, y):
        if self.dual:
            x, y = y, x
        return self._parent_pair(self.elements[int(x)], self.dual_reps[int(y)])

    def dft_matrix(self):
        el = np.array(self.elements).reshape(self.order, -1)
        ch = np.array(self.dual_reps).reshape(self.order, -1)
        orders = np.array(self.parent)
        phase = ((ch[:, None, :] * el[None, :, :]) % orders / orders).sum(axis=-1)
        if self.dual:
            phase = phase.T
        return np.exp(1j * TWO_PI * phase) * self.point_weight()

    def __str__(self):
        parent = "x".join(f"Z{n}" for n in self.parent)
        gens = ";".join("(" + ",".join(map(str, e)) + ")" for e in self.elements)
        return f"H[{parent}:{gens}]" + ("'" if self.dual else "")


AXIS_TYPES = (Cyclic, Lattice, Torus, RealGrid, SubgroupAxis)


# --------------------------------------------------------------------------
# models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupModel:
    """A flat, immutable product of leaf axes."""

    axes: tuple

    def __post_init__(self):
        axes = tuple(self.axes)
        if not axes:
            raise ValidationError("axes", "a group model needs at least one axis")
        for ax in axes:
            if not isinstance(ax, AXIS_TYPES):
                raise ValidationError("axes", f"unknown axis {ax!r}")
        object.__setattr__(self, "axes", axes)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def kind(self):
        if all(isinstance(a, (Cyclic, SubgroupAxis)) for a in self.axes):
            return "finite"
        if len(self.axes) == 1:
            return {Lattice: "lattice", Torus: "torus", RealGrid: "realgrid"}[type(self.axes[0])]
        return "product"

    @property
    def is_finite(self):
        return all(a.is_finite for a in self.axes)

    @property
    def order(self):
        if not self.is_finite:
            raise DomainError(f"{self} is not finite")
        return math.prod(a.size for a in self.axes)

    @property
    def orders(self):
        return tuple(a.n for a in self.axes if isinstance(a, Cyclic))

    def points(self):
        """All points of a finite model in lexicographic order."""
        if not self.is_finite:
            raise DomainError(f"{self} is not finite")
        return list(itertools.product(*(range(a.size) for a in self.axes)))

    def check_point(self, point):
        pt = _as_point(self, point)
        for ax, x in zip(self.axes, pt):
            ax.check_point(x)
        return pt

    def __str__(self):
        return " x ".join(str(a) for a in self.axes)


def _as_point(g, point):
    if np.isscalar(point):
        point = (point,)
    point = tuple(point)
    if len(point) != g.ndim:
        raise DomainError(f"point {point!r} has {len(point)} coordinates, {g} needs {g.ndim}")
    return point


def Finite(orders: Sequence[int]) -> GroupModel:
    """Finite abelian group Z_{n1} x ... x Z_{nk} with counting measure."""
    if np.isscalar(orders):
        orders = [orders]
    orders = list(orders)
    if not orders:
        raise ValidationError("orders", "at least one cyclic factor is required")
    return GroupModel(tuple(Cyclic(n) for n in orders))


def Product(factors: Iterable) -> GroupModel:
    """Flat product; nested products and multi-factor finite groups are flattened."""
    axes = []
    for f in factors:
        axes.extend(make_group(f).axes)
    return GroupModel(tuple(axes))


def make_group(spec) -> GroupModel:
    """Validate and flatten a group descriptor.

    Accepts a :class:`GroupModel`, a single axis, a sequence of either, a
    spec string (see :func:`parse_group`) or a dict such as
    ``{"kind": "finite", "orders": [4]}``.
    """
    if isinstance(spec, GroupModel):
        return spec
    if isinstance(spec, AXIS_TYPES):
        return GroupModel((spec,))
    if isinstance(spec, str):
        return parse_group(spec)
    if isinstance(spec, dict):
        return _from_dict(spec)
    if isinstance(spec, (list, tuple)):
        return Product(spec)
    raise ValidationError("spec", f"cannot build a group model from {spec!r}")


def _from_dict(d):
    kind = d.get("kind")
    if kind == "finite":
        return Finite(d["orders"])
    if kind == "lattice":
        return GroupModel((Lattice(d["N"]),))
    if kind == "torus":
        return GroupModel((Torus(d.get("res", 64)),))
    if kind == "realgrid":
        return GroupModel((RealGrid(d["delta"], d["M"]),))
    if kind == "product":
        return Product(d["factors"])
    raise ValidationError("kind", f"unknown group kind {kind!r}")


def dual_group(g) -> GroupModel:
    """Pontryagin dual, axis by axis."""
    g = make_group(g)
    return GroupModel(tuple(a.dual_axis() for a in g.axes))


def pair(g, s, chi) -> complex:
    """Character pairing ``exp(i <s, chi>)`` of a point and a dual point."""
    g = make_group(g)
    s = _as_point(g, s)
    chi = _as_point(g, chi)
    value = 1.0 + 0j
    for ax, x, y in zip(g.axes, s, chi):
        ax.check_point(x)
        ax.check_dual_point(y)
        value *= ax.pair(x, y)
    return complex(value)


def haar_weight(g, point) -> float:
    """Haar mass of a point (discrete axes) times density (continuous axes)."""
    g = make_group(g)
    point = _as_point(g, point)
    return float(math.prod(ax.weight(x) for ax, x in zip(g.axes, point)))


# --------------------------------------------------------------------------
# subgroups of finite models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupDecomposition:
    """H <= G together with the lexicographically smallest coset representatives."""

    parent: GroupModel
    elements: tuple
    representatives: tuple

    @property
    def index(self):
        return len(self.representatives)

    @property
    def order(self):
        return len(self.elements)

    @cached_property
    def annihilator(self):
        return tuple(annihilator(self.parent, self))

    @cached_property
    def model(self) -> GroupModel:
        """H as a one-axis group model with its own Haar normalization."""
        return GroupModel((SubgroupAxis(self.parent.orders, self.elements, _dual_reps(self)),))

    def add(self, a, b):
        return tuple((x + y) % n for x, y, n in zip(a, b, self.parent.orders))


def _require_cyclic(g):
    g = make_group(g)
    if not all(isinstance(a, Cyclic) and not a.dual for a in g.axes):
        raise DomainError(f"{g} must be a finite model built from primal cyclic factors")
    return g


def subgroup(g, generators=()) -> SubgroupDecomposition:
    """Subgroup generated by ``generators`` and its coset decomposition."""
    g = _require_cyclic(g)
    orders = g.orders
    gens = [tuple(int(c) % n for c, n in zip(_as_point(g, x), orders)) for x in generators]
    zero = tuple(0 for _ in orders)
    elems = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for e in frontier:
            for s in gens:
                h = tuple((a + b) % n for a, b, n in zip(e, s, orders))
                if h not in elems:
                    elems.add(h)
                    nxt.append(h)
        frontier = nxt
    elements = tuple(sorted(elems))
    reps, seen = [], set()
    for pt in g.points():
        if pt in seen:
            continue
        reps.append(pt)
        seen.update(tuple((a + b) % n for a, b, n in zip(pt, h, orders)) for h in elements)
    return SubgroupDecomposition(g, elements, tuple(reps))


def annihilator(g, H: SubgroupDecomposition) -> list:
    """Dual points trivial on every element of H."""
    g = _require_cyclic(g)
    dual = dual_group(g)
    out = []
    for chi in dual.points():
        if all(abs(pair(g, h, chi) - 1) < 1e-9 for h in H.elements):
            out.append(chi)
    return out


def _dual_reps(H):
    """One parent character per coset of H^perp, smallest first."""
    g = H.parent
    orders = g.orders
    seen, reps = set(), []
    ann = H.annihilator
    for chi in dual_group(g).points():
        if chi in seen:
            continue
        reps.append(chi)
        seen.update(tuple((a + b) % n for a, b, n in zip(chi, z, orders)) for z in ann)
    return tuple(reps)


# --------------------------------------------------------------------------
# group-spec mini-language
# --------------------------------------------------------------------------

_FACTOR_PATTERNS = [
    (re.compile(r"Z(\d+)(')?$"), lambda m: Cyclic(int(m[1]), bool(m[2]))),
    (re.compile(r"Zlat\[(\d+)\]$"), lambda m: Lattice(int(m[1]))),
    (re.compile(r"T\[(\d+)\]$"), lambda m: Torus(int(m[1]))),
    (
        re.compile(r"R\[\s*delta\s*=\s*([^,\]\s]+)\s*,\s*M\s*=\s*(\d+)\s*\](')?$"),
        lambda m: RealGrid(float(m[1]), int(m[2]), bool(m[3])),
    ),
]


def _split_factors(text):
    """Split on ``x`` at bracket depth zero, returning (start, factor) pairs."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
            if depth < 0:
                raise GroupSpecError(text, i, "unbalanced bracket")
        elif ch == "x" and depth == 0:
            parts.append((start, text[start:i]))
            start = i + 1
    if depth != 0:
        raise GroupSpecError(text, len(text), "unclosed bracket")
    parts.append((start, text[start:]))
    return parts


def parse_group(text: str) -> GroupModel:
    """Parse the group-spec grammar, e.g. ``"Z4 x Z2 x R[delta=0.25,M=32]"``.

    Factors: ``Z<n>``, ``Zlat[<N>]``, ``T[<res>]``, ``R[delta=<d>,M=<m>]``
    and ``H[<parent>:<element>;...]`` for an explicit subgroup, joined by
    ``x``.  A trailing ``'`` marks a dual axis.
    """
    if not text or not text.strip():
        raise GroupSpecError(text or "", 0, "empty group spec")
    axes = []
    for start, raw in _split_factors(text):
        lead = len(raw) - len(raw.lstrip())
        pos = start + lead
        token = raw.strip()
        if not token:
            raise GroupSpecError(text, pos, "missing factor")
        if token.startswith("H["):
            axes.append(_parse_subgroup_axis(text, pos, token))
            continue
        for pattern, build in _FACTOR_PATTERNS:
            m = pattern.match(token)
            if m:
                try:
                    axes.append(build(m))
                except ValidationError as exc:
                    raise GroupSpecError(text, pos, str(exc)) from None
                break
        else:
            raise GroupSpecError(text, pos, f"unrecognized factor {token!r}")
    return GroupModel(tuple(axes))


def _parse_subgroup_axis(text, pos, token):
    dual = token.endswith("'")
    body = token[2:-2] if dual else token[2:-1]
    if ":" not in body or not token.rstrip("'").endswith("]"):
        raise GroupSpecError(text, pos, "subgroup factor must read H[<parent>:<elements>]")
    parent_text, elems_text = body.split(":", 1)
    parent = _require_cyclic(parse_group(parent_text))
    elems = [tuple(int(v) for v in e.strip().strip("()").split(",")) for e in elems_text.split(";")]
    dec = subgroup(parent, elems)
    if len(dec.elements) != len(elems):
        raise GroupSpecError(text, pos, "element list is not closed under addition")
    ax = dec.model.axes[0]
    return ax.dual_axis() if dual else ax


def parse_points(text: str, g: GroupModel) -> list:
    """Parse ``"2"`` or ``"1,0;0,1"`` into a list of points of ``g``."""
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if not chunk:
            continue
        try:
            pt = tuple(int(v) for v in chunk.split(","))
        except ValueError:
            raise GroupSpecError(text, text.find(chunk), f"bad point {chunk!r}") from None
        g.check_point(pt if len(pt) > 1 else pt[0])
        pts.append(pt)
    return pts
