"""Fourier-type ratios and lower-bound estimation of the Fourier-type norm.

For an operator ``T: X -> Y`` and a witness ``f`` on a group model G the
ratio is ``||[F^G, T] f||_{p'} / ||f||_p``.  Its supremum over witnesses is
the Fourier-type norm; :func:`estimate_constant` approaches it from below
by multi-restart ascent on ``log ratio`` over the witness coefficients.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import quadrature
from .exceptions import CapabilityError, DomainError, NumericError
from .functions import (
    DEFAULT_TOL,
    NormResult,
    OperatorSpec,
    VecFunction,
    conjugate_exponent,
    lp_norm,
    vector_norm,
)
from .groups import (
    Cyclic,
    GroupModel,
    Lattice,
    RealGrid,
    SubgroupAxis,
    dual_group,
    haar_weight,
    make_group,
    pair,
)
from .transform import tensor_transform

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 32
DEFAULT_MAX_ITER = 500
MAX_DEFAULT_SUPPORT = 64
RANDOM_SUPPORT = 16


def _check_p(p):
    p = float(p)
    if not (1 < p <= 2):
        raise DomainError(f"p must satisfy 1 < p ≤ 2, got {p}")
    return p


def ratio(g, T: OperatorSpec, p: float, f: VecFunction, tol: float = DEFAULT_TOL) -> NormResult:
    """``||[F^G,T] f||_{p'} / ||f||_p`` with a propagated error bound."""
    p = _check_p(p)
    g = make_group(g)
    if f.space != T.domain:
        raise DomainError(f"witness space {f.space} does not match operator domain {T.domain}")
    if f.is_zero:
        raise DomainError("ratio undefined at zero")
    pc = conjugate_exponent(p)
    den = lp_norm(f, p, tol=tol)
    num = lp_norm(tensor_transform(g, T, f), pc, tol=tol)
    if den.value <= den.error:
        raise NumericError("witness norm is below its own error bound")
    r = num.value / den.value
    err = (num.error + r * den.error) / (den.value - den.error)
    return NormResult(r, err)


# --------------------------------------------------------------------------
# sampled objective
# --------------------------------------------------------------------------


def _lattice_nodes(span):
    R = max(64, 8 * (int(span) + 1))
    return -math.pi + (np.arange(R) + 0.5) * (2 * math.pi / R), R


class Sampler:
    """Dense form of ``f -> [F^G,T] f`` on a fixed support.

    ``A`` maps support coefficients to spectral values on a set of dual
    nodes with weights ``w``; primal atoms carry weights ``wp``.  On finite
    models the nodes are the dual points and the objective is exact.  On
    lattice and step axes the nodes form a midpoint rule on ``[-pi, pi]``
    (with the periodized sinc kernel for step axes).
    """

    def __init__(self, g, T: OperatorSpec, p: float, support):
        g = make_group(g)
        self.g, self.T, self.p = g, T, float(p)
        self.pc = conjugate_exponent(self.p)
        self.support = np.array(support, dtype=np.int64).reshape(-1, g.ndim)
        K = len(self.support)
        A = np.ones((1, K), dtype=complex)
        w = np.ones(1)
        wp = 1.0
        for k, ax in enumerate(g.axes):
            col = self.support[:, k]
            if isinstance(ax, (Cyclic, SubgroupAxis)):
                mat = ax.dft_matrix()[:, col]
                wk = np.full(mat.shape[0], ax.dual_axis().point_weight())
            elif isinstance(ax, Lattice) or (isinstance(ax, RealGrid) and not ax.dual):
                u, R = _lattice_nodes(col.max() - col.min() if K else 0)
                mat = np.exp(1j * np.outer(u, col))
                if isinstance(ax, Lattice):
                    wk = np.full(R, 1.0 / R)
                else:
                    wk = ax.delta ** (self.pc - 1) * quadrature.sinc_periodization(u / 2, self.pc) / R
            else:
                raise CapabilityError(f"ascent is not available on axis {ax}; use a point-valued model")
            wp *= ax.point_weight()
            A = (A[:, None, :] * mat[None, :, :]).reshape(-1, K)
            w = (w[:, None] * wk[None, :]).reshape(-1)
        self.A, self.w, self.wp = A, w, wp
        self.qx, self.qy = T.domain.q, T.codomain.q

    def log_ratio(self, C):
        V = self.A @ C @ self.T.matrix.T
        N = float(self.w @ vector_norm(V, self.qy) ** self.pc)
        D = self.wp * float(np.sum(vector_norm(C, self.qx) ** self.p))
        if D == 0:
            raise DomainError("ratio undefined at zero")
        if N == 0:
            return -math.inf
        return math.log(N) / self.pc - math.log(D) / self.p

    def value_and_grad(self, C):
        """``(L, dL)`` with ``dL = dL/dRe + i dL/dIm`` of shape ``C.shape``."""
        M = self.T.matrix
        V = self.A @ C @ M.T
        nv = vector_norm(V, self.qy)
        N = float(self.w @ nv**self.pc)
        nc = vector_norm(C, self.qx)
        D = self.wp * float(np.sum(nc**self.p))
        if D == 0:
            raise DomainError("ratio undefined at zero")
        if N == 0:
            return -math.inf, np.zeros_like(C)
        GV = _norm_power_grad(V, nv, self.qy, self.pc) * self.w[:, None]
        Gnum = self.A.conj().T @ GV @ M.conj()
        Gden = self.wp * _norm_power_grad(C, nc, self.qx, self.p)
        L = math.log(N) / self.pc - math.log(D) / self.p
        return L, Gnum / (self.pc * N) - Gden / (self.p * D)


def _norm_power_grad(V, nv, q, r):
    """Complex gradient of ``||v||_q^r`` row-wise, set to 0 at ``v = 0``."""
    a = np.abs(V)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(nv > 0, nv ** (r - q), 0.0)
        inner = np.where(a > 0, a ** (q - 2) * V, 0.0)
    return r * scale[:, None] * inner


def _check_smooth(T):
    for name, s in (("domain", T.domain), ("codomain", T.codomain)):
        if not (1 < s.q < math.inf):
            raise CapabilityError(
                f"{name} exponent q = {s.q} is not smooth; use brute_force_constant for q in {{1, inf}}"
            )


def ratio_gradient(g, T: OperatorSpec, p: float, f: VecFunction) -> np.ndarray:
    """Gradient of ``log ratio`` in the real and imaginary parts of each coefficient.

    Returns an array of shape ``(support, dim_X, 2)``.  On point-valued
    finite models the objective is exact; elsewhere it is the sampled
    objective of :class:`Sampler`.
    """
    p = _check_p(p)
    _check_smooth(T)
    if f.is_zero:
        raise DomainError("ratio undefined at zero")
    s = Sampler(g, T, p, f.points)
    _, G = s.value_and_grad(np.array(f.values))
    return np.stack([G.real, G.imag], axis=-1)


def dual_operator(T: OperatorSpec) -> OperatorSpec:
    """Conjugate transpose between the dual spaces."""
    return OperatorSpec(T.matrix.conj().T, T.codomain.dual(), T.domain.dual())


# --------------------------------------------------------------------------
# ascent
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    lower_bound: float
    witness: VecFunction
    p: float
    restarts: int
    trace: tuple
    error: float = 0.0
    config: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "bound": float(self.lower_bound),
            "p": float(self.p),
            "restarts": int(self.restarts),
            "error": float(self.error),
            "config": dict(self.config),
            "witness": self.witness.to_json(),
            "trace": [{"ratio": float(r), "iterations": int(it)} for r, it in self.trace],
        }


def _ascend(sampler, C0, max_iter, tol, step):
    C0 = np.array(C0, dtype=complex)
    shape = C0.shape
    D = sampler.wp * float(np.sum(vector_norm(C0, sampler.qx) ** sampler.p))
    C0 = C0 / D ** (1.0 / sampler.p)
    if step == "backtracking":
        return _backtracking(sampler, C0, max_iter, tol)

    def fun(x):
        C = (x[: x.size // 2] + 1j * x[x.size // 2:]).reshape(shape)
        L, G = sampler.value_and_grad(C)
        if not math.isfinite(L):
            return 1e300, np.zeros_like(x)
        return -L, -np.concatenate([G.real.ravel(), G.imag.ravel()])

    x0 = np.concatenate([C0.real.ravel(), C0.imag.ravel()])
    res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iter, "ftol": tol * 1e-2, "gtol": 1e-12, "maxcor": 20})
    C = (res.x[: res.x.size // 2] + 1j * res.x[res.x.size // 2:]).reshape(shape)
    if not np.any(C):
        C = C0
    return C, int(res.nit)


def _backtracking(sampler, C, max_iter, tol, c1=1e-4):
    L, G = sampler.value_and_grad(C)
    t = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        g2 = float(np.sum(np.abs(G) ** 2))
        if g2 == 0:
            break
        while True:
            Cn = C + t * G
            Ln, Gn = sampler.value_and_grad(Cn)
            if Ln >= L + c1 * t * g2 or t < 1e-16:
                break
            t *= 0.5
        if t < 1e-16:
            break
        # renormalize: L is scale-free, its gradient scales inversely
        s = (sampler.wp * float(np.sum(vector_norm(Cn, sampler.qx) ** sampler.p))) ** (1.0 / sampler.p)
        C, G = Cn / s, Gn * s
        done = abs(math.expm1(Ln - L)) < tol
        L = Ln
        t *= 2.0
        if done:
            break
    return C, it


def _default_support(g, support_size, rng):
    ranges = [ax.index_range() for ax in g.axes]
    sizes = [hi - lo + 1 for lo, hi in ranges]
    total = math.prod(sizes)
    if support_size is None and total <= MAX_DEFAULT_SUPPORT:
        support_size = total
    support_size = min(support_size or RANDOM_SUPPORT, total)
    if support_size == total:
        flat = np.arange(total)
    else:
        flat = np.sort(rng.choice(total, size=support_size, replace=False))
    return np.stack(np.unravel_index(flat, sizes), axis=1) + np.array([lo for lo, _ in ranges])


def _origin_index(support):
    hits = np.flatnonzero(~np.any(support, axis=1))
    return int(hits[0]) if len(hits) else 0


def _threads(n_jobs):
    cap = os.environ.get("LFT_THREADS")
    n = 1 if n_jobs is None else int(n_jobs)
    if n < 0:
        n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def estimate_constant(g, T: OperatorSpec, p: float, restarts: int = DEFAULT_RESTARTS,
                      max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL, support=None,
                      support_size: int | None = None, seed: int = 0, init=None,
                      structured: bool = True, grow_support: bool = False, step: str = "lbfgs",
                      n_jobs: int | None = None) -> Estimate:
    """Lower bound for the Fourier-type norm of ``T`` on ``g``.

    Restart 0 is the structured start ``delta_0 (x) v`` with ``v`` the top
    right singular vector of ``T``; restart ``i >= 1`` draws its start from
    the ``i``-th child of ``SeedSequence(seed)``, so a longer run repeats
    every start of a shorter one and never reports a smaller bound.
    Witnesses passed in ``init`` are used as extra warm starts.  The
    returned bound is the certified ratio of the best witness.
    """
    p = _check_p(p)
    g = make_group(g)
    _check_smooth(T)
    if restarts < 1:
        raise DomainError("restarts must be ≥ 1")
    if step not in ("lbfgs", "backtracking"):
        raise DomainError(f"unknown step rule {step!r}")
    config = {
        "group": str(g), "restarts": int(restarts), "max_iter": int(max_iter), "tol": float(tol),
        "support_size": support_size, "seed": int(seed), "structured": bool(structured),
        "grow_support": bool(grow_support), "step": step,
    }
    origin = np.zeros((1, g.ndim), dtype=np.int64)
    if T.is_zero:
        w = VecFunction(g, T.domain, origin, np.eye(T.domain.dim)[:1])
        return Estimate(0.0, w, p, 1, ((0.0, 0),), 0.0, config)

    children = np.random.SeedSequence(int(seed)).spawn(restarts)
    shared = None
    if support is not None:
        shared = np.array(support, dtype=np.int64).reshape(-1, g.ndim)
    elif math.prod(ax.size for ax in g.axes) <= MAX_DEFAULT_SUPPORT and support_size is None:
        shared = _default_support(g, None, None)

    def start(i):
        dimx = T.domain.dim
        if i == 0 and structured:
            supp = shared if shared is not None else origin
            C = np.zeros((len(supp), dimx), dtype=complex)
            v = np.linalg.svd(T.matrix)[2][0].conj()
            C[_origin_index(supp)] = v
            return supp, C
        rng = np.random.default_rng(children[i])
        supp = shared if shared is not None else _default_support(g, support_size, rng)
        C = (rng.standard_normal((len(supp), dimx)) + 1j * rng.standard_normal((len(supp), dimx))) / math.sqrt(2)
        return supp, C

    jobs = [start(i) for i in range(restarts)]
    for w in init or ():
        if w.model != g or w.space != T.domain:
            raise DomainError("warm-start witness does not match the group or operator domain")
        if not w.is_zero:
            jobs.append((np.array(w.points), np.array(w.values)))

    def run(job):
        supp, C0 = job
        s = Sampler(g, T, p, supp)
        C, it = _ascend(s, C0, max_iter, tol, step)
        return supp, C, it, math.exp(s.log_ratio(C))

    n = _threads(n_jobs)
    if n > 1:
        with ThreadPoolExecutor(n) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    best = max(range(len(results)), key=lambda i: (results[i][3], -i))
    supp, C, _, _ = results[best]
    witness = VecFunction(g, T.domain, supp, C)
    certified = ratio(g, T, p, witness, tol=tol)
    trace = tuple((float(r[3]), int(r[2])) for r in results)
    est = Estimate(certified.value, witness, p, restarts, trace, certified.error, config)

    if grow_support and shared is None and support is None:
        total = math.prod(ax.size for ax in g.axes)
        size = support_size or RANDOM_SUPPORT
        while size < total:
            size = min(2 * size, total)
            nxt = estimate_constant(g, T, p, restarts, max_iter, tol, None, size, seed, init,
                                    structured, False, step, n_jobs)
            if nxt.lower_bound <= est.lower_bound * (1 + tol):
                break
            est = nxt
        est = Estimate(est.lower_bound, est.witness, p, restarts, est.trace, est.error, config)
    return est


# --------------------------------------------------------------------------
# brute force
# --------------------------------------------------------------------------


GRID_POINTS = 200_000


def _dense_problem(g, T, p, support):
    dual = dual_group(g)
    ys = dual.points()
    A = np.array([[pair(g, s, y) * haar_weight(g, s) for s in support] for y in ys], dtype=complex)
    wy = np.array([haar_weight(dual, y) for y in ys])
    ws = np.array([haar_weight(g, s) for s in support])
    return A, wy, ws


def _sphere_to_coeffs(theta, phi):
    """Map magnitude angles ``(B, d-1)`` and phases ``(B, d-1)`` to ``(B, d)`` complex vectors."""
    B, m = theta.shape
    mags = np.ones((B, m + 1))
    for i in range(m):
        mags[:, i] *= np.cos(theta[:, i])
        mags[:, i + 1:] *= np.sin(theta[:, i])[:, None]
    phases = np.concatenate([np.zeros((B, 1)), phi], axis=1)
    return mags * np.exp(1j * phases)


def brute_force_constant(g, T: OperatorSpec, p: float, support=None, cap: int = 6,
                         grid_points: int = GRID_POINTS, return_resolution: bool = False):
    """Grid search for the supremum of the ratio on a finite model.

    The coefficient space modulo scale and global phase is searched with
    hyperspherical magnitudes and relative phases, followed by a pattern
    search around the best grid points.  The dense transform is built from
    :func:`pair` and :func:`haar_weight`, independently of :func:`fourier`.
    ``resolution`` is the gain of the final refinement step.
    """
    p = _check_p(p)
    g = make_group(g)
    if not g.is_finite:
        raise CapabilityError("brute force needs a finite model")
    support = g.points() if support is None else [tuple(np.atleast_1d(s)) for s in support]
    d = T.domain.dim * len(support)
    if 2 * d > cap:
        raise CapabilityError(f"search dimension {2 * d} exceeds the cap {cap}")
    if T.is_zero:
        return (0.0, 0.0) if return_resolution else 0.0
    pc = conjugate_exponent(p)
    A, wy, ws = _dense_problem(g, T, p, support)
    M = T.matrix
    K, dimx = len(support), T.domain.dim

    def evaluate(theta, phi):
        z = _sphere_to_coeffs(theta, phi).reshape(-1, K, dimx)
        V = np.einsum("yk,bkx,jx->byj", A, z, M)
        num = (np.sum(wy * vector_norm(V, T.codomain.q) ** pc, axis=1)) ** (1 / pc)
        den = (np.sum(ws * vector_norm(z, T.domain.q) ** p, axis=1)) ** (1 / p)
        return num / den

    m = d - 1
    if m == 0:
        r = float(evaluate(np.zeros((1, 0)), np.zeros((1, 0)))[0])
        return (r, 0.0) if return_resolution else r
    P = 2 * m
    per = max(3, int(grid_points ** (1.0 / P)))
    th = (np.arange(per) + 0.5) * (math.pi / 2) / per
    ph = np.arange(per) * (2 * math.pi) / per
    axes = [th] * m + [ph] * m
    grid = np.array(list(itertools.product(*axes)))
    vals = np.concatenate([evaluate(c[:, :m], c[:, m:]) for c in np.array_split(grid, max(1, len(grid) // 20000))])
    top = np.argsort(-vals, kind="stable")[:8]
    steps0 = np.array([th[1] - th[0]] * m + [ph[1] - ph[0]] * m)
    moves = np.array(list(itertools.product((-1, 0, 1), repeat=P)), dtype=float)
    best, resolution = -1.0, math.inf
    for i in top:
        x = grid[i].copy()
        fx = float(vals[i])
        h = steps0.copy()
        last_gain = math.inf
        for _ in range(20000):
            if h.max() <= 1e-12:
                break
            cand = x + moves * h
            cand[:, :m] = np.clip(cand[:, :m], 0.0, math.pi / 2)
            fv = evaluate(cand[:, :m], cand[:, m:])
            j = int(np.argmax(fv))
            if fv[j] > fx:
                last_gain = float(fv[j] - fx)
                x, fx = cand[j], float(fv[j])
            else:
                h = h / 2
        if fx > best:
            best, resolution = fx, (0.0 if last_gain is math.inf else last_gain)
    return (best, resolution) if return_resolution else best


__all__ = [
    "ratio", "ratio_gradient", "Sampler", "Estimate", "estimate_constant", "dual_operator",
    "brute_force_constant",
]
