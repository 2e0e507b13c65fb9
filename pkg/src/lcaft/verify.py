"""Executable checks of the transfer inequalities and identities.

Every check collects ``(lhs, rhs, budget)`` triples, one per witness and
part.  A triple holds when ``lhs <= rhs + budget``; its slack is
``rhs - lhs + budget``.  A report passes iff every triple holds, and its
``margin`` is the worst slack minus the largest budget, so a failing report
always has ``margin < -budget``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .functions import (
    BanachSpec,
    OperatorSpec,
    apply_operator,
    VecFunction,
    conjugate_exponent,
    delta_function,
    lp_norm,
    random_function,
)
from .ftype import dual_operator, estimate_constant, ratio
from .groups import GroupModel, Lattice, SubgroupDecomposition, dual_group, make_group, subgroup
from .transform import (
    embed_axis,
    fourier,
    grid_discretize,
    interleave,
    interleave_family,
    make_interleaving,
    step_extension,
    tensor_transform,
    weil_decompose,
    weil_sides,
    zero_extend,
)

EPS = np.finfo(float).eps
N_RANDOM = 20


@dataclass
class CheckReport:
    id: str
    params: dict
    verdict: str
    margin: float
    witnesses: int
    budget: float
    failures: list = field(default_factory=list)
    parts: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_json(self):
        out = {
            "id": self.id,
            "params": self.params,
            "verdict": self.verdict,
            "margin": _finite(self.margin),
            "witnesses": int(self.witnesses),
            "budget": _finite(self.budget),
            "failures": self.failures,
            "parts": self.parts,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        if self.extra:
            out["extra"] = self.extra
        return out


def _finite(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


class _Ledger:
    """Accumulates per-witness comparisons for one check."""

    def __init__(self, check_id, params):
        self.id = check_id
        self.params = params
        self.rows = []
        self.skipped = []
        self.extra = {}

    def le(self, part, lhs, rhs, budget, witness=None):
        slack = float(rhs) - float(lhs) + float(budget)
        self.rows.append((part, float(lhs), float(rhs), float(budget), slack, witness))

    def eq(self, part, a, b, budget, witness=None):
        self.le(part, abs(float(a) - float(b)), 0.0, budget, witness)

    def report(self):
        parts = {}
        for part in dict.fromkeys(r[0] for r in self.rows):
            rows = [r for r in self.rows if r[0] == part]
            B = max(r[3] for r in rows)
            m = min(r[4] for r in rows) - B
            parts[part] = {
                "verdict": "pass" if all(r[4] >= 0 for r in rows) else "fail",
                "margin": _finite(m),
                "budget": B,
                "witnesses": len(rows),
            }
        if self.rows:
            B = max(r[3] for r in self.rows)
            margin = min(r[4] for r in self.rows) - B
        else:
            B, margin = 0.0, 0.0
        failures = []
        for part, lhs, rhs, budget, slack, w in self.rows:
            if slack < 0:
                failures.append({
                    "part": part, "lhs": lhs, "rhs": rhs, "budget": budget,
                    "witness": w.to_json() if isinstance(w, VecFunction) else w,
                })
        verdict = "pass" if not failures else "fail"
        return CheckReport(self.id, self.params, verdict, margin, len(self.rows), B, failures, parts,
                           self.skipped, self.extra)


def _op_params(T):
    return {"matrix": T.to_json()["matrix"], "q_domain": T.domain.q, "q_codomain": T.codomain.q}


def _battery(model, space, seeds, support_size, extra=()):
    """Seeded random witnesses followed by structured ones."""
    model = make_group(model)
    total = math.prod(a.size for a in model.axes)
    k = min(support_size, total)
    out = [random_function(model, k, space, seed=int(s)) for s in seeds]
    out.extend(extra)
    return out


def _top_vector(T):
    return np.linalg.svd(T.matrix)[2][0].conj()


# --------------------------------------------------------------------------
# sinc sum
# --------------------------------------------------------------------------


def sinc_sum_bound(pc, s, N=1000):
    """``(partial, tail)``: the sum over ``|n| <= N`` and a bound on the rest.

    The tail terms ``|sin s|^r |s - n pi|^-r`` are convex in ``n`` beyond
    the sample, so each is at most its integral over ``[n - 1/2, n + 1/2]``.
    """
    n = np.arange(-N, N + 1)
    sn = abs(math.sin(s))
    partial = float(np.sum((sn / np.abs(s - n * math.pi)) ** pc))
    right = (N + 0.5) * math.pi - s
    left = (N + 0.5) * math.pi + s
    if right <= 0 or left <= 0:
        raise DomainError("sample lies beyond the truncation window")
    tail = sn**pc * (right ** (1 - pc) + left ** (1 - pc)) / (math.pi * (pc - 1))
    return partial, float(tail)


def default_sinc_samples(count=50, seed=0):
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(0.0, 4 * math.pi, count))


def check_sinc_sum(pc: float, samples=None, N: int = 1000, tol: float = 1e-9) -> CheckReport:
    """Partial sum plus tail bound of ``sum_n |sin s/(s - n pi)|^p'`` against 1.

    At ``p' = 2`` the sum equals 1 identically, and that equality is checked
    as a second part.
    """
    pc = float(pc)
    if pc < 2:
        raise DomainError(f"p' must be ≥ 2, got {pc}")
    samples = default_sinc_samples() if samples is None else np.asarray(samples, dtype=float)
    led = _Ledger("sinc_sum", {"p_conj": pc, "N": N, "tol": tol, "samples": len(samples)})
    for s in samples:
        if abs(s - math.pi * round(s / math.pi)) < 1e-8:
            led.skipped.append(float(s))
            continue
        partial, tail = sinc_sum_bound(pc, s, N)
        led.le("bound", partial + tail, 1.0, tol, witness={"s": float(s)})
        if pc == 2:
            led.eq("equality", partial + tail, 1.0, tol, witness={"s": float(s)})
    return led.report()


# --------------------------------------------------------------------------
# Z x G  vs  R x G
# --------------------------------------------------------------------------


def _with_lattice(G, N, count=1):
    axes = (Lattice(N),) * count
    if G is None:
        return GroupModel(axes)
    return GroupModel(axes + make_group(G).axes)


def check_eqrz(G, T: OperatorSpec, p: float, seeds=range(N_RANDOM), N: int = 4, support_size: int = 6,
               deltas=(1.0, 0.5), tol: float = 1e-9, restarts: int = 8, seed: int = 0) -> CheckReport:
    """Step-function transport between ``Z x G`` and ``R x G``.

    Part ``a``: ``ratio_ZxG(f) <= (pi/2) ratio_RxG(step f)`` per witness.
    Part ``b_witness``: ``ratio_RxG(h) <= ratio_ZxG(cells of h)`` per step
    witness ``h``.  Part ``b``: ``ratio_RxG(h) <= estimate(Z x G)``.
    """
    p = float(p)
    model = _with_lattice(G, N)
    space = T.domain
    pts0 = np.zeros((1, model.ndim), dtype=np.int64)
    structured = [delta_function(model, space), VecFunction(model, space, pts0, _top_vector(T)[None, :])]
    wits = _battery(model, space, seeds, support_size, structured)
    led = _Ledger("eqrz", {"group": str(model), "p": p, "operator": _op_params(T), "N": N,
                           "deltas": list(deltas), "tol": tol, "seeds": list(map(int, seeds))})
    half_pi = math.pi / 2
    for f in wits:
        rz = ratio(model, T, p, f, tol=tol)
        step = step_extension(f, 1.0)
        rr = ratio(step.model, T, p, step, tol=tol)
        led.le("a", rz.value, half_pi * rr.value, rz.error + half_pi * rr.error + 10 * EPS * rz.value, f)

    steps = []
    for i, f in enumerate(wits):
        h = step_extension(f, deltas[i % len(deltas)])
        rh = ratio(h.model, T, p, h, tol=tol)
        cells = grid_discretize(h)
        rc = ratio(cells.model, T, p, cells, tol=tol)
        led.le("b_witness", rh.value, rc.value, rh.error + rc.error + 10 * EPS * rc.value, h)
        steps.append((h, rh, cells))

    est = estimate_constant(model, T, p, restarts=restarts, tol=tol, seed=seed,
                            init=[c for _, _, c in steps])
    for h, rh, _ in steps:
        led.le("b", rh.value, est.lower_bound, rh.error + est.error + 2 * tol * est.lower_bound, h)
    led.extra["estimate"] = est.lower_bound
    return led.report()


# --------------------------------------------------------------------------
# Z^2 x G  vs  Z x G
# --------------------------------------------------------------------------


def _power_integral(F, pc, tol):
    r = lp_norm(F, pc, tol=tol)
    v = r.value**pc
    return v, pc * r.value ** (pc - 1) * r.error if r.error else 0.0


def check_zng(G, T: OperatorSpec, p: float, seeds=range(10), N: int = 2, support_size: int = 5,
              s2_samples: int = 3, tol: float = 1e-7, quad_tol: float = 1e-10) -> CheckReport:
    """Interleaving ``Z^2 x G -> Z x G``.

    Part ``a``: p-norms agree under interleaving.  Part ``b``: the p'-th
    power of the ``Z^2 x G`` spectrum norm equals the average over ``s2``
    of the interleaved ``Z x G`` one, within ``tol`` relative.  Part ``c``:
    a ``Z x G`` witness pinned to ``l2 = 0`` keeps its ratio, also within
    ``tol`` relative on top of the quadrature estimates.
    """
    p = float(p)
    pc = conjugate_exponent(p)
    model2 = _with_lattice(G, N, 2)
    model1 = _with_lattice(G, N, 1)
    space = T.domain
    wits = _battery(model2, space, seeds, support_size, [delta_function(model2, space)])
    led = _Ledger("zng", {"group": str(model2), "p": p, "operator": _op_params(T), "tol": tol,
                          "quad_tol": quad_tol, "seeds": list(map(int, seeds))})
    rng = np.random.default_rng(12345)
    worst = 0.0
    for f in wits:
        plan = make_interleaving(f)
        nf = lp_norm(f, p).value
        for s2 in rng.uniform(-math.pi, math.pi, s2_samples):
            ni = lp_norm(interleave(f, plan, s2), p).value
            led.eq("a", nf, ni, 1e-12 * nf, f)

        lhs, lhs_err = _power_integral(tensor_transform(model2, T, f), pc, quad_tol)
        fam = apply_operator(T, interleave_family(f, plan))
        scale = float(np.abs(fam.values).max(initial=1.0))
        for s2 in rng.uniform(-math.pi, math.pi, s2_samples):
            direct = apply_operator(T, interleave(f, plan, s2)).as_dict()
            sliced = {tuple(int(c) for c in pt[1:]): v * np.exp(1j * s2 * pt[0])
                      for pt, v in zip(fam.points, fam.values)}
            gap = max(float(np.abs(direct.get(k, 0) - sliced.get(k, 0)).max())
                      for k in set(direct) | set(sliced))
            led.eq("slice", 0.0, gap, 10 * EPS * scale, f)
        spectrum = fourier(fam.model, fam, axes=range(1, fam.model.ndim))
        rhs, rhs_err = _power_integral(spectrum, pc, quad_tol)
        # the torus axis already carries ds2 / (2 pi)
        budget = tol * max(abs(lhs), abs(rhs)) + lhs_err + rhs_err
        led.eq("b", lhs, rhs, budget, f)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    led.extra["max_rel_discrepancy_b"] = worst

    for s in seeds:
        f1 = random_function(model1, min(support_size, math.prod(a.size for a in model1.axes)), space, seed=int(s))
        pinned = embed_axis(f1, 1, Lattice(N))
        r1 = ratio(model1, T, p, f1, tol=quad_tol)
        r2 = ratio(model2, T, p, pinned, tol=quad_tol)
        led.eq("c", r1.value, r2.value, r1.error + r2.error + tol * max(r1.value, r2.value), f1)
    return led.report()


# --------------------------------------------------------------------------
# subgroups
# --------------------------------------------------------------------------


def _as_subgroup(G, H):
    G = make_group(G)
    if isinstance(H, SubgroupDecomposition):
        return G, H
    return G, subgroup(G, H or ())


def _sandwich(G, H, T, p, restarts, tol, seed, rounds=3):
    """Estimates on H and G, each warm-started from the other's best witness."""
    eh = estimate_constant(H.model, T, p, restarts=restarts, tol=tol, seed=seed)
    eg = estimate_constant(G, T, p, restarts=restarts, tol=tol, seed=seed, init=[zero_extend(eh.witness, H)])
    for _ in range(rounds):
        pieces = [w for w in weil_decompose(eg.witness, H) if not w.is_zero]
        eh2 = estimate_constant(H.model, T, p, restarts=restarts, tol=tol, seed=seed, init=[eh.witness] + pieces)
        eg2 = estimate_constant(G, T, p, restarts=restarts, tol=tol, seed=seed,
                                init=[eg.witness, zero_extend(eh2.witness, H)])
        stable = eh2.lower_bound <= eh.lower_bound * (1 + tol) and eg2.lower_bound <= eg.lower_bound * (1 + tol)
        eh = eh2 if eh2.lower_bound >= eh.lower_bound else eh
        eg = eg2 if eg2.lower_bound >= eg.lower_bound else eg
        if stable:
            break
    return eh, eg


def _subgroup_witness_part(led, G, H, T, p, seeds, support_size, tol):
    space = T.domain
    Hm = H.model
    structured = [delta_function(Hm, space, _top_vector(T))]
    for f in _battery(Hm, space, seeds, support_size, structured):
        rh = ratio(Hm, T, p, f).value
        rg = ratio(G, T, p, zero_extend(f, H)).value
        led.eq("witness", rh, rg, tol * max(rh, 1.0), f)


def check_open_subgroup(G, H, T: OperatorSpec, p: float, seeds=range(N_RANDOM), support_size: int = 4,
                        tol: float = 1e-10, est_tol: float = 1e-6, restarts: int = 32, seed: int = 0,
                        estimates: bool = True) -> CheckReport:
    """Zero extension from H keeps the ratio, so ``estimate(H) <= estimate(G)``."""
    G, H = _as_subgroup(G, H)
    p = float(p)
    led = _Ledger("open_subgroup", {"group": str(G), "subgroup": [list(e) for e in H.elements], "p": p,
                                    "operator": _op_params(T), "tol": tol, "est_tol": est_tol,
                                    "seeds": list(map(int, seeds))})
    _subgroup_witness_part(led, G, H, T, p, seeds, support_size, tol)
    if estimates:
        eh, eg = _sandwich(G, H, T, p, restarts, 1e-9, seed)
        led.le("estimate", eh.lower_bound, eg.lower_bound, est_tol * max(eg.lower_bound, 1e-300))
        led.extra.update({"estimate_H": eh.lower_bound, "estimate_G": eg.lower_bound})
    return led.report()


def check_fcc(G, H, T: OperatorSpec, p: float, seeds=range(N_RANDOM), support_size: int = 4,
              tol: float = 1e-4, restarts: int = 32, seed: int = 0) -> CheckReport:
    """Finite-index sandwich ``F_H <= F_G <= n^(1/p') F_H``.

    Part ``witness``: zero extension keeps ratios (lower side, per witness).
    Part ``coset``: ``||[F^G,T] f|| <= n^(1/p') max_i ratio_H(f_i) ||f||_p``
    per witness on G, with ``f_i`` the coset pieces.  Parts ``lower`` and
    ``upper``: the same sandwich on estimates, ``tol`` relative.
    """
    G, H = _as_subgroup(G, H)
    p = float(p)
    pc = conjugate_exponent(p)
    n = H.index
    factor = n ** (1.0 / pc)
    space = T.domain
    led = _Ledger("fcc", {"group": str(G), "subgroup": [list(e) for e in H.elements], "index": n, "p": p,
                          "operator": _op_params(T), "tol": tol, "seeds": list(map(int, seeds))})
    _subgroup_witness_part(led, G, H, T, p, seeds, support_size, 1e-10)

    coset = VecFunction(G, space, np.array(H.elements, dtype=np.int64).reshape(H.order, -1),
                        np.tile(_top_vector(T), (H.order, 1)))
    for f in _battery(G, space, seeds, max(support_size, 2), [delta_function(G, space), coset]):
        lhs = lp_norm(tensor_transform(G, T, f), pc).value
        pieces = [w for w in weil_decompose(f, H) if not w.is_zero]
        worst = max(ratio(H.model, T, p, w).value for w in pieces)
        rhs = factor * worst * lp_norm(f, p).value
        led.le("coset", lhs, rhs, 10 * EPS * max(lhs, rhs) * n, f)

    eh, eg = _sandwich(G, H, T, p, restarts, 1e-9, seed)
    a, b = eh.lower_bound, eg.lower_bound
    led.le("lower", a, b, tol * max(a, b, 1e-300))
    led.le("upper", b, factor * a, tol * max(b, factor * a, 1e-300))
    led.extra.update({"estimate_H": a, "estimate_G": b, "factor": factor})
    return led.report()


def check_duality(G, T: OperatorSpec, p: float, restarts: int = 64, rel_tol: float = 0.05,
                  tol: float = 1e-9, seed: int = 0) -> CheckReport:
    """Estimates for ``(T, G)`` and ``(T', G')`` agree within ``rel_tol`` relative."""
    G = make_group(G)
    p = float(p)
    Td = dual_operator(T)
    a = estimate_constant(G, T, p, restarts=restarts, tol=tol, seed=seed).lower_bound
    b = estimate_constant(dual_group(G), Td, p, restarts=restarts, tol=tol, seed=seed).lower_bound
    led = _Ledger("duality", {"group": str(G), "p": p, "operator": _op_params(T), "rel_tol": rel_tol,
                              "restarts": restarts, "seed": int(seed)})
    led.eq("estimates", a, b, rel_tol * max(a, b) + 2 * tol)
    led.extra.update({"estimate": a, "estimate_dual": b})
    return led.report()


def check_weil(G, H, seeds=range(N_RANDOM), p: float = 1.7, dim: int = 3, q: float = 2.0,
               tol: float = 1e-12) -> CheckReport:
    """Weil's integration formula for ``||f||^p`` on random vector-valued f."""
    G, H = _as_subgroup(G, H)
    space = BanachSpec(dim, q)
    led = _Ledger("weil", {"group": str(G), "subgroup": [list(e) for e in H.elements], "p": p,
                           "dim": dim, "tol": tol, "seeds": list(map(int, seeds))})
    for s in seeds:
        f = random_function(G, G.order, space, seed=int(s))
        lhs, rhs = weil_sides(f, H, p)
        led.eq("identity", lhs, rhs, tol * max(abs(lhs), abs(rhs)), f)
    return led.report()


def check_parseval(G, seeds=range(N_RANDOM), dim: int = 2, tol: float = 1e-12) -> CheckReport:
    """``||F f||_2 = ||f||_2`` on finite models."""
    G = make_group(G)
    if not G.is_finite:
        raise DomainError("Parseval check needs a finite model")
    space = BanachSpec(dim, 2.0)
    led = _Ledger("parseval", {"group": str(G), "dim": dim, "tol": tol, "seeds": list(map(int, seeds))})
    const = VecFunction(G, space, np.array(G.points(), dtype=np.int64), np.ones((G.order, dim)))
    for f in _battery(G, space, seeds, G.order, [delta_function(G, space), const]):
        a = lp_norm(f, 2).value
        b = lp_norm(fourier(G, f), 2).value
        led.eq("isometry", a, b, tol * max(a, b), f)
    return led.report()


CHECKS = ("parseval", "weil", "open_subgroup", "fcc", "duality", "sinc_sum", "eqrz", "zng")


__all__ = [
    "CheckReport", "CHECKS", "check_sinc_sum", "check_eqrz", "check_zng", "check_open_subgroup",
    "check_fcc", "check_duality", "check_weil", "check_parseval", "sinc_sum_bound",
    "default_sinc_samples",
]
