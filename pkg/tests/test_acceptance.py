"""Acceptance criteria, one test each, at the stated tolerances."""

from __future__ import annotations

import math
import subprocess
import sys
import time

import mpmath
import numpy as np
import pytest

from lcaft import verify
from lcaft.ftype import brute_force_constant, estimate_constant, ratio, ratio_gradient
from lcaft.functions import BanachSpec, OperatorSpec, VecFunction, delta_function, random_function
from lcaft.groups import Finite

ID1 = OperatorSpec.identity(1)


def _op(seed, m=2, n=2, qx=2.0, qy=2.0):
    rng = np.random.default_rng(seed)
    return OperatorSpec.from_matrix(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)), qx, qy)


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@pytest.mark.acceptance(1, "Parseval exactness on Z_n and Z2 x Z3")
def test_parseval(record):
    groups = [Finite([n]) for n in (2, 3, 4, 6, 8)] + [Finite([2, 3])]
    worst = math.inf
    with Clock() as c:
        reports = [verify.check_parseval(g, range(100), dim=2, tol=1e-12) for g in groups]
    for g, rep in zip(groups, reports):
        assert rep.passed, (str(g), rep.failures[:1])
        assert rep.witnesses >= 100
        worst = min(worst, rep.margin)
    record("min_margin", f"{worst:.2e}")
    record("seconds", f"{c.elapsed:.2f}")
    assert c.elapsed < 1.0


def _sinc_sum_oracle(pc, s):
    mpmath.mp.dps = 30
    s = mpmath.mpf(s)
    term = lambda n: abs(mpmath.sin(s) / (s - n * mpmath.pi)) ** pc
    return float(term(0) + mpmath.nsum(term, [1, mpmath.inf]) + mpmath.nsum(lambda n: term(-n), [1, mpmath.inf]))


@pytest.mark.acceptance(2, "Sinc-sum inequality and p'=2 equality")
def test_sinc_sum(record):
    samples = verify.default_sinc_samples(50, seed=0)
    assert np.all((samples > 0) & (samples < 4 * math.pi))
    assert np.min(np.abs(samples - math.pi)) > 0
    with Clock() as c:
        reports = {pc: verify.check_sinc_sum(pc, samples, N=1000, tol=1e-9) for pc in (2.0, 2.5, 3.0, 4.0)}
    for pc, rep in reports.items():
        assert rep.passed, (pc, rep.failures[:1])
        assert rep.witnesses == (100 if pc == 2 else 50) and not rep.skipped
    # p' = 2 against the partial-fraction identity sum 1/(s - n pi)^2 = 1/sin^2 s
    for s in samples:
        partial, tail = verify.sinc_sum_bound(2.0, s)
        assert abs(partial + tail - 1.0) <= 1e-9
    # the bound really bounds the full series (mpmath oracle on a subsample)
    for pc in (2.5, 3.0, 4.0):
        for s in samples[::10]:
            partial, tail = verify.sinc_sum_bound(pc, s)
            exact = _sinc_sum_oracle(pc, s)
            assert partial <= exact + 1e-12 <= partial + tail + 2e-12 and exact <= 1 + 1e-12
    record("margin_p2", f"{reports[2.0].margin:.2e}")
    record("seconds", f"{c.elapsed:.3f}")
    assert c.elapsed < 1.0


@pytest.mark.acceptance(3, "Scalar Hausdorff-Young constant is 1")
def test_scalar_constant(record):
    worst = 0.0
    with Clock() as c:
        for n in (2, 4):
            g = Finite([n])
            for p in (4 / 3, 1.5, 2.0):
                bf = brute_force_constant(g, ID1, p, cap=2 * n)
                est = estimate_constant(g, ID1, p, restarts=32, seed=0).lower_bound
                d = ratio(g, ID1, p, delta_function(g, 1)).value
                assert abs(bf - 1) <= 1e-6 and abs(est - 1) <= 1e-6, (n, p, bf, est)
                assert d >= 1 - 1e-9
                worst = max(worst, abs(bf - 1), abs(est - 1))
    record("max_dev", f"{worst:.1e}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 30


@pytest.mark.acceptance(4, "Step-function transport Z x G vs R x G")
def test_eqrz(record):
    worst_budget, worst_margin = 0.0, math.inf
    with Clock() as c:
        for G in (None, "Z2"):
            for T in (ID1, _op(40)):
                for p in (1.5, 2.0):
                    rep = verify.check_eqrz(G, T, p, seeds=range(20))
                    a = rep.parts["a"]
                    assert rep.passed, rep.failures[:1]
                    assert a["witnesses"] >= 20
                    assert a["margin"] >= -a["budget"] and a["budget"] <= 1e-6
                    worst_budget = max(worst_budget, a["budget"])
                    worst_margin = min(worst_margin, a["margin"])
    record("max_budget", f"{worst_budget:.1e}")
    record("min_margin", f"{worst_margin:.3f}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 120


@pytest.mark.acceptance(5, "Interleaving Z^2 x G to Z x G")
def test_zng(record):
    worst = 0.0
    with Clock() as c:
        for G in (None, "Z2"):
            for T in (ID1, _op(50)):
                rep = verify.check_zng(G, T, 1.5, seeds=range(10), tol=1e-7)
                assert rep.passed, rep.failures[:1]
                a = rep.parts["a"]
                assert a["budget"] <= 1e-12 * 10 and a["verdict"] == "pass"
                assert rep.extra["max_rel_discrepancy_b"] <= 1e-7
                worst = max(worst, rep.extra["max_rel_discrepancy_b"])
    record("max_rel_b", f"{worst:.1e}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 120


@pytest.mark.acceptance(6, "Finite-index subgroup sandwich")
def test_fcc(record):
    pairs = [(Finite([4]), [(2,)]), (Finite([6]), [(3,)]), (Finite([2, 2]), [(1, 0)])]
    ops = [ID1, _op(60), _op(61, qx=1.5, qy=3.0)]
    with Clock() as c:
        for G, gens in pairs:
            for T in ops:
                for p in (1.5, 2.0):
                    rep = verify.check_fcc(G, gens, T, p, seeds=range(20), tol=1e-4)
                    assert rep.passed, (str(G), p, rep.failures[:1])
                    # zero extension: |ratio_H - ratio_G| <= 1e-10 relative per witness
                    assert rep.parts["witness"]["verdict"] == "pass"
                    a, b, k = rep.extra["estimate_H"], rep.extra["estimate_G"], rep.extra["factor"]
                    assert a * (1 - 1e-4) <= b <= k * a * (1 + 1e-4)
    record("cases", len(pairs) * len(ops) * 2)
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 300


@pytest.mark.acceptance(7, "Duality agreement over Z4")
def test_duality(record):
    worst = 0.0
    with Clock() as c:
        for s in range(10):
            rep = verify.check_duality(Finite([4]), _op(700 + s), 1.5, rel_tol=0.05)
            assert rep.passed, rep.extra
            a, b = rep.extra["estimate"], rep.extra["estimate_dual"]
            worst = max(worst, abs(a - b) / max(a, b))
    record("max_rel_gap", f"{worst:.1e}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 300


def _fd(g, T, p, f, h=1e-6):
    out = np.zeros(f.values.shape + (2,))
    for idx in np.ndindex(f.values.shape):
        for part, unit in ((0, 1.0), (1, 1j)):
            vals = []
            for sgn in (1, -1):
                v = np.array(f.values)
                v[idx] += sgn * h * unit
                vals.append(math.log(ratio(g, T, p, VecFunction(g, f.space, f.points, v)).value))
            out[idx + (part,)] = (vals[0] - vals[1]) / (2 * h)
    return out


@pytest.mark.acceptance(8, "Gradient vs central finite differences")
def test_gradient(record):
    rng = np.random.default_rng(8)
    groups = [Finite([2]), Finite([3]), Finite([4]), Finite([2, 2]), Finite([5])]
    worst = 0.0
    with Clock() as c:
        for i in range(50):
            g = groups[i % len(groups)]
            m, n = rng.integers(1, 4, 2)
            qx, qy = rng.uniform(1.2, 5.0, 2)
            T = _op(800 + i, int(m), int(n), float(qx), float(qy))
            p = float(rng.uniform(1.1, 2.0))
            # one coefficient in one dimension has no direction besides scale and phase
            k = int(rng.integers(1 if n > 1 else 2, g.order + 1))
            f = random_function(g, k, T.domain, seed=i)
            G = ratio_gradient(g, T, p, f)
            fd = _fd(g, T, p, f)
            err = np.linalg.norm(G - fd) / np.linalg.norm(fd)
            assert err <= 1e-5, (i, err)
            worst = max(worst, err)
    record("max_rel_err", f"{worst:.1e}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 30


def oracle_instances():
    """Every instance of the fixed family that fits the brute-force cap."""
    out = []
    for n in (2, 3):
        for p in (4 / 3, 1.5, 1.8, 2.0):
            out.append((Finite([n]), ID1, p, None, 6))
            out.append((Finite([n]), _op(900 + n, 2, 1, 2.0, 1.5), p, None, 6))
            out.append((Finite([n]), _op(910 + n, 2, 1, 2.0, 3.0), p, None, 6))
            out.append((Finite([n]), _op(920 + n, 3, 1, 2.0, 4.0), p, None, 6))
    for n, sup in ((4, [(0,), (1,), (2,)]), (5, [(0,), (1,), (3,)]), (6, [(0,), (1,), (3,)])):
        for p in (1.25, 1.5, 1.75):
            out.append((Finite([n]), ID1, p, sup, 6))
    for p in (1.5, 2.0):
        out.append((Finite([4]), _op(930, 2, 3, 1.5, 3.0), p, [(0,)], 6))
        out.append((Finite([4]), ID1, p, None, 8))
    return out


@pytest.mark.acceptance(9, "Estimate vs brute-force oracle")
def test_oracle_agreement(record):
    worst = 0.0
    instances = oracle_instances()
    with Clock() as c:
        for g, T, p, sup, cap in instances:
            bf, res = brute_force_constant(g, T, p, support=sup, cap=cap, return_resolution=True)
            est = estimate_constant(g, T, p, restarts=16, seed=0, support=sup).lower_bound
            assert abs(est - bf) <= res + 1e-6, (str(g), p, sup, est, bf, res)
            worst = max(worst, abs(est - bf))
    record("instances", len(instances))
    record("max_gap", f"{worst:.1e}")
    record("seconds", f"{c.elapsed:.1f}")
    assert c.elapsed < 300


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "lcaft", *args], capture_output=True, check=False)


@pytest.mark.acceptance(10, "CLI byte-identical reports")
def test_cli_determinism(record, tmp_path):
    runs = [
        ("estimate", "--group", "Z4", "--op", "id:2:q=2", "--p", "1.5", "--seed", "7", "--restarts", "8"),
        ("verify", "--check", "fcc", "--group", "Z4", "--subgroup", "2", "--p", "2", "--restarts", "8"),
        ("report", "--group", "Z2 x Z3", "--op", "[[[1,0],[0,1]],[[2,0],[0,-1]]]", "--p", "1.3",
         "--check", "parseval", "--check", "weil", "--check", "sinc_sum", "--restarts", "4"),
        ("verify", "--check", "zng", "--group", "Z2", "--witnesses", "2"),
    ]
    for argv in runs:
        out = []
        for _ in range(2):
            r = _cli(*argv, "--out", str(tmp_path / "r.json"))
            assert r.returncode == 0, r.stderr
            out.append((tmp_path / "r.json").read_bytes())
        stdout = [_cli(*argv).stdout for _ in range(2)]
        assert out[0] == out[1] and stdout[0] == stdout[1]
    record("runs", len(runs))
