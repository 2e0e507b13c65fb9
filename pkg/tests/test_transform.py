from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint

from lcaft.exceptions import CapabilityError, DomainError
from lcaft.ftype import ratio
from lcaft.functions import BanachSpec, OperatorSpec, VecFunction, lp_norm, random_function
from lcaft.groups import Finite, GroupModel, Lattice, RealGrid, Torus, dual_group, parse_group, subgroup
from lcaft.transform import (
    InterleavingPlan,
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


def _dense(f):
    sizes = [a.size for a in f.model.axes]
    out = np.zeros(sizes + [f.space.dim], dtype=complex)
    for p, v in zip(f.points, f.values):
        out[tuple(p)] = v
    return out


@pytest.mark.parametrize("orders", [[2], [5], [8], [2, 3], [3, 2, 2]])
def test_finite_transform_matches_numpy_fft(orders):
    g = Finite(orders)
    f = random_function(g, g.order, 2, seed=1)
    F = fourier(g, f)
    assert F.model == dual_group(g)
    # exp(+2 pi i a chi / n) summed with counting measure = |G| * ifftn
    expected = np.fft.ifftn(_dense(f), axes=range(len(orders))) * g.order
    assert np.allclose(_dense(F), expected, atol=1e-12)


def test_constant_concentrates_on_trivial_character():
    g = Finite([6])
    f = VecFunction(g, BanachSpec(1), [[a] for a in range(6)], np.ones((6, 1)))
    F = _dense(fourier(g, f))
    assert F[0, 0] == pytest.approx(6.0)
    assert np.allclose(F[1:], 0, atol=1e-12)
    assert lp_norm(f, 2).value == pytest.approx(math.sqrt(6))
    assert lp_norm(fourier(g, f), 2).value == pytest.approx(math.sqrt(6))


@given(st.lists(st.integers(2, 6), min_size=1, max_size=2), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_double_transform_is_reflection(orders, seed):
    g = Finite(orders)
    f = random_function(g, min(3, g.order), 1, seed=seed)
    back = fourier(dual_group(g), fourier(g, f))
    neg = {tuple((-c) % n for c, n in zip(p, orders)): v for p, v in f.as_dict().items()}
    for p, v in back.as_dict().items():
        assert np.allclose(v, neg.get(p, 0), atol=1e-12)


def test_lattice_to_torus_evaluation():
    f = VecFunction(GroupModel((Lattice(3),)), BanachSpec(1), [[-2], [1]], [[1.0], [2j]])
    F = fourier(None, f)
    assert isinstance(F.model.axes[0], Torus)
    s = 0.7
    assert F.evaluate([s])[0] == pytest.approx(np.exp(-2j * s) + 2j * np.exp(1j * s))


def test_torus_to_lattice_flips_index():
    f = VecFunction(GroupModel((Torus(8),)), BanachSpec(1), [[2]], [[1.5]])
    F = fourier(None, f)
    assert F.model.axes[0] == Lattice(8)
    assert F.points.tolist() == [[-2]]


def test_step_spectrum_matches_direct_integral():
    delta = 0.5
    f = VecFunction(parse_group("R[delta=0.5,M=4]"), BanachSpec(1), [[-1], [2]], [[1.0], [0.5 - 1j]])
    F = fourier(None, f)
    for s in (0.0, 0.9, -3.3):
        re = sum(sint.quad(lambda x: (f.evaluate([x])[0] * np.exp(1j * s * x)).real, a, b)[0]
                 for a, b in ((-0.75, -0.25), (0.75, 1.25)))
        im = sum(sint.quad(lambda x: (f.evaluate([x])[0] * np.exp(1j * s * x)).imag, a, b)[0]
                 for a, b in ((-0.75, -0.25), (0.75, 1.25)))
        assert F.evaluate([s])[0] == pytest.approx(re + 1j * im, abs=1e-12)
    assert F.representation == "SincSeries"
    with pytest.raises(CapabilityError):
        fourier(None, F)


def test_partial_transform():
    g = parse_group("Zlat[2] x Z2")
    f = random_function(g, 3, 1, seed=0)
    F = fourier(g, f, axes=[1])
    assert F.model.axes[0] == Lattice(2)
    assert F.model.axes[1] == g.axes[1].dual_axis()


def test_step_extension_and_discretize_are_inverse():
    f = random_function("Zlat[3] x Z2", 4, 2, seed=3)
    h = step_extension(f, 0.25)
    assert h.model.axes[0] == RealGrid(0.25, 3)
    back = grid_discretize(h)
    assert back.model == f.model and np.array_equal(back.values, f.values)
    with pytest.raises(DomainError):
        grid_discretize(f)


def test_step_norm_scaling():
    f = random_function("Zlat[3]", 4, 1, seed=3)
    for delta in (0.5, 2.0):
        h = step_extension(f, delta)
        assert lp_norm(h, 1.5).value == pytest.approx(delta ** (1 / 1.5) * lp_norm(f, 1.5).value)


def test_interleave_basics():
    f = random_function("Zlat[2] x Zlat[2] x Z2", 5, 1, seed=7)
    plan = make_interleaving(f)
    assert plan.A == 2 * int(np.abs(f.points[:, 0]).max()) + 1
    fi = interleave(f, plan, 0.4)
    assert fi.support_size == f.support_size
    assert lp_norm(fi, 1.5).value == pytest.approx(lp_norm(f, 1.5).value, rel=1e-14)
    with pytest.raises(DomainError):
        InterleavingPlan(4)
    with pytest.raises(DomainError):
        interleave(f, InterleavingPlan(1), 0.0) if np.abs(f.points[:, 0]).max() > 0 else (_ for _ in ()).throw(DomainError())


@given(st.integers(0, 10**6), st.floats(-math.pi, math.pi))
@settings(max_examples=30, deadline=None)
def test_interleave_is_injective_and_norm_preserving(seed, s2):
    f = random_function("Zlat[3] x Zlat[3]", 6, 2, seed=seed)
    plan = make_interleaving(f)
    fi = interleave(f, plan, s2)
    assert fi.support_size == f.support_size
    assert lp_norm(fi, 1.3).value == pytest.approx(lp_norm(f, 1.3).value, rel=1e-13)


def test_interleave_family_slices():
    f = random_function("Zlat[2] x Zlat[2]", 5, 1, seed=2)
    plan = make_interleaving(f)
    fam = interleave_family(f, plan)
    s2 = 1.1
    sliced = {tuple(p[1:]): v * np.exp(1j * s2 * p[0]) for p, v in zip(fam.points, fam.values)}
    for p, v in interleave(f, plan, s2).as_dict().items():
        assert np.allclose(sliced[p], v)


def test_embed_axis_pins_zero():
    f = random_function("Zlat[2] x Z2", 3, 1, seed=0)
    e = embed_axis(f, 1, Lattice(2))
    assert e.model == parse_group("Zlat[2] x Zlat[2] x Z2")
    assert np.all(e.points[:, 1] == 0)
    with pytest.raises(CapabilityError):
        embed_axis(f, 0, Torus(8))


@pytest.mark.parametrize("orders,gens", [([4], [(2,)]), ([6], [(3,)]), ([2, 2], [(1, 0)]), ([6], [(2,)])])
def test_zero_extension_preserves_ratio(orders, gens):
    G = Finite(orders)
    H = subgroup(G, gens)
    rng = np.random.default_rng(0)
    T = OperatorSpec.from_matrix(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    for seed in range(5):
        f = random_function(H.model, H.order, 2, seed=seed)
        e = zero_extend(f, H)
        assert e.model == G
        assert ratio(G, T, 1.5, e).value == pytest.approx(ratio(H.model, T, 1.5, f).value, rel=1e-12)


def test_zero_extend_other_targets():
    f = random_function("Zlat[2]", 3, 1, seed=0)
    assert zero_extend(f, "R[delta=1.0,M=2]").model == parse_group("R[delta=1.0,M=2]")
    e = zero_extend(f, "Zlat[2] x Z2")
    assert np.all(e.points[:, 1] == 0)
    with pytest.raises(CapabilityError):
        zero_extend(f, "Z2")


def test_weil_decomposition_reconstructs():
    G = Finite([6])
    H = subgroup(G, [(3,)])
    f = random_function(G, 6, 3, seed=4)
    pieces = weil_decompose(f, H)
    assert len(pieces) == H.index
    rebuilt = {}
    for s, piece in zip(H.representatives, pieces):
        for (j,), v in piece.as_dict().items():
            rebuilt[H.add(s, H.elements[j])] = v
    for p, v in f.as_dict().items():
        assert np.allclose(rebuilt[p], v)
    lhs, rhs = weil_sides(f, H, 1.7)
    assert lhs == pytest.approx(rhs, rel=1e-14)


def test_weil_edge_cases():
    G = Finite([4])
    f = random_function(G, 4, 1, seed=0)
    whole = subgroup(G, [(1,)])
    assert len(weil_decompose(f, whole)) == 1
    trivial = subgroup(G)
    assert len(weil_decompose(f, trivial)) == 4
    for H in (whole, trivial):
        lhs, rhs = weil_sides(f, H, 1.3)
        assert lhs == pytest.approx(rhs, rel=1e-14)


def test_tensor_transform_commutes_with_operator():
    g = Finite([4])
    T = OperatorSpec.from_matrix([[1, 2j], [0.5, -1]])
    f = random_function(g, 3, 2, seed=5)
    a = tensor_transform(g, T, f)
    b = fourier(g, f)
    assert np.allclose(_dense(a), _dense(b) @ T.matrix.T)
