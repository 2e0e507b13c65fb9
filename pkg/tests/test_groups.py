from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcaft.exceptions import DomainError, GroupSpecError, ValidationError
from lcaft.groups import (
    Cyclic,
    Finite,
    GroupModel,
    Lattice,
    Product,
    RealGrid,
    Torus,
    annihilator,
    dual_group,
    haar_weight,
    make_group,
    pair,
    parse_group,
    parse_points,
    subgroup,
)

orders = st.lists(st.integers(2, 7), min_size=1, max_size=3)


def test_cyclic_rejects_small_order():
    with pytest.raises(ValidationError, match="order must be ≥ 2") as exc:
        Cyclic(1)
    assert exc.value.field == "order"


def test_finite_pairing_closed_form():
    g = Finite([5])
    for a in range(5):
        for b in range(5):
            assert pair(g, a, b) == pytest.approx(np.exp(2j * math.pi * a * b / 5), abs=1e-15)


@given(orders, st.data())
def test_pairing_is_multiplicative_and_unimodular(ords, data):
    g = Finite(ords)
    pt = st.tuples(*[st.integers(0, n - 1) for n in ords])
    s, t, chi = data.draw(pt), data.draw(pt), data.draw(pt)
    st_sum = tuple((a + b) % n for a, b, n in zip(s, t, ords))
    assert abs(pair(g, s, chi)) == pytest.approx(1.0, abs=1e-14)
    assert pair(g, st_sum, chi) == pytest.approx(pair(g, s, chi) * pair(g, t, chi), abs=1e-12)


@given(orders)
def test_dual_is_an_involution(ords):
    g = Finite(ords)
    assert dual_group(dual_group(g)) == g
    assert dual_group(g) != g


def test_dual_of_continuum_axes():
    assert dual_group(Lattice(3)).axes == (Torus(8),)
    assert dual_group(Torus(16)).axes == (Lattice(16),)
    assert dual_group(RealGrid(0.5, 4)).axes == (RealGrid(0.5, 4, True),)


def test_haar_normalization_gives_unit_parseval_constant():
    g = Finite([6])
    gd = dual_group(g)
    total = sum(haar_weight(g, x) for x in g.points()) * sum(haar_weight(gd, y) for y in gd.points())
    assert total == pytest.approx(6.0)
    assert haar_weight(gd, (0,)) == pytest.approx(1 / 6)
    assert haar_weight(Torus(8), 0.3) == pytest.approx(1 / (2 * math.pi))


@pytest.mark.parametrize("text", ["Z4", "Z2 x Z3", "Zlat[3] x Z2", "T[16]", "R[delta=0.25,M=32]",
                                  "Z4 x Z2 x R[delta=0.25,M=32]", "Z4'", "R[delta=1.0,M=4]'"])
def test_spec_round_trip(text):
    g = parse_group(text)
    assert parse_group(str(g)) == g


def test_spec_error_has_caret():
    with pytest.raises(GroupSpecError) as exc:
        parse_group("Z4 x Q3")
    assert exc.value.position == 5
    assert "^" in str(exc.value)
    with pytest.raises(GroupSpecError):
        parse_group("Zlat[3")
    with pytest.raises(GroupSpecError):
        parse_group("Z1")


def test_make_group_accepts_many_forms():
    g = Finite([2, 3])
    assert make_group("Z2 x Z3") == g
    assert make_group({"kind": "finite", "orders": [2, 3]}) == g
    assert make_group([Cyclic(2), Cyclic(3)]) == g
    assert Product([Finite([2]), "Z3"]) == g
    with pytest.raises(ValidationError):
        make_group(3.5)


def test_point_validation():
    g = Finite([4])
    with pytest.raises(DomainError):
        pair(g, 4, 0)
    with pytest.raises(DomainError):
        Lattice(2).check_point(3)
    with pytest.raises(DomainError):
        Torus(8).check_point(4.0)


@given(orders, st.data())
@settings(max_examples=40)
def test_subgroup_cosets_partition(ords, data):
    g = Finite(ords)
    gen = data.draw(st.tuples(*[st.integers(0, n - 1) for n in ords]))
    H = subgroup(g, [gen])
    assert H.order * H.index == g.order
    covered = {H.add(r, h) for r in H.representatives for h in H.elements}
    assert covered == set(g.points())
    assert len(annihilator(g, H)) == g.order // H.order


def test_subgroup_examples():
    H = subgroup(Finite([4]), [(2,)])
    assert H.elements == ((0,), (2,))
    assert H.representatives == ((0,), (1,))
    assert annihilator(Finite([4]), H) == [(0,), (2,)]
    trivial = subgroup(Finite([3]))
    assert trivial.index == 3


def test_subgroup_axis_spec_round_trip():
    H = subgroup(Finite([2, 2]), [(1, 0)])
    assert parse_group(str(H.model)) == H.model
    with pytest.raises(GroupSpecError):
        parse_group("H[Z4:(0);(1)]")


def test_parse_points():
    g = Finite([2, 2])
    assert parse_points("1,0;0,1", g) == [(1, 0), (0, 1)]
    assert parse_points("2", Finite([4])) == [(2,)]
    with pytest.raises(DomainError):
        parse_points("5", Finite([4]))


def test_model_kind_and_order():
    assert Finite([2, 3]).kind == "finite"
    assert Finite([2, 3]).order == 6
    assert GroupModel((Lattice(2),)).kind == "lattice"
    assert parse_group("Zlat[2] x Z2").kind == "product"
    with pytest.raises(DomainError):
        GroupModel((Lattice(2),)).order
