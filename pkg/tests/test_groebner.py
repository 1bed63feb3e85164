import random
from itertools import combinations, permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfoliation.groebner import (
    PolyVector,
    groebner_basis,
    ideal_membership,
    is_unit_ideal,
    krull_dimension,
    module_membership,
    monomial_ideal_dimension,
    normal_form,
    syzygies,
    syzygy_module,
)
from dfoliation.poly import GREVLEX, LEX, Poly, elimination_order, monomial_divides, parse_poly
from oracles import bounded_ideal_membership, bounded_module_membership
from strategies import XY, XYZ, exponents, polys, rationals

P = lambda text, v=XY: parse_poly(text, v)  # noqa: E731
V = lambda *texts: PolyVector([P(t) for t in texts])  # noqa: E731


def random_poly(rng, variables, degree, terms=3):
    n = len(variables)
    out = {}
    for _ in range(terms):
        while True:
            m = tuple(rng.randint(0, degree) for _ in range(n))
            if sum(m) <= degree:
                break
        out[m] = rng.randint(-3, 3)
    return Poly(variables, out)


def test_groebner_examples():
    gb = groebner_basis([P("x*y-1"), P("y^2-1")], LEX)
    assert list(gb) == [P("x-y"), P("y^2-1")]
    assert all(not normal_form(g, gb) for g in (P("x*y-1"), P("y^2-1")))
    assert list(groebner_basis([P("x")])) == [P("x")]
    assert list(groebner_basis([P("x"), P("x+1")])) == [P("1")]
    assert groebner_basis([], ambient=XY).is_zero()


def test_normal_form_examples():
    assert normal_form(P("x^2*y"), groebner_basis([P("x*y")])) == P("0")
    assert normal_form(P("x^2+y"), groebner_basis([P("x^2")])) == P("y")
    gb = groebner_basis([P("x*y-1"), P("y^2-1")], LEX)
    # reducing x^2 by x-y twice gives y^2, which reduces further by y^2-1
    assert normal_form(P("x^2"), gb) == P("1")
    assert ideal_membership(P("x^2-y^2"), [P("x*y-1"), P("y^2-1")])


def test_membership_and_unit_examples():
    assert not ideal_membership(P("x"), [P("x^2"), P("x*y")])
    assert ideal_membership(P("x^2*y^3"), [P("x^2"), P("x*y")])
    assert ideal_membership(P("0"), [P("x^2+y")])
    assert is_unit_ideal([P("x"), P("x+1")])
    assert not is_unit_ideal([P("x"), P("y")])
    assert not is_unit_ideal([P("x^2+y^2"), P("x")])
    assert list(groebner_basis([P("x^2+y^2"), P("x")])) == [P("y^2"), P("x")]


@pytest.mark.parametrize("gens, dim", [(["x"], 1), (["x", "y"], 0), (["x^2", "x*y"], 1), (["1"], -1), (["0"], 2)])
def test_krull_dimension_examples(gens, dim):
    assert krull_dimension([P(g) for g in gens], XY) == dim


def test_syzygy_examples():
    assert syzygy_module([P("x"), P("y")]) == [V("y", "-x")]
    assert syzygy_module([P("x")]) == []
    assert syzygy_module([P("x"), P("x")]) == [V("1", "-1")]


def test_module_membership_examples():
    assert module_membership(V("y", "-x"), [V("y", "-x")])
    assert not module_membership(V("x", "-y"), [V("0", "x"), V("y", "0")])
    assert not bounded_module_membership(V("x", "-y"), [V("0", "x"), V("y", "0")], 6)
    assert module_membership(V("0", "0"), [V("x", "y")])
    with pytest.raises(ValueError):
        module_membership(V("x"), [V("x", "y")])


def _gb_invariants(gb, gens, order):
    basis = list(gb)
    leads = [g.leading_monomial(order) for g in basis]
    for g in basis:
        assert g.leading_coefficient(order) == 1
    for a, b in permutations(range(len(basis)), 2):
        assert not monomial_divides(leads[a], leads[b])
    for g, lm in zip(basis, leads):
        # reduced: no term of g other than its lead is divisible by any lead
        for m in g.terms:
            if m != lm:
                assert not any(monomial_divides(l2, m) for l2 in leads)
    for g in gens:
        assert not normal_form(g, gb)


@pytest.mark.parametrize("order", [LEX, GREVLEX, elimination_order(1)], ids=str)
@settings(max_examples=40, deadline=None)
@given(gens=st.lists(polys(XYZ, 2, 3, rationals), min_size=1, max_size=3), data=st.data())
def test_reduced_basis_invariants_and_canonicity(order, gens, data):
    gb = groebner_basis(gens, order, ambient=XYZ)
    _gb_invariants(gb, gens, order)
    shuffled = data.draw(st.permutations(gens))
    assert list(groebner_basis(shuffled, order, ambient=XYZ)) == list(gb)


def test_membership_agrees_with_linear_algebra_oracle():
    rng = random.Random(20240611)
    agree = 0
    for trial in range(100):
        gens = [random_poly(rng, XY, 3) for _ in range(2)]
        if trial % 2 == 0:
            p = sum((random_poly(rng, XY, 3) * g for g in gens), Poly.zero(XY))
        else:
            p = random_poly(rng, XY, 3, terms=4)
        assert ideal_membership(p, gens) == bounded_ideal_membership(p, gens, 6), (gens, p)
        agree += 1
    assert agree == 100


@settings(max_examples=60, deadline=None)
@given(st.lists(exponents(3, 3), min_size=1, max_size=4))
def test_monomial_dimension_matches_coordinate_subspaces(leads):
    # brute force: the subspace where only the coordinates in S are free lies in the
    # variety iff every generator vanishes at a point with S-coordinates equal to 1
    gens = [Poly.monomial(XYZ, m) for m in leads]
    best = -1
    for size in range(4):
        for S in combinations(range(3), size):
            point = [1 if i in S else 0 for i in range(3)]
            if all(g.evaluate(point) == 0 for g in gens):
                best = max(best, size)
    assert monomial_ideal_dimension(leads, 3) == best
    assert krull_dimension(gens) == best


@settings(max_examples=40, deadline=None)
@given(st.lists(polys(XY, 2, 3, rationals).filter(bool), min_size=1, max_size=3))
def test_syzygies_are_relations_and_contain_koszul_pairs(gens):
    syz = syzygy_module(gens)
    for s in syz:
        assert not sum((a * g for a, g in zip(s, gens)), Poly.zero(XY))
    for i, j in combinations(range(len(gens)), 2):
        koszul = [Poly.zero(XY)] * len(gens)
        koszul[i], koszul[j] = gens[j], -gens[i]
        assert module_membership(PolyVector(koszul), syz) if syz else not any(koszul)


def test_vector_syzygies():
    rows = [V("x", "y"), V("y", "0"), V("0", "x")]
    syz = syzygies(rows)
    assert syz
    for s in syz:
        total = PolyVector([P("0"), P("0")])
        for a, r in zip(s, rows):
            total = total + r.scale(a)
        assert total.is_zero()
