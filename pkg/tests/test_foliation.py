import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfoliation.foliation import (
    FoliationPresentation,
    OneFormModule,
    PoissonError,
    VectorField,
    VectorFieldError,
    check_lie_subalgebra,
    double_orthogonal_check,
    dual_integrability_check,
    evaluate_fiber,
    hamiltonian_foliation,
    lie_bracket,
    orthogonal_complement,
    rank_profile,
    strata,
)
from dfoliation.groebner import PolyVector, is_unit_ideal
from dfoliation.poly import Poly, parse_poly
from dfoliation.scalars import GaussianRational
from dfoliation.weyl import weyl_commutator
from oracles import bounded_module_membership
from strategies import XY, XYZ, polys, rationals

X1 = ("x",)


def F(fields, variables=XY):
    return FoliationPresentation.parse(variables, fields)


def vf(text, variables=XY):
    return VectorField.parse(text, variables)


def forms(variables, *rows):
    return OneFormModule(tuple(variables), tuple(PolyVector([parse_poly(t, variables) for t in r]) for r in rows))


def vector_fields(variables=XY, max_degree=2):
    n = len(variables)
    return st.lists(polys(variables, max_degree, 3, rationals), min_size=n, max_size=n).map(
        lambda cs: VectorField(tuple(cs))
    )


CORPUS = {
    "euler": (["x*dx + y*dy"], XY),
    "dx_c2": (["dx"], XY),
    "diag": (["x*dx", "y*dy"], XY),
    "symplectic": (["dy", "-dx"], XY),
    "poisson_x": (["x*dy", "-x*dx"], XY),
    "x_dy": (["x*dy"], XY),
    "lin4": (["x*dx", "x*dy", "y*dx", "y*dy"], XY),
}


# parsing contract

@pytest.mark.parametrize("text", ["dx*dx", "x + dx", "1"])
def test_non_vector_fields_rejected(text):
    with pytest.raises(VectorFieldError):
        vf(text)


def test_presentation_rejects_empty_and_zero():
    with pytest.raises(ValueError):
        FoliationPresentation(XY, ())
    with pytest.raises(ValueError):
        F(["0*dx"])


# brackets

@pytest.mark.parametrize(
    "a, b, expected", [("x*dx", "y*dy", "0*dx"), ("dx", "x*dx", "dx"), ("x*dy", "y*dx", "x*dx - y*dy")]
)
def test_lie_bracket_examples(a, b, expected):
    assert lie_bracket(vf(a), vf(b)) == vf(expected)
    assert lie_bracket(vf(a), vf(b)).to_weyl() == weyl_commutator(vf(a).to_weyl(), vf(b).to_weyl())


@settings(max_examples=50, deadline=None)
@given(vector_fields(), vector_fields(), vector_fields())
def test_bracket_antisymmetry_jacobi_and_weyl_agreement(u, v, w):
    b = lie_bracket
    assert b(u, v) == VectorField(tuple(-c for c in b(v, u).coefficients))
    total = [p + q + r for p, q, r in zip(
        b(u, b(v, w)).coefficients, b(v, b(w, u)).coefficients, b(w, b(u, v)).coefficients)]
    assert not any(total)
    assert b(u, v).to_weyl() == weyl_commutator(u.to_weyl(), v.to_weyl())


def test_lie_closure_examples():
    assert check_lie_subalgebra(F(["x*dx", "y*dy"])).closed
    assert check_lie_subalgebra(F(["dx", "x*dx"])).closed
    report = check_lie_subalgebra(F(["x*dy", "y*dx"]))
    assert not report.closed and report.failing_pair == (0, 1)
    assert report.bracket == vf("x*dx - y*dy")
    gens = [v.vector() for v in F(["x*dy", "y*dx"]).generators]
    assert not bounded_module_membership(report.bracket.vector(), gens, 6)


# orthogonal and integrability

@pytest.mark.parametrize(
    "fields, variables, expected",
    [(["x*dx + y*dy"], XY, [("y", "-x")]), (["dx"], XY, [("0", "1")]), (["dx", "dy"], XY, [])],
)
def test_orthogonal_examples(fields, variables, expected):
    perp = orthogonal_complement(F(fields, variables))
    assert list(perp.generators) == [PolyVector([parse_poly(t, variables) for t in row]) for row in expected]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_orthogonal_pairs_to_zero(name):
    fields, variables = CORPUS[name]
    presentation = F(fields, variables)
    perp = orthogonal_complement(presentation)
    for k in range(len(perp)):
        for v in presentation.generators:
            assert not perp.pair(k, v)


@pytest.mark.parametrize(
    "fields, variables",
    [(["x*dx + y*dy"], XY), (["dx"], XY), (["dy", "-dx"], XY), (["dx", "dy"], XYZ), (["y*dx - x*dy"], XYZ)],
)
def test_double_orthogonal_on_saturated_entries(fields, variables):
    assert double_orthogonal_check(F(fields, variables))


@pytest.mark.parametrize("fields, variables", [(["x*dx"], X1), (["x*dx", "y*dy"], XY), (["x*dy"], XY), (["x*dx", "x*dy", "y*dx", "y*dy"], XY)])
def test_double_orthogonal_fails_for_unsaturated_modules(fields, variables):
    # the orthogonal only sees the saturation: x*(1, 0) lies in <(x, 0), (0, y)> but (1, 0) does not
    presentation = F(fields, variables)
    assert not double_orthogonal_check(presentation)
    gens = [v.vector() for v in presentation.generators]
    unit = PolyVector([Poly.constant(variables, 1)] + [Poly.zero(variables)] * (len(variables) - 1))
    if fields == ["x*dy"]:
        unit = PolyVector([Poly.zero(variables), Poly.constant(variables, 1)])
    assert not bounded_module_membership(unit, gens, 4)


def test_integrability_examples():
    euler = F(["x*dx + y*dy"])
    assert dual_integrability_check(euler, forms(XY, ("y", "-x"))).all_zero
    twisted = F(["dy", "dx + y*dz"], XYZ)
    report = dual_integrability_check(twisted, forms(XYZ, ("-y", "0", "1")))
    assert not report.all_zero
    assert report.pairings[0][0][1] == parse_poly("-1", XYZ)
    assert report.pairings[0][1][0] == parse_poly("1", XYZ)
    flat = F(["dx", "dy"], XYZ)
    assert dual_integrability_check(flat, forms(XYZ, ("0", "0", "1"))).all_zero


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_closed_implies_integrable(name):
    fields, variables = CORPUS[name]
    presentation = F(fields, variables)
    assert check_lie_subalgebra(presentation).closed
    assert dual_integrability_check(presentation).all_zero


# rank profile and strata

@pytest.mark.parametrize(
    "fields, variables, profile",
    [
        (["x*dx + y*dy"], XY, (1, 0, 1)),
        (["dx"], XY, (1, 1, 0)),
        (["x*dx", "y*dy"], XY, (2, 0, 2)),
        (["dy", "-dx"], XY, (2, 2, 0)),
        (["x*dy", "-x*dx"], XY, (2, 0, 2)),
        (["x*dx"], X1, (1, 0, 1)),
    ],
)
def test_rank_profile_examples(fields, variables, profile):
    p = rank_profile(F(fields, variables))
    assert (p.rk, p.cork, p.irr) == profile


def test_strata_euler():
    s = strata(F(["x*dx + y*dy"]))
    assert [(x.j, x.closure_dimension, x.nonempty) for x in s] == [(0, 2, True), (1, 0, True)]
    assert s[0].vanishing_ideal == ()
    assert set(s[0].nonvanishing_ideal) == {parse_poly("x", XY), parse_poly("y", XY)}
    assert set(s[1].vanishing_ideal) == {parse_poly("x", XY), parse_poly("y", XY)}


def test_strata_diagonal_and_regular():
    s = strata(F(["x*dx", "y*dy"]))
    assert [(x.j, x.closure_dimension, x.nonempty) for x in s] == [(0, 2, True), (1, 1, True), (2, 0, True)]
    assert s[0].nonvanishing_ideal == (parse_poly("x*y", XY),)
    assert [x.j for x in strata(F(["dx"]))] == [0]


@pytest.mark.parametrize("point, expected", [((1, 1), 1), ((0, 0), 0)])
def test_evaluate_fiber_euler(point, expected):
    assert evaluate_fiber(F(["x*dx + y*dy"]), point) == expected


def test_evaluate_fiber_regular_and_errors():
    assert evaluate_fiber(F(["dx"]), (GaussianRational(3, 1), 0)) == 1
    with pytest.raises(ValueError):
        evaluate_fiber(F(["dx"]), (1,))


def _elementary_ops(presentation, rng, steps=3):
    gens = list(presentation.generators)
    for _ in range(steps):
        if len(gens) > 1 and rng.random() < 0.5:
            i, j = rng.sample(range(len(gens)), 2)
            factor = Poly(presentation.ambient, {(rng.randint(0, 1), rng.randint(0, 1)): rng.randint(-2, 2)})
            gens[i] = VectorField(tuple(a + factor * b for a, b in zip(gens[i].coefficients, gens[j].coefficients)))
        elif len(gens) > 1:
            i, j = rng.sample(range(len(gens)), 2)
            gens[i], gens[j] = gens[j], gens[i]
        else:
            c = rng.choice([2, -1, GaussianRational(0, 1)])
            gens[0] = VectorField(tuple(a.scale(c) for a in gens[0].coefficients))
    return FoliationPresentation(presentation.ambient, tuple(gens))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_rank_profile_invariant_under_elementary_operations(name):
    fields, variables = CORPUS[name]
    presentation = F(fields, variables)
    base = rank_profile(presentation)
    rng = random.Random(name)
    for _ in range(5):
        other = _elementary_ops(presentation, rng)
        assert rank_profile(other) == base


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_fiber_dimension_between_cork_and_rk(name):
    fields, variables = CORPUS[name]
    presentation = F(fields, variables)
    p = rank_profile(presentation)
    assert p.irr == p.rk - p.cork >= 0
    rng = random.Random(7)
    values = [0, 0, 1, -1, 2, GaussianRational(1, 2)]
    for _ in range(50):
        point = [rng.choice(values) for _ in variables]
        assert p.cork <= evaluate_fiber(presentation, point) <= p.rk


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_strata_partition_by_fiber_dimension(name):
    fields, variables = CORPUS[name]
    presentation = F(fields, variables)
    p = rank_profile(presentation)
    rng = random.Random(11)
    for _ in range(20):
        point = [rng.choice([0, 1, -1, 2]) for _ in variables]
        j = p.rk - evaluate_fiber(presentation, point)
        s = strata(presentation, p)[j]
        assert all(not g.evaluate(point) for g in s.vanishing_ideal)
        assert any(g.evaluate(point) for g in s.nonvanishing_ideal)


# Poisson input

def test_hamiltonian_examples():
    symp = hamiltonian_foliation([["0", "1"], ["-1", "0"]], XY)
    assert symp.generators == (vf("dy"), vf("-dx"))
    assert rank_profile(symp).irr == 0
    px = hamiltonian_foliation([["0", "x"], ["-x", "0"]], XY)
    assert px.generators == (vf("x*dy"), vf("-x*dx"))
    assert rank_profile(px).cork == 0


@pytest.mark.parametrize(
    "matrix, variables",
    [
        ([["0", "0"], ["0", "0"]], XY),
        ([["0", "1"], ["1", "0"]], XY),
        ([["0", "1"], ["-1"]], XY),
        ([["0", "y", "0"], ["-y", "0", "x"], ["0", "-x", "0"]], XYZ),
    ],
)
def test_hamiltonian_errors(matrix, variables):
    with pytest.raises(PoissonError):
        hamiltonian_foliation(matrix, variables)


def test_hamiltonian_linear_so3_passes_jacobi():
    so3 = hamiltonian_foliation([["0", "z", "-y"], ["-z", "0", "x"], ["y", "-x", "0"]], XYZ)
    p = rank_profile(so3)
    assert (p.rk, p.cork) == (2, 0)
    assert check_lie_subalgebra(so3).closed
    assert not is_unit_ideal(list(so3.all_coefficients()), XYZ)
