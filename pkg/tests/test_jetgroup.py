import math

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from jetforge import jetgroup as J
from jetforge import series as S
from jetforge.errors import DomainError, PrecisionError, ShapeError
from jetforge.jetgroup import LinearMap, parse_jet
from jetforge.lie import JetVectorField, exp_flow
from jetforge.scalar import GAUSSIAN, ExactScalar
from oracle import compose_sympy, jet_to_sympy, same, x
from strategies import jet_st, tangent_st


def pj(text, K, n=None):
    return parse_jet(text, K, GAUSSIAN, n)


def test_compose_against_expansion():
    f, g = pj("x + x^2", 4), pj("x + x^3", 4)
    got = J.compose(f, g)
    assert same(got.components[0], (x + x**3) + (x + x**3) ** 2)
    assert got == pj("x + x^2 + x^3 + 2*x^4", 4)


def test_compose_with_identity():
    f = pj("2*x - x^3 + i*x^4", 5)
    assert J.compose(f, J.identity(1, 5)) == f
    assert J.compose(J.identity(1, 5), f) == f


@pytest.mark.parametrize("K", [3, 6, 10])
def test_mobius_conjugation(K):
    f, g = pj("x/(1-x)", K), pj("x/2", K)
    got = J.compose(J.compose(g, f), J.invert(g))
    # oracle: (1/2) f(2x) = x/(1-2x)
    assert same(got.components[0], x / (1 - 2 * x))


def test_inverse_signed_catalan():
    inv = J.invert(pj("x + x^2", 4))
    expected = sum(sp.Integer(-1) ** (m - 1) * sp.catalan(m - 1) * x**m for m in range(1, 5))
    assert same(inv.components[0], expected)
    assert inv == pj("x - x^2 + 2*x^3 - 5*x^4", 4)


def test_inverse_trivial_cases():
    assert J.invert(J.identity(2, 4)) == J.identity(2, 4)
    assert J.invert(pj("2*x", 7)) == pj("x/2", 7)


def test_commutator_with_itself():
    f = pj("(2*x1 + x2^2, x2 - x1^2)", 4)
    assert J.is_identity(J.commutator(f, f))


def test_commutator_of_dilation_and_quadratic():
    # oracle: expand (2x) o (x+x^2) o (x/2) o (x+x^2)^-1 symbolically at K=2
    got = J.commutator(pj("2*x", 2), pj("x + x^2", 2))
    ginv = sum(sp.Integer(-1) ** (m - 1) * sp.catalan(m - 1) * x**m for m in range(1, 4))
    chain = 2 * ((x / 2) + (x / 2) ** 2)
    expected = sp.expand(chain.subs(x, ginv))
    assert same(got.components[0], expected)
    assert got == pj("x - 1/2*x^2", 2)


def test_commutator_of_flows_has_valuation_four():
    K = 6
    X = JetVectorField([S.parse_series("x^2", K)])
    Y = JetVectorField([S.parse_series("x^3", K)])
    c = J.commutator(exp_flow(X), exp_flow(Y))
    assert J.tangency_order(c) + 1 == 4


def test_project_examples():
    assert J.project(pj("x + x^5", 8), 4) == J.identity(1, 4)
    f = pj("x + x^5", 8)
    assert J.project(f, 8) == f
    with pytest.raises(PrecisionError):
        J.project(f, 9)


def test_tangency_order_examples():
    assert J.tangency_order(pj("x + x^5", 8)) == 4
    assert J.tangency_order(pj("2*x", 4)) == 0
    assert J.tangency_order(J.identity(1, 4)) == math.inf


def test_linear_part_examples():
    assert J.linear_part(pj("x + x^2", 3)) == LinearMap([[1]])
    assert J.linear_part(pj("(2*x1 + x2^2, 3*x2)", 3)) == LinearMap([[2, 0], [0, 3]])


def test_det_examples():
    assert J.det_linear(pj("x + x^2", 3)) == ExactScalar(GAUSSIAN, 1)
    assert J.det_linear(pj("(2*x1, 3*x2)", 3)) == ExactScalar(GAUSSIAN, 6)


def test_det_matches_sympy():
    L = LinearMap([[1, 2, "i"], [0, "1/2", 3], [4, -1, 1]])
    M = sp.Matrix([[1, 2, sp.I], [0, sp.Rational(1, 2), 3], [4, -1, 1]])
    d = sp.expand(M.det())
    assert L.det() == ExactScalar(GAUSSIAN, f"{sp.re(d)}+{sp.im(d)}i")


def test_power_examples():
    f = pj("x + i*x^3", 5)
    assert J.power(f, 0) == J.identity(1, 5)
    assert J.power(pj("i*x", 6), 4) == J.identity(1, 6)
    K = 7
    got = J.power(pj("x/(1-x)", K), 2)
    assert same(got.components[0], x / (1 - 2 * x))
    assert J.power(f, -2) == J.invert(J.compose(f, f))


def test_invalid_jets_rejected():
    with pytest.raises(DomainError):
        pj("x^2", 3)
    with pytest.raises(DomainError):
        pj("1 + x", 3)
    with pytest.raises(ShapeError):
        J.compose(pj("x", 3), pj("x", 4))


def test_text_and_json_round_trip():
    f = pj("(x1 + i*x2^2, 2*x2 - 1/3*x1*x2)", 4)
    assert pj(J.render(f), 4) == f
    assert J.from_json(J.to_json(f)) == f


# group laws -----------------------------------------------------------------------

@given(jet_st(1, 6), jet_st(1, 6), jet_st(1, 6))
def test_group_axioms_1d(f, g, h):
    assert J.compose(J.compose(f, g), h) == J.compose(f, J.compose(g, h))
    e = J.identity(1, 6)
    fi = J.invert(f)
    assert J.compose(f, fi) == e and J.compose(fi, f) == e


@given(jet_st(2, 4), jet_st(2, 4), jet_st(2, 4))
def test_group_axioms_2d(f, g, h):
    assert J.compose(J.compose(f, g), h) == J.compose(f, J.compose(g, h))
    e = J.identity(2, 4)
    assert J.compose(f, J.invert(f)) == e and J.compose(J.invert(f), f) == e


@settings(max_examples=15)
@given(jet_st(2, 4), jet_st(2, 4))
def test_compose_against_sympy_2d(f, g):
    expected = compose_sympy(jet_to_sympy(f), jet_to_sympy(g), 2, K=4)
    got = J.compose(f, g)
    assert all(same(c, e) for c, e in zip(got.components, expected))


@given(jet_st(2, 4), jet_st(2, 4), st.integers(1, 4))
def test_projection_is_homomorphism(f, g, k):
    assert J.project(J.compose(f, g), k) == J.compose(J.project(f, k), J.project(g, k))


@given(jet_st(2, 4), jet_st(2, 4))
def test_linear_part_and_det_multiplicative(f, g):
    fg = J.compose(f, g)
    assert J.linear_part(fg) == J.linear_part(f) @ J.linear_part(g)
    assert J.det_linear(fg) == J.det_linear(f) * J.det_linear(g)
    assert J.det_linear(J.commutator(f, g)) == ExactScalar(GAUSSIAN, 1)


@given(jet_st(1, 7), tangent_st(1, 7, min_order=2))
def test_filtration_is_normal(g, f):
    assert J.tangency_order(J.commutator(g, f)) >= J.tangency_order(f)


@given(tangent_st(2, 5), tangent_st(2, 5))
def test_tangency_order_of_products(f, g):
    assert J.tangency_order(J.compose(f, g)) >= min(J.tangency_order(f), J.tangency_order(g))
