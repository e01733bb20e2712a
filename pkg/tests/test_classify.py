import random

import pytest
import sympy as sp
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from jetforge import classify as C
from jetforge import jetgroup as J
from jetforge import series as S
from jetforge.errors import DomainError, PrecisionError, ResonanceError, ShapeError
from jetforge.jetgroup import LinearMap, parse_jet
from jetforge.lie import JetVectorField, exp_flow, normal_field, parse_field, pushforward
from jetforge.sampling import random_field_1d, random_tangent
from jetforge.scalar import GAUSSIAN, ExactScalar, Field, root_of_unity
from oracle import same, to_sympy, x
from strategies import field_st, small_q, tangent_st

SQRT2 = Field.simple_extension("t^2-2")


def pj(text, K, n=None, field=GAUSSIAN):
    return parse_jet(text, K, field, n)


def pf(text, K, n=None):
    return parse_field(text, K, GAUSSIAN, n)


def q(v):
    return ExactScalar(GAUSSIAN, v)


def homological_oracle(a_coeffs, lam, K):
    """Solve f(phi(x)) = phi(lam x) for phi = x + sum c_d x^d with sympy unknowns."""
    cs = sp.symbols(f"c2:{K + 1}")
    phi = x + sum(c * x**d for c, d in zip(cs, range(2, K + 1)))
    f = sum(a * x**d for d, a in a_coeffs.items())
    diff = sp.expand(f.subs(x, phi) - phi.subs(x, lam * x))
    eqs = [diff.coeff(x, d) for d in range(2, K + 1)]
    sol = sp.solve(eqs, cs, dict=True)[0]
    return sp.expand(phi.subs(sol))


# resonance ------------------------------------------------------------------------

def test_no_resonance_for_two_and_three():
    rep = C.resonance_check([q(2), q(3)], 6)
    assert rep.violations == [] and not rep.resonant
    # brute force: 2^a 3^b in {2, 3} only for a + b = 1
    hits = [(a, b) for a in range(7) for b in range(7) if 2 <= a + b <= 6 and 2**a * 3**b in (2, 3)]
    assert hits == []


def test_square_resonance():
    rep = C.resonance_check([q(2), q(4)], 2)
    assert ((2, 0), 2) in rep.violations
    assert rep.resonant


def test_repeated_eigenvalue_is_reported():
    rep = C.resonance_check([q(3), q(3)], 4)
    assert ((1, 0), 2) in rep.violations and ((0, 1), 1) in rep.violations
    assert not rep.resonant  # only |p| = 1 relations


def test_roots_of_unity_resonate():
    assert C.resonance_check([q("i")], 5).violations == [((5,), 1)]
    assert C.resonance_check([q(-1)], 4).violations == [((3,), 1)]


def test_zero_eigenvalue_rejected():
    with pytest.raises(DomainError):
        C.resonance_check([q(0), q(2)], 3)


def test_resonance_report_json_sorted():
    js = C.resonance_check([q(2), q(4), q(8)], 3).to_json()
    keys = [(sum(v["p"]), v["p"]) for v in js["violations"]]
    assert keys == sorted(keys)
    assert js["eigenvalues"] == ["2", "4", "8"]


@given(st.lists(st.integers(1, 3), min_size=2, max_size=2))
def test_resonance_against_brute_force(exps):
    eigs = [2**e for e in exps]
    rep = C.resonance_check([q(v) for v in eigs], 4)
    brute = sorted(
        ((a, b), j + 1)
        for a in range(5)
        for b in range(5)
        for j in range(2)
        if 2 <= a + b <= 4 and eigs[0] ** a * eigs[1] ** b == eigs[j]
    )
    assert sorted(v for v in rep.violations if sum(v[0]) >= 2) == brute


# Poincare linearization --------------------------------------------------------------

def test_poincare_quadratic():
    K = 3
    f = pj("2*x + x^2", K)
    phi = C.poincare_linearize(f)
    assert J.compose(f, phi) == J.compose(phi, pj("2*x", K))
    expected = homological_oracle({1: 2, 2: 1}, 2, K)
    assert same(phi.components[0], expected)
    assert phi == pj("x + 1/2*x^2 + 1/6*x^3", K)


def test_poincare_of_linear_map_is_identity():
    assert C.poincare_linearize(pj("2*x", 6)) == J.identity(1, 6)
    assert C.poincare_linearize(pj("(2*x1, 3*x2)", 4)) == J.identity(2, 4)


def test_poincare_refuses_resonance():
    with pytest.raises(ResonanceError) as err:
        C.poincare_linearize(pj("(2*x1 + x2^2, 4*x2)", 3))
    assert ((2, 0), 2) in err.value.violations


def test_poincare_needs_diagonal():
    with pytest.raises(DomainError):
        C.poincare_linearize(pj("(2*x1 + x2, 3*x2)", 3))


@pytest.mark.parametrize("lam", [mpq(1, 2), mpq(3), mpq(-2, 3)])
def test_poincare_against_homological_oracle(lam):
    K = 5
    coeffs = {1: lam, 2: 1, 3: mpq(-1, 2), 5: 2}
    f = S.from_terms({(d,): c for d, c in coeffs.items()}, 1, K)
    phi = C.poincare_linearize(J.JetDiffeo([f]))
    sym = {d: sp.Rational(int(c.numerator), int(c.denominator)) for d, c in coeffs.items()}
    lam_s = sym[1]
    assert same(phi.components[0], homological_oracle(sym, lam_s, K))


@pytest.mark.parametrize("k", [2, 3])
def test_poincare_respects_tangency_order(k):
    K = 8
    rng = random.Random(k)
    h = random_tangent(rng, 1, K, min_order=k)
    A = LinearMap.scalar(mpq(1, 3), 1)
    phi = C.poincare_linearize(J.compose(A.as_jet(K), h))
    assert J.tangency_order(phi) >= k


@settings(max_examples=25)
@given(tangent_st(2, 4), st.sampled_from([(2, 3), (mpq(1, 2), 5), (3, mpq(-1, 2))]))
def test_linearization_residual_2d(h, eigs):
    A = LinearMap.diagonal(list(eigs))
    f = J.compose(A.as_jet(4), h)
    phi = C.poincare_linearize(f)
    assert J.compose(f, phi) == J.compose(phi, A.as_jet(4))
    assert J.conj(phi, A.as_jet(4)) == f


# commutator realization -------------------------------------------------------------

def test_realize_identity():
    A = LinearMap.scalar(2, 1)
    assert C.realize_commutator(J.identity(1, 5), A) == J.identity(1, 5)


def test_realize_one_dimensional():
    K = 6
    h = pj("x + x^2", K)
    A = LinearMap.scalar(2, 1)
    phi = C.realize_commutator(h, A)
    assert J.commutator(phi, A.as_jet(K)) == h


def test_realize_two_dimensional():
    K = 4
    h = pj("(x1 + x2^2, x2)", K)
    A = LinearMap.scalar(2, 2)
    phi = C.realize_commutator(h, A)
    assert J.commutator(phi, A.as_jet(K)) == h


@settings(max_examples=25)
@given(tangent_st(1, 7))
def test_realize_property(h):
    A = LinearMap.scalar(mpq(1, 2), 1)
    phi = C.realize_commutator(h, A)
    assert J.tangency_order(phi) >= 1
    assert J.commutator(phi, A.as_jet(7)) == h


def test_realize_shape_mismatch():
    with pytest.raises(ShapeError):
        C.realize_commutator(pj("x + x^2", 4), LinearMap.scalar(2, 2))


# normal forms --------------------------------------------------------------------

def test_normal_form_of_model_field():
    nf = C.normal_form_1d(pf("x^2", 6))
    assert (nf.k, nf.a, nf.rho) == (1, q(1), q(0))
    assert nf.conjugator == J.identity(1, 6)


def test_normal_form_with_residue():
    K = 8
    X = pf("x^2 + x^3", K)
    nf = C.normal_form_1d(X)
    assert (nf.k, nf.a, nf.rho) == (1, q(1), q(-1))
    # oracle: residue of dx/X
    assert sp.residue(1 / (x**2 + x**3), x, 0) == -1
    assert pushforward(nf.conjugator, X) == nf.model() == normal_field(1, -1, K)


def test_normal_form_weighted_leading_term():
    nf = C.normal_form_1d(pf("2*x^3", 8))
    assert (nf.k, nf.a, nf.rho) == (2, q(2), q(0))


@pytest.mark.parametrize("text", ["x^2 + 3*x^3 - x^5", "-x^3 + x^4 + 2*x^5 - i*x^6", "1/2*x^4 + x^7 + x^8"])
def test_residue_against_sympy(text):
    K = 9
    X = pf(text, K)
    expr = to_sympy(X.components[0])
    assert C.residue(X) == ExactScalar(GAUSSIAN, str(sp.residue(1 / expr, x, 0)).replace("I", "i").replace("*", ""))
    nf = C.normal_form_1d(X)
    assert pushforward(nf.conjugator, X) == nf.model()


def test_residue_needs_precision():
    with pytest.raises(PrecisionError):
        C.residue(pf("x^3 + x^4", 4))
    with pytest.raises(DomainError):
        C.normal_form_1d(pf("x + x^2", 4))
    with pytest.raises(ShapeError):
        C.normal_form_1d(pf("(x1^2, x2^2)", 4))


@settings(max_examples=25)
@given(tangent_st(1, 9), st.integers(1, 3), st.data())
def test_normal_form_invariance(phi, k, data):
    X = data.draw(field_st(1, 9, min_val=k + 1).filter(lambda v: v.valuation() == k + 1))
    nx, ny = C.normal_form_1d(X), C.normal_form_1d(pushforward(phi, X))
    assert (nx.k, nx.a, nx.rho) == (ny.k, ny.a, ny.rho)


@settings(max_examples=25)
@given(small_q.filter(bool), st.integers(1, 3), st.data())
def test_normal_form_under_homothety(mu, k, data):
    X = data.draw(field_st(1, 9, min_val=k + 1).filter(lambda v: v.valuation() == k + 1))
    nx = C.normal_form_1d(X)
    ny = C.normal_form_1d(pushforward(J.scale_map(mu, 1, 9), X))
    assert (ny.k, ny.rho) == (nx.k, nx.rho)
    assert ny.a == nx.a * ExactScalar(GAUSSIAN, mu) ** (-k)


def test_normal_form_with_unit_leading_coefficient_is_model():
    K = 9
    X = pf("x^3 + 5*x^5 - x^7", K)
    nf = C.normal_form_1d(X)
    assert nf.model() == normal_field(2, nf.rho.value, K)


def test_normal_form_json():
    js = C.normal_form_1d(pf("x^2 + x^3", 5)).to_json()
    assert (js["k"], js["a"], js["rho"]) == (1, "1", "-1")


# conjugacy decision ---------------------------------------------------------------

def test_different_residues_not_conjugate():
    assert C.decide_conjugate_1d(pf("x^2", 8), pf("x^2 + x^3", 8)) is None


def test_random_conjugate_found():
    K = 10
    rng = random.Random(5)
    X = random_field_1d(rng, K, 3)
    phi = random_tangent(rng, 1, K)
    Y = pushforward(phi, X)
    psi = C.decide_conjugate_1d(X, Y)
    assert psi is not None and pushforward(psi, X) == Y


def test_linear_conjugacy():
    K = 6
    X, Y = pf("x^2", K), pf("4*x^2", K)
    assert C.decide_conjugate_1d(X, Y) is None
    psi = C.decide_conjugate_1d(X, Y, allow_linear=True)
    assert psi == pj("1/4*x", K)
    assert pushforward(psi, X) == Y


def test_linear_conjugacy_needs_a_root():
    # 2 is not a square in Q(i)
    assert C.decide_conjugate_1d(pf("x^3", 6), pf("2*x^3", 6), allow_linear=True) is None
    psi = C.decide_conjugate_1d(pf("x^3", 6), pf("-x^3", 6), allow_linear=True)
    assert pushforward(psi, pf("x^3", 6)) == pf("-x^3", 6)


@settings(max_examples=20)
@given(field_st(1, 7).filter(lambda v: v.valuation() == 2), tangent_st(1, 7), small_q.filter(bool))
def test_conjugacy_round_trip(X, phi, mu):
    Y = pushforward(J.compose(J.scale_map(mu, 1, 7), phi), X)
    psi = C.decide_conjugate_1d(X, Y, allow_linear=True)
    assert psi is not None and pushforward(psi, X) == Y


# centralizers --------------------------------------------------------------------

def test_centralizer_flow_element():
    K = 8
    f = exp_flow(normal_field(1, 0, K), 3)
    assert C.centralizer_membership(f, 1, 0) == (q(3), q(1))


def test_centralizer_with_torsion():
    K = 8
    f = J.compose(pj("-x", K), exp_flow(normal_field(2, 0, K), 1))
    g = exp_flow(normal_field(2, 0, K), 1)
    assert J.is_identity(J.commutator(f, g))
    assert C.centralizer_membership(f, 2, 0) == (q(1), q(-1))


def test_centralizer_rejects_noncommuting():
    f = pj("x + x^2", 5)
    assert not J.is_identity(J.commutator(f, exp_flow(normal_field(2, 0, 5), 1)))
    assert C.centralizer_membership(f, 2, 0) is None


@pytest.mark.parametrize("k, lam", [(1, mpq(2)), (2, mpq(-1, 3)), (4, mpq(1))])
def test_centralizer_torsion_count(k, lam):
    K = 12
    xi = root_of_unity(k, GAUSSIAN)
    flow = exp_flow(normal_field(k, lam, K), mpq(1, 2))
    found = set()
    for j in range(k):
        f = J.compose(J.scale_map((xi**j).value, 1, K), flow)
        t, z = C.centralizer_membership(f, k, lam)
        assert t == q(mpq(1, 2)) and z**k == q(1)
        found.add(z)
    assert len(found) == k  # k - 1 nontrivial torsion linear parts plus 1


def test_no_primitive_cube_root_over_gaussians():
    assert root_of_unity(3, GAUSSIAN) is None
    eisenstein = Field.simple_extension("t^2+t+1")
    assert root_of_unity(3, eisenstein) is not None


# finite groups ---------------------------------------------------------------------

def test_average_of_linear_group():
    K = 5
    H = [J.identity(1, K), pj("-x", K)]
    assert C.linearize_finite_group(H) == J.identity(1, K)


@pytest.mark.parametrize("order", [2, 4])
def test_average_conjugated_cyclic_group(order):
    K = 6
    xi = root_of_unity(order, GAUSSIAN)
    psi = pj("x + x^2", K)
    lin = [J.scale_map((xi**j).value, 1, K) for j in range(order)]
    H = [J.conj(J.invert(psi), h) for h in lin]
    phi = C.linearize_finite_group(H)
    for h in H:
        assert J.compose(phi, h) == J.compose(h.linear_part().as_jet(K), phi)
    assert sorted(map(J.render, (J.conj(phi, h) for h in H))) == sorted(map(J.render, lin))


def test_average_two_dimensional():
    K = 4
    psi = pj("(x1 + x2^2, x2 - x1*x2)", K)
    sigma = pj("(x2, x1)", K)
    H = [J.identity(2, K), J.conj(psi, sigma)]
    phi = C.linearize_finite_group(H)
    assert J.compose(phi, H[1]) == J.compose(H[1].linear_part().as_jet(K), phi)


def test_average_rejects_non_groups():
    K = 4
    with pytest.raises(DomainError):
        C.linearize_finite_group([J.identity(1, K), pj("-x + x^2", K)])
    with pytest.raises(DomainError):
        C.linearize_finite_group([pj("-x", K)])
    with pytest.raises(DomainError):
        C.linearize_finite_group([J.identity(1, K), pj("i*x", K)])


# square-root embeddings ---------------------------------------------------------------

def test_cohopf_identity():
    assert C.cohopf_embed(J.identity(1, 6)) == J.identity(1, 6)
    assert C.cohopf_embed(J.identity(3, 4)) == J.identity(3, 4)


def test_cohopf_quadratic():
    K = 6
    g = C.cohopf_embed(pj("x + x^2", K))
    assert same(g.components[0], x * sp.sqrt(1 + x**2))
    assert g == pj("x + 1/2*x^3 - 1/8*x^5", K)
    # g(x)^2 = f(x^2)
    sq = g.components[0] * g.components[0]
    assert sq == S.parse_series("x^2 + x^4", K)


def test_cohopf_output_degree():
    f = pj("x + x^2", 3)
    g = C.cohopf_embed(f, out_deg=6)
    assert same(g.components[0], x * sp.sqrt(1 + x**2))
    with pytest.raises(PrecisionError):
        C.cohopf_embed(f, out_deg=7)
    with pytest.raises(DomainError):
        C.cohopf_embed(pj("2*x", 3))


def test_cohopf_two_variables_solves_equation():
    K = 4
    f = pj("(x1 + x2^2, x2 + x1*x2)", K)
    g = C.cohopf_embed(f, out_deg=2 * K)
    D = 2 * K
    x1, x2 = S.variable(0, 2, D), S.variable(1, 2, D)
    E = [x1 * x1, x1 * x2]
    lhs = [g.components[0] * g.components[0], g.components[0] * g.components[1]]
    rhs = [S.substitute(S.extend(c, D), E) for c in f.components]
    assert lhs == rhs


@given(tangent_st(1, 6), tangent_st(1, 6))
def test_cohopf_is_homomorphism(f, g):
    E = C.cohopf_embed
    assert E(J.compose(f, g)) == J.compose(E(f), E(g))


@given(tangent_st(2, 3), tangent_st(2, 3))
def test_cohopf_is_homomorphism_2d(f, g):
    E = C.cohopf_embed
    assert E(J.compose(f, g)) == J.compose(E(f), E(g))


@given(tangent_st(1, 6))
def test_cohopf_commutes_with_involution(f):
    g = C.cohopf_embed(f)
    minus = pj("-x", 6)
    assert J.compose(minus, g) == J.compose(g, minus)


# coefficient automorphisms ------------------------------------------------------------

def test_conjugation_examples():
    f = pj("x + i*x^2", 4)
    assert C.coefficient_automorphism(f, "conjugate") == pj("x - i*x^2", 4)
    assert C.coefficient_automorphism(f, "identity") == f


def test_negation_in_quadratic_extension():
    f = pj("x + t*x^2 - 1/2*x^3", 3, field=SQRT2)
    assert C.coefficient_automorphism(f, "negate") == pj("x - t*x^2 - 1/2*x^3", 3, field=SQRT2)


def test_unsupported_automorphisms():
    cubic = Field.simple_extension("t^3-2")
    with pytest.raises(DomainError):
        C.coefficient_automorphism(pj("x + t*x^2", 3, field=cubic), "negate")
    with pytest.raises(DomainError):
        C.coefficient_automorphism(pj("x", 3), "frobenius")


def test_automorphism_on_vector_fields():
    X = pf("i*x^2 + x^3", 4)
    assert C.coefficient_automorphism(X, "conjugate") == pf("-i*x^2 + x^3", 4)


@given(tangent_st(1, 6), tangent_st(1, 6))
def test_automorphism_is_homomorphism(f, g):
    s = lambda h: C.coefficient_automorphism(h, "conjugate")  # noqa: E731
    assert s(J.compose(f, g)) == J.compose(s(f), s(g))
    assert s(J.invert(f)) == J.invert(s(f))
    assert s(s(f)) == f


@given(field_st(1, 6))
def test_automorphism_commutes_with_exp(X):
    s = lambda h: C.coefficient_automorphism(h, "conjugate")  # noqa: E731
    assert s(exp_flow(X)) == exp_flow(s(X))


def test_automorphism_keeps_the_kind():
    assert isinstance(C.coefficient_automorphism(pf("x^2", 3), "id"), JetVectorField)
