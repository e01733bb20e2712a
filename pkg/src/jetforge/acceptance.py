"""The fourteen acceptance checks, shared by the test-suite and ``jetforge selftest``.

Every check uses exact equality and a fixed seed.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from . import series as S
from .classify import (
    centralizer_membership,
    coefficient_automorphism,
    cohopf_embed,
    linearize_finite_group,
    normal_form_1d,
    poincare_linearize,
    realize_commutator,
    residue,
)
from .jetgroup import (
    JetDiffeo,
    LinearMap,
    commutator,
    compose,
    det_linear,
    identity,
    invert,
    is_identity,
    project,
    scale_map,
    tangency_order,
)
from .lie import JetVectorField, bch, bracket, exp_flow, log_jet, normal_field, pushforward
from .sampling import random_field, random_field_1d, random_jet, random_scalar, random_tangent
from .scalar import GAUSSIAN, RATIONALS, ExactScalar, root_of_unity
from .words import GroupWord, evaluate_word, free_group_generators, separation_index, verify_no_relations


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f}s)"


F = GAUSSIAN


def _vf(text, K, field=F):
    return JetVectorField([S.parse_series(text, K, 1, field)])


def check_flow_closed_form():
    K = 16
    X = _vf("x^2", K)
    bad = []
    for t in (mpq(1), mpq(-1), mpq(1, 2)):
        expected = S.TruncatedSeries(F, 1, K, {(i + 1,): t ** i for i in range(K)})
        if exp_flow(X, t).components[0] != expected:
            bad.append(str(t))
    return not bad, "t in {1, -1, 1/2} match x/(1-tx)" if not bad else f"mismatch for t={bad}"


def check_exp_log():
    rng = random.Random(2)
    fails = 0
    for n, K, count in ((1, 16, 200), (2, 8, 50)):
        for _ in range(count):
            X = random_field(rng, n, K, density=0.5)
            if log_jet(exp_flow(X, 1)) != X:
                fails += 1
            f = random_tangent(rng, n, K, density=0.5)
            if exp_flow(log_jet(f), 1) != f:
                fails += 1
    return fails == 0, f"250 fields and 250 jets, {fails} round-trip failures"


def check_bch():
    K = 5
    X, Y = _vf("x^2", K), _vf("x^3", K)
    XY = bracket(X, Y)
    expected = X + Y + XY.scale(mpq(1, 2)) + bracket(X, XY).scale(mpq(1, 12))
    got = bch(X, Y)
    return got == expected, f"bch = {got}; expected {expected}"


def check_commutator_leading_term():
    K = 16
    issues = []
    for k in range(1, 5):
        for l in range(k + 1, 5):
            X, Y = _vf(f"x^{k + 1}", K), _vf(f"x^{l + 1}", K)
            Z = log_jet(commutator(exp_flow(X, 1), exp_flow(Y, 1)))
            lead = _vf(f"{l - k}*x^{k + l + 1}", K)
            rem = (Z - lead).valuation()
            if rem < k + l + 1 + min(k, l):
                c = Z.components[0].coeff_raw((k + l + 1,))
                issues.append(f"(k={k},l={l}) coefficient {c} vs {l - k}")
    return not issues, "all six pairs match" if not issues else "; ".join(issues)


def check_poincare():
    rng = random.Random(5)
    fails = 0
    for n, K, count, eigs in ((1, 12, 100, [2]), (2, 6, 30, [2, 3])):
        A = LinearMap.diagonal(eigs, F).as_jet(K)
        for _ in range(count):
            f = compose(A, random_tangent(rng, n, K, bound=2))
            phi = poincare_linearize(f)
            if compose(f, phi) != compose(phi, A):
                fails += 1
    refine = 0
    for n, K, eigs in ((1, 12, [2]), (2, 6, [2, 3])):
        A = LinearMap.diagonal(eigs, F).as_jet(K)
        for order in range(1, K - 1):
            h = random_tangent(rng, n, K, min_order=order, density=1.0)
            if tangency_order(poincare_linearize(compose(A, h))) != tangency_order(h):
                refine += 1
    ok = fails == 0 and refine == 0
    return ok, f"130 linearizations ({fails} failures), G_k refinement failures: {refine}"


def check_commutator_realization():
    rng = random.Random(6)
    fails = 0
    for n, K in ((1, 12), (2, 6)):
        A = LinearMap.scalar(2, n, F)
        for _ in range(100):
            h = random_tangent(rng, n, K, bound=2)
            phi = realize_commutator(h, A)
            if commutator(phi, A.as_jet(K)) != h:
                fails += 1
    return fails == 0, f"200 realizations, {fails} failures"


def _frac_poly_mul(a, b, K):
    out = [Fraction(0)] * (K + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[: K + 1 - i]):
                out[i + j] += x * y
    return out


def _frac_compose(p, q, K):
    out = [Fraction(0)] * (K + 1)
    for c in reversed(p):
        out = _frac_poly_mul(out, q, K)
        out[0] += c
    return out


def brute_force_rho(coeffs, k, K):
    """Residue by conjugating to ``a x^(k+1) + b x^(2k+1)``: solve ``psi' Y = T(psi)`` degree by degree."""
    Y = [Fraction(c) for c in coeffs]
    a = Y[k + 1]
    psi = [Fraction(0), Fraction(1)] + [Fraction(0)] * (K - 1)
    b = Fraction(0)

    def residual(psi, b):
        dpsi = [i * psi[i] for i in range(1, K + 1)] + [Fraction(0)]
        T = [Fraction(0)] * (K + 1)
        T[k + 1] = a
        if 2 * k + 1 <= K:
            T[2 * k + 1] = b
        return [u - v for u, v in zip(_frac_poly_mul(dpsi, Y, K), _frac_compose(T, psi, K))]

    for d in range(k + 2, K + 1):
        m = d - k
        if m == k + 1:
            r0 = residual(psi, Fraction(0))[d]
            r1 = residual(psi, Fraction(1))[d]
            b = -r0 / (r1 - r0)
            continue
        trial = list(psi)
        r0 = residual(trial, b)[d]
        trial[m] += 1
        r1 = residual(trial, b)[d]
        psi[m] -= r0 / (r1 - r0)
    return -b / (a * a)


def check_normal_forms():
    rng = random.Random(7)
    K = 12
    fails = []
    for idx in range(100):
        v = 2 + idx % 2
        X = random_field_1d(rng, K, v, bound=2)
        nf = normal_form_1d(X)
        if pushforward(nf.conjugator, X) != nf.model():
            fails.append(f"#{idx} conjugator")
        psi = random_tangent(rng, 1, K, bound=2)
        nf2 = normal_form_1d(pushforward(psi, X))
        if (nf2.k, nf2.rho, nf2.a) != (nf.k, nf.rho, nf.a):
            fails.append(f"#{idx} invariance")
    for idx in range(10):
        v = 2 + idx % 2
        X = random_field_1d(rng, K, v, field=RATIONALS, bound=2)
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in X.components[0].dense()]
        rho_bf = brute_force_rho(coeffs, v - 1, K)
        rho = residue(X).value
        if Fraction(int(rho.numerator), int(rho.denominator)) != rho_bf:
            fails.append(f"brute-force #{idx}")
    return not fails, "100 fields, 10 brute-force residues" + ("" if not fails else f"; failures: {fails[:5]}")


def check_averaging():
    rng = random.Random(8)
    K = 8
    fails = 0
    total = 0
    for order in (2, 4):
        xi = root_of_unity(order, F).value
        rot = scale_map(xi, 1, K, F)
        for _ in range(10):
            psi = random_tangent(rng, 1, K, bound=2)
            psi_inv = invert(psi)
            H = [compose(psi_inv, compose(_power(rot, j), psi)) for j in range(order)]
            phi = linearize_finite_group(H)
            for h in H:
                total += 1
                if compose(phi, h) != compose(h.linear_part().as_jet(K), phi):
                    fails += 1
    return fails == 0, f"{total} group elements linearized, {fails} failures"


def _power(f, m):
    out = identity(f.nvars, f.deg, f.field)
    for _ in range(m):
        out = compose(out, f)
    return out


def check_centralizer():
    rng = random.Random(9)
    K = 12
    problems = []
    for k in (2, 4):
        for lam in (mpq(0), mpq(1, 2)):
            Xk = normal_field(k, lam, K, F)
            g = exp_flow(Xk, 1)
            xi = root_of_unity(k, F).value
            for t in (mpq(1), mpq(-2), mpq(1, 3), mpq(5, 2), mpq(0)):
                for j in range(2):
                    z = xi ** j if j else mpq(1)
                    f = compose(scale_map(z, 1, K, F), exp_flow(Xk, t))
                    if not is_identity(commutator(f, g)):
                        problems.append(f"k={k} t={t} no commute")
                        continue
                    got = centralizer_membership(f, k, lam)
                    if got is None or got[0].value != t or got[1].value != z:
                        problems.append(f"k={k} t={t} xi^{j} decomposed as {got}")
    rejected = 0
    for i in range(20):
        k = (2, 4)[i % 2]
        lam = mpq(i % 3, 2)
        t = random_scalar(rng, F)
        f = exp_flow(normal_field(k, lam, K, F), t)
        # the bump shows up in the commutator at degree m + k
        m = rng.randint(2, K - k)
        while (m - 1) % k == 0:
            m = rng.randint(2, K - k)
        bump = S.TruncatedSeries(F, 1, K, {(m,): random_scalar(rng, F, nonzero=True)})
        f = JetDiffeo([f.components[0] + bump])
        if centralizer_membership(f, k, lam) is None:
            rejected += 1
    ok = not problems and rejected == 20
    return ok, f"40 members decomposed ({len(problems)} problems), {rejected}/20 perturbations rejected"


def check_free_subgroup():
    report = verify_no_relations(free_group_generators(24, RATIONALS), 6)
    ok = report.checked == 1456 and not report.identity and not report.undecided
    return ok, report.summary()


def check_relation_instance():
    bad = []
    for K in (4, 8, 16):
        x = S.variable(0, 1, K, F)
        a = JetDiffeo([x * S.reciprocal(S.constant(1, 1, K, F) - x)])
        B = scale_map(mpq(1, 2), 1, K, F)
        lhs = evaluate_word([a, B], GroupWord(((1, 1), (0, 1), (1, -1))))
        rhs = evaluate_word([a, B], GroupWord(((0, 2),)))
        if lhs != rhs:
            bad.append(K)
    return not bad, "b^2 a b^-2 = a^2 at K in {4, 8, 16}" if not bad else f"fails at K={bad}"


def check_separation():
    rng = random.Random(12)
    K = 10
    fails = 0
    for i in range(200):
        if i % 4 == 0:
            f = random_jet(rng, 1 + i % 2, K if i % 2 == 0 else 5)
        else:
            n = 1 + (i % 3 == 0)
            Kn = K if n == 1 else 5
            order = rng.randint(1, Kn - 1)
            f = random_tangent(rng, n, Kn, min_order=order, density=0.3)
            if is_identity(f):
                f = random_tangent(rng, n, Kn, min_order=order, density=1.0)
        brute = next(k for k in range(1, f.deg + 1) if not is_identity(project(f, k)))
        if separation_index(f) != brute:
            fails += 1
    return fails == 0, f"200 jets, {fails} disagreements with the projection scan"


def check_cohopf():
    rng = random.Random(13)
    fails = 0
    K = 12
    minus = scale_map(-1, 1, K, F)
    for _ in range(100):
        f, g = random_tangent(rng, 1, K, bound=2), random_tangent(rng, 1, K, bound=2)
        ef, eg = cohopf_embed(f), cohopf_embed(g)
        if cohopf_embed(compose(f, g)) != compose(ef, eg):
            fails += 1
        if compose(minus, ef) != compose(ef, minus):
            fails += 1
    K2 = 6
    x1 = S.variable(0, 2, K2, F)
    E = [x1 * x1, x1 * S.variable(1, 2, K2, F)]
    for _ in range(20):
        f, g = random_tangent(rng, 2, K2, bound=2), random_tangent(rng, 2, K2, bound=2)
        ef, eg = cohopf_embed(f), cohopf_embed(g)
        if cohopf_embed(compose(f, g)) != compose(ef, eg):
            fails += 1
        lhs = [S.substitute(e, ef.components) for e in E]
        rhs = [S.substitute(c, E) for c in f.components]
        if lhs != rhs:
            fails += 1
    return fails == 0, f"100 one-variable and 20 two-variable pairs, {fails} failures"


def check_plumbing():
    rng = random.Random(14)
    fails = {"axioms": 0, "projection": 0, "det": 0, "automorphism": 0}
    for i in range(200):
        n, K = (1, 6) if i % 2 == 0 else (2, 4)
        f, g, h = (random_jet(rng, n, K, density=0.4) for _ in range(3))
        e = identity(n, K, F)
        if compose(compose(f, g), h) != compose(f, compose(g, h)):
            fails["axioms"] += 1
        fi = invert(f)
        if compose(f, fi) != e or compose(fi, f) != e or compose(f, e) != f or compose(e, f) != f:
            fails["axioms"] += 1
        k = rng.randint(1, K)
        if project(compose(f, g), k) != compose(project(f, k), project(g, k)):
            fails["projection"] += 1
        if det_linear(compose(f, g)) != det_linear(f) * det_linear(g) or det_linear(commutator(f, g)) != ExactScalar(F, 1):
            fails["det"] += 1
        sf, sg = coefficient_automorphism(f, "conjugate"), coefficient_automorphism(g, "conjugate")
        if coefficient_automorphism(compose(f, g), "conjugate") != compose(sf, sg):
            fails["automorphism"] += 1
        if coefficient_automorphism(invert(f), "conjugate") != invert(sf):
            fails["automorphism"] += 1
    return not any(fails.values()), "200 samples each: " + ", ".join(f"{k} {v} failures" for k, v in fails.items())


CHECKS = [
    (1, "flow closed form", check_flow_closed_form),
    (2, "exp/log bijectivity", check_exp_log),
    (3, "BCH coefficients 1/2 and 1/12", check_bch),
    (4, "commutator leading term and remainder", check_commutator_leading_term),
    (5, "Poincare linearization", check_poincare),
    (6, "commutator realization", check_commutator_realization),
    (7, "normal-form invariants", check_normal_forms),
    (8, "finite-group averaging", check_averaging),
    (9, "centralizer decomposition", check_centralizer),
    (10, "free-subgroup certificate", check_free_subgroup),
    (11, "exact relation instance", check_relation_instance),
    (12, "separation oracle", check_separation),
    (13, "square-root embedding", check_cohopf),
    (14, "homomorphism suite", check_plumbing),
]


def run_check(number: int) -> CheckResult:
    num, name, fn = CHECKS[number - 1]
    start = time.perf_counter()
    passed, detail = fn()
    return CheckResult(num, name, bool(passed), detail, time.perf_counter() - start)


def run_all() -> list[CheckResult]:
    return [run_check(n) for n, _, _ in CHECKS]
