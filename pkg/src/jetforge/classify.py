"""Constructive classification: linearization, normal forms, centralizers,
finite-group averaging, square-root embeddings and coefficient automorphisms.

Conjugation is always ``g o h o g^-1``; a linearizer ``phi`` of ``f``
satisfies ``f o phi = phi o A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from gmpy2 import mpq

from . import series as S
from .errors import DecompositionError, DomainError, PrecisionError, ResonanceError, ShapeError
from .jetgroup import (
    JetDiffeo,
    LinearMap,
    _trusted,
    commutator,
    compose,
    identity,
    invert,
    is_identity,
    project,
    scale_map,
    tangency_order,
)
from .lie import JetVectorField, exp_flow, normal_field, pushforward
from .scalar import ONE, ExactScalar, ExtElement, Field, nth_root


# resonances ------------------------------------------------------------------------

@dataclass
class ResonanceReport:
    eigenvalues: tuple
    max_degree: int
    violations: list = dc_field(default_factory=list)  # (p, j) with j 1-based

    @property
    def resonant(self) -> bool:
        """True when some relation with |p| >= 2 holds."""
        return any(sum(p) >= 2 for p, _ in self.violations)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [str(e) for e in self.eigenvalues],
            "max_degree": self.max_degree,
            "violations": [{"p": list(p), "j": j} for p, j in self.violations],
        }


def _exponents(n: int, d: int):
    """Exponent vectors of total degree d, in lexicographic order."""
    if n == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _exponents(n - 1, d - first):
            yield (first,) + rest


def _monomial_value(eigs, p):
    v = ONE
    for lam, e in zip(eigs, p):
        for _ in range(e):
            v = v * lam
    return v


def resonance_check(eigs: Sequence, max_degree: int, field: Field | None = None) -> ResonanceReport:
    """All relations ``lam^p = lam_j`` with ``2 <= |p| <= max_degree``, plus repeated eigenvalues."""
    if field is None:
        field = eigs[0].field if isinstance(eigs[0], ExactScalar) else None
    raw = [field.coerce(e) for e in eigs] if field is not None else [mpq(e) for e in eigs]
    if any(not e for e in raw):
        raise DomainError("eigenvalues must be nonzero")
    n = len(raw)
    viol = []
    for i in range(n):
        for j in range(n):
            if i != j and raw[i] == raw[j]:
                viol.append((tuple(int(a == i) for a in range(n)), j + 1))
    for d in range(2, max_degree + 1):
        for p in _exponents(n, d):
            v = _monomial_value(raw, p)
            for j in range(n):
                if v == raw[j]:
                    viol.append((p, j + 1))
    viol.sort(key=lambda pj: (sum(pj[0]), pj[0], pj[1]))
    scalars = tuple(ExactScalar(field, e) if field is not None else e for e in raw)
    return ResonanceReport(scalars, max_degree, viol)


# Poincare linearization -----------------------------------------------------------------

def _pad(f: JetDiffeo, deg: int) -> JetDiffeo:
    return _trusted(S.extend(c, deg) for c in f.components)


def poincare_linearize(f: JetDiffeo) -> JetDiffeo:
    """Tangent-to-identity ``phi`` with ``f o phi = phi o A``, A the (diagonal) linear part."""
    A = f.linear_part()
    if not A.is_diagonal():
        raise DomainError("poincare_linearize needs a diagonal linear part")
    lam = A.diagonal_entries()
    n, K, field = f.nvars, f.deg, f.field
    report = resonance_check([ExactScalar(field, v) for v in lam], K, field)
    if report.resonant:
        bad = [(p, j) for p, j in report.violations if sum(p) >= 2]
        raise ResonanceError(f"resonant eigenvalues: {bad[0][0]} -> {bad[0][1]}", bad)
    # phi is kept as coefficient dicts and lifted to degree d at step d
    phi_terms = [dict(c.terms) for c in identity(n, K, field).components]
    for d in range(2, K + 1):
        fd = project(f, d)
        Ad = A.as_jet(d)
        phi = _trusted(S.TruncatedSeries(field, n, d, dict(t)) for t in phi_terms)
        resid = [a - b for a, b in zip(compose(fd, phi).components, compose(phi, Ad).components)]
        for j, r in enumerate(resid):
            for p, c in r.terms.items():
                if sum(p) != d:
                    continue
                denom = _monomial_value(lam, p) - lam[j]
                phi_terms[j][p] = c / denom
    return _trusted(S.TruncatedSeries(field, n, K, {e: c for e, c in t.items() if c}) for t in phi_terms)


def realize_commutator(h: JetDiffeo, A: LinearMap) -> JetDiffeo:
    """Tangent-to-identity ``phi`` with ``commutator(phi, A) == h``."""
    if tangency_order(h) < 1:
        raise DomainError("h must be tangent to the identity")
    if A.n != h.nvars:
        raise ShapeError("linear map and jet dimensions differ")
    return poincare_linearize(compose(h, A.as_jet(h.deg)))


# one-dimensional normal forms ---------------------------------------------------------

@dataclass
class NormalForm1D:
    k: int
    a: ExactScalar
    rho: ExactScalar
    conjugator: JetDiffeo

    def model(self) -> JetVectorField:
        """``a * X_{k, a*rho}``, the image of the input under the conjugator."""
        K = self.conjugator.deg
        field = self.conjugator.field
        return normal_field(self.k, (self.a * self.rho).value, K, field).scale(self.a.value)

    def to_json(self) -> dict:
        from .jetgroup import to_json as jet_json

        return {"k": self.k, "a": str(self.a), "rho": str(self.rho), "conjugator": jet_json(self.conjugator)}


def _leading(X: JetVectorField):
    if X.nvars != 1:
        raise ShapeError("one-dimensional fields only")
    v = X.valuation()
    if v < 2 or v == float("inf"):
        raise DomainError("normal forms need valuation >= 2")
    return v - 1, X.components[0].coeff_raw((v,))


def residue(X: JetVectorField) -> ExactScalar:
    """Residue of ``dx/X`` at the origin, from a finite Laurent tail."""
    k, a = _leading(X)
    K = X.deg
    if K < 2 * k + 1:
        raise PrecisionError(f"residue of a valuation-{k + 1} field needs K >= {2 * k + 1}")
    c = X.components[0]
    # X = a x^(k+1) (1 + u); need (1 + u)^-1 up to x^k
    unit = S.TruncatedSeries(c.field, 1, k, {(d - k - 1,): v / a for (d,), v in c.terms.items() if d - k - 1 <= k})
    inv = S.reciprocal(unit)
    return ExactScalar(c.field, inv.coeff_raw((k,)) / a)


def normal_form_1d(X: JetVectorField) -> NormalForm1D:
    k, a = _leading(X)
    rho = residue(X)
    K, field = X.deg, X.field
    target = normal_field(k, a * rho.value, K, field).scale(a)
    tc = target.components[0]
    phi = identity(1, K, field)
    Y = X
    x = S.variable(0, 1, K, field)
    for m in range(2, K - k + 1):
        d = k + m
        gap = tc.coeff_raw((d,)) - Y.components[0].coeff_raw((d,))
        if not gap:
            continue
        if m == k + 1:  # pragma: no cover - the residue fixes this degree
            raise RuntimeError("residue mismatch during normalization")
        c = gap / ((m - k - 1) * a)
        psi = _trusted([x + S.TruncatedSeries(field, 1, K, {(m,): c})])
        Y = pushforward(psi, Y)
        phi = compose(psi, phi)
    return NormalForm1D(k, ExactScalar(field, a), rho, phi)


def decide_conjugate_1d(X: JetVectorField, Y: JetVectorField, allow_linear: bool = False):
    """A jet ``phi`` with ``pushforward(phi, X) == Y``, or None when none exists.

    Without ``allow_linear`` the conjugator is tangent to the identity.
    """
    X.components[0]._check(Y.components[0])
    nx, ny = normal_form_1d(X), normal_form_1d(Y)
    if nx.k != ny.k or nx.rho != ny.rho:
        return None
    lin = identity(1, X.deg, X.field)
    if nx.a != ny.a:
        if not allow_linear:
            return None
        # pushing forward by mu*x multiplies a by mu^-k
        mu = nth_root((nx.a / ny.a).value, nx.k, X.field)
        if mu is None:
            return None
        lin = scale_map(mu, 1, X.deg, X.field)
        nx = normal_form_1d(pushforward(lin, X))
    return compose(invert(ny.conjugator), compose(nx.conjugator, lin))


# centralizers ---------------------------------------------------------------------

def centralizer_membership(f: JetDiffeo, k: int, lam):
    """Return ``(t, xi)`` with ``f = (xi x) o exp(t X_{k,lam})`` and ``xi^k = 1``,
    or None when ``f`` does not commute with ``exp X_{k,lam}``."""
    if f.nvars != 1:
        raise ShapeError("centralizer_membership is one-dimensional")
    K, field = f.deg, f.field
    Xk = normal_field(k, lam, K, field)
    if not is_identity(commutator(f, exp_flow(Xk, 1))):
        return None
    xi = f.components[0].coeff_raw((1,))
    if field.pow(xi, k) != ONE:
        raise DecompositionError("linear coefficient is not a k-th root of unity")
    g = f.components[0].scale(ONE / xi)
    t = g.coeff_raw((k + 1,))
    if f != compose(scale_map(xi, 1, K, field), exp_flow(Xk, t)):
        raise DecompositionError("commutes at this truncation but does not split as (xi x) o exp(t X)")
    return ExactScalar(field, t), ExactScalar(field, xi)


# finite groups --------------------------------------------------------------------

def linearize_finite_group(H: Sequence[JetDiffeo]) -> JetDiffeo:
    """Average ``(Dh)^-1 o h`` over a finite group; the result conjugates each h to its linear part."""
    H = list(H)
    if not H:
        raise DomainError("empty group")
    for h in H[1:]:
        H[0]._check(h)
    elems = set(H)
    if not any(is_identity(h) for h in H):
        raise DomainError("the set does not contain the identity")
    for h in H:
        if invert(h) not in elems:
            raise DomainError("the set is not closed under inversion")
        for g in H:
            if compose(h, g) not in elems:
                raise DomainError("the set is not closed under composition")
    group = list(dict.fromkeys(H))
    n, K, field = H[0].nvars, H[0].deg, H[0].field
    acc = [S.zero(n, K, field) for _ in range(n)]
    for h in group:
        t = compose(h.linear_part().inverse().as_jet(K), h)
        acc = [a + c for a, c in zip(acc, t.components)]
    w = ONE / len(group)
    return JetDiffeo(c.scale(w) for c in acc)


# square-root embeddings -------------------------------------------------------------

def cohopf_embed(f: JetDiffeo, out_deg: int | None = None) -> JetDiffeo:
    """The jet ``g`` tangent to the identity with ``E o g = f o E``.

    ``E`` is ``x -> x^2`` in one variable and ``(x1^2, x1 x2, ..., x1 xn)``
    otherwise.  The answer is determined up to degree 2K; it is returned at
    ``out_deg`` (default K).
    """
    if tangency_order(f) < 1:
        raise DomainError("the embedding is defined on jets tangent to the identity")
    K, n, field = f.deg, f.nvars, f.field
    if out_deg is None:
        out_deg = K
    if out_deg > 2 * K:
        raise PrecisionError(f"embedding of a K={K} jet is determined only to degree {2 * K}")
    D = 2 * K + 2
    fp = [S.extend(c, D) for c in f.components]
    x1 = S.variable(0, n, D, field)
    E = [x1 * x1] + [x1 * S.variable(j, n, D, field) for j in range(1, n)]
    F = [S.substitute(c, E) for c in fp]
    unit = S.shift_down(F[0], 0, 2)
    g1 = x1 * S.binomial_power(unit, mpq(1, 2))
    inv_sqrt = S.binomial_power(unit, mpq(-1, 2))
    rest = [S.shift_down(Fj, 0, 1) * inv_sqrt for Fj in F[1:]]
    return _trusted(S.retruncate(c, out_deg) for c in [g1] + rest)


# coefficient automorphisms ----------------------------------------------------------

_TAU_NAMES = {"identity": "identity", "id": "identity", "conjugate": "negate", "conjugation": "negate", "negate": "negate"}


def _negation_allowed(field: Field) -> bool:
    if field.kind == "rationals":
        return False
    # t -> -t respects m iff m(-t) = +-m(t): all exponents of one parity
    parities = {d % 2 for d, c in enumerate(field.minpoly) if c}
    return len(parities) == 1


def coefficient_map(tau: str, field: Field) -> Callable:
    """Raw-coefficient function for a supported field automorphism."""
    kind = _TAU_NAMES.get(tau)
    if kind is None:
        raise DomainError(f"unknown automorphism {tau!r}")
    if kind == "identity":
        return lambda c: c
    if not _negation_allowed(field):
        raise DomainError(f"{tau!r} is not an automorphism of {field!r}")

    def apply(c):
        if not isinstance(c, ExtElement):
            return c
        return field.element([v if j % 2 == 0 else -v for j, v in enumerate(field.coords(c))])

    return apply


def apply_to_series(s: S.TruncatedSeries, tau: str) -> S.TruncatedSeries:
    m = coefficient_map(tau, s.field)
    return S.TruncatedSeries(s.field, s.nvars, s.deg, {e: m(c) for e, c in s.terms.items()})


def coefficient_automorphism(f, tau: str):
    """Apply a field automorphism coefficient-wise to a jet or vector field."""
    comps = [apply_to_series(c, tau) for c in f.components]
    if isinstance(f, JetVectorField):
        return JetVectorField(comps)
    return JetDiffeo(comps)
