"""Independent sympy oracles: expand, compose and truncate symbolically."""
from __future__ import annotations

import sympy as sp

from jetforge import series as S
from jetforge.scalar import GAUSSIAN, RATIONALS

X = sp.symbols("x1:5")
x = sp.Symbol("x")


def _syms(n):
    return [x] if n == 1 else list(X[:n])


def raw_to_sympy(field, c):
    coords = field.coords(c)
    q = [sp.Rational(int(v.numerator), int(v.denominator)) for v in coords]
    if field.degree == 1:
        return q[0]
    if field is GAUSSIAN or field == GAUSSIAN:
        return q[0] + sp.I * q[1]
    raise NotImplementedError("oracle covers Q and Q(i)")


def to_sympy(s: S.TruncatedSeries):
    vs = _syms(s.nvars)
    out = sp.Integer(0)
    for e, c in s.terms.items():
        term = raw_to_sympy(s.field, c)
        for v, p in zip(vs, e):
            term *= v**p
        out += term
    return out


def truncate(expr, n, K):
    """Drop monomials of total degree > K from a polynomial (or analytic) expression."""
    vs = _syms(n)
    if n == 1:
        expr = sp.series(expr, x, 0, K + 1).removeO() if not sp.sympify(expr).is_polynomial(x) else expr
    poly = sp.Poly(sp.expand(expr), *vs)
    return sum((c * sp.prod([v**p for v, p in zip(vs, m)]) for m, c in poly.terms() if sum(m) <= K), sp.Integer(0))


def from_sympy(expr, n, K, field=GAUSSIAN) -> S.TruncatedSeries:
    vs = _syms(n)
    poly = sp.Poly(sp.expand(truncate(expr, n, K)), *vs)
    terms = {}
    for m, c in poly.terms():
        re, im = sp.re(c), sp.im(c)
        if im != 0:
            terms[tuple(m)] = f"{re}+{im}i" if re != 0 else f"{im}i"
        else:
            terms[tuple(m)] = str(re)
    return S.from_terms(terms, n, K, field)


def _poly(expr, vs):
    return sp.Poly(expr, *vs, domain="QQ_I")


def _cut(p, vs, K):
    return sp.Poly.from_dict({m: c for m, c in p.as_dict().items() if sum(m) <= K} or {(0,) * len(vs): 0}, *vs, domain="QQ_I")


def compose_sympy(f_exprs, g_exprs, n, K=None):
    """Substitute g into f; with ``K`` the products are truncated as they are formed."""
    vs = _syms(n)
    if K is None:
        return [sp.expand(e.subs(dict(zip(vs, g_exprs)), simultaneous=True)) for e in f_exprs]
    gs = [_poly(g, vs) for g in g_exprs]
    out = []
    for e in f_exprs:
        acc = _poly(0, vs)
        for m, c in _poly(e, vs).as_dict().items():
            term = _poly(c, vs)
            for gi, p in zip(gs, m):
                for _ in range(p):
                    term = _cut(term * gi, vs, K)
            acc = acc + term
        out.append(acc.as_expr())
    return out


def jet_to_sympy(f):
    return [to_sympy(c) for c in f.components]


def same(series_obj, expr) -> bool:
    """Exact comparison of a jet component with a sympy expression truncated at its K."""
    return sp.expand(to_sympy(series_obj) - truncate(expr, series_obj.nvars, series_obj.deg)) == 0


__all__ = ["x", "X", "to_sympy", "truncate", "from_sympy", "compose_sympy", "jet_to_sympy", "same", "RATIONALS"]
