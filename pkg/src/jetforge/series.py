"""Truncated multivariate power series (jets) with exact coefficients.

A jet of truncation degree ``K`` stores exactly the monomials of total
degree <= K.  Operands of binary operations must agree on the number of
variables, on ``K`` and on the field; nothing is retruncated silently.

Univariate kernels work on dense coefficient lists; multivariate ones on
sparse ``{exponent tuple: coefficient}`` maps.
"""
from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import parsing
from .errors import DomainError, FieldMismatchError, ParseError, PrecisionError, ShapeError
from .scalar import DEFAULT_FIELD, ONE, ZERO, ExactScalar, ExtElement, Field, evaluate_scalar_ast, render_rational


class TruncatedSeries:
    """Polynomial of total degree <= ``deg`` standing for a power-series jet.

    ``terms`` maps exponent tuples to nonzero raw coefficients (see
    :mod:`jetforge.scalar`).  Instances are immutable; build them with
    :func:`from_terms`, :func:`variable`, :func:`constant` or the parser.
    """

    __slots__ = ("field", "nvars", "deg", "terms", "_dense", "_hash")

    def __init__(self, field: Field, nvars: int, deg: int, terms: dict):
        self.field = field
        self.nvars = nvars
        self.deg = deg
        self.terms = terms
        self._dense = None
        self._hash = None

    # construction helpers -------------------------------------------------

    @classmethod
    def _from_dense(cls, field, deg, coeffs):
        terms = {(d,): c for d, c in enumerate(coeffs) if c and d <= deg}
        s = cls(field, 1, deg, terms)
        if len(coeffs) == deg + 1:
            s._dense = coeffs
        return s

    def dense(self) -> list:
        """Coefficient list of a univariate jet, length ``deg + 1``."""
        if self.nvars != 1:
            raise ShapeError("dense form is only defined for one variable")
        if self._dense is None:
            out = [ZERO] * (self.deg + 1)
            for (d,), c in self.terms.items():
                out[d] = c
            self._dense = out
        return self._dense

    # arithmetic --------------------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected a TruncatedSeries, got {type(other).__name__}")
        if self.nvars != other.nvars or self.deg != other.deg:
            raise ShapeError(
                f"shape mismatch: (n={self.nvars}, K={self.deg}) vs (n={other.nvars}, K={other.deg})"
            )
        if self.field is not other.field and self.field != other.field:
            raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")

    def _coerce_scalar(self, value):
        return self.field.coerce(value)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + constant(other, self.nvars, self.deg, self.field)
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e)
            if v is None:
                terms[e] = c
            else:
                v = v + c
                if v:
                    terms[e] = v
                else:
                    del terms[e]
        return TruncatedSeries(self.field, self.nvars, self.deg, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.field, self.nvars, self.deg, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        if self.nvars == 1:
            return TruncatedSeries._from_dense(self.field, self.deg, _mul_dense(self.dense(), other.dense(), self.deg))
        return TruncatedSeries(self.field, self.nvars, self.deg, _mul_sparse(self.terms, other.terms, self.deg))

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * reciprocal(other)
        c = self._coerce_scalar(other)
        if not c:
            raise ZeroDivisionError("division of a series by zero")
        return self.scale(ONE / c)

    def __pow__(self, n: int):
        if n < 0:
            return reciprocal(self) ** (-n)
        result = constant(ONE, self.nvars, self.deg, self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, value) -> "TruncatedSeries":
        c = self._coerce_scalar(value)
        if not c:
            return zero(self.nvars, self.deg, self.field)
        return TruncatedSeries(self.field, self.nvars, self.deg, {e: v * c for e, v in self.terms.items()})

    # queries -----------------------------------------------------------------

    def coefficient(self, exponent) -> ExactScalar:
        if isinstance(exponent, int):
            exponent = (exponent,)
        return ExactScalar(self.field, self.terms.get(tuple(exponent), ZERO))

    def coeff_raw(self, exponent):
        return self.terms.get(exponent, ZERO)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous(self, d: int) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.nvars, self.deg, {e: c for e, c in self.terms.items() if sum(e) == d})

    def top_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.nvars == other.nvars
            and self.deg == other.deg
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.deg, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"TruncatedSeries({render(self)!r}, nvars={self.nvars}, deg={self.deg}, field={self.field!r})"

    def __str__(self):
        return render(self)


# dense and sparse kernels ----------------------------------------------------

def _mul_dense(a: Sequence, b: Sequence, prec: int) -> list:
    """Product of coefficient lists keeping degrees <= prec."""
    out = [ZERO] * (prec + 1)
    bnz = [(j, bj) for j, bj in enumerate(b) if bj and j <= prec]
    for i, ai in enumerate(a):
        if i > prec:
            break
        if not ai:
            continue
        lim = prec - i
        for j, bj in bnz:
            if j > lim:
                break
            out[i + j] += ai * bj
    return out


def _mul_sparse(a: Mapping, b: Mapping, prec: int) -> dict:
    out: dict = {}
    bd = [(e, sum(e), c) for e, c in b.items()]
    for ea, ca in a.items():
        da = sum(ea)
        if da > prec:
            continue
        for eb, db, cb in bd:
            if da + db > prec:
                continue
            key = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(key)
            out[key] = ca * cb if v is None else v + ca * cb
    return {e: c for e, c in out.items() if c}


def _add_sparse(a: dict, b: Mapping) -> dict:
    for e, c in b.items():
        v = a.get(e)
        if v is None:
            a[e] = c
        else:
            v = v + c
            if v:
                a[e] = v
            else:
                del a[e]
    return a


def _subst_dense(a: Sequence, g: Sequence, prec: int) -> list:
    """Univariate Horner evaluation of ``a(g)`` truncated at ``prec``.

    The partial sum that will still be multiplied by ``g`` k more times only
    needs degree ``prec - k*val(g)``.
    """
    v = next((j for j, c in enumerate(g) if c), None)
    top = len(a) - 1
    while top >= 0 and not a[top]:
        top -= 1
    if top < 0:
        return [ZERO] * (prec + 1)
    if v is None:
        return [a[0]] + [ZERO] * prec
    top = min(top, prec // v)
    r = [a[top]]
    for k in range(top - 1, -1, -1):
        r = _mul_dense(r, g, prec - k * v)
        r[0] = r[0] + a[k]
    return r + [ZERO] * (prec + 1 - len(r))


def _subst_sparse(terms: Mapping, gs: Sequence, gvals: Sequence, prec: int, nout: int) -> dict:
    """Multivariate Horner in the first remaining variable."""
    if not terms or prec < 0:
        return {}
    if not gs:
        c = terms.get((), ZERO)
        return {(0,) * nout: c} if c else {}
    groups: dict = {}
    for e, c in terms.items():
        groups.setdefault(e[0], {})[e[1:]] = c
    g0, v = gs[0], gvals[0]
    top = max(groups)
    if v is None:
        return _subst_sparse(groups.get(0, {}), gs[1:], gvals[1:], prec, nout)
    top = min(top, prec // v)
    r: dict = {}
    for k in range(top, -1, -1):
        p = prec - k * v
        if r:
            r = _mul_sparse(r, g0, p)
        if k in groups:
            r = _add_sparse(r, _subst_sparse(groups[k], gs[1:], gvals[1:], p, nout))
    return r


# constructors ------------------------------------------------------------------

def zero(nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    return TruncatedSeries(field, nvars, deg, {})


def constant(value, nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    c = field.coerce(value)
    return TruncatedSeries(field, nvars, deg, {(0,) * nvars: c} if c else {})


def variable(index: int, nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    """The coordinate function x_{index+1} (0-based index)."""
    if not 0 <= index < nvars:
        raise ShapeError(f"variable index {index} out of range for {nvars} variables")
    if deg < 1:
        return zero(nvars, deg, field)
    e = tuple(1 if j == index else 0 for j in range(nvars))
    return TruncatedSeries(field, nvars, deg, {e: ONE})


def from_terms(terms, nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    """Build a jet from ``{exponent: coefficient}`` (or pairs); degrees above ``deg`` are dropped."""
    items = terms.items() if isinstance(terms, Mapping) else terms
    out: dict = {}
    for e, c in items:
        if isinstance(e, int):
            e = (e,)
        e = tuple(int(x) for x in e)
        if len(e) != nvars or any(x < 0 for x in e):
            raise ShapeError(f"bad exponent {e} for {nvars} variables")
        if sum(e) > deg:
            continue
        c = field.coerce(c)
        v = out.get(e, ZERO) + c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return TruncatedSeries(field, nvars, deg, out)


def from_coefficients(coeffs: Iterable, deg: int | None = None, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    """Univariate jet from ``[c0, c1, c2, ...]``."""
    coeffs = [field.coerce(c) for c in coeffs]
    if deg is None:
        deg = len(coeffs) - 1
    coeffs = coeffs[: deg + 1] + [ZERO] * max(0, deg + 1 - len(coeffs))
    return TruncatedSeries._from_dense(field, deg, coeffs)


# operations -------------------------------------------------------------------

def series_arith(s: TruncatedSeries, t: TruncatedSeries, op: str) -> TruncatedSeries:
    s._check(t)
    if op == "add":
        return s + t
    if op == "sub":
        return s - t
    if op == "mul":
        return s * t
    raise ValueError(f"unknown operation {op!r}")


def substitute(s: TruncatedSeries, g: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """``s(g_1, ..., g_n)`` truncated at the shared degree."""
    g = tuple(g)
    if len(g) != s.nvars:
        raise ShapeError(f"substituting {len(g)} series into a series of {s.nvars} variables")
    if not g:
        raise ShapeError("nothing to substitute")
    nout = g[0].nvars
    for gi in g:
        g[0]._check(gi)
        if gi.constant_term():
            raise DomainError("substituted series must have zero constant term")
    if g[0].deg != s.deg:
        raise ShapeError(f"truncation mismatch: K={s.deg} vs K={g[0].deg}")
    if s.field is not g[0].field and s.field != g[0].field:
        raise FieldMismatchError(f"{s.field!r} vs {g[0].field!r}")
    K = s.deg
    if s.nvars == 1 and nout == 1:
        return TruncatedSeries._from_dense(s.field, K, _subst_dense(s.dense(), g[0].dense(), K))
    gvals = [None if gi.is_zero() else min(sum(e) for e in gi.terms) for gi in g]
    terms = _subst_sparse(s.terms, [gi.terms for gi in g], gvals, K, nout)
    return TruncatedSeries(s.field, nout, K, terms)


def valuation(s: TruncatedSeries):
    """Lowest total degree carrying a nonzero coefficient; ``math.inf`` for zero."""
    if not s.terms:
        return math.inf
    return min(sum(e) for e in s.terms)


def retruncate(s: TruncatedSeries, deg: int) -> TruncatedSeries:
    if deg > s.deg:
        raise PrecisionError(f"cannot raise truncation from {s.deg} to {deg}")
    if deg < 0:
        raise ValueError("truncation degree must be non-negative")
    return TruncatedSeries(s.field, s.nvars, deg, {e: c for e, c in s.terms.items() if sum(e) <= deg})


def extend(s: TruncatedSeries, deg: int) -> TruncatedSeries:
    """Reinterpret the stored polynomial at a higher truncation degree.

    This does not recover lost precision: the caller asserts the higher
    coefficients are genuinely zero (e.g. for polynomial maps).
    """
    if deg < s.deg:
        raise ValueError("extend only raises the truncation degree")
    return TruncatedSeries(s.field, s.nvars, deg, dict(s.terms))


def derivative(s: TruncatedSeries, index: int) -> TruncatedSeries:
    """Partial derivative in x_{index+1}; the result keeps truncation ``deg``."""
    out = {}
    for e, c in s.terms.items():
        p = e[index]
        if p:
            ne = e[:index] + (p - 1,) + e[index + 1:]
            out[ne] = c * p
    return TruncatedSeries(s.field, s.nvars, s.deg, out)


def shift_down(s: TruncatedSeries, index: int, times: int = 1) -> TruncatedSeries:
    """Exact division by x_{index+1}^times; raises if some term is not divisible."""
    out = {}
    for e, c in s.terms.items():
        if e[index] < times:
            raise DomainError(f"series is not divisible by x{index + 1}^{times}")
        out[e[:index] + (e[index] - times,) + e[index + 1:]] = c
    return TruncatedSeries(s.field, s.nvars, s.deg, out)


def binomial_power(s: TruncatedSeries, exponent) -> TruncatedSeries:
    """``s**exponent`` for rational exponents, via the generalized binomial series.

    Requires the constant term to equal 1.
    """
    if s.constant_term() != ONE:
        raise DomainError("binomial_power needs constant term 1")
    e = mpq(exponent) if not isinstance(exponent, str) else s.field.coerce(exponent)
    if isinstance(e, ExtElement):
        raise DomainError("exponent must be rational")
    one = constant(ONE, s.nvars, s.deg, s.field)
    u = s - one
    v = valuation(u)
    if v is math.inf:
        return one
    result = one
    term = one
    binom = ONE
    for m in range(1, s.deg // v + 1):
        binom = binom * (e - (m - 1)) / m
        term = term * u
        if not binom:
            break
        result = result + term.scale(binom)
    return result


def reciprocal(s: TruncatedSeries) -> TruncatedSeries:
    c = s.constant_term()
    if not c:
        raise DomainError("series with zero constant term is not invertible")
    return binomial_power(s.scale(ONE / c), -1).scale(ONE / c)


# text and JSON forms ------------------------------------------------------------

def variable_names(nvars: int) -> list[str]:
    return ["x"] if nvars == 1 else [f"x{j + 1}" for j in range(nvars)]


def _graded_key(e):
    return (sum(e), tuple(-x for x in e))


def sorted_terms(s: TruncatedSeries) -> list:
    """Terms in graded-lexicographic order: ascending total degree, then x1 before x2."""
    return sorted(s.terms.items(), key=lambda item: _graded_key(item[0]))


def _render_monomial(e, names) -> str:
    parts = []
    for p, name in zip(e, names):
        if p == 1:
            parts.append(name)
        elif p > 1:
            parts.append(f"{name}^{p}")
    return "*".join(parts)


def render(s: TruncatedSeries) -> str:
    names = variable_names(s.nvars)
    out = ""
    for e, c in sorted_terms(s):
        mono = _render_monomial(e, names)
        if isinstance(c, ExtElement):
            text = s.field.render(c)
            if any(ch in "+-" for ch in text[1:]):
                sign, body = "+", f"({text})" if mono else text
            else:
                sign, body = ("-", text[1:]) if text.startswith("-") else ("+", text)
            if mono:
                body += "*" + mono
        else:
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            if mono:
                body = mono if a == 1 else f"{render_rational(a)}*{mono}"
            else:
                body = render_rational(a)
        if not out:
            out = body if sign == "+" else "-" + body
        else:
            out += f" {sign} {body}"
    return out or "0"


def to_json(s: TruncatedSeries) -> dict:
    return {
        "nvars": s.nvars,
        "deg": s.deg,
        "terms": [{"exp": list(e), "coeff": s.field.render(c)} for e, c in sorted_terms(s)],
    }


def from_json(data: Mapping, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    from .scalar import parse_scalar

    nvars, deg = int(data["nvars"]), int(data["deg"])
    terms = []
    for t in data["terms"]:
        c = parse_scalar(str(t["coeff"]), field).value
        if not c:
            raise ParseError("zero coefficients are not allowed in the JSON form")
        if sum(t["exp"]) > deg:
            raise ShapeError(f"exponent {t['exp']} exceeds truncation degree {deg}")
        terms.append((tuple(t["exp"]), c))
    return from_terms(terms, nvars, deg, field)


_ALIASES = {"x": 0, "y": 1, "z": 2}


def variable_index(name: str, nvars: int | None = None):
    """Index of a variable name (``x``, ``y``, ``z`` or ``x<k>``), or None."""
    if name in _ALIASES:
        return _ALIASES[name]
    if name.startswith("x") and name[1:].isdigit() and int(name[1:]) >= 1:
        return int(name[1:]) - 1
    return None


def infer_nvars(node) -> int:
    idx = [variable_index(n) for n in parsing.names_in(node)]
    idx = [i for i in idx if i is not None]
    return max(idx) + 1 if idx else 1


def evaluate_series_ast(node, nvars: int, deg: int, field: Field) -> TruncatedSeries:
    """Evaluate a parsed polynomial expression; scalars are promoted to constants."""

    def ev(n):
        if isinstance(n, parsing.Num):
            return constant(n.value, nvars, deg, field)
        if isinstance(n, parsing.Name):
            j = variable_index(n.name)
            if j is not None:
                if j >= nvars:
                    raise ParseError(f"variable {n.name!r} exceeds {nvars} variables", n.pos)
                return variable(j, nvars, deg, field)
            return constant(evaluate_scalar_ast(n, field), nvars, deg, field)
        if isinstance(n, parsing.Neg):
            return -ev(n.operand)
        if isinstance(n, parsing.BinOp):
            if n.op == "^":
                e = ev(n.right)
                if e.terms and set(e.terms) != {(0,) * nvars}:
                    raise ParseError("exponent must be a constant", n.pos)
                k = e.constant_term()
                if isinstance(k, ExtElement) or k.denominator != 1:
                    raise ParseError("exponent must be an integer", n.pos)
                base = ev(n.left)
                if k < 0 and not base.constant_term():
                    raise ParseError("negative power of a series without constant term", n.pos)
                return base ** int(k)
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if n.op == "/":
                if b.terms and set(b.terms) != {(0,) * nvars}:
                    if not b.constant_term():
                        raise ParseError("division by a series without constant term", n.pos)
                    return a * reciprocal(b)
                if not b.terms:
                    raise ParseError("division by zero", n.pos)
                return a / b.constant_term()
        raise ParseError("unsupported syntax in a series literal", getattr(n, "pos", None))

    return ev(node)


def parse_series(text: str, deg: int, nvars: int | None = None, field: Field = DEFAULT_FIELD) -> TruncatedSeries:
    """Parse ``"x1^3*x2 + 1/2*x1"``-style text into a jet of degree ``deg``."""
    node = parsing.parse(text)
    if nvars is None:
        nvars = infer_nvars(node)
    return evaluate_series_ast(node, nvars, deg, field)
