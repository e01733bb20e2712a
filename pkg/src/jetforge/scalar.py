"""Exact coefficient fields: Q, Q(i) and simple extensions Q[t]/(m(t)).

Coefficients inside series are stored as *raw* values for speed: a raw
value is a ``gmpy2.mpq`` whenever the element is rational, and an
:class:`ExtElement` (power-basis coordinates) otherwise.  This keeps jets
with rational coefficients on the fast ``mpq`` path even when the active
field is Q(i).  :class:`ExactScalar` is the public, field-tagged wrapper.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpq

from . import parsing
from .errors import FieldMismatchError, ParseError

ZERO = mpq(0)
ONE = mpq(1)


def _q(value) -> mpq:
    if isinstance(value, str):
        return mpq(Fraction(value))
    return mpq(value)


def render_rational(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Field:
    """Descriptor of an exact coefficient field.

    ``minpoly`` holds the monic minimal polynomial coefficients from the
    constant term upwards; it is empty for Q.  Irreducibility is assumed,
    not checked.
    """

    __slots__ = ("kind", "minpoly", "degree", "gen")

    def __init__(self, kind: str, minpoly=()):
        if kind not in ("rationals", "gaussian-rationals", "simple-extension"):
            raise ValueError(f"unknown field kind {kind!r}")
        minpoly = tuple(_q(c) for c in minpoly)
        if kind == "rationals":
            minpoly = ()
        elif kind == "gaussian-rationals":
            minpoly = (ONE, ZERO, ONE)
        else:
            if len(minpoly) < 3:
                raise ValueError("a simple extension needs a minimal polynomial of degree >= 2")
            if minpoly[-1] != 1:
                raise ValueError("minimal polynomial must be monic")
            if minpoly[0] == 0:
                raise ValueError("minimal polynomial must have a nonzero constant term")
        self.kind = kind
        self.minpoly = minpoly
        self.degree = max(1, len(minpoly) - 1)
        self.gen = "i" if kind == "gaussian-rationals" else "t"

    @classmethod
    def simple_extension(cls, minpoly) -> "Field":
        """Q[t]/(m) from low-to-high coefficients, or from text such as ``"t^2-2"``."""
        if isinstance(minpoly, str):
            minpoly = _parse_minpoly(minpoly)
        return cls("simple-extension", minpoly)

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return self.kind == other.kind and self.minpoly == other.minpoly

    def __hash__(self):
        return hash((self.kind, self.minpoly))

    def __repr__(self):
        if self.kind == "rationals":
            return "Q"
        if self.kind == "gaussian-rationals":
            return "Q(i)"
        return f"Q[t]/({_render_poly(self.minpoly, 't')})"

    # raw element construction -------------------------------------------

    def element(self, coords) -> object:
        """Raw element from power-basis coordinates (normalized)."""
        coords = tuple(_q(c) for c in coords)
        if len(coords) > self.degree:
            raise FieldMismatchError(f"{len(coords)} coordinates for a field of degree {self.degree}")
        coords = coords + (ZERO,) * (self.degree - len(coords))
        return _make(self, coords)

    def coords(self, raw) -> tuple:
        if isinstance(raw, ExtElement):
            if raw.field is not self and raw.field != self:
                raise FieldMismatchError(f"element of {raw.field!r} used in {self!r}")
            return raw.c
        return (mpq(raw),) + (ZERO,) * (self.degree - 1)

    def generator(self):
        if self.degree == 1:
            raise FieldMismatchError("Q has no generator")
        return self.element((ZERO, ONE))

    def coerce(self, value):
        """Accept ExactScalar, raw values, ints, Fractions or scalar text."""
        if isinstance(value, ExactScalar):
            if value.field != self:
                raise FieldMismatchError(f"scalar over {value.field!r} used in {self!r}")
            return value.value
        if isinstance(value, ExtElement):
            self.coords(value)
            return value
        if isinstance(value, str):
            return parse_scalar(value, self).value
        if isinstance(value, (int, Rational)) or type(value) is type(ZERO):
            return mpq(value)
        raise TypeError(f"cannot interpret {value!r} as a scalar")

    def scalar(self, raw) -> "ExactScalar":
        return ExactScalar(self, raw)

    def render(self, raw) -> str:
        coords = self.coords(raw)
        if self.degree == 1:
            return render_rational(coords[0])
        parts = []
        for j, c in enumerate(coords):
            if c == 0:
                continue
            if j == 0:
                parts.append(render_rational(c))
                continue
            mono = self.gen if j == 1 else f"{self.gen}^{j}"
            if c == 1:
                body = mono
            elif c == -1:
                body = "-" + mono
            else:
                body = render_rational(c) + mono
            parts.append(body)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def pow(self, raw, n: int):
        if n < 0:
            return self.pow(ONE / raw, -n)
        result = ONE
        base = raw
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


RATIONALS = Field("rationals")
GAUSSIAN = Field("gaussian-rationals")
DEFAULT_FIELD = GAUSSIAN


def _render_poly(coeffs, var):
    terms = []
    for j in range(len(coeffs) - 1, -1, -1):
        c = coeffs[j]
        if c == 0:
            continue
        mono = "" if j == 0 else (var if j == 1 else f"{var}^{j}")
        if mono and c == 1:
            s = mono
        elif mono and c == -1:
            s = "-" + mono
        else:
            s = render_rational(c) + mono
        terms.append(s)
    out = terms[0]
    for s in terms[1:]:
        out += s if s.startswith("-") else "+" + s
    return out


def _parse_minpoly(text: str):
    """Parse a univariate polynomial in ``t`` (or ``x``) into low-to-high coefficients."""
    node = parsing.parse(text)
    names = parsing.names_in(node)
    if len(names) > 1:
        raise ParseError(f"minimal polynomial must use one variable, got {sorted(names)}")
    var = names.pop() if names else "t"

    def ev(n):
        if isinstance(n, parsing.Num):
            return {0: n.value}
        if isinstance(n, parsing.Name):
            return {1: ONE}
        if isinstance(n, parsing.Neg):
            return {k: -v for k, v in ev(n.operand).items()}
        if isinstance(n, parsing.BinOp):
            a = ev(n.left)
            if n.op == "^":
                e = ev(n.right)
                if set(e) - {0} or e.get(0, ZERO).denominator != 1 or e.get(0, ZERO) < 0:
                    raise ParseError("exponent must be a non-negative integer", n.pos)
                r = {0: ONE}
                for _ in range(int(e.get(0, ZERO))):
                    r = _pmul(r, a)
                return r
            b = ev(n.right)
            if n.op == "+":
                return _padd(a, b)
            if n.op == "-":
                return _padd(a, {k: -v for k, v in b.items()})
            if n.op == "*":
                return _pmul(a, b)
            if n.op == "/":
                if set(b) - {0} or b.get(0, ZERO) == 0:
                    raise ParseError("division only by nonzero constants", n.pos)
                return {k: v / b[0] for k, v in a.items()}
        raise ParseError(f"unsupported syntax in minimal polynomial ({var})")

    p = ev(node)
    deg = max(k for k, v in p.items() if v != 0)
    return tuple(p.get(k, ZERO) for k in range(deg + 1))


def _padd(a, b):
    r = dict(a)
    for k, v in b.items():
        r[k] = r.get(k, ZERO) + v
    return r


def _pmul(a, b):
    r = {}
    for i, x in a.items():
        for j, y in b.items():
            r[i + j] = r.get(i + j, ZERO) + x * y
    return r


def _make(field: Field, coords: tuple):
    for c in coords[1:]:
        if c:
            return ExtElement(field, coords)
    return coords[0]


def _poly_divmod(a: list, b: list):
    """Quotient and remainder of rational polynomials (low-to-high lists)."""
    a = list(a)
    b = list(b)
    while b and not b[-1]:
        b.pop()
    q = [ZERO] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for k, c in enumerate(b):
            a[shift + k] -= f * c
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return q, a


def _poly_inverse_mod(a: list, m: list) -> list:
    """Inverse of ``a`` modulo ``m`` by the extended Euclidean algorithm."""
    r0, r1 = list(m), list(a)
    s0, s1 = [ZERO], [ONE]
    while r1 and any(r1):
        q, r = _poly_divmod(r0, r1)
        prod = [ZERO] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                prod[i + j] += x * y
        n = max(len(s0), len(prod))
        s2 = [(s0[k] if k < len(s0) else ZERO) - (prod[k] if k < len(prod) else ZERO) for k in range(n)]
        r0, r1, s0, s1 = r1, r, s1, s2
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible (minimal polynomial reducible?)")
    c = r0[0]
    return [x / c for x in s0]


class ExtElement:
    """Raw element of a field of degree >= 2 with a non-rational value."""

    __slots__ = ("field", "c")

    def __init__(self, field: Field, coords: tuple):
        self.field = field
        self.c = coords

    def _other(self, o):
        if type(o) is ExtElement:
            if o.field is not self.field and o.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {o.field!r}")
            return o.c
        return None

    def __add__(self, o):
        oc = self._other(o)
        if oc is None:
            if isinstance(o, ExactScalar):
                return NotImplemented
            c = self.c
            return ExtElement(self.field, (c[0] + o,) + c[1:])
        return _make(self.field, tuple(x + y for x, y in zip(self.c, oc)))

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.field, tuple(-x for x in self.c))

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        oc = self._other(o)
        if oc is None:
            if isinstance(o, ExactScalar):
                return NotImplemented
            if not o:
                return ZERO
            return ExtElement(self.field, tuple(x * o for x in self.c))
        a = self.c
        if self.field.kind == "gaussian-rationals":
            return _make(self.field, (a[0] * oc[0] - a[1] * oc[1], a[0] * oc[1] + a[1] * oc[0]))
        d = len(a)
        prod = [ZERO] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(oc):
                    if y:
                        prod[i + j] += x * y
        m = self.field.minpoly
        for k in range(2 * d - 2, d - 1, -1):
            f = prod[k]
            if f:
                for j in range(d):
                    prod[k - d + j] -= f * m[j]
        return _make(self.field, tuple(prod[:d]))

    __rmul__ = __mul__

    def inverse(self):
        a = self.c
        if self.field.kind == "gaussian-rationals":
            n = a[0] * a[0] + a[1] * a[1]
            return ExtElement(self.field, (a[0] / n, -a[1] / n))
        inv = _poly_inverse_mod(list(a), list(self.field.minpoly))
        inv = inv + [ZERO] * (self.field.degree - len(inv))
        return _make(self.field, tuple(inv[: self.field.degree]))

    def __truediv__(self, o):
        oc = self._other(o)
        if oc is None:
            if isinstance(o, ExactScalar):
                return NotImplemented
            if not o:
                raise ZeroDivisionError("division by zero")
            return ExtElement(self.field, tuple(x / o for x in self.c))
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self.inverse() * o

    def __pow__(self, n):
        return self.field.pow(self, n)

    def __eq__(self, o):
        if type(o) is ExtElement:
            return self.c == o.c and self.field == o.field
        if isinstance(o, ExactScalar):
            return NotImplemented
        return False

    def __ne__(self, o):
        r = self.__eq__(o)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return True

    def __repr__(self):
        return f"ExtElement({self.field.render(self)!r}, {self.field!r})"


class ExactScalar:
    """A field element tagged with its field descriptor.

    Supports ``+ - * /`` and ``**`` against other scalars of the same
    field and against plain rationals.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value=ZERO):
        self.field = field
        self.value = field.coerce(value)

    @property
    def coords(self) -> tuple:
        return self.field.coords(self.value)

    def _raw(self, other):
        if isinstance(other, ExactScalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, o):
        return ExactScalar(self.field, self.value + self._raw(o))

    __radd__ = __add__

    def __sub__(self, o):
        return ExactScalar(self.field, self.value - self._raw(o))

    def __rsub__(self, o):
        return ExactScalar(self.field, self._raw(o) - self.value)

    def __mul__(self, o):
        return ExactScalar(self.field, self.value * self._raw(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        d = self._raw(o)
        if not d:
            raise ZeroDivisionError("division by zero")
        return ExactScalar(self.field, self.value / d)

    def __rtruediv__(self, o):
        if not self.value:
            raise ZeroDivisionError("division by zero")
        return ExactScalar(self.field, self._raw(o) / self.value)

    def __neg__(self):
        return ExactScalar(self.field, -self.value)

    def __pow__(self, n: int):
        return ExactScalar(self.field, self.field.pow(self.value, n))

    def __eq__(self, o):
        if isinstance(o, ExactScalar):
            return self.field == o.field and self.value == o.value
        try:
            return self.value == self.field.coerce(o)
        except (TypeError, ParseError, FieldMismatchError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    def __str__(self):
        return self.field.render(self.value)

    def __repr__(self):
        return f"ExactScalar({str(self)!r}, {self.field!r})"


def field_arith(a: ExactScalar, b: ExactScalar, op: str) -> ExactScalar:
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field!r} vs {b.field!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def evaluate_scalar_ast(node, field: Field):
    """Evaluate a parsed scalar expression to a raw element of ``field``."""
    if isinstance(node, parsing.Num):
        return node.value
    if isinstance(node, parsing.Name):
        if field.degree > 1 and node.name == field.gen:
            return field.generator()
        if node.name in ("i", "t"):
            raise ParseError(f"{node.name!r} is outside the field {field!r}", node.pos)
        raise ParseError(f"unknown name {node.name!r}", node.pos)
    if isinstance(node, parsing.Neg):
        return -evaluate_scalar_ast(node.operand, field)
    if isinstance(node, parsing.BinOp):
        a = evaluate_scalar_ast(node.left, field)
        b = evaluate_scalar_ast(node.right, field)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if not b:
                raise ParseError("division by zero", node.pos)
            return a / b
        if node.op == "^":
            if isinstance(b, ExtElement) or b.denominator != 1:
                raise ParseError("exponent must be an integer", node.pos)
            if not a and b < 0:
                raise ParseError("division by zero", node.pos)
            return field.pow(a, int(b))
    raise ParseError("not a scalar expression", getattr(node, "pos", None))


def parse_scalar(text: str, field: Field = DEFAULT_FIELD) -> ExactScalar:
    """Read ``"3/4+1/2i"``-style text into an :class:`ExactScalar`."""
    return ExactScalar(field, evaluate_scalar_ast(parsing.parse(text), field))


def _roots_in_field(coeffs, field: Field) -> list:
    """Roots in ``field`` of a polynomial with raw coefficients (low-to-high)."""
    import sympy
    from sympy import QQ, CRootOf

    x = sympy.Symbol("x")
    if field.degree == 1:
        dom = QQ
        conv = lambda c: QQ(int(mpq(c).numerator), int(mpq(c).denominator))  # noqa: E731
    else:
        m = sympy.Poly([sympy.Rational(str(render_rational(c))) for c in reversed(field.minpoly)], x)
        dom = QQ.algebraic_field(CRootOf(m, 0))
        if [mpq(int(c.numerator), int(c.denominator)) for c in dom.mod.to_list()] != list(reversed(field.minpoly)):
            raise NotImplementedError("could not match the field generator for root finding")

        def conv(c):
            cs = field.coords(c)
            return dom.from_sympy(sum(sympy.Rational(render_rational(v)) * dom.ext**j for j, v in enumerate(cs)))

    poly = sympy.Poly.from_list([conv(c) for c in reversed(coeffs)], x, domain=dom)
    roots = []
    for fac, _ in poly.factor_list()[1]:
        if fac.degree() != 1:
            continue
        a1, a0 = fac.rep.to_list()
        r = -a0 / a1
        if field.degree == 1:
            roots.append(mpq(int(r.numerator), int(r.denominator)))
        else:
            cs = [mpq(int(v.numerator), int(v.denominator)) for v in reversed(r.to_list())]
            roots.append(field.element(cs))
    return roots


def _multiplicative_order_at_most(raw, k: int, field: Field):
    p = ONE
    for j in range(1, k + 1):
        p = p * raw
        if p == ONE:
            return j
    return None


def root_of_unity(k: int, field: Field = DEFAULT_FIELD):
    """A primitive k-th root of unity in ``field`` as an ExactScalar, or None."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return field.scalar(ONE)
    if k == 2:
        return field.scalar(-ONE)
    if field.kind == "rationals":
        return None
    if field.kind == "gaussian-rationals":
        return field.scalar(field.generator()) if k == 4 else None
    import sympy

    cyclo = sympy.Poly(sympy.cyclotomic_poly(k, sympy.Symbol("x")))
    if sympy.totient(k) > field.degree:
        return None
    coeffs = [mpq(int(c)) for c in reversed(cyclo.all_coeffs())]
    roots = _roots_in_field(coeffs, field)
    for r in roots:
        if _multiplicative_order_at_most(r, k, field) == k:
            return field.scalar(r)
    return None


def nth_root(value, k: int, field: Field = DEFAULT_FIELD):
    """Some ``mu`` in ``field`` with ``mu**k == value``, or None (raw in, raw out)."""
    value = field.coerce(value)
    if k == 1:
        return value
    if not value:
        return ZERO
    if not isinstance(value, ExtElement):
        q = mpq(value)
        sign = 1
        if q < 0:
            if k % 2 == 0:
                q = None
            else:
                sign, q = -1, -q
        if q is not None:
            n, exact_n = gmpy2.iroot(gmpy2.mpz(q.numerator), k)
            d, exact_d = gmpy2.iroot(gmpy2.mpz(q.denominator), k)
            if exact_n and exact_d:
                return sign * mpq(n, d)
        if field.degree == 1:
            return None
    coeffs = [-value] + [ZERO] * (k - 1) + [ONE]
    roots = _roots_in_field(coeffs, field)
    return roots[0] if roots else None
