"""Formal vector fields: bracket, Lie-series flows, logarithm and pushforward."""
from __future__ import annotations

from typing import Iterable, Mapping

from . import parsing
from . import series as S
from .errors import DomainError, ShapeError
from .jetgroup import JetDiffeo, _trusted, compose, identity, invert
from .scalar import DEFAULT_FIELD, ONE, Field
from .series import TruncatedSeries


class JetVectorField:
    """Components ``X_j`` of ``sum_j X_j d/dx_j``, each vanishing at the origin."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[TruncatedSeries]):
        comps = tuple(components)
        if not comps:
            raise ShapeError("a vector field needs at least one component")
        n = comps[0].nvars
        if len(comps) != n:
            raise ShapeError(f"{len(comps)} components for {n} variables")
        for c in comps[1:]:
            comps[0]._check(c)
        for c in comps:
            if c.constant_term():
                raise DomainError("vector field components must vanish at the origin")
        self.components = comps

    nvars = property(lambda self: self.components[0].nvars)
    deg = property(lambda self: self.components[0].deg)
    field = property(lambda self: self.components[0].field)

    def _check(self, other):
        if not isinstance(other, JetVectorField):
            raise TypeError(f"expected a JetVectorField, got {type(other).__name__}")
        self.components[0]._check(other.components[0])

    def __add__(self, other):
        self._check(other)
        return JetVectorField(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other):
        self._check(other)
        return JetVectorField(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return JetVectorField(-a for a in self.components)

    def scale(self, value):
        return JetVectorField(a.scale(value) for a in self.components)

    __rmul__ = scale

    def __mul__(self, value):
        return self.scale(value)

    def valuation(self):
        return min(S.valuation(c) for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, s: TruncatedSeries) -> TruncatedSeries:
        """The derivation ``sum_i X_i ds/dx_i``."""
        out = S.zero(s.nvars, s.deg, s.field)
        for i, Xi in enumerate(self.components):
            if not Xi.is_zero():
                out = out + Xi * S.derivative(s, i)
        return out

    def __eq__(self, other):
        if not isinstance(other, JetVectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(("vf",) + self.components)

    def __repr__(self):
        return f"JetVectorField({render(self)!r}, deg={self.deg}, field={self.field!r})"

    def __str__(self):
        return render(self)


def zero_field(nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> JetVectorField:
    return JetVectorField(S.zero(nvars, deg, field) for _ in range(nvars))


def bracket(X: JetVectorField, Y: JetVectorField) -> JetVectorField:
    """``[X, Y]_j = X(Y_j) - Y(X_j)``; exact at K since both fields vanish at 0."""
    X._check(Y)
    return JetVectorField(X.apply(y) - Y.apply(x) for x, y in zip(X.components, Y.components))


def _require_flowable(X: JetVectorField):
    if X.valuation() < 2:
        raise DomainError("the exponential is defined for fields of valuation >= 2")


def exp_flow(X: JetVectorField, t=1) -> JetDiffeo:
    """Time-``t`` flow as the Lie series ``sum_m t^m/m! X^m(x_j)``."""
    _require_flowable(X)
    n, K, field = X.nvars, X.deg, X.field
    t = field.coerce(t)
    xs = identity(n, K, field).components
    if not t or X.is_zero():
        return identity(n, K, field)
    out = []
    for xj in xs:
        acc = xj
        term = xj
        m = 0
        while True:
            m += 1
            term = X.apply(term).scale(t / m)
            if term.is_zero():
                break
            acc = acc + term
        out.append(acc)
    return _trusted(out)


def log_jet(f: JetDiffeo) -> JetVectorField:
    """The unique X of valuation >= 2 with ``exp_flow(X, 1) == f`` at K."""
    if not f.linear_part().is_identity():
        raise DomainError("log is defined only for jets tangent to the identity")
    xs = identity(f.nvars, f.deg, f.field).components
    # composition with f acts on functions as exp(X); take the log of that
    # operator: X_j = sum_m (-1)^(m+1)/m D^m(x_j) with D(u) = u o f - u
    comps = []
    for x in xs:
        term, acc = x, S.zero(f.nvars, f.deg, f.field)
        for m in range(1, f.deg):
            term = S.substitute(term, f.components) - term
            if term.is_zero():
                break
            acc = acc + term.scale(ONE / m if m % 2 else -ONE / m)
        comps.append(acc)
    return JetVectorField(comps)


def bch(X: JetVectorField, Y: JetVectorField) -> JetVectorField:
    """``log(exp X o exp Y)``, exact at K."""
    _require_flowable(X)
    _require_flowable(Y)
    return log_jet(compose(exp_flow(X, 1), exp_flow(Y, 1)))


def pushforward(phi: JetDiffeo, X: JetVectorField) -> JetVectorField:
    """``(D phi . X) o phi^-1``.

    Exact at the full truncation degree: ``D phi`` is needed only up to
    degree K-1 because every ``X_i`` vanishes at the origin.
    """
    if not isinstance(phi, JetDiffeo):
        raise TypeError("pushforward needs a JetDiffeo")
    phi.components[0]._check(X.components[0])
    inv = invert(phi).components
    out = []
    for pj in phi.components:
        s = X.apply(pj)
        out.append(S.substitute(s, inv))
    return JetVectorField(out)


def normal_field(k: int, lam, deg: int, field: Field = DEFAULT_FIELD) -> JetVectorField:
    """The model field ``x^(k+1) / (1 + lam x^k) d/dx``."""
    if k < 1:
        raise ValueError("k must be positive")
    lam = field.coerce(lam)
    terms = {}
    c = ONE
    d = k + 1
    while d <= deg:
        if c:
            terms[(d,)] = c
        c = -c * lam
        d += k
    return JetVectorField([S.TruncatedSeries(field, 1, deg, terms)])


def flows_commute(X: JetVectorField, Y: JetVectorField) -> bool:
    _require_flowable(X)
    _require_flowable(Y)
    return bracket(X, Y).is_zero()


# text and JSON -------------------------------------------------------------------

def render(X: JetVectorField) -> str:
    """Positional text form, e.g. ``(x^2 + x^3) d/dx`` or ``(x1^2 d/dx1, x1*x2 d/dx2)``."""
    names = S.variable_names(X.nvars)
    if X.nvars == 1:
        c = X.components[0]
        return "0" if c.is_zero() else f"({S.render(c)}) d/d{names[0]}"
    return "(" + ", ".join(f"{S.render(c)} d/d{name}" for name, c in zip(names, X.components)) + ")"


def render_tuple(X: JetVectorField) -> str:
    parts = [S.render(c) for c in X.components]
    return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


def to_json(X: JetVectorField) -> dict:
    return {
        "role": "vectorfield",
        "nvars": X.nvars,
        "deg": X.deg,
        "components": [S.to_json(c) for c in X.components],
    }


def from_json(data: Mapping, field: Field = DEFAULT_FIELD) -> JetVectorField:
    return JetVectorField(S.from_json(c, field) for c in data["components"])


def parse_field(text: str, deg: int, field: Field = DEFAULT_FIELD, nvars: int | None = None) -> JetVectorField:
    """Parse components given positionally, e.g. ``"x^2"`` or ``"(x1^2 d/dx1, x1*x2)"``."""
    from .jetgroup import components_from_ast

    return JetVectorField(components_from_ast(parsing.parse(text), deg, field, nvars))
