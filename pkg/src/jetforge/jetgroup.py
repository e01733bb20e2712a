"""Jet diffeomorphisms of (K^n, 0) under truncated composition.

``compose(f, g)`` is the map ``x -> f(g(x))``; ``conj(g, h)`` is
``g o h o g^-1`` and ``commutator(f, g)`` is ``f o g o f^-1 o g^-1``.
"""
from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

from . import parsing
from .errors import DomainError, ParseError, PrecisionError, ShapeError
from .scalar import DEFAULT_FIELD, ONE, ZERO, ExactScalar, Field
from . import series as S
from .series import TruncatedSeries


class LinearMap:
    """Square matrix over a coefficient field (rows of raw coefficients)."""

    __slots__ = ("field", "rows")

    def __init__(self, rows: Sequence[Sequence], field: Field = DEFAULT_FIELD):
        rows = tuple(tuple(field.coerce(c) for c in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ShapeError("a linear map needs a non-empty square matrix")
        self.field = field
        self.rows = rows

    @classmethod
    def diagonal(cls, entries: Sequence, field: Field = DEFAULT_FIELD) -> "LinearMap":
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)], field)

    @classmethod
    def scalar(cls, value, n: int, field: Field = DEFAULT_FIELD) -> "LinearMap":
        return cls.diagonal([value] * n, field)

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> ExactScalar:
        return ExactScalar(self.field, self.rows[i][j])

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.n) for j in range(self.n) if i != j)

    def diagonal_entries(self) -> list:
        return [self.rows[i][i] for i in range(self.n)]

    def is_identity(self) -> bool:
        return self.is_diagonal() and all(c == ONE for c in self.diagonal_entries())

    def det(self) -> ExactScalar:
        """Determinant by fraction-free (Bareiss) elimination."""
        m = [list(r) for r in self.rows]
        n = self.n
        sign = 1
        prev = ONE
        for k in range(n - 1):
            if not m[k][k]:
                swap = next((i for i in range(k + 1, n) if m[i][k]), None)
                if swap is None:
                    return ExactScalar(self.field, ZERO)
                m[k], m[swap] = m[swap], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return ExactScalar(self.field, d if sign > 0 else -d)

    def inverse(self) -> "LinearMap":
        n = self.n
        m = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            p = next((i for i in range(c, n) if m[i][c]), None)
            if p is None:
                raise DomainError("singular linear map")
            m[c], m[p] = m[p], m[c]
            inv = ONE / m[c][c]
            m[c] = [v * inv for v in m[c]]
            for i in range(n):
                if i != c and m[i][c]:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return LinearMap([row[n:] for row in m], self.field)

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        n = self.n
        return LinearMap(
            [[sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), ZERO) for j in range(n)] for i in range(n)],
            self.field,
        )

    def as_jet(self, deg: int) -> "JetDiffeo":
        n = self.n
        comps = [
            S.from_terms({tuple(int(i == j) for i in range(n)): self.rows[r][j] for j in range(n)}, n, deg, self.field)
            for r in range(n)
        ]
        return JetDiffeo(comps)

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def to_json(self) -> list:
        return [[self.field.render(c) for c in row] for row in self.rows]

    def __repr__(self):
        return f"LinearMap({self.to_json()!r})"


class JetDiffeo:
    """An n-tuple of jets with zero constant terms and invertible linear part."""

    __slots__ = ("components", "_key")

    def __init__(self, components: Iterable[TruncatedSeries], *, check: bool = True):
        comps = tuple(components)
        if not comps:
            raise ShapeError("a jet needs at least one component")
        n = comps[0].nvars
        if len(comps) != n:
            raise ShapeError(f"{len(comps)} components for {n} variables")
        for c in comps[1:]:
            comps[0]._check(c)
        self.components = comps
        self._key = None
        if check:
            for c in comps:
                if c.constant_term():
                    raise DomainError("jet components must vanish at the origin")
            if comps[0].deg >= 1 and not self.linear_part().det():
                raise DomainError("linear part is not invertible")
            if comps[0].deg < 1:
                raise DomainError("a jet diffeomorphism needs truncation degree >= 1")

    nvars = property(lambda self: self.components[0].nvars)
    deg = property(lambda self: self.components[0].deg)
    field = property(lambda self: self.components[0].field)

    def linear_part(self) -> LinearMap:
        n = self.nvars
        units = [tuple(int(i == j) for i in range(n)) for j in range(n)]
        return LinearMap([[c.coeff_raw(u) for u in units] for c in self.components], self.field)

    def _check(self, other: "JetDiffeo"):
        if not isinstance(other, JetDiffeo):
            raise TypeError(f"expected a JetDiffeo, got {type(other).__name__}")
        self.components[0]._check(other.components[0])

    def __eq__(self, other):
        if not isinstance(other, JetDiffeo):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"JetDiffeo({render(self)!r}, deg={self.deg}, field={self.field!r})"

    def __str__(self):
        return render(self)


def _trusted(comps) -> JetDiffeo:
    return JetDiffeo(comps, check=False)


def identity(nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> JetDiffeo:
    return _trusted(S.variable(j, nvars, deg, field) for j in range(nvars))


def is_identity(f: JetDiffeo) -> bool:
    n = f.nvars
    for j, c in enumerate(f.components):
        e = tuple(int(i == j) for i in range(n))
        if len(c.terms) != 1 or c.terms.get(e) != ONE:
            return False
    return True


def compose(f: JetDiffeo, g: JetDiffeo) -> JetDiffeo:
    """The jet of ``f o g``."""
    f._check(g)
    return _trusted(S.substitute(c, g.components) for c in f.components)


def conj(g: JetDiffeo, h: JetDiffeo) -> JetDiffeo:
    return compose(compose(g, h), invert(g))


def invert(f: JetDiffeo) -> JetDiffeo:
    """Two-sided inverse, by the contraction ``g = L^-1 (x - N(g))``.

    Each pass fixes at least one more degree, so a repeated value is the
    unique solution.
    """
    L = f.linear_part()
    Linv = L.inverse()
    n, K, field = f.nvars, f.deg, f.field
    lin = [c.homogeneous(1) for c in f.components]
    nonlin = [c - l for c, l in zip(f.components, lin)]
    g = Linv.as_jet(K)
    if all(c.is_zero() for c in nonlin):
        return g
    xs = identity(n, K, field).components
    for _ in range(K):
        rhs = [x - S.substitute(N, g.components) for x, N in zip(xs, nonlin)]
        new = _trusted(
            sum((r.scale(Linv.rows[j][i]) for i, r in enumerate(rhs) if Linv.rows[j][i]), S.zero(n, K, field))
            for j in range(n)
        )
        if new == g:
            break
        g = new
    return g


def commutator(f: JetDiffeo, g: JetDiffeo) -> JetDiffeo:
    """``f o g o f^-1 o g^-1``."""
    f._check(g)
    return compose(compose(f, g), compose(invert(f), invert(g)))


def project(f: JetDiffeo, k: int) -> JetDiffeo:
    """Retruncation of every component to degree ``k`` (the projection p_k)."""
    if k > f.deg:
        raise PrecisionError(f"cannot project a K={f.deg} jet to degree {k}")
    if k < 1:
        raise ValueError("projection degree must be positive")
    return _trusted(S.retruncate(c, k) for c in f.components)


def tangency_order(f: JetDiffeo):
    """Largest k with f = id + O(|x|^(k+1)); ``math.inf`` for the identity jet."""
    v = min(S.valuation(c - x) for c, x in zip(f.components, identity(f.nvars, f.deg, f.field).components))
    return math.inf if v is math.inf else v - 1


def linear_part(f: JetDiffeo) -> LinearMap:
    return f.linear_part()


def det_linear(f: JetDiffeo) -> ExactScalar:
    return f.linear_part().det()


def power(f: JetDiffeo, m: int) -> JetDiffeo:
    if m < 0:
        return power(invert(f), -m)
    result = identity(f.nvars, f.deg, f.field)
    base = f
    while m:
        if m & 1:
            result = compose(result, base)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def scale_map(value, nvars: int, deg: int, field: Field = DEFAULT_FIELD) -> JetDiffeo:
    """The homothety x -> value*x."""
    return LinearMap.scalar(value, nvars, field).as_jet(deg)


# text and JSON ---------------------------------------------------------------------

def render(f: JetDiffeo) -> str:
    parts = [S.render(c) for c in f.components]
    return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


def to_json(f: JetDiffeo) -> dict:
    return {"nvars": f.nvars, "deg": f.deg, "components": [S.to_json(c) for c in f.components]}


def from_json(data: Mapping, field: Field = DEFAULT_FIELD) -> JetDiffeo:
    comps = [S.from_json(c, field) for c in data["components"]]
    if len(comps) != int(data["nvars"]) or any(c.deg != int(data["deg"]) for c in comps):
        raise ShapeError("JSON jet header disagrees with its components")
    return JetDiffeo(comps)


def components_from_ast(node, deg: int, field: Field, nvars: int | None = None) -> list[TruncatedSeries]:
    items = node.items if isinstance(node, parsing.Tuple) else (node,)
    if nvars is None:
        nvars = max(len(items), S.infer_nvars(node))
    if len(items) != nvars:
        raise ParseError(f"expected {nvars} components, found {len(items)}", getattr(node, "pos", None))
    return [S.evaluate_series_ast(it, nvars, deg, field) for it in items]


def parse_jet(text: str, deg: int, field: Field = DEFAULT_FIELD, nvars: int | None = None) -> JetDiffeo:
    """Parse ``"x + x^2"`` or ``"(x1 + x2^2, x2)"`` into a jet."""
    return JetDiffeo(components_from_ast(parsing.parse(text), deg, field, nvars))
