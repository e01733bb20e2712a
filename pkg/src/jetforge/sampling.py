"""Seeded random jets for property checks."""
from __future__ import annotations

import random

from gmpy2 import mpq

from . import series as S
from .jetgroup import JetDiffeo, LinearMap, _trusted, compose
from .lie import JetVectorField
from .scalar import DEFAULT_FIELD, ONE, Field


def random_scalar(rng: random.Random, field: Field = DEFAULT_FIELD, bound: int = 3, nonzero: bool = False):
    """Raw coefficient with small numerators and denominators."""
    while True:
        coords = [mpq(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(field.degree)]
        if field.degree > 1 and rng.random() < 0.5:
            coords[1:] = [mpq(0)] * (field.degree - 1)
        c = field.element(coords)
        if c or not nonzero:
            return c


def random_series(rng, nvars, deg, field=DEFAULT_FIELD, min_val=2, density=0.6, bound=3) -> S.TruncatedSeries:
    terms = {}
    for d in range(min_val, deg + 1):
        for e in _exponents(nvars, d):
            if rng.random() < density:
                c = random_scalar(rng, field, bound)
                if c:
                    terms[e] = c
    return S.TruncatedSeries(field, nvars, deg, terms)


def _exponents(n, d):
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in _exponents(n - 1, d - first):
            yield (first,) + rest


def random_tangent(rng, nvars, deg, field=DEFAULT_FIELD, min_order=1, **kw) -> JetDiffeo:
    """Random jet of the form id + terms of degree >= min_order + 1."""
    xs = [S.variable(j, nvars, deg, field) for j in range(nvars)]
    return _trusted(x + random_series(rng, nvars, deg, field, min_val=min_order + 1, **kw) for x in xs)


def random_linear(rng, nvars, field=DEFAULT_FIELD, bound=3) -> LinearMap:
    while True:
        L = LinearMap([[random_scalar(rng, field, bound) for _ in range(nvars)] for _ in range(nvars)], field)
        if L.det():
            return L


def random_jet(rng, nvars, deg, field=DEFAULT_FIELD, **kw) -> JetDiffeo:
    """Random jet with a random invertible linear part."""
    return compose(random_linear(rng, nvars, field).as_jet(deg), random_tangent(rng, nvars, deg, field, **kw))


def random_field(rng, nvars, deg, field=DEFAULT_FIELD, min_val=2, **kw) -> JetVectorField:
    comps = [random_series(rng, nvars, deg, field, min_val=min_val, **kw) for _ in range(nvars)]
    if all(c.is_zero() for c in comps):
        e = (min_val,) + (0,) * (nvars - 1)
        comps[0] = S.TruncatedSeries(field, nvars, deg, {e: ONE})
    return JetVectorField(comps)


def random_field_1d(rng, deg, valuation, field=DEFAULT_FIELD, **kw) -> JetVectorField:
    """One-dimensional field with exact valuation ``valuation``."""
    s = random_series(rng, 1, deg, field, min_val=valuation + 1, **kw)
    lead = random_scalar(rng, field, nonzero=True)
    return JetVectorField([s + S.TruncatedSeries(field, 1, deg, {(valuation,): lead})])
