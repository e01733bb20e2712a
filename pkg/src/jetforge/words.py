"""Group words over jet generators.

A word ``g0 g1^-1`` evaluates to ``g0 o g1^-1``: letters compose left to
right in reading order, the rightmost letter acting first.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

from gmpy2 import mpq

from . import series as S
from .errors import ParseError, ShapeError, UndecidedError
from .jetgroup import JetDiffeo, _trusted, compose, identity, invert, is_identity, power, tangency_order
from .scalar import DEFAULT_FIELD, Field


@dataclass(frozen=True)
class GroupWord:
    letters: tuple = ()

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        for i, _ in letters:
            if i < 0:
                raise ValueError("generator indices are non-negative")
        object.__setattr__(self, "letters", letters)

    def reduce(self) -> "GroupWord":
        out: list = []
        for i, e in self.letters:
            if out and out[-1][0] == i:
                e += out.pop()[1]
            if e:
                out.append((i, e))
        return GroupWord(tuple(out))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((i, -e) for i, e in reversed(self.letters)))

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"g{i}" if e == 1 else f"g{i}^{e}" for i, e in self.letters)


_LETTER = re.compile(r"\s*(?:g(\d+)|([a-f]))(?:\s*\^\s*(-?\d+))?")


def parse_word(text: str) -> GroupWord:
    """Parse ``"g0 g1^-1 g0^2"``; single letters ``a``..``f`` stand for g0..g5."""
    text = text.strip()
    if text in ("", "1", "e"):
        return GroupWord()
    letters = []
    pos = 0
    while pos < len(text):
        m = _LETTER.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"bad word syntax near {text[pos:pos + 8]!r}", pos)
        idx = int(m.group(1)) if m.group(1) is not None else ord(m.group(2)) - ord("a")
        exp = int(m.group(3)) if m.group(3) is not None else 1
        letters.append((idx, exp))
        pos = m.end()
        while pos < len(text) and text[pos] in " *":
            pos += 1
    return GroupWord(tuple(letters))


def evaluate_word(gens: Sequence[JetDiffeo], w: GroupWord) -> JetDiffeo:
    if not gens:
        raise ShapeError("no generators")
    for g in gens[1:]:
        gens[0]._check(g)
    result = identity(gens[0].nvars, gens[0].deg, gens[0].field)
    inverses: dict = {}
    for i, e in w.letters:
        if i >= len(gens):
            raise IndexError(f"generator g{i} out of range ({len(gens)} generators)")
        if e < 0 and i not in inverses:
            inverses[i] = invert(gens[i])
        base = gens[i] if e > 0 else inverses[i]
        result = compose(result, power(base, abs(e)))
    return result


def separation_index(f: JetDiffeo) -> int:
    """Smallest k with ``project(f, k)`` different from the identity."""
    if not f.linear_part().is_identity():
        return 1
    t = tangency_order(f)
    if t == float("inf"):
        raise UndecidedError(f"the jet is the identity at K={f.deg}; no witness below this precision")
    return t + 1


def check_relation(gens: Sequence[JetDiffeo], lhs: GroupWord, rhs: GroupWord) -> bool:
    return evaluate_word(gens, lhs) == evaluate_word(gens, rhs)


def free_group_generators(deg: int, field: Field = DEFAULT_FIELD) -> tuple:
    """The jets of ``x/(1+x)`` and ``x/(1+x^3)^(1/3)``."""
    x = S.variable(0, 1, deg, field)
    one = S.constant(1, 1, deg, field)
    f1 = x * S.reciprocal(one + x)
    f2 = x * S.binomial_power(one + x * x * x, mpq(-1, 3))
    return _trusted([f1]), _trusted([f2])


@dataclass
class RelationReport:
    checked: int
    identity: list
    undecided: list

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "identity": [str(w) for w in self.identity],
            "undecided": [str(w) for w in self.undecided],
        }

    def summary(self) -> str:
        return f"checked={self.checked} identity={len(self.identity)} undecided={len(self.undecided)}"


def _letter_key(letter):
    i, e = letter
    return (i, 0 if e > 0 else 1)


def _word_key(w: GroupWord):
    return (len(w.letters), [_letter_key(l) for l in w.letters])


def reduced_words(ngens: int, max_len: int):
    """All nonempty reduced words of length <= max_len, as tuples of (index, +-1)."""
    alphabet = sorted(((i, s) for i in range(ngens) for s in (1, -1)), key=_letter_key)
    stack = [()]
    while stack:
        w = stack.pop()
        if w:
            yield w
        if len(w) < max_len:
            for a in alphabet:
                if not w or w[-1] != (a[0], -a[1]):
                    stack.append(w + (a,))


def _identity_words(gens: Sequence[JetDiffeo], max_len: int):
    """DFS over reduced words sharing prefix evaluations; returns (count, identity words)."""
    letters = {}
    for i, g in enumerate(gens):
        letters[(i, 1)] = g
        letters[(i, -1)] = invert(g)
    alphabet = sorted(letters, key=_letter_key)
    checked = 0
    found = []
    start = identity(gens[0].nvars, gens[0].deg, gens[0].field)
    stack = [((), start)]
    while stack:
        w, jet = stack.pop()
        if len(w) == max_len:
            continue
        for a in alphabet:
            if w and w[-1] == (a[0], -a[1]):
                continue
            nw = w + (a,)
            nj = compose(jet, letters[a])
            checked += 1
            if is_identity(nj):
                found.append(GroupWord(nw))
            stack.append((nw, nj))
    return checked, found


def verify_no_relations(
    gens: Sequence[JetDiffeo],
    max_len: int,
    deg: int | None = None,
    rerun: Callable[[int], Sequence[JetDiffeo]] | None = None,
) -> RelationReport:
    """Evaluate every reduced word of length <= max_len and report those that vanish.

    ``identity`` lists words equal to the identity at the working degree.
    Those words are re-evaluated with ``rerun(2K)`` when a generator factory
    is supplied; words that still vanish (or cannot be re-evaluated) are
    ``undecided``.  An empty ``identity`` list certifies the absence of
    short relations.
    """
    gens = list(gens)
    if deg is not None and deg != gens[0].deg:
        if deg > gens[0].deg:
            if rerun is None:
                raise ShapeError("raising the degree needs a generator factory")
            gens = list(rerun(deg))
        else:
            from .jetgroup import project

            gens = [project(g, deg) for g in gens]
    checked, found = _identity_words(gens, max_len)
    found.sort(key=_word_key)
    if rerun is None or not found:
        undecided = list(found)
    else:
        finer = list(rerun(2 * gens[0].deg))
        undecided = [w for w in found if is_identity(evaluate_word(finer, GroupWord(w.letters)))]
    return RelationReport(checked, found, undecided)
