"""Command-line front end.

Exit statuses: 0 success (including negative answers such as "not
conjugate"), 1 mathematical refusal, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import json
import os
import sys
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from . import jetgroup as J
from . import lie as L
from . import parsing
from . import series as S
from .classify import (
    centralizer_membership,
    cohopf_embed,
    decide_conjugate_1d,
    linearize_finite_group,
    normal_form_1d,
    poincare_linearize,
    realize_commutator,
)
from .errors import FieldMismatchError, JetError, ParseError, ShapeError
from .jetgroup import JetDiffeo, LinearMap
from .lie import JetVectorField
from .scalar import DEFAULT_FIELD, GAUSSIAN, RATIONALS, ExactScalar, ExtElement, Field, evaluate_scalar_ast
from .series import TruncatedSeries
from .words import check_relation, free_group_generators, parse_word, separation_index, verify_no_relations

ENV_DEFAULT_K = "JETFORGE_DEFAULT_K"


class UsageError(JetError):
    """Arity or type mismatch in a command-line expression."""


def default_degree(nvars: int) -> int:
    env = os.environ.get(ENV_DEFAULT_K)
    if env:
        try:
            k = int(env)
        except ValueError:
            raise UsageError(f"{ENV_DEFAULT_K} must be an integer, got {env!r}") from None
        if k < 1:
            raise UsageError(f"{ENV_DEFAULT_K} must be positive")
        return k
    return 12 if nvars == 1 else 6


@dataclass
class Session:
    """Active field, optional fixed truncation degree and named values."""

    field: Field = DEFAULT_FIELD
    deg: int | None = None
    bindings: dict = dc_field(default_factory=dict)

    def degree_for(self, nvars: int) -> int:
        return self.deg if self.deg is not None else default_degree(nvars)

    def bind(self, name: str, value):
        if S.variable_index(name) is not None or name in ("i", "t") or name in _FUNCTIONS:
            raise UsageError(f"cannot rebind reserved name {name!r}")
        vf = getattr(value, "field", None)
        if vf is not None and vf != self.field:
            raise FieldMismatchError(f"binding {name!r} lives in {vf!r}, session uses {self.field!r}")
        self.bindings[name] = value


# expression evaluation ---------------------------------------------------------------

def _nvars_of(node, session: Session) -> int:
    n = S.infer_nvars(node)
    for name in parsing.names_in(node):
        v = session.bindings.get(name)
        if v is not None and hasattr(v, "nvars"):
            n = max(n, v.nvars)
    stack = [node]
    while stack:
        m = stack.pop()
        if isinstance(m, parsing.Tuple):
            n = max(n, len(m.items))
            stack.extend(m.items)
        elif isinstance(m, parsing.Call):
            stack.extend(m.args)
        elif isinstance(m, parsing.BinOp):
            stack.extend((m.left, m.right))
        elif isinstance(m, parsing.Neg):
            stack.append(m.operand)
    return n


class _Evaluator:
    def __init__(self, session: Session, nvars: int, deg: int):
        self.session = session
        self.field = session.field
        self.n = nvars
        self.K = deg

    # coercions
    def series(self, v, pos=None) -> TruncatedSeries:
        if isinstance(v, ExactScalar):
            return S.constant(v.value, self.n, self.K, self.field)
        if isinstance(v, TruncatedSeries):
            return v
        if isinstance(v, (JetDiffeo, JetVectorField)) and v.nvars == 1:
            return v.components[0]
        raise UsageError(f"expected a series at position {pos}, got {_kind(v)}")

    def comps(self, v, pos=None) -> tuple:
        if isinstance(v, tuple):
            return v
        if isinstance(v, (JetDiffeo, JetVectorField)):
            return v.components
        s = self.series(v, pos)
        if self.n != 1:
            raise UsageError(f"a single expression cannot stand for a {self.n}-component map (position {pos})")
        return (s,)

    def jet(self, v, pos=None) -> JetDiffeo:
        if isinstance(v, JetDiffeo):
            return v
        if isinstance(v, JetVectorField):
            raise UsageError(f"expected a jet at position {pos}, got a vector field")
        return JetDiffeo(self.comps(v, pos))

    def vfield(self, v, pos=None) -> JetVectorField:
        if isinstance(v, JetVectorField):
            return v
        if isinstance(v, JetDiffeo):
            raise UsageError(f"expected a vector field at position {pos}, got a jet")
        return JetVectorField(self.comps(v, pos))

    def scalar(self, v, pos=None) -> ExactScalar:
        if isinstance(v, ExactScalar):
            return v
        if isinstance(v, TruncatedSeries) and set(v.terms) <= {(0,) * v.nvars}:
            return ExactScalar(self.field, v.constant_term())
        raise UsageError(f"expected a scalar at position {pos}, got {_kind(v)}")

    # evaluation
    def ev(self, node):
        if isinstance(node, parsing.Num):
            return ExactScalar(self.field, node.value)
        if isinstance(node, parsing.Name):
            if node.name in self.session.bindings:
                return self.session.bindings[node.name]
            j = S.variable_index(node.name)
            if j is not None:
                if j >= self.n:
                    raise ParseError(f"variable {node.name!r} exceeds {self.n} variables", node.pos)
                return S.variable(j, self.n, self.K, self.field)
            return ExactScalar(self.field, self.field.coerce(evaluate_scalar_ast(node, self.field)))
        if isinstance(node, parsing.Tuple):
            return tuple(self.series(self.ev(it), it.pos) for it in node.items)
        if isinstance(node, parsing.Neg):
            v = self.ev(node.operand)
            if isinstance(v, tuple):
                return tuple(-c for c in v)
            if isinstance(v, (JetDiffeo, JetVectorField)) and v.nvars > 1:
                return tuple(-c for c in v.components)
            return -v if isinstance(v, ExactScalar) else -self.series(v, node.pos)
        if isinstance(node, parsing.BinOp):
            return self.binop(node)
        if isinstance(node, parsing.Call):
            fn = _FUNCTIONS.get(node.name)
            if fn is None:
                raise ParseError(f"unknown function {node.name!r}", node.pos)
            lo, hi, impl = fn
            if not lo <= len(node.args) <= hi:
                raise UsageError(f"{node.name} takes {lo}..{hi} arguments, got {len(node.args)} (position {node.pos})")
            return impl(self, node)
        raise ParseError("unsupported expression", getattr(node, "pos", None))

    def binop(self, node):
        a, b = self.ev(node.left), self.ev(node.right)
        op = node.op
        if isinstance(a, ExactScalar) and isinstance(b, ExactScalar):
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if not b:
                    raise ParseError("division by zero", node.pos)
                return a / b
            if op == "^":
                e = b.value
                if isinstance(e, ExtElement) or e.denominator != 1:
                    raise ParseError("scalar exponents must be integers", node.pos)
                return a ** int(e)
        multi = any(isinstance(v, tuple) or (hasattr(v, "nvars") and v.nvars > 1 and not isinstance(v, TruncatedSeries)) for v in (a, b))
        if multi:
            if op in "+-":
                ca, cb = self.comps(a, node.pos), self.comps(b, node.pos)
                return tuple(x + y if op == "+" else x - y for x, y in zip(ca, cb))
            if op == "*" and isinstance(a, ExactScalar):
                return tuple(c.scale(a.value) for c in self.comps(b, node.pos))
            if op == "*" and isinstance(b, ExactScalar):
                return tuple(c.scale(b.value) for c in self.comps(a, node.pos))
            raise UsageError(f"operator {op!r} is not defined on component tuples (position {node.pos})")
        if op == "^":
            base = self.series(a, node.pos)
            e = self.scalar(b, node.pos).value
            if isinstance(e, ExtElement):
                raise ParseError("exponents must be rational", node.pos)
            if e.denominator == 1 and (e >= 0 or base.constant_term()):
                return base ** int(e)
            if base.constant_term() == 1:
                return S.binomial_power(base, e)
            raise ParseError("fractional or negative power needs constant term 1", node.pos)
        sa, sb = self.series(a, node.pos), self.series(b, node.pos)
        if op == "+":
            return sa + sb
        if op == "-":
            return sa - sb
        if op == "*":
            return sa * sb
        if op == "/":
            if not sb.constant_term():
                if sb.is_zero():
                    raise ParseError("division by zero", node.pos)
                raise ParseError("division by a series without constant term", node.pos)
            return sa * S.reciprocal(sb)
        raise ParseError(f"unknown operator {op!r}", node.pos)


def _kind(v) -> str:
    return {
        ExactScalar: "a scalar",
        TruncatedSeries: "a series",
        JetDiffeo: "a jet",
        JetVectorField: "a vector field",
        tuple: "a component tuple",
    }.get(type(v), type(v).__name__)


def _args(e: _Evaluator, node):
    return [(e.ev(a), a.pos if hasattr(a, "pos") else None) for a in node.args]


def _fn_exp(e, node):
    (X, p), *rest = _args(e, node)
    t = e.scalar(rest[0][0], rest[0][1]).value if rest else 1
    return L.exp_flow(e.vfield(X, p), t)


def _fn_log(e, node):
    (f, p), = _args(e, node)
    return L.log_jet(e.jet(f, p))


def _fn_inv(e, node):
    (f, p), = _args(e, node)
    return J.invert(e.jet(f, p))


def _fn_comm(e, node):
    (f, p), (g, q) = _args(e, node)
    return J.commutator(e.jet(f, p), e.jet(g, q))


def _fn_compose(e, node):
    args = _args(e, node)
    out = e.jet(*args[0])
    for v, p in args[1:]:
        out = J.compose(out, e.jet(v, p))
    return out


def _fn_pow(e, node):
    (f, p), (m, q) = _args(e, node)
    m = e.scalar(m, q).value
    if isinstance(m, ExtElement) or m.denominator != 1:
        raise UsageError("pow needs an integer exponent")
    return J.power(e.jet(f, p), int(m))


def _fn_push(e, node):
    (f, p), (X, q) = _args(e, node)
    return L.pushforward(e.jet(f, p), e.vfield(X, q))


def _fn_bch(e, node):
    (X, p), (Y, q) = _args(e, node)
    return L.bch(e.vfield(X, p), e.vfield(Y, q))


def _fn_bracket(e, node):
    (X, p), (Y, q) = _args(e, node)
    return L.bracket(e.vfield(X, p), e.vfield(Y, q))


def _fn_xfield(e, node):
    (k, p), (lam, q) = _args(e, node)
    k = e.scalar(k, p).value
    if isinstance(k, ExtElement) or k.denominator != 1 or k < 1:
        raise UsageError("Xfield needs a positive integer k")
    if e.n != 1:
        raise UsageError("Xfield is one-dimensional")
    return L.normal_field(int(k), e.scalar(lam, q).value, e.K, e.field)


_FUNCTIONS = {
    "exp": (1, 2, _fn_exp),
    "log": (1, 1, _fn_log),
    "inv": (1, 1, _fn_inv),
    "comm": (2, 2, _fn_comm),
    "compose": (1, 16, _fn_compose),
    "pow": (2, 2, _fn_pow),
    "push": (2, 2, _fn_push),
    "bch": (2, 2, _fn_bch),
    "bracket": (2, 2, _fn_bracket),
    "Xfield": (2, 2, _fn_xfield),
}


def parse_expression(text: str, session: Session, role: str | None = None):
    """Evaluate an expression; ``role`` ('jet' or 'field') forces the result type."""
    node = parsing.parse(text)
    n = _nvars_of(node, session)
    K = session.degree_for(n)
    for v in session.bindings.values():
        if hasattr(v, "deg") and v.deg != K:
            raise ShapeError(f"binding has K={v.deg} but the session uses K={K}; retruncate explicitly")
    ev = _Evaluator(session, n, K)
    value = ev.ev(node)
    if role == "jet":
        return ev.jet(value, 0)
    if role == "field":
        return ev.vfield(value, 0)
    if isinstance(value, TruncatedSeries) and n == 1 and not value.constant_term() and value.terms:
        try:
            return JetDiffeo([value])
        except JetError:
            return value
    if isinstance(value, tuple):
        try:
            return JetDiffeo(value)
        except JetError:
            return value
    return value


# rendering ---------------------------------------------------------------------

def render_value(v) -> str:
    if isinstance(v, JetDiffeo):
        return J.render(v)
    if isinstance(v, JetVectorField):
        return L.render(v)
    if isinstance(v, TruncatedSeries):
        return S.render(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(S.render(c) for c in v) + ")"
    return str(v)


def json_value(v):
    if isinstance(v, JetDiffeo):
        return {"role": "jet", **J.to_json(v)}
    if isinstance(v, JetVectorField):
        return L.to_json(v)
    if isinstance(v, TruncatedSeries):
        return {"role": "series", **S.to_json(v)}
    if isinstance(v, tuple):
        return {"role": "tuple", "components": [S.to_json(c) for c in v]}
    return {"role": "scalar", "value": str(v)}


# argument handling ---------------------------------------------------------------

def _field_from_args(args) -> Field:
    name = args.field
    if name in ("Q", "QQ", "rationals"):
        if args.minpoly:
            raise UsageError("--minpoly needs --field ext")
        return RATIONALS
    if name in ("Q(i)", "Qi", "gaussian"):
        if args.minpoly:
            raise UsageError("--minpoly needs --field ext")
        return GAUSSIAN
    if name in ("ext", "Q[t]"):
        if not args.minpoly:
            raise UsageError("--field ext needs --minpoly")
        return Field.simple_extension(args.minpoly)
    raise UsageError(f"unknown field {name!r}")


def _session(args) -> Session:
    if args.K is not None and args.K < 1:
        raise UsageError("--K must be positive")
    s = Session(_field_from_args(args), args.K)
    for item in getattr(args, "let", None) or []:
        name, eq, text = item.partition("=")
        if not eq or not name.strip().isidentifier():
            raise UsageError(f"--let expects NAME=EXPR, got {item!r}")
        s.bind(name.strip(), parse_expression(text, s))
    return s


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--K", type=int, default=None, help="truncation degree (default 12 for n=1, 6 otherwise)")
    common.add_argument("--field", default="Q(i)", help="Q, Q(i) or ext (with --minpoly)")
    common.add_argument("--minpoly", default=None, help="minimal polynomial in t for --field ext, e.g. 't^2-2'")
    common.add_argument("--json", action="store_true", help="emit JSON")

    p = argparse.ArgumentParser(prog="jetforge", description="Exact computations with jets of formal diffeomorphisms.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    e.add_argument("expr")
    e.add_argument("--let", action="append", metavar="NAME=EXPR", help="bind a name before evaluating")
    e.add_argument("--as", dest="role", choices=("jet", "field"), default=None)

    lz = sub.add_parser("linearize", parents=[common], help="formal linearization of a jet with diagonal linear part")
    lz.add_argument("jet")
    lz.add_argument("--realize-with", metavar="LAMBDA", default=None, help="treat the input as h and solve [phi, LAMBDA*id] = h")

    nf = sub.add_parser("normal-form", parents=[common], help="1D normal form (k, a, rho)")
    nf.add_argument("vectorfield")

    cj = sub.add_parser("conjugate", parents=[common], help="decide formal conjugacy of two 1D fields")
    cj.add_argument("X")
    cj.add_argument("Y")
    cj.add_argument("--allow-linear", action="store_true")

    ce = sub.add_parser("centralizer", parents=[common], help="membership in the centralizer of exp X_{k,lambda}")
    ce.add_argument("jet")
    ce.add_argument("--k", type=int, required=True)
    ce.add_argument("--lambda", dest="lam", default="0")

    av = sub.add_parser("average", parents=[common], help="linearize a finite group by averaging")
    av.add_argument("jets", nargs="+")

    em = sub.add_parser("embed", parents=[common], help="square-root embedding E o g = f o E")
    em.add_argument("jet")
    em.add_argument("--out-deg", type=int, default=None)

    se = sub.add_parser("separate", parents=[common], help="smallest k with p_k(f) != id")
    se.add_argument("jet")

    wo = sub.add_parser("words", help="group words over jet generators")
    wsub = wo.add_subparsers(dest="words_command", required=True)
    wv = wsub.add_parser("verify", parents=[common], help="look for short relations")
    wv.add_argument("--max-len", type=int, required=True)
    wv.add_argument("--free-gens", action="store_true", help="use x/(1+x) and x/(1+x^3)^(1/3)")
    wv.add_argument("--gen", action="append", default=[], help="generator expression (repeatable)")

    rel = sub.add_parser("relation", parents=[common], help="check a relation between words")
    rel.add_argument("lhs")
    rel.add_argument("rhs")
    rel.add_argument("--gen", action="append", default=[], required=True)

    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--json", action="store_true")
    st.add_argument("--only", type=int, action="append", default=None, help="run only this criterion (repeatable)")
    return p


# commands ---------------------------------------------------------------------

def _cmd_eval(args):
    s = _session(args)
    v = parse_expression(args.expr, s, args.role)
    return json_value(v), render_value(v)


def _cmd_linearize(args):
    s = _session(args)
    f = parse_expression(args.jet, s, "jet")
    if args.realize_with is not None:
        lam = parse_expression(args.realize_with, Session(s.field, 1))
        if not isinstance(lam, ExactScalar):
            raise UsageError("--realize-with needs a scalar")
        phi = realize_commutator(f, LinearMap.scalar(lam.value, f.nvars, s.field))
    else:
        phi = poincare_linearize(f)
    return {"role": "jet", **J.to_json(phi)}, J.render(phi)


def _cmd_normal_form(args):
    s = _session(args)
    X = parse_expression(args.vectorfield, s, "field")
    nf = normal_form_1d(X)
    text = f"k={nf.k} a={nf.a} rho={nf.rho}\nconjugator: {J.render(nf.conjugator)}"
    return nf.to_json(), text


def _cmd_conjugate(args):
    s = _session(args)
    X = parse_expression(args.X, s, "field")
    Y = parse_expression(args.Y, s, "field")
    phi = decide_conjugate_1d(X, Y, args.allow_linear)
    if phi is None:
        return {"conjugate": False, "conjugator": None}, "not conjugate"
    return {"conjugate": True, "conjugator": J.to_json(phi)}, f"conjugate\nconjugator: {J.render(phi)}"


def _cmd_centralizer(args):
    s = _session(args)
    f = parse_expression(args.jet, s, "jet")
    lam = parse_expression(args.lam, Session(s.field, 1))
    if not isinstance(lam, ExactScalar):
        raise UsageError("--lambda needs a scalar")
    if args.k < 1:
        raise UsageError("--k must be positive")
    got = centralizer_membership(f, args.k, lam.value)
    if got is None:
        return {"member": False}, "not in centralizer"
    t, xi = got
    return {"member": True, "t": str(t), "xi": str(xi)}, f"t={t} xi={xi}"


def _cmd_average(args):
    s = _session(args)
    H = [parse_expression(text, s, "jet") for text in args.jets]
    phi = linearize_finite_group(H)
    return {"role": "jet", **J.to_json(phi)}, J.render(phi)


def _cmd_embed(args):
    s = _session(args)
    f = parse_expression(args.jet, s, "jet")
    g = cohopf_embed(f, args.out_deg)
    return {"role": "jet", **J.to_json(g)}, J.render(g)


def _cmd_separate(args):
    s = _session(args)
    k = separation_index(parse_expression(args.jet, s, "jet"))
    return {"separation_index": k}, str(k)


def _cmd_words(args):
    s = _session(args)
    if args.max_len < 1:
        raise UsageError("--max-len must be positive")
    if args.free_gens == bool(args.gen):
        raise UsageError("give either --free-gens or at least one --gen")
    if args.free_gens:
        K = s.degree_for(1)
        gens = free_group_generators(K, s.field)
        rerun = lambda d: free_group_generators(d, s.field)  # noqa: E731
    else:
        gens = [parse_expression(g, s, "jet") for g in args.gen]
        rerun = None
    report = verify_no_relations(gens, args.max_len, rerun=rerun)
    text = report.summary()
    if report.identity:
        text += "\nidentity: " + "; ".join(str(w) for w in report.identity)
    if report.undecided:
        text += "\nundecided: " + "; ".join(str(w) for w in report.undecided)
    return report.to_json(), text


def _cmd_relation(args):
    s = _session(args)
    gens = [parse_expression(g, s, "jet") for g in args.gen]
    lhs, rhs = parse_word(args.lhs), parse_word(args.rhs)
    for w in (lhs, rhs):
        for i, _ in w.letters:
            if i >= len(gens):
                raise UsageError(f"word uses g{i} but only {len(gens)} generators were given")
    ok = check_relation(gens, lhs, rhs)
    return {"holds": ok, "lhs": str(lhs), "rhs": str(rhs)}, "true" if ok else "false"


def _cmd_selftest(args):
    from .acceptance import CHECKS, run_check

    numbers = args.only or [n for n, _, _ in CHECKS]
    for n in numbers:
        if not 1 <= n <= len(CHECKS):
            raise UsageError(f"no acceptance criterion {n}")
    results = [run_check(n) for n in numbers]
    payload = [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    text = "\n".join(r.line() for r in results)
    passed = sum(r.passed for r in results)
    text += f"\n{passed}/{len(results)} criteria passed"
    return {"results": payload, "passed": passed, "total": len(results)}, text, 0 if passed == len(results) else 1


_COMMANDS = {
    "eval": _cmd_eval,
    "linearize": _cmd_linearize,
    "normal-form": _cmd_normal_form,
    "conjugate": _cmd_conjugate,
    "centralizer": _cmd_centralizer,
    "average": _cmd_average,
    "embed": _cmd_embed,
    "separate": _cmd_separate,
    "words": _cmd_words,
    "relation": _cmd_relation,
    "selftest": _cmd_selftest,
}


@dataclass
class CommandResult:
    status: int
    stdout: str
    stderr: str = ""


def run_command(argv: Sequence[str]) -> CommandResult:
    parser = _build_parser()
    err = io.StringIO()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return CommandResult(code, "", err.getvalue())
    try:
        out = _COMMANDS[args.command](args)
    except (ParseError, ShapeError, FieldMismatchError, UsageError) as exc:
        return CommandResult(2, "", f"error: {exc}\n")
    except JetError as exc:
        return CommandResult(1, "", f"refused: {exc}\n")
    except (IndexError, TypeError) as exc:
        return CommandResult(2, "", f"error: {exc}\n")
    payload, text, *status = out
    status = status[0] if status else 0
    body = json.dumps(payload, indent=2, ensure_ascii=False) if args.json else text
    return CommandResult(status, body + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    res = run_command(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
