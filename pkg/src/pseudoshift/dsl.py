"""A small expression language for integer sets, index predicates and weight rules.

Grammar::

    set       := term ('|' term)*
    term      := 'range' '(' expr ',' expr ')'
               | 'list' '(' expr (',' expr)* ')'
               | 'family' NAME '>=' INT ':' 'range' '(' expr ',' expr ')'
               | NAME
    predicate := clause ('AND' clause)*
    clause    := expr (CMP expr)+ | expr ['not'] 'in' set
    expr      := sum with + - * / ^, unary minus, abs(expr), names, numbers

``^`` binds tighter than unary minus and is right associative.  Family
endpoints must increase strictly with the parameter, so membership is
decided by a bounded scan that stops once the lower endpoint passes the
queried value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .errors import NonmonotoneFamilyError, ParseError, ValidationError
from .logmag import LogProduct

# ---------------------------------------------------------------------- tokens

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|==|!=|[-+*/^(),:<>=|]))"
)
KEYWORDS = {"range", "list", "family", "in", "not", "and", "abs"}
CMP_OPS = ("<=", ">=", "<", ">", "==", "!=")


@dataclass(frozen=True)
class Token:
    kind: str  # num | name | op | end
    text: str
    col: int   # 1-based column in the source text


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col)
        kind = m.lastgroup
        value = m.group(kind)
        out.append(Token(kind, value, m.start(kind) + 1))
        pos = m.end()
    out.append(Token("end", "", len(text) + 1))
    return out


# ------------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Abs:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class RangeSet:
    lo: object
    hi: object


@dataclass(frozen=True)
class ListSet:
    items: tuple


@dataclass(frozen=True)
class Family:
    var: str
    start: int
    lo: object
    hi: object


@dataclass(frozen=True)
class SetRef:
    name: str


@dataclass(frozen=True)
class Union:
    parts: tuple


@dataclass(frozen=True)
class Cmp:
    ops: tuple
    args: tuple


@dataclass(frozen=True)
class Member:
    arg: object
    set: object
    negated: bool


@dataclass(frozen=True)
class And:
    parts: tuple


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


# ---------------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, 1, tok.col)

    def next(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def at(self, text) -> bool:
        tok = self.tok
        if tok.kind == "name":
            return tok.text.lower() == text
        return tok.kind == "op" and tok.text == text

    def expect(self, text) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def finish(self, node):
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    # expressions

    def expr(self):
        node = self.product()
        while self.at("+") or self.at("-"):
            op = self.next().text
            node = Bin(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.next().text
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.at("-"):
            self.next()
            return Neg(self.unary())
        if self.at("+"):
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.next()
            return Bin("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.next()
            return Num(Fraction(tok.text))
        if self.at("("):
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        if self.at("abs"):
            self.next()
            self.expect("(")
            node = self.expr()
            self.expect(")")
            return Abs(node)
        if tok.kind == "name" and tok.text.lower() not in KEYWORDS:
            self.next()
            return Var(tok.text)
        raise self.error(f"expected a number or name, found {tok.text or 'end of input'!r}")

    # sets

    def set_expr(self):
        parts = [self.set_term()]
        while self.at("|"):
            self.next()
            parts.append(self.set_term())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def _range_args(self):
        self.expect("range")
        self.expect("(")
        lo = self.expr()
        self.expect(",")
        hi = self.expr()
        self.expect(")")
        return lo, hi

    def set_term(self):
        tok = self.tok
        if self.at("range"):
            return RangeSet(*self._range_args())
        if self.at("list"):
            self.next()
            self.expect("(")
            items = [self.expr()]
            while self.at(","):
                self.next()
                items.append(self.expr())
            self.expect(")")
            return ListSet(tuple(items))
        if self.at("family"):
            self.next()
            var = self.next()
            if var.kind != "name" or var.text.lower() in KEYWORDS:
                raise self.error("expected the family parameter name", var)
            self.expect(">=")
            start = self.next()
            negative = False
            if start.kind == "op" and start.text == "-":
                negative, start = True, self.next()
            if start.kind != "num" or "." in start.text:
                raise self.error("expected an integer start value", start)
            self.expect(":")
            body = self.tok
            lo, hi = self._range_args()
            node = Family(var.text, -int(start.text) if negative else int(start.text), lo, hi)
            _check_family(node, self.text, body.col)
            return node
        if tok.kind == "name" and tok.text.lower() not in KEYWORDS:
            self.next()
            return SetRef(tok.text)
        raise self.error(f"expected a set, found {tok.text or 'end of input'!r}")

    # predicates

    def predicate(self):
        parts = [self.clause()]
        while self.at("and"):
            self.next()
            parts.append(self.clause())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def clause(self):
        first = self.expr()
        if self.at("not"):
            self.next()
            self.expect("in")
            return Member(first, self.set_expr(), True)
        if self.at("in"):
            self.next()
            return Member(first, self.set_expr(), False)
        ops, args = [], [first]
        while self.tok.kind == "op" and self.tok.text in CMP_OPS + ("=",):
            op = self.next().text
            ops.append("==" if op == "=" else op)
            args.append(self.expr())
        if not ops:
            raise self.error("expected a comparison or 'in'")
        return Cmp(tuple(ops), tuple(args))


def parse_expr(text: str):
    p = _Parser(text)
    return p.finish(p.expr())


def parse_set(text: str):
    p = _Parser(text)
    return p.finish(p.set_expr())


def parse_predicate(text: str):
    p = _Parser(text)
    return p.finish(p.predicate())


# --------------------------------------------------------------------- printer


def to_text(node) -> str:
    """Canonical source text; ``parse(to_text(node)) == node``."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.arg)
        if isinstance(node.arg, Bin) and node.arg.op != "^" or isinstance(node.arg, Neg):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Abs):
        return f"abs({to_text(node.arg)})"
    if isinstance(node, Bin):
        return _bin_text(node)
    if isinstance(node, RangeSet):
        return f"range({to_text(node.lo)}, {to_text(node.hi)})"
    if isinstance(node, ListSet):
        return "list(" + ", ".join(to_text(x) for x in node.items) + ")"
    if isinstance(node, Family):
        return (f"family {node.var}>={node.start}: "
                f"range({to_text(node.lo)}, {to_text(node.hi)})")
    if isinstance(node, SetRef):
        return node.name
    if isinstance(node, Union):
        return " | ".join(to_text(p) for p in node.parts)
    if isinstance(node, Cmp):
        out = to_text(node.args[0])
        for op, arg in zip(node.ops, node.args[1:]):
            out += f" {op} {to_text(arg)}"
        return out
    if isinstance(node, Member):
        return f"{to_text(node.arg)} {'not in' if node.negated else 'in'} {to_text(node.set)}"
    if isinstance(node, And):
        return " AND ".join(to_text(p) for p in node.parts)
    raise TypeError(node)


def _num_text(v: Fraction) -> str:
    # numbers only come from decimal literals, so the denominator divides a power of ten
    if v.denominator == 1:
        return str(v.numerator)
    places = 1
    while (10 ** places) % v.denominator:
        places += 1
    scaled = v.numerator * 10 ** places // v.denominator
    whole, frac = divmod(scaled, 10 ** places)
    return f"{whole}.{frac:0{places}d}".rstrip("0")


def _bin_text(node: Bin) -> str:
    left, right = to_text(node.left), to_text(node.right)
    if node.op == "^":
        # the base must be atomic; the exponent may be any unary chain
        if not isinstance(node.left, (Num, Var, Abs)):
            left = f"({left})"
        if isinstance(node.right, Bin) and node.right.op != "^":
            right = f"({right})"
        return f"{left}^{right}"
    prec = _PREC[node.op]
    if _needs_parens(node.left, prec, False):
        left = f"({left})"
    if _needs_parens(node.right, prec, True):
        right = f"({right})"
    return f"{left} {node.op} {right}"


def _needs_parens(child, prec, is_right) -> bool:
    if isinstance(child, Neg):
        return prec >= 2
    if not isinstance(child, Bin):
        return False
    cp = _PREC[child.op]
    return cp < prec or (is_right and cp == prec)


# ------------------------------------------------------------------ evaluation


def _to_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def compile_expr(node, constants: dict | None = None) -> Callable:
    """A function ``env -> int | Fraction`` for an arithmetic expression."""
    constants = constants or {}
    if isinstance(node, Num):
        value = _to_number(node.value)
        return lambda env: value
    if isinstance(node, Var):
        name = node.name
        if name in constants:
            value = constants[name]
            return lambda env: value

        def lookup(env):
            try:
                return env[name]
            except KeyError:
                raise ValidationError("expression", f"unknown name {name!r}") from None

        return lookup
    if isinstance(node, Neg):
        f = compile_expr(node.arg, constants)
        return lambda env: -f(env)
    if isinstance(node, Abs):
        f = compile_expr(node.arg, constants)
        return lambda env: abs(f(env))
    if isinstance(node, Bin):
        a, b = compile_expr(node.left, constants), compile_expr(node.right, constants)
        op = node.op
        if op == "+":
            return lambda env: a(env) + b(env)
        if op == "-":
            return lambda env: a(env) - b(env)
        if op == "*":
            return lambda env: a(env) * b(env)
        if op == "/":
            return lambda env: _to_number(Fraction(a(env)) / Fraction(b(env)))
        return lambda env: _power(a(env), b(env))
    raise ValidationError("expression", f"not an arithmetic expression: {to_text(node)}")


def _power(base, exp):
    exp = Fraction(exp)
    if exp.denominator != 1:
        raise ValidationError("expression", "non-integer exponent in an exact expression")
    e = exp.numerator
    if abs(e) > 100_000:
        raise ValidationError("expression", "exponent too large for exact arithmetic")
    return _to_number(Fraction(base) ** e)


def compile_value(node, constants: dict | None = None) -> Callable:
    """A function ``env -> LogProduct``; powers stay symbolic (fractional exponents allowed)."""
    constants = constants or {}
    if isinstance(node, Bin) and node.op in "*/^":
        a = compile_value(node.left, constants)
        if node.op == "^":
            e = compile_expr(node.right, constants)
            return lambda env: a(env) ** Fraction(e(env))
        b = compile_value(node.right, constants)
        if node.op == "*":
            return lambda env: a(env) * b(env)
        return lambda env: a(env) / b(env)
    if isinstance(node, Neg):
        f = compile_value(node.arg, constants)
        return lambda env: -f(env)
    if isinstance(node, Abs):
        f = compile_value(node.arg, constants)
        return lambda env: f(env).magnitude()
    f = compile_expr(node, constants)
    return lambda env: LogProduct.of(f(env))


class SetPredicate:
    """Membership test for a compiled set expression."""

    def __init__(self, node, sets: dict | None = None, constants: dict | None = None):
        self.node = node
        self._contains = _compile_set(node, sets or {}, constants or {})

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def contains(self, x) -> bool:
        x = Fraction(x)
        if x.denominator != 1:
            return False
        return self._contains(x.numerator)


def _compile_set(node, sets, constants) -> Callable:
    if isinstance(node, RangeSet):
        lo, hi = compile_expr(node.lo, constants), compile_expr(node.hi, constants)
        return lambda x: lo({}) <= x <= hi({})
    if isinstance(node, ListSet):
        items = frozenset(compile_expr(i, constants)({}) for i in node.items)
        return items.__contains__
    if isinstance(node, Family):
        lo, hi = compile_expr(node.lo, constants), compile_expr(node.hi, constants)
        var, start = node.var, node.start

        @lru_cache(maxsize=None)
        def member(x):
            s = start
            prev = None
            while True:
                a, b = lo({var: s}), hi({var: s})
                if prev is not None and not (a > prev[0] and b > prev[1]):
                    raise NonmonotoneFamilyError(f"family endpoints do not increase at {var}={s}")
                if a > x:
                    return False
                if a <= x <= b:
                    return True
                prev = (a, b)
                s += 1

        return member
    if isinstance(node, SetRef):
        if node.name not in sets:
            raise ValidationError("sets", f"unknown set {node.name!r}")
        target = sets[node.name]
        return lambda x: target.contains(x)
    if isinstance(node, Union):
        parts = [_compile_set(p, sets, constants) for p in node.parts]
        return lambda x: any(p(x) for p in parts)
    raise ValidationError("sets", f"not a set: {to_text(node)}")


FAMILY_CHECK_STEPS = 64


def _check_family(node: Family, text: str, col: int):
    """Reject families whose endpoints are not strictly increasing on the first steps."""
    lo, hi = compile_expr(node.lo), compile_expr(node.hi)
    prev = None
    for s in range(node.start, node.start + FAMILY_CHECK_STEPS):
        try:
            a, b = lo({node.var: s}), hi({node.var: s})
        except ValidationError as exc:
            raise ParseError(exc.message, 1, col) from None
        if Fraction(a).denominator != 1 or Fraction(b).denominator != 1:
            raise ParseError("family endpoints must be integers", 1, col)
        if prev is not None and not (a > prev[0] and b > prev[1]):
            raise NonmonotoneFamilyError(
                f"family endpoints must increase strictly in {node.var} "
                f"(fails between {node.var}={s - 1} and {node.var}={s})", 1, col)
        prev = (a, b)


def parse_set_expr(text: str, sets: dict | None = None, constants: dict | None = None) -> SetPredicate:
    return SetPredicate(parse_set(text), sets, constants)


def compile_predicate(node, sets: dict, constants: dict) -> Callable:
    if isinstance(node, And):
        parts = [compile_predicate(p, sets, constants) for p in node.parts]
        return lambda env: all(p(env) for p in parts)
    if isinstance(node, Member):
        f = compile_expr(node.arg, constants)
        pred = SetPredicate(node.set, sets, constants)
        if node.negated:
            return lambda env: not pred.contains(f(env))
        return lambda env: pred.contains(f(env))
    if isinstance(node, Cmp):
        fs = [compile_expr(a, constants) for a in node.args]
        ops = [_CMP[o] for o in node.ops]

        def check(env):
            values = [f(env) for f in fs]
            return all(op(a, b) for op, a, b in zip(ops, values, values[1:]))

        return check
    raise ValidationError("predicate", f"not a predicate: {to_text(node)}")


_CMP = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


# ---------------------------------------------------------------- weight rules


@dataclass(frozen=True)
class WeightRule:
    when: object | None  # predicate AST; None marks the default rule
    value: object

    def to_dict(self) -> dict:
        if self.when is None:
            return {"default": to_text(self.value)}
        return {"when": to_text(self.when), "value": to_text(self.value)}


class WeightRuleSet:
    """Ordered rules, first match wins; the last rule must be the default."""

    def __init__(self, rules, variables: tuple, sets: dict | None = None,
                 constants: dict | None = None):
        rules = tuple(rules)
        if not rules or rules[-1].when is not None:
            raise ValidationError("weights", "the last weight rule must be a default")
        if any(r.when is None for r in rules[:-1]):
            raise ValidationError("weights", "only the last weight rule may be a default")
        self.rules = rules
        self.variables = tuple(variables)
        sets, constants = sets or {}, constants or {}
        self._compiled = [
            (None if r.when is None else compile_predicate(r.when, sets, constants),
             compile_value(r.value, constants))
            for r in rules
        ]

    def __call__(self, *args) -> LogProduct:
        env = dict(zip(self.variables, args))
        for pred, value in self._compiled:
            if pred is None or pred(env):
                return value(env)
        raise AssertionError("unreachable: default rule missing")

    def to_list(self) -> list:
        return [r.to_dict() for r in self.rules]


__all__ = [
    "tokenize",
    "parse_expr",
    "parse_set",
    "parse_predicate",
    "parse_set_expr",
    "to_text",
    "compile_expr",
    "compile_value",
    "compile_predicate",
    "SetPredicate",
    "WeightRule",
    "WeightRuleSet",
]
