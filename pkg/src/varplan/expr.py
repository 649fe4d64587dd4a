"""Tiny expression grammar for skill preconditions, effects and checks.

Grammar (registry file surface):

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := NUMBER | 'true' | 'false' | '-' factor | '(' expr ')'
             | IDENT                      -- parameter
             | IDENT '.' IDENT            -- property of a bound instance
             | 'delta' '(' IDENT '.' IDENT ')'
    cmp     := expr ('<' | '<=' | '>' | '>=' | '==' | '!=') expr
    effect  := IDENT '.' IDENT ('=' | '+=' | '-=') expr
    check   := cmp | 'becomes' '(' IDENT '.' IDENT ',' expr ')'
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import DocumentError, DomainMismatchError
from .kb import (
    BooleanValue,
    EnvironmentState,
    IntegerValue,
    NumberValue,
    get_value,
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Prop:
    param: str
    prop: str


@dataclass(frozen=True)
class Delta:
    prop: Prop


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # + - *
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Bool, Param, Prop, Delta, Neg, Bin]


@dataclass(frozen=True)
class Cmp:
    op: str  # < <= > >= == !=
    left: Expr
    right: Expr
    source: str = ""


@dataclass(frozen=True)
class Becomes:
    """Check that a property changed and now equals the given expression."""

    prop: Prop
    value: Expr
    source: str = ""


@dataclass(frozen=True)
class Assign:
    prop: Prop
    op: str  # = += -=
    value: Expr
    source: str = ""


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|\+=|-=|[-+*<>=().,]))"
)


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise DocumentError("$", f"cannot tokenize {text[pos:]!r}")
            break
        tokens.append(m.group("num") or m.group("ident") or m.group("op"))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        token = self.peek()
        if token is None:
            raise DocumentError("$", f"unexpected end of {self.text!r}")
        if expected is not None and token != expected:
            raise DocumentError("$", f"expected {expected!r}, got {token!r} in {self.text!r}")
        self.pos += 1
        return token

    def done(self):
        if self.peek() is not None:
            raise DocumentError("$", f"trailing input {self.peek()!r} in {self.text!r}")

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek() == "*":
            self.take()
            node = Bin("*", node, self.factor())
        return node

    def factor(self) -> Expr:
        token = self.peek()
        if token == "-":
            self.take()
            return Neg(self.factor())
        if token == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if token is None:
            raise DocumentError("$", f"unexpected end of {self.text!r}")
        if re.fullmatch(r"\d+(?:\.\d+)?(?:[eE][-+]?\d+)?", token):
            self.take()
            return Num(float(token))
        if token in ("true", "false"):
            self.take()
            return Bool(token == "true")
        if token == "delta":
            self.take()
            self.take("(")
            prop = self.prop()
            self.take(")")
            return Delta(prop)
        name = self.take()
        if self.peek() == ".":
            self.take()
            return Prop(name, self.take())
        return Param(name)

    def prop(self) -> Prop:
        name = self.take()
        self.take(".")
        return Prop(name, self.take())


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    p.done()
    return node


def parse_cmp(text: str) -> Cmp:
    p = _Parser(text)
    left = p.expr()
    op = p.take()
    if op not in ("<", "<=", ">", ">=", "==", "!="):
        raise DocumentError("$", f"expected a comparison operator, got {op!r}")
    right = p.expr()
    p.done()
    return Cmp(op, left, right, source=text)


def parse_check(text: str) -> Union[Cmp, Becomes]:
    p = _Parser(text)
    if p.peek() == "becomes":
        p.take()
        p.take("(")
        prop = p.prop()
        p.take(",")
        value = p.expr()
        p.take(")")
        p.done()
        return Becomes(prop, value, source=text)
    return parse_cmp(text)


def parse_effect(text: str) -> Assign:
    p = _Parser(text)
    prop = p.prop()
    op = p.take()
    if op not in ("=", "+=", "-="):
        raise DocumentError("$", f"expected an assignment operator, got {op!r}")
    value = p.expr()
    p.done()
    return Assign(prop, op, value, source=text)


def eval_expr(node: Expr, bindings: dict, env: EnvironmentState | None):
    """Evaluate against parameter bindings and (optionally) an environment."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Bool):
        return node.value
    if isinstance(node, Param):
        try:
            return bindings[node.name]
        except KeyError:
            raise DomainMismatchError(f"unbound parameter {node.name!r}") from None
    if isinstance(node, Prop):
        if env is None:
            raise DomainMismatchError(f"no environment to resolve {node.param}.{node.prop}")
        instance_id = bindings[node.param]
        value = get_value(env, instance_id, node.prop)
        if isinstance(value, (NumberValue, IntegerValue, BooleanValue)):
            return value.value
        return value
    if isinstance(node, Neg):
        return -eval_expr(node.operand, bindings, env)
    if isinstance(node, Bin):
        left = eval_expr(node.left, bindings, env)
        right = eval_expr(node.right, bindings, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    if isinstance(node, Delta):
        raise DomainMismatchError("delta() is only meaningful over snapshot pairs")
    raise TypeError(f"unsupported node {type(node).__name__}")


def eval_cmp(node: Cmp, bindings: dict, env: EnvironmentState | None) -> tuple[bool, object, object]:
    """Evaluate a comparison; returns (result, left operand, right operand)."""
    left = eval_expr(node.left, bindings, env)
    right = eval_expr(node.right, bindings, env)
    if node.op == "<":
        return left < right, left, right
    if node.op == "<=":
        return left <= right, left, right
    if node.op == ">":
        return left > right, left, right
    if node.op == ">=":
        return left >= right, left, right
    if node.op == "==":
        return left == right, left, right
    return left != right, left, right


#: Predicate names used when a comparison is surfaced as a failing reason.
CMP_PREDICATE = {
    "<": "Less",
    "<=": "LessEqual",
    ">": "Greater",
    ">=": "GreaterEqual",
    "==": "Equal",
    "!=": "NotEqual",
}


def unparse(node) -> str:
    """Render a node back to grammar text (stable registry round-trips)."""
    if isinstance(node, Num):
        return format(node.value, "g")
    if isinstance(node, Bool):
        return "true" if node.value else "false"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Prop):
        return f"{node.param}.{node.prop}"
    if isinstance(node, Delta):
        return f"delta({unparse(node.prop)})"
    if isinstance(node, Neg):
        return f"-{_grouped(node.operand, tight=True)}"
    if isinstance(node, Bin):
        left = _grouped(node.left, tight=node.op == "*")
        # the right side also needs parens under subtraction: a - (b - c)
        right = _grouped(node.right, tight=node.op in ("*", "-"))
        return f"{left} {node.op} {right}"
    if isinstance(node, Cmp):
        return node.source or f"{unparse(node.left)} {node.op} {unparse(node.right)}"
    if isinstance(node, Becomes):
        return node.source or f"becomes({unparse(node.prop)}, {unparse(node.value)})"
    if isinstance(node, Assign):
        return node.source or f"{unparse(node.prop)} {node.op} {unparse(node.value)}"
    raise TypeError(f"unsupported node {type(node).__name__}")


def _grouped(node, tight: bool) -> str:
    text = unparse(node)
    if tight and isinstance(node, Bin) and node.op in ("+", "-"):
        return f"({text})"
    return text
