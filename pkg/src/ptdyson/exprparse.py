"""Parser and evaluator for scalar functions of t with exact first and second
derivatives (order-2 forward-mode jets).

Grammar (whitespace-insensitive):

    expr    :=  term (("+" | "-") term)*
    term    :=  unary (("*" | "/") unary)*
    unary   :=  "-" unary | power
    power   :=  atom ("^" unary)?          # right-associative
    atom    :=  number | "t" | "pi" | func "(" expr ")" | "(" expr ")"
    func    :=  sin | cos | exp | log | sqrt | tanh

All syntax and domain errors carry a byte offset into the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ExprError(ValueError):
    """Parse or evaluation error, tagged with a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class ParseError(ExprError):
    pass


class EvalError(ExprError):
    pass


FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh")


@dataclass(frozen=True)
class Node:
    offset: int


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Unary(Node):
    op: str  # "neg" or a function name
    arg: "Node"


@dataclass(frozen=True)
class Binary(Node):
    op: str  # + - * / ^
    left: "Node"
    right: "Node"


ExprAst = Node


@dataclass(frozen=True)
class Jet2:
    """Value with first and second derivative at a point."""

    f: float
    df: float
    d2f: float

    def __add__(self, o):
        return Jet2(self.f + o.f, self.df + o.df, self.d2f + o.d2f)

    def __sub__(self, o):
        return Jet2(self.f - o.f, self.df - o.df, self.d2f - o.d2f)

    def __neg__(self):
        return Jet2(-self.f, -self.df, -self.d2f)

    def __mul__(self, o):
        return Jet2(self.f * o.f,
                    self.df * o.f + self.f * o.df,
                    self.d2f * o.f + 2 * self.df * o.df + self.f * o.d2f)


def _jet_div(a: Jet2, b: Jet2, offset: int) -> Jet2:
    if b.f == 0:
        raise EvalError("division by zero", offset)
    q = a.f / b.f
    dq = (a.df - q * b.df) / b.f
    d2q = (a.d2f - 2 * dq * b.df - q * b.d2f) / b.f
    return Jet2(q, dq, d2q)


def _jet_chain(a: Jet2, u, du, d2u) -> Jet2:
    return Jet2(u, du * a.df, d2u * a.df**2 + du * a.d2f)


def _jet_pow(a: Jet2, b: Jet2, offset: int) -> Jet2:
    # b constant integer: ordinary power rule, any base
    if b.df == 0 and b.d2f == 0 and float(b.f).is_integer():
        n = int(b.f)
        if a.f == 0 and n < 0:
            raise EvalError("zero base with negative exponent", offset)
        u = a.f**n
        du = n * a.f ** (n - 1) if n != 0 else 0.0
        d2u = n * (n - 1) * a.f ** (n - 2) if n not in (0, 1) else 0.0
        return _jet_chain(a, u, du, d2u)
    # general case: a^b = exp(b log a), requires a > 0
    if a.f <= 0:
        raise EvalError("power with non-positive base and non-integer exponent", offset)
    la = _jet_chain(a, math.log(a.f), 1 / a.f, -1 / a.f**2)
    e = b * la
    return _jet_chain(e, math.exp(e.f), math.exp(e.f), math.exp(e.f))


def _apply_func(name: str, a: Jet2, offset: int) -> Jet2:
    if name == "sin":
        return _jet_chain(a, math.sin(a.f), math.cos(a.f), -math.sin(a.f))
    if name == "cos":
        return _jet_chain(a, math.cos(a.f), -math.sin(a.f), -math.cos(a.f))
    if name == "exp":
        v = math.exp(a.f)
        return _jet_chain(a, v, v, v)
    if name == "log":
        if a.f <= 0:
            raise EvalError("log of non-positive argument", offset)
        return _jet_chain(a, math.log(a.f), 1 / a.f, -1 / a.f**2)
    if name == "sqrt":
        if a.f < 0:
            raise EvalError("sqrt of negative argument", offset)
        if a.f == 0:
            raise EvalError("sqrt derivative singular at zero", offset)
        v = math.sqrt(a.f)
        return _jet_chain(a, v, 0.5 / v, -0.25 / v**3)
    if name == "tanh":
        v = math.tanh(a.f)
        return _jet_chain(a, v, 1 - v * v, -2 * v * (1 - v * v))
    raise EvalError(f"unknown function {name}", offset)


class _Tokenizer:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.src):
            return ("end", "", self.pos)
        ch = self.src[self.pos]
        start = self.pos
        if ch in "+-*/^()":
            return ("op", ch, start)
        if ch.isdigit() or ch == ".":
            i = self.pos
            seen_e = False
            while i < len(self.src):
                c = self.src[i]
                if c.isdigit() or c == ".":
                    i += 1
                elif c in "eE" and not seen_e and i + 1 < len(self.src) and (
                        self.src[i + 1].isdigit() or self.src[i + 1] in "+-"):
                    seen_e = True
                    i += 1
                    if self.src[i] in "+-":
                        i += 1
                else:
                    break
            return ("num", self.src[start:i], start)
        if ch.isalpha() or ch == "_":
            i = self.pos
            while i < len(self.src) and (self.src[i].isalnum() or self.src[i] == "_"):
                i += 1
            return ("name", self.src[start:i], start)
        raise ParseError(f"unexpected character {ch!r}", start)

    def next(self):
        kind, text, start = self.peek()
        self.pos = start + len(text)
        return kind, text, start


class _Parser:
    def __init__(self, src: str):
        self.toks = _Tokenizer(src)

    def parse(self) -> Node:
        node = self._expr()
        kind, text, off = self.toks.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", off)
        return node

    def _expr(self) -> Node:
        node = self._term()
        while True:
            kind, text, off = self.toks.peek()
            if kind == "op" and text in "+-":
                self.toks.next()
                rhs = self._term()
                node = Binary(off, text, node, rhs)
            else:
                return node

    def _term(self) -> Node:
        node = self._unary()
        while True:
            kind, text, off = self.toks.peek()
            if kind == "op" and text in "*/":
                self.toks.next()
                rhs = self._unary()
                node = Binary(off, text, node, rhs)
            else:
                return node

    def _unary(self) -> Node:
        kind, text, off = self.toks.peek()
        if kind == "op" and text == "-":
            self.toks.next()
            return Unary(off, "neg", self._unary())
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        kind, text, off = self.toks.peek()
        if kind == "op" and text == "^":
            self.toks.next()
            exponent = self._unary()  # right-associative, binds unary minus
            return Binary(off, "^", base, exponent)
        return base

    def _atom(self) -> Node:
        kind, text, off = self.toks.next()
        if kind == "num":
            try:
                return Const(off, float(text))
            except ValueError:
                raise ParseError(f"bad number {text!r}", off) from None
        if kind == "name":
            if text == "t":
                return Var(off)
            if text == "pi":
                return Const(off, math.pi)
            if text in FUNCTIONS:
                k2, t2, o2 = self.toks.next()
                if not (k2 == "op" and t2 == "("):
                    raise ParseError(f"expected '(' after {text}", o2)
                arg = self._expr()
                k3, t3, o3 = self.toks.next()
                if not (k3 == "op" and t3 == ")"):
                    raise ParseError("expected ')'", o3)
                return Unary(off, text, arg)
            raise ParseError(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            node = self._expr()
            k2, t2, o2 = self.toks.next()
            if not (k2 == "op" and t2 == ")"):
                raise ParseError("expected ')'", o2)
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", off)
        raise ParseError(f"unexpected token {text!r}", off)


def parse(source: str) -> ExprAst:
    """Parse an expression in the variable t."""
    return _Parser(source).parse()


def eval_jet2(ast: ExprAst, t: float) -> Jet2:
    """Evaluate (f, f', f'') at t by order-2 dual-number propagation."""
    if isinstance(ast, Const):
        return Jet2(ast.value, 0.0, 0.0)
    if isinstance(ast, Var):
        return Jet2(float(t), 1.0, 0.0)
    if isinstance(ast, Unary):
        a = eval_jet2(ast.arg, t)
        if ast.op == "neg":
            return -a
        return _apply_func(ast.op, a, ast.offset)
    if isinstance(ast, Binary):
        a = eval_jet2(ast.left, t)
        b = eval_jet2(ast.right, t)
        if ast.op == "+":
            return a + b
        if ast.op == "-":
            return a - b
        if ast.op == "*":
            return a * b
        if ast.op == "/":
            return _jet_div(a, b, ast.offset)
        if ast.op == "^":
            return _jet_pow(a, b, ast.offset)
    raise EvalError("malformed AST node", getattr(ast, "offset", 0))


def eval_value(ast: ExprAst, t: float) -> float:
    return eval_jet2(ast, t).f


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_source(ast: ExprAst) -> str:
    """Canonical printer; parse(to_source(parse(s))) == parse-tree of to_source."""

    def emit(node: Node, parent_prec: int) -> str:
        if isinstance(node, Const):
            if node.value == math.pi:
                return "pi"
            text = repr(node.value)
            return text
        if isinstance(node, Var):
            return "t"
        if isinstance(node, Unary):
            if node.op == "neg":
                inner = emit(node.arg, _PREC["neg"])
                out = f"-{inner}"
                return f"({out})" if parent_prec > _PREC["neg"] else out
            return f"{node.op}({emit(node.arg, 0)})"
        if isinstance(node, Binary):
            prec = _PREC[node.op]
            left = emit(node.left, prec if node.op != "^" else prec + 1)
            # left-assoc ops need tighter right side; ^ is right-assoc
            if node.op in "+-":
                right = emit(node.right, prec + 1)
            elif node.op in "*/":
                right = emit(node.right, prec + 1)
            else:
                right = emit(node.right, prec)
            out = f"{left}{node.op}{right}"
            return f"({out})" if parent_prec > prec else out
        raise ValueError("malformed AST")

    return emit(ast, 0)
