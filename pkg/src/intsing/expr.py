"""Polynomial/rational scalar fields over named phase-space coordinates.

Expressions are immutable ASTs built from rational constants, named symbols
and the operators + - * / ^ (non-negative integer exponent).  Partial
derivatives are exact AST transformations; second-order jets (value,
gradient, Hessian) are evaluated in a single post-order pass so that rank
tests downstream see no finite-difference noise.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" INTEGER)?
    atom   := NUMBER | IDENT | "(" expr ")"

IDENT is ``[A-Za-z][A-Za-z0-9]*``; NUMBER is an integer, decimal or
float literal ("2", "0.5", "1e-3").
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

Number = Union[int, Fraction, float]


class ParseError(ValueError):
    """Malformed source text; carries the offending position."""

    def __init__(self, message: str, source: str, pos: int):
        super().__init__(f"{message} at position {pos}: {source!r}")
        self.pos = pos


class EvalError(ArithmeticError):
    pass


class NotPolynomialError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST nodes.  Plain classes with slots; construction goes through the smart
# constructors below which fold constants and keep trees in a stable shape.
# ---------------------------------------------------------------------------


class Node:
    __slots__ = ()


class Const(Node):
    __slots__ = ("value", "fvalue")

    def __init__(self, value: Number):
        if isinstance(value, Fraction) and value.denominator == 1:
            value = int(value)
        self.value = value
        self.fvalue = float(value)

    def __eq__(self, other):
        return isinstance(other, Const) and self.value == other.value

    def __hash__(self):
        return hash(("Const", self.value))


class Sym(Node):
    __slots__ = ("index", "name")

    def __init__(self, index: int, name: str):
        self.index = index
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Sym) and self.index == other.index and self.name == other.name

    def __hash__(self):
        return hash(("Sym", self.index, self.name))


class _Binary(Node):
    __slots__ = ("a", "b")

    def __init__(self, a: Node, b: Node):
        self.a = a
        self.b = b

    def __eq__(self, other):
        return type(self) is type(other) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((type(self).__name__, self.a, self.b))


class Add(_Binary):
    __slots__ = ()


class Sub(_Binary):
    __slots__ = ()


class Mul(_Binary):
    __slots__ = ()


class Div(_Binary):
    __slots__ = ()


class Neg(Node):
    __slots__ = ("a",)

    def __init__(self, a: Node):
        self.a = a

    def __eq__(self, other):
        return isinstance(other, Neg) and self.a == other.a

    def __hash__(self):
        return hash(("Neg", self.a))


class Pow(Node):
    __slots__ = ("a", "k")

    def __init__(self, a: Node, k: int):
        self.a = a
        self.k = k

    def __eq__(self, other):
        return isinstance(other, Pow) and self.k == other.k and self.a == other.a

    def __hash__(self):
        return hash(("Pow", self.a, self.k))


_ZERO = Const(0)
_ONE = Const(1)


def _is_const(n: Node, v=None) -> bool:
    return isinstance(n, Const) and (v is None or n.value == v)


def _add(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if isinstance(b, Neg):
        return _sub(a, b.a)
    return Add(a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return _neg(b)
    if isinstance(b, Neg):
        return _add(a, b.a)
    return Sub(a, b)


def _neg(a: Node) -> Node:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return _ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if isinstance(a, Neg):
        return _neg(_mul(a.a, b))
    if isinstance(b, Neg):
        return _neg(_mul(a, b.a))
    return Mul(a, b)


def _div(a: Node, b: Node) -> Node:
    if _is_const(b, 0):
        raise ZeroDivisionError("division by constant zero")
    if _is_const(a) and _is_const(b):
        av, bv = a.value, b.value
        if isinstance(av, float) or isinstance(bv, float):
            return Const(av / bv)
        return Const(Fraction(av) / Fraction(bv))
    if _is_const(a, 0):
        return _ZERO
    if _is_const(b, 1):
        return a
    if isinstance(a, Neg):
        return _neg(_div(a.a, b))
    if isinstance(b, Neg):
        return _neg(_div(a, b.a))
    return Div(a, b)


def _pow(a: Node, k: int) -> Node:
    if k < 0:
        raise ValueError("exponent must be a non-negative integer")
    if k == 0:
        return _ONE
    if k == 1:
        return a
    if _is_const(a):
        return Const(a.value ** k)
    return Pow(a, k)


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_DIGITS = set("0123456789")
_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_CONT = _IDENT_START | _DIGITS


def _tokenize(src: str):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c in " \t\n\r":
            i += 1
            continue
        if c in "+-*/^()":
            tokens.append((c, c, i))
            i += 1
            continue
        if c in _DIGITS or (c == "." and i + 1 < n and src[i + 1] in _DIGITS):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                cj = src[j]
                if cj in _DIGITS:
                    j += 1
                elif cj == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif cj in "eE" and not seen_exp and j > i:
                    # exponent only if followed by digits (optional sign)
                    k = j + 1
                    if k < n and src[k] in "+-":
                        k += 1
                    if k < n and src[k] in _DIGITS:
                        seen_exp = True
                        j = k + 1
                        while j < n and src[j] in _DIGITS:
                            j += 1
                    else:
                        break
                else:
                    break
            tokens.append(("num", src[i:j], i))
            i = j
            continue
        if c in _IDENT_START:
            j = i + 1
            while j < n and src[j] in _IDENT_CONT:
                j += 1
            tokens.append(("ident", src[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", src, i)
    tokens.append(("end", "", n))
    return tokens


def _number_value(text: str) -> Number:
    # decimals are floats; exact rationals are written as fractions ("1/2")
    if "e" in text or "E" in text or "." in text:
        return float(text)
    return int(text)


class _Parser:
    def __init__(self, src: str, symbols: Mapping[str, int]):
        self.src = src
        self.symbols = symbols
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[1]!r}", self.src, tok[2])
        return tok

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", self.src, tok[2])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            node = _add(node, rhs) if op == "+" else _sub(node, rhs)
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.next()
            rhs = self.factor()
            try:
                node = _mul(node, rhs) if op == "*" else _div(node, rhs)
            except ZeroDivisionError:
                raise ParseError("division by zero constant", self.src, pos) from None
        return node

    def factor(self) -> Node:
        if self.peek()[0] == "-":
            self.next()
            return _neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "^":
            _, _, pos = self.next()
            tok = self.next()
            if tok[0] != "num" or not tok[1].isdigit():
                raise ParseError("exponent must be a non-negative integer literal", self.src, tok[2])
            base = _pow(base, int(tok[1]))
        return base

    def atom(self) -> Node:
        tok = self.next()
        kind, text, pos = tok
        if kind == "num":
            return Const(_number_value(text))
        if kind == "ident":
            if text not in self.symbols:
                raise ParseError(f"unknown symbol {text!r}", self.src, pos)
            return Sym(self.symbols[text], text)
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {text!r}", self.src, pos)


# ---------------------------------------------------------------------------
# Differentiation (exact, symbolic)
# ---------------------------------------------------------------------------


def _diff(node: Node, var: int) -> Node:
    if isinstance(node, Const):
        return _ZERO
    if isinstance(node, Sym):
        return _ONE if node.index == var else _ZERO
    if isinstance(node, Add):
        return _add(_diff(node.a, var), _diff(node.b, var))
    if isinstance(node, Sub):
        return _sub(_diff(node.a, var), _diff(node.b, var))
    if isinstance(node, Neg):
        return _neg(_diff(node.a, var))
    if isinstance(node, Mul):
        return _add(_mul(_diff(node.a, var), node.b), _mul(node.a, _diff(node.b, var)))
    if isinstance(node, Div):
        num = _sub(_mul(_diff(node.a, var), node.b), _mul(node.a, _diff(node.b, var)))
        return _div(num, _pow(node.b, 2))
    if isinstance(node, Pow):
        return _mul(_mul(Const(node.k), _pow(node.a, node.k - 1)), _diff(node.a, var))
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Evaluation: scalar value and second-order jet in one post-order pass.
# Gradients/Hessians use None as a structural zero to keep constants cheap.
# ---------------------------------------------------------------------------


def _value(node: Node, vals: Sequence[float]) -> float:
    if isinstance(node, Const):
        return node.fvalue
    if isinstance(node, Sym):
        return vals[node.index]
    if isinstance(node, Add):
        return _value(node.a, vals) + _value(node.b, vals)
    if isinstance(node, Sub):
        return _value(node.a, vals) - _value(node.b, vals)
    if isinstance(node, Neg):
        return -_value(node.a, vals)
    if isinstance(node, Mul):
        return _value(node.a, vals) * _value(node.b, vals)
    if isinstance(node, Div):
        den = _value(node.b, vals)
        if den == 0.0:
            raise EvalError("division by zero")
        return _value(node.a, vals) / den
    if isinstance(node, Pow):
        return _value(node.a, vals) ** node.k
    raise TypeError(f"unknown node {node!r}")


def _gadd(g1, g2):
    if g1 is None:
        return g2
    if g2 is None:
        return g1
    return g1 + g2


def _gsub(g1, g2):
    if g2 is None:
        return g1
    if g1 is None:
        return -g2
    return g1 - g2


def _gscale(c, g):
    if g is None or c == 0.0:
        return None
    return c * g


def _gneg(g):
    return None if g is None else -g


def _outer2(g1, g2):
    if g1 is None or g2 is None:
        return None
    m = np.outer(g1, g2)
    return m + m.T


def _jet(node: Node, vals: np.ndarray, n: int):
    """Return (value, gradient-or-None, hessian-or-None) over n directions."""
    if isinstance(node, Const):
        return node.fvalue, None, None
    if isinstance(node, Sym):
        if node.index >= n:  # parameter: constant direction
            return vals[node.index], None, None
        g = np.zeros(n)
        g[node.index] = 1.0
        return vals[node.index], g, None
    if isinstance(node, Add):
        va, ga, ha = _jet(node.a, vals, n)
        vb, gb, hb = _jet(node.b, vals, n)
        return va + vb, _gadd(ga, gb), _gadd(ha, hb)
    if isinstance(node, Sub):
        va, ga, ha = _jet(node.a, vals, n)
        vb, gb, hb = _jet(node.b, vals, n)
        return va - vb, _gsub(ga, gb), _gsub(ha, hb)
    if isinstance(node, Neg):
        va, ga, ha = _jet(node.a, vals, n)
        return -va, _gneg(ga), _gneg(ha)
    if isinstance(node, Mul):
        va, ga, ha = _jet(node.a, vals, n)
        vb, gb, hb = _jet(node.b, vals, n)
        g = _gadd(_gscale(vb, ga), _gscale(va, gb))
        h = _gadd(_gadd(_gscale(vb, ha), _gscale(va, hb)), _outer2(ga, gb))
        return va * vb, g, h
    if isinstance(node, Div):
        va, ga, ha = _jet(node.a, vals, n)
        vb, gb, hb = _jet(node.b, vals, n)
        if vb == 0.0:
            raise EvalError("division by zero")
        inv = 1.0 / vb
        v = va * inv
        g = _gsub(_gscale(inv, ga), _gscale(v * inv, gb))
        # f'' = a''/b - (a' b'^T + b' a'^T)/b^2 - a b''/b^2 + 2 a b' b'^T / b^3
        h = _gscale(inv, ha)
        h = _gsub(h, _gscale(inv * inv, _outer2(ga, gb) if ga is not None and gb is not None else None))
        h = _gsub(h, _gscale(va * inv * inv, hb))
        if gb is not None:
            h = _gadd(h, _gscale(2.0 * va * inv ** 3, np.outer(gb, gb)))
        return v, g, h
    if isinstance(node, Pow):
        va, ga, ha = _jet(node.a, vals, n)
        k = node.k
        v = va ** k
        dk = k * va ** (k - 1)
        g = _gscale(dk, ga)
        h = _gscale(dk, ha)
        if ga is not None and k >= 2:
            h = _gadd(h, _gscale(k * (k - 1) * va ** (k - 2), np.outer(ga, ga)))
        return v, g, h
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Polynomial normal form: dict {exponent tuple -> Fraction}.  Division is
# admitted only by (sub)expressions that normalize to a nonzero constant.
# ---------------------------------------------------------------------------


def _poly_const(c: Number, nsym: int):
    if isinstance(c, float):
        c = Fraction(c)  # exact binary expansion
    c = Fraction(c)
    if c == 0:
        return {}
    return {(0,) * nsym: c}


def _poly_mul(p1, p2, nsym):
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            c = out.get(m, 0) + c1 * c2
            if c == 0:
                out.pop(m, None)
            else:
                out[m] = c
    return out


def _poly_add(p1, p2):
    out = dict(p1)
    for m, c in p2.items():
        s = out.get(m, 0) + c
        if s == 0:
            out.pop(m, None)
        else:
            out[m] = s
    return out


def _poly(node: Node, nsym: int):
    if isinstance(node, Const):
        return _poly_const(node.value, nsym)
    if isinstance(node, Sym):
        m = [0] * nsym
        m[node.index] = 1
        return {tuple(m): Fraction(1)}
    if isinstance(node, Add):
        return _poly_add(_poly(node.a, nsym), _poly(node.b, nsym))
    if isinstance(node, Sub):
        return _poly_add(_poly(node.a, nsym), {m: -c for m, c in _poly(node.b, nsym).items()})
    if isinstance(node, Neg):
        return {m: -c for m, c in _poly(node.a, nsym).items()}
    if isinstance(node, Mul):
        return _poly_mul(_poly(node.a, nsym), _poly(node.b, nsym), nsym)
    if isinstance(node, Div):
        pb = _poly(node.b, nsym)
        if len(pb) == 1 and (0,) * nsym in pb:
            c = pb[(0,) * nsym]
            return {m: v / c for m, v in _poly(node.a, nsym).items()}
        raise NotPolynomialError("division by a non-constant expression")
    if isinstance(node, Pow):
        p = _poly_const(1, nsym)
        base = _poly(node.a, nsym)
        for _ in range(node.k):
            p = _poly_mul(p, base, nsym)
        return p
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Serialization (stable round-trip: parse(to_source(e)) == e)
# ---------------------------------------------------------------------------


def _const_source(c: Number) -> tuple[str, int]:
    if isinstance(c, float):
        text = repr(c)
        prec = 1 if text.startswith("-") else 4
        return text, prec
    if isinstance(c, Fraction):
        text = f"{c.numerator}/{c.denominator}"
        return text, 1 if c < 0 else 2
    return str(c), 1 if c < 0 else 4


def _source(node: Node) -> tuple[str, int]:
    """Return (text, precedence): Add/Sub/Neg=1, Mul/Div=2, Pow=3, atom=4."""
    if isinstance(node, Const):
        return _const_source(node.value)
    if isinstance(node, Sym):
        return node.name, 4
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        lt, lp = _source(node.a)
        rt, rp = _source(node.b)
        if lp < 1:
            lt = f"({lt})"
        if rp <= 1:
            rt = f"({rt})"
        return f"{lt}{op}{rt}", 1
    if isinstance(node, Neg):
        t, p = _source(node.a)
        if p <= 1:
            t = f"({t})"
        return f"-{t}", 1
    if isinstance(node, (Mul, Div)):
        op = "*" if isinstance(node, Mul) else "/"
        lt, lp = _source(node.a)
        rt, rp = _source(node.b)
        if lp < 2:
            lt = f"({lt})"
        if rp <= 2:
            rt = f"({rt})"
        return f"{lt}{op}{rt}", 2
    if isinstance(node, Pow):
        bt, bp = _source(node.a)
        if bp < 4:
            bt = f"({bt})"
        return f"{bt}^{node.k}", 3
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Public wrapper
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Value, gradient and symmetric Hessian of a field at a point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


class Expression:
    """Immutable scalar field over a fixed symbol table (coords + params)."""

    __slots__ = ("node", "coords", "params", "_dcache")

    def __init__(self, node: Node, coords: Sequence[str], params: Sequence[str] = ()):
        self.node = node
        self.coords = tuple(coords)
        self.params = tuple(params)
        self._dcache: dict[int, "Expression"] = {}

    # -- construction helpers ------------------------------------------------

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.coords + self.params

    def _wrap(self, node: Node) -> "Expression":
        return Expression(node, self.coords, self.params)

    def _coerce(self, other) -> Node:
        if isinstance(other, Expression):
            if other.symbols != self.symbols:
                raise ValueError("mixing expressions over different symbol tables")
            return other.node
        if isinstance(other, (int, float, Fraction)):
            return Const(other)
        return NotImplemented

    def __add__(self, other):
        n = self._coerce(other)
        return NotImplemented if n is NotImplemented else self._wrap(_add(self.node, n))

    __radd__ = __add__

    def __sub__(self, other):
        n = self._coerce(other)
        return NotImplemented if n is NotImplemented else self._wrap(_sub(self.node, n))

    def __rsub__(self, other):
        n = self._coerce(other)
        return NotImplemented if n is NotImplemented else self._wrap(_sub(n, self.node))

    def __mul__(self, other):
        n = self._coerce(other)
        return NotImplemented if n is NotImplemented else self._wrap(_mul(self.node, n))

    __rmul__ = __mul__

    def __truediv__(self, other):
        n = self._coerce(other)
        return NotImplemented if n is NotImplemented else self._wrap(_div(self.node, n))

    def __pow__(self, k: int):
        return self._wrap(_pow(self.node, k))

    def __neg__(self):
        return self._wrap(_neg(self.node))

    def __eq__(self, other):
        return (
            isinstance(other, Expression)
            and self.symbols == other.symbols
            and self.node == other.node
        )

    def __hash__(self):
        return hash((self.node, self.symbols))

    def __repr__(self):
        return f"Expression({self.to_source()!r})"

    # -- queries -------------------------------------------------------------

    def free_symbols(self) -> set[str]:
        out: set[str] = set()
        stack = [self.node]
        while stack:
            n = stack.pop()
            if isinstance(n, Sym):
                out.add(n.name)
            elif isinstance(n, (Add, Sub, Mul, Div)):
                stack.extend((n.a, n.b))
            elif isinstance(n, (Neg, Pow)):
                stack.append(n.a)
        return out

    def is_zero(self) -> bool:
        """Exact zero test via polynomial normal form."""
        return not _poly(self.node, len(self.symbols))

    def to_source(self) -> str:
        return _source(self.node)[0]

    def as_polynomial(self):
        """Monomial dict {exponent tuple: Fraction} over the symbol table."""
        return _poly(self.node, len(self.symbols))

    def normalized_equal(self, other: "Expression") -> bool:
        if self.symbols != other.symbols:
            return False
        return _poly(self.node, len(self.symbols)) == _poly(other.node, len(other.symbols))

    # -- calculus ------------------------------------------------------------

    def diff(self, var: str) -> "Expression":
        try:
            idx = self.symbols.index(var)
        except ValueError:
            raise ValueError(f"undeclared variable {var!r}") from None
        cached = self._dcache.get(idx)
        if cached is None:
            cached = self._wrap(_diff(self.node, idx))
            self._dcache[idx] = cached
        return cached

    def substitute(self, mapping: Mapping[str, "Expression"]) -> "Expression":
        """Replace symbols by expressions (all over the target symbol table)."""
        targets = {e.symbols for e in mapping.values()}
        if len(targets) != 1:
            raise ValueError("substitution images must share one symbol table")
        tmpl = next(iter(mapping.values()))

        def go(n: Node) -> Node:
            if isinstance(n, Const):
                return n
            if isinstance(n, Sym):
                if n.name in mapping:
                    return mapping[n.name].node
                try:
                    idx = tmpl.symbols.index(n.name)
                except ValueError:
                    raise ValueError(f"symbol {n.name!r} missing from substitution") from None
                return Sym(idx, n.name)
            if isinstance(n, Add):
                return _add(go(n.a), go(n.b))
            if isinstance(n, Sub):
                return _sub(go(n.a), go(n.b))
            if isinstance(n, Mul):
                return _mul(go(n.a), go(n.b))
            if isinstance(n, Div):
                return _div(go(n.a), go(n.b))
            if isinstance(n, Neg):
                return _neg(go(n.a))
            if isinstance(n, Pow):
                return _pow(go(n.a), n.k)
            raise TypeError(n)

        return Expression(go(self.node), tmpl.coords, tmpl.params)

    # -- evaluation ----------------------------------------------------------

    def _values(self, point, params: Mapping[str, float] | None) -> np.ndarray:
        vals = np.zeros(len(self.symbols))
        if isinstance(point, Mapping):
            for name, v in point.items():
                vals[self.symbols.index(name)] = v
        else:
            pt = np.asarray(point, dtype=float)
            if pt.shape != (len(self.coords),):
                raise ValueError(f"expected {len(self.coords)} coordinate values")
            vals[: len(self.coords)] = pt
        if params:
            for name, v in params.items():
                if name not in self.params:
                    continue  # models may carry parameters this field never uses
                vals[self.symbols.index(name)] = v
        return vals

    def evaluate(self, point, params: Mapping[str, float] | None = None) -> float:
        return _value(self.node, self._values(point, params))

    def jet2(self, point, params: Mapping[str, float] | None = None) -> Jet2:
        n = len(self.coords)
        v, g, h = _jet(self.node, self._values(point, params), n)
        grad = np.zeros(n) if g is None else g
        hess = np.zeros((n, n)) if h is None else h
        return Jet2(v, grad, 0.5 * (hess + hess.T))


# ---------------------------------------------------------------------------
# Module-level API
# ---------------------------------------------------------------------------


def parse(source: str, coords: Sequence[str], params: Sequence[str] = ()) -> Expression:
    """Parse source text over declared coordinate (and parameter) names."""
    names = tuple(coords) + tuple(params)
    if len(set(names)) != len(names):
        raise ValueError("duplicate symbol names")
    table = {name: i for i, name in enumerate(names)}
    node = _Parser(source, table).parse()
    return Expression(node, coords, params)


def constant(value: Number, coords: Sequence[str], params: Sequence[str] = ()) -> Expression:
    return Expression(Const(value), coords, params)


def symbol(name: str, coords: Sequence[str], params: Sequence[str] = ()) -> Expression:
    names = tuple(coords) + tuple(params)
    return Expression(Sym(names.index(name), name), coords, params)


def differentiate(e: Expression, var: str) -> Expression:
    """Exact symbolic partial derivative of e with respect to var."""
    return e.diff(var)


def evaluate_jet2(e: Expression, point, params: Mapping[str, float] | None = None) -> Jet2:
    """Value, gradient and Hessian of e at a point, one post-order pass."""
    return e.jet2(point, params)
