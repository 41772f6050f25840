"""A tiny expression grammar shared by polynomials and graded-commutative elements.

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := ('-' | '+') factor | atom ('^' INT)?
    atom   := NUMBER | NAME | '(' expr ')'

NUMBER is an integer or a rational ``p/q`` literal; NAME is
``[A-Za-z_][A-Za-z0-9_.']*``.  Evaluation is delegated to two callbacks, so
the same parser builds ``Poly`` and ``GCElement`` values.
"""
from __future__ import annotations

import re
from fractions import Fraction

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_.']*)|(\*\*|[-+*^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        super().__init__(f"{message} at position {pos} in {text!r}" if text else message)
        self.pos = pos
        self.text = text


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", num, start))
        elif name is not None:
            out.append(("name", name, start))
        else:
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def parse_expression(text: str, atom, number):
    """Parse ``text``; ``atom(name)`` and ``number(Fraction)`` build leaf values."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        tok = toks[i]
        i += 1
        return tok

    def expr():
        val = term()
        while peek()[0] == "op" and peek()[1] in "+-":
            op = take()[1]
            rhs = term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term():
        val = factor()
        while peek()[0] == "op" and peek()[1] == "*":
            take()
            val = val * factor()
        return val

    def factor():
        kind, v, pos = peek()
        if kind == "op" and v in "+-":
            take()
            inner = factor()
            return -inner if v == "-" else inner
        base = primary()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            kind, e, pos = take()
            if kind != "num" or "/" in e:
                raise ParseError("expected integer exponent", text, pos)
            return base ** int(e)
        return base

    def primary():
        kind, v, pos = take()
        if kind == "num":
            return number(Fraction(v))
        if kind == "name":
            try:
                return atom(v)
            except KeyError:
                raise ParseError(f"unknown variable {v!r}", text, pos) from None
        if kind == "op" and v == "(":
            val = expr()
            k2, v2, p2 = take()
            if (k2, v2) != ("op", ")"):
                raise ParseError("expected ')'", text, p2)
            return val
        raise ParseError(f"unexpected token {v!r}", text, pos)

    if peek()[0] == "end":
        raise ParseError("empty expression", text, 0)
    result = expr()
    kind, v, pos = peek()
    if kind != "end":
        raise ParseError(f"trailing token {v!r}", text, pos)
    return result
