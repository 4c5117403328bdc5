"""Parser and renderer for mode expressions and coefficient formulas.

Grammar (whitespace separates tokens)::

    poly    := ['-'] summand (('+' | '-') summand)*
    summand := [coef ['*']] word
    coef    := factor ((('*' | '/') factor) | factor)*   juxtaposition multiplies
    factor  := INT | 'p' | 's' | '(' scalar ')' , optionally '^' INT
    word    := term* base
    term    := GEN '[' INT ']'        GEN in w H J E h HE0 HE1
    base    := 'vac' | 'vactw' | 'e[' RATIONAL ']'

Modes act right to left on the base state.  A bare coefficient formula (the
``scalar`` production) is an ordinary arithmetic expression in ``p`` and ``s``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exact import ONE, P, S, Scalar

GENERATORS = ("w", "H", "J", "E", "h", "HE0", "HE1")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\^|\*\*|[-+*/()\[\]]))"
)


class ParseError(ValueError):
    def __init__(self, message, src, pos):
        self.src = src
        self.pos = pos
        line = src.count("\n", 0, pos) + 1
        col = pos - (src.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col = line, col
        text = src.splitlines()[line - 1] if src else ""
        super().__init__(f"{message} at line {line}, column {col}\n  {text}\n  {' ' * (col - 1)}^")


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Tok]:
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", src, pos)
        kind = m.lastgroup
        text = m.group(kind)
        if text == "**":
            text = "^"
        toks.append(Tok(kind, text, m.start(kind)))
        pos = m.end()
    toks.append(Tok("end", "", n))
    return toks


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Word:
    """Modes ``terms[0] terms[1] ... terms[-1]`` applied to ``base``."""

    terms: tuple  # ((gen, index), ...)
    base: tuple  # ("vac",) | ("vactw",) | ("e", Fraction)

    def render(self) -> str:
        parts = [f"{g}[{i}]" for g, i in self.terms]
        parts.append(render_base(self.base))
        return " ".join(parts)


@dataclass(frozen=True)
class Expr:
    """A linear combination of words."""

    summands: tuple  # ((Scalar, Word), ...)

    def render(self) -> str:
        out = []
        for k, (c, w) in enumerate(self.summands):
            neg = _leading_negative(c)
            mag = -c if neg else c
            body = w.render() if mag == ONE else f"{_render_coef(mag)} * {w.render()}"
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out) if out else "0 * vac"


def render_base(base) -> str:
    if base[0] == "e":
        q = Fraction(base[1])
        return f"e[{q.numerator}]" if q.denominator == 1 else f"e[{q.numerator}/{q.denominator}]"
    return base[0]


def _leading_negative(c: Scalar) -> bool:
    if not c.num:
        return False
    return c.num[max(c.num)] < 0


def _render_coef(c: Scalar) -> str:
    if c.is_const():
        v = c.const_value()
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return f"({c.render('p' if c.is_even() else 's')})" if c.is_polynomial() else c.render("p" if c.is_even() else "s")


# ---------------------------------------------------------------------------
# recursive descent

class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", self.src, t.pos)
        return self.take()

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, self.src, tok.pos)

    # -- scalars ----------------------------------------------------------
    def scalar(self) -> Scalar:
        neg = False
        if self.tok.text in "+-" and self.tok.kind == "op":
            neg = self.take().text == "-"
        val = self.scalar_term()
        if neg:
            val = -val
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.take().text
            rhs = self.scalar_term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def scalar_term(self) -> Scalar:
        val = self.factor()
        while True:
            t = self.tok
            if t.kind == "op" and t.text in ("*", "/"):
                if self.starts_word(self.peek()):
                    break
                op = self.take().text
                rhs = self.factor()
                val = val * rhs if op == "*" else val / rhs
            elif t.text in ("p", "s", "(") or t.kind == "num":
                # juxtaposition, as in 2p or 3(p - 1)
                val = val * self.factor()
            else:
                return val
        return val

    def factor(self) -> Scalar:
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.take()
            return -self.factor()
        if t.kind == "num":
            self.take()
            val = Scalar.const(int(t.text))
        elif t.kind == "name" and t.text in ("p", "s"):
            self.take()
            val = P if t.text == "p" else S
        elif t.text == "(":
            self.take()
            val = self.scalar()
            self.expect(")")
        else:
            raise self.error(f"expected a number, 'p', 's' or '(' but found {t.text or 'end of input'!r}")
        if self.tok.text == "^":
            self.take()
            e = self.tok
            if e.kind != "num":
                raise self.error("expected an integer exponent")
            self.take()
            val = val ** int(e.text)
        return val

    # -- words ------------------------------------------------------------
    @staticmethod
    def starts_word(t) -> bool:
        return t.kind == "name" and (t.text in GENERATORS or t.text in ("vac", "vactw", "e"))

    def integer(self) -> int:
        sign = 1
        if self.tok.text in ("-", "+") and self.tok.kind == "op":
            sign = -1 if self.take().text == "-" else 1
        t = self.tok
        if t.kind != "num":
            raise self.error("malformed mode index; expected an integer")
        self.take()
        return sign * int(t.text)

    def rational(self) -> Fraction:
        sign = 1
        if self.tok.text in ("-", "+") and self.tok.kind == "op":
            sign = -1 if self.take().text == "-" else 1
        t = self.tok
        if t.kind != "num":
            raise self.error("malformed lattice label; expected a rational a or a/b")
        self.take()
        val = Fraction(int(t.text))
        if self.tok.text == "/":
            self.take()
            d = self.tok
            if d.kind != "num":
                raise self.error("malformed lattice label denominator")
            self.take()
            val /= int(d.text)
        return sign * val

    def word(self) -> Word:
        terms = []
        while True:
            t = self.tok
            if t.kind != "name":
                raise self.error(f"expected a generator or base state, found {t.text or 'end of input'!r}")
            if t.text == "vac" or t.text == "vactw":
                self.take()
                return Word(tuple(terms), (t.text,))
            if t.text == "e":
                self.take()
                self.expect("[")
                q = self.rational()
                self.expect("]")
                return Word(tuple(terms), ("e", q))
            if t.text not in GENERATORS:
                raise self.error(f"unknown generator {t.text!r}")
            self.take()
            if self.tok.text != "[":
                raise self.error(f"generator {t.text!r} needs a mode index in brackets")
            self.take()
            if self.tok.text == "]":
                raise self.error("malformed mode index; expected an integer")
            idx = self.integer()
            self.expect("]")
            terms.append((t.text, idx))

    def summand(self, sign) -> tuple:
        coef = ONE
        if not self.starts_word(self.tok):
            coef = self.scalar_term()
            if self.tok.text == "*":
                self.take()
        return (coef * sign, self.word())

    def poly(self) -> Expr:
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.take().text == "-" else 1
        out = [self.summand(sign)]
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            sign = -1 if self.take().text == "-" else 1
            out.append(self.summand(sign))
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return Expr(tuple(out))


def parse(src: str) -> Expr:
    """Parse a linear combination of mode words."""
    return _Parser(src).poly()


def parse_scalar(src: str) -> Scalar:
    ps = _Parser(src)
    val = ps.scalar()
    if ps.tok.kind != "end":
        raise ps.error(f"unexpected token {ps.tok.text!r}")
    return val
