"""Text <-> LaurentPoly.

Grammar (``^`` binds tighter than ``*``; unary minus allowed)::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := ('-' | '+')* base ('^' int)?
    base    := var | literal | '(' expr ')'
    literal := rational | rational '*'? 'i' | 'i'
    rational:= int ('/' int)?

``i`` is reserved for the imaginary unit. Implicit multiplication is
rejected except for the literal form ``3i``. Negative exponents are only
allowed on monomials.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ParseError
from .gaussian import GaussianRational
from .laurent import LaurentPoly

__all__ = ["parse_poly", "format_poly", "format_coefficient", "RationalExpr", "parse_rational",
           "infer_variables"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Tok:
    kind: str  # int, name, op, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(_Tok("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3), text)
            toks.append(_Tok("op", ch, m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = {v: k for k, v in enumerate(variables)}
        self.n = len(variables)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.pos, self.text)

    def expect(self, op: str):
        t = self.peek()
        if t.kind != "op" or t.text != op:
            self.error(f"expected {op!r}" + (" but input ended" if t.kind == "end" else f", got {t.text!r}"))
        return self.take()

    def parse(self) -> LaurentPoly:
        if self.peek().kind == "end":
            self.error("empty expression")
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            if t.kind in ("name", "int"):
                self.error("implicit multiplication is not allowed; use '*'")
            self.error(f"unexpected {t.text!r}")
        return p

    def expr(self) -> LaurentPoly:
        p = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> LaurentPoly:
        p = self.factor()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> LaurentPoly:
        sign = 1
        while self.peek().kind == "op" and self.peek().text in "+-":
            if self.take().text == "-":
                sign = -sign
        start = self.peek()
        b = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            k = self.exponent()
            if k < 0 and not b.is_monomial():
                self.error("negative exponent on a non-monomial", start)
            b = b ** k
        return -b if sign < 0 else b

    def exponent(self) -> int:
        neg = False
        paren = False
        if self.peek().kind == "op" and self.peek().text == "(":
            self.take()
            paren = True
        if self.peek().kind == "op" and self.peek().text in "+-":
            neg = self.take().text == "-"
        t = self.peek()
        if t.kind != "int":
            self.error("exponent must be an integer")
        self.take()
        if paren:
            self.expect(")")
        return -int(t.text) if neg else int(t.text)

    def base(self) -> LaurentPoly:
        t = self.peek()
        if t.kind == "op" and t.text == "(":
            self.take()
            if self.peek().kind == "op" and self.peek().text == ")":
                self.error("empty parentheses")
            p = self.expr()
            self.expect(")")
            return p
        if t.kind == "int":
            return LaurentPoly.constant(self.rational_literal(), self.n)
        if t.kind == "name":
            self.take()
            if t.text == "i":
                return LaurentPoly.constant(GaussianRational(0, 1), self.n)
            if t.text not in self.vars:
                # "zw" is a single identifier; say so explicitly
                self.error(f"unknown variable {t.text!r} (variables: {', '.join(self.vars)})", t)
            return LaurentPoly.variable(self.vars[t.text], self.n)
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")

    def rational_literal(self) -> GaussianRational:
        t = self.take()
        value = Fraction(int(t.text))
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "/":
            self.take()
            d = self.peek()
            if d.kind != "int":
                self.error("division is only allowed between integer literals")
            self.take()
            if int(d.text) == 0:
                self.error("zero denominator", d)
            value = value / int(d.text)
        # "3i" with no space: imaginary literal
        nxt = self.peek()
        if nxt.kind == "name" and nxt.text == "i" and nxt.pos == self.toks[self.i - 1].pos + len(self.toks[self.i - 1].text):
            self.take()
            return GaussianRational(0, value)
        if nxt.kind == "op" and nxt.text == "/":
            self.error("division is only allowed between integer literals")
        return GaussianRational(value)


def parse_poly(text: str, variables: Sequence[str] = ("z", "w")) -> LaurentPoly:
    """Parse ``text`` into an exact Laurent polynomial over ``variables``."""
    variables = list(variables)
    if not variables:
        raise ValueError("at least one variable is required")
    if len(set(variables)) != len(variables):
        raise ValueError(f"duplicate variable names in {variables}")
    for v in variables:
        if not _IDENT.fullmatch(v) or v == "i":
            raise ValueError(f"invalid variable name {v!r}")
    return _Parser(text, variables).parse()


def _natural_key(name: str):
    return [int(s) if s.isdigit() else s for s in re.split(r"(\d+)", name)]


def infer_variables(*texts: str, default: Sequence[str] | None = None) -> list[str]:
    """Variable names occurring in ``texts``.

    Names within ``{z, w}`` map to ``default`` (or ``[z, w]`` restricted to
    what occurs when no default is given); otherwise names are sorted
    naturally so ``z2`` precedes ``z10``.
    """
    names: set[str] = set()
    for text in texts:
        names.update(n for n in _IDENT.findall(text) if n != "i")
    if default is not None and names <= set(default):
        return list(default)
    if names <= {"z", "w"}:
        return [v for v in ("z", "w") if v in names] or ["z"]
    return sorted(names, key=_natural_key)


# formatting -----------------------------------------------------------------


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coefficient(c: GaussianRational) -> str:
    """Standalone text for a coefficient, e.g. ``3/2``, ``-i``, ``(1 + 2*i)``."""
    if c.im == 0:
        return _fmt_frac(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{_fmt_frac(c.im)}*i"
    sign = "+" if c.im > 0 else "-"
    im = abs(c.im)
    im_txt = "i" if im == 1 else f"{_fmt_frac(im)}*i"
    return f"({_fmt_frac(c.re)} {sign} {im_txt})"


def _leading_negative(c: GaussianRational) -> bool:
    return (c.re < 0) if c.re != 0 else (c.im < 0)


def _monomial_text(e: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for k, x in enumerate(e):
        if x == 0:
            continue
        parts.append(names[k] if x == 1 else f"{names[k]}^{x}")
    return "*".join(parts)


def format_poly(p: LaurentPoly, variables: Sequence[str] | None = None) -> str:
    """Deterministic text in descending graded-lex order; round-trips through :func:`parse_poly`."""
    if variables is None:
        variables = ["z", "w"] if p.n == 2 else (["z"] if p.n == 1 else [f"z{k + 1}" for k in range(p.n)])
    if p.is_zero():
        return "0"
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        neg = _leading_negative(c)
        mag = -c if neg else c
        mono = _monomial_text(e, variables)
        if not mono:
            body = format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_coefficient(mag)}*{mono}"
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


@dataclass(frozen=True)
class RationalExpr:
    numerator: LaurentPoly
    denominator: LaurentPoly

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("rational expression with zero denominator")
        if self.numerator.n != self.denominator.n:
            raise ValueError("numerator and denominator variable counts differ")

    @property
    def n(self) -> int:
        return self.numerator.n

    def eval(self, point):
        return self.numerator.eval(point) / self.denominator.eval(point)


def parse_rational(num_text: str, den_text: str, variables: Sequence[str]) -> RationalExpr:
    return RationalExpr(parse_poly(num_text, variables), parse_poly(den_text, variables))
