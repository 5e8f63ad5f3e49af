"""Text expressions over the generator language.

Grammar (whitespace insensitive)::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ['^' int]
    atom   := gen | '(' expr ')' | number | 'q' | 'h'
    gen    := kind '[' rational ',' rational ')'
    kind   := 'X+' | 'X-' | 'H' | 'K' | 'K^-1' | 'Xi' | 'x+' | 'x-' | 'xi'
    number := int ['/' int]

Scalars are expressions with an empty word, so a Laurent coefficient like
``(q-1)`` or ``3*q^-2 - 1`` parses with the same machinery.  ``q`` only
exists in the polynomial presentations, ``h`` only in the formal ones;
``K`` expands to its presentation's polynomial form and is the only
generator that accepts negative powers.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .intervals import Interval
from .ncalg import UH, UHT, UQ, UQT, CLASSICAL, AlgebraSpec, DomainError, NCExpr
from .scalars import LaurentQ, SeriesH


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int) -> None:
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<kind>K\^-1|X\+|X-|Xi|xi|x\+|x-|H|K)(?=\[)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<name>[qh])
  | (?P<op>[()\[\],*+\-^])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, spec: AlgebraSpec) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        self.spec = spec

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        t, v, pos = self.toks[self.i]
        if (kind is not None and t != kind) or (value is not None and v != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, got {v or 'end of input'!r}", pos)
        self.i += 1
        return t, v, pos

    # -- grammar -----------------------------------------------------------
    def parse(self) -> NCExpr:
        e = self.expr()
        t, v, pos = self.peek()
        if t != "end":
            raise ParseError(f"trailing input {v!r}", pos)
        return e

    def expr(self) -> NCExpr:
        e = self.term()
        while True:
            t, v, _ = self.peek()
            if t == "op" and v in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if v == "+" else e - rhs
            else:
                return e

    def term(self) -> NCExpr:
        e = self.factor()
        while True:
            t, v, _ = self.peek()
            if t == "op" and v == "*":
                self.take()
                e = e * self.factor()
            else:
                return e

    def factor(self) -> NCExpr:
        t, v, pos = self.peek()
        if t == "name":  # q^n / h^n are ring monomials for any integer n
            self.take()
            n = 1
            t2, v2, _ = self.peek()
            if t2 == "op" and v2 == "^":
                self.take()
                n = self._signed_int()
            return self._scalar_power(v, n, pos)
        if t == "kind" and v in ("K", "K^-1"):
            self.take()
            ivl = self._interval()
            n = 1 if v == "K" else -1
            t2, v2, _ = self.peek()
            if t2 == "op" and v2 == "^":
                self.take()
                n *= self._signed_int()
            return self._k_power(ivl, n, pos)
        base = self.atom()
        t, v, _ = self.peek()
        if t == "op" and v == "^":
            self.take()
            n = self._signed_int()
            base = self._power(base, n)
        return base

    def _scalar_power(self, name: str, n: int, pos: int) -> NCExpr:
        ring = self.spec.ring
        if name == "q":
            if ring.kind == "rat":
                raise ParseError("no q in the classical coefficient ring", pos)
            return NCExpr.unit(ring, ring.qpow(n))
        if ring.kind != "h":
            raise ParseError("h only exists in the formal presentations", pos)
        return NCExpr.unit(ring, SeriesH.hpow(n))

    def _k_power(self, ivl: Interval, n: int, pos: int) -> NCExpr:
        p = self.spec.presentation
        if p in (UQ, UQT):
            if n >= 0:
                return self.spec.kplus_pow(ivl, n)
            return NCExpr.word((self.spec.gen("K-", ivl),) * (-n), self.spec.ring)
        if p == UH:
            return self.spec.kplus_pow(ivl, n)
        raise ParseError(f"K is not a generator of {p}", pos)

    def _signed_int(self) -> int:
        sign = 1
        t, v, pos = self.peek()
        if t == "op" and v == "-":
            self.take()
            sign = -1
        t, v, pos = self.take("number")
        if "/" in v:
            raise ParseError("exponent must be an integer", pos)
        return sign * int(v)

    def _power(self, base: NCExpr, n: int) -> NCExpr:
        if n >= 0:
            out = NCExpr.unit(self.spec.ring)
            for _ in range(n):
                out = out * base
            return out
        inv = self._try_invert(base)
        if inv is None:
            raise ParseError("negative powers are only defined for K and "
                             "the scalar variables", self.peek()[2])
        return self._power(inv, -n)

    def _try_invert(self, e: NCExpr):
        spec = self.spec
        # scalar monomials q^k / h^k invert freely
        if list(e.d.keys()) == [()]:
            c = e.d[()]
            if isinstance(c, LaurentQ) and len(c.c) == 1 and c.dp == 0:
                (exp, val), = c.c.items()
                if abs(val) == 1:
                    return NCExpr.unit(spec.ring, LaurentQ({-exp: val}))
            if isinstance(c, SeriesH) and len(c.c) == 1:
                (exp, val), = c.c.items()
                if abs(val) == 1:
                    return NCExpr.unit(spec.ring, SeriesH({-exp: val}))
        return None

    def atom(self) -> NCExpr:
        t, v, pos = self.peek()
        if t == "op" and v == "(":
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        if t == "number":
            self.take()
            return NCExpr.unit(self.spec.ring, self.spec.ring.from_rat(Fraction(v)))
        if t == "kind":
            self.take()
            iv = self._interval()
            return self._generator(v, iv, pos)
        raise ParseError(f"expected an expression, got {v or 'end of input'!r}", pos)

    def _rational(self) -> Fraction:
        sign = 1
        t, v, _ = self.peek()
        if t == "op" and v == "-":
            self.take()
            sign = -1
        _, v, _ = self.take("number")
        return sign * Fraction(v)

    def _interval(self) -> Interval:
        _, _, pos = self.take("op", "[")
        lo = self._rational()
        self.take("op", ",")
        hi = self._rational()
        self.take("op", ")")
        try:
            ivl = Interval(lo, hi)
            self.spec.grid.check_interval(ivl)
        except ValueError as exc:
            raise ParseError(str(exc), pos) from None
        return ivl

    def _generator(self, kind: str, ivl: Interval, pos: int) -> NCExpr:
        spec = self.spec
        try:
            return NCExpr.gen(spec.gen(kind, ivl), spec.ring)
        except DomainError as exc:
            raise ParseError(str(exc), pos) from None


def parse_expr(text: str, spec: AlgebraSpec) -> NCExpr:
    """Parse an expression over the presentation's generator language."""
    return _Parser(text, spec).parse()
