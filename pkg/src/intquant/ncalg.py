"""Noncommutative terms over interval-indexed generators and PBW rewriting.

Five presentations share one term language:

* ``Uq``       polynomial form, generators H, K^-1, X+, X- (K = 1 + (q-1)H is
               eliminated); coefficients Laurent in q, localized at (q-1).
* ``UqTilde``  rescaled integral form, generators Hbar = (q-1)H, K^-1,
               Xbar± = (q-1)X±; coefficients plain Laurent.
* ``UhTrunc``  formal presentation, generators Xi, X±; coefficients truncated
               Laurent series in h; K = exp(h Xi/2) is expanded on demand.
* ``UhTildeTrunc``  rescaled formal form (h Xi, (q-q^-1) X±), realized as an
               embedded view inside ``UhTrunc`` (its K is an infinite series
               in the rescaled generator, finite only modulo h^N).
* ``ClassicalU``  the enveloping algebra, generators xi, x±; rational
               coefficients; xi of a composite interval expands into cells.

Rewriting orients every defining relation toward the triangular shape
(X+ block) (Cartan block) (X- block); same-sign pairs reorder only when the
admissible-pair predicate imposes a relation, everything else always reorders.
``normal_form`` is a worklist reducer with per-word memoization and a hard
fuel budget (termination is conjectural in general, so running out of fuel is
a loud diagnostic, never silent).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .intervals import (
    ConfigError, CoeffTable, Grid, Interval, as_int, odiff,
    osum, serre_pairs, strict_intersection, strict_union,
)
from .scalars import LaurentQ, SeriesH, qint

UQ = "Uq"
UQT = "UqTilde"
UH = "UhTrunc"
UHT = "UhTildeTrunc"
CLASSICAL = "ClassicalU"
PRESENTATIONS = (UQ, UQT, UH, UHT, CLASSICAL)

KIND_TEXT = {"X+": "X+", "X-": "X-", "H": "H", "K-": "K^-1",
             "Xi": "Xi", "x+": "x+", "x-": "x-", "xi": "xi"}
RANK = {"X+": 0, "x+": 0, "H": 1, "K-": 1, "Xi": 1, "xi": 1, "X-": 2, "x-": 2}
_CARTAN_MINOR = {"H": 0, "K-": 1, "Xi": 0, "xi": 0}

ALLOWED_KINDS = {
    UQ: ("X+", "H", "K-", "X-"),
    UQT: ("X+", "H", "K-", "X-"),
    UH: ("X+", "Xi", "X-"),
    UHT: ("X+", "Xi", "X-"),
    CLASSICAL: ("x+", "xi", "x-"),
}

XPLUS = {UQ: "X+", UQT: "X+", UH: "X+", UHT: "X+", CLASSICAL: "x+"}
XMINUS = {UQ: "X-", UQT: "X-", UH: "X-", UHT: "X-", CLASSICAL: "x-"}
CARTAN_PRIMARY = {UQ: "H", UQT: "H", UH: "Xi", UHT: "Xi", CLASSICAL: "xi"}


class FuelExhausted(RuntimeError):
    """Rewriting did not reach a fixed point within the fuel budget."""

    def __init__(self, word) -> None:
        self.word = word
        super().__init__(f"rewrite fuel exhausted while reducing {word_text(word)}")


class DomainError(ValueError):
    """Expression uses generators outside the active presentation."""


@dataclass(frozen=True)
class Generator:
    kind: str
    iv: Interval

    def __str__(self) -> str:
        return f"{KIND_TEXT[self.kind]}{self.iv}"


Word = tuple  # tuple[Generator, ...]


def gen_sort_key(g: Generator):
    return (RANK[g.kind], g.iv.lo, g.iv.hi, _CARTAN_MINOR.get(g.kind, 0))


def word_sort_key(w: Word):
    return (len(w), tuple(gen_sort_key(g) for g in w))


def word_text(w: Word) -> str:
    return "*".join(str(g) for g in w) if w else "1"


# ---------------------------------------------------------------------------
# scalar ring adapters
# ---------------------------------------------------------------------------

class Ring:
    """Uniform constructors over the three coefficient rings.

    ``tilde`` marks the rescaled formal form, where the truncation ideal is
    graded by word length: the coefficient of a word with k rescaled letters
    is only meaningful below h^(order-k).
    """

    def __init__(self, kind: str, order: Optional[int] = None,
                 tilde: bool = False) -> None:
        self.kind = kind  # "q" | "h" | "rat"
        self.order = order
        self.tilde = tilde

    def zero(self):
        return {"q": LaurentQ.zero, "h": SeriesH.zero, "rat": Fraction}[self.kind]()

    def one(self):
        if self.kind == "q":
            return LaurentQ.one()
        if self.kind == "h":
            return SeriesH.one()
        return Fraction(1)

    def from_rat(self, x):
        if self.kind == "q":
            return LaurentQ.from_rat(x)
        if self.kind == "h":
            return SeriesH.from_rat(x)
        return Fraction(x)

    def qpow(self, n: int):
        if self.kind == "q":
            return LaurentQ.qpow(n)
        if self.kind == "h":
            return SeriesH.qpow_series(n, self.order)
        raise ConfigError("no q in the classical coefficient ring")

    def is_zero(self, s) -> bool:
        return s == 0 if isinstance(s, Fraction) else s.is_zero()

    def zero_like(self):
        return self.zero()

    def droppable(self, s, key=None) -> bool:
        """May this coefficient be omitted without losing information?

        In the h-rings a coefficient with no visible support but a finite
        precision window below the word's cap is an uncertainty marker
        ("zero below h^p, unknown beyond"); dropping it would silently
        upgrade the claim to an exact zero.
        """
        if self.kind != "h":
            return s == 0
        if s.c:
            return False
        if s.prec is None:
            return True
        cap = self.order
        if self.tilde and key is not None:
            cap -= _nletters(key)
        return s.prec >= cap

    def clip(self, s, key=None):
        """Expression coefficients live in the mod-h^order quotient."""
        if self.kind != "h":
            return s
        cap = self.order
        if self.tilde and key is not None:
            cap -= _nletters(key)
        if s.prec is None or s.prec > cap:
            return s.truncate(cap)
        return s

    def __eq__(self, other):
        return (isinstance(other, Ring)
                and (self.kind, self.order, self.tilde)
                    == (other.kind, other.order, other.tilde))

    def __repr__(self):
        return f"Ring({self.kind!r}, order={self.order}, tilde={self.tilde})"


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

def _nletters(key) -> int:
    """Letters in a word, or across a tensor tuple of words."""
    if not key:
        return 0
    if isinstance(key[0], Generator):
        return len(key)
    return sum(len(w) for w in key)


def _accum(d: dict, k, v, ring: Ring) -> None:
    w = d.get(k)
    w = ring.clip(v, k) if w is None else w + ring.clip(v, k)
    if ring.droppable(w, k):
        d.pop(k, None)
    else:
        d[k] = w


class NCExpr:
    """Finitely supported scalar combination of words (free product form)."""

    __slots__ = ("d", "ring")

    def __init__(self, d: dict, ring: Ring) -> None:
        self.d = {w: cc for w, c in d.items()
                  if not ring.droppable(cc := ring.clip(c, w), w)}
        self.ring = ring

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring) -> "NCExpr":
        return cls({}, ring)

    @classmethod
    def unit(cls, ring: Ring, coeff=None) -> "NCExpr":
        return cls({(): ring.one() if coeff is None else coeff}, ring)

    @classmethod
    def gen(cls, g: Generator, ring: Ring, coeff=None) -> "NCExpr":
        return cls({(g,): ring.one() if coeff is None else coeff}, ring)

    @classmethod
    def word(cls, w: Word, ring: Ring, coeff=None) -> "NCExpr":
        return cls({tuple(w): ring.one() if coeff is None else coeff}, ring)

    # -- structure ----------------------------------------------------------
    def items(self):
        return self.d.items()

    def is_zero(self) -> bool:
        """Zero to working precision (uncertainty markers allowed)."""
        return all(self.ring.is_zero(c) for c in self.d.values())

    def __eq__(self, other) -> bool:
        """Agreement to the shared precision; absent words are exact zero."""
        if not isinstance(other, NCExpr):
            return NotImplemented
        zero = self.ring.zero()
        for w in self.d.keys() | other.d.keys():
            if self.d.get(w, zero) != other.d.get(w, zero):
                return False
        return True

    def __add__(self, other: "NCExpr") -> "NCExpr":
        out = dict(self.d)
        for w, c in other.d.items():
            _accum(out, w, c, self.ring)
        return NCExpr(out, self.ring)

    def __neg__(self) -> "NCExpr":
        return NCExpr({w: -c for w, c in self.d.items()}, self.ring)

    def __sub__(self, other: "NCExpr") -> "NCExpr":
        return self + (-other)

    def __mul__(self, other) -> "NCExpr":
        if isinstance(other, NCExpr):
            out: dict = {}
            for w1, c1 in self.d.items():
                for w2, c2 in other.d.items():
                    _accum(out, w1 + w2, c1 * c2, self.ring)
            return NCExpr(out, self.ring)
        return self.scale(other)

    def __rmul__(self, other) -> "NCExpr":
        return self.scale(other)  # scalars commute with everything

    def scale(self, s) -> "NCExpr":
        if isinstance(s, (int, Fraction)):
            s = self.ring.from_rat(s)
        return NCExpr({w: c * s for w, c in self.d.items()}, self.ring)

    def map_coeffs(self, fn) -> "NCExpr":
        return NCExpr({w: fn(c) for w, c in self.d.items()}, self.ring)

    def text(self) -> str:
        if not self.d:
            return "0"
        parts = []
        for w in sorted(self.d, key=word_sort_key):
            cs = str(self.d[w])
            if " " in cs or "/" in cs:
                cs = f"({cs})"
            if w == ():
                parts.append(cs)
            elif cs == "1":
                parts.append(word_text(w))
            else:
                parts.append(cs + "*" + word_text(w))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NCExpr<{self.text()}>"


class TensorExpr:
    """Scalar combination of n-fold tensor words."""

    __slots__ = ("d", "ring", "arity")

    def __init__(self, d: dict, ring: Ring, arity: int) -> None:
        self.d = {t: cc for t, c in d.items()
                  if not ring.droppable(cc := ring.clip(c, t), t)}
        self.ring = ring
        self.arity = arity

    @classmethod
    def zero(cls, ring: Ring, arity: int) -> "TensorExpr":
        return cls({}, ring, arity)

    @classmethod
    def unit(cls, ring: Ring, arity: int) -> "TensorExpr":
        return cls({((),) * arity: ring.one()}, ring, arity)

    @classmethod
    def of(cls, factors: Iterable[NCExpr]) -> "TensorExpr":
        factors = list(factors)
        ring = factors[0].ring
        out = {(): ring.one()}
        for f in factors:
            nxt: dict = {}
            for t, c in out.items():
                for w, cw in f.d.items():
                    _accum(nxt, t + (w,), c * cw, ring)
            out = nxt
        return cls(out, ring, len(factors))

    def items(self):
        return self.d.items()

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.d.values())

    def __eq__(self, other) -> bool:
        if not (isinstance(other, TensorExpr) and self.arity == other.arity):
            return NotImplemented
        zero = self.ring.zero()
        for t in self.d.keys() | other.d.keys():
            if self.d.get(t, zero) != other.d.get(t, zero):
                return False
        return True

    def __add__(self, other: "TensorExpr") -> "TensorExpr":
        assert self.arity == other.arity
        out = dict(self.d)
        for t, c in other.d.items():
            _accum(out, t, c, self.ring)
        return TensorExpr(out, self.ring, self.arity)

    def __neg__(self) -> "TensorExpr":
        return TensorExpr({t: -c for t, c in self.d.items()}, self.ring, self.arity)

    def __sub__(self, other: "TensorExpr") -> "TensorExpr":
        return self + (-other)

    def __mul__(self, other) -> "TensorExpr":
        if isinstance(other, TensorExpr):
            assert self.arity == other.arity
            out: dict = {}
            for t1, c1 in self.d.items():
                for t2, c2 in other.d.items():
                    t = tuple(w1 + w2 for w1, w2 in zip(t1, t2))
                    _accum(out, t, c1 * c2, self.ring)
            return TensorExpr(out, self.ring, self.arity)
        return self.scale(other)

    def __rmul__(self, other) -> "TensorExpr":
        return self.scale(other)

    def scale(self, s) -> "TensorExpr":
        if isinstance(s, (int, Fraction)):
            s = self.ring.from_rat(s)
        return TensorExpr({t: c * s for t, c in self.d.items()}, self.ring, self.arity)

    def map_coeffs(self, fn) -> "TensorExpr":
        return TensorExpr({t: fn(c) for t, c in self.d.items()}, self.ring, self.arity)

    def swap(self) -> "TensorExpr":
        """Reverse the tensor slots (the opposite coproduct for arity 2)."""
        return TensorExpr({tuple(reversed(t)): c for t, c in self.d.items()},
                          self.ring, self.arity)

    def text(self) -> str:
        if not self.d:
            return "0"
        parts = []
        for t in sorted(self.d, key=lambda t: tuple(word_sort_key(w) for w in t)):
            c = self.d[t]
            cs = str(c)
            body = " (x) ".join(word_text(w) for w in t)
            prefix = "" if cs == "1" else (f"({cs})*" if any(ch in cs for ch in "+- ") else f"{cs}*")
            parts.append(prefix + body)
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TensorExpr<{self.text()}>"


# ---------------------------------------------------------------------------
# algebra presentations
# ---------------------------------------------------------------------------

INTERVAL_ORDERS: dict[str, Callable[[Interval], tuple]] = {
    "lex": lambda iv: (iv.lo, iv.hi),
}


class AlgebraSpec:
    """A presentation plus all conventions; immutable after construction.

    Owns the coefficient tables, the admissible-pair set, the oriented rule
    set, and the normal-form caches.
    """

    def __init__(self, presentation: str, grid: Grid, *,
                 euler_variant: str = "default", serre_variant: str = "default",
                 interval_order: str = "lex", order: int = 8, fuel: int = 10_000,
                 debug_measure: bool = False) -> None:
        if presentation not in PRESENTATIONS:
            raise ConfigError(f"unknown presentation {presentation!r}")
        if interval_order not in INTERVAL_ORDERS:
            raise ConfigError(f"unknown interval order {interval_order!r}")
        if order < 1:
            raise ConfigError("series order must be >= 1")
        self.presentation = presentation
        self.grid = grid
        self.table = CoeffTable(grid, euler_variant)
        self.euler_variant = euler_variant
        self.serre_variant = serre_variant
        self.serre = serre_pairs(grid, serre_variant, euler_variant)
        self.interval_order = interval_order
        self.order = order
        self.fuel = fuel
        self.debug_measure = debug_measure
        self.measure_violations: list = []
        if presentation in (UQ, UQT):
            self.ring = Ring("q")
        elif presentation == UH:
            self.ring = Ring("h", order)
        elif presentation == UHT:
            self.ring = Ring("h", order, tilde=True)
        else:
            self.ring = Ring("rat")
        self._nf_cache: dict = {}
        self._pair_cache: dict = {}
        self._letter_cache: dict = {}
        # the rescaled formal presentation computes through its ambient algebra
        self.ambient: Optional[AlgebraSpec] = None
        self._tilde_images: Optional[dict] = None
        if presentation == UHT:
            self.ambient = AlgebraSpec(
                UH, grid, euler_variant=euler_variant, serre_variant=serre_variant,
                interval_order=interval_order, order=order, fuel=fuel,
                debug_measure=debug_measure)

    # -- generators ----------------------------------------------------------
    def gen(self, kind: str, iv: Interval) -> Generator:
        if kind not in ALLOWED_KINDS[self.presentation]:
            raise DomainError(
                f"generator kind {kind!r} not in presentation {self.presentation}")
        self.grid.check_interval(iv)
        return Generator(kind, iv)

    def gens(self) -> list[Generator]:
        return [Generator(k, iv) for iv in self.grid.intervals()
                for k in ALLOWED_KINDS[self.presentation]]

    def xplus(self, iv: Interval) -> Generator:
        return self.gen(XPLUS[self.presentation], iv)

    def xminus(self, iv: Interval) -> Generator:
        return self.gen(XMINUS[self.presentation], iv)

    def cartan(self, iv: Interval) -> Generator:
        return self.gen(CARTAN_PRIMARY[self.presentation], iv)

    def kminus(self, iv: Interval) -> Generator:
        return self.gen("K-", iv)

    def expr(self, *terms) -> NCExpr:
        """Sum of (coeff, generators...) tuples; small convenience builder."""
        d: dict = {}
        for coeff, *gens in terms:
            _accum(d, tuple(gens), coeff, self.ring)
        return NCExpr(d, self.ring)

    def one(self) -> NCExpr:
        return NCExpr.unit(self.ring)

    def check_expr(self, e: NCExpr) -> NCExpr:
        allowed = ALLOWED_KINDS[self.presentation]
        for w in e.d:
            for g in w:
                if g.kind not in allowed:
                    raise DomainError(f"{g} not allowed in {self.presentation}")
        return e

    # -- presentation-specific scalar/word builders ---------------------------
    def _sc(self, x) -> object:
        return self.ring.from_rat(x)

    def q_minus_qinv(self):
        if self.ring.kind == "q":
            return LaurentQ({1: 1, -1: -1})
        return SeriesH.q_minus_qinv(self.order)

    def one_plus_qinv(self):
        if self.ring.kind == "q":
            return LaurentQ({0: 1, -1: 1})
        return SeriesH.qpow_series(-1, self.order) + 1

    def kplus_pow(self, iv: Interval, m: int) -> NCExpr:
        """K_iv^m as an expression of the presentation.

        Polynomial forms expand K^+1 = 1 + scale*H and keep K^-1 a letter;
        the formal form expands the exponential series modulo h^order.
        """
        p = self.presentation
        if p in (UQ, UQT):
            if m >= 0:
                scale = LaurentQ({1: 1, 0: -1}) if p == UQ else LaurentQ.one()
                h = self.gen("H", iv)
                base = NCExpr({(): LaurentQ.one(), (h,): scale}, self.ring)
                out = NCExpr.unit(self.ring)
                for _ in range(m):
                    out = out * base
                return out
            return NCExpr.word((self.gen("K-", iv),) * (-m), self.ring)
        if p == UH:
            xi = self.gen("Xi", iv)
            d: dict = {}
            scale = Fraction(m, 2)
            term = Fraction(1)
            for k in range(self.order):
                if term:
                    d[(xi,) * k] = SeriesH({k: term}, self.order)
                term = term * scale / (k + 1)
            return NCExpr(d, self.ring)
        raise DomainError(f"kplus_pow not defined for presentation {p}")

    # -- oriented rewrite rules ------------------------------------------------
    def letter_rule(self, g: Generator) -> Optional[NCExpr]:
        """Single-letter rewrite (Cartan cell expansion), or None."""
        try:
            return self._letter_cache[g]
        except KeyError:
            pass
        out = self._build_letter_rule(g)
        self._letter_cache[g] = out
        return out

    def _build_letter_rule(self, g: Generator) -> Optional[NCExpr]:
        # Cartan generators of composite intervals expand into cells: the
        # additivity relations must be oriented, or the Hopf axioms only hold
        # modulo them and normal forms stop being canonical.
        if self.presentation == UHT:
            return self._rescaled_ambient_rule(self.ambient.letter_rule(g), (g,))
        if RANK[g.kind] != 1 or self.grid.length_cells(g.iv) <= 1:
            return None
        if g.kind in ("xi", "Xi"):
            cells = self.grid.cells_of(g.iv)
            return NCExpr({(Generator(g.kind, c),): self.ring.one()
                           for c in cells}, self.ring)
        a = self.grid.cells_of(g.iv)[0]
        b = odiff(g.iv, a)
        assert b is not None
        if g.kind == "K-":
            return NCExpr.word((Generator("K-", a), Generator("K-", b)), self.ring)
        # 1 + s H_{ab} = (1 + s H_a)(1 + s H_b), s = (q-1) or 1
        s = LaurentQ({1: 1, 0: -1}) if self.presentation == UQ else LaurentQ.one()
        ha, hb = Generator("H", a), Generator("H", b)
        return NCExpr({(ha,): LaurentQ.one(), (hb,): LaurentQ.one(),
                       (ha, hb): s}, self.ring)

    def pair_rule(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        """Replacement expression for the two-letter word (g1, g2), or None."""
        key = (g1, g2)
        try:
            return self._pair_cache[key]
        except KeyError:
            pass
        out = self._build_pair_rule(g1, g2)
        self._pair_cache[key] = out
        return out

    def _build_pair_rule(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        p = self.presentation
        if p in (UQ, UQT):
            return self._pair_rule_poly(g1, g2)
        if p == UH:
            return self._pair_rule_formal(g1, g2)
        if p == CLASSICAL:
            return self._pair_rule_classical(g1, g2)
        return self._rescaled_ambient_rule(self.ambient.pair_rule(g1, g2), (g1, g2))

    def _rescaled_ambient_rule(self, rule: Optional[NCExpr],
                               redex: Word) -> Optional[NCExpr]:
        if rule is None:
            return None
        h = SeriesH.h()
        qq = SeriesH.q_minus_qinv(self.order)
        qq_inv = qq.inverse()
        a, b = self._tilde_scale_counts(redex)
        scale_in = h ** a * qq ** b
        out: dict = {}
        for w, c in rule.d.items():
            a2, b2 = self._tilde_scale_counts(w)
            _accum(out, w, c * scale_in * SeriesH.hpow(-a2) * qq_inv ** b2, self.ring)
        return NCExpr(out, self.ring)

    # .. polynomial presentations ..........................................
    def _pair_rule_poly(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        r1, r2 = RANK[g1.kind], RANK[g2.kind]
        ring = self.ring
        if r1 == 1 and r2 == 1:
            if g1.iv == g2.iv and {g1.kind, g2.kind} == {"H", "K-"}:
                # H K^-1 = (1 - K^-1)/(q-1)   [Uq];   Hbar K^-1 = 1 - K^-1 [UqTilde]
                km = (self.gen("K-", g1.iv),)
                if self.presentation == UQ:
                    c = LaurentQ.qm1_inv_pow(1)
                else:
                    c = LaurentQ.one()
                return NCExpr({(): c, km: -c}, ring)
            if gen_sort_key(g1) > gen_sort_key(g2):
                return NCExpr.word((g2, g1), ring)
            return None
        if r1 > r2:
            if r2 == 0 and r1 == 1:  # Cartan before X+
                a, b = g1.iv, g2.iv
                n = self.table.sym(a, b)
                if g1.kind == "K-":
                    return NCExpr.word((g2, g1), ring, ring.qpow(-n))
                hx = self._hx_corr(n)
                return (NCExpr.word((g2, g1), ring, ring.qpow(n))
                        + NCExpr.gen(g2, ring, hx))
            if r1 == 2 and r2 == 1:  # X- before Cartan
                a, b = g2.iv, g1.iv
                n = self.table.sym(a, b)
                if g2.kind == "K-":
                    return NCExpr.word((g2, g1), ring, ring.qpow(-n))
                hx = self._hx_corr(-n)
                return (NCExpr.word((g2, g1), ring, ring.qpow(n))
                        - NCExpr.gen(g1, ring, ring.qpow(n) * hx))
            if r1 == 2 and r2 == 0:  # X- before X+
                return (NCExpr.word((g2, g1), ring)
                        - self._mixed_rhs(g2.iv, g1.iv))
        if r1 == r2 and r1 in (0, 2):
            return self._same_sign_rule(g1, g2)
        return None

    def _hx_corr(self, n: int):
        # coefficient of the X-term in  H X± - q^{±(a|b)} X± H = coeff * X±
        c = qint(n)
        if self.presentation == UQT:
            c = c * LaurentQ({1: 1, 0: -1})
        return c if self.ring.kind == "q" else c.to_series(self.order)

    # .. formal presentation ...............................................
    def _pair_rule_formal(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        r1, r2 = RANK[g1.kind], RANK[g2.kind]
        ring = self.ring
        if r1 == 1 and r2 == 1:
            if gen_sort_key(g1) > gen_sort_key(g2):
                return NCExpr.word((g2, g1), ring)
            return None
        if r1 == 1 and r2 == 0:  # Xi X+ -> X+ Xi + (a|b) X+
            n = self.table.sym(g1.iv, g2.iv)
            return (NCExpr.word((g2, g1), ring)
                    + NCExpr.gen(g2, ring, ring.from_rat(n)))
        if r1 == 2 and r2 == 1:  # X- Xi -> Xi X- + (a|b) X-
            n = self.table.sym(g2.iv, g1.iv)
            return (NCExpr.word((g2, g1), ring)
                    + NCExpr.gen(g1, ring, ring.from_rat(n)))
        if r1 == 2 and r2 == 0:
            return (NCExpr.word((g2, g1), ring)
                    - self._mixed_rhs(g2.iv, g1.iv))
        if r1 == r2 and r1 in (0, 2):
            return self._same_sign_rule(g1, g2)
        return None

    # .. shared quantum right-hand sides ....................................
    def _mixed_rhs(self, a: Interval, b: Interval) -> NCExpr:
        """RHS of X+_a X-_b - X-_b X+_a = ... in the active presentation."""
        p = self.presentation
        ring = self.ring
        t = self.table
        out = NCExpr.zero(ring)
        if a == b:
            if p == UQ:
                h = self.gen("H", a)
                km = self.gen("K-", a)
                c = self.one_plus_qinv()
                out = out + NCExpr({(h,): c, (h, km): c}, ring)
            elif p == UQT:
                h = self.gen("H", a)
                km = self.gen("K-", a)
                c = self.q_minus_qinv()
                out = out + NCExpr({(): c, (h,): c, (km,): -c}, ring)
            else:
                num = self.kplus_pow(a, 1) - self.kplus_pow(a, -1)
                den = SeriesH.q_minus_qinv(self.order)
                out = out + num.map_coeffs(lambda s: s / den)
        pa = t.p(a, b)
        if pa:
            pref = {UQ: self.one_plus_qinv(), UQT: self.q_minus_qinv(),
                    UH: ring.one()}[p]
            d1 = odiff(a, b)
            if d1 is not None:
                cp = as_int(t.cplus(a, b), "c+")
                out = out + ((NCExpr.gen(self.xplus(d1), ring)
                              * self.kplus_pow(b, pa))
                             .scale(pref * ring.qpow(cp) * pa))
            d2 = odiff(b, a)
            if d2 is not None:
                cm = as_int(t.cminus(a, b), "c-")
                out = out - ((self.kplus_pow(a, pa)
                              * NCExpr.gen(self.xminus(d2), ring))
                             .scale(pref * ring.qpow(cm) * pa))
        u = strict_union(a, b)
        i = strict_intersection(a, b)
        if u is not None and i is not None:
            du = odiff(u, b)
            da = odiff(u, a)
            if du is not None and da is not None:
                bba = t.bb(b, a)
                bab = t.bb(a, b)
                coeff = self.q_minus_qinv() * ring.qpow(bba) * bba
                out = out + ((NCExpr.gen(self.xplus(du), ring)
                              * self.kplus_pow(i, bab)
                              * NCExpr.gen(self.xminus(da), ring))
                             .scale(coeff))
        return out

    def _same_sign_rhs(self, a: Interval, b: Interval, sign: int) -> NCExpr:
        """RHS of X±_a X±_b - q^{r_ab} X±_b X±_a = ... ; sign = +1 or -1."""
        p = self.presentation
        ring = self.ring
        t = self.table
        xg = self.xplus if sign > 0 else self.xminus
        out = NCExpr.zero(ring)
        bab = t.bb(a, b)
        if bab is None:
            return out
        s = osum(a, b)
        if s is not None:
            se = t.splus(a, b) if sign > 0 else t.sminus(a, b)
            se = as_int(se, "s±")
            pref = {UQ: self.one_plus_qinv(), UQT: self.q_minus_qinv(),
                    UH: ring.one()}[p]
            out = out + NCExpr.gen(xg(s), ring,
                                   pref * ring.qpow(se) * (sign * bab))
        u = strict_union(a, b)
        i = strict_intersection(a, b)
        if u is not None and i is not None:
            out = out + NCExpr.word((xg(u), xg(i)), ring,
                                    self.q_minus_qinv() * bab)
        return out

    def _same_sign_rule(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        if gen_sort_key(g1) <= gen_sort_key(g2):
            return None
        u, v = g1.iv, g2.iv
        sign = +1 if RANK[g1.kind] == 0 else -1
        ring = self.ring
        if (v, u) in self.serre:
            r = self.table.r(v, u)
            qr = ring.qpow(-r)
            rhs = self._same_sign_rhs(v, u, sign)
            return (NCExpr.word((g2, g1), ring, qr) - rhs.scale(qr))
        if (u, v) in self.serre:
            r = self.table.r(u, v)
            return (NCExpr.word((g2, g1), ring, ring.qpow(r))
                    + self._same_sign_rhs(u, v, sign))
        return None  # relation not imposed: pair stays unordered

    # .. classical presentation ............................................
    def _pair_rule_classical(self, g1: Generator, g2: Generator) -> Optional[NCExpr]:
        r1, r2 = RANK[g1.kind], RANK[g2.kind]
        ring = self.ring
        if r1 == 1 and r2 == 1:
            if gen_sort_key(g1) > gen_sort_key(g2):
                return NCExpr.word((g2, g1), ring)
            return None
        if r1 == 1 and r2 == 0:  # xi x+ -> x+ xi + (a|b) x+
            n = self.table.sym(g1.iv, g2.iv)
            return NCExpr.word((g2, g1), ring) + NCExpr.gen(g2, ring, Fraction(n))
        if r1 == 2 and r2 == 1:
            n = self.table.sym(g2.iv, g1.iv)
            return NCExpr.word((g2, g1), ring) + NCExpr.gen(g1, ring, Fraction(n))
        if r1 == 2 and r2 == 0:  # x- x+ -> x+ x- - [x+,x-]-bracket value
            a, b = g2.iv, g1.iv
            out = NCExpr.word((g2, g1), ring)
            if a == b:
                out = out - NCExpr.gen(Generator("xi", a), ring)
            pa = self.table.p(a, b)
            if pa:
                d1 = odiff(a, b)
                if d1 is not None:
                    out = out - NCExpr.gen(Generator("x+", d1), ring, Fraction(pa))
                d2 = odiff(b, a)
                if d2 is not None:
                    out = out + NCExpr.gen(Generator("x-", d2), ring, Fraction(pa))
            return out
        if r1 == r2 and r1 in (0, 2):
            if gen_sort_key(g1) <= gen_sort_key(g2):
                return None
            u, v = g1.iv, g2.iv
            sign = +1 if r1 == 0 else -1
            kind = g1.kind
            if (v, u) in self.serre:
                out = NCExpr.word((g2, g1), ring)
                s = osum(v, u)
                if s is not None:
                    out = out - NCExpr.gen(Generator(kind, s), ring,
                                           Fraction(sign * self.table.p(v, s)))
                return out
            if (u, v) in self.serre:
                out = NCExpr.word((g2, g1), ring)
                s = osum(u, v)
                if s is not None:
                    out = out + NCExpr.gen(Generator(kind, s), ring,
                                           Fraction(sign * self.table.p(u, s)))
                return out
            return None
        return None

    # -- the reducer ---------------------------------------------------------
    def _find_redex(self, word: Word, strategy: str):
        n = len(word)
        positions = range(n) if strategy == "leftmost" else range(n - 1, -1, -1)
        for i in positions:
            lr = self.letter_rule(word[i])
            if lr is not None:
                return i, i + 1, lr
            if i + 1 < n:
                pr = self.pair_rule(word[i], word[i + 1])
                if pr is not None:
                    return i, i + 2, pr
        return None

    def _measure(self, word: Word):
        nx = sum(1 for g in word if RANK[g.kind] != 1)
        cells = sum(self.grid.length_cells(g.iv) for g in word if RANK[g.kind] != 1)
        keys = [gen_sort_key(g) for g in word]
        inv = sum(1 for i in range(len(keys)) for j in range(i + 1, len(keys))
                  if keys[i] > keys[j])
        return (nx, cells, inv)

    def nf_word(self, word: Word, strategy: str = "leftmost") -> dict:
        """Normal form of one word as a dict word -> scalar.

        Iterative DFS over the rewrite DAG with every intermediate word
        memoized, so shared subproblems are reduced once.  A word reachable
        from itself means the rule set cycles; that raises the fuel
        diagnostic rather than looping.
        """
        key = (word, strategy)
        cached = self._nf_cache.get(key)
        if cached is not None:
            return cached
        if self.presentation == UHT:
            out = self._nf_word_tilde(word, strategy)
            self._nf_cache[key] = out
            return out
        ring = self.ring
        fuel = self.fuel
        in_progress: set = set()

        def start(w: Word):
            """Either the cached-and-stored result dict, or a new frame."""
            nonlocal fuel
            m = self._find_redex(w, strategy)
            if m is None:
                res = {w: ring.one()}
                self._nf_cache[(w, strategy)] = res
                return res
            fuel -= 1
            if fuel < 0:
                raise FuelExhausted(w)
            i, j, rep = m
            if self.debug_measure:
                before = self._measure(w)
                for seg in rep.d:
                    if self._measure(w[:i] + seg + w[j:]) >= before:
                        self.measure_violations.append((w, w[:i] + seg + w[j:]))
            terms = [(w[:i] + seg + w[j:], c) for seg, c in rep.d.items()]
            return [w, terms, 0, {}]

        first = start(word)
        if isinstance(first, dict):
            return first
        stack = [first]
        in_progress.add(word)
        ret: Optional[dict] = None
        while stack:
            frame = stack[-1]
            w, terms, idx, acc = frame
            if ret is not None:
                c = terms[idx - 1][1]
                for w2, c2 in ret.items():
                    _accum(acc, w2, c * c2, ring)
                ret = None
            if idx == len(terms):
                self._nf_cache[(w, strategy)] = acc
                in_progress.discard(w)
                stack.pop()
                ret = acc
                continue
            frame[2] = idx + 1
            child = terms[idx][0]
            hit = self._nf_cache.get((child, strategy))
            if hit is not None:
                ret = hit
                continue
            if child in in_progress:
                raise FuelExhausted(child)
            res = start(child)
            if isinstance(res, dict):
                ret = res
            else:
                stack.append(res)
                in_progress.add(child)
        return self._nf_cache[key]

    def _tilde_scale_counts(self, word: Word) -> tuple[int, int]:
        nxi = sum(1 for g in word if g.kind == "Xi")
        return nxi, len(word) - nxi

    def _nf_word_tilde(self, word: Word, strategy: str) -> dict:
        """Rescaled-form normal form through the ambient algebra: views the
        word as h^{#Xi} (q-q^-1)^{#X} times itself, reduces there, and divides
        each resulting word by its own rescale factor (exactly, mod h^N)."""
        amb = self.ambient.nf_word(word, strategy)
        h = SeriesH.h()
        qq = SeriesH.q_minus_qinv(self.order)
        qq_inv = qq.inverse()
        a, b = self._tilde_scale_counts(word)
        scale_in = h ** a * qq ** b
        out: dict = {}
        for w2, c2 in amb.items():
            a2, b2 = self._tilde_scale_counts(w2)
            c = c2 * scale_in * SeriesH.hpow(-a2) * qq_inv ** b2
            _accum(out, w2, c, self.ring)
        return out

    def __repr__(self) -> str:
        return (f"AlgebraSpec({self.presentation}, grid={self.grid.to_json()}, "
                f"order={self.order})")


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def normal_form(e: NCExpr, spec: AlgebraSpec, strategy: str = "leftmost") -> NCExpr:
    """Reduce to the PBW fixed point of the oriented rule set."""
    spec.check_expr(e)
    out: dict = {}
    for w, c in e.items():
        for w2, c2 in spec.nf_word(w, strategy).items():
            _accum(out, w2, c * c2, spec.ring)
    return NCExpr(out, spec.ring)


def embed_tilde(e: NCExpr, spec: AlgebraSpec) -> NCExpr:
    """View a rescaled-formal expression inside the ambient formal algebra
    (Xi_bar = h Xi, X±_bar = (q - q^-1) X±; words keep their letters)."""
    assert spec.presentation == UHT and spec.ambient is not None
    h = SeriesH.h()
    qq = SeriesH.q_minus_qinv(spec.order)
    out: dict = {}
    for w, c in e.items():
        nxi = sum(1 for g in w if g.kind == "Xi")
        nx = len(w) - nxi
        _accum(out, w, c * h ** nxi * qq ** nx, spec.ambient.ring)
    return NCExpr(out, spec.ambient.ring)


def to_tilde_coords(e: NCExpr, spec: AlgebraSpec) -> NCExpr:
    """Rewrite an ambient PBW expression in rescaled-generator coordinates
    by exact division of each word's coefficient by h^{#Xi} (q-q^-1)^{#X}."""
    assert spec.presentation == UHT
    qq_inv = SeriesH.q_minus_qinv(spec.order).inverse()
    out: dict = {}
    for w, c in e.items():
        nxi = sum(1 for g in w if g.kind == "Xi")
        nx = len(w) - nxi
        _accum(out, w, c * SeriesH.hpow(-nxi) * qq_inv ** nx, spec.ring)
    return NCExpr(out, spec.ring)


def tilde_kbar_pow(spec: AlgebraSpec, iv: Interval, m: int) -> NCExpr:
    """Kbar_iv^m = exp(m Xi_bar/2) as a rescaled-generator series mod h^order."""
    assert spec.presentation == UHT
    xi = Generator("Xi", iv)
    d: dict = {}
    scale = Fraction(m, 2)
    term = Fraction(1)
    for k in range(spec.order):
        if term:
            d[(xi,) * k] = SeriesH({0: term}, spec.order - k)
        term = term * scale / (k + 1)
    return NCExpr(d, spec.ring)


def tilde_relation_identities(spec: AlgebraSpec) -> list[tuple[NCExpr, NCExpr]]:
    """Defining identities of the rescaled formal form, as (lhs, rhs) pairs.

    These are checked through the ambient algebra rather than oriented,
    since Kbar^{±1} is a series in the rescaled Cartan generator.
    """
    assert spec.presentation == UHT
    ring = spec.ring
    t = spec.table
    qq = SeriesH.q_minus_qinv(spec.order)
    out: list[tuple[NCExpr, NCExpr]] = []
    ivs = spec.grid.intervals()
    for a in ivs:
        for b in ivs:
            xa, xb = Generator("Xi", a), Generator("Xi", b)
            out.append((NCExpr.word((xa, xb), ring) - NCExpr.word((xb, xa), ring),
                        NCExpr.zero(ring)))
            s = osum(a, b)
            if s is not None:
                out.append((NCExpr.gen(Generator("Xi", s), ring),
                            NCExpr.gen(xa, ring) + NCExpr.gen(xb, ring)))
            for sign, xk in ((+1, "X+"), (-1, "X-")):
                g = Generator(xk, b)
                lhs = (NCExpr.word((xa, g), ring) - NCExpr.word((g, xa), ring))
                rhs = NCExpr.gen(g, ring,
                                 SeriesH.h() * Fraction(sign * t.sym(a, b)))
                out.append((lhs, rhs))
            # mixed relation
            xp, xm = Generator("X+", a), Generator("X-", b)
            lhs = NCExpr.word((xp, xm), ring) - NCExpr.word((xm, xp), ring)
            rhs = NCExpr.zero(ring)
            if a == b:
                rhs = rhs + (tilde_kbar_pow(spec, a, 1)
                             - tilde_kbar_pow(spec, a, -1)).scale(qq)
            pa = t.p(a, b)
            if pa:
                d1 = odiff(a, b)
                if d1 is not None:
                    cp = as_int(t.cplus(a, b), "c+")
                    rhs = rhs + (NCExpr.gen(Generator("X+", d1), ring)
                                 * tilde_kbar_pow(spec, b, pa)).scale(
                        qq * SeriesH.qpow_series(cp, spec.order) * pa)
                d2 = odiff(b, a)
                if d2 is not None:
                    cm = as_int(t.cminus(a, b), "c-")
                    rhs = rhs - (tilde_kbar_pow(spec, a, pa)
                                 * NCExpr.gen(Generator("X-", d2), ring)).scale(
                        qq * SeriesH.qpow_series(cm, spec.order) * pa)
            u = strict_union(a, b)
            i = strict_intersection(a, b)
            if u is not None and i is not None:
                du, da = odiff(u, b), odiff(u, a)
                if du is not None and da is not None:
                    bba, bab = t.bb(b, a), t.bb(a, b)
                    rhs = rhs + (NCExpr.gen(Generator("X+", du), ring)
                                 * tilde_kbar_pow(spec, i, bab)
                                 * NCExpr.gen(Generator("X-", da), ring)).scale(
                        qq * SeriesH.qpow_series(bba, spec.order) * bba)
            out.append((lhs, rhs))
            # same-sign relations for admissible pairs
            if (a, b) in spec.serre:
                for sign, xk in ((+1, "X+"), (-1, "X-")):
                    ga, gb = Generator(xk, a), Generator(xk, b)
                    r = t.r(a, b)
                    lhs = (NCExpr.word((ga, gb), ring)
                           - NCExpr.word((gb, ga), ring,
                                         SeriesH.qpow_series(r, spec.order)))
                    rhs = NCExpr.zero(ring)
                    bab = t.bb(a, b)
                    if bab is not None:
                        if s := osum(a, b):
                            se = as_int(t.splus(a, b) if sign > 0 else t.sminus(a, b), "s±")
                            rhs = rhs + NCExpr.gen(
                                Generator(xk, s), ring,
                                qq * SeriesH.qpow_series(se, spec.order) * (sign * bab))
                        if u is not None and i is not None:
                            rhs = rhs + NCExpr.word(
                                (Generator(xk, u), Generator(xk, i)), ring, qq * bab)
                    out.append((lhs, rhs))
    return out


def mult(e1: NCExpr, e2: NCExpr, spec: AlgebraSpec) -> NCExpr:
    return normal_form(e1 * e2, spec)


def tensor_normal_form(t: TensorExpr, spec: AlgebraSpec,
                       strategy: str = "leftmost") -> TensorExpr:
    out: dict = {}
    for tup, c in t.items():
        factors = [spec.nf_word(w, strategy) for w in tup]
        for combo in itertools.product(*(f.items() for f in factors)):
            words = tuple(w for w, _ in combo)
            coeff = c
            for _, c2 in combo:
                coeff = coeff * c2
            _accum(out, words, coeff, spec.ring)
    return TensorExpr(out, spec.ring, t.arity)


def nf_dicts_equal(d1: dict, d2: dict, ring: Ring) -> bool:
    """Windowed comparison of normal-form dicts; absent means exact zero."""
    zero = ring.zero()
    for k in d1.keys() | d2.keys():
        if d1.get(k, zero) != d2.get(k, zero):
            return False
    return True


def coeff_extract(e: NCExpr, spec: AlgebraSpec) -> list[tuple[str, object]]:
    """Normal-form coefficient listing in the canonical word order."""
    nf = normal_form(e, spec)
    return [(word_text(w), nf.d[w]) for w in sorted(nf.d, key=word_sort_key)]


def unordered_pairs(word: Word, spec: AlgebraSpec) -> list[tuple[Generator, Generator]]:
    """Adjacent same-sign pairs left unordered (no relation imposed)."""
    out = []
    for g1, g2 in zip(word, word[1:]):
        if RANK[g1.kind] == RANK[g2.kind] and RANK[g1.kind] in (0, 2):
            if gen_sort_key(g1) > gen_sort_key(g2) and spec.pair_rule(g1, g2) is None:
                out.append((g1, g2))
    return out


def is_pbw_shape(word: Word, spec: AlgebraSpec) -> bool:
    """X+ block, then Cartan block (cell intervals only), then X- block;
    blocks internally ordered (same-sign blocks only up to pairs with no
    imposed relation)."""
    ranks = [RANK[g.kind] for g in word]
    if any(a > b for a, b in zip(ranks, ranks[1:])):
        return False
    if any(RANK[g.kind] == 1 and spec.grid.length_cells(g.iv) > 1 for g in word):
        return False
    for g1, g2 in zip(word, word[1:]):
        r = RANK[g1.kind]
        if r != RANK[g2.kind]:
            continue
        if gen_sort_key(g1) > gen_sort_key(g2):
            if r == 1 or spec.pair_rule(g1, g2) is not None:
                return False
        if r == 1 and g1.iv == g2.iv and {g1.kind, g2.kind} == {"H", "K-"}:
            return False  # constrained Cartan blocks: H and K^-1 never mix
    return True


def relations(spec: AlgebraSpec) -> list[tuple[Word, NCExpr]]:
    """The oriented rule set, enumerated over all generator pairs.

    Each entry is (redex word, replacement).  For the embedded rescaled
    formal presentation use :func:`tilde_relation_identities` instead
    (its relations are checked via the ambient algebra, not oriented).
    """
    if spec.presentation == UHT:
        raise ConfigError(f"{UHT} relations are identities; "
                          "see tilde_relation_identities")
    out = []
    for g1 in spec.gens():
        lr = spec.letter_rule(g1)
        if lr is not None:
            out.append(((g1,), lr))
        for g2 in spec.gens():
            pr = spec.pair_rule(g1, g2)
            if pr is not None:
                out.append(((g1, g2), pr))
    return out


# -- generator-wise algebra maps ---------------------------------------------

def apply_generator_map(e: NCExpr, images: dict, dst: AlgebraSpec,
                        coeff_map=None) -> NCExpr:
    """Extend a generator -> NCExpr assignment multiplicatively and reduce."""
    out = NCExpr.zero(dst.ring)
    for w, c in e.items():
        acc = NCExpr.unit(dst.ring)
        for g in w:
            acc = acc * images[g]
        cc = coeff_map(c) if coeff_map else c
        out = out + acc.scale(cc)
    return normal_form(out, dst)


def tilde_to_parent_images(src: AlgebraSpec, dst: AlgebraSpec) -> dict:
    """Generator images of the rescaled integral forms inside their parents."""
    images: dict = {}
    if src.presentation == UQT and dst.presentation == UQ:
        qm1 = LaurentQ({1: 1, 0: -1})
        for iv in src.grid.intervals():
            images[Generator("H", iv)] = NCExpr.gen(dst.gen("H", iv), dst.ring, qm1)
            images[Generator("K-", iv)] = NCExpr.gen(dst.gen("K-", iv), dst.ring)
            images[Generator("X+", iv)] = NCExpr.gen(dst.gen("X+", iv), dst.ring, qm1)
            images[Generator("X-", iv)] = NCExpr.gen(dst.gen("X-", iv), dst.ring, qm1)
        return images
    if src.presentation == UHT and dst.presentation == UH:
        h = SeriesH.h()
        qq = SeriesH.q_minus_qinv(dst.order)
        for iv in src.grid.intervals():
            images[Generator("Xi", iv)] = NCExpr.gen(dst.gen("Xi", iv), dst.ring, h)
            images[Generator("X+", iv)] = NCExpr.gen(dst.gen("X+", iv), dst.ring, qq)
            images[Generator("X-", iv)] = NCExpr.gen(dst.gen("X-", iv), dst.ring, qq)
        return images
    raise ConfigError(
        f"no integral-form embedding {src.presentation} -> {dst.presentation}")


def uq_to_uh_images(src: AlgebraSpec, dst: AlgebraSpec) -> dict:
    """Polynomial generators inside the formal algebra (q = exp(h/2))."""
    if not (src.presentation == UQ and dst.presentation == UH):
        raise ConfigError("expected Uq -> UhTrunc")
    images: dict = {}
    qm1 = SeriesH.q_series(dst.order) - 1
    opq = SeriesH.qpow_series(-1, dst.order) + 1
    for iv in src.grid.intervals():
        images[Generator("H", iv)] = (dst.kplus_pow(iv, 1)
                                      - NCExpr.unit(dst.ring)).map_coeffs(
            lambda s: s / qm1)
        images[Generator("K-", iv)] = dst.kplus_pow(iv, -1)
        images[Generator("X+", iv)] = NCExpr.gen(dst.gen("X+", iv), dst.ring, opq)
        images[Generator("X-", iv)] = NCExpr.gen(dst.gen("X-", iv), dst.ring, opq)
    return images
