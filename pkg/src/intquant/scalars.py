"""Exact scalars: Laurent polynomials in q and truncated Laurent series in h.

Two coefficient rings drive the whole engine.

``LaurentQ`` is a Laurent polynomial in q over the rationals, optionally
divided by a power of (q-1).  The localization is needed because the
polynomial presentations canonicalize the Cartan pair H*K^-1 to
(1 - K^-1)/(q-1); plain presentations keep integer coefficients throughout.
Divisibility by (q-1)^n is exact ((q-1)-adic valuation of the reduced form).

``SeriesH`` is a Laurent series in h truncated at a tracked precision: the
coefficient of h^e is known exactly for all e < prec.  Arithmetic propagates
precision (multiplying by something of valuation v raises the reliable window
by v); division by h eats one order.  ``prec=None`` means exact at all orders
(finite Laurent polynomials in h).

Only rational coefficients appear anywhere; nothing here is floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

Rat = Union[int, Fraction]

INF = float("inf")


class PoleAtQ1(ArithmeticError):
    """Evaluation at q=1 hit a genuine (q-1) denominator."""


class PrecisionError(ArithmeticError):
    """A truncated series does not carry enough orders to decide the question."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# Laurent polynomials in q, localized at (q-1)
# ---------------------------------------------------------------------------

def _poly_divmod_qm1(coeffs: dict[int, Fraction]) -> Optional[dict[int, Fraction]]:
    """Exact quotient of a Laurent polynomial by (q-1), or None."""
    if not coeffs:
        return {}
    if sum(coeffs.values()) != 0:  # f(1) != 0
        return None
    lo = min(coeffs)
    hi = max(coeffs)
    # synthetic division of sum c_e q^e by (q - 1), exponents lo..hi
    out: dict[int, Fraction] = {}
    acc = Fraction(0)
    for e in range(hi, lo - 1, -1):
        acc += coeffs.get(e, Fraction(0))
        if e > lo:
            if acc:
                out[e - 1] = acc
        else:
            assert acc == 0
    return out


class LaurentQ:
    """sum_e c_e q^e, divided by (q-1)^dp; normalized so dp is minimal."""

    __slots__ = ("c", "dp")

    def __init__(self, coeffs: Optional[dict] = None, dp: int = 0) -> None:
        c = {int(e): _frac(v) for e, v in (coeffs or {}).items() if v}
        while dp > 0:
            quo = _poly_divmod_qm1(c)
            if quo is None:
                break
            c, dp = quo, dp - 1
        if not c:
            dp = 0
        self.c = c
        self.dp = dp

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls) -> "LaurentQ":
        return cls({})

    @classmethod
    def one(cls) -> "LaurentQ":
        return cls({0: 1})

    @classmethod
    def from_rat(cls, x: Rat) -> "LaurentQ":
        return cls({0: _frac(x)})

    @classmethod
    def q(cls) -> "LaurentQ":
        return cls({1: 1})

    @classmethod
    def qpow(cls, n: int) -> "LaurentQ":
        return cls({n: 1})

    @classmethod
    def qm1_inv_pow(cls, n: int) -> "LaurentQ":
        """(q-1)^(-n)."""
        return cls({0: 1}, dp=n)

    # -- ring structure ----------------------------------------------------
    def _coerce(self, other) -> "LaurentQ":
        if isinstance(other, LaurentQ):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentQ.from_rat(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        dp = max(self.dp, o.dp)
        a = _poly_mul_qm1pow(self.c, dp - self.dp)
        b = _poly_mul_qm1pow(o.c, dp - o.dp)
        out = dict(a)
        for e, v in b.items():
            w = out.get(e, Fraction(0)) + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        return LaurentQ(out, dp)

    __radd__ = __add__

    def __neg__(self):
        r = LaurentQ.__new__(LaurentQ)
        r.c = {e: -v for e, v in self.c.items()}
        r.dp = self.dp
        return r

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, v1 in self.c.items():
            for e2, v2 in o.c.items():
                e = e1 + e2
                w = out.get(e, Fraction(0)) + v1 * v2
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        return LaurentQ(out, self.dp + o.dp)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers only via explicit division")
        r = LaurentQ.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c and self.dp == o.dp

    def __hash__(self) -> int:
        return hash((frozenset(self.c.items()), self.dp))

    def is_zero(self) -> bool:
        return not self.c

    def is_laurent(self) -> bool:
        """True when the value lies in the plain Laurent ring (no (q-1) pole)."""
        return self.dp == 0

    # -- (q-1)-divisibility --------------------------------------------------
    def val_qm1(self):
        """(q-1)-adic valuation; +inf for zero."""
        if not self.c:
            return INF
        v = 0
        c = self.c
        while True:
            quo = _poly_divmod_qm1(c)
            if quo is None:
                return v - self.dp
            c = quo
            v += 1

    def divides_qm1(self, n: int) -> tuple[bool, Optional["LaurentQ"]]:
        """Is (q-1)^n a divisor?  Returns the exact quotient on success."""
        if n < 0:
            raise ValueError("n must be >= 0")
        q = self.div_qm1_pow(n)
        if q is not None and q.dp == 0:
            return True, q
        return False, None

    def div_qm1_pow(self, n: int) -> Optional["LaurentQ"]:
        """self / (q-1)^n in the localization (always defined; may gain dp)."""
        return LaurentQ(self.c, self.dp + n)

    def exact_div(self, other: "LaurentQ") -> Optional["LaurentQ"]:
        """Exact quotient in the localized ring, or None if not divisible."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        num, den = self.c, other.c
        if not num:
            return LaurentQ.zero()
        lo_n, lo_d = min(num), min(den)
        a = {e - lo_n: v for e, v in num.items()}
        b = {e - lo_d: v for e, v in den.items()}
        deg_a, deg_b = max(a), max(b)
        if deg_a < deg_b:
            return None
        quo: dict[int, Fraction] = {}
        rem = dict(a)
        lead = b[deg_b]
        for e in range(deg_a - deg_b, -1, -1):
            coef = rem.get(e + deg_b, Fraction(0)) / lead
            if coef:
                quo[e] = coef
                for eb, vb in b.items():
                    k = e + eb
                    w = rem.get(k, Fraction(0)) - coef * vb
                    if w:
                        rem[k] = w
                    else:
                        rem.pop(k, None)
        if rem:
            return None
        shifted = {e + lo_n - lo_d: v for e, v in quo.items()}
        return LaurentQ(shifted, self.dp - other.dp) if self.dp >= other.dp \
            else LaurentQ(shifted, 0).div_qm1_pow(other.dp - self.dp)

    # -- maps ----------------------------------------------------------------
    def eval_q1(self) -> Fraction:
        if self.dp > 0:
            raise PoleAtQ1(f"pole of order {self.dp} at q=1 in {self}")
        return sum(self.c.values(), Fraction(0))

    def to_series(self, order: int) -> "SeriesH":
        """Substitute q = exp(h/2), truncating at h^order."""
        out = SeriesH.zero(order)
        for e, v in self.c.items():
            out = out + SeriesH.exp_h(Fraction(e, 2), order) * v
        if self.dp:
            qm1 = SeriesH.exp_h(Fraction(1, 2), order) - 1
            for _ in range(self.dp):
                out = out / qm1
        return out

    def __str__(self) -> str:
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c, reverse=True):
            v = self.c[e]
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                qp = "q" if e == 1 else f"q^{e}"
                body = qp if mag == 1 else f"{mag}*{qp}"
            if not parts:
                parts.append(body if v > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if v > 0 else f"- {body}")
        s = " ".join(parts)
        return f"({s})/(q-1)^{self.dp}" if self.dp else s

    __repr__ = __str__


def _poly_mul_qm1pow(c: dict[int, Fraction], n: int) -> dict[int, Fraction]:
    out = dict(c)
    for _ in range(n):
        nxt: dict[int, Fraction] = {}
        for e, v in out.items():
            for de, dv in ((1, v), (0, -v)):
                k = e + de
                w = nxt.get(k, Fraction(0)) + dv
                if w:
                    nxt[k] = w
                else:
                    nxt.pop(k, None)
        out = nxt
    return out


def qint(n: int) -> LaurentQ:
    """(n)_q = (q^n - 1)/(q - 1), valid for any integer n."""
    if n == 0:
        return LaurentQ.zero()
    if n > 0:
        return LaurentQ({e: 1 for e in range(n)})
    return LaurentQ({e: -1 for e in range(n, 0)})


def eval_q1(x: LaurentQ) -> Fraction:
    return x.eval_q1()


# ---------------------------------------------------------------------------
# truncated Laurent series in h
# ---------------------------------------------------------------------------

class SeriesH:
    """sum_e c_e h^e with every exponent e < prec known exactly.

    prec=None marks an exact finite Laurent polynomial in h.
    """

    __slots__ = ("c", "prec")

    def __init__(self, coeffs: Optional[dict] = None, prec: Optional[int] = None) -> None:
        c = {int(e): _frac(v) for e, v in (coeffs or {}).items() if v}
        if prec is not None:
            c = {e: v for e, v in c.items() if e < prec}
        self.c = c
        self.prec = prec

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, prec: Optional[int] = None) -> "SeriesH":
        return cls({}, prec)

    @classmethod
    def one(cls) -> "SeriesH":
        return cls({0: 1})

    @classmethod
    def from_rat(cls, x: Rat) -> "SeriesH":
        return cls({0: _frac(x)})

    @classmethod
    def h(cls) -> "SeriesH":
        return cls({1: 1})

    @classmethod
    def hpow(cls, n: int) -> "SeriesH":
        return cls({n: 1})

    @classmethod
    def exp_h(cls, scale: Rat, order: int) -> "SeriesH":
        """exp(scale * h) truncated at h^order."""
        s = _frac(scale)
        coeffs: dict[int, Fraction] = {}
        term = Fraction(1)
        for k in range(order):
            if term:
                coeffs[k] = term
            term = term * s / (k + 1)
        return cls(coeffs, order)

    @classmethod
    def q_series(cls, order: int) -> "SeriesH":
        """q = exp(h/2)."""
        return cls.exp_h(Fraction(1, 2), order)

    @classmethod
    def qpow_series(cls, n: int, order: int) -> "SeriesH":
        return cls.exp_h(Fraction(n, 2), order)

    @classmethod
    def q_minus_qinv(cls, order: int) -> "SeriesH":
        return cls.qpow_series(1, order) - cls.qpow_series(-1, order)

    # -- precision bookkeeping ----------------------------------------------
    def _val_bound(self):
        """Lower bound for the valuation usable in precision arithmetic."""
        if self.c:
            return min(self.c)
        return self.prec if self.prec is not None else INF

    def hval(self):
        """Valuation; +inf for exact zero, PrecisionError for truncated zero."""
        if self.c:
            return min(self.c)
        if self.prec is None:
            return INF
        raise PrecisionError("valuation of a series that vanishes to working precision")

    # -- ring structure ----------------------------------------------------
    def _coerce(self, other) -> "SeriesH":
        if isinstance(other, SeriesH):
            return other
        if isinstance(other, (int, Fraction)):
            return SeriesH.from_rat(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.prec is None:
            prec = o.prec
        elif o.prec is None:
            prec = self.prec
        else:
            prec = min(self.prec, o.prec)
        out = dict(self.c)
        for e, v in o.c.items():
            w = out.get(e, Fraction(0)) + v
            if w:
                out[e] = w
            else:
                out.pop(e, None)
        return SeriesH(out, prec)

    __radd__ = __add__

    def __neg__(self):
        r = SeriesH.__new__(SeriesH)
        r.c = {e: -v for e, v in self.c.items()}
        r.prec = self.prec
        return r

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if (not self.c and self.prec is None) or (not o.c and o.prec is None):
            return SeriesH.zero()
        cands = []
        if self.prec is not None:
            vb = o._val_bound()
            cands.append(INF if vb is INF else self.prec + vb)
        if o.prec is not None:
            vb = self._val_bound()
            cands.append(INF if vb is INF else o.prec + vb)
        prec = None if not cands or min(cands) is INF else int(min(cands))
        out: dict[int, Fraction] = {}
        for e1, v1 in self.c.items():
            for e2, v2 in o.c.items():
                e = e1 + e2
                w = out.get(e, Fraction(0)) + v1 * v2
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        return SeriesH(out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers only via explicit division")
        r = SeriesH.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def inverse(self) -> "SeriesH":
        """Multiplicative inverse h^-v * u^-1; needs a nonzero leading term."""
        if not self.c:
            raise ZeroDivisionError("inverting a series with no visible terms")
        v = min(self.c)
        u = {e - v: w for e, w in self.c.items()}
        if self.prec is not None:
            uprec = self.prec - v
        elif len(u) == 1:
            uprec = None  # exact monomial: exact inverse
        else:
            # a multi-term exact polynomial has an infinite inverse series;
            # callers must truncate() first to say how many orders they want
            raise PrecisionError("inverse of a multi-term exact series "
                                 "needs a truncation order")
        lead = u[0]
        inv: dict[int, Fraction] = {0: 1 / lead}
        if uprec is not None:
            for k in range(1, max(uprec, 1)):
                acc = Fraction(0)
                for e, w in u.items():
                    if 0 < e <= k:
                        acc += w * inv.get(k - e, Fraction(0))
                if acc:
                    inv[k] = -acc / lead
        return SeriesH({e - v: w for e, w in inv.items()},
                       None if uprec is None else uprec - v)

    def __eq__(self, other) -> bool:
        """Agreement below the shared precision window."""
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.prec is None and o.prec is None:
            return self.c == o.c
        m = min(p for p in (self.prec, o.prec) if p is not None)
        return ({e: v for e, v in self.c.items() if e < m}
                == {e: v for e, v in o.c.items() if e < m})

    __hash__ = None  # precision-windowed equality is not hash-compatible

    def is_zero(self) -> bool:
        """Zero to working precision."""
        return not self.c

    def is_unit(self) -> bool:
        return self.c.get(0, Fraction(0)) != 0 and self._val_bound() >= 0

    def h_valuation_at_least(self, n: int) -> bool:
        """Certify valuation >= n; PrecisionError when undecidable."""
        if any(e < n and v for e, v in self.c.items()):
            return False
        if self.prec is not None and self.prec < n:
            raise PrecisionError(
                f"need h-precision {n}, series only known below h^{self.prec}")
        return True

    def truncate(self, order: int) -> "SeriesH":
        prec = order if self.prec is None else min(self.prec, order)
        return SeriesH(self.c, prec)

    def coeff(self, e: int) -> Fraction:
        if self.prec is not None and e >= self.prec:
            raise PrecisionError(f"coefficient of h^{e} beyond precision {self.prec}")
        return self.c.get(e, Fraction(0))

    def eval_h0(self) -> Fraction:
        """Constant term; requires valuation >= 0."""
        if any(e < 0 for e in self.c):
            raise PoleAtQ1(f"negative h-powers present in {self}")
        return self.coeff(0)

    def __str__(self) -> str:
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            mag = abs(v)
            if e == 0:
                body = str(mag)
            else:
                hp = "h" if e == 1 else f"h^{e}"
                body = hp if mag == 1 else f"{mag}*{hp}"
            if not parts:
                parts.append(body if v > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if v > 0 else f"- {body}")
        s = " ".join(parts) if parts else "0"
        if self.prec is not None:
            s = f"{s} + O(h^{self.prec})" if parts else f"O(h^{self.prec})"
        return s

    __repr__ = __str__


def expand_q(order: int) -> SeriesH:
    """The series of q = exp(h/2) itself."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return SeriesH.q_series(order)
