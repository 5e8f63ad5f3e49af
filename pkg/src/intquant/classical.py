"""The classical Lie bialgebra on interval generators, and semiclassical maps.

``LieElem`` holds degree-one elements (Cartan generators canonicalized to
grid cells, so the additivity relation holds by representation).  The bracket
and cobracket tables implement the defining relations; Jacobi, co-Jacobi and
the cocycle identity are checked downstream, which is what validates the
pluggable interval-form conventions.

The semiclassical maps connect the quantum presentations back here:

* ``limit_q1`` evaluates polynomial-form elements at q=1 — into the
  enveloping presentation for the unrescaled form (K ↦ 1, H ↦ xi, X± ↦ 2x±),
  or into the commutative q=1 coordinate ring for the rescaled form;
* ``first_order_bracket`` / ``first_order_cobracket`` extract the degree-one
  terms of commutators and coproduct antisymmetrizations divided by (q-1)
  (or h on the formal side), reduced modulo squares of the augmentation
  ideal.  These must land on the bracket/cobracket tables above.

Exactness is enforced: a coefficient with a genuine pole at q=1, or a
commutator not divisible by (q-1), raises instead of truncating.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional

from .intervals import Grid, Interval, odiff, osum, decompositions
from .ncalg import (
    CLASSICAL, RANK, UH, UHT, UQ, UQT, AlgebraSpec, DomainError, Generator,
    NCExpr, Word, _accum, normal_form, word_text,
)
from .hopf import coproduct
from .scalars import LaurentQ, PoleAtQ1, SeriesH


class DivisibilityError(ArithmeticError):
    """A first-order quotient was requested of something not divisible."""


# ---------------------------------------------------------------------------
# Lie elements
# ---------------------------------------------------------------------------

_CLASSICAL_KINDS = ("x+", "xi", "x-")


class LieElem:
    """Rational combination of degree-one generators; xi's are cell-based."""

    __slots__ = ("d",)

    def __init__(self, d: Optional[dict] = None, grid: Optional[Grid] = None) -> None:
        out: dict = {}
        for g, c in (d or {}).items():
            c = Fraction(c)
            if not c:
                continue
            if g.kind == "xi" and grid is not None and grid.length_cells(g.iv) > 1:
                for cell in grid.cells_of(g.iv):
                    k = Generator("xi", cell)
                    out[k] = out.get(k, Fraction(0)) + c
            else:
                out[g] = out.get(g, Fraction(0)) + c
        self.d = {g: c for g, c in out.items() if c}

    @classmethod
    def gen(cls, kind: str, iv: Interval, grid: Grid, coeff=1) -> "LieElem":
        return cls({Generator(kind, iv): Fraction(coeff)}, grid)

    @classmethod
    def zero(cls) -> "LieElem":
        return cls({})

    def items(self):
        return self.d.items()

    def is_zero(self) -> bool:
        return not self.d

    def __add__(self, other: "LieElem") -> "LieElem":
        out = dict(self.d)
        for g, c in other.d.items():
            out[g] = out.get(g, Fraction(0)) + c
        return LieElem(out)

    def __sub__(self, other: "LieElem") -> "LieElem":
        return self + other.scale(-1)

    def scale(self, c) -> "LieElem":
        return LieElem({g: v * Fraction(c) for g, v in self.d.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, LieElem) and self.d == other.d

    def text(self) -> str:
        if not self.d:
            return "0"
        parts = []
        for g in sorted(self.d, key=lambda g: (RANK[g.kind], g.iv.lo, g.iv.hi)):
            c = self.d[g]
            parts.append(f"{c}*{g}" if c != 1 else str(g))
        return " + ".join(parts)

    __repr__ = text


def _gen_key(g: Generator):
    return (RANK[g.kind], g.iv.lo, g.iv.hi)


class CobracketValue:
    """Wedge combination over ordered generator pairs, a∧b = (ab - ba)/2."""

    __slots__ = ("d",)

    def __init__(self, d: Optional[dict] = None) -> None:
        out: dict = {}
        for (g1, g2), c in (d or {}).items():
            c = Fraction(c)
            if not c or g1 == g2:
                continue
            if _gen_key(g1) > _gen_key(g2):
                g1, g2, c = g2, g1, -c
            k = (g1, g2)
            out[k] = out.get(k, Fraction(0)) + c
        self.d = {k: c for k, c in out.items() if c}

    @classmethod
    def zero(cls) -> "CobracketValue":
        return cls({})

    def items(self):
        return self.d.items()

    def is_zero(self) -> bool:
        return not self.d

    def __add__(self, other: "CobracketValue") -> "CobracketValue":
        out = dict(self.d)
        for k, c in other.d.items():
            out[k] = out.get(k, Fraction(0)) + c
        return CobracketValue(out)

    def __sub__(self, other: "CobracketValue") -> "CobracketValue":
        return self + other.scale(-1)

    def scale(self, c) -> "CobracketValue":
        return CobracketValue({k: v * Fraction(c) for k, v in self.d.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, CobracketValue) and self.d == other.d

    def to_tensor(self) -> dict:
        """As an antisymmetric 2-tensor over generators."""
        out: dict = {}
        for (g1, g2), c in self.d.items():
            out[(g1, g2)] = out.get((g1, g2), Fraction(0)) + c / 2
            out[(g2, g1)] = out.get((g2, g1), Fraction(0)) - c / 2
        return {k: v for k, v in out.items() if v}

    @classmethod
    def from_tensor(cls, t: dict) -> "CobracketValue":
        """Inverse of to_tensor; requires antisymmetry."""
        for (g1, g2), c in t.items():
            if t.get((g2, g1), Fraction(0)) != -c:
                raise ValueError(f"tensor is not antisymmetric at ({g1},{g2})")
        return cls({(g1, g2): 2 * c for (g1, g2), c in t.items()
                    if _gen_key(g1) < _gen_key(g2)})

    def text(self) -> str:
        if not self.d:
            return "0"
        return " + ".join(f"{c}*({g1})^({g2})" if c != 1 else f"({g1})^({g2})"
                          for (g1, g2), c in sorted(
                              self.d.items(), key=lambda kv: (_gen_key(kv[0][0]),
                                                              _gen_key(kv[0][1]))))

    __repr__ = text


# ---------------------------------------------------------------------------
# bracket and cobracket
# ---------------------------------------------------------------------------

def _bracket_gens(g1: Generator, g2: Generator, spec: AlgebraSpec,
                  flags: Optional[list] = None) -> LieElem:
    t = spec.table
    grid = spec.grid
    a, b = g1.iv, g2.iv
    k1, k2 = g1.kind, g2.kind
    if k1 == "xi" and k2 == "xi":
        return LieElem.zero()
    if k1 == "xi":
        sign = 1 if k2 == "x+" else -1
        return LieElem.gen(k2, b, grid, sign * t.sym(a, b))
    if k2 == "xi":
        return _bracket_gens(g2, g1, spec, flags).scale(-1)
    if k1 == "x+" and k2 == "x-":
        out = LieElem.zero()
        if a == b:
            out = out + LieElem.gen("xi", a, grid)
        pa = t.p(a, b)
        if pa:
            d1 = odiff(a, b)
            if d1 is not None:
                out = out + LieElem.gen("x+", d1, grid, pa)
            d2 = odiff(b, a)
            if d2 is not None:
                out = out - LieElem.gen("x-", d2, grid, pa)
        return out
    if k1 == "x-" and k2 == "x+":
        return _bracket_gens(g2, g1, spec, flags).scale(-1)
    # same sign
    if (a, b) in spec.serre:
        s = osum(a, b)
        sign = 1 if k1 == "x+" else -1
        if s is None:
            return LieElem.zero()
        return LieElem.gen(k1, s, grid, sign * t.p(a, s))
    if (b, a) in spec.serre:
        return _bracket_gens(g2, g1, spec, flags).scale(-1)
    if flags is not None:
        flags.append((g1, g2))  # relation not imposed; bracket defaults to 0
    return LieElem.zero()


def bracket(x: LieElem, y: LieElem, spec: AlgebraSpec,
            flags: Optional[list] = None) -> LieElem:
    """Bilinear extension of the generator bracket table."""
    out = LieElem.zero()
    for g1, c1 in x.items():
        for g2, c2 in y.items():
            out = out + _bracket_gens(g1, g2, spec, flags).scale(c1 * c2)
    return out


def cobracket(x: LieElem, spec: AlgebraSpec) -> CobracketValue:
    """delta(xi) = 0; delta(x±) = xi ∧ x± + sum over ordered splittings."""
    out = CobracketValue.zero()
    grid = spec.grid
    for g, c in x.items():
        if g.kind == "xi":
            continue
        acc = CobracketValue.zero()
        for cell in grid.cells_of(g.iv):
            acc = acc + CobracketValue({(Generator("xi", cell), g): Fraction(1)})
        for b, d in decompositions(grid, g.iv):
            acc = acc + CobracketValue(
                {(Generator(g.kind, b), Generator(g.kind, d)):
                 Fraction(spec.table.p(b, g.iv))})
        out = out + acc.scale(c)
    return out


# structure checks -----------------------------------------------------------

def jacobi_defect(g1: Generator, g2: Generator, g3: Generator,
                  spec: AlgebraSpec) -> LieElem:
    grid = spec.grid
    e1, e2, e3 = (LieElem.gen(g.kind, g.iv, grid) for g in (g1, g2, g3))
    return (bracket(e1, bracket(e2, e3, spec), spec)
            + bracket(e2, bracket(e3, e1, spec), spec)
            + bracket(e3, bracket(e1, e2, spec), spec))


def _apply_delta_slot(t: dict, slot: int, spec: AlgebraSpec) -> dict:
    """Apply the cobracket (as a 2-tensor map) in one slot of a tensor dict."""
    out: dict = {}
    for key, c in t.items():
        g = key[slot]
        dt = cobracket(LieElem.gen(g.kind, g.iv, spec.grid), spec).to_tensor()
        for (a, b), c2 in dt.items():
            nk = key[:slot] + (a, b) + key[slot + 1:]
            out[nk] = out.get(nk, Fraction(0)) + c * c2
    return {k: v for k, v in out.items() if v}


def co_jacobi_defect(g: Generator, spec: AlgebraSpec) -> dict:
    """Cyclic sum of (delta ⊗ id) ∘ delta; zero for a Lie cobracket."""
    base = {(g,): Fraction(1)}
    dd = _apply_delta_slot(_apply_delta_slot(base, 0, spec), 0, spec)
    out: dict = {}
    for (a, b, c), v in dd.items():
        for key in ((a, b, c), (b, c, a), (c, a, b)):
            out[key] = out.get(key, Fraction(0)) + v
    return {k: v for k, v in out.items() if v}


def cocycle_defect(g1: Generator, g2: Generator, spec: AlgebraSpec) -> dict:
    """delta([a,b]) - a.delta(b) + b.delta(a) as a 2-tensor dict."""
    grid = spec.grid
    e1 = LieElem.gen(g1.kind, g1.iv, grid)
    e2 = LieElem.gen(g2.kind, g2.iv, grid)
    lhs = cobracket(bracket(e1, e2, spec), spec).to_tensor()

    def act(x: LieElem, t: dict) -> dict:
        out: dict = {}
        for (a, b), c in t.items():
            for u, cu in bracket(x, LieElem.gen(a.kind, a.iv, grid), spec).items():
                out[(u, b)] = out.get((u, b), Fraction(0)) + c * cu
            for v, cv in bracket(x, LieElem.gen(b.kind, b.iv, grid), spec).items():
                out[(a, v)] = out.get((a, v), Fraction(0)) + c * cv
        return out

    rhs: dict = {}
    for k, v in act(e1, cobracket(e2, spec).to_tensor()).items():
        rhs[k] = rhs.get(k, Fraction(0)) + v
    for k, v in act(e2, cobracket(e1, spec).to_tensor()).items():
        rhs[k] = rhs.get(k, Fraction(0)) - v
    out = dict(lhs)
    for k, v in rhs.items():
        out[k] = out.get(k, Fraction(0)) - v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# q = 1 specialization
# ---------------------------------------------------------------------------

def _split_word(w: Word):
    xp = tuple(g for g in w if RANK[g.kind] == 0)
    ca = tuple(g for g in w if RANK[g.kind] == 1)
    xm = tuple(g for g in w if RANK[g.kind] == 2)
    return xp, ca, xm


def cartan_fraction(terms) -> tuple[dict, dict]:
    """Rewrite sum c * prod H^{e+} (K^-1)^{e-} as numerator / denominator.

    ``terms`` yields (vars, scalar) with vars a mapping var_key -> (e+, e-).
    Returns (denominator exponents per var_key, numerator polynomial as a
    dict exponent-frozenset -> LaurentQ).  The denominator is the monomial
    prod (1+(q-1)H)^D, a unit modulo every power of (q-1), so divisibility
    and q=1 limits can be read off the numerator alone.
    """
    terms = list(terms)
    denom: dict = {}
    for vars_, _ in terms:
        for k, (_, em) in vars_.items():
            denom[k] = max(denom.get(k, 0), em)
    t = LaurentQ({1: 1, 0: -1})
    numer: dict = {}
    for vars_, c in terms:
        mono: dict = {frozenset(): c if isinstance(c, LaurentQ) else LaurentQ.from_rat(c)}
        for k in denom:
            ep, em = vars_.get(k, (0, 0))
            # H^ep * (1 + t H)^(D-em)
            pw: dict = {ep: LaurentQ.one()}
            for _ in range(denom[k] - em):
                nxt: dict = {}
                for e, v in pw.items():
                    for de, dv in ((0, v), (1, v * t)):
                        nxt[e + de] = nxt.get(e + de, LaurentQ.zero()) + dv
                pw = nxt
            nxt2: dict = {}
            for mexp, mv in mono.items():
                for e, v in pw.items():
                    key = frozenset(x for x in mexp if x[0] != k) | ({(k, e)} if e else set())
                    nxt2[key] = nxt2.get(key, LaurentQ.zero()) + mv * v
            mono = nxt2
        for key, v in mono.items():
            numer[key] = numer.get(key, LaurentQ.zero()) + v
    return denom, {k: v for k, v in numer.items() if not v.is_zero()}


def _word_cartan_vars(ca: Word) -> dict:
    vars_: dict = {}
    for g in ca:
        ep, em = vars_.get(g.iv, (0, 0))
        if g.kind in ("H",):
            vars_[g.iv] = (ep + 1, em)
        elif g.kind == "K-":
            vars_[g.iv] = (ep, em + 1)
        else:
            raise DomainError(f"unexpected Cartan letter {g}")
    return vars_


def limit_q1(e: NCExpr, spec: AlgebraSpec, classical: Optional[AlgebraSpec] = None):
    """Specialize at q = 1.

    For the unrescaled polynomial form the image lands in the enveloping
    presentation via K^±1 ↦ 1, H ↦ xi, X± ↦ 2x± (``classical`` supplies the
    target).  For the rescaled form the image is the commutative coordinate
    ring: the same PBW words with coefficients evaluated at q = 1.
    Coefficients with genuine poles at q = 1 raise ``PoleAtQ1``.
    """
    nf = normal_form(e, spec)
    if spec.presentation == UQT:
        return nf.map_coeffs(lambda c: LaurentQ.from_rat(c.eval_q1()))
    if spec.presentation != UQ:
        raise DomainError("limit_q1 takes the polynomial presentations")
    if classical is None:
        classical = AlgebraSpec(CLASSICAL, spec.grid,
                                euler_variant=spec.euler_variant,
                                serre_variant=spec.serre_variant)
    groups: dict = {}
    for w, c in nf.items():
        xp, ca, xm = _split_word(w)
        groups.setdefault((xp, xm), []).append((_word_cartan_vars(ca), c))
    out = NCExpr.zero(classical.ring)
    for (xp, xm), terms in groups.items():
        denom, numer = cartan_fraction(terms)
        head = tuple(Generator("x+", g.iv) for g in xp)
        tail = tuple(Generator("x-", g.iv) for g in xm)
        scale = Fraction(2) ** (len(xp) + len(xm))
        for mono, coeff in numer.items():
            val = coeff.eval_q1() * scale  # raises PoleAtQ1 on genuine poles
            if not val:
                continue
            mid = tuple(itertools.chain.from_iterable(
                (Generator("xi", ivk),) * e
                for ivk, e in sorted(mono, key=lambda t: (t[0].lo, t[0].hi))))
            out = out + NCExpr.word(head + mid + tail, classical.ring,
                                    Fraction(val))
    return normal_form(out, classical)


# ---------------------------------------------------------------------------
# first-order (semiclassical) data
# ---------------------------------------------------------------------------

def _linear_part_poly(nf: NCExpr, spec: AlgebraSpec) -> LieElem:
    """Degree-one part modulo I^2 of a rescaled-form element at q = 1.

    Letters with counit zero are coordinates; K^-1 letters split off as
    1 + (K^-1 - 1) with K^-1 - 1 ≡ -Hbar mod I^2.  Coordinates map by
    Hbar ↦ xi, X±bar ↦ 2x±.
    """
    grid = spec.grid
    out = LieElem.zero()
    for w, c in nf.items():
        val = c.eval_q1()
        if not val:
            continue
        coords = [i for i, g in enumerate(w) if g.kind != "K-"]
        if len(coords) > 1:
            continue  # in I^2
        if len(coords) == 1:
            g = w[coords[0]]
            if g.kind == "H":
                out = out + LieElem.gen("xi", g.iv, grid, val)
            else:
                out = out + LieElem.gen("x+" if g.kind == "X+" else "x-",
                                        g.iv, grid, 2 * val)
        else:
            # product of K^-1 letters: prod(1 + D_i), linear part sum D_i
            for g in w:
                out = out - LieElem.gen("xi", g.iv, grid, val)
    return out


def _linear_part_formal(nf: NCExpr, spec: AlgebraSpec) -> LieElem:
    """Degree-one part mod h and I^2 of a rescaled formal element
    (Xibar ↦ xi, X±bar ↦ x±)."""
    grid = spec.grid
    out = LieElem.zero()
    for w, c in nf.items():
        if len(w) != 1:
            continue
        val = c.eval_h0()
        if not val:
            continue
        g = w[0]
        kind = {"Xi": "xi", "X+": "x+", "X-": "x-"}[g.kind]
        out = out + LieElem.gen(kind, g.iv, grid, val)
    return out


def _exact_div_coeffs(nf: NCExpr, spec: AlgebraSpec) -> NCExpr:
    """Divide every coefficient by (q-1) (resp. h), exactly."""
    if spec.ring.kind == "q":
        def div(c):
            ok, quo = c.divides_qm1(1)
            if not ok:
                raise DivisibilityError(
                    f"coefficient {c} is not divisible by (q-1)")
            return quo
        return nf.map_coeffs(div)
    def divh(c):
        if not c.h_valuation_at_least(1):
            raise DivisibilityError(f"coefficient {c} is not divisible by h")
        return c * SeriesH.hpow(-1)
    return nf.map_coeffs(divh)


def first_order_bracket(a: NCExpr, b: NCExpr, spec: AlgebraSpec) -> LieElem:
    """Poisson bracket datum {a, b} = [a, b]/(q-1) (resp. /h) mod I^2."""
    if spec.presentation not in (UQT, UHT):
        raise DomainError("first-order brackets live on the rescaled forms")
    comm = normal_form(a * b - b * a, spec)
    quo = _exact_div_coeffs(comm, spec)
    if spec.presentation == UQT:
        return _linear_part_poly(quo, spec)
    return _linear_part_formal(quo, spec)


def _pi_word_q(w: Word) -> list:
    """Class of a polynomial-form word in I/I^2, over the Laurent ring.

    H and X± letters are coordinates; a word of K^-1 letters is a product of
    (1 + D) with D = K^-1 - 1 ≡ -(q-1) H mod I^2.
    """
    coords = [g for g in w if g.kind != "K-"]
    if len(coords) > 1:
        return []
    if len(coords) == 1:
        return [(coords[0], LaurentQ.one())]
    return [(Generator("H", g.iv), LaurentQ({1: -1, 0: 1})) for g in w]


def _pi_word_h(w: Word) -> list:
    return [(w[0], SeriesH.one())] if len(w) == 1 else []


def first_order_cobracket(g: Generator, spec: AlgebraSpec) -> CobracketValue:
    """Cobracket datum (Δ - Δ^op)(lift)/(q-1) (resp. /h), reduced mod I_2.

    The reduction to I/I^2 ⊗ I/I^2 happens before the division: generator
    pairs form a free module there, so the divisibility is well-defined
    (raw tensor coefficients split 1 - K^-1 over two keys, neither of which
    is divisible on its own).  Lift normalization: on the unrescaled
    polynomial side X± lifts 2x±, so the X-generator result is halved.

    Normalization note: on the formal side the /h datum equals the classical
    cobracket table exactly; the polynomial /(q-1) datum is twice it, since
    q - 1 = h/2 + O(h^2).  Both are reported literally.
    """
    if spec.presentation not in (UQ, UH):
        raise DomainError("first-order cobrackets take lifts in the "
                          "unrescaled presentations")
    e = NCExpr.gen(g, spec.ring)
    d = coproduct(e, spec)
    anti = d - d.swap()
    qside = spec.ring.kind == "q"
    pi = _pi_word_q if qside else _pi_word_h
    acc: dict = {}
    for (w1, w2), c in anti.items():
        for g1, c1 in pi(w1):
            for g2, c2 in pi(w2):
                k = (g1, g2)
                v = acc.get(k)
                vv = c * c1 * c2
                acc[k] = vv if v is None else v + vv
    pairs: dict = {}
    grid = spec.grid
    for (g1, g2), c in acc.items():
        if qside:
            ok, quo = c.divides_qm1(1)
            if not ok:
                raise DivisibilityError(f"{c} not divisible by (q-1)")
            val = quo.eval_q1()
        else:
            if not c.h_valuation_at_least(1):
                raise DivisibilityError(f"{c} not divisible by h")
            val = (c * SeriesH.hpow(-1)).eval_h0()
        if not val:
            continue
        out_pair = []
        for gg in (g1, g2):
            if gg.kind in ("H", "Xi"):
                out_pair.append((Generator("xi", gg.iv), Fraction(1)))
            else:
                kind = "x+" if gg.kind == "X+" else "x-"
                scale = Fraction(2) if qside else Fraction(1)
                out_pair.append((Generator(kind, gg.iv), scale))
        (a, sa), (b, sb) = out_pair
        # xi coordinates of composite intervals spread over cells
        for acell, ca in _cells_of(a, grid):
            for bcell, cb in _cells_of(b, grid):
                k = (acell, bcell)
                pairs[k] = pairs.get(k, Fraction(0)) + val * sa * sb * ca * cb
    pairs = {k: v for k, v in pairs.items() if v}
    wedge = CobracketValue.from_tensor(pairs)
    if g.kind in ("X+", "X-") and qside:
        wedge = wedge.scale(Fraction(1, 2))  # the lift of x± is X±/2
    return wedge


def _cells_of(g: Generator, grid: Grid) -> list:
    if g.kind == "xi" and grid.length_cells(g.iv) > 1:
        return [(Generator("xi", c), Fraction(1)) for c in grid.cells_of(g.iv)]
    return [(g, Fraction(1))]
