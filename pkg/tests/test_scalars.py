from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from intquant.scalars import (LaurentQ, PoleAtQ1, PrecisionError, SeriesH,
                              expand_q, qint)


def test_qint():
    assert qint(0).is_zero()
    assert qint(1) == LaurentQ.one()
    assert qint(2) == LaurentQ({1: 1, 0: 1})           # q + 1
    assert qint(-1) == LaurentQ({-1: -1})              # -q^-1
    # (-n)_q = -q^-1 (n)_{q^-1}
    n = 3
    lhs = qint(-n)
    rhs = LaurentQ({-1: -1}) * LaurentQ({-e: 1 for e in range(n)})
    assert lhs == rhs


def test_divides_qm1():
    ok, quo = LaurentQ({2: 1, 0: -1}).divides_qm1(1)
    assert ok and quo == LaurentQ({1: 1, 0: 1})
    ok, quo = LaurentQ.q().divides_qm1(1)
    assert not ok and quo is None
    x = (LaurentQ({1: 1, 0: -1}) ** 3) * LaurentQ({-2: 1})
    ok, quo = x.divides_qm1(3)
    assert ok and quo == LaurentQ({-2: 1})
    assert x.val_qm1() == 3
    assert LaurentQ.zero().val_qm1() == float("inf")


def test_localization_normalizes():
    qm1 = LaurentQ({1: 1, 0: -1})
    x = qm1 * LaurentQ.qm1_inv_pow(1)
    assert x == LaurentQ.one() and x.dp == 0
    y = LaurentQ.qm1_inv_pow(2) * qm1
    assert y.dp == 1
    assert y.val_qm1() == -1


def test_eval_q1_and_poles():
    assert (LaurentQ.q() + 1).eval_q1() == 2
    with pytest.raises(PoleAtQ1):
        LaurentQ.qm1_inv_pow(1).eval_q1()


def test_exact_div():
    qq = LaurentQ({1: 1, -1: -1})
    z = qq * LaurentQ({3: 2})
    assert z.exact_div(qq) == LaurentQ({3: 2})
    assert LaurentQ.q().exact_div(LaurentQ({1: 1, 0: -1})) is None


def test_expand_q():
    s = expand_q(3)
    assert s.c == {0: 1, 1: Fraction(1, 2), 2: Fraction(1, 8)}
    assert s.prec == 3
    qq = SeriesH.q_minus_qinv(4)
    assert qq.c == {1: 1, 3: Fraction(1, 24)}
    assert qq.hval() == 1
    assert (expand_q(1)) == SeriesH({0: 1}, 1)
    with pytest.raises(ValueError):
        expand_q(0)


def test_series_division_and_precision():
    qq = SeriesH.q_minus_qinv(8)
    inv = qq.inverse()
    assert (qq * inv - 1).is_zero()
    assert inv.hval() == -1
    # dividing by h costs nothing; dividing by a val-1 series costs two orders
    assert (SeriesH.h() * SeriesH.hpow(-1)) == SeriesH.one()
    assert inv.prec == 8 - 2
    with pytest.raises(ZeroDivisionError):
        SeriesH.zero(4).inverse()
    with pytest.raises(PrecisionError):
        (SeriesH.one() + SeriesH.h()).inverse()  # exact multi-term


def test_series_valuation_certificates():
    x = SeriesH({2: 1}, 8)
    assert x.h_valuation_at_least(2)
    assert not x.h_valuation_at_least(3)
    trunc = SeriesH.zero(3)
    with pytest.raises(PrecisionError):
        trunc.h_valuation_at_least(5)
    with pytest.raises(PrecisionError):
        SeriesH({0: 1}, 3).coeff(4)


def test_series_windowed_equality():
    a = SeriesH({0: 1}, 7)
    b = SeriesH({0: 1, 7: Fraction(1, 3)}, 8)
    assert a == b              # agree below min precision
    c = SeriesH({0: 1, 5: 1}, 8)
    assert a != c


def test_homomorphism_to_series():
    f = LaurentQ({1: 2, -1: 1, 0: -3})
    g = LaurentQ({2: 1, 0: 5})
    N = 7
    assert ((f * g).to_series(N) - f.to_series(N) * g.to_series(N)).is_zero()
    assert ((f + g).to_series(N) - (f.to_series(N) + g.to_series(N))).is_zero()
    assert f.to_series(N).coeff(0) == f.eval_q1()


rat = st.fractions(max_denominator=6)
keys = st.integers(min_value=-4, max_value=4)
laurents = st.dictionaries(keys, rat, max_size=4).map(LaurentQ)


@given(laurents, laurents, laurents)
def test_laurent_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x + LaurentQ.zero() == x


@given(laurents, laurents)
def test_valuation_additive(x, y):
    if x.is_zero() or y.is_zero():
        return
    assert (x * y).val_qm1() == x.val_qm1() + y.val_qm1()
    # divisibility propagates through products
    n, m = max(0, x.val_qm1()), max(0, y.val_qm1())
    assert (x * y).divides_qm1(n + m)[0]


@given(laurents)
def test_series_valuation_matches_divisibility(x):
    # h-valuation of the image equals the (q-1) valuation
    if x.is_zero():
        return
    n = x.val_qm1()
    if n < 0:
        return
    s = x.to_series(n + 2)
    assert s.h_valuation_at_least(n)
    if not x.div_qm1_pow(n + 1).is_laurent():
        assert not s.h_valuation_at_least(n + 1)
