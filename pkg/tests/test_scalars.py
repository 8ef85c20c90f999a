"""Base field arithmetic: cyclotomic rationals and truncated Laurent series."""

import random
from fractions import Fraction

import pytest

from qtheta.errors import DivisionByZero, NotInvertible
from qtheta.scalars import (
    INF,
    CycloField,
    ScalarSeries,
    UnitMonomial,
    cyclo_arith,
    cyclo_sqrt,
    cyclotomic_polynomial,
    monomial_from_json,
    monomial_to_json,
    series_arith,
    series_from_json,
    series_invert,
    series_to_json,
    valuation,
)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_cyclo_add_m2():
    f = CycloField(2)
    half = f.from_rational(Fraction(1, 2))
    assert cyclo_arith("add", half, half) == f.one()


def test_cyclo_mul_m4_zeta_squared():
    f = CycloField(4)
    z = f.zeta()
    assert cyclo_arith("mul", z, z) == -f.one()


def test_cyclo_inv_m3_extended_euclid():
    # (1+z)(-z) = -z - z^2 = 1 mod Phi_3
    f = CycloField(3)
    z = f.zeta()
    a = f.one() + z
    assert cyclo_arith("inv", a, None) == -z
    assert a * a.inverse() == f.one()


def test_cyclo_inv_of_zero_raises():
    f = CycloField(4)
    with pytest.raises(DivisionByZero):
        f.zero().inverse()


def test_cyclo_m1_matches_plain_rationals():
    f = CycloField(1)
    rng = random.Random(7)
    for _ in range(50):
        a = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        b = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        fa, fb = f.from_rational(a), f.from_rational(b)
        assert (fa + fb).as_rational() == a + b
        assert (fa * fb).as_rational() == a * b
        if b != 0:
            assert (fa / fb).as_rational() == a / b


def test_cyclo_field_axioms_random():
    f = CycloField(12)
    rng = random.Random(3)

    def rand():
        return f.element([rng.randint(-3, 3) for _ in range(f.degree)])

    for _ in range(30):
        a, b, c = rand(), rand(), rand()
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        if not a.is_zero():
            assert a * a.inverse() == f.one()


def test_roots_of_unity():
    f = CycloField(12)
    for k in (1, 2, 3, 4, 6, 12):
        z = f.root_of_unity(k)
        assert z**k == f.one()
        assert all(z**j != f.one() for j in range(1, k))
    # odd order field still has -1
    f3 = CycloField(3)
    assert f3.root_of_unity(2) == -f3.one()
    z6 = f3.root_of_unity(6)
    assert z6**6 == f3.one() and z6**3 != f3.one()


def test_cyclo_sqrt():
    f = CycloField(4)
    assert cyclo_sqrt(f.from_rational(Fraction(9, 4))) == f.from_rational(Fraction(3, 2))
    i = f.root_of_unity(4)
    assert cyclo_sqrt(-f.one()) in (i, -i)
    assert cyclo_sqrt(f.from_rational(2)) is None


# ---------------------------------------------------------------------------


def series(field, pairs, trunc=INF):
    return ScalarSeries(field, {e: field.from_rational(c) for e, c in pairs}, trunc)


def test_series_mul_polynomials():
    f = CycloField(1)
    a = series(f, [(0, 1), (2, 1)], trunc=10)
    b = series(f, [(0, 1), (2, -1)], trunc=10)
    prod = series_arith("mul", a, b)
    assert prod.coefficient(0) == f.one()
    assert prod.coefficient(4) == -f.one()
    assert prod.coefficient(2).is_zero()


def test_series_additive_inverse_random():
    f = CycloField(4)
    rng = random.Random(11)
    for _ in range(20):
        s = ScalarSeries(
            f,
            {rng.randint(-5, 8): f.element([rng.randint(-4, 4), rng.randint(-4, 4)]) for _ in range(6)},
            trunc=8,
        )
        assert series_arith("add", s, series_arith("neg", s)).is_zero()


def test_series_geometric_oracle():
    # (sum_{k>=0} u^{2k}) * (1 - u^2) == 1 at truncation 6
    f = CycloField(1)
    geo = series(f, [(0, 1), (2, 1), (4, 1), (6, 1)], trunc=6)
    fac = series(f, [(0, 1), (2, -1)])
    prod = geo * fac
    assert prod.equal_to_order(ScalarSeries.one(f).truncate(6), 6)


def test_series_invert_examples():
    f = CycloField(1)
    one = ScalarSeries.one(f)
    assert series_invert(one) == one
    # invert(1-u) @N=4 -> 1+u+u^2+u^3+u^4  (long division oracle)
    s = series(f, [(0, 1), (1, -1)], trunc=4)
    inv = series_invert(s)
    assert inv == series(f, [(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)], trunc=4)
    # invert(u^2) -> u^-2
    mono = series(f, [(2, 1)])
    assert series_invert(mono) == series(f, [(-2, 1)])


def test_series_invert_two_sided_random():
    f = CycloField(1)
    rng = random.Random(5)
    for _ in range(100):
        v = rng.randint(-3, 3)
        terms = {v: f.one()}
        for _ in range(4):
            terms[v + rng.randint(1, 6)] = f.from_rational(rng.randint(-3, 3))
        s = ScalarSeries(f, terms, trunc=v + 8)
        inv = s.invert()
        for prod in (s * inv, inv * s):
            order = prod.trunc
            assert order >= 8 - abs(v) - 2
            assert prod.equal_to_order(ScalarSeries.one(f).truncate(order), order)


def test_series_invert_zero_raises():
    f = CycloField(1)
    with pytest.raises(NotInvertible):
        ScalarSeries.zero(f, trunc=5).invert()


def test_valuation():
    f = CycloField(1)
    s = series(f, [(3, 1), (5, 2)])
    assert valuation(s) == 3
    assert valuation(ScalarSeries.zero(f)) == INF
    # valuation(u^2 s * u^3 t) = 5 + valuation(s t) for unit-leading s, t
    rng = random.Random(13)
    for _ in range(20):
        s1 = series(f, [(0, 1), (1, rng.randint(-3, 3))], trunc=9)
        t1 = series(f, [(0, 1), (2, rng.randint(-3, 3))], trunc=9)
        lhs = (s1.shift(2)) * (t1.shift(3))
        assert valuation(lhs) == 5 + valuation(s1 * t1)


def test_ring_axioms_random_series():
    f = CycloField(1)
    rng = random.Random(23)

    def rand():
        return ScalarSeries(
            f,
            {rng.randint(-4, 6): f.from_rational(rng.randint(-5, 5)) for _ in range(5)},
            trunc=rng.choice([8, 10, INF]),
        )

    for _ in range(40):
        a, b, c = rand(), rand(), rand()
        lhs = (a * b) * c
        rhs = a * (b * c)
        order = min(lhs.trunc, rhs.trunc, 6)
        if order is INF:
            assert lhs == rhs
        else:
            assert lhs.equal_to_order(rhs, order)
        d1 = a * (b + c)
        d2 = a * b + a * c
        order = min(d1.trunc, d2.trunc, 6)
        if order is INF:
            assert d1 == d2
        else:
            assert d1.equal_to_order(d2, order)


def test_valuation_multiplicative_on_units():
    f = CycloField(1)
    a = series(f, [(2, 3), (4, 1)], trunc=9)
    b = series(f, [(-1, 2), (0, 5)], trunc=9)
    assert valuation(a * b) == valuation(a) + valuation(b)


def test_truncation_tracking():
    f = CycloField(1)
    a = series(f, [(0, 1)], trunc=5)
    b = series(f, [(3, 1)])  # exact monomial
    prod = a * b
    assert prod.trunc == 8  # validity shifts with the monomial's valuation
    s = a + b
    assert s.trunc == 5


def test_unit_monomial_group():
    f = CycloField(4)
    q = UnitMonomial.q_power(f, 1)
    assert q.uexp == 2
    m = UnitMonomial(f.zeta(), 3)
    assert (m * m.inverse()).is_one()
    assert (m**2).uexp == 6
    r = UnitMonomial(f.one(), 4).nth_root(2)
    assert r.uexp == 2


def test_series_json_roundtrip():
    f = CycloField(4)
    s = ScalarSeries(f, {-2: f.zeta(), 3: f.from_rational(Fraction(5, 3))}, trunc=7)
    assert series_from_json(series_to_json(s)) == s
    exact = ScalarSeries(f, {0: f.one()})
    assert series_from_json(series_to_json(exact)) == exact
    u = UnitMonomial(f.zeta(3), -4)
    assert monomial_from_json(monomial_to_json(u)) == u
