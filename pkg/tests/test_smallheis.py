"""Small Heisenberg groups: normalizers, duality, actions, doubling."""

import itertools
import random

import pytest

from qtheta.errors import (
    DimensionDeficit,
    MissingRootsOfUnity,
    NotInNormalizer,
)
from qtheta.heisenberg import HeisElement, heis_mul
from qtheta.multiplier import multiplier_new, power, theta_dim_basis
from qtheta.scalars import INF, CycloField, ScalarSeries, UnitMonomial
from qtheta.smallheis import (
    SmallHeisElement,
    act_on_theta,
    character_split,
    commutant_dimension,
    conjugate_generator,
    gamma_lift,
    group_structure,
    kernel_group,
    mumford_theta_pullback,
    normalizer_membership,
)
from qtheta.torus import QuantParam, TorusPoint

F = CycloField(1)
P1 = QuantParam.trivial(F, 1)


def q_mono(k, sign=1):
    return UnitMonomial.q_power(F, k, sign)


def jacobi():
    img = HeisElement(P1, q_mono(1), TorusPoint.from_q_exps(F, [2]), (1,))
    return multiplier_new(P1, [img], [[q_mono(1)]])


def level2():
    return power(jacobi(), 2)


def minus_one_point():
    return TorusPoint((UnitMonomial(-F.one(), 0),))


def test_normalizer_membership():
    L2 = level2()
    one = UnitMonomial.one(F)
    # identity element
    assert normalizer_membership(L2, one, TorusPoint.identity(F, 1), (0,))
    # kernel element xi = (h0 -> -1), gamma = 0: the equations reduce to (-1)^(2m) = 1
    assert normalizer_membership(L2, one, minus_one_point(), (0,))
    # gamma = h0 with xi solving the lifting equations: xi(h0) = +/- q
    assert normalizer_membership(L2, one, TorusPoint.from_q_exps(F, [1]), (1,))
    assert normalizer_membership(
        L2, one, TorusPoint((UnitMonomial(-F.one(), 2),)), (1,)
    )
    # a wrong point fails
    assert not normalizer_membership(L2, one, TorusPoint.from_q_exps(F, [3]), (1,))


def test_conjugation_formula_fixed_points():
    L2 = level2()
    elems = [
        SmallHeisElement(UnitMonomial.one(F), minus_one_point(), (0,)),
        SmallHeisElement(UnitMonomial.one(F), TorusPoint.from_q_exps(F, [1]), (1,)),
    ]
    for e in elems:
        for i in range(L2.rank):
            conj = conjugate_generator(L2, e, i)
            img = L2.images[i].left_raw()
            assert conj.c == img.c and conj.x == img.x
            assert conj.g == img.g and conj.h == img.h


def test_kernel_group_and_structure_level2():
    L2 = level2()
    gens, orders = kernel_group(L2)
    assert orders == (2,)
    assert gens[0] == minus_one_point()
    struct = group_structure(L2)
    assert struct.quotient.index == 2
    assert struct.kappa_orders == (2,)
    # duality: gamma(-1) = (-1)^gamma, the nontrivial pairing of Z/2 x Z/2
    M = struct.torsion_order
    vals = {
        (kidx, ci): e for (kidx, ci), e in struct.duality.items()
    }
    nontrivial = [e for (kidx, ci), e in vals.items() if kidx == (1,) and ci == 1]
    assert nontrivial[0] == M // 2  # the value -1
    assert vals[((1,), 0)] == 0
    assert vals[((0,), 0)] == 0 and vals[((0,), 1)] == 0


def test_kernel_size_matches_index_random():
    rng = random.Random(3)
    f12 = CycloField(12)
    p = QuantParam.trivial(f12, 2)
    for _ in range(10):
        # diagonal-ish h- with entries in {1,2,3}: index = product
        d1, d2 = rng.choice([1, 2, 3]), rng.choice([1, 2, 3])
        imgs = [
            HeisElement(
                p,
                UnitMonomial.q_power(f12, d1 * d1),
                TorusPoint.from_q_exps(f12, [2 * d1, 0]),
                (d1, 0),
            ),
            HeisElement(
                p,
                UnitMonomial.q_power(f12, d2 * d2),
                TorusPoint.from_q_exps(f12, [0, 2 * d2]),
                (0, d2),
            ),
        ]
        L = multiplier_new(p, imgs)
        gens, orders = kernel_group(L)
        size = 1
        for o in orders:
            size *= o
        assert size == L.index()


def test_gamma_lift():
    L2 = level2()
    # gamma = 0: lifts = the kernel group itself
    lifts0 = gamma_lift(L2, (0,))
    pts = {e.xi for e in lifts0}
    assert pts == {TorusPoint.identity(F, 1), minus_one_point()}
    # gamma = h0: two lifts differing by the sign of xi(h0)
    lifts1 = gamma_lift(L2, (1,))
    assert len(lifts1) == 2
    vals = sorted((v.xi.values[0].uexp, repr(v.xi.values[0].coeff)) for v in lifts1)
    assert all(u == 2 for u, _ in vals)
    for e in lifts1:
        assert normalizer_membership(L2, e.c, e.xi, e.gamma)


def test_missing_roots_reported():
    # index-3 multiplier needs cube roots of unity: fails over Q, works in Q(z_3)
    img = HeisElement(P1, q_mono(9), TorusPoint.from_q_exps(F, [6]), (3,))
    L3 = multiplier_new(P1, [img])
    with pytest.raises(MissingRootsOfUnity):
        group_structure(L3)
    f3 = CycloField(3)
    p3 = QuantParam.trivial(f3, 1)
    img3 = HeisElement(
        p3, UnitMonomial.q_power(f3, 9), TorusPoint.from_q_exps(f3, [6]), (3,)
    )
    struct = group_structure(multiplier_new(p3, [img3]))
    assert struct.quotient.index == 3
    assert struct.kappa_orders == (3,)


def test_character_split_level2():
    L2 = level2()
    tb = theta_dim_basis(L2, window=6, order=120)
    split = character_split(L2, tb)
    # even/odd support split: -1 acts trivially on the even line and by -1
    # on the odd line
    exps = {rep[0] % 2: e for rep, e in split.items()}
    assert exps[0] == (0,)
    assert exps[1] == (1,)  # exponent M/2 over zeta_M... M=2 here: exponent 1
    # index 1: single line, trivial character
    L = jacobi()
    tb1 = theta_dim_basis(L, window=6, order=120)
    split1 = character_split(L, tb1)
    assert list(split1.values()) == [()]


def test_character_split_requires_full_dim():
    # kernel generator with point -1 and scalar q: the recurrence is
    # overdetermined on every coset, so the dimension drops to 0
    img1 = HeisElement(P1, q_mono(2), TorusPoint.from_q_exps(F, [2]), (2,))
    img_kernel = HeisElement(P1, q_mono(1), minus_one_point(), (0,))
    L = multiplier_new(P1, [img1, img_kernel])
    tb = theta_dim_basis(L)
    assert tb.dim == 0 < L.index()
    with pytest.raises(DimensionDeficit):
        character_split(L, tb)


def test_act_on_theta_matrices():
    L2 = level2()
    tb = theta_dim_basis(L2, window=6, order=120)
    order = 80
    ident = SmallHeisElement(UnitMonomial.one(F), TorusPoint.identity(F, 1), (0,))
    m_id = act_on_theta(L2, ident, tb, window=4, order=order)
    for i in range(2):
        for j in range(2):
            if i == j:
                assert m_id[i][j].equal_to_order(ScalarSeries.one(F).truncate(order), order)
            else:
                assert m_id[i][j].is_zero()
    # kernel generator acts as diag(1, -1) in the even/odd order
    kelem = SmallHeisElement(UnitMonomial.one(F), minus_one_point(), (0,))
    m_k = act_on_theta(L2, kelem, tb, window=4, order=order)
    parities = [rep[0] % 2 for rep in tb.coset_reps]
    for i in range(2):
        for j in range(2):
            if i != j:
                assert m_k[i][j].is_zero()
        expect = ScalarSeries.one(F) if parities[i] == 0 else -ScalarSeries.one(F)
        assert m_k[i][i].equal_to_order(expect.truncate(order), order)
    # gamma-lift permutes the two lines (antidiagonal up to monomials)
    glift = gamma_lift(L2, (1,))[0]
    m_g = act_on_theta(L2, glift, tb, window=4, order=order)
    for i in range(2):
        assert m_g[i][i].is_zero()
    assert not m_g[0][1].is_zero() and not m_g[1][0].is_zero()
    # rejection of non-normalizer elements
    with pytest.raises(NotInNormalizer):
        act_on_theta(
            L2,
            SmallHeisElement(UnitMonomial.one(F), TorusPoint.from_q_exps(F, [3]), (1,)),
            tb,
            window=4,
            order=order,
        )


def test_action_group_law_mod_center():
    L2 = level2()
    tb = theta_dim_basis(L2, window=6, order=120)
    order = 60
    a = gamma_lift(L2, (1,))[0]
    b = SmallHeisElement(UnitMonomial.one(F), minus_one_point(), (0,))
    ma = act_on_theta(L2, a, tb, window=3, order=order)
    mb = act_on_theta(L2, b, tb, window=3, order=order)
    ab_raw = heis_mul(a.raw(P1), b.raw(P1))
    ab = SmallHeisElement(ab_raw.c, ab_raw.x, ab_raw.g)
    mab = act_on_theta(L2, ab, tb, window=3, order=order)
    # M(ab) == M(a) M(b) exactly (the raw product tracks the scalar)
    n = tb.dim
    for i in range(n):
        for j in range(n):
            acc = ScalarSeries.zero(F, order)
            for k in range(n):
                acc = acc + ma[i][k] * mb[k][j]
            eff = min(order, acc.trunc, mab[i][j].trunc)
            assert mab[i][j].equal_to_order(acc, eff)


def test_commutant_is_scalar():
    L2 = level2()
    tb = theta_dim_basis(L2, window=6, order=120)
    order = 60
    mats = []
    for e in [
        SmallHeisElement(UnitMonomial.one(F), minus_one_point(), (0,)),
        gamma_lift(L2, (1,))[0],
    ]:
        mats.append(act_on_theta(L2, e, tb, window=3, order=order))
    assert commutant_dimension(mats, F) == 1


def test_mumford_theta_pullback():
    L = jacobi()
    tb = theta_dim_basis(L, window=6, order=200)
    th = tb.basis[0]
    pulled, pulled_mult, ok = mumford_theta_pullback(L, th, th, window=3, order=40)
    assert ok
    # M*(theta box theta) coefficient at (a, b): q^((a^2+b^2)/2) when a == b mod 2
    for a in range(-3, 4):
        for b in range(-3, 4):
            c = pulled.coeff((a, b), 40)
            if (a - b) % 2 == 0:
                e = a * a + b * b  # u-exponent: 2*(a^2+b^2)/2
                if e <= 40:
                    assert c == ScalarSeries(F, {e: F.one()}, 40)
            else:
                assert c.is_zero()
    # the doubling map reindexes injectively: cell (0,0) sees only the
    # (h,g) = (0,0) coefficient
    c00 = pulled.coeff((0, 0), 40)
    assert c00 == ScalarSeries.one(F).truncate(40)


def test_mumford_twist_invariance():
    f4 = CycloField(4)
    p = QuantParam.trivial(f4, 1)
    img = HeisElement(p, UnitMonomial.q_power(f4, 1), TorusPoint.from_q_exps(f4, [2]), (1,))
    L = multiplier_new(p, [img], [[UnitMonomial.q_power(f4, 1)]])
    tb = theta_dim_basis(L, window=6, order=200)
    th = tb.basis[0]
    plain, _, ok1 = mumford_theta_pullback(L, th, th, window=3, order=40)
    twisted_half = QuantParam(f4, p.lattice, ((0,),), ((1,),))
    tw, _, ok2 = mumford_theta_pullback(L, th, th, window=3, order=40, half_param=twisted_half)
    assert ok1 and ok2
    for a in range(-3, 4):
        for b in range(-3, 4):
            assert plain.coeff((a, b), 40) == tw.coeff((a, b), 40)


def test_injectivity_check_catches_combined_collapse():
    # each kernel generator alone has an infinite-order point, but their sum
    # collapses: x_l(k1 + k2) is the identity
    from qtheta.errors import NonInjectiveImage
    from qtheta.smallheis import _check_injective_image

    p2 = QuantParam.trivial(F, 2)
    img1 = HeisElement(p2, q_mono(1), TorusPoint.from_q_exps(F, [2, 0]), (1, 0))
    k1 = HeisElement(p2, q_mono(0), TorusPoint.from_q_exps(F, [0, 1]), (0, 0))
    k2 = HeisElement(p2, q_mono(0), TorusPoint.from_q_exps(F, [0, -1]), (0, 0))
    L = multiplier_new(p2, [img1, k1, k2])
    with pytest.raises(NonInjectiveImage):
        _check_injective_image(L)
    # with independent kernel points the injectivity hypothesis holds
    k3 = HeisElement(p2, q_mono(0), TorusPoint.from_q_exps(F, [0, 2]), (0, 0))
    L_ok = multiplier_new(p2, [img1, k1, k3])
    with pytest.raises(NonInjectiveImage):
        # k1, k3 are dependent (uexp vectors (0,1) and (0,2) have a kernel
        # combination 2*k1 - k3)
        _check_injective_image(L_ok)
    k4 = HeisElement(p2, q_mono(1), TorusPoint.from_q_exps(F, [0, 1]), (0, 0))
    L_good = multiplier_new(p2, [img1, k4])
    _check_injective_image(L_good)
