"""Built-in named series with reproducible constructions.

Every builder returns a fresh :class:`TorusSeries` whose coefficients come
from a deterministic recipe, so regenerating a series twice gives identical
coefficients.  The registry covers the basic theta, the q-exponential
product and its reciprocal, lifts of either along arbitrary lattice
directions (with a unit-monomial argument prefactor), the quantum addition
series, the lattice-kernel theta of the multiplication encoding, and the
ratio appearing in the Yang-Baxter identity.

Conventions: q = u^2;  e_q(t) = prod_{n>=0} (1 + q^(2n+1) t), whose t^k
coefficient is q^(k^2) / prod_{i<=k} (1 - q^(2i)).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnknownName
from .intlinalg import Vec, zero_vec
from .quadenum import QuadExpr
from .scalars import INF, CycloField, ScalarSeries, UnitMonomial
from .series import LatticeFactor, TorusSeries
from .torus import QuantParam, TorusPoint

# -- scalar coefficient caches -------------------------------------------------

_EQ_CACHE: dict[tuple[int, int], ScalarSeries] = {}
_EQINV_CACHE: dict[tuple[int, int], ScalarSeries] = {}


def eq_coefficient(field: CycloField, k: int, order) -> ScalarSeries:
    """t^k coefficient of e_q(t), exact to the requested order."""
    if k < 0:
        return ScalarSeries.zero(field)
    need = max(int(order) if order is not INF else 0, 2 * k * k) + 1
    key = (field.order, k)
    hit = _EQ_CACHE.get(key)
    if hit is not None and hit.trunc >= need:
        return hit
    # c_k = c_{k-1} * q^(2k-1) / (1 - q^(2k)); compute the whole chain at
    # a generous order so the cache stays monotone
    work = need + 4 * k
    c = ScalarSeries.one(field, work)
    _EQ_CACHE[(field.order, 0)] = c
    for i in range(1, k + 1):
        denom = ScalarSeries(
            field, {0: field.one(), 4 * i: -field.one()}, work
        )
        c = (c.shift(4 * i - 2)) * denom.invert()
        _EQ_CACHE[(field.order, i)] = c
    return _EQ_CACHE[key]


def eq_inv_coefficient(field: CycloField, k: int, order) -> ScalarSeries:
    """t^k coefficient of 1 / e_q(t) via the division recurrence."""
    if k < 0:
        return ScalarSeries.zero(field)
    need = max(int(order) if order is not INF else 0, 2 * k) + 1
    key = (field.order, k)
    hit = _EQINV_CACHE.get(key)
    if hit is not None and hit.trunc >= need:
        return hit
    work = need + 4 * k
    ds = [ScalarSeries.one(field, work)]
    for i in range(1, k + 1):
        acc = ScalarSeries.zero(field, work)
        for j in range(1, i + 1):
            acc = acc + eq_coefficient(field, j, work) * ds[i - j]
        ds.append(-acc)
        _EQINV_CACHE[(field.order, i)] = ds[i]
    _EQINV_CACHE[(field.order, 0)] = ds[0]
    return _EQINV_CACHE[key]


# -- lifted one-variable series --------------------------------------------------


def _power_sign(param: QuantParam, direction: Vec, k: int) -> UnitMonomial:
    """e(v)^k = eps(v)^(k(k-1)/2) e(k v)."""
    eps = param.epsilon(direction)
    sign = UnitMonomial.one(param.field)
    if not eps.is_one() and (k * (k - 1) // 2) % 2:
        sign = -sign
    return sign


def theta_series(
    param: QuantParam, direction: Vec, prefactor: UnitMonomial | None = None, label="theta"
) -> TorusSeries:
    """theta_q at the argument ``prefactor * e(direction)``.

    Coefficient at n*direction: q^(n^2) * prefactor^n * reordering sign.
    """
    f = param.field
    mu = prefactor if prefactor is not None else UnitMonomial.one(f)

    def coeff(y, order):
        (n,) = y
        return UnitMonomial.q_power(f, n * n) * (mu**n) * _power_sign(param, direction, n)

    val = QuadExpr(1, [[2]], [Fraction(mu.uexp)], 0)
    return TorusSeries.rule(param, zero_vec(param.rank), [direction], coeff, val, label=label)


def eq_series(
    param: QuantParam, direction: Vec, prefactor: UnitMonomial | None = None, label="e_q"
) -> TorusSeries:
    """e_q at the argument ``prefactor * e(direction)``; supported on the
    nonnegative half line."""
    f = param.field
    mu = prefactor if prefactor is not None else UnitMonomial.one(f)

    def coeff(y, order):
        (k,) = y
        if k < 0:
            return None
        base = eq_coefficient(f, k, order)
        return base.scale((mu**k) * _power_sign(param, direction, k))

    val = QuadExpr(1, [[2]], [Fraction(mu.uexp)], 0)
    return TorusSeries.rule(
        param, zero_vec(param.rank), [direction], coeff, val, cones=(True,), label=label
    )


def eq_inv_series(
    param: QuantParam, direction: Vec, prefactor: UnitMonomial | None = None, label="1/e_q"
) -> TorusSeries:
    """1/e_q at ``prefactor * e(direction)``: linear valuation growth 2k."""
    f = param.field
    mu = prefactor if prefactor is not None else UnitMonomial.one(f)

    def coeff(y, order):
        (k,) = y
        if k < 0:
            return None
        base = eq_inv_coefficient(f, k, order)
        return base.scale((mu**k) * _power_sign(param, direction, k))

    val = QuadExpr(1, [[0]], [Fraction(2 + mu.uexp)], 0)
    return TorusSeries.rule(
        param, zero_vec(param.rank), [direction], coeff, val, cones=(True,), label=label
    )


def eq_addition_series(
    param: QuantParam, dir1: Vec, dir2: Vec, label="e_q(u+v)"
) -> TorusSeries:
    """e_q evaluated at the noncommutative sum e(dir1) + e(dir2).

    Coefficient at a*dir1 + b*dir2 is c_{a+b} times the (generally
    multi-term) coefficient of the word expansion of
    (e(dir1) + e(dir2))^(a+b); the q-binomial sums appear here.
    """
    f = param.field
    one = ScalarSeries.one(f)
    # DP over powers of (x + y): table[n][(a, b)] = exact scalar coefficient
    tables: list[dict] = [{(0, 0): one}]

    def table(n: int) -> dict:
        while len(tables) <= n:
            prev = tables[-1]
            nxt: dict = {}
            for (a, b), cval in prev.items():
                base = tuple(a * x1 + b * x2 for x1, x2 in zip(dir1, dir2))
                for step, target in ((dir1, (a + 1, b)), (dir2, (a, b + 1))):
                    piece = cval.scale(param.alpha(base, step))
                    cur = nxt.get(target)
                    merged = piece if cur is None else cur + piece
                    if merged.is_zero():
                        nxt.pop(target, None)
                    else:
                        nxt[target] = merged
            tables.append(nxt)
        return tables[n]

    def coeff(y, order):
        a, b = y
        if a < 0 or b < 0:
            return None
        w = table(a + b).get((a, b))
        if w is None:
            return None
        return eq_coefficient(f, a + b, order) * w

    # word coefficients have valuation >= -|alpha_exp(dir1, dir2)| * a * b, so
    # the total 2(a+b)^2 + val(word) dominates the quadratic below
    e12 = abs(param.alpha_exp(dir1, dir2))
    cross = Fraction(4 - e12, 2)
    val = QuadExpr(2, [[2, cross], [cross, 2]], [0, 0], 0)
    return TorusSeries.rule(
        param,
        zero_vec(param.rank),
        [dir1, dir2],
        coeff,
        val,
        cones=(True, True),
        label=label,
    )


# -- Weinstein kernel theta -------------------------------------------------------


def weinstein_param(param: QuantParam) -> QuantParam:
    """The commutative doubled torus T(H + H, 1) carrying theta_W."""
    return QuantParam.trivial(param.field, 2 * param.rank)


def weinstein_theta(param: QuantParam) -> TorusSeries:
    """theta_W = sum alpha(g, h) e(g, h) on T(H + H, 1): formal kind."""
    dbl = weinstein_param(param)
    d = param.rank

    def coeff(y, order):
        g, h = y[:d], y[d:]
        return param.alpha(g, h)

    gens = dbl.lattice.basis()
    return TorusSeries.rule(dbl, zero_vec(2 * d), gens, coeff, None, label="theta_W")


def weinstein_pair_sq(param: QuantParam, k: Vec, j: Vec) -> UnitMonomial:
    """<k, j>^2 for the symmetric pairing with <k,k> = alpha(g,h)."""
    d = param.rank
    g, h = k[:d], k[d:]
    gp, hp = j[:d], j[d:]
    return param.alpha(g, hp) * param.alpha(gp, h)


def weinstein_shift_point(param: QuantParam, k: Vec) -> TorusPoint:
    """x_k with x_k^*(e(j)) = <k, j>^2 e(j)."""
    dbl = weinstein_param(param)
    return TorusPoint(
        tuple(weinstein_pair_sq(param, k, b) for b in dbl.lattice.basis())
    )


def weinstein_norm(param: QuantParam, k: Vec) -> UnitMonomial:
    """<k, k> = alpha(g, h) for k = (g, h)."""
    d = param.rank
    return param.alpha(k[:d], k[d:])


# -- Yang-Baxter ratio --------------------------------------------------------------


def r_series(param: QuantParam, tdir: Vec, zdir: Vec, label="r") -> TorusSeries:
    """r(z, t) = theta_q(t) / (e_q(z t) e_q(z t^-1)) as a proper word."""
    th = theta_series(param, tdir, label=f"{label}.theta")
    plus = eq_inv_series(param, tuple(z + t for z, t in zip(zdir, tdir)), label=f"{label}.inv+")
    minus = eq_inv_series(param, tuple(z - t for z, t in zip(zdir, tdir)), label=f"{label}.inv-")
    return th.mul(plus).mul(minus)


# -- registry -----------------------------------------------------------------------


def builtin_series(name: str, field: CycloField, **params) -> TorusSeries:
    """Construct a registered series by name."""
    if name == "theta_jacobi":
        p = QuantParam.trivial(field, 1)
        return theta_series(p, (1,), label="theta_jacobi")
    if name == "e_q":
        p = QuantParam.trivial(field, 1)
        return eq_series(p, (1,), label="e_q")
    if name == "e_q_inv":
        p = QuantParam.trivial(field, 1)
        return eq_inv_series(p, (1,), label="e_q_inv")
    if name == "theta_on_Tq_u":
        p = QuantParam.standard_tq(field)
        return theta_series(p, (1, 0), label="theta_q(u)")
    if name == "theta_on_Tq_v":
        p = QuantParam.standard_tq(field)
        return theta_series(p, (0, 1), label="theta_q(v)")
    if name == "theta_weinstein":
        p = QuantParam.standard_tq(field)
        return weinstein_theta(p)
    if name == "r_fv":
        p = _yang_baxter_param(field)
        return r_series(p, (1, 0, 0, 0), (0, 0, 1, 0), label="r(z,u)")
    raise UnknownName(f"unknown builtin series {name!r}")


def _yang_baxter_param(field: CycloField) -> QuantParam:
    """Z^4 with the T_q block in the first two coordinates and central z, z'."""
    from .intlinalg import Lattice, mat

    a = [[0] * 4 for _ in range(4)]
    a[0][1], a[1][0] = 2, -2
    z = [[0] * 4 for _ in range(4)]
    return QuantParam(field, Lattice(4), mat(a), mat(z))
