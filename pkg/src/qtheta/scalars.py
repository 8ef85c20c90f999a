"""Exact base-field arithmetic.

The coefficient domain for the whole engine is the field of truncated formal
Laurent series in ``u`` (a formal half power of ``q``, so ``q == u**2``) over
a cyclotomic-rational field Q(zeta_m).  Three layers:

* :class:`CycloRational` -- an element of Q[x]/Phi_m(x), coefficients are
  arbitrary-precision rationals, always reduced mod the m-th cyclotomic
  polynomial.
* :class:`UnitMonomial` -- a nonzero scalar times a power of ``u``; the group
  where pairing values, point values and automorphy constants live.
* :class:`ScalarSeries` -- a finite map exponent -> coefficient together
  with a truncation order; exponents above the order are *unknown*, not zero.

Everything is immutable; all arithmetic is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .errors import DivisionByZero, MissingRootsOfUnity, NoMonomialRoot, NotInvertible

INF = math.inf

Rat = Union[int, Fraction]


# ---------------------------------------------------------------------------
# integer polynomial helpers (dense tuples, constant term first)


def _poly_trim(c: list) -> tuple:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod_exact(num, den):
    """Quotient/remainder in Q[x]; ``num``, ``den`` have Fraction coeffs."""
    num = list(num)
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    dlead = den[-1]
    while len(num) >= len(den) and any(num):
        if num[-1] == 0:
            num.pop()
            continue
        shift = len(num) - len(den)
        coef = num[-1] / dlead
        q[shift] = coef
        for i, d in enumerate(den):
            num[shift + i] -= coef * d
        num.pop()
    return _poly_trim(q), _poly_trim(num)


_CYCLO_CACHE: dict[int, tuple] = {}


def cyclotomic_polynomial(m: int) -> tuple:
    """Integer coefficient tuple of Phi_m, constant term first."""
    if m in _CYCLO_CACHE:
        return _CYCLO_CACHE[m]
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    # x^m - 1 divided by Phi_d for all proper divisors d | m.
    num = tuple(Fraction(c) for c in ([-1] + [0] * (m - 1) + [1]))
    for d in range(1, m):
        if m % d == 0:
            phi_d = tuple(Fraction(c) for c in cyclotomic_polynomial(d))
            num, rem = _poly_divmod_exact(num, phi_d)
            assert not rem, "cyclotomic division must be exact"
    result = tuple(int(c) for c in num)
    _CYCLO_CACHE[m] = result
    return result


class CycloField:
    """The field Q(zeta_m), interned per order ``m``.

    ``torsion_order`` is the order of the full group of roots of unity in the
    field: m for even m, 2m for odd m (because -1 is always present).
    """

    _instances: dict[int, "CycloField"] = {}

    def __new__(cls, order: int):
        inst = cls._instances.get(order)
        if inst is None:
            if order < 1:
                raise ValueError("cyclotomic order must be positive")
            inst = super().__new__(cls)
            inst.order = order
            phi = cyclotomic_polynomial(order)
            inst.degree = len(phi) - 1
            inst._phi = phi
            inst._reduction = inst._build_reduction()
            inst._zero = None
            inst._one = None
            cls._instances[order] = inst
        return inst

    def _build_reduction(self):
        # zeta^deg expressed in the power basis; Phi_m is monic, so
        # zeta^deg = -(phi_0 + phi_1 zeta + ...).  Higher powers on demand.
        base = tuple(Fraction(-c) for c in self._phi[:-1])
        return [base]

    def _reduction_row(self, k: int) -> tuple:
        """Power-basis expansion of zeta^(deg + k)."""
        rows = self._reduction
        deg = self.degree
        base = rows[0]
        while len(rows) <= k:
            prev = rows[-1]
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            rows.append(tuple(shifted[i] + top * base[i] for i in range(deg)))
        return rows[k]

    @property
    def torsion_order(self) -> int:
        return self.order if self.order % 2 == 0 else 2 * self.order

    def element(self, coeffs: Iterable[Rat]) -> "CycloRational":
        vec = [Fraction(c) for c in coeffs]
        if len(vec) > self.degree:
            vec = self._reduce(vec)
        else:
            vec += [Fraction(0)] * (self.degree - len(vec))
        return CycloRational(self, tuple(vec))

    def _reduce(self, vec: list) -> list:
        deg = self.degree
        out = list(vec[:deg]) + [Fraction(0)] * max(0, deg - len(vec))
        for k in range(deg, len(vec)):
            c = vec[k]
            if c:
                row = self._reduction_row(k - deg)
                for i in range(deg):
                    out[i] += c * row[i]
        return out

    def zero(self) -> "CycloRational":
        if self._zero is None:
            self._zero = self.element([0])
        return self._zero

    def one(self) -> "CycloRational":
        if self._one is None:
            self._one = self.element([1])
        return self._one

    def from_rational(self, value: Rat) -> "CycloRational":
        return self.element([Fraction(value)])

    def zeta(self, power: int = 1) -> "CycloRational":
        """zeta_m ** power."""
        power %= self.order
        vec = [Fraction(0)] * (power + 1)
        vec[power] = Fraction(1)
        return self.element(vec)

    def root_of_unity(self, k: int) -> "CycloRational":
        """A primitive k-th root of unity, if the field contains one."""
        if k < 1:
            raise ValueError("order must be positive")
        m = self.order
        if m % k == 0:
            return self.zeta(m // k)
        if m % 2 == 1 and (2 * m) % k == 0:
            # zeta_{2m} = -zeta_m^{(m+1)//2} generates the full torsion.
            z2m = -self.zeta((m + 1) // 2)
            return z2m ** (2 * m // k)
        raise MissingRootsOfUnity(k)

    def __repr__(self):
        return f"CycloField({self.order})"


class CycloRational:
    """Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(deg-1)."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: CycloField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs
        self._hash = None

    # -- helpers ----------------------------------------------------------

    def _coerce(self, other) -> "CycloRational":
        if isinstance(other, CycloRational):
            if other.field is not self.field:
                raise ValueError("mixed cyclotomic orders")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_one(self) -> bool:
        return self.coeffs[0] == 1 and all(c == 0 for c in self.coeffs[1:])

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycloRational(
            self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return CycloRational(
            self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CycloRational(self.field, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        deg = self.field.degree
        if deg == 1:
            return CycloRational(self.field, (a[0] * b[0],))
        out = [Fraction(0)] * (2 * deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return CycloRational(self.field, tuple(self.field._reduce(out)))

    __rmul__ = __mul__

    def inverse(self) -> "CycloRational":
        """Extended Euclid in Q[x] modulo Phi_m."""
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return self.field.from_rational(1 / self.coeffs[0])
        phi = tuple(Fraction(c) for c in self.field._phi)
        r0, r1 = phi, _poly_trim(list(self.coeffs))
        s0, s1 = (), (Fraction(1),)
        while r1:
            q, r = _poly_divmod_exact(r0, r1)
            qs1 = _poly_mul(q, s1)
            ln = max(len(s0), len(qs1))
            s = _poly_trim(
                [
                    (s0[i] if i < len(s0) else Fraction(0))
                    - (qs1[i] if i < len(qs1) else Fraction(0))
                    for i in range(ln)
                ]
            )
            r0, r1, s0, s1 = r1, r, s1, s
        # r0 = gcd (a nonzero constant since Phi_m is irreducible over Q)
        if len(r0) != 1:
            raise DivisionByZero("element not invertible mod Phi_m")
        inv_const = 1 / r0[0]
        return self.field.element([c * inv_const for c in s0])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / display ----------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloRational):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.order, self.coeffs))
        return self._hash

    def __repr__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                z = "z" if i == 1 else f"z^{i}"
                parts.append(z if c == 1 else f"{c}*{z}")
        return " + ".join(parts) if parts else "0"


def cyclo_sqrt(a: CycloRational) -> Optional[CycloRational]:
    """A square root of ``a`` inside the same field, or None.

    Handles the cases that actually occur for automorphy data: rational
    squares, and roots of unity whose half-order root is available.
    """
    field = a.field
    if a.is_zero():
        return field.zero()
    if a.is_rational():
        r = a.as_rational()
        if r > 0:
            num, den = r.numerator, r.denominator
            sn, sd = math.isqrt(num), math.isqrt(den)
            if sn * sn == num and sd * sd == den:
                return field.from_rational(Fraction(sn, sd))
        else:
            inner = cyclo_sqrt(field.from_rational(-r))
            if inner is not None:
                try:
                    return field.root_of_unity(4) * inner
                except MissingRootsOfUnity:
                    return None
        # fall through to the root-of-unity scan (e.g. rational zeta powers)
    # scan the torsion subgroup: a == zeta_M^j  =>  sqrt = zeta_M^(j/2) form
    big = field.torsion_order
    try:
        z = field.root_of_unity(big)
    except MissingRootsOfUnity:
        return None
    power = field.one()
    for j in range(big):
        if power == a:
            if j % 2 == 0:
                return z ** (j // 2)
            return z ** ((j + big) // 2) if big % 2 == 0 else None
        power = power * z
    return None


def cyclo_nth_root(a: CycloRational, n: int) -> Optional[CycloRational]:
    """An n-th root of ``a`` in the field, or None (monomial-group cases)."""
    if n == 1:
        return a
    if n == 2:
        return cyclo_sqrt(a)
    field = a.field
    if a.is_zero():
        return field.zero()
    if a.is_rational():
        r = a.as_rational()
        if r > 0 or n % 2 == 1:
            sign = 1 if r > 0 else -1
            num, den = abs(r.numerator), r.denominator
            rn = round(num ** (1.0 / n))
            rd = round(den ** (1.0 / n))
            for cn in (rn - 1, rn, rn + 1):
                for cd in (rd - 1, rd, rd + 1):
                    if cn > 0 and cd > 0 and cn**n == num and cd**n == den:
                        return field.from_rational(Fraction(sign * cn, cd))
    big = field.torsion_order
    try:
        z = field.root_of_unity(big)
    except MissingRootsOfUnity:
        return None
    power = field.one()
    for j in range(big):
        if power == a:
            if j % n == 0:
                return z ** (j // n)
            # solve n*s = j mod big
            g = math.gcd(n, big)
            if j % g == 0:
                s = (j // g) * pow(n // g, -1, big // g) % (big // g)
                return z**s
            return None
        power = power * z
    return None


# ---------------------------------------------------------------------------


class UnitMonomial:
    """A nonzero scalar times u**uexp; closed under product and inverse."""

    __slots__ = ("coeff", "uexp", "_hash")

    def __init__(self, coeff: CycloRational, uexp: int = 0):
        if coeff.is_zero():
            raise DivisionByZero("unit monomial with zero coefficient")
        self.coeff = coeff
        self.uexp = uexp
        self._hash = None

    @classmethod
    def one(cls, field: CycloField) -> "UnitMonomial":
        return cls(field.one(), 0)

    @classmethod
    def q_power(cls, field: CycloField, k: int, sign: int = 1) -> "UnitMonomial":
        c = field.one() if sign >= 0 else -field.one()
        return cls(c, 2 * k)

    @property
    def field(self) -> CycloField:
        return self.coeff.field

    def __mul__(self, other):
        if isinstance(other, UnitMonomial):
            return UnitMonomial(self.coeff * other.coeff, self.uexp + other.uexp)
        if isinstance(other, ScalarSeries):
            return other.scale(self)
        return NotImplemented

    def inverse(self) -> "UnitMonomial":
        return UnitMonomial(self.coeff.inverse(), -self.uexp)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, n: int) -> "UnitMonomial":
        return UnitMonomial(self.coeff**n, self.uexp * n)

    def __neg__(self):
        return UnitMonomial(-self.coeff, self.uexp)

    def nth_root(self, n: int) -> "UnitMonomial":
        if n < 1:
            raise ValueError("root order must be positive")
        if self.uexp % n != 0:
            raise NoMonomialRoot(f"u-exponent {self.uexp} not divisible by {n}")
        root = cyclo_nth_root(self.coeff, n)
        if root is None:
            raise NoMonomialRoot(f"{self.coeff} has no {n}-th root in the field")
        return UnitMonomial(root, self.uexp // n)

    def is_one(self) -> bool:
        return self.uexp == 0 and self.coeff.is_one()

    def valuation(self) -> int:
        return self.uexp

    def to_series(self, trunc=INF) -> "ScalarSeries":
        return ScalarSeries(self.field, {self.uexp: self.coeff}, trunc)

    def __eq__(self, other):
        if not isinstance(other, UnitMonomial):
            return NotImplemented
        return self.uexp == other.uexp and self.coeff == other.coeff

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.uexp, self.coeff))
        return self._hash

    def __repr__(self):
        if self.uexp == 0:
            return repr(self.coeff)
        u = "u" if self.uexp == 1 else f"u^{self.uexp}"
        if self.coeff.is_one():
            return u
        return f"{self.coeff!r}*{u}"


# ---------------------------------------------------------------------------


class ScalarSeries:
    """Truncated Laurent series in u over a cyclotomic field.

    ``terms`` maps exponent -> nonzero coefficient, all exponents <= trunc;
    exponents above ``trunc`` are unknown.  ``trunc`` may be ``math.inf`` for
    exactly-known (finitely supported) series.
    """

    __slots__ = ("field", "terms", "trunc")

    def __init__(self, field: CycloField, terms: Mapping[int, CycloRational], trunc=INF):
        self.field = field
        clean = {}
        for e, c in terms.items():
            if e <= trunc and not c.is_zero():
                clean[e] = c
        self.terms = clean
        self.trunc = trunc

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: CycloField, trunc=INF) -> "ScalarSeries":
        return cls(field, {}, trunc)

    @classmethod
    def one(cls, field: CycloField, trunc=INF) -> "ScalarSeries":
        return cls(field, {0: field.one()}, trunc)

    @classmethod
    def monomial(cls, field: CycloField, uexp: int, coeff=1, trunc=INF) -> "ScalarSeries":
        if isinstance(coeff, (int, Fraction)):
            coeff = field.from_rational(coeff)
        return cls(field, {uexp: coeff}, trunc)

    @classmethod
    def q_power(cls, field: CycloField, k: int, trunc=INF) -> "ScalarSeries":
        return cls.monomial(field, 2 * k, 1, trunc)

    # -- basic queries -------------------------------------------------------

    def is_zero(self) -> bool:
        """True when no known coefficient is nonzero (window-local zero)."""
        return not self.terms

    def valuation(self):
        """Minimal stored exponent, or +inf when all stored terms vanish."""
        return min(self.terms) if self.terms else INF

    def leading(self) -> tuple[int, CycloRational]:
        if not self.terms:
            raise NotInvertible("zero series has no leading term")
        v = min(self.terms)
        return v, self.terms[v]

    def coefficient(self, uexp: int) -> CycloRational:
        return self.terms.get(uexp, self.field.zero())

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ScalarSeries):
            return other
        if isinstance(other, UnitMonomial):
            return other.to_series()
        if isinstance(other, (int, Fraction)):
            return ScalarSeries(self.field, {0: self.field.from_rational(other)})
        if isinstance(other, CycloRational):
            return ScalarSeries(self.field, {0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        trunc = min(self.trunc, other.trunc)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            s = c if cur is None else cur + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return ScalarSeries(self.field, out, trunc)

    __radd__ = __add__

    def __neg__(self):
        return ScalarSeries(self.field, {e: -c for e, c in self.terms.items()}, self.trunc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # validity order: unknown(a)*known(b) enters at > trunc(a)+val(b)
        bound_a = self.trunc + other.valuation()  # inf-safe
        bound_b = other.trunc + self.valuation()
        trunc = min(bound_a, bound_b)
        out: dict[int, CycloRational] = {}
        if self.terms and other.terms:
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = e1 + e2
                    if e > trunc:
                        continue
                    p = c1 * c2
                    cur = out.get(e)
                    s = p if cur is None else cur + p
                    if s.is_zero():
                        out.pop(e, None)
                    else:
                        out[e] = s
        return ScalarSeries(self.field, out, trunc)

    __rmul__ = __mul__

    def scale(self, mono: UnitMonomial) -> "ScalarSeries":
        return ScalarSeries(
            self.field,
            {e + mono.uexp: c * mono.coeff for e, c in self.terms.items()},
            self.trunc + mono.uexp,
        )

    def shift(self, k: int) -> "ScalarSeries":
        return ScalarSeries(
            self.field, {e + k: c for e, c in self.terms.items()}, self.trunc + k
        )

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = ScalarSeries.one(self.field, self.trunc if n == 0 else INF)
        base = self
        first = True
        while n:
            if n & 1:
                result = base if first else result * base
                first = False
            n >>= 1
            if n:
                base = base * base
        return result if not first else ScalarSeries.one(self.field)

    def invert(self) -> "ScalarSeries":
        """Two-sided inverse up to the truncation order.

        Requires an invertible leading coefficient; the result has minimal
        exponent -valuation(self).
        """
        if not self.terms:
            raise NotInvertible("series is zero within its truncation window")
        v, lead = self.leading()
        lead_inv = lead.inverse()
        # normalize: n = self * u^-v / lead has valuation 0 and leading 1
        n_trunc = self.trunc - v
        rest = {e - v: c * lead_inv for e, c in self.terms.items()}
        rest.pop(0)
        if not rest:
            # pure monomial: exact inverse
            return ScalarSeries(self.field, {-v: lead_inv}, INF if self.trunc is INF else n_trunc - v)
        if n_trunc is INF:
            raise NotInvertible(
                "inverse of a non-monomial exact series is an infinite series; "
                "truncate the input first"
            )
        # standard long-division recurrence for 1/(1 + rest)
        coeffs = {0: self.field.one()}
        for k in range(1, int(n_trunc) + 1):
            acc = self.field.zero()
            for e, c in rest.items():
                if 0 < e <= k:
                    prev = coeffs.get(k - e)
                    if prev is not None:
                        acc = acc + c * prev
            if not acc.is_zero():
                coeffs[k] = -acc
        return ScalarSeries(
            self.field,
            {e - v: c * lead_inv for e, c in coeffs.items()},
            n_trunc - v,
        )

    def truncate(self, order) -> "ScalarSeries":
        new_trunc = min(self.trunc, order)
        return ScalarSeries(
            self.field, {e: c for e, c in self.terms.items() if e <= new_trunc}, new_trunc
        )

    # -- comparison ----------------------------------------------------------

    def equal_to_order(self, other: "ScalarSeries", order) -> bool:
        """Coefficientwise equality for all exponents <= order.

        Both operands must actually know their coefficients that far.
        """
        if self.trunc < order or other.trunc < order:
            raise NotInvertible(
                f"cannot compare to order {order}: known only to "
                f"{min(self.trunc, other.trunc)}"
            )
        for e in set(self.terms) | set(other.terms):
            if e <= order and self.coefficient(e) != other.coefficient(e):
                return False
        return True

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.trunc == other.trunc and self.terms == other.terms

    def __hash__(self):
        return hash((self.trunc, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e in sorted(self.terms):
                c = self.terms[e]
                if e == 0:
                    parts.append(repr(c))
                else:
                    un = "u" if e == 1 else f"u^{e}"
                    parts.append(un if c.is_one() else f"{c!r}*{un}")
            body = " + ".join(parts)
        if self.trunc is INF:
            return body
        return f"{body} + O(u^{int(self.trunc) + 1})"


# ---------------------------------------------------------------------------
# functional wrappers


def cyclo_arith(op: str, a: CycloRational, b: Optional[CycloRational] = None) -> CycloRational:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def series_arith(op: str, a: ScalarSeries, b: Optional[ScalarSeries] = None) -> ScalarSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


def series_invert(a: ScalarSeries) -> ScalarSeries:
    return a.invert()


def valuation(a: ScalarSeries):
    return a.valuation()


# -- JSON serialization ------------------------------------------------------


def series_to_json(s: ScalarSeries) -> dict:
    return {
        "m": s.field.order,
        "N": None if s.trunc is INF else int(s.trunc),
        "terms": [
            [e, [str(c) for c in s.terms[e].coeffs]] for e in sorted(s.terms)
        ],
    }


def series_from_json(data: dict) -> ScalarSeries:
    field = CycloField(data["m"])
    trunc = INF if data.get("N") is None else data["N"]
    terms = {}
    for e, coeffs in data["terms"]:
        terms[int(e)] = field.element([Fraction(c) for c in coeffs])
    return ScalarSeries(field, terms, trunc)


def monomial_to_json(u: UnitMonomial) -> dict:
    return {"coeff": [str(c) for c in u.coeff.coeffs], "uexp": u.uexp, "m": u.field.order}


def monomial_from_json(data: dict) -> UnitMonomial:
    field = CycloField(data["m"])
    return UnitMonomial(field.element([Fraction(c) for c in data["coeff"]]), data["uexp"])
