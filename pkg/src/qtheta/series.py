"""Formal functions on a quantum torus, with exact truncated products.

A :class:`TorusSeries` is a *word* of factors, each factor a formal function
with known support structure:

* :class:`FiniteFactor` -- finitely many exponents with explicit scalar
  coefficients (the "algebraic" building block);
* :class:`LatticeFactor` -- coefficients given by a rule on an affine family
  ``offset + sum_i y_i gen_i`` of lattice points, together with an exact
  quadratic lower bound for the u-adic valuation of the coefficient at the
  parameter ``y`` (the properness certificate) and optional cone constraints
  ``y_i >= 0``.

The product of two series is word concatenation (cost O(1)); all the work
happens when a coefficient is requested: the engine solves the affine
support equations, assembles the exact valuation bound

    T(y) = sum of factor valuations + pairwise alpha exponents,

and enumerates { y : T(y) <= order } with :mod:`qtheta.quadenum`.  Every
dropped term provably lies above the truncation order, so coefficients are
exact to the requested order -- the sum is "restricted by the enumerators to
finitely many terms".

Kinds: *algebraic* (all factors finite), *proper* (all lattice factors carry
valuation certificates), *formal* (some factor is window-only; products are
refused, but single Heisenberg actions still evaluate cell by cell).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import NotMultipliable, ParamMismatch
from .intlinalg import (
    Vec,
    smith_normal_form,
    snf_diagonal,
    transpose,
    vec_add,
    vec_sub,
    zero_vec,
)
from .quadenum import QuadExpr, enumerate_sublevel
from .scalars import INF, ScalarSeries, UnitMonomial
from .torus import QuantParam, TorusPoint

Scalar = Union[UnitMonomial, ScalarSeries]

ALGEBRAIC = "algebraic"
PROPER = "proper"
FORMAL = "formal"


def _scalar_val(x: Scalar):
    return x.valuation()


def _scalar_mul(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, UnitMonomial) and isinstance(b, UnitMonomial):
        return a * b
    if isinstance(a, UnitMonomial):
        return b.scale(a)
    if isinstance(b, UnitMonomial):
        return a.scale(b)
    return a * b


def _as_series(x: Scalar, field) -> ScalarSeries:
    return x.to_series() if isinstance(x, UnitMonomial) else x


class FiniteFactor:
    """Finitely supported factor: explicit exponent -> coefficient table."""

    __slots__ = ("param", "table", "label")

    def __init__(self, param: QuantParam, table: dict, label: str = ""):
        self.param = param
        self.table = {tuple(k): v for k, v in table.items()}
        self.label = label or "finite"

    @property
    def is_finite(self) -> bool:
        return True

    def items(self):
        return self.table.items()

    def transform_values(self, fn: Callable[[Vec, Scalar], Scalar], label=None) -> "FiniteFactor":
        return FiniteFactor(
            self.param,
            {p: fn(p, v) for p, v in self.table.items()},
            label if label is not None else self.label,
        )

    def map_points(self, point_fn, value_fn, new_param, label=None) -> "FiniteFactor":
        return FiniteFactor(
            new_param,
            {tuple(point_fn(p)): value_fn(p, v) for p, v in self.table.items()},
            label if label is not None else self.label,
        )

    def __repr__(self):
        return f"FiniteFactor({self.label}, {len(self.table)} pts)"


class LatticeFactor:
    """Rule-defined factor on an affine family of lattice points.

    ``coeff(y, order)`` returns the coefficient at ``offset + sum y_i gens_i``
    exact to the given order (or exactly); ``val`` is a QuadExpr lower bound
    for its valuation, valid wherever the coefficient is nonzero.  ``None``
    marks a window-only (formal) factor.
    """

    __slots__ = ("param", "offset", "gens", "coeff", "val", "cones", "label", "_memo")

    def __init__(
        self,
        param: QuantParam,
        offset: Vec,
        gens: Sequence[Vec],
        coeff: Callable[[tuple, object], Optional[Scalar]],
        val: Optional[QuadExpr],
        cones: Sequence[bool] = (),
        label: str = "",
    ):
        self.param = param
        self.offset = tuple(offset)
        self.gens = tuple(tuple(g) for g in gens)
        self.coeff = coeff
        self.val = val
        self.cones = tuple(cones) if cones else (False,) * len(self.gens)
        self.label = label or "lattice"
        self._memo: dict = {}

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def nparams(self) -> int:
        return len(self.gens)

    def point(self, y: Sequence[int]) -> Vec:
        p = list(self.offset)
        for yi, g in zip(y, self.gens):
            if yi:
                for k in range(len(p)):
                    p[k] += yi * g[k]
        return tuple(p)

    def coeff_at(self, y: tuple, order) -> Optional[Scalar]:
        key = (y, order)
        hit = self._memo.get(key)
        if hit is None and key not in self._memo:
            hit = self.coeff(y, order)
            self._memo[key] = hit
        return hit

    def wrap(self, coeff_fn, val, label=None, cones=None) -> "LatticeFactor":
        return LatticeFactor(
            self.param,
            self.offset,
            self.gens,
            coeff_fn,
            val,
            self.cones if cones is None else cones,
            label if label is not None else self.label,
        )

    def __repr__(self):
        return f"LatticeFactor({self.label}, params={self.nparams})"


Factor = Union[FiniteFactor, LatticeFactor]


class _SubstEngine:
    """Substitutes y = y0 + K z into a fixed quadratic bound cheaply."""

    __slots__ = ("T", "kernel", "quad_z", "QK", "LK", "ineq_rows")

    def __init__(self, T: QuadExpr, ineqs, kernel):
        self.T = T
        self.kernel = kernel
        n = T.n
        r = len(kernel)
        self.QK = [
            tuple(sum(T.quad[i][j] * col[j] for j in range(n)) for i in range(n))
            for col in kernel
        ]
        self.LK = [sum(T.lin[i] * col[i] for i in range(n)) for col in kernel]
        self.quad_z = [
            [sum(kernel[a][i] * self.QK[b][i] for i in range(n)) for b in range(r)]
            for a in range(r)
        ]
        self.ineq_rows = [
            (
                tuple(sum(row[i] * col[i] for i in range(n)) for col in kernel),
                row,
                c,
            )
            for row, c in ineqs
        ]

    def at_offset(self, y0):
        T = self.T
        n = T.n
        r = len(self.kernel)
        lin = [
            2 * sum(y0[i] * self.QK[j][i] for i in range(n)) + self.LK[j]
            for j in range(r)
        ]
        const = (
            sum(y0[i] * sum(T.quad[i][j] * y0[j] for j in range(n)) for i in range(n))
            + sum(T.lin[i] * y0[i] for i in range(n))
            + T.const
        )
        Tz = QuadExpr(r, self.quad_z, lin, const)
        zin = [
            (coeffs, c + sum(row[i] * y0[i] for i in range(len(row))))
            for coeffs, row, c in self.ineq_rows
        ]
        return Tz, zin


class TorusSeries:
    """A formal function represented as an ordered product of factors."""

    def __init__(self, param: QuantParam, factors: Sequence[Factor], label: str = ""):
        self.param = param
        for f in factors:
            if f.param != param:
                raise ParamMismatch("factor parameter mismatch")
        self.factors = tuple(factors)
        self.label = label
        self._cache: dict = {}
        self._solver = None
        self._combo_cache: dict = {}

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_dict(cls, param: QuantParam, table: dict, label: str = "") -> "TorusSeries":
        return cls(param, [FiniteFactor(param, table, label)], label)

    @classmethod
    def exponent(cls, param: QuantParam, h: Vec, scalar: Optional[Scalar] = None) -> "TorusSeries":
        """c * e(h) as a series."""
        c = scalar if scalar is not None else UnitMonomial.one(param.field)
        return cls.from_dict(param, {tuple(h): c}, label=f"e{tuple(h)}")

    @classmethod
    def constant(cls, param: QuantParam, scalar: Scalar) -> "TorusSeries":
        return cls.from_dict(param, {zero_vec(param.rank): scalar}, label="const")

    @classmethod
    def one(cls, param: QuantParam) -> "TorusSeries":
        return cls.constant(param, UnitMonomial.one(param.field))

    @classmethod
    def rule(
        cls,
        param: QuantParam,
        offset: Vec,
        gens: Sequence[Vec],
        coeff: Callable,
        val: Optional[QuadExpr],
        cones: Sequence[bool] = (),
        label: str = "",
    ) -> "TorusSeries":
        return cls(param, [LatticeFactor(param, offset, gens, coeff, val, cones, label)], label)

    # -- structure -----------------------------------------------------------

    @property
    def kind(self) -> str:
        lattice = [f for f in self.factors if not f.is_finite]
        if not lattice:
            return ALGEBRAIC
        if all(f.val is not None for f in lattice):
            return PROPER
        return FORMAL

    def is_multipliable(self) -> bool:
        return self.kind in (ALGEBRAIC, PROPER)

    def mul(self, other: "TorusSeries") -> "TorusSeries":
        """Noncommutative product: word concatenation, evaluated lazily."""
        if self.param != other.param:
            raise ParamMismatch("product over different quantum tori")
        if not (self.is_multipliable() and other.is_multipliable()):
            raise NotMultipliable(
                "formal-kind series admit only single Heisenberg actions"
            )
        return TorusSeries(
            self.param, self.factors + other.factors, f"({self.label})*({other.label})"
        )

    def _mul_unchecked(self, other: "TorusSeries") -> "TorusSeries":
        return TorusSeries(
            self.param, self.factors + other.factors, f"({self.label})*({other.label})"
        )

    def scaled(self, scalar: Scalar) -> "TorusSeries":
        front = FiniteFactor(self.param, {zero_vec(self.param.rank): scalar}, "scale")
        return TorusSeries(self.param, (front,) + self.factors, self.label)

    def shift_pullback(self, x: TorusPoint) -> "TorusSeries":
        """x^*: coefficient at h becomes h(x) * a_h; kind preserved."""
        if x.rank != self.param.rank:
            raise ParamMismatch("point rank mismatch")
        new = []
        w = x.uexp_vector()
        for f in self.factors:
            if f.is_finite:
                new.append(
                    f.transform_values(lambda p, v: _scalar_mul(x.eval(p), v))
                )
            else:
                fac: LatticeFactor = f

                def mk(fac=fac):
                    def cf(y, order):
                        c = fac.coeff_at(y, order)
                        if c is None:
                            return None
                        return _scalar_mul(x.eval(fac.point(y)), c)

                    return cf

                val = fac.val
                if val is not None:
                    # valuation shifts by uexp(p(y)(x)) = w.offset + (M^T w).y
                    k = fac.nparams
                    lin = list(val.lin)
                    for i, g in enumerate(fac.gens):
                        lin[i] += Fraction(sum(wc * gc for wc, gc in zip(w, g)))
                    const = val.const + Fraction(sum(wc * tc for wc, tc in zip(w, fac.offset)))
                    val = QuadExpr(k, val.quad, lin, const)
                new.append(fac.wrap(mk(), val, label=f"{fac.label}^shift"))
        return TorusSeries(self.param, new, f"shift({self.label})")

    # -- coefficient engine ---------------------------------------------------

    def _lattice_solver(self):
        """Cached SNF factorization of the concatenated generator matrix."""
        if self._solver is None:
            lat = [f for f in self.factors if not f.is_finite]
            cols = []
            for f in lat:
                cols.extend(f.gens)
            d = self.param.rank
            mtx = tuple(tuple(c[i] for c in cols) for i in range(d))  # d x k
            if cols and d > 0:
                u, dd, v = smith_normal_form(mtx)
                diag = snf_diagonal(dd)
                rank = sum(1 for x in diag if x)
                vt = transpose(v)
                kernel = [vt[j] for j in range(rank, len(cols))]
                self._solver = (lat, mtx, u, diag, v, kernel)
            elif cols:
                # rank-0 torus: every parameter direction is unconstrained
                from .intlinalg import identity

                ident = identity(len(cols))
                self._solver = (lat, mtx, (), [], ident, list(ident))
            else:
                self._solver = (lat, mtx, None, None, None, [])
        return self._solver

    def coeff(self, h: Vec, order, _slack=0) -> ScalarSeries:
        """Coefficient at e(h), exact up to u-exponent ``order``."""
        h = tuple(h)
        key = (h, order, _slack)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out = self._coeff_impl(h, order, _slack)
        self._cache[key] = out
        return out

    def _coeff_impl(self, h: Vec, order, slack) -> ScalarSeries:
        field = self.param.field
        total = ScalarSeries.zero(field, order)
        lat, mtx, u, diag, v, kernel = self._lattice_solver()
        word = list(self.factors)
        fin_pos = [i for i, f in enumerate(word) if f.is_finite]
        lat_pos = [i for i, f in enumerate(word) if not f.is_finite]
        kcols = len(kernel)

        for combo in itertools.product(*[list(word[i].items()) for i in fin_pos]):
            chosen = dict(zip(fin_pos, combo))  # word index -> (point, value)
            residual = h
            for p, _vv in combo:
                residual = vec_sub(residual, p)
            if not lat:
                if any(residual):
                    continue
                term = self._combine_term(word, chosen, {}, order)
                if term is not None:
                    total = total + term
                continue
            for f in lat:
                residual = vec_sub(residual, f.offset)
            particular = self._solve(mtx, u, diag, v, residual)
            if particular is None:
                continue
            if kcols == 0:
                ys = [particular]
            else:
                if order == INF:
                    raise NotMultipliable(
                        "infinite-order product coefficient needs a finite order"
                    )
                engine = self._combo_engine(word, chosen, lat_pos, kernel, combo)
                if engine is None:
                    raise NotMultipliable(
                        "window-only factor inside a product that needs enumeration"
                    )
                Tz, zin = engine.at_offset(particular)
                pts = enumerate_sublevel(Tz, order + slack, ineqs=zin)
                ys = [
                    tuple(
                        particular[i] + sum(z[j] * kernel[j][i] for j in range(kcols))
                        for i in range(len(particular))
                    )
                    for z in pts
                ]
            for y in ys:
                # split y into per-position blocks, check cones
                blocks = {}
                pos = 0
                ok = True
                for wi in lat_pos:
                    f = word[wi]
                    blk = y[pos : pos + f.nparams]
                    pos += f.nparams
                    for flag, yi in zip(f.cones, blk):
                        if flag and yi < 0:
                            ok = False
                            break
                    if not ok:
                        break
                    blocks[wi] = blk
                if not ok:
                    continue
                term = self._combine_term(word, chosen, blocks, order)
                if term is not None:
                    total = total + term
        return total.truncate(order)

    def _combo_engine(self, word, chosen, lat_pos, kernel, combo):
        """Cached bound assembly + kernel substitution for one finite combo.

        The full-parameter bound is independent of the target cell; only the
        particular solution moves, contributing linear and constant terms.
        """
        key = tuple(p for p, _v in combo)
        engine = self._combo_cache.get(key)
        if engine is None and key not in self._combo_cache:
            T, ineqs = self._assemble_bound(word, chosen, lat_pos)
            engine = None if T is None else _SubstEngine(T, ineqs, kernel)
            self._combo_cache[key] = engine
        return engine

    @staticmethod
    def _solve(mtx, u, diag, v, target):
        from .intlinalg import mat_vec

        w = mat_vec(u, target)
        cols = len(v) if v else 0
        z = [0] * cols
        for i in range(len(w)):
            di = diag[i] if i < len(diag) else 0
            if di:
                if w[i] % di:
                    return None
                z[i] = w[i] // di
            elif w[i]:
                return None
        return mat_vec(v, tuple(z))

    def _assemble_bound(self, word, chosen, lat_pos):
        """Exact valuation bound T(y) over the concatenated parameter space.

        T = sum of factor-value valuations (exact for finite ones, certified
        for lattice ones) + sum of pairwise alpha exponents of the ordered
        word.  Returns (QuadExpr, cone inequalities) or (None, None) when a
        lattice factor lacks a certificate.
        """
        A = self.param.A
        k_total = sum(word[i].nparams for i in lat_pos)
        offs = {}
        pos = 0
        for wi in lat_pos:
            offs[wi] = pos
            pos += word[wi].nparams
        Q = [[Fraction(0)] * k_total for _ in range(k_total)]
        L = [Fraction(0)] * k_total
        C = Fraction(0)
        for wi in lat_pos:
            f = word[wi]
            if f.val is None:
                return None, None
            base = offs[wi]
            for i in range(f.nparams):
                L[base + i] += f.val.lin[i]
                for j in range(f.nparams):
                    Q[base + i][base + j] += f.val.quad[i][j]
            C += f.val.const
        for _wi, (p, val) in chosen.items():
            vv = _scalar_val(val)
            if vv == INF:
                return QuadExpr(k_total, Q, L, Fraction(10**9)), []
            C += Fraction(vv)

        # pairwise alpha exponents over the word
        def point_data(wi):
            """(const vector, columns, param offset) of the factor's point."""
            f = word[wi]
            if f.is_finite:
                return chosen[wi][0], (), None
            return f.offset, f.gens, offs[wi]

        d = self.param.rank
        n_word = len(word)
        for i in range(n_word):
            ti, gi, oi = point_data(i)
            for j in range(i + 1, n_word):
                tj, gj, oj = point_data(j)
                # exp = (ti + Gi yi)^T A (tj + Gj yj)
                C += Fraction(
                    sum(ti[a] * A[a][b] * tj[b] for a in range(d) for b in range(d))
                )
                if oj is not None:
                    for jj, col in enumerate(gj):
                        L[oj + jj] += Fraction(
                            sum(ti[a] * A[a][b] * col[b] for a in range(d) for b in range(d))
                        )
                if oi is not None:
                    for ii, col in enumerate(gi):
                        L[oi + ii] += Fraction(
                            sum(col[a] * A[a][b] * tj[b] for a in range(d) for b in range(d))
                        )
                if oi is not None and oj is not None:
                    for ii, ci in enumerate(gi):
                        for jj, cj in enumerate(gj):
                            cross = Fraction(
                                sum(ci[a] * A[a][b] * cj[b] for a in range(d) for b in range(d))
                            )
                            if cross:
                                Q[oi + ii][oj + jj] += cross / 2
                                Q[oj + jj][oi + ii] += cross / 2
        ineqs = []
        for wi in lat_pos:
            base = offs[wi]
            for i, flag in enumerate(word[wi].cones):
                if flag:
                    row = [0] * k_total
                    row[base + i] = 1
                    ineqs.append((tuple(row), 0))
        return QuadExpr(k_total, Q, L, C), ineqs

    def _combine_term(self, word, chosen, blocks, order) -> Optional[ScalarSeries]:
        """Exact value of one decomposition term, truncated at ``order``."""
        param = self.param
        field = param.field
        # factor points and value lower bounds
        pts = []
        vals = []
        lbs = []
        for wi, f in enumerate(word):
            if f.is_finite:
                p, vv = chosen[wi]
                pts.append(p)
                vals.append(vv)
                lbs.append(_scalar_val(vv))
            else:
                y = blocks[wi]
                pts.append(f.point(y))
                vals.append(("lat", f, y))
                lbs.append(f.val.value(y) if f.val is not None else 0)
        # exact alpha monomial of the ordered word
        aexp = 0
        asign = 0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                aexp += param.alpha_exp(pts[i], pts[j])
                asign ^= param.alpha_sign(pts[i], pts[j])
        acc: Optional[Scalar] = UnitMonomial(
            -field.one() if asign else field.one(), aexp
        )
        total_lb = aexp + sum(lb for lb in lbs if lb != INF)
        for idx, v in enumerate(vals):
            if isinstance(v, tuple) and v and v[0] == "lat":
                _, f, y = v
                own = lbs[idx] if lbs[idx] != INF else 0
                need = order - (total_lb - own)
                c = f.coeff_at(y, need)
                if c is None:
                    return None
                v = c
            if isinstance(v, ScalarSeries) and v.is_zero() and v.trunc == INF:
                return None
            acc = _scalar_mul(acc, v)
        return _as_series(acc, field).truncate(order)

    # -- materialization and comparison ---------------------------------------

    def window_cells(self, radius: int) -> list[Vec]:
        d = self.param.rank
        rng = range(-radius, radius + 1)
        return [tuple(c) for c in itertools.product(rng, repeat=d)]

    def materialize(self, cells: Iterable[Vec], order) -> "TorusSeries":
        table = {}
        for h in cells:
            c = self.coeff(h, order)
            if not c.is_zero():
                table[tuple(h)] = c
        return TorusSeries.from_dict(self.param, table, label=f"window({self.label})")

    def window_dump(self, radius: int, order) -> dict:
        from .scalars import series_to_json

        coeffs = []
        for h in self.window_cells(radius):
            c = self.coeff(h, order)
            if not c.is_zero():
                coeffs.append([list(h), series_to_json(c)])
        return {
            "lattice": self.param.rank,
            "window": radius,
            "order": None if order is INF else int(order),
            "coeffs": coeffs,
        }

    def support_points(self) -> Optional[list[Vec]]:
        """Exact support candidates for algebraic series, else None."""
        if self.kind != ALGEBRAIC:
            return None
        pts = {zero_vec(self.param.rank)}
        for f in self.factors:
            pts = {vec_add(p, q) for p in pts for q in f.table.keys()}
        return sorted(pts)


# ---------------------------------------------------------------------------
# functional wrappers


def shift_pullback(x: TorusPoint, f: TorusSeries) -> TorusSeries:
    """x^*(f): coefficient at h becomes h(x) a_h."""
    return f.shift_pullback(x)


def torus_series_mul(f: TorusSeries, g: TorusSeries, window: int, order) -> TorusSeries:
    """Product materialized on the centered box of the given radius."""
    prod = f.mul(g)
    return prod.materialize(prod.window_cells(window), order)


def series_equal_on_cells(a: TorusSeries, b: TorusSeries, cells: Iterable[Vec], order) -> bool:
    for h in cells:
        if not a.coeff(h, order).equal_to_order(b.coeff(h, order), order):
            return False
    return True


def series_equal(a: TorusSeries, b: TorusSeries, window: int, order) -> bool:
    return series_equal_on_cells(a, b, a.window_cells(window), order)


def conjugation_check(param: QuantParam, h: Vec, f: TorusSeries) -> bool:
    """e(h) f e(h)^-1 == (A_h^-2)^* f, checked exactly on f's support."""
    if f.kind != ALGEBRAIC:
        raise NotMultipliable("conjugation_check requires an algebraic operand")
    left = TorusSeries.exponent(param, h)
    right = TorusSeries.exponent(
        param, tuple(-x for x in h), scalar=param.epsilon(h)
    )  # e(h)^-1 = eps(h) e(-h)
    conj = left.mul(f).mul(right)
    other = f.shift_pullback(param.hidden_point(h).inverse() ** 2)
    support = set(f.support_points()) | set(other.support_points())
    return series_equal_on_cells(conj, other, support, INF)
