"""Theta multipliers and their theta spaces.

A multiplier is a homomorphism from a free abelian period group B into the
large Heisenberg group, presented by its generator images.  Validation
reduces to finitely many checks: generator images must commute (the
coefficient cocycle), the structure pairing

    <b1, b2> = h-(b2)(x_l(b1)) * alpha(h-(b1), h-(b2))

must be symmetric, and optional square-root data must square to it.  Theta
functions are the invariants of the image; their coefficients satisfy a
unit-monomial recurrence over the cosets of h-(B) in H, which yields exact
dimension counts, canonical bases, and properness certificates when the
valuation of <b, b> grows positive definitely (ampleness).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    CocycleFailure,
    DimensionMismatch,
    IncompatibleForm,
    InfiniteIndex,
    NoLift,
    NoMonomialRoot,
    NonSymmetricPairing,
    NotComposable,
    ParamMismatch,
    SqrtMismatch,
)
from .heisenberg import HeisElement, HeisRaw, TorusMorphism, compose as heis_compose, heis_act
from .intlinalg import (
    INFINITE,
    Lattice,
    LatticeMap,
    QuotientData,
    Vec,
    image_basis,
    is_positive_definite,
    kernel_basis,
    mat_inverse_unimodular,
    mat_vec,
    quotient_data,
    smith_normal_form,
    snf_diagonal,
    solve_integer,
    transpose,
    vec_add,
    vec_neg,
    vec_sub,
    zero_vec,
)
from .quadenum import QuadExpr
from .scalars import INF, UnitMonomial
from .series import LatticeFactor, TorusSeries, series_equal_on_cells
from .torus import QuantParam, TorusPoint


class Multiplier:
    """Homomorphism B = Z^r -> G(H, alpha), stored on generators."""

    def __init__(
        self,
        param: QuantParam,
        images: Sequence[HeisElement],
        sqrt_pairing: Optional[Sequence[Sequence[UnitMonomial]]] = None,
        _validated: bool = False,
    ):
        self.param = param
        self.images = tuple(images)
        self.rank = len(self.images)
        self.B = Lattice(self.rank)
        self.sqrt_pairing = (
            tuple(tuple(row) for row in sqrt_pairing) if sqrt_pairing is not None else None
        )
        self._image_cache: dict[Vec, HeisElement] = {}
        if not _validated:
            self._validate()

    # -- validation ------------------------------------------------------------

    def _validate(self):
        for img in self.images:
            if img.param != self.param:
                raise ParamMismatch("generator image over a different torus")
        r = self.rank
        for i in range(r):
            for j in range(r):
                if self.pairing_on_basis(i, j) != self.pairing_on_basis(j, i):
                    raise NonSymmetricPairing(
                        f"structure pairing not symmetric at ({i}, {j})"
                    )
        for i in range(r):
            for j in range(i + 1, r):
                a, b = self.images[i], self.images[j]
                if a.mul(b) != b.mul(a):
                    raise CocycleFailure(
                        f"generator images {i} and {j} do not commute"
                    )
        if self.sqrt_pairing is not None:
            if len(self.sqrt_pairing) != r or any(len(row) != r for row in self.sqrt_pairing):
                raise DimensionMismatch("sqrt pairing must be r x r")
            for i in range(r):
                for j in range(r):
                    if self.sqrt_pairing[i][j] != self.sqrt_pairing[j][i]:
                        raise SqrtMismatch("sqrt pairing must be symmetric")
                    if self.sqrt_pairing[i][j] ** 2 != self.pairing_on_basis(i, j):
                        raise SqrtMismatch(
                            f"sqrt pairing squared differs from <b_{i}, b_{j}>"
                        )

    # -- generator data ----------------------------------------------------------

    def pairing_on_basis(self, i: int, j: int) -> UnitMonomial:
        # <b_i, b_j> = h-(b_j)(x_l(b_i)) alpha(h-(b_i), h-(b_j))
        gi, gj = self.images[i], self.images[j]
        return gi.x_l.eval(gj.h_l) * self.param.alpha(gi.h_l, gj.h_l)

    def image(self, b: Vec) -> HeisElement:
        b = tuple(b)
        hit = self._image_cache.get(b)
        if hit is not None:
            return hit
        acc = HeisElement.identity(self.param)
        for i, coord in enumerate(b):
            if coord:
                acc = acc.mul(self.images[i] ** coord)
        self._image_cache[b] = acc
        return acc

    @property
    def h_minus_matrix(self):
        """d x r matrix with columns h-(b_i)."""
        d = self.param.rank
        return tuple(tuple(self.images[j].h_l[i] for j in range(self.rank)) for i in range(d))

    def h_minus(self, b: Vec) -> Vec:
        return mat_vec(self.h_minus_matrix, b)

    def h_minus_map(self) -> LatticeMap:
        return LatticeMap(self.h_minus_matrix)

    def x_l(self, b: Vec) -> TorusPoint:
        return self.image(b).x_l

    def x_r(self, b: Vec) -> TorusPoint:
        return self.image(b).x_r

    def c_l(self, b: Vec) -> UnitMonomial:
        return self.image(b).c

    def x_l_generators(self) -> tuple[TorusPoint, ...]:
        return tuple(img.x_l for img in self.images)

    def x_r_generators(self) -> tuple[TorusPoint, ...]:
        return tuple(img.x_r for img in self.images)

    # -- quotient and ampleness -----------------------------------------------------

    def quotient(self) -> QuotientData:
        return quotient_data(self.param.lattice, self.h_minus_map())

    def index(self):
        return self.quotient().index

    def valuation_form(self):
        r = self.rank
        return [
            [self.pairing_on_basis(i, j).uexp for j in range(r)] for i in range(r)
        ]

    def is_ample(self) -> bool:
        if self.index() == INFINITE:
            return False
        return is_positive_definite(self.valuation_form())

    def is_symmetric(self) -> bool:
        """psi_l takes values in +/-1 (equivalently c_{l,b} == c_{l,-b})."""
        af = self.automorphy_factors()
        for v in af.psi_l:
            if not (v.uexp == 0 and (v.coeff * v.coeff).is_one()):
                return False
        return True

    def automorphy_factors(self) -> "AutomorphyFactors":
        if self.sqrt_pairing is None:
            raise SqrtMismatch("automorphy factors need square-root pairing data")
        psi_l = tuple(
            self.images[i].c * self.sqrt_pairing[i][i].inverse() for i in range(self.rank)
        )
        psi_r = tuple(
            self.param.epsilon(self.images[i].h_l) * psi_l[i] for i in range(self.rank)
        )
        return AutomorphyFactors(
            psi_l=psi_l,
            psi_r=psi_r,
            sqrt_pairing=self.sqrt_pairing,
            x_l=self.x_l_generators(),
            x_r=self.x_r_generators(),
            h_l=tuple(img.h_l for img in self.images),
            h_r=tuple(img.h_r for img in self.images),
        )

    def __repr__(self):
        return f"Multiplier(rank={self.rank}, H-rank={self.param.rank})"


@dataclass(frozen=True)
class AutomorphyFactors:
    psi_l: tuple
    psi_r: tuple
    sqrt_pairing: tuple
    x_l: tuple
    x_r: tuple
    h_l: tuple
    h_r: tuple


@dataclass
class ThetaBasis:
    multiplier: Multiplier
    dim: int
    coset_reps: tuple[Vec, ...]
    basis: list  # TorusSeries, one per consistent coset
    inconsistent: list  # (rep, reason) for cosets killed by the recurrence
    window: int
    order: object

    def coefficient_table(self, index: int, radius: Optional[int] = None, order=None):
        radius = self.window if radius is None else radius
        order = self.order if order is None else order
        series = self.basis[index]
        out = {}
        for h in series.window_cells(radius):
            c = series.coeff(h, order)
            if not c.is_zero():
                out[h] = c
        return out


# ---------------------------------------------------------------------------
# construction and operations


def multiplier_new(
    param: QuantParam,
    images: Sequence[HeisElement],
    sqrt_pairing: Optional[Sequence[Sequence[UnitMonomial]]] = None,
) -> Multiplier:
    return Multiplier(param, images, sqrt_pairing)


def structure_pairing(L: Multiplier, b1: Vec, b2: Vec) -> UnitMonomial:
    g1, g2 = L.image(b1), L.image(b2)
    return g1.x_l.eval(g2.h_l) * L.param.alpha(g1.h_l, g2.h_l)


def automorphy_factors(L: Multiplier) -> AutomorphyFactors:
    return L.automorphy_factors()


def is_ample(L: Multiplier) -> bool:
    return L.is_ample()


def _recurrence_factor(L: Multiplier, i: int, h: Vec) -> UnitMonomial:
    """a_{h - h-(e_i)} = a_h * factor(e_i, h), straight from the invariance
    equations."""
    img = L.images[i]
    pair = L.pairing_on_basis(i, i)
    return (
        img.c.inverse()
        * pair
        * img.x_l.eval(h).inverse()
        * L.param.alpha(h, img.h_l)
    )


class _RecurrenceWalker:
    """Coefficients of the basis theta for one coset representative."""

    def __init__(self, L: Multiplier, rep: Vec):
        self.L = L
        self.rep = tuple(rep)
        self.memo: dict[Vec, UnitMonomial] = {zero_vec(L.rank): UnitMonomial.one(L.param.field)}

    def phi(self, b: Vec) -> UnitMonomial:
        b = tuple(b)
        hit = self.memo.get(b)
        if hit is not None:
            return hit
        i = next(k for k, x in enumerate(b) if x)
        e = tuple(1 if k == i else 0 for k in range(len(b)))
        if b[i] > 0:
            prev = vec_sub(b, e)
            h_prev = vec_sub(self.rep, self.L.h_minus(prev))
            out = self.phi(prev) * _recurrence_factor(self.L, i, h_prev)
        else:
            nxt = vec_add(b, e)
            h_here = vec_sub(self.rep, self.L.h_minus(b))
            out = self.phi(nxt) * _recurrence_factor(self.L, i, h_here).inverse()
        self.memo[b] = out
        return out


def theta_dim_basis(L: Multiplier, window: int = 6, order=40) -> ThetaBasis:
    """Dimension and canonical basis of the theta space.

    Basis elements are normalized to coefficient 1 at their canonical coset
    representative; all other coefficients follow the recurrence.  With a
    non-injective h- the recurrence may be overdetermined: offending cosets
    are dropped (the reported dimension shrinks accordingly).
    """
    quot = L.quotient()
    if quot.index == INFINITE:
        raise InfiniteIndex("theta basis needs a finite coset index")
    hm = L.h_minus_matrix
    img_cols = image_basis(hm)  # basis of h-(B) inside H
    s = len(img_cols)
    # preimages of the image basis columns under h-
    pre = []
    for col in img_cols:
        sol = solve_integer(hm, col)
        assert sol is not None
        pre.append(sol[0])
    # kernel consistency data
    kern = kernel_basis(hm)
    inconsistent = []
    consistent_reps = []
    walkers = []
    for rep in quot.coset_reps:
        reason = None
        for k in kern:
            img = L.image(k)
            # [c; x, 0, 0] scales a_h by c*h(x); invariance forces c*h(x) = 1
            # on the whole coset, i.e. constant along image translates too.
            for col in img_cols:
                if not img.x.eval(col).is_one():
                    reason = f"kernel element {k} has non-periodic point part"
                    break
            if reason:
                break
            if not (img.c * img.x.eval(rep)).is_one():
                reason = f"kernel element {k} scales coset {rep} by a nonunit"
                break
        if reason is None:
            consistent_reps.append(rep)
            walkers.append(_RecurrenceWalker(L, rep))
        else:
            inconsistent.append((rep, reason))

    ample = L.is_ample()
    basis = []
    for rep, walker in zip(consistent_reps, walkers):
        val = _valuation_certificate(L, walker, pre, img_cols) if ample else None

        def coeff(y, _order, walker=walker, pre=pre):
            b = zero_vec(L.rank)
            for yk, p in zip(y, pre):
                if yk:
                    b = vec_add(b, tuple(yk * x for x in p))
            return walker.phi(b)

        series = TorusSeries.rule(
            L.param,
            rep,
            [vec_neg(c) for c in img_cols],
            coeff,
            val,
            label=f"theta[{rep}]",
        )
        basis.append(series)
    return ThetaBasis(
        multiplier=L,
        dim=len(basis),
        coset_reps=tuple(consistent_reps),
        basis=basis,
        inconsistent=inconsistent,
        window=window,
        order=order,
    )


def _valuation_certificate(L, walker, pre, img_cols) -> QuadExpr:
    """Exact quadratic model of uexp(phi) in image-lattice coordinates.

    phi is a quadratic character of B (a consequence of the pairing
    structure), so sampling on basis vectors and pairs determines it; the
    model is verified on extra sample points.
    """
    s = len(img_cols)

    def v(z):
        b = zero_vec(L.rank)
        for zk, p in zip(z, pre):
            if zk:
                b = vec_add(b, tuple(zk * x for x in p))
        return Fraction(walker.phi(b).uexp)

    quad = [[Fraction(0)] * s for _ in range(s)]
    lin = [Fraction(0)] * s
    for k in range(s):
        ek = tuple(1 if i == k else 0 for i in range(s))
        mek = tuple(-1 if i == k else 0 for i in range(s))
        quad[k][k] = (v(ek) + v(mek)) / 2
        lin[k] = (v(ek) - v(mek)) / 2
    for k in range(s):
        for l in range(k + 1, s):
            ekl = tuple(1 if i in (k, l) else 0 for i in range(s))
            cross = (v(ekl) - v(tuple(1 if i == k else 0 for i in range(s))) - v(
                tuple(1 if i == l else 0 for i in range(s))
            )) / 2
            quad[k][l] = cross
            quad[l][k] = cross
    model = QuadExpr(s, quad, lin, 0)
    # spot-check the quadratic model
    import random as _random

    rng = _random.Random(12345)
    for _ in range(6):
        z = tuple(rng.randint(-2, 2) for _ in range(s))
        if model.value(z) != v(z):
            raise AssertionError("theta coefficient valuation is not quadratic")
    return model


def theta_membership(L: Multiplier, series: TorusSeries, cells, order) -> bool:
    """Invariance of ``series`` under every generator image, on the cells."""
    for img in L.images:
        acted = heis_act(img, series)
        if not series_equal_on_cells(acted, series, cells, order):
            return False
    return True


# -- operations -----------------------------------------------------------------


def power(L: Multiplier, n: int) -> Multiplier:
    """L^n over the same parameter, via the n-th scaling homomorphism
    applied to the alpha^n-twist of L."""
    p = L.param
    new_images = []
    for img in L.images:
        ah = p.hidden_point(img.h_l)
        new_images.append(
            HeisElement(
                p,
                img.c**n,
                img.x * ah ** (n - 1),
                tuple(n * x for x in img.h_l),
            )
        )
    sqrt = None
    if L.sqrt_pairing is not None:
        sqrt = tuple(
            tuple(L.sqrt_pairing[i][j] ** n for j in range(L.rank)) for i in range(L.rank)
        )
    return Multiplier(p, new_images, sqrt)


def boxtimes(L1: Multiplier, L2: Multiplier) -> Multiplier:
    """External product on the direct-sum torus."""
    p = L1.param.direct_sum(L2.param)
    d1, d2 = L1.param.rank, L2.param.rank
    f = L1.param.field

    def lift1(img: HeisElement) -> HeisElement:
        x = TorusPoint(img.x.values + tuple(UnitMonomial.one(f) for _ in range(d2)))
        return HeisElement(p, img.c, x, img.h_l + zero_vec(d2))

    def lift2(img: HeisElement) -> HeisElement:
        x = TorusPoint(tuple(UnitMonomial.one(f) for _ in range(d1)) + img.x.values)
        return HeisElement(p, img.c, x, zero_vec(d1) + img.h_l)

    images = [lift1(i) for i in L1.images] + [lift2(i) for i in L2.images]
    sqrt = None
    if L1.sqrt_pairing is not None and L2.sqrt_pairing is not None:
        r1, r2 = L1.rank, L2.rank
        one = UnitMonomial.one(f)
        sqrt = []
        for i in range(r1 + r2):
            row = []
            for j in range(r1 + r2):
                if i < r1 and j < r1:
                    row.append(L1.sqrt_pairing[i][j])
                elif i >= r1 and j >= r1:
                    row.append(L2.sqrt_pairing[i - r1][j - r1])
                else:
                    row.append(one)
            sqrt.append(tuple(row))
        sqrt = tuple(sqrt)
    return Multiplier(p, images, sqrt)


def boxtimes_series(a: TorusSeries, b: TorusSeries) -> TorusSeries:
    """External product of functions: coefficient at (h, g) is a_h * b_g."""
    p = a.param.direct_sum(b.param)
    d1, d2 = a.param.rank, b.param.rank

    def lift(series, left: bool):
        out = []
        for fac in series.factors:
            pad = (lambda v: tuple(v) + zero_vec(d2)) if left else (
                lambda v: zero_vec(d1) + tuple(v)
            )
            if fac.is_finite:
                out.append(
                    type(fac)(p, {pad(pt): v for pt, v in fac.table.items()}, fac.label)
                )
            else:
                out.append(
                    LatticeFactor(
                        p,
                        pad(fac.offset),
                        [pad(g) for g in fac.gens],
                        fac.coeff,
                        fac.val,
                        fac.cones,
                        fac.label,
                    )
                )
        return out
    return TorusSeries(p, lift(a, True) + lift(b, False), f"({a.label})box({b.label})")


def pullback(F: TorusMorphism, L: Multiplier, lift_choice: str = "canonical") -> Multiplier:
    """F^*(L): the pulled-back multiplier on the source torus of F^*.

    Generator images [c a_{h}; x', f(h), 0] where x' is the canonical
    monomial solution of phi(x') = x_l (componentwise Smith roots).
    """
    if L.param != F.source_param:
        raise ParamMismatch("multiplier does not live on the morphism's function source")
    if not F.is_characteristic_trivial():
        raise IncompatibleForm("pullback needs multiplicative scalar data")
    if lift_choice != "canonical":
        raise ValueError("only the canonical lift is implemented")
    p2 = F.target_param
    d2 = p2.rank
    fmat = F.f.matrix
    u, dmat, v = smith_normal_form(fmat)
    diag = snf_diagonal(dmat)
    rank = sum(1 for x in diag if x)
    uinv = mat_inverse_unimodular(u)
    uinv_cols = transpose(uinv)
    vt = transpose(v)
    new_images = []
    for img in L.images:
        # solve x'(f(k)) = x_l(k) for all k in H1 (phi is induced by f alone;
        # the scalar data enters the coefficient slot, not the point)
        vals_on_w = []
        for t in range(d2):
            if t < rank and diag[t]:
                k_t = vt[t]  # V column t
                rhs = img.x.eval(k_t)
                try:
                    vals_on_w.append(rhs.nth_root(diag[t]))
                except NoMonomialRoot as exc:
                    raise NoLift(f"no monomial lift for generator image: {exc}")
            else:
                vals_on_w.append(UnitMonomial.one(p2.field))
        # x' on the standard basis: x'(e_j) = prod_t vals[t]^(U[t][j])
        std_vals = []
        for j in range(d2):
            acc = UnitMonomial.one(p2.field)
            for t in range(d2):
                e = u[t][j]
                if e:
                    acc = acc * (vals_on_w[t] ** e)
            std_vals.append(acc)
        xprime = TorusPoint(tuple(std_vals))
        new_images.append(
            HeisElement.from_raw(
                HeisRaw(
                    p2,
                    img.c * F.a_value(img.h_l),
                    xprime,
                    F.f(img.h_l),
                    zero_vec(d2),
                )
            )
        )
    sqrt = None
    if L.sqrt_pairing is not None:
        # the pulled-back pairing equals the original one
        sqrt = L.sqrt_pairing
    return Multiplier(p2, new_images, sqrt)


def compose(L2: Multiplier, L1: Multiplier) -> Multiplier:
    """Pointwise composition b -> L2(b) o L1(b) (right periods of L2 must
    match left periods of L1)."""
    if L2.param != L1.param or L2.rank != L1.rank:
        raise ParamMismatch("composition needs a common torus and period group")
    for i in range(L2.rank):
        if L2.images[i].x_r != L1.images[i].x_l:
            raise NotComposable(L2.images[i].x_r, L1.images[i].x_l, where=f"generator {i}")
    images = [heis_compose(L2.images[i], L1.images[i]) for i in range(L2.rank)]
    sqrt = None
    if L1.sqrt_pairing is not None and L2.sqrt_pairing is not None:
        p = L1.param
        rows = []
        ok = True
        for i in range(L1.rank):
            row = []
            for j in range(L1.rank):
                base = L1.sqrt_pairing[i][j] * L2.sqrt_pairing[i][j]
                if i == j:
                    gamma = p.alpha(L1.images[i].h_l, L2.images[i].h_l)
                else:
                    prod = p.alpha(L1.images[j].h_l, L2.images[i].h_l) * p.alpha(
                        L1.images[i].h_l, L2.images[j].h_l
                    )
                    try:
                        gamma = prod.nth_root(2)
                    except NoMonomialRoot:
                        ok = False
                        break
                row.append(base * gamma)
            if not ok:
                break
            rows.append(tuple(row))
        if ok:
            sqrt = tuple(rows)
            # keep only if it actually squares to the composed pairing
            probe = Multiplier(L1.param, images, None, _validated=True)
            for i in range(L1.rank):
                for j in range(L1.rank):
                    if sqrt[i][j] ** 2 != probe.pairing_on_basis(i, j):
                        sqrt = None
                        break
                if sqrt is None:
                    break
    return Multiplier(L1.param, images, sqrt)


def composed_pairing_formula(L2: Multiplier, L1: Multiplier, b1: Vec, b2: Vec) -> UnitMonomial:
    """The closed-form structure pairing of the composition."""
    p = L1.param
    return (
        structure_pairing(L2, b1, b2)
        * structure_pairing(L1, b1, b2)
        * p.alpha(L1.image(b2).h_l, L2.image(b1).h_l)
        * p.alpha(L1.image(b1).h_l, L2.image(b2).h_l)
    )


def theta_product(
    L2: Multiplier,
    L1: Multiplier,
    th2: TorusSeries,
    th1: TorusSeries,
    window: int,
    order,
) -> TorusSeries:
    """Product th1 * th2 of invariants, a theta for the composition."""
    for i in range(L2.rank):
        if L2.images[i].x_r != L1.images[i].x_l:
            raise NotComposable(L2.images[i].x_r, L1.images[i].x_l, where=f"generator {i}")
    prod = th1.mul(th2)
    return prod.materialize(prod.window_cells(window), order)


def hidden_from_morphism(
    param: QuantParam,
    fmap: LatticeMap,
    chi: Sequence[UnitMonomial],
    hl_map: Optional[LatticeMap] = None,
) -> Multiplier:
    """Multipliers with hidden periods: b -> [chi(b); 1, h_l(b), f(h_l(b))].

    ``fmap`` must be compatible with the squared pairing (the alternating
    form of the data takes values +/-1).
    """
    d = param.rank
    if hl_map is None:
        hl_map = LatticeMap.identity(d)
    r = hl_map.source_rank
    if len(chi) != r:
        raise DimensionMismatch("need one character value per generator")
    basis = [tuple(1 if i == j else 0 for j in range(r)) for i in range(r)]
    hls = [hl_map(b) for b in basis]
    hrs = [fmap(h) for h in hls]
    for i in range(r):
        for j in range(r):
            form = param.alpha(hls[i], hls[j]) * param.alpha(hrs[i], hrs[j]).inverse()
            if form.uexp != 0 or not (form.coeff * form.coeff).is_one():
                raise IncompatibleForm(
                    f"alternating form is not a sign on generators ({i}, {j})"
                )
    images = []
    ident = TorusPoint.identity(param.field, d)
    for i in range(r):
        raw = HeisRaw(param, chi[i], ident, hls[i], hrs[i])
        images.append(HeisElement.from_raw(raw))
    return Multiplier(param, images, None)


def pic_hom(
    xi: Sequence[TorusPoint],
    eta: Sequence[TorusPoint],
    candidates: Sequence[Multiplier],
    ample_only: bool = False,
) -> list[Multiplier]:
    """Multipliers with right period map xi and left period map eta."""
    out = []
    for L in candidates:
        if L.x_r_generators() == tuple(xi) and L.x_l_generators() == tuple(eta):
            if ample_only and not L.is_ample():
                continue
            out.append(L)
    return out
