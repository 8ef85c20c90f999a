"""Small Heisenberg groups: normalizers of multiplier images.

For a multiplier L with finite coset index, the elements [c; xi, gamma, 0]
normalizing the image are cut out by one monomial equation per generator:

    h-(b)(xi) = gamma(x_l(b)) * alpha^2(h-(b), gamma).

Modulo scalars the normalizer is an extension of H/h-(B) by the finite dual
group K of torus points killed on h-(B); the evaluation pairing between the
two is a perfect duality valued in roots of unity.  This module computes the
structure, solves the lifting equations, splits theta spaces into character
lines, computes action matrices on canonical bases, and implements the
doubling-morphism pullback of pairs of thetas.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import (
    DimensionDeficit,
    InfiniteIndex,
    MissingRootsOfUnity,
    NoMonomialRoot,
    NonInjectiveImage,
    NotAmple,
    NotInNormalizer,
    NotSymmetric,
    ParamMismatch,
)
from .heisenberg import HeisRaw, heis_act, heis_mul, mumford_morphism, morphism_pullback
from .intlinalg import (
    INFINITE,
    QuotientData,
    Vec,
    kernel_basis,
    mat_inverse_unimodular,
    smith_normal_form,
    snf_diagonal,
    solve_integer,
    transpose,
    zero_vec,
)
from .multiplier import Multiplier, ThetaBasis, boxtimes, boxtimes_series, pullback, theta_membership
from .scalars import CycloField, CycloRational, ScalarSeries, UnitMonomial
from .series import TorusSeries
from .torus import QuantParam, TorusPoint


@dataclass(frozen=True)
class SmallHeisElement:
    """Left representative [c; xi, gamma, 0] of a normalizer element."""

    c: UnitMonomial
    xi: TorusPoint
    gamma: Vec

    def raw(self, param: QuantParam) -> HeisRaw:
        return HeisRaw(param, self.c, self.xi, tuple(self.gamma), zero_vec(param.rank))


@dataclass
class SmallHeisStructure:
    multiplier: Multiplier
    kappa_generators: tuple[TorusPoint, ...]
    kappa_orders: tuple[int, ...]
    quotient: QuotientData
    duality: dict  # (kappa index tuple, coset index) -> root-of-unity exponent
    torsion_order: int  # exponents are relative to zeta of this order

    def kappa_elements(self):
        """All elements of the finite kernel group, with their index tuples."""
        ranges = [range(o) for o in self.kappa_orders]
        field = self.multiplier.param.field
        d = self.multiplier.param.rank
        for combo in itertools.product(*ranges):
            pt = TorusPoint.identity(field, d)
            for gen, a in zip(self.kappa_generators, combo):
                if a:
                    pt = pt * (gen**a)
            yield combo, pt

    def duality_value(self, kappa_index: tuple, coset_index: int) -> CycloRational:
        e = self.duality[(tuple(kappa_index), coset_index)]
        field = self.multiplier.param.field
        return field.root_of_unity(self.torsion_order) ** e


def _check_injective_image(L: Multiplier):
    """The hypothesis of the normalizer description: L(B) -> T x H injective.

    Some nonzero b has h-(b) = 0 and x_l(b) = 1 iff the u-exponent map of
    x_l vanishes on a nonzero vector of ker(h-): torsion coefficient parts
    always die after raising to the torsion order.
    """
    kern = kernel_basis(L.h_minus_matrix)
    if not kern:
        return
    d = L.param.rank
    uexps = [L.x_l(k).uexp_vector() for k in kern]
    stacked = tuple(tuple(uexps[j][i] for j in range(len(kern))) for i in range(d))
    if kernel_basis(stacked):
        raise NonInjectiveImage(
            "h- kernel carries finite-order period points; the image is not "
            "injective into T(H,1) x H"
        )


def normalizer_membership(
    L: Multiplier, c: UnitMonomial, xi: TorusPoint, gamma: Vec
) -> bool:
    """Evaluate the normalizer equations on all generators of B."""
    _check_injective_image(L)
    p = L.param
    for img in L.images:
        lhs = xi.eval(img.h_l)
        rhs = img.x_l.eval(gamma) * (p.alpha(img.h_l, gamma) ** 2)
        if lhs != rhs:
            return False
    return True


def _smith_data(L: Multiplier):
    hm = L.h_minus_matrix
    u, d, v = smith_normal_form(hm)
    diag = snf_diagonal(d)
    return hm, u, mat_inverse_unimodular(u), v, diag


def kernel_group(L: Multiplier) -> tuple[tuple[TorusPoint, ...], tuple[int, ...]]:
    """Generators and orders of the points killed on h-(B)."""
    quot = L.quotient()
    if quot.index == INFINITE:
        raise InfiniteIndex("kernel group is finite only for finite index")
    hm, u, uinv, v, diag = _smith_data(L)
    field = L.param.field
    d = L.param.rank
    M = field.torsion_order
    gens = []
    orders = []
    for t in range(d):
        dt = diag[t] if t < len(diag) else 0
        if dt > 1:
            if M % dt:
                raise MissingRootsOfUnity(dt)
            z = field.root_of_unity(dt)
            vals = tuple(
                UnitMonomial(z ** (u[t][j] % dt), 0) if u[t][j] % dt else UnitMonomial.one(field)
                for j in range(d)
            )
            gens.append(TorusPoint(vals))
            orders.append(dt)
    return tuple(gens), tuple(orders)


def gamma_lift(L: Multiplier, gamma: Vec, normalize_c: bool = True) -> list[SmallHeisElement]:
    """All solutions xi of the lifting equations for the given gamma.

    The image of xi on h-(B) is uniquely determined; lifts to the full torus
    form a torsor over the kernel group.  c is normalized to 1.
    """
    _check_injective_image(L)
    quot = L.quotient()
    if quot.index == INFINITE:
        raise InfiniteIndex("gamma lifts need a finite coset index")
    p = L.param
    d = p.rank
    field = p.field
    hm, u, uinv, v, diag = _smith_data(L)
    vt = transpose(v)
    # RHS(b) = gamma(x_l(b)) alpha^2(h-(b), gamma) is a homomorphism in b
    kern = kernel_basis(hm)
    for k in kern:
        rhs = L.x_l(k).eval(gamma) * (p.alpha(L.h_minus(k), gamma) ** 2)
        if not rhs.is_one():
            return []  # no solution: equations inconsistent on the kernel
    uinv_cols = transpose(uinv)
    base_vals = []
    for t in range(d):
        dt = diag[t] if t < len(diag) else 0
        if dt == 0:
            raise InfiniteIndex("gamma lifts need a finite coset index")
        b_t = vt[t]  # preimage: h-(V col t) = dt * (Uinv col t)
        rhs = L.x_l(b_t).eval(gamma) * (p.alpha(L.h_minus(b_t), gamma) ** 2)
        try:
            base_vals.append(rhs.nth_root(dt))
        except NoMonomialRoot:
            raise MissingRootsOfUnity(
                dt * field.torsion_order,
                f"lifting needs a {dt}-th root of {rhs!r}",
            )
    # xi on the standard basis: xi(e_j) = prod_t base_vals[t]^(U[t][j])
    def to_point(wvals) -> TorusPoint:
        std = []
        for j in range(d):
            acc = UnitMonomial.one(field)
            for t in range(d):
                e = u[t][j]
                if e:
                    acc = acc * (wvals[t] ** e)
            std.append(acc)
        return TorusPoint(tuple(std))

    base = to_point(base_vals)
    gens, orders = kernel_group(L)
    out = []
    for _, kappa in SmallHeisStructure(
        L, gens, orders, quot, {}, field.torsion_order
    ).kappa_elements():
        out.append(
            SmallHeisElement(UnitMonomial.one(field), base * kappa, tuple(gamma))
        )
    return out


def group_structure(L: Multiplier) -> SmallHeisStructure:
    """Kernel group, coset quotient and the evaluation duality table."""
    _check_injective_image(L)
    quot = L.quotient()
    if quot.index == INFINITE:
        raise InfiniteIndex("small Heisenberg structure needs a finite index")
    gens, orders = kernel_group(L)
    field = L.param.field
    M = field.torsion_order
    zeta = field.root_of_unity(M)
    # discrete-log table of the torsion subgroup
    logs = {}
    acc = field.one()
    for e in range(M):
        logs[acc] = e
        acc = acc * zeta
    duality = {}
    struct = SmallHeisStructure(L, gens, orders, quot, duality, M)
    for kidx, kappa in struct.kappa_elements():
        for ci, rep in enumerate(quot.coset_reps):
            val = kappa.eval(rep)
            if val.uexp != 0 or val.coeff not in logs:
                raise MissingRootsOfUnity(M, "duality value is not a torsion unit")
            duality[(kidx, ci)] = logs[val.coeff]
    # nondegeneracy check
    size = quot.index
    for kidx, _ in struct.kappa_elements():
        if any(kidx) and all(
            duality[(kidx, ci)] == 0 for ci in range(size)
        ):
            raise NonInjectiveImage("duality pairing degenerate on the kernel side")
    for ci in range(size):
        if ci and all(
            duality[(kidx, ci)] == 0 for kidx, _ in struct.kappa_elements()
        ):
            raise NonInjectiveImage("duality pairing degenerate on the coset side")
    return struct


def character_split(L: Multiplier, basis: ThetaBasis) -> dict:
    """Assign each basis theta its coset character under the kernel action.

    Returns {coset rep: tuple of duality exponents per kernel generator}.
    """
    index = L.index()
    if basis.dim < index:
        raise DimensionDeficit(f"dim {basis.dim} < index {index}: no full split")
    struct = group_structure(L)
    out = {}
    for rep in basis.coset_reps:
        ci = struct.quotient.project(rep)
        exps = []
        for gen_i in range(len(struct.kappa_generators)):
            kidx = tuple(
                1 if t == gen_i else 0 for t in range(len(struct.kappa_generators))
            )
            exps.append(struct.duality[(kidx, ci)])
        out[rep] = tuple(exps)
    return out


def act_on_theta(
    L: Multiplier,
    elem: SmallHeisElement,
    basis: ThetaBasis,
    window: int,
    order,
    verify: bool = True,
) -> list[list[ScalarSeries]]:
    """Matrix of the induced action on the canonical theta basis.

    Entry [k][j] is the coefficient of the image of theta_j on theta_k; the
    acted series is re-expanded through its values at the canonical coset
    representatives.
    """
    if not normalizer_membership(L, elem.c, elem.xi, elem.gamma):
        raise NotInNormalizer("element fails the normalizer equations")
    p = L.param
    raw = elem.raw(p)
    n = basis.dim
    field = p.field
    matrix = [[ScalarSeries.zero(field, order) for _ in range(n)] for _ in range(n)]
    acted_list = []
    for j, theta in enumerate(basis.basis):
        acted = heis_act(raw, theta)
        acted_list.append(acted)
        for k, rep in enumerate(basis.coset_reps):
            matrix[k][j] = acted.coeff(rep, order)
    if verify:
        cells = basis.basis[0].window_cells(window)
        for j in range(n):
            for h in cells:
                lhs = acted_list[j].coeff(h, order)
                rhs = ScalarSeries.zero(field, order)
                for k in range(n):
                    if not matrix[k][j].is_zero():
                        rhs = rhs + matrix[k][j] * basis.basis[k].coeff(h, order)
                # entries may have negative valuation; compare at the order
                # both sides actually know
                eff = min(order, lhs.trunc, rhs.trunc)
                if not lhs.equal_to_order(rhs, eff):
                    raise NotInNormalizer(
                        "acted theta does not re-expand in the basis"
                    )
    return matrix


def conjugate_generator(L: Multiplier, elem: SmallHeisElement, i: int) -> HeisRaw:
    """g^-1 L(b_i) g for a normalizer element g: equals L(b_i) exactly."""
    p = L.param
    g = elem.raw(p)
    img = L.images[i].left_raw()
    return heis_mul(heis_mul(g.inverse(), img), g)


def commutant_dimension(mats: Sequence[Sequence[Sequence[ScalarSeries]]], field: CycloField) -> int:
    """Dimension over Q(zeta) of matrices commuting with all given ones.

    Matrix entries must be unit monomials (or zero); commutation is imposed
    coefficientwise per u-exponent, giving an exact linear system for the
    unknown constant matrix.
    """
    n = len(mats[0])
    unknowns = n * n
    rows = []

    def entry_monomial(s: ScalarSeries):
        if s.is_zero():
            return None
        items = list(s.terms.items())
        if len(items) != 1:
            raise ValueError("action matrix entries must be monomials")
        return items[0]  # (uexp, coeff)

    for M in mats:
        mono = [[entry_monomial(M[i][j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                # sum_k T[i][k] M[k][j] - M[i][k] T[k][j] = 0, split by uexp
                by_exp: dict[int, dict[int, CycloRational]] = {}
                for k in range(n):
                    m1 = mono[k][j]
                    if m1 is not None:
                        e, c = m1
                        by_exp.setdefault(e, {}).setdefault(i * n + k, field.zero())
                        by_exp[e][i * n + k] = by_exp[e][i * n + k] + c
                    m2 = mono[i][k]
                    if m2 is not None:
                        e, c = m2
                        by_exp.setdefault(e, {}).setdefault(k * n + j, field.zero())
                        by_exp[e][k * n + j] = by_exp[e][k * n + j] - c
                for e, coeffs in by_exp.items():
                    row = [field.zero()] * unknowns
                    nonzero = False
                    for idx, c in coeffs.items():
                        row[idx] = c
                        nonzero = nonzero or not c.is_zero()
                    if nonzero:
                        rows.append(row)
    # Gaussian elimination over the cyclotomic field
    rank = 0
    ncols = unknowns
    pivot_col = 0
    rows = [r[:] for r in rows]
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if not rows[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return unknowns - rank


def mumford_theta_pullback(
    L: Multiplier,
    th1: TorusSeries,
    th2: TorusSeries,
    window: int,
    order,
    half_param: Optional[QuantParam] = None,
):
    """M^*(th1 box th2) together with its membership report.

    The doubling morphism lives over a square root of L's parameter: the
    default half parameter has A/2 and no sign part; pass ``half_param`` to
    run a twisted variant (coefficient tables are identical by rigidity).
    """
    if not L.is_symmetric():
        raise NotSymmetric("doubling pullback needs a symmetric multiplier")
    if not L.is_ample():
        raise NotAmple("doubling pullback needs an ample multiplier")
    beta = L.param
    if half_param is None:
        if any(x % 2 for row in beta.A for x in row) or any(
            s for row in beta.S for s in row
        ):
            raise ParamMismatch("no canonical half parameter: A must be even, S zero")
        half = QuantParam(
            beta.field,
            beta.lattice,
            tuple(tuple(x // 2 for x in row) for row in beta.A),
            beta.S,
        )
    else:
        half = half_param
        if half.power(2) != beta:
            raise ParamMismatch("half parameter squared must equal the multiplier's")
    M = mumford_morphism(half)
    box_series = boxtimes_series(th1, th2)
    pulled = morphism_pullback(M, box_series)
    pulled_mult = pullback(M, boxtimes(L, L))
    cells = [
        tuple(c)
        for c in itertools.product(range(-window, window + 1), repeat=2 * beta.rank)
    ]
    ok = theta_membership(pulled_mult, pulled, cells, order)
    return pulled, pulled_mult, ok
