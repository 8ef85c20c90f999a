"""Integer lattice algebra.

Vectors are int tuples, matrices are tuples of row tuples.  Provides Smith
normal form with unimodular transforms, finite quotient data with canonical
coset representatives, exact rational definiteness tests, and integer linear
solving (particular solution + kernel basis) -- the workhorses behind coset
indices, theta bases and support intersection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DimensionMismatch, NotSymmetric

Vec = tuple[int, ...]
Mat = tuple[tuple[int, ...], ...]


# ---------------------------------------------------------------------------
# basic matrix/vector helpers


def vec(*entries: int) -> Vec:
    return tuple(int(e) for e in entries)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def vec_scale(a: Vec, k: int) -> Vec:
    return tuple(k * x for x in a)


def zero_vec(n: int) -> Vec:
    return (0,) * n


def mat(rows: Sequence[Sequence[int]]) -> Mat:
    return tuple(tuple(int(x) for x in r) for r in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(n: int, m: int) -> Mat:
    return tuple((0,) * m for _ in range(n))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def mat_vec(m: Mat, v: Vec) -> Vec:
    if m and len(m[0]) != len(v):
        raise DimensionMismatch(f"{len(m[0])}-column matrix applied to {len(v)}-vector")
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    if a and b and len(a[0]) != len(b):
        raise DimensionMismatch("matrix product shape mismatch")
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def bilinear_eval(q: Mat, g: Vec, h: Vec) -> int:
    """g^T Q h with exact integers."""
    if len(q) != len(g) or (q and len(q[0]) != len(h)):
        raise DimensionMismatch("bilinear form dimension mismatch")
    return sum(g[i] * q[i][j] * h[j] for i in range(len(g)) for j in range(len(h)))


def det(m: Mat) -> int:
    """Integer determinant (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def frac_det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(m)
    if n == 0:
        return Fraction(1)
    a = [[Fraction(x) for x in r] for r in m]
    sign = 1
    for k in range(n):
        piv = None
        for i in range(k, n):
            if a[i][k] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    out = Fraction(sign)
    for k in range(n):
        out *= a[k][k]
    return out


def mat_inverse_unimodular(m: Mat) -> Mat:
    """Exact inverse of an integer matrix with det +/-1."""
    n = len(m)
    a = [[Fraction(x) for x in r] + [Fraction(1 if i == j else 0) for j in range(n)] for i, r in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        pv = a[k][k]
        a[k] = [x / pv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    inv = []
    for i in range(n):
        row = []
        for j in range(n, 2 * n):
            x = a[i][j]
            if x.denominator != 1:
                raise ValueError("matrix inverse is not integral")
            row.append(int(x))
        inv.append(tuple(row))
    return tuple(inv)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: Mat) -> tuple[Mat, Mat, Mat]:
    """Return (U, D, V) with U*M*V = D diagonal, d_i | d_{i+1}, U,V unimodular."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [list(r) for r in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def row_op(i, j, k):  # row_i += k*row_j
        a[i] = [x + k * y for x, y in zip(a[i], a[j])]
        u[i] = [x + k * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, k):  # col_i += k*col_j
        for r in a:
            r[i] += k * r[j]
        for r in v:
            r[i] += k * r[j]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # find pivot: smallest |entry| in the remaining block
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best, piv = x, (i, j)
        if piv is None:
            break
        pi, pj = piv
        row_swap(t, pi)
        col_swap(t, pj)
        if a[t][t] < 0:
            row_negate(t)
        # clear row and column t
        dirty = False
        for i in range(t + 1, rows):
            if a[i][t]:
                qt = a[i][t] // a[t][t]
                row_op(i, t, -qt)
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, cols):
            if a[t][j]:
                qt = a[t][j] // a[t][t]
                col_op(j, t, -qt)
                if a[t][j]:
                    dirty = True
        if dirty:
            continue  # remainder became the new smaller pivot candidate
        # enforce divisibility d_t | a[i][j] in the remaining block
        viol = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t]:
                    viol = i
                    break
            if viol is not None:
                break
        if viol is not None:
            row_op(t, viol, 1)
            continue
        t += 1

    return tuple(tuple(r) for r in u), tuple(tuple(r) for r in a), tuple(tuple(r) for r in v)


def snf_diagonal(d: Mat) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def solve_integer(m: Mat, target: Vec) -> Optional[tuple[Vec, list[Vec]]]:
    """Solve M y = target over the integers.

    Returns (particular solution, kernel basis) or None when unsolvable.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if len(target) != rows:
        raise DimensionMismatch("solve_integer target length mismatch")
    u, d, v = smith_normal_form(m)
    w = mat_vec(u, target)
    diag = snf_diagonal(d)
    z = [0] * cols
    for i in range(rows):
        di = diag[i] if i < len(diag) else 0
        if di:
            if w[i] % di:
                return None
            z[i] = w[i] // di
        elif w[i]:
            return None
    particular = mat_vec(v, tuple(z))
    rank = sum(1 for x in diag if x)
    vt = transpose(v)
    kernel = [vt[j] for j in range(rank, cols)]
    return particular, kernel


def kernel_basis(m: Mat) -> list[Vec]:
    rows = len(m)
    sol = solve_integer(m, zero_vec(rows))
    assert sol is not None
    return sol[1]


def image_basis(m: Mat) -> list[Vec]:
    """Basis of the column span of M inside Z^rows."""
    u, d, _ = smith_normal_form(m)
    diag = snf_diagonal(d)
    uinv = mat_inverse_unimodular(u)
    cols = []
    ut = transpose(uinv)
    for i, di in enumerate(diag):
        if di:
            cols.append(vec_scale(ut[i], di))
    return cols


# ---------------------------------------------------------------------------
# spec domain types


@dataclass(frozen=True)
class Lattice:
    """Z^rank with its standard basis."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("lattice rank must be nonnegative")

    def zero(self) -> Vec:
        return zero_vec(self.rank)

    def basis(self) -> list[Vec]:
        return [tuple(1 if i == j else 0 for j in range(self.rank)) for i in range(self.rank)]


@dataclass(frozen=True)
class LatticeMap:
    """Homomorphism Z^d1 -> Z^d2 given by a d2 x d1 integer matrix."""

    matrix: Mat

    @classmethod
    def from_rows(cls, rows) -> "LatticeMap":
        return cls(mat(rows))

    @classmethod
    def identity(cls, n: int) -> "LatticeMap":
        return cls(identity(n))

    @classmethod
    def scaling(cls, n: int, factor: int) -> "LatticeMap":
        return cls(tuple(tuple(factor if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def source_rank(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    @property
    def target_rank(self) -> int:
        return len(self.matrix)

    def __call__(self, v: Vec) -> Vec:
        return mat_vec(self.matrix, v)

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self after other."""
        return LatticeMap(mat_mul(self.matrix, other.matrix))

    def is_injective(self) -> bool:
        return not kernel_basis(self.matrix)

    def preimage(self, v: Vec) -> Optional[Vec]:
        sol = solve_integer(self.matrix, v)
        return None if sol is None else sol[0]


INFINITE = float("inf")


@dataclass(frozen=True)
class QuotientData:
    """The quotient Z^d / im(map), with canonical coset representatives.

    ``index`` is the order of the quotient (inf when the image has lower
    rank); coset representatives are lexicographically minimal in the Smith
    coordinates and listed in mixed-radix order.
    """

    invariant_factors: tuple[int, ...]
    index: object  # int or math.inf
    coset_reps: tuple[Vec, ...]
    _uinv: Mat
    _u: Mat
    _diag: tuple[int, ...]

    def project(self, v: Vec) -> int:
        """Index of the coset of ``v`` among coset_reps (finite index only)."""
        if self.index == INFINITE:
            raise ValueError("projection undefined for infinite index")
        w = mat_vec(self._u, v)
        idx = 0
        for i, d in enumerate(self._diag):
            idx = idx * d + (w[i] % d)
        return idx

    def reduce(self, v: Vec) -> Vec:
        """Canonical representative of the coset of ``v``."""
        return self.coset_reps[self.project(v)]


def quotient_data(target: Lattice, image_map: LatticeMap) -> QuotientData:
    if image_map.target_rank != target.rank:
        raise DimensionMismatch("image map does not target the given lattice")
    d = target.rank
    u, dd, _ = smith_normal_form(image_map.matrix)
    diag = [x for x in snf_diagonal(dd) if x]
    rank = len(diag)
    uinv = mat_inverse_unimodular(u)
    factors = tuple(x for x in diag if x > 1)
    if rank < d:
        return QuotientData(factors, INFINITE, (), uinv, u, ())
    index = 1
    for x in diag:
        index *= x
    # pad diag to d entries (rank == d here)
    reps = []
    radices = diag
    ut = transpose(uinv)

    def build(prefix):
        if len(prefix) == d:
            w = prefix
            hv = tuple(sum(ut[i][k] * w[i] for i in range(d)) for k in range(d))
            reps.append(hv)
            return
        for r in range(radices[len(prefix)]):
            build(prefix + [r])

    build([])
    return QuotientData(factors, index, tuple(reps), uinv, u, tuple(radices))


# ---------------------------------------------------------------------------
# quadratic form tests


def is_positive_definite(q: Sequence[Sequence[Fraction]]) -> bool:
    """Sylvester criterion with exact rationals.  Requires symmetric input."""
    n = len(q)
    qq = [[Fraction(x) for x in row] for row in q]
    for i in range(n):
        for j in range(n):
            if qq[i][j] != qq[j][i]:
                raise NotSymmetric(f"entry ({i},{j}) != ({j},{i})")
    for k in range(1, n + 1):
        minor = [row[:k] for row in qq[:k]]
        if frac_det(minor) <= 0:
            return False
    return True


def is_positive_semidefinite(q: Sequence[Sequence[Fraction]]) -> bool:
    """All principal minors nonnegative (exact, exponential in n; n is tiny)."""
    n = len(q)
    qq = [[Fraction(x) for x in row] for row in q]
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        minor = [[qq[i][j] for j in idx] for i in idx]
        if frac_det(minor) < 0:
            return False
    return True
