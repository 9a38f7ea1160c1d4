"""Exact linear algebra over Q and Z_S: Smith normal form, kernels, solving,
and finitely generated graded-module presentations.

Matrices are stored column-sparse (each column a dict row -> Fraction);
every map between degree components of an algebra is a small sparse matrix,
and all reductions below are exact.  The Smith normal form carries the full
unimodular transforms U, V with U*M*V = D and is the single source of truth
for torsion; over Q a faster echelon path computes the same answers
(everything is a unit, so D is an identity block).

Determinism: pivots are chosen by least canonical-associate magnitude, then
least absolute value, then lowest row and lowest column index.  The absolute
value component keeps the Euclidean descent terminating on the integer work
representation; canonical size alone can stall (pivot 4 vs entry 3 in Z_{2}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coeff import CoefficientRing, residue_mod
from .errors import MildError

Vec = dict  # row index -> Fraction, zero entries absent

ZERO = Fraction(0)
ONE = Fraction(1)


def vec_scale(u: Vec, c: Fraction) -> Vec:
    if c == 0:
        return {}
    return {i: c * x for i, x in u.items()}


def vec_axpy(u: Vec, c: Fraction, v: Vec) -> Vec:
    """u + c*v as a new dict."""
    if c == 0:
        return dict(u)
    out = dict(u)
    for i, x in v.items():
        y = out.get(i, ZERO) + c * x
        if y:
            out[i] = y
        else:
            out.pop(i, None)
    return out


def vec_sub(u: Vec, v: Vec) -> Vec:
    return vec_axpy(u, Fraction(-1), v)


def vec_is_zero(u: Vec) -> bool:
    return not u


def vec_from_list(xs) -> Vec:
    return {i: Fraction(x) for i, x in enumerate(xs) if x}


def vec_to_list(u: Vec, n: int) -> list:
    out = [ZERO] * n
    for i, x in u.items():
        out[i] = x
    return out


class Matrix:
    """Dense-shaped, column-sparse exact matrix."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: list | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [{} for _ in range(ncols)]

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = cls(nrows, ncols)
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise MildError("ragged rows")
            for j, x in enumerate(r):
                x = Fraction(x)
                if x:
                    m.cols[j][i] = x
        return m

    @classmethod
    def from_cols(cls, nrows: int, cols: list) -> "Matrix":
        return cls(nrows, len(cols), [dict(c) for c in cols])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    def entry(self, i: int, j: int) -> Fraction:
        return self.cols[j].get(i, ZERO)

    def col(self, j: int) -> Vec:
        return self.cols[j]

    def to_rows(self) -> list:
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def copy(self) -> "Matrix":
        return Matrix(self.nrows, self.ncols, [dict(c) for c in self.cols])

    def apply(self, v: Vec) -> Vec:
        """Matrix-vector product (v indexed by columns)."""
        out: Vec = {}
        for j, c in v.items():
            if c == 0:
                continue
            for i, x in self.cols[j].items():
                y = out.get(i, ZERO) + c * x
                if y:
                    out[i] = y
                else:
                    out.pop(i, None)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise MildError("matmul shape mismatch")
        return Matrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise MildError("hstack shape mismatch")
        return Matrix(self.nrows, self.ncols + other.ncols,
                      [dict(c) for c in self.cols] + [dict(c) for c in other.cols])

    @classmethod
    def block(cls, grid: list) -> "Matrix":
        """Assemble from a grid of blocks (None = zero block, sizes inferred)."""
        row_h = [None] * len(grid)
        col_w = [None] * len(grid[0])
        for bi, row in enumerate(grid):
            for bj, blk in enumerate(row):
                if blk is None:
                    continue
                row_h[bi] = blk.nrows
                col_w[bj] = blk.ncols
        if any(h is None for h in row_h) or any(w is None for w in col_w):
            raise MildError("block grid has an undetermined row or column size")
        nrows = sum(row_h)
        out_cols = []
        for bj in range(len(col_w)):
            for j in range(col_w[bj]):
                col: Vec = {}
                off = 0
                for bi in range(len(row_h)):
                    blk = grid[bi][bj]
                    if blk is not None:
                        for i, x in blk.cols[j].items():
                            col[off + i] = x
                    off += row_h[bi]
                out_cols.append(col)
        return cls(nrows, len(out_cols), out_cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            a == b for a, b in zip(self.cols, other.cols)
        )

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols})"


@dataclass
class SmithDecomposition:
    U: Matrix
    D: Matrix
    V: Matrix
    rank: int

    @property
    def diagonal(self) -> list:
        n = min(self.D.nrows, self.D.ncols)
        return [self.D.entry(i, i) for i in range(n)]


def _det_is_unit(M: Matrix, ring: CoefficientRing) -> bool:
    """Fraction-free-ish determinant unit test for the small U, V transforms."""
    n = M.nrows
    if n != M.ncols:
        return False
    work = [dict(c) for c in M.cols]
    det = ONE
    used = set()
    for j in range(n):
        piv = None
        for i, x in work[j].items():
            if i not in used and x:
                piv = i
                break
        if piv is None:
            return False
        used.add(piv)
        pval = work[j][piv]
        det *= pval
        for k in range(j + 1, n):
            if piv in work[k]:
                f = work[k][piv] / pval
                work[k] = vec_axpy(work[k], -f, work[j])
    return ring.is_invertible(det)


def _swap_rows(cols: list, i1: int, i2: int):
    if i1 == i2:
        return
    for c in cols:
        a, b = c.get(i1), c.get(i2)
        if a is None and b is None:
            continue
        if b is None:
            c[i2] = c.pop(i1)
        elif a is None:
            c[i1] = c.pop(i2)
        else:
            c[i1], c[i2] = b, a


def _row_axpy(cols: list, it: int, c, isrc: int):
    """row it += c * row isrc, across all columns."""
    if c == 0:
        return
    for col in cols:
        x = col.get(isrc)
        if x is None:
            continue
        y = col.get(it, 0) + c * x
        if y:
            col[it] = y
        else:
            col.pop(it, None)


def _col_axpy(cols: list, jt: int, c, jsrc: int):
    if c == 0:
        return
    src, tgt = cols[jsrc], cols[jt]
    for i, x in src.items():
        y = tgt.get(i, 0) + c * x
        if y:
            tgt[i] = y
        else:
            tgt.pop(i, None)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, u with s*a + u*b = g = gcd(a, b) > 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _row_transform2(cols: list, i1: int, i2: int, a11, a12, a21, a22):
    """(row_i1, row_i2) <- (a11*row_i1 + a12*row_i2, a21*row_i1 + a22*row_i2)."""
    for col in cols:
        x = col.get(i1, 0)
        y = col.get(i2, 0)
        if not x and not y:
            continue
        nx = a11 * x + a12 * y
        ny = a21 * x + a22 * y
        if nx:
            col[i1] = nx
        else:
            col.pop(i1, None)
        if ny:
            col[i2] = ny
        else:
            col.pop(i2, None)


def _col_transform2(cols: list, j1: int, j2: int, a11, a12, a21, a22):
    c1, c2 = cols[j1], cols[j2]
    n1: dict = {}
    n2: dict = {}
    for i in set(c1) | set(c2):
        x = c1.get(i, 0)
        y = c2.get(i, 0)
        nx = a11 * x + a12 * y
        ny = a21 * x + a22 * y
        if nx:
            n1[i] = nx
        if ny:
            n2[i] = ny
    cols[j1], cols[j2] = n1, n2


def smith_normal_form(M: Matrix, ring: CoefficientRing,
                      need_u: bool = True, need_v: bool = True) -> SmithDecomposition:
    """U*M*V = D with U, V unimodular over R, D diagonal with canonical
    associates satisfying d_1 | d_2 | ... ; deterministic for fixed input."""
    nrows, ncols = M.nrows, M.ncols

    # Clear denominators with a single unit scale; compensate in U at the end.
    denom_lcm = 1
    for c in M.cols:
        for x in c.values():
            denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
    scale = Fraction(denom_lcm)
    if not ring.is_field and not ring.is_invertible(scale):
        raise MildError("matrix entries are not in the ring")

    work = [{i: int(x * scale) for i, x in c.items()} for c in M.cols]
    ucols = [{i: 1} for i in range(nrows)] if need_u else None
    vcols = [{j: ONE} for j in range(ncols)] if need_v else None
    inverted = ring.inverted_primes or ()

    def canon_size(x: int) -> int:
        x = abs(x)
        if ring.is_field:
            return 1
        for p in inverted:
            while x and x % p == 0:
                x //= p
        return x

    def find_pivot(t: int):
        best = None
        for j in range(t, ncols):
            for i, x in work[j].items():
                if i < t or not x:
                    continue
                key = (canon_size(x), abs(x), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        return None if best is None else (best[1], best[2])

    t = 0
    while t < min(nrows, ncols):
        pos = find_pivot(t)
        if pos is None:
            break
        pi, pj = pos
        _swap_rows(work, t, pi)
        if need_u:
            _swap_rows(ucols, t, pi)
        work[t], work[pj] = work[pj], work[t]
        if need_v:
            vcols[t], vcols[pj] = vcols[pj], vcols[t]

        # Clear column t with extended-gcd row transforms, then row t with
        # column transforms; a transform can reintroduce entries in the other
        # direction, but every nontrivial gcd step strictly shrinks |pivot|,
        # so the alternation terminates.
        while True:
            touched = False
            for i in sorted(work[t]):
                if i <= t or not work[t].get(i):
                    continue
                p = work[t][t]
                b = work[t][i]
                if b % p == 0:
                    q = b // p
                    _row_axpy(work, i, -q, t)
                    if need_u:
                        _row_axpy(ucols, i, -q, t)
                else:
                    g, s, u = _xgcd(p, b)
                    _row_transform2(work, t, i, s, u, -(b // g), p // g)
                    if need_u:
                        _row_transform2(ucols, t, i, s, u, -(b // g), p // g)
                touched = True
            row_touched = False
            for j in range(t + 1, ncols):
                x = work[j].get(t)
                if not x:
                    continue
                p = work[t][t]
                if x % p == 0:
                    q = x // p
                    _col_axpy(work, j, -q, t)
                    if need_v:
                        _col_axpy(vcols, j, -q, t)
                else:
                    g, s, u = _xgcd(p, x)
                    _col_transform2(work, t, j, s, u, -(x // g), p // g)
                    if need_v:
                        _col_transform2(vcols, t, j, s, u, -(x // g), p // g)
                row_touched = True
            col_dirty = any(i > t and v for i, v in work[t].items())
            if not col_dirty and not row_touched:
                break

        if not ring.is_field:
            # Divisibility: canon(d_t) must divide every remaining entry.
            p = canon_size(work[t][t])
            fix = None
            for j in range(t + 1, ncols):
                for i, x in sorted(work[j].items()):
                    if i > t and canon_size(x) % p != 0:
                        fix = i
                        break
                if fix is not None:
                    break
            if fix is not None:
                _row_axpy(work, t, 1, fix)
                if need_u:
                    _row_axpy(ucols, t, 1, fix)
                continue  # redo stage t with the offending row folded in
        t += 1

    rank = t

    # Fractionize and normalize the diagonal to canonical associates by
    # scaling columns with units (absorbed into V).
    Dm = Matrix(nrows, ncols)
    for i in range(rank):
        d = Fraction(work[i][i])
        target = ring.canon(d) if not ring.is_field else ONE
        u = target / d
        Dm.cols[i][i] = target
        if need_v:
            vcols[i] = vec_scale(vcols[i], u)

    U = Matrix(nrows, nrows, [{i: Fraction(x) * scale for i, x in c.items()} for c in ucols]) if need_u else None
    V = Matrix(ncols, ncols, vcols) if need_v else None
    return SmithDecomposition(U=U, D=Dm, V=V, rank=rank)


def kernel_basis(M: Matrix, ring: CoefficientRing) -> list:
    """Columns freely generating ker(M) as an R-module."""
    if ring.is_field:
        return _field_kernel(M)
    s = smith_normal_form(M, ring, need_u=False, need_v=True)
    return [dict(s.V.cols[j]) for j in range(s.rank, M.ncols)]


def solve_linear(M: Matrix, b: Vec, ring: CoefficientRing):
    """Some x with M x = b over R, or None."""
    return LinearSolver(M, ring).solve(b)


def column_space_basis(M: Matrix, ring: CoefficientRing) -> list:
    """A free basis of the column span of M."""
    if ring.is_field:
        ech = FieldEchelon(track=False)
        basis = []
        for c in M.cols:
            res, _ = ech.reduce(c)
            if res:
                ech.insert(res)
                basis.append(res)
        return basis
    s = smith_normal_form(M, ring, need_u=False, need_v=True)
    mv = M @ s.V
    return [dict(mv.cols[j]) for j in range(s.rank)]


@dataclass
class CokernelEntry:
    """Presentation of coker(M) = R^rows / col(M): free rank plus invariant factors."""

    free_rank: int
    torsion: list
    generators: list  # adapted generator vectors in ambient coordinates


def cokernel_presentation(M: Matrix, ring: CoefficientRing) -> CokernelEntry:
    if ring.is_field:
        ech = FieldEchelon(track=False)
        for c in M.cols:
            res, _ = ech.reduce(c)
            if res:
                ech.insert(res)
        free_rows = [i for i in range(M.nrows) if i not in ech.pivots]
        return CokernelEntry(free_rank=len(free_rows), torsion=[],
                             generators=[{i: ONE} for i in free_rows])
    s = smith_normal_form(M, ring, need_u=True, need_v=False)
    uinv = invert_unimodular(s.U, ring)
    torsion, gens = [], []
    for i in range(s.rank):
        d = s.D.entry(i, i)
        if not ring.is_invertible(d):
            torsion.append(d)
            gens.append(dict(uinv.cols[i]))
    for i in range(s.rank, M.nrows):
        gens.append(dict(uinv.cols[i]))
    return CokernelEntry(free_rank=M.nrows - s.rank, torsion=torsion, generators=gens)


def invert_unimodular(U: Matrix, ring: CoefficientRing) -> Matrix:
    """Exact inverse of a unimodular matrix (entries stay in R)."""
    solver = LinearSolver(U, ring)
    cols = []
    for i in range(U.nrows):
        x = solver.solve({i: ONE})
        if x is None:
            raise MildError("matrix is not invertible over the ring")
        cols.append(x)
    return Matrix(U.nrows, U.nrows, cols)


class FieldEchelon:
    """Sparse column echelon over Q with optional combination tracking.

    Inserted vectors are normalized to pivot 1; `reduce` eliminates every
    pivot row from a vector and reports the combination used.
    """

    def __init__(self, track: bool = False):
        self.pivots: dict[int, int] = {}  # pivot row -> basis index
        self.basis: list[Vec] = []
        self.track = track
        self.combos: list[Vec] = []  # expression of basis vecs in caller tags

    def reduce(self, v: Vec, tag_combo: Vec | None = None):
        res = dict(v)
        combo: Vec = dict(tag_combo or {})
        while True:
            hit = None
            for i in res:
                if i in self.pivots:
                    hit = i if hit is None or i < hit else hit
            if hit is None:
                break
            k = self.pivots[hit]
            c = res[hit]
            res = vec_axpy(res, -c, self.basis[k])
            if self.track:
                combo = vec_axpy(combo, -c, self.combos[k])
        return res, combo

    def insert(self, v: Vec, combo: Vec | None = None) -> int:
        piv = min(v)
        c = v[piv]
        vn = vec_scale(v, 1 / c)
        self.pivots[piv] = len(self.basis)
        self.basis.append(vn)
        if self.track:
            self.combos.append(vec_scale(combo or {}, 1 / c))
        return self.pivots[piv]


def _field_kernel(M: Matrix) -> list:
    # Invariant of reduce(): res = sum(combo[tag] * col_tag), so a zero
    # residual makes combo itself a kernel vector.
    ech = FieldEchelon(track=True)
    out = []
    for j, c in enumerate(M.cols):
        res, combo = ech.reduce(c, {j: ONE})
        if res:
            ech.insert(res, combo)
        else:
            out.append({i: v for i, v in combo.items() if v})
    return out


class LinearSolver:
    """Repeated exact solves against a fixed matrix (field or PID path)."""

    def __init__(self, M: Matrix, ring: CoefficientRing):
        self.M = M
        self.ring = ring
        if ring.is_field:
            self._ech = FieldEchelon(track=True)
            for j, c in enumerate(M.cols):
                res, combo = self._ech.reduce(c, {j: ONE})
                if res:
                    self._ech.insert(res, combo)
            self._snf = None
        else:
            self._snf = smith_normal_form(M, ring, need_u=True, need_v=True)

    def solve(self, b: Vec):
        if self.ring.is_field:
            res, combo = self._ech.reduce(b)
            if res:
                return None
            return {j: -c for j, c in combo.items() if c}
        s = self._snf
        c = s.U.apply(b)
        y: Vec = {}
        for i, ci in c.items():
            if i >= s.rank:
                return None
        for i in range(s.rank):
            ci = c.get(i, ZERO)
            if ci == 0:
                continue
            d = s.D.entry(i, i)
            q = ci / d
            if not self.ring.contains(q):
                return None
            y[i] = q
        return s.V.apply(y)

    def contains(self, b: Vec) -> bool:
        return self.solve(b) is not None


class NotInSpan(MildError):
    pass


class SubquotientModule:
    """A subquotient Z/W of R^n presented on SNF-adapted generators.

    Z is given by a generating set of vectors (its span must contain the
    span of W).  The module is presented as a direct sum of cyclic pieces:
    torsion generators with invariant factor orders, then free generators
    (order 0).  `class_coords` reduces an ambient vector to canonical
    coordinates; torsion coordinates are canonical residues.
    """

    def __init__(self, n: int, z_gens: list, w_gens: list, ring: CoefficientRing):
        self.n = n
        self.ring = ring
        if ring.is_field:
            self._init_field(z_gens, w_gens)
        else:
            self._init_pid(z_gens, w_gens)

    def _init_field(self, z_gens, w_gens):
        ech = FieldEchelon(track=False)
        for w in w_gens:
            res, _ = ech.reduce(w)
            if res:
                ech.insert(res)
        self._rel_count = len(ech.basis)
        gens, orders = [], []
        self._ech = ech
        self._gen_tags = []
        for z in z_gens:
            res, _ = ech.reduce(z)
            if res:
                idx = ech.insert(res)
                self._gen_tags.append(idx)
                gens.append(dict(ech.basis[idx]))
                orders.append(ZERO)
        self.generators = gens
        self.orders = orders

    def _init_pid(self, z_gens, w_gens):
        span = Matrix.from_cols(self.n, list(z_gens) + list(w_gens))
        zb = column_space_basis(span, self.ring)
        self._zbasis = Matrix.from_cols(self.n, zb)
        self._zsolver = LinearSolver(self._zbasis, self.ring)
        ccols = []
        for w in w_gens:
            x = self._zsolver.solve(w)
            if x is None:
                raise NotInSpan("relation vector escapes the submodule span")
            ccols.append(x)
        C = Matrix.from_cols(len(zb), ccols)
        s = smith_normal_form(C, self.ring, need_u=True, need_v=False)
        uinv = invert_unimodular(s.U, self.ring)
        self._U = s.U
        gens, orders, keep = [], [], []
        for i in range(len(zb)):
            d = s.D.entry(i, i) if i < s.rank else ZERO
            if d and self.ring.is_invertible(d):
                continue  # unit order: generator dies in the quotient
            keep.append((i, d))
            gens.append(self._zbasis.apply(uinv.cols[i]))
            orders.append(d)
        self._kept = keep
        self.generators = gens
        self.orders = orders

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> list:
        return [d for d in self.orders if d != 0]

    def is_trivial(self) -> bool:
        return not self.generators

    def contains_ambient(self, v: Vec) -> bool:
        """Is v in the submodule Z (before quotienting)?"""
        if self.ring.is_field:
            res, _ = self._ech.reduce(v)
            return not res
        return self._zsolver.contains(v)

    def class_coords(self, v: Vec) -> list:
        """Canonical coordinates of [v] on the adapted generators."""
        if self.ring.is_field:
            res = dict(v)
            coords = {}
            ech = self._ech
            while True:
                hit = min((i for i in res if i in ech.pivots), default=None)
                if hit is None:
                    break
                k = ech.pivots[hit]
                c = res[hit]
                res = vec_axpy(res, -c, ech.basis[k])
                coords[k] = coords.get(k, ZERO) + c
            if res:
                raise NotInSpan("vector is not in the submodule")
            return [coords.get(tag, ZERO) for tag in self._gen_tags]
        gamma = self._zsolver.solve(v)
        if gamma is None:
            raise NotInSpan("vector is not in the submodule")
        delta = self._U.apply(gamma)
        out = []
        for i, d in self._kept:
            x = delta.get(i, ZERO)
            if d:
                out.append(Fraction(residue_mod(x, int(d))))
            else:
                out.append(x)
        return out

    def is_zero_class(self, v: Vec) -> bool:
        return all(c == 0 for c in self.class_coords(v))


def presented_map_flags(G: Matrix, src_orders: list, tgt_orders: list,
                        ring: CoefficientRing) -> tuple[bool, bool]:
    """(injective, surjective) for a map of presented modules.

    Source is R^a modulo the diagonal relations src_orders, target R^b
    modulo tgt_orders, G the matrix on adapted generators.  Decided over R
    via SNF of augmented presentations, never by fraction-field rank.
    """
    b = len(tgt_orders)
    qcols = [{i: Fraction(d)} for i, d in enumerate(tgt_orders) if d]
    Q = Matrix.from_cols(b, qcols)
    GQ = G.hstack(Q)

    cok = cokernel_presentation(GQ, ring)
    surjective = cok.free_rank == 0 and not cok.torsion

    injective = True
    a = len(src_orders)
    for k in kernel_basis(GQ, ring):
        x = {i: v for i, v in k.items() if i < a}
        # x must die under the source relations.
        for i in range(a):
            xi = x.get(i, ZERO)
            if xi == 0:
                continue
            d = src_orders[i]
            if d == 0 or residue_mod(xi, int(d)) != 0:
                injective = False
                break
        if not injective:
            break
    return injective, surjective
