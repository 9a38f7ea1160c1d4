"""Degreewise cohomology with torsion, induced maps, quasi-isomorphism and
acyclicity tests, Kunneth verification, and the mildness and admissibility
predicates.

H^k is presented as free rank plus invariant factors via the SNF machinery;
for a quotient A/I the cocycles in degree k are the x with d x in I^{k+1}
and the coboundaries are im(d) + I^k, all inside the ambient monomial basis.
Every answer is certified only inside its degree window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AlgebraMorphism,
    Element,
    FreeGradedAlgebra,
    HomogeneousIdeal,
    QuotientAlgebra,
    ambient_algebra,
    quotient,
    tensor_product,
)
from .coeff import CoefficientRing, scalar_str
from .errors import DegreeCapError, MildError, NotDStable
from .linalg import (
    LinearSolver,
    Matrix,
    SubquotientModule,
    column_space_basis,
    kernel_basis,
    presented_map_flags,
)


@dataclass
class DegreeEntry:
    degree: int
    module: SubquotientModule
    representatives: list
    boundary_solver: LinearSolver

    @property
    def free_rank(self) -> int:
        return self.module.free_rank

    @property
    def torsion(self) -> list:
        return [int(d) for d in self.module.torsion]

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "free_rank": self.free_rank,
            "torsion": [str(t) for t in self.torsion],
        }


def _ideal_cols(space, k: int) -> list:
    if isinstance(space, QuotientAlgebra):
        return space.ideal_cols(k)
    return []


def compute_degree_entry(space, k: int) -> DegreeEntry:
    """H^k of an algebra or quotient, presented with representatives.

    Relative cocycles in degree k are the x with d x in I^{k+1}; the
    relations are im(d) + I^k.  Uses degree k+1 of the ambient basis.
    """
    A = ambient_algebra(space)
    ring = A.ring
    n_k = A.dim(k)
    dmat = A.differential_matrix(k)
    p_next = _ideal_cols(space, k + 1)

    if p_next:
        aug = Matrix(A.dim(k + 1), dmat.ncols + len(p_next),
                     [dict(c) for c in dmat.cols] + [dict(c) for c in p_next])
        z_gens = []
        for kvec in kernel_basis(aug, ring):
            x = {i: v for i, v in kvec.items() if i < n_k}
            if x:
                z_gens.append(x)
        z_gens = column_space_basis(Matrix(n_k, len(z_gens), z_gens), ring)
    else:
        z_gens = kernel_basis(dmat, ring)

    w_gens = []
    if k > 0:
        w_gens.extend(dict(c) for c in A.differential_matrix(k - 1).cols)
    w_gens.extend(dict(c) for c in _ideal_cols(space, k))

    module = SubquotientModule(n_k, z_gens, w_gens, ring)
    reps = [A.element_from_vec(k, v) for v in module.generators]
    bsolver = LinearSolver(Matrix(n_k, len(w_gens), [dict(c) for c in w_gens]), ring)
    return DegreeEntry(k, module, reps, bsolver)


class CohomologyTable:
    """Cohomology of an algebra or quotient over a degree window."""

    def __init__(self, space, window: tuple):
        self.space = space
        self.ambient = ambient_algebra(space)
        self.ring: CoefficientRing = self.ambient.ring
        self.window = window
        self.entries: dict[int, DegreeEntry] = {}
        lo, hi = window
        if self.ambient.cap is None or self.ambient.cap < hi + 1:
            self.ambient.set_cap(hi + 1)
        for k in range(lo, hi + 1):
            self.entries[k] = self._compute(k)

    def _compute(self, k: int) -> DegreeEntry:
        return compute_degree_entry(self.space, k)

    def entry(self, k: int) -> DegreeEntry:
        if k not in self.entries:
            raise DegreeCapError(f"degree {k} outside the computed window {self.window}")
        return self.entries[k]

    def free_rank(self, k: int) -> int:
        return self.entry(k).free_rank

    def torsion(self, k: int) -> list:
        return self.entry(k).torsion

    def is_zero(self, k: int) -> bool:
        return self.entry(k).module.is_trivial()

    def is_coboundary(self, el: Element) -> bool:
        """Does el (a relative cocycle) vanish in cohomology?"""
        if el.is_zero():
            return True
        vec = self.ambient.vector_of(el)
        return self.entry(el.degree).boundary_solver.contains(vec)

    def class_coords(self, el: Element, degree: int | None = None) -> list:
        if el.is_zero():
            if degree is None:
                raise MildError("class of the zero element needs an explicit degree")
            return [Fraction(0)] * len(self.entry(degree).module.generators)
        return self.entry(el.degree).module.class_coords(self.ambient.vector_of(el))

    def boundary_preimage(self, el: Element):
        """Some x of degree k-1 with d x = el modulo the ideal, or None.

        The degree-k boundary solver's leading coordinates are coefficients
        on the degree-(k-1) monomial basis, because those columns are the
        d-images of the basis monomials.
        """
        if el.is_zero():
            return self.ambient.zero()
        k = el.degree
        sol = self.entry(k).boundary_solver.solve(self.ambient.vector_of(el))
        if sol is None:
            return None
        n_prev = self.ambient.dim(k - 1)
        return self.ambient.element_from_vec(k - 1, {i: c for i, c in sol.items() if i < n_prev})

    def to_json(self) -> list:
        return [self.entries[k].to_json() for k in sorted(self.entries)]


def cohomology(space, window: tuple) -> CohomologyTable:
    return CohomologyTable(space, window)


@dataclass
class InducedMap:
    """H^k(f) on the chosen presentations, with R-level flags per degree."""

    window: tuple
    matrices: dict = field(default_factory=dict)
    injective: dict = field(default_factory=dict)
    surjective: dict = field(default_factory=dict)

    def iso(self, k: int) -> bool:
        return self.injective[k] and self.surjective[k]

    def all_injective(self) -> bool:
        return all(self.injective.values())

    def first_failure(self, what: str = "iso"):
        for k in sorted(self.matrices):
            ok = {
                "iso": self.injective[k] and self.surjective[k],
                "injective": self.injective[k],
                "surjective": self.surjective[k],
            }[what]
            if not ok:
                return k
        return None


def induced_map_on_H(f: AlgebraMorphism, window: tuple,
                     src_table: CohomologyTable | None = None,
                     tgt_table: CohomologyTable | None = None) -> InducedMap:
    src_table = src_table or cohomology(f.source, window)
    tgt_table = tgt_table or cohomology(f.target, window)
    out = InducedMap(window=window)
    lo, hi = window
    for k in range(lo, hi + 1):
        se = src_table.entry(k)
        te = tgt_table.entry(k)
        fmat = f.matrix_at(k)
        cols = []
        for rep in se.representatives:
            img = fmat.apply(src_table.ambient.vector_of(rep, k))
            coords = te.module.class_coords(img)
            cols.append({i: c for i, c in enumerate(coords) if c})
        G = Matrix(len(te.module.orders), len(cols), cols)
        inj, surj = presented_map_flags(G, se.module.orders, te.module.orders,
                                        src_table.ring)
        out.matrices[k] = G
        out.injective[k] = inj
        out.surjective[k] = surj
    return out


def is_quasi_iso(f: AlgebraMorphism, window: tuple, **tables):
    """(True, None) or (False, first failing degree)."""
    ind = induced_map_on_H(f, window, **tables)
    bad = ind.first_failure("iso")
    return bad is None, bad


def is_acyclic_ideal(J: HomogeneousIdeal, window: tuple, mode: str = "ideal"):
    """(True, None) or (False, witness degree).

    Default reading: H^k(J, d|_J) = 0 for k >= 1 in the window.  The
    alternative reading (projection A -> A/J is a quasi-iso) is available
    as mode="projection"; the two agree on d-stable ideals.
    """
    A = J.ambient
    lo, hi = window
    if mode == "projection":
        B = quotient(A, J, hi)
        proj = AlgebraMorphism(
            A, B, {i: Element(A, {(i,): Fraction(1)}) for i in range(len(A.gens))},
            kind="projection", check=False)
        ok, bad = is_quasi_iso(proj, window)
        return ok, bad

    bases = {k: J.degree_cols(k) for k in range(max(1, lo), hi + 2)}
    solvers = {}
    cmats = {}
    for k in range(max(1, lo), hi + 1):
        cols_next = bases[k + 1]
        solver = solvers.get(k + 1)
        if solver is None:
            solver = LinearSolver(
                Matrix(A.dim(k + 1), len(cols_next), [dict(c) for c in cols_next]), A.ring)
            solvers[k + 1] = solver
        dmat = A.differential_matrix(k)
        ccols = []
        for v in bases[k]:
            dv = dmat.apply(v)
            x = solver.solve(dv)
            if x is None:
                raise NotDStable(f"ideal is not d-stable at degree {k + 1}", k + 1)
            ccols.append(x)
        cmats[k] = Matrix(len(cols_next), len(bases[k]), ccols)

    for k in range(max(1, lo), hi + 1):
        zk = kernel_basis(cmats[k], A.ring)
        wk = [dict(c) for c in cmats[k - 1].cols] if k - 1 in cmats else []
        hk = SubquotientModule(len(bases[k]), zk, wk, A.ring)
        if not hk.is_trivial():
            return False, k
    return True, None


@dataclass
class KunnethReport:
    degree: int
    formula_free: int
    formula_torsion: list
    direct_free: int
    direct_torsion: list

    @property
    def ok(self) -> bool:
        return (self.formula_free == self.direct_free
                and sorted(self.formula_torsion) == sorted(self.direct_torsion))


def kunneth_check(A: FreeGradedAlgebra, B: FreeGradedAlgebra, k: int,
                  table_a: CohomologyTable | None = None,
                  table_b: CohomologyTable | None = None) -> KunnethReport:
    """Compare the Kunneth formula for H^k(A (x) B) with a direct computation.

    Tensor part: sum over p+q=k of H^p(A) (x) H^q(B); correction part: sum
    over p'+q'=k+1 of Tor_1(H^p'(A), H^q'(B)).  For cyclic pieces,
    R/a (x) R/b = Tor_1(R/a, R/b) = R/gcd(a, b).
    """
    ring = A.ring
    table_a = table_a or cohomology(A, (0, k + 1))
    table_b = table_b or cohomology(B, (0, k + 1))

    free = 0
    torsion: list[int] = []

    def add_cyclic(d: int, copies: int = 1):
        if d and copies:
            torsion.extend([d] * copies)

    for p in range(0, k + 1):
        q = k - p
        ea, eb = table_a.entry(p), table_b.entry(q)
        free += ea.free_rank * eb.free_rank
        for t in eb.torsion:
            add_cyclic(t, ea.free_rank)
        for t in ea.torsion:
            add_cyclic(t, eb.free_rank)
        for ta in ea.torsion:
            for tb in eb.torsion:
                g = int(ring.gcd(Fraction(ta), Fraction(tb)))
                add_cyclic(g)
    for p in range(0, k + 2):
        q = k + 1 - p
        for ta in table_a.entry(p).torsion:
            for tb in table_b.entry(q).torsion:
                g = int(ring.gcd(Fraction(ta), Fraction(tb)))
                add_cyclic(g)

    T = tensor_product(A, B, cap=k + 1)
    direct = cohomology(T, (k, k)).entry(k)
    return KunnethReport(k, free, sorted(torsion), direct.free_rank, sorted(direct.torsion))


@dataclass
class MildnessReport:
    status: str  # "mild" | "not-mild" | "uncertified"
    witness: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == "mild"


def is_H_mild(space, r: int, window: tuple,
              table: CohomologyTable | None = None) -> MildnessReport:
    """Homology concentrated in degrees r+1 .. r*rho(R) (H^0 = R allowed).

    A window too small to see r*rho(R) yields "uncertified", never a guess.
    """
    ring = ambient_algebra(space).ring
    rho = ring.rho()
    lo, hi = window
    table = table or cohomology(space, (0, hi))
    e0 = table.entry(0)
    if e0.free_rank != 1 or e0.torsion:
        return MildnessReport("not-mild", 0, "H^0 is not R")
    for k in range(1, r + 1):
        if not table.is_zero(k):
            return MildnessReport("not-mild", k, f"H^{k} nonzero")
    if rho != math.inf:
        top = r * int(rho)
        for k in range(top + 1, hi + 1):
            if not table.is_zero(k):
                return MildnessReport("not-mild", k, f"H^{k} nonzero beyond degree {top}")
        if hi < top:
            return MildnessReport("uncertified", None,
                                  f"window top {hi} below r*rho = {top}")
    return MildnessReport("mild")


def is_admissible(space, r: int, window: tuple,
                  table: CohomologyTable | None = None) -> bool:
    """Finite type (automatic here), H^0 = R, H^{1..r} = 0, H^{r+1} R-free."""
    lo, hi = window
    if hi < r + 1:
        raise DegreeCapError("window too small to test admissibility")
    table = table or cohomology(space, (0, max(hi, r + 1)))
    e0 = table.entry(0)
    if e0.free_rank != 1 or e0.torsion:
        return False
    for k in range(1, r + 1):
        if not table.is_zero(k):
            return False
    return not table.entry(r + 1).torsion
