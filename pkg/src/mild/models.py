"""Relative free and commutative models of morphisms, minimality reports,
and lifting through surjective quasi-isomorphisms.

The construction is the inductive one: at step k the kernel of H^k on the
partial projection is killed by adjoining degree k-1 generators whose
differentials are representative cocycles; killing a torsion class of order
lambda creates a new degree k-1 cocycle (primitive minus lambda times the
new generator), so after every kill the kernels of all lower degrees are
recomputed and killed in turn, cascading downward while generator degrees
stay above the connectivity bound.  Surjectivity in degree k+1 is then
restored by adjoining cocycle generators that hit an SNF-adapted generating
set of the cokernel.  The finished projection is post-checked to be a
quasi-isomorphism on the whole window.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    AlgebraMorphism,
    Element,
    FreeGradedAlgebra,
    Generator,
    QuotientAlgebra,
    ambient_algebra,
)
from .cohomology import (
    CohomologyTable,
    DegreeEntry,
    cohomology,
    compute_degree_entry,
    induced_map_on_H,
    is_quasi_iso,
)
from .errors import (
    HypothesisViolated,
    LiftFailed,
    MildError,
    NotQuasiIso,
    NotSurjective,
    WindowExhausted,
)
from .linalg import Matrix, SubquotientModule, kernel_basis, solve_linear


@dataclass
class AddedGenerator:
    name: str
    degree: int
    step: int
    kind: str  # "kernel" | "cascade" | "surjectivity"


@dataclass
class RelativeModel:
    """f factored as a free extension followed by a quasi-isomorphism."""

    modeled: AlgebraMorphism
    base: FreeGradedAlgebra
    target: object
    extension: FreeGradedAlgebra
    added: list
    inclusion: AlgebraMorphism
    projection: AlgebraMorphism
    window: tuple

    @property
    def added_names(self) -> list:
        return [a.name for a in self.added]

    def strata(self) -> dict:
        out: dict = {}
        for a in self.added:
            out.setdefault((a.step, a.kind), []).append(a.name)
        return out

    def to_json(self) -> dict:
        E = self.extension
        return {
            "window": list(self.window),
            "added_generators": [
                {
                    "name": a.name,
                    "degree": a.degree,
                    "step": a.step,
                    "kind": a.kind,
                    "differential": str(E.d(E.gen(a.name))),
                    "projection_image": str(self.projection.images[E.index_of(a.name)]),
                }
                for a in self.added
            ],
        }


def check_hypotheses(f: AlgebraMorphism, window: tuple,
                     tgt_table: CohomologyTable | None = None) -> CohomologyTable:
    """Machine-check conditions (i)-(v); returns the target table for reuse."""
    if isinstance(f.source, QuotientAlgebra):
        raise HypothesisViolated("(iv)", None, "source must be a free presentation")
    src_t = cohomology(f.source, (0, 2))
    tgt_t = tgt_table or cohomology(f.target, (0, max(2, window[1])))
    for name, t in (("source", src_t), ("target", tgt_t)):
        e0 = t.entry(0)
        if e0.free_rank != 1 or e0.torsion:
            raise HypothesisViolated("(i)", 0, f"H^0 of the {name} is not R")
        if not t.is_zero(1):
            raise HypothesisViolated("(i)", 1, f"H^1 of the {name} is nonzero")
    if tgt_t.entry(2).torsion:
        raise HypothesisViolated("(iii)", 2, "H^2 of the target has torsion")
    ind = induced_map_on_H(f, (2, 2), src_table=None, tgt_table=None)
    if not ind.injective[2]:
        raise HypothesisViolated("(v)", 2, "H^2(f) is not injective")
    return tgt_t


class _Builder:
    def __init__(self, f: AlgebraMorphism, flavor: str, window: tuple):
        if f.source.flavor != flavor:
            raise MildError(f"source flavor {f.source.flavor} does not match requested {flavor}")
        self.f = f
        self.window = window
        lo, hi = window
        self.hi = hi
        self.base = f.source
        self.target = f.target
        self.tgt_amb = ambient_algebra(f.target)
        self.ring = self.base.ring
        self.base.set_cap(hi + 1)
        self.tgt_amb.set_cap(hi + 1)
        self.tgt_table = check_hypotheses(f, window)

        # Working extension: a fresh copy of the base so the caller's algebra
        # is never mutated.
        self.E = self.base.copy_with_ring(self.ring)
        self.E.set_cap(hi + 1)
        self.psi = AlgebraMorphism(
            self.E, self.target,
            {i: f.images[self.base.index_of(g.name)] for i, g in enumerate(self.E.gens)},
            check=False)
        self.added: list[AddedGenerator] = []
        self._entry_cache: dict = {}
        self._counter = 0

    # -- cohomology bookkeeping -------------------------------------------

    def entry(self, j: int) -> DegreeEntry:
        key = (self.E._version, j)
        if key not in self._entry_cache:
            self._entry_cache[key] = compute_degree_entry(self.E, j)
        return self._entry_cache[key]

    def kernel_classes(self, j: int) -> list:
        """Cocycle representatives and orders generating ker H^j(psi)."""
        ee = self.entry(j)
        te = self.tgt_table.entry(j)
        if not ee.module.generators:
            return []
        fmat = self.psi.matrix_at(j)
        gcols = []
        for rep in ee.representatives:
            img = fmat.apply(self.E.vector_of(rep, j))
            gcols.append({i: c for i, c in enumerate(te.module.class_coords(img)) if c})
        tgt_orders = te.module.orders
        qcols = [{i: Fraction(d)} for i, d in enumerate(tgt_orders) if d]
        GQ = Matrix(len(tgt_orders), len(gcols) + len(qcols), gcols + qcols)
        s = len(ee.module.generators)
        combos = []
        for k in kernel_basis(GQ, self.ring):
            x = {i: v for i, v in k.items() if i < s}
            if x:
                combos.append(x)
        if not combos:
            return []
        # Cocycles spanning the kernel classes.
        n = self.E.dim(j)
        t_vecs = []
        for c in combos:
            vec: dict = {}
            for i, coef in c.items():
                for row, val in self.E.vector_of(ee.representatives[i], j).items():
                    y = vec.get(row, Fraction(0)) + coef * val
                    if y:
                        vec[row] = y
                    else:
                        vec.pop(row, None)
            if vec:
                t_vecs.append(vec)
        w_gens = [dict(c) for c in self.E.differential_matrix(j - 1).cols]
        km = SubquotientModule(n, t_vecs + w_gens, w_gens, self.ring)
        out = []
        for vec, order in zip(km.generators, km.orders):
            el = self.E.element_from_vec(j, vec)
            if not el.is_zero():
                out.append((el, order))
        return out

    # -- extension steps ----------------------------------------------------

    def _new_gen(self, prefix: str, degree: int, step: int, kind: str) -> str:
        self._counter += 1
        name = self.E.fresh_name(f"{prefix}{degree}_{self._counter}")
        self.E.extend([Generator(name, degree, None)])
        self.added.append(AddedGenerator(name, degree, step, kind))
        return name

    def kill_kernel(self, j: int, kernel: list, step: int):
        """Adjoin degree j-1 generators u with d u = z for each adapted class."""
        if j - 1 < self.E.connectivity + 1:
            raise HypothesisViolated(
                "splitting", j,
                "killing a kernel class would need a generator below the "
                "connectivity bound (the asserted direct-sum splitting fails here)")
        kind = "kernel" if kernel and step == j else "cascade"
        plans = []
        for z_el, _order in kernel:
            img = self.psi.apply(z_el)
            b = self.tgt_table.boundary_preimage(img)
            if b is None:
                raise MildError("internal: kernel class does not map to a coboundary")
            plans.append((z_el, b))
        for z_el, b in plans:
            name = self._new_gen("u" if kind == "kernel" else "w", j - 1, step, kind)
            self.E.set_differential(name, z_el)
            self.psi.images[self.E.index_of(name)] = b

    def fix_surjectivity(self, k1: int, step: int):
        """Adjoin cocycle generators hitting adapted generators of the
        cokernel of H^k1(psi)."""
        te = self.tgt_table.entry(k1)
        t = len(te.module.generators)
        if t == 0:
            return
        ee = self.entry(k1)
        fmat = self.psi.matrix_at(k1)
        gcols = []
        for rep in ee.representatives:
            img = fmat.apply(self.E.vector_of(rep, k1))
            gcols.append({i: c for i, c in enumerate(te.module.class_coords(img)) if c})
        qcols = [{i: Fraction(d)} for i, d in enumerate(te.module.orders) if d]
        std = [{i: Fraction(1)} for i in range(t)]
        coker = SubquotientModule(t, std, qcols + gcols, self.ring)
        for beta in coker.generators:
            el = self.tgt_amb.zero()
            for i, c in beta.items():
                el = el + te.representatives[i].scale(c)
            if el.is_zero():
                continue
            name = self._new_gen("c", k1, step, "surjectivity")
            self.psi.images[self.E.index_of(name)] = el

    def run(self) -> RelativeModel:
        hi = self.hi
        for k in range(1, hi + 1):
            guard = 0
            j = 2
            while j <= k:
                guard += 1
                if guard > 60 * (hi + 1):
                    raise WindowExhausted(
                        f"kernel stabilization did not converge at step {k}", k - 1)
                kernel = self.kernel_classes(j)
                if kernel:
                    self.kill_kernel(j, kernel, step=k)
                    j = max(2, j - 1)
                else:
                    j += 1
            if k < hi:
                self.fix_surjectivity(k + 1, step=k)

        projection = AlgebraMorphism(self.E, self.target, self.psi.images, check=False)
        projection.check_chain_map(window_top=hi + 1)
        ok, bad = is_quasi_iso(projection, self.window, tgt_table=self.tgt_table)
        if not ok:
            raise MildError(
                f"internal: constructed projection fails to be a quasi-iso at degree {bad}")
        inclusion = AlgebraMorphism(
            self.base, self.E,
            {i: self.E.gen(g.name) for i, g in enumerate(self.base.gens)},
            kind="inclusion")
        for i, g in enumerate(self.base.gens):
            want = self.f.images[i]
            got = projection.apply(inclusion.images[i])
            if got != want:
                raise MildError(f"internal: projection does not extend f on {g.name}")
        return RelativeModel(
            modeled=self.f, base=self.base, target=self.target, extension=self.E,
            added=self.added, inclusion=inclusion, projection=projection,
            window=self.window)


def relative_model(f: AlgebraMorphism, flavor: str, window: tuple) -> RelativeModel:
    """Factor f as (inclusion into a free extension) o (quasi-isomorphism).

    flavor "commutative" builds base (x) Lambda V; flavor "tensor" builds the
    free product with a tensor algebra (added generators commute with
    nothing).  Hypotheses (i)-(v) are machine-checked first.
    """
    return _Builder(f, flavor, window).run()


@dataclass
class MinimalityEntry:
    name: str
    degree: int
    decomposable: bool
    factor: Fraction  # content of the linear part; 1 when decomposable

    @property
    def is_unit_factor(self) -> bool:
        return self.factor == 1


@dataclass
class MinimalityReport:
    entries: list

    def all_decomposable(self) -> bool:
        return all(e.decomposable for e in self.entries)

    def nondecomposable(self) -> list:
        return [e for e in self.entries if not e.decomposable]


def check_minimality(model: RelativeModel) -> MinimalityReport:
    """Per added generator: is d(gen) free of linear terms in the added
    generators, and if not, the gcd content of those linear coefficients."""
    E = model.extension
    ring = E.ring
    added = {E.index_of(a.name) for a in model.added}
    entries = []
    for a in model.added:
        dg = E.differentials.get(E.index_of(a.name))
        lin = []
        if dg is not None:
            for mono, c in dg.terms.items():
                if len(mono) == 1 and mono[0] in added:
                    lin.append(c)
        if not lin:
            entries.append(MinimalityEntry(a.name, a.degree, True, Fraction(1)))
        else:
            g = Fraction(0)
            for c in lin:
                g = ring.gcd(g, c)
            entries.append(MinimalityEntry(a.name, a.degree, False, g))
    return MinimalityReport(entries)


def _topo_order(A: FreeGradedAlgebra) -> list:
    """Generator order in which every differential only mentions earlier
    generators; fails if the presentation is not a free extension."""
    deps: dict[int, set] = {}
    for i in range(len(A.gens)):
        dg = A.differentials.get(i)
        used: set = set()
        if dg is not None:
            for mono in dg.terms:
                used.update(mono)
        deps[i] = used
    placed: list[int] = []
    placed_set: set = set()
    remaining = sorted(range(len(A.gens)), key=lambda i: (A.gens[i].degree, A.gens[i].name))
    while remaining:
        progress = [i for i in remaining if deps[i] <= placed_set]
        if not progress:
            raise MildError("source differential is not triangular (not a free extension)")
        for i in progress:
            placed.append(i)
            placed_set.add(i)
        remaining = [i for i in remaining if i not in placed_set]
    return placed


def lift(psi: AlgebraMorphism, eta: AlgebraMorphism, window: tuple) -> AlgebraMorphism:
    """phi with eta o phi = psi, built stratum by stratum.

    eta must be degreewise surjective and a quasi-isomorphism in the window;
    for each generator v the combined system eta(x) = psi(v), d(x) = phi(dv)
    is solved exactly in the degree component (LiftFailed flags a violated
    precondition, never a guess).
    """
    if ambient_algebra(psi.target) is not ambient_algebra(eta.target):
        raise MildError("psi and eta must share a target")
    src = psi.source
    A = eta.source
    if isinstance(A, QuotientAlgebra):
        raise MildError("lift lands in a free presentation only")
    B = psi.target
    B_amb = ambient_algebra(B)
    lo, hi = window
    A.set_cap(hi + 1)
    B_amb.set_cap(hi + 1)

    for k in range(lo, hi + 1):
        if not eta.is_cochain_surjective(k):
            raise NotSurjective(k, "eta")
    ok, bad = is_quasi_iso(eta, window)
    if not ok:
        raise NotQuasiIso(bad, "eta")

    order = _topo_order(src)
    images: dict[int, Element] = {}

    def apply_partial(el: Element) -> Element:
        out = A.zero()
        for mono, c in el.terms.items():
            prod = A.one()
            for i in mono:
                prod = prod * images[i]
                if prod.is_zero():
                    break
            out = out + prod.scale(c)
        return out

    for i in order:
        g = src.gens[i]
        n = g.degree
        if n > hi:
            raise WindowExhausted(
                f"generator {g.name} of degree {n} lies beyond the window", hi)
        rhs1 = psi.apply(Element(src, {(i,): Fraction(1)}))
        dv = src.differentials.get(i)
        rhs2 = apply_partial(dv) if dv is not None else A.zero()

        eta_mat = eta.matrix_at(n)
        p_cols = B.ideal_cols(n) if isinstance(B, QuotientAlgebra) else []
        P = Matrix(B_amb.dim(n), len(p_cols), [dict(c) for c in p_cols])
        dmat = A.differential_matrix(n)
        Zblk = Matrix(dmat.nrows, len(p_cols))
        M = Matrix.block([[eta_mat, P], [dmat, Zblk]])
        b: dict = dict(B_amb.vector_of(rhs1, n))
        off = B_amb.dim(n)
        for r, v in A.vector_of(rhs2, n + 1).items():
            b[off + r] = v
        sol = solve_linear(M, b, A.ring)
        if sol is None:
            raise LiftFailed(g.name, n)
        a_vec = {r: v for r, v in sol.items() if r < A.dim(n)}
        images[i] = A.element_from_vec(n, a_vec)

    phi = AlgebraMorphism(src, A, images, kind="lift")
    for i in order:
        got = eta.apply(phi.images[i])
        want = psi.apply(Element(src, {(i,): Fraction(1)}))
        diff = got - want
        if not diff.is_zero():
            if not (isinstance(B, QuotientAlgebra) and B.contains_in_ideal(diff)):
                raise MildError("internal: lift verification failed")
    return phi
