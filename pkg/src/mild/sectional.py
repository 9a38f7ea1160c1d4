"""Sectional-category style invariants of surjective morphisms.

For a surjective phi: A -> B this module builds the two towers of levels m:

* p-side: the projection of A^{(x)m+1} onto its quotient by the slotwise
  kernel ideal, its relative model with added generators W_(m), and the
  base-changed inclusion of A into A (x) Lambda W_(m) (differential
  transported along the fold map);
* Gamma-side: the projection of A onto A / (ker phi)^{m+1} and its relative
  model, whose inclusion plays the same role.

On top of the towers: homology injectivity levels, module-retraction levels
(an exact linear problem), the nilpotency of ker H(phi) and of ker(phi),
and a certified upper-bound search for the homology nilpotency.  Multiplicative
retractions are only ever *verified*, never searched for.  Every value
carries a status: "exact", "saturated" (window truncation), "unknown", or
"gt_max" (level search exhausted).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import (
    AlgebraMorphism,
    Element,
    FreeGradedAlgebra,
    Generator,
    HomogeneousIdeal,
    QuotientAlgebra,
    ambient_algebra,
    d_closure,
    ideal_power,
    module_basis_monos,
    mu_n,
    quotient,
    split_base_added,
    tensor_power,
)
from .coeff import CoefficientRing, INFINITY, primes_from
from .cohomology import (
    CohomologyTable,
    cohomology,
    induced_map_on_H,
    is_acyclic_ideal,
    is_admissible,
    is_H_mild,
)
from .errors import HypothesisViolated, MildError, NotSurjective
from .linalg import LinearSolver, Matrix, kernel_basis, solve_linear
from .models import RelativeModel, relative_model

LOOP_SPACE_ASSUMPTION = (
    "user assertion: the loop-space homology of the modeled space is R-torsion free"
)


def ring_enlargement(ring: CoefficientRing, m: int) -> CoefficientRing:
    """Smallest superset of inverted primes with rho(new) >= m * rho(old)."""
    if ring.is_field or m <= 1:
        return ring
    target = m * ring.rho()
    extra = []
    for p in primes_from(2):
        if p >= target:
            break
        if p not in ring.inverted_primes:
            extra.append(p)
    if not extra:
        return ring
    return CoefficientRing.localized(*ring.inverted_primes, *extra)


# -- kernel ideal ----------------------------------------------------------


def kernel_ideal(phi: AlgebraMorphism, window: tuple) -> HomogeneousIdeal:
    """ker(phi) as an ideal, generated degreewise up to the window top.

    For fold maps the difference generators are seeded; generation is then
    verified per degree by span comparison against the cochain kernel, and
    any deficit augments the generator list.
    """
    A = phi.source
    hi = window[1]
    A.set_cap(hi + 1)
    gens: list[Element] = []
    if phi.kind == "mu":
        base, n = phi.mu_data
        if n > 1:
            for g in base.gens:
                for copy in range(1, n):
                    gens.append(A.gen(f"{g.name}_{copy}") - A.gen(f"{g.name}_{n}"))
    tgt = phi.target
    tgt_amb = ambient_algebra(tgt)
    for k in range(2, hi + 1):
        fmat = phi.matrix_at(k)
        if isinstance(tgt, QuotientAlgebra):
            pcols = tgt.ideal_cols(k)
            aug = Matrix(tgt_amb.dim(k), fmat.ncols + len(pcols),
                         [dict(c) for c in fmat.cols] + [dict(c) for c in pcols])
            kvecs = [{i: v for i, v in kv.items() if i < A.dim(k)}
                     for kv in kernel_basis(aug, A.ring)]
            kvecs = [v for v in kvecs if v]
        else:
            kvecs = kernel_basis(fmat, A.ring)
        if not kvecs:
            continue
        span = HomogeneousIdeal(A, gens)
        for v in kvecs:
            el = A.element_from_vec(k, v)
            if not span.contains(el):
                gens.append(el)
                span = HomogeneousIdeal(A, gens)
    return HomogeneousIdeal(A, gens, label="ker")


def _check_surjective(phi: AlgebraMorphism, window: tuple):
    for k in range(window[0], window[1] + 1):
        if not phi.is_cochain_surjective(k):
            raise NotSurjective(k, "phi")


# -- the two towers --------------------------------------------------------


@dataclass
class SectionalInstance:
    side: str  # "p" | "gamma"
    phi: AlgebraMorphism
    m: int
    window: tuple
    kernel: HomogeneousIdeal
    model: RelativeModel
    extension: FreeGradedAlgebra
    inclusion: AlgebraMorphism    # j_m (p-side) or iota_m (Gamma-side)
    added: set                    # indices of the adjoined generators in extension
    tensor_alg: FreeGradedAlgebra | None = None
    p_or_gamma: AlgebraMorphism | None = None
    i_m: AlgebraMorphism | None = None
    mu_bar: AlgebraMorphism | None = None
    pushout_commutes: bool | None = None


def build_gamma(phi: AlgebraMorphism, m: int, window: tuple,
                kernel: HomogeneousIdeal | None = None) -> SectionalInstance:
    """Gamma_m: A -> A/(ker phi)^{m+1} with its relative model."""
    A = phi.source
    hi = window[1]
    _check_surjective(phi, window)
    K = kernel if kernel is not None else kernel_ideal(phi, window)
    Kp = ideal_power(K, m + 1)
    Aq = quotient(A, Kp, hi + 1)
    gamma = AlgebraMorphism(A, Aq, {g.name: A.gen(g.name) for g in A.gens},
                            kind="projection")
    model = relative_model(gamma, A.flavor, window)
    added = {model.extension.index_of(a.name) for a in model.added}
    return SectionalInstance(
        side="gamma", phi=phi, m=m, window=window, kernel=K, model=model,
        extension=model.extension, inclusion=model.inclusion, added=added,
        p_or_gamma=gamma)


def _letter_map_morphism(src: FreeGradedAlgebra, tgt: FreeGradedAlgebra,
                         name_map: dict, kind: str | None = None) -> AlgebraMorphism:
    images = {i: tgt.gen(name_map[g.name]) for i, g in enumerate(src.gens)}
    return AlgebraMorphism(src, tgt, images, kind=kind, check=False)


def build_p(phi: AlgebraMorphism, m: int, window: tuple,
            kernel: HomogeneousIdeal | None = None) -> SectionalInstance:
    """p_m: A^{(x)m+1} -> quotient by the slotwise kernel ideal, its model,
    and the base-changed inclusion j_m with the pushout square checked."""
    A = phi.source
    hi = window[1]
    _check_surjective(phi, window)
    K = kernel if kernel is not None else kernel_ideal(phi, window)

    T = tensor_power(A, m + 1, cap=hi + 1)
    slot_name = (lambda g, c: f"{g.name}_{c}") if m > 0 else (lambda g, c: g.name)
    fold = AlgebraMorphism(T, A, {
        T.index_of(slot_name(g, copy)): A.gen(g.name)
        for copy in range(1, m + 2) for g in A.gens}, kind="mu", check=False)

    # Copywise kernel ideal: generated by products of one kernel element per
    # copy, in copy order.  For the commutative flavor the degree components
    # are exactly the spans of products of degreewise kernel bases; for the
    # tensor flavor (free product) the same products generate it as a
    # two-sided ideal.
    slot_map = {copy: {i: T.index_of(slot_name(g, copy)) for i, g in enumerate(A.gens)}
                for copy in range(1, m + 2)}

    def embed(el: Element, copy: int) -> Element:
        mapping = slot_map[copy]
        return T.element({tuple(mapping[i] for i in mono): c for mono, c in el.terms.items()})

    hi_cap = hi + 1

    def kernel_cols(d: int) -> list:
        return K.degree_basis(d)

    if A.flavor == "commutative":
        def slot_rule(degree: int) -> list:
            out = []
            slots = m + 1
            kbases = {d: kernel_cols(d) for d in range(2, degree - 2 * m + 1)}

            def rec(slot: int, remaining: int, acc: Element | None):
                if slot > slots:
                    if remaining == 0 and acc is not None and not acc.is_zero():
                        out.append(T.vector_of(acc, degree))
                    return
                min_rest = 2 * (slots - slot)
                for d in range(2, remaining - min_rest + 1):
                    for b in kbases.get(d, []):
                        e = embed(b, slot)
                        nxt = e if acc is None else acc * e
                        if not nxt.is_zero():
                            rec(slot + 1, remaining - d, nxt)

            rec(1, degree, None)
            return out

        Ktensor = HomogeneousIdeal(T, gens=None, basis_rule=slot_rule, label="ker^(x)")
    else:
        kbases = {d: kernel_cols(d) for d in range(2, hi_cap - 2 * m + 1)}
        tensor_gens: list[Element] = []

        def build_gens(slot: int, remaining: int, acc: Element | None):
            if slot > m + 1:
                if acc is not None and not acc.is_zero():
                    tensor_gens.append(acc)
                return
            min_rest = 2 * (m + 1 - slot)
            for d in range(2, remaining - min_rest + 1):
                for b in kbases.get(d, []):
                    e = embed(b, slot)
                    nxt = e if acc is None else acc * e
                    if not nxt.is_zero():
                        build_gens(slot + 1, remaining - d, nxt)

        build_gens(1, hi_cap, None)
        Ktensor = HomogeneousIdeal(T, gens=tensor_gens, label="ker^(x)")
    Tq = quotient(T, Ktensor, hi + 1)
    p_m = AlgebraMorphism(T, Tq, {g.name: T.gen(g.name) for g in T.gens},
                          kind="projection")
    model = relative_model(p_m, A.flavor, window)
    Ep = model.extension

    # Base change along the fold map: A (x) Lambda W_(m) with d(w) = mu_bar(d w).
    w_names = {}
    gens = [Generator(g.name, g.degree, g.slot) for g in A.gens]
    AW = FreeGradedAlgebra(A.ring, A.flavor, gens, cap=hi + 1,
                           connectivity=A.connectivity)
    for a in model.added:
        name = AW.fresh_name(a.name)
        w_names[a.name] = name
        AW.extend([Generator(name, a.degree, None)])

    name_map = {}
    for copy in range(1, m + 2):
        for g in A.gens:
            name_map[slot_name(g, copy)] = g.name
    for a in model.added:
        name_map[a.name] = w_names[a.name]

    for i, dg in A.differentials.items():
        AW.set_differential(A.gens[i].name,
                            AW.element({tuple(AW.index_of(A.gens[j].name) for j in mono): c
                                        for mono, c in dg.terms.items()}))
    # Transport the W differentials along the fold-extension morphism; the
    # morphism's apply() accumulates monomials that fold together, with the
    # correct Koszul signs.
    mu_bar = _letter_map_morphism(Ep, AW, name_map, kind="fold-extension")
    for a in model.added:
        dw = Ep.differentials.get(Ep.index_of(a.name))
        if dw is not None:
            AW.set_differential(w_names[a.name], mu_bar.apply(dw))
    AW.validate()

    j_m = AlgebraMorphism(A, AW, {g.name: AW.gen(g.name) for g in A.gens},
                          kind="inclusion")
    j_m.check_chain_map()
    mu_bar._matrix_cache.clear()  # AW's differentials were finalized after creation
    mu_bar.check_chain_map()

    pushout = all(
        j_m.apply(fold.images[i]) == mu_bar.apply(model.inclusion.images[i])
        for i in range(len(T.gens)))

    added = {AW.index_of(w_names[a.name]) for a in model.added}
    return SectionalInstance(
        side="p", phi=phi, m=m, window=window, kernel=K, model=model,
        extension=AW, inclusion=j_m, added=added, tensor_alg=T,
        p_or_gamma=p_m, i_m=model.inclusion, mu_bar=mu_bar,
        pushout_commutes=pushout)


# -- module retractions ----------------------------------------------------


def module_retraction(inst: SectionalInstance):
    """An A-module chain retraction r of the inclusion, or None.

    Unknowns are r(1 (x) omega) for the module-basis monomials omega of the
    extension; constraints are r(1)=1 and commutation with d, expanded in
    the A-module basis.  The solution is re-verified before being returned.
    """
    E = inst.extension
    A = inst.inclusion.source
    ring = A.ring
    hi = inst.window[1]
    added = inst.added

    base_name_of = {i: E.gens[i].name for i in range(len(E.gens)) if i not in added}

    def base_to_A(mono) -> Element:
        return Element(A, {tuple(A.index_of(base_name_of[i]) for i in mono): Fraction(1)})

    omegas = []
    for g in range(0, hi + 1):
        for w in module_basis_monos(E, added, g):
            omegas.append((w, g))
    index_of_omega = {w: k for k, (w, g) in enumerate(omegas)}

    offsets = {}
    total = 0
    for w, g in omegas:
        offsets[w] = total
        total += A.dim(g)

    unit_vec = {offsets[()]: Fraction(1)}  # r(1) = 1 in the A^0 coordinate

    mult_cache: dict = {}

    def mult_matrix(base_mono, src_deg: int) -> Matrix:
        key = (base_mono, src_deg)
        if key not in mult_cache:
            b_el = base_to_A(base_mono)
            tgt_deg = src_deg + b_el.degree
            cols = []
            for mono in A.monomial_basis(src_deg):
                prod = b_el * Element(A, {mono: Fraction(1)})
                cols.append(A.vector_of(prod, tgt_deg) if not prod.is_zero() else {})
            mult_cache[key] = Matrix(A.dim(tgt_deg), A.dim(src_deg), cols)
        return mult_cache[key]

    rows = []       # list of (sparse block as {(row, col): coeff}, block height)
    eq_omegas = []  # which omega each constraint block came from

    for w, g in omegas:
        dE = E.d(Element(E, {w: Fraction(1)}))
        terms = []  # (coeff, base_mono, omega_mono)
        expressible = True
        for mono, c in dE.terms.items():
            bm, wm, sgn = split_base_added(E, mono, added)
            if wm not in index_of_omega:
                expressible = False
                break
            terms.append((sgn * c, bm, wm))
        if not expressible:
            continue
        eq_omegas.append(w)
        block: dict = {}

        def add_block(col0: int, mat: Matrix, scale: Fraction, row0: int):
            for j, col in enumerate(mat.cols):
                for i, v in col.items():
                    key = (row0 + i, col0 + j)
                    val = block.get(key, Fraction(0)) + scale * v
                    if val:
                        block[key] = val
                    else:
                        block.pop(key, None)

        nrows = A.dim(g + 1)
        for c, bm, wm in terms:
            mat = mult_matrix(bm, g + 1 - sum(E.gens[i].degree for i in bm))
            add_block(offsets[wm], mat, c, 0)
        dmat = A.differential_matrix(g)
        add_block(offsets[w], dmat, Fraction(-1), 0)
        rows.append((block, nrows))

    cols_total = total
    bigcols = [dict() for _ in range(cols_total)]
    rhs: dict = {}
    row0 = 0
    for block, nr in rows:
        for (i, j), v in block.items():
            bigcols[j][row0 + i] = v
        row0 += nr
    M = Matrix(row0, cols_total, bigcols)

    # Pin the unit block: move x_unit = e_1 to the right-hand side.
    unit_off = offsets[()]
    unit_width = A.dim(0)
    for j in range(unit_off, unit_off + unit_width):
        colj = M.cols[j]
        coeff = Fraction(1) if j == unit_off else Fraction(0)
        if coeff:
            for i, v in colj.items():
                y = rhs.get(i, Fraction(0)) - v * coeff
                if y:
                    rhs[i] = y
                else:
                    rhs.pop(i, None)
        M.cols[j] = {}

    sol = solve_linear(M, rhs, ring)
    if sol is None:
        return None

    images = {(): A.one()}
    for w, g in omegas:
        if w == ():
            continue
        off = offsets[w]
        vec = {i - off: v for i, v in sol.items() if off <= i < off + A.dim(g)}
        images[w] = A.element_from_vec(g, vec)

    # Re-verify: the retraction commutes with d on every expressible omega.
    for w in eq_omegas:
        g = E.mono_degree(w)
        dE = E.d(Element(E, {w: Fraction(1)}))
        lhs = A.zero()
        for mono, c in dE.terms.items():
            bm, wm, sgn = split_base_added(E, mono, added)
            lhs = lhs + (base_to_A(bm) * images[wm]).scale(sgn * c)
        rhs_el = A.d(images[w])
        if lhs != rhs_el:
            raise MildError("internal: retraction certificate failed re-verification")
    return images


def retraction_as_morphism(inst: SectionalInstance, gen_images: dict) -> AlgebraMorphism:
    """Extend added-generator images (elements of A, keyed by generator name)
    to a candidate algebra retraction; base generators map to themselves."""
    E = inst.extension
    A = inst.inclusion.source
    out = {}
    for i, g in enumerate(E.gens):
        if i in inst.added:
            if g.name not in gen_images:
                raise MildError(f"candidate misses an image for {g.name}")
            out[i] = gen_images[g.name]
        else:
            out[i] = A.gen(g.name)
    return AlgebraMorphism(E, A, out, kind="retraction-candidate")


def verify_multiplicative_retraction(candidate: AlgebraMorphism,
                                     inst: SectionalInstance):
    """Check that candidate is a cdga/dga retraction of the inclusion.

    Multiplicativity holds by construction (the candidate is generated by
    generator images); what is verified is the chain condition on every
    generator and r o inclusion = id on the base.  Success certifies
    secat <= m (p-side) or sc <= m (Gamma-side) for the instance's level.
    """
    E = inst.extension
    A = inst.inclusion.source
    if candidate.source is not E or ambient_algebra(candidate.target) is not A:
        return False, "candidate does not map the extension onto the base"
    for i, g in enumerate(E.gens):
        if i not in inst.added:
            if candidate.images[i] != A.gen(g.name):
                return False, f"r({g.name}) != {g.name}: not a retraction of the inclusion"
    for i, g in enumerate(E.gens):
        defect = candidate.chain_defect(i)
        if not defect.is_zero():
            return False, f"chain condition fails on {g.name}: r(d {g.name}) - d r({g.name}) = {defect}"
    return True, ""


# -- nilpotency invariants --------------------------------------------------


@dataclass
class MemberValue:
    value: int | None
    status: str  # "exact" | "saturated" | "unknown" | "gt_max"
    witness: str = ""

    def display(self) -> str:
        if self.status == "exact":
            return str(self.value)
        if self.status == "saturated":
            return f">= {self.value}"
        if self.status == "gt_max":
            return f"> {self.value}"
        return "unknown"

    def to_json(self) -> dict:
        out = {"status": self.status, "value": self.value}
        if self.witness:
            out["witness"] = self.witness
        return out


def kernel_h_classes(phi: AlgebraMorphism, window: tuple,
                     src_table: CohomologyTable | None = None,
                     tgt_table: CohomologyTable | None = None) -> list:
    """Representative cocycles generating ker H(phi), all degrees in window."""
    src_table = src_table or cohomology(phi.source, window)
    tgt_table = tgt_table or cohomology(phi.target, window)
    A = phi.source
    out = []
    for k in range(max(2, window[0]), window[1] + 1):
        se = src_table.entry(k)
        if not se.module.generators:
            continue
        te = tgt_table.entry(k)
        fmat = phi.matrix_at(k)
        gcols = []
        for rep in se.representatives:
            img = fmat.apply(A.vector_of(rep, k))
            gcols.append({i: c for i, c in enumerate(te.module.class_coords(img)) if c})
        qcols = [{i: Fraction(d)} for i, d in enumerate(te.module.orders) if d]
        GQ = Matrix(len(te.module.orders), len(gcols) + len(qcols), gcols + qcols)
        s = len(se.module.generators)
        for kv in kernel_basis(GQ, A.ring):
            x = {i: v for i, v in kv.items() if i < s}
            if not x:
                continue
            el = A.zero()
            for i, co in x.items():
                el = el + se.representatives[i].scale(co)
            if not el.is_zero() and not src_table.is_coboundary(el):
                out.append(el)
    return out


def nil_ker_h(phi: AlgebraMorphism, window: tuple,
              src_table: CohomologyTable | None = None,
              tgt_table: CohomologyTable | None = None) -> MemberValue:
    """Longest nonzero product of classes in ker H(phi), window-certified.

    Products that vanish at cochain level are decided symbolically in any
    degree; only a nonzero cochain product beyond the window makes the
    answer a saturation bound instead of an exact count.
    """
    src_table = src_table or cohomology(phi.source, window)
    gens = kernel_h_classes(phi, window, src_table, tgt_table)
    if not gens:
        return MemberValue(0, "exact")
    hi = window[1]
    level = 1
    current = list(gens)
    best_witness = str(gens[0])
    saturated = False
    while True:
        nxt = []
        for p in current:
            for g in gens:
                q = p * g
                if q.is_zero():
                    continue
                if q.degree > hi:
                    saturated = True
                    continue
                if not src_table.is_coboundary(q):
                    nxt.append(q)
        if not nxt:
            break
        level += 1
        best_witness = str(nxt[0])
        current = nxt
        if saturated:
            break
    if saturated:
        return MemberValue(level, "saturated", best_witness)
    return MemberValue(level, "exact", best_witness)


def _power_zero_symbolically(K: HomogeneousIdeal, k: int) -> bool:
    """All k-fold products of the generators vanish identically (commutative
    finitely generated ideals only; this certifies (ker)^k = 0 globally)."""
    if K._rule is not None:
        return False
    if not K.gens:
        return True
    if K.ambient.flavor != "commutative":
        return False
    for combo in itertools.combinations_with_replacement(K.gens, k):
        prod = combo[0]
        for el in combo[1:]:
            prod = prod * el
            if prod.is_zero():
                break
        if not prod.is_zero():
            return False
    return True


def _nonzero_in_window(I: HomogeneousIdeal, hi: int):
    for d in range(2, hi + 1):
        cols = I.degree_cols(d)
        if cols:
            return d
    return None


def nil_ker(phi: AlgebraMorphism, window: tuple,
            kernel: HomogeneousIdeal | None = None) -> MemberValue:
    """Largest k with (ker phi)^k nonzero as an ideal inside the window."""
    K = kernel if kernel is not None else kernel_ideal(phi, window)
    hi = window[1]
    if _nonzero_in_window(K, hi) is None:
        return MemberValue(0, "exact")
    k = 1
    while True:
        nxt = ideal_power(K, k + 1)
        if _nonzero_in_window(nxt, hi) is None:
            if _power_zero_symbolically(K, k + 1):
                return MemberValue(k, "exact")
            return MemberValue(k, "saturated")
        k += 1


def hnil_upper_bound(phi: AlgebraMorphism, window: tuple,
                     extra_candidates: list | None = None,
                     kernel: HomogeneousIdeal | None = None) -> MemberValue:
    """Smallest k with (ker phi)^{k+1} zero or inside a certified acyclic
    ideal; an upper-bound search, "unknown" when nothing certifies."""
    K = kernel if kernel is not None else kernel_ideal(phi, window)
    hi = window[1]
    extra = list(extra_candidates or [])
    k = 0
    while True:
        power = ideal_power(K, k + 1)
        nz = _nonzero_in_window(power, hi)
        if nz is None:
            if _power_zero_symbolically(K, k + 1):
                return MemberValue(k, "exact", witness="power vanishes identically")
            return MemberValue(None, "unknown")
        candidates = [(d_closure(power), True)] + [(J, False) for J in extra]
        for J, auto in candidates:
            if not auto:
                contained = True
                for d in range(2, hi + 1):
                    jc = J.degree_cols(d)
                    solver = LinearSolver(
                        Matrix(J.ambient.dim(d), len(jc), [dict(c) for c in jc]),
                        J.ambient.ring)
                    if any(not solver.contains(v) for v in power.degree_cols(d)):
                        contained = False
                        break
                if not contained:
                    continue
            try:
                ok, _bad = is_acyclic_ideal(J, (0, hi))
            except MildError:
                continue
            if ok:
                label = "auto d-closure of the power" if auto else "supplied candidate"
                return MemberValue(k, "exact", witness=label)
        k += 1
        if k > hi:
            return MemberValue(None, "unknown")


# -- level searches ----------------------------------------------------------


def hsecat(phi, m_max: int, window: tuple, instances: dict | None = None,
           kernel=None) -> MemberValue:
    """Least m with H(j_m) injective through the window."""
    return _injectivity_level(phi, m_max, window, "p", instances, kernel)


def hsc(phi, m_max: int, window: tuple, instances: dict | None = None,
        kernel=None) -> MemberValue:
    """Least m with H(iota_m) injective through the window."""
    return _injectivity_level(phi, m_max, window, "gamma", instances, kernel)


def _get_instance(phi, m, window, side, instances, kernel):
    """Build (or fetch) a level; a HypothesisViolated is cached as a failure
    marker, because no model of that level exists in the mild category."""
    if instances is not None and (side, m) in instances:
        got = instances[(side, m)]
        if isinstance(got, HypothesisViolated):
            raise got
        return got
    try:
        inst = (build_p if side == "p" else build_gamma)(phi, m, window, kernel=kernel)
    except HypothesisViolated as exc:
        if instances is not None:
            instances[(side, m)] = exc
        raise
    if instances is not None:
        instances[(side, m)] = inst
    return inst


def _injectivity_level(phi, m_max, window, side, instances, kernel) -> MemberValue:
    for m in range(m_max + 1):
        try:
            inst = _get_instance(phi, m, window, side, instances, kernel)
        except HypothesisViolated:
            continue  # the level has no model in this category; it cannot certify
        ind = induced_map_on_H(inst.inclusion, window)
        if ind.all_injective():
            return MemberValue(m, "exact")
    return MemberValue(m_max, "gt_max")


def msecat(phi, m_max: int, window: tuple, instances: dict | None = None,
           kernel=None, certificates: dict | None = None) -> MemberValue:
    """Least m such that j_m admits an A-module chain retraction."""
    return _retraction_level(phi, m_max, window, "p", instances, kernel, certificates)


def msc(phi, m_max: int, window: tuple, instances: dict | None = None,
        kernel=None, certificates: dict | None = None) -> MemberValue:
    """Least m such that iota_m admits an A-module chain retraction."""
    return _retraction_level(phi, m_max, window, "gamma", instances, kernel, certificates)


def _retraction_level(phi, m_max, window, side, instances, kernel, certificates) -> MemberValue:
    for m in range(m_max + 1):
        try:
            inst = _get_instance(phi, m, window, side, instances, kernel)
        except HypothesisViolated:
            continue
        images = module_retraction(inst)
        if images is not None:
            if certificates is not None:
                certificates[(side, m)] = images
            return MemberValue(m, "exact")
    return MemberValue(m_max, "gt_max")


# -- reports -----------------------------------------------------------------


@dataclass
class InvariantReport:
    kind: str
    n: int | None
    m_max: int
    window: tuple
    ring: CoefficientRing
    enlarged_ring: CoefficientRing
    members: dict
    brackets: dict = dc_field(default_factory=dict)
    assumptions: list = dc_field(default_factory=list)
    certificates: dict = dc_field(default_factory=dict)
    pushout_checks: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m_max": self.m_max,
            "window": list(self.window),
            "ring": self.ring.to_json(),
            "enlarged_ring": self.enlarged_ring.to_json(),
            "members": {k: v.to_json() for k, v in sorted(self.members.items())},
            "brackets": {k: list(v) for k, v in sorted(self.brackets.items())},
            "assumptions": list(self.assumptions),
            "certificates": {k: v for k, v in sorted(self.certificates.items())},
            "pushout_checks": {str(k): v for k, v in sorted(self.pushout_checks.items())},
        }

    def uncertified(self) -> bool:
        return any(v.status in ("saturated", "unknown", "gt_max")
                   for v in self.members.values())


def _battery(phi: AlgebraMorphism, m_max: int, window: tuple,
             extra_candidates=None) -> tuple:
    """Run every invariant on phi; returns (members, certificates, pushouts)."""
    K = kernel_ideal(phi, window)
    instances: dict = {}
    cert_images: dict = {}
    members = {
        "nil_ker_H": nil_ker_h(phi, window),
        "nil_ker": nil_ker(phi, window, kernel=K),
        "Hnil_ub": hnil_upper_bound(phi, window, extra_candidates, kernel=K),
        "Hsecat": hsecat(phi, m_max, window, instances, kernel=K),
        "msecat": msecat(phi, m_max, window, instances, kernel=K, certificates=cert_images),
        "Hsc": hsc(phi, m_max, window, instances, kernel=K),
        "msc": msc(phi, m_max, window, instances, kernel=K, certificates=cert_images),
    }
    certificates = {}
    for (side, m), images in sorted(cert_images.items()):
        inst = instances[(side, m)]
        E = inst.extension
        name = f"{'msecat' if side == 'p' else 'msc'}_retraction_m{m}"
        certificates[name] = {
            E.mono_str(w): str(el)
            for w, el in sorted(images.items(), key=lambda t: (E.mono_degree(t[0]), t[0]))
            if w != ()
        }
    for (side, m), got in sorted(instances.items()):
        if isinstance(got, HypothesisViolated):
            certificates[f"level_failure_{side}_m{m}"] = str(got)
    pushouts = {m: inst.pushout_commutes
                for (side, m), inst in instances.items()
                if side == "p" and isinstance(inst, SectionalInstance)}
    return members, certificates, pushouts, instances


def _certified_lower(mv: MemberValue) -> int:
    if mv.value is None:
        return 0
    if mv.status in ("exact", "saturated"):
        return mv.value
    if mv.status == "gt_max":
        return mv.value + 1
    return 0


def _brackets_from_members(members: dict, names: tuple) -> dict:
    """Bracket secat and sc between their computed relaxations:
    nil_ker_H <= Hsecat <= msecat <= secat <= sc <= Hnil_ub, and
    Hsc <= msc <= sc."""
    secat_lo = max(_certified_lower(members[k])
                   for k in ("nil_ker_H", "Hsecat", "msecat"))
    sc_lo = max(secat_lo, _certified_lower(members["Hsc"]),
                _certified_lower(members["msc"]))
    up = members["Hnil_ub"]
    hi = up.value if up.status == "exact" else None
    secat_name, sc_name = names
    return {secat_name: (secat_lo, hi), sc_name: (sc_lo, hi)}


def assemble_report(kind: str, phi: AlgebraMorphism, m_max: int, window: tuple,
                    ring0: CoefficientRing, ring1: CoefficientRing,
                    n: int | None = None, extra_candidates=None,
                    assumptions: list | None = None) -> InvariantReport:
    members, certificates, pushouts, _insts = _battery(phi, m_max, window, extra_candidates)
    if kind == "tc":
        names = (f"TC_{n}", f"tc_{n}")
    elif kind == "atc":
        names = (f"ATC_{n}", f"Atc_{n}")
    else:
        names = ("secat", "sc")
    brackets = _brackets_from_members(members, names)
    return InvariantReport(
        kind=kind, n=n, m_max=m_max, window=window, ring=ring0, enlarged_ring=ring1,
        members=members, brackets=brackets,
        assumptions=list(assumptions or []), certificates=certificates,
        pushout_checks=pushouts)


def tc_report(model: FreeGradedAlgebra, n: int, m_max: int, window: tuple,
              r: int = 1, ring_enlarge: str = "auto") -> InvariantReport:
    """The full battery on the n-fold product of a commutative model."""
    if model.flavor != "commutative":
        raise MildError("tc_report needs a commutative model")
    hi = window[1]
    model.set_cap(hi + 1)
    mild = is_H_mild(model, r, window)
    if mild.status == "not-mild":
        raise HypothesisViolated("mildness", mild.witness, mild.detail)
    if not is_admissible(model, r, window):
        raise HypothesisViolated("admissibility", r + 1, "H^{r+1} not free or low H nonzero")
    ring0 = model.ring
    ring1 = ring_enlargement(ring0, n - 1)
    if ring_enlarge == "off" and ring1 != ring0:
        raise MildError("ring enlargement required (Eq. plan) but disabled")
    work = model if ring1 == ring0 else model.copy_with_ring(ring1)
    work.set_cap(hi + 1)
    phi = mu_n(work, n, cap=hi + 1)
    assumptions = [LOOP_SPACE_ASSUMPTION]
    if mild.status == "uncertified":
        assumptions.append(f"mildness uncertified: {mild.detail}")
    rep = assemble_report("tc", phi, m_max, window, ring0, ring1, n=n,
                          assumptions=assumptions)
    return rep


def atc_report(model: FreeGradedAlgebra, n: int, m_max: int, window: tuple,
               r: int = 1, ring_enlarge: str = "auto",
               paired: InvariantReport | None = None) -> InvariantReport:
    """The battery on the n-fold product of a tensor-flavor (free) model."""
    if model.flavor != "tensor":
        raise MildError("atc_report needs a tensor-flavor model")
    for i, dg in model.differentials.items():
        for mono in dg.terms:
            if len(mono) == 1:
                raise HypothesisViolated(
                    "decomposable", model.gens[i].degree,
                    f"d({model.gens[i].name}) has a linear term")
    hi = window[1]
    model.set_cap(hi + 1)
    ring0 = model.ring
    ring1 = ring_enlargement(ring0, n - 1)
    if ring_enlarge == "off" and ring1 != ring0:
        raise MildError("ring enlargement required (Eq. plan) but disabled")
    work = model if ring1 == ring0 else model.copy_with_ring(ring1)
    work.set_cap(hi + 1)
    phi = mu_n(work, n, cap=hi + 1)
    rep = assemble_report("atc", phi, m_max, window, ring0, ring1, n=n,
                          assumptions=[LOOP_SPACE_ASSUMPTION])
    if paired is not None:
        # Juxtapose the commutative-model members for the same space; the
        # comparison morphism is out of scope, so the relation is recorded
        # per member, not asserted.
        comparison = {}
        for key, mv in sorted(rep.members.items()):
            other = paired.members.get(key)
            if other is None:
                continue
            entry = {"free_side": mv.to_json(), "commutative_side": other.to_json()}
            if mv.status == "exact" and other.status == "exact":
                entry["free_leq_commutative"] = mv.value <= other.value
            comparison[key] = entry
        rep.certificates["paired_comparison"] = comparison
    return rep


def morphism_with_ring(phi: AlgebraMorphism, ring: CoefficientRing) -> AlgebraMorphism:
    """The same generator-image presentation over a larger ring (free target)."""
    if isinstance(phi.target, QuotientAlgebra):
        raise MildError("cannot transport a quotient-target morphism across rings")
    src = phi.source.copy_with_ring(ring)
    tgt = phi.target.copy_with_ring(ring) if phi.target is not phi.source else src
    images = {}
    for i, el in phi.images.items():
        images[i] = Element(tgt, dict(el.terms))
    out = AlgebraMorphism(src, tgt, images, kind=phi.kind, check=False)
    if phi.kind == "mu" and hasattr(phi, "mu_data"):
        base, nn = phi.mu_data
        out.mu_data = (base.copy_with_ring(ring) if nn > 1 else tgt, nn)
    return out


def invariants_report(phi: AlgebraMorphism, m_max: int, window: tuple,
                      ring_enlarge: str = "auto",
                      extra_candidates=None) -> InvariantReport:
    """The battery on an arbitrary surjective morphism.

    The enlargement plan uses the largest level m = m_max.
    """
    ring0 = phi.source.ring
    ring1 = ring_enlargement(ring0, m_max) if ring_enlarge == "auto" else ring0
    if ring_enlarge == "off" and ring_enlargement(ring0, m_max) != ring0:
        raise MildError("ring enlargement required by the level plan but disabled")
    work = phi if ring1 == ring0 else morphism_with_ring(phi, ring1)
    work.source.set_cap(window[1] + 1)
    return assemble_report("invariants", work, m_max, window, ring0, ring1,
                           extra_candidates=extra_candidates)
