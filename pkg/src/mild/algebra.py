"""Free graded-commutative and tensor algebras over a coefficient ring.

An algebra is presented by generators with degrees and a differential on
generators, extended as a derivation.  Elements are stored as canonical
monomial -> coefficient maps:

* commutative flavor: a monomial is a multiset of generators, kept sorted
  in a fixed generator order with the Koszul sign absorbed into the
  coefficient; odd generators square to zero.
* tensor flavor: a monomial is a word.  Each generator carries a "slot";
  letters in different slots commute with the Koszul sign (so a slotted
  algebra is the graded tensor product of its per-slot tensor algebras),
  letters with slot None commute with nothing (free-product adjunction).
  The canonical word has non-decreasing slots inside every maximal slotted
  run.

All basis enumeration is truncated at a degree cap; multiplication and the
differential are symbolic and work in any degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .coeff import CoefficientRing, scalar_str
from .errors import DegreeCapError, DegreeError, MildError, NotDStable, RingError
from .linalg import Matrix, Vec, column_space_basis, LinearSolver

Mono = tuple  # tuple of generator indices, canonical form


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    slot: int | None = None

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class FreeGradedAlgebra:
    """A free (commutative or tensor) differential graded algebra."""

    def __init__(self, ring: CoefficientRing, flavor: str, gens, cap: int | None = None,
                 connectivity: int = 1):
        if flavor not in ("commutative", "tensor"):
            raise MildError(f"unknown flavor {flavor!r}")
        self.ring = ring
        self.flavor = flavor
        self.connectivity = connectivity
        self.gens: list[Generator] = []
        self._by_name: dict[str, int] = {}
        self.differentials: dict[int, Element] = {}
        self.cap = cap
        self._version = 0
        self._basis_cache: dict[int, list[Mono]] = {}
        self._index_cache: dict[int, dict[Mono, int]] = {}
        self._dmat_cache: dict[int, Matrix] = {}
        for g in gens:
            if isinstance(g, Generator):
                self._add_generator(g)
            else:
                name, degree = g[0], g[1]
                slot = g[2] if len(g) > 2 else None
                self._add_generator(Generator(name, degree, slot))

    def _add_generator(self, g: Generator):
        if g.name in self._by_name:
            raise MildError(f"duplicate generator name {g.name!r}")
        if g.degree < self.connectivity + 1:
            raise DegreeError(
                f"generator {g.name} has degree {g.degree} < {self.connectivity + 1}"
            )
        if self.flavor == "tensor" and g.slot is None:
            g = Generator(g.name, g.degree, None)
        self._by_name[g.name] = len(self.gens)
        self.gens.append(g)

    # -- element construction --------------------------------------------

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {(): Fraction(1)})

    def gen(self, name: str) -> "Element":
        i = self._by_name.get(name)
        if i is None:
            raise MildError(f"no generator named {name!r}")
        return Element(self, {(i,): Fraction(1)})

    def element(self, terms: dict) -> "Element":
        out: dict[Mono, Fraction] = {}
        for word, c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            can = self.canonicalize(tuple(word))
            if can is None:
                continue
            mono, sign = can
            val = out.get(mono, Fraction(0)) + sign * c
            if val:
                out[mono] = val
            else:
                out.pop(mono, None)
        return Element(self, out)

    def set_differential(self, name: str, value: "Element | None"):
        i = self._by_name[name]
        if value is None or value.is_zero():
            self.differentials.pop(i, None)
            return
        if value.algebra is not self:
            raise MildError("differential value belongs to another algebra")
        if value.degree != self.gens[i].degree + 1:
            raise DegreeError(
                f"d({name}) must be homogeneous of degree {self.gens[i].degree + 1}"
            )
        self.differentials[i] = value
        self._invalidate(self.gens[i].degree)

    def validate(self):
        """Check d^2 = 0 on every generator (symbolically; no cap needed)."""
        for i, g in enumerate(self.gens):
            dg = self.differentials.get(i)
            if dg is not None and not self.d(self.d(Element(self, {(i,): Fraction(1)}))).is_zero():
                raise DegreeError(f"d^2 != 0 on generator {g.name}")
        for i, dg in self.differentials.items():
            for c in dg.terms.values():
                if not self.ring.contains(c):
                    raise RingError(f"coefficient {c} not in {self.ring}")
        return self

    # -- canonical monomials ----------------------------------------------

    def _rank(self, i: int):
        g = self.gens[i]
        return (g.degree, g.name)

    def canonicalize(self, word: Mono):
        """Canonical form of a word; returns (mono, sign) or None if zero."""
        if self.flavor == "commutative":
            return self._canon_commutative(word)
        return self._canon_slotted(word)

    def _canon_commutative(self, word: Mono):
        letters = list(word)
        sign = 1
        for i in range(1, len(letters)):
            j = i
            while j > 0 and self._rank(letters[j]) < self._rank(letters[j - 1]):
                if self.gens[letters[j]].odd and self.gens[letters[j - 1]].odd:
                    sign = -sign
                letters[j], letters[j - 1] = letters[j - 1], letters[j]
                j -= 1
        for a, b in zip(letters, letters[1:]):
            if a == b and self.gens[a].odd:
                return None
        return tuple(letters), sign

    def _canon_slotted(self, word: Mono):
        letters = list(word)
        sign = 1
        for i in range(1, len(letters)):
            j = i
            while j > 0:
                s_prev = self.gens[letters[j - 1]].slot
                s_cur = self.gens[letters[j]].slot
                if s_prev is None or s_cur is None or s_prev <= s_cur:
                    break
                if self.gens[letters[j]].odd and self.gens[letters[j - 1]].odd:
                    sign = -sign
                letters[j], letters[j - 1] = letters[j - 1], letters[j]
                j -= 1
        return tuple(letters), sign

    def mono_degree(self, mono: Mono) -> int:
        return sum(self.gens[i].degree for i in mono)

    def mono_str(self, mono: Mono) -> str:
        if not mono:
            return "1"
        parts = []
        run_name, run = None, 0
        for i in mono:
            n = self.gens[i].name
            if n == run_name:
                run += 1
            else:
                if run_name is not None:
                    parts.append(run_name if run == 1 else f"{run_name}^{run}")
                run_name, run = n, 1
        parts.append(run_name if run == 1 else f"{run_name}^{run}")
        return "*".join(parts)

    # -- truncated bases ----------------------------------------------------

    def set_cap(self, cap: int):
        if self.cap is None or cap > self.cap:
            self.cap = cap

    def _check_cap(self, degree: int):
        if self.cap is None:
            raise DegreeCapError("no degree cap set on the algebra")
        if degree > self.cap:
            raise DegreeCapError(f"degree {degree} beyond cap {self.cap}")

    def monomial_basis(self, degree: int) -> list[Mono]:
        """All canonical monomials of the given total degree, fixed order."""
        if degree < 0:
            return []
        if degree in self._basis_cache:
            return self._basis_cache[degree]
        if degree == 0:
            basis = [()]
            self._basis_cache[0] = basis
            self._index_cache[0] = {(): 0}
            return basis
        self._check_cap(degree)
        if self.flavor == "commutative":
            order = sorted(range(len(self.gens)), key=self._rank)
            out: list[Mono] = []

            def rec(pos: int, remaining: int, acc: list):
                if remaining == 0:
                    out.append(tuple(acc))
                    return
                if pos >= len(order):
                    return
                i = order[pos]
                d = self.gens[i].degree
                max_mult = 1 if self.gens[i].odd else remaining // d
                for mult in range(min(max_mult, remaining // d), -1, -1):
                    rec(pos + 1, remaining - mult * d, acc + [i] * mult)

            rec(0, degree, [])
            basis = sorted(out)
        else:
            out = []

            def rec_word(remaining: int, acc: list, min_slot):
                if remaining == 0:
                    out.append(tuple(acc))
                    return
                for i in range(len(self.gens)):
                    g = self.gens[i]
                    if g.degree > remaining:
                        continue
                    if g.slot is not None and min_slot is not None and g.slot < min_slot:
                        continue
                    rec_word(remaining - g.degree, acc + [i], g.slot)

            rec_word(degree, [], None)
            basis = sorted(out)
        self._basis_cache[degree] = basis
        self._index_cache[degree] = {m: k for k, m in enumerate(basis)}
        return basis

    def basis_index(self, degree: int) -> dict:
        self.monomial_basis(degree)
        return self._index_cache[degree]

    def dim(self, degree: int) -> int:
        return len(self.monomial_basis(degree))

    def vector_of(self, el: "Element", degree: int | None = None) -> Vec:
        if el.is_zero():
            return {}
        if degree is None:
            degree = el.degree
        elif el.degree != degree:
            raise DegreeError("element degree mismatch")
        idx = self.basis_index(degree)
        return {idx[m]: c for m, c in el.terms.items()}

    def element_from_vec(self, degree: int, v: Vec) -> "Element":
        basis = self.monomial_basis(degree)
        return Element(self, {basis[i]: c for i, c in v.items() if c})

    # -- differential --------------------------------------------------------

    def d(self, el: "Element") -> "Element":
        out: dict[Mono, Fraction] = {}
        for mono, c in el.terms.items():
            prefix_deg = 0
            for pos, i in enumerate(mono):
                dg = self.differentials.get(i)
                if dg is not None:
                    sgn = -1 if prefix_deg % 2 else 1
                    for m2, c2 in dg.terms.items():
                        can = self.canonicalize(mono[:pos] + m2 + mono[pos + 1:])
                        if can is None:
                            continue
                        m3, s3 = can
                        val = out.get(m3, Fraction(0)) + sgn * s3 * c * c2
                        if val:
                            out[m3] = val
                        else:
                            out.pop(m3, None)
                prefix_deg += self.gens[i].degree
        return Element(self, out)

    def differential_matrix(self, degree: int) -> Matrix:
        """Matrix of d: A^degree -> A^(degree+1) in the monomial bases."""
        if degree in self._dmat_cache:
            return self._dmat_cache[degree]
        src = self.monomial_basis(degree)
        tgt_dim = self.dim(degree + 1)
        cols = []
        for m in src:
            cols.append(self.vector_of(self.d(Element(self, {m: Fraction(1)})), degree + 1))
        mat = Matrix(tgt_dim, len(src), cols)
        self._dmat_cache[degree] = mat
        return mat

    # -- extension (used by model construction) ------------------------------

    def extend(self, new_gens: list[Generator]) -> list[str]:
        """Adjoin generators (their differentials set afterwards)."""
        names = []
        for g in new_gens:
            self._add_generator(g)
            names.append(g.name)
        self._invalidate(min(g.degree for g in new_gens) if new_gens else 0)
        return names

    def fresh_name(self, base: str) -> str:
        name = base
        while name in self._by_name:
            name += "x"
        return name

    def _invalidate(self, from_degree: int):
        self._version += 1
        for cache in (self._basis_cache, self._index_cache, self._dmat_cache):
            for k in [k for k in cache if k >= from_degree - 1]:
                del cache[k]

    def index_of(self, name: str) -> int:
        return self._by_name[name]

    def has_gen(self, name: str) -> bool:
        return name in self._by_name

    def copy_with_ring(self, ring: CoefficientRing) -> "FreeGradedAlgebra":
        """The same presentation over a larger coefficient ring."""
        out = FreeGradedAlgebra(ring, self.flavor, list(self.gens), cap=self.cap,
                                connectivity=self.connectivity)
        for i, dg in self.differentials.items():
            out.set_differential(self.gens[i].name, Element(out, dict(dg.terms)))
        return out.validate()

    def __repr__(self) -> str:
        kind = "Lambda" if self.flavor == "commutative" else "T"
        return f"{kind}({', '.join(f'{g.name}:{g.degree}' for g in self.gens)})"


class Element:
    """A homogeneous linear combination of canonical monomials."""

    __slots__ = ("algebra", "terms", "degree")

    def __init__(self, algebra: FreeGradedAlgebra, terms: dict):
        self.algebra = algebra
        self.terms = terms
        degs = {algebra.mono_degree(m) for m in terms}
        if len(degs) > 1:
            raise DegreeError(f"inhomogeneous element: degrees {sorted(degs)}")
        self.degree = degs.pop() if degs else None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Element") -> "Element":
        if other.algebra is not self.algebra:
            raise MildError("mixed ambient algebras")
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, Fraction(0)) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element(self.algebra, out)

    def __neg__(self) -> "Element":
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        c = Fraction(c)
        if not c:
            return Element(self.algebra, {})
        return Element(self.algebra, {m: c * x for m, x in self.terms.items()})

    def __rmul__(self, c) -> "Element":
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other) -> "Element":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if other.algebra is not self.algebra:
            raise MildError("mixed ambient algebras")
        A = self.algebra
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                can = A.canonicalize(m1 + m2)
                if can is None:
                    continue
                m3, s = can
                v = out.get(m3, Fraction(0)) + s * c1 * c2
                if v:
                    out[m3] = v
                else:
                    out.pop(m3, None)
        return Element(A, out)

    def __pow__(self, n: int) -> "Element":
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        A = self.algebra
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            ms = A.mono_str(m)
            if ms == "1":
                parts.append(scalar_str(c))
            elif c == 1:
                parts.append(ms)
            elif c == -1:
                parts.append(f"-{ms}")
            else:
                parts.append(f"{scalar_str(c)}*{ms}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    __repr__ = __str__


class AlgebraMorphism:
    """A multiplicative chain map given by generator images.

    The target may be a quotient; images then live in its ambient algebra
    and equalities hold modulo the ideal.
    """

    def __init__(self, source: FreeGradedAlgebra, target, images: dict,
                 kind: str | None = None, check: bool = True):
        self.source = source
        self.target = target
        self.images: dict[int, Element] = {}
        self.kind = kind
        self._matrix_cache: dict = {}
        tgt_amb = ambient_algebra(target)
        for key, el in images.items():
            i = source.index_of(key) if isinstance(key, str) else key
            if el.algebra is not tgt_amb:
                raise MildError("image lives in the wrong algebra")
            if check and not el.is_zero() and el.degree != source.gens[i].degree:
                raise DegreeError(
                    f"image of {source.gens[i].name} has degree {el.degree}, "
                    f"want {source.gens[i].degree}"
                )
            self.images[i] = el
        if check:
            for i in range(len(source.gens)):
                if i not in self.images:
                    raise MildError(f"missing image for generator {source.gens[i].name}")

    @classmethod
    def identity(cls, A: FreeGradedAlgebra) -> "AlgebraMorphism":
        return cls(A, A, {i: Element(A, {(i,): Fraction(1)}) for i in range(len(A.gens))},
                   kind="identity")

    def apply(self, el: Element) -> Element:
        tgt = ambient_algebra(self.target)
        out = tgt.zero()
        for mono, c in el.terms.items():
            prod = tgt.one()
            for i in mono:
                prod = prod * self.images[i]
                if prod.is_zero():
                    break
            out = out + prod.scale(c)
        return out

    def matrix_at(self, degree: int) -> Matrix:
        tgt = ambient_algebra(self.target)
        key = (degree, self.source._version, tgt._version)
        if key in self._matrix_cache:
            return self._matrix_cache[key]
        src_basis = self.source.monomial_basis(degree)
        cols = []
        for m in src_basis:
            im = self.apply(Element(self.source, {m: Fraction(1)}))
            cols.append(tgt.vector_of(im, degree) if not im.is_zero() else {})
        mat = Matrix(tgt.dim(degree), len(src_basis), cols)
        self._matrix_cache[key] = mat
        return mat

    def compose(self, inner: "AlgebraMorphism") -> "AlgebraMorphism":
        """self o inner."""
        if ambient_algebra(inner.target) is not self.source:
            raise MildError("composition mismatch")
        images = {i: self.apply(el) for i, el in inner.images.items()}
        return AlgebraMorphism(inner.source, self.target, images, check=False)

    def chain_defect(self, gen_index: int) -> Element:
        """f(d g) - d(f g) in the target ambient (zero modulo the ideal iff chain)."""
        src = self.source
        tgt = ambient_algebra(self.target)
        dg = src.differentials.get(gen_index)
        lhs = self.apply(dg) if dg is not None else tgt.zero()
        rhs = tgt.d(self.images[gen_index])
        return lhs - rhs

    def check_chain_map(self, window_top: int | None = None) -> bool:
        """Verify f o d = d o f on generators (modulo the target ideal)."""
        for i in range(len(self.source.gens)):
            defect = self.chain_defect(i)
            if defect.is_zero():
                continue
            if isinstance(self.target, QuotientAlgebra):
                k = defect.degree
                if window_top is not None and k > window_top:
                    continue
                if self.target.contains_in_ideal(defect):
                    continue
            raise DegreeError(
                f"not a chain map on generator {self.source.gens[i].name}"
            )
        return True

    def is_cochain_surjective(self, degree: int) -> bool:
        tgt = self.target
        amb = ambient_algebra(tgt)
        n = amb.dim(degree)
        cols = list(self.matrix_at(degree).cols)
        if isinstance(tgt, QuotientAlgebra):
            cols = cols + tgt.ideal_cols(degree)
        basis = column_space_basis(Matrix(n, len(cols), [dict(c) for c in cols]), amb.ring)
        return len(basis) == n

    def __repr__(self) -> str:
        return f"Morphism({self.source!r} -> {ambient_algebra(self.target)!r})"


def ambient_algebra(space) -> FreeGradedAlgebra:
    return space.ambient if isinstance(space, QuotientAlgebra) else space


class HomogeneousIdeal:
    """A homogeneous ideal, given by generators or by a degreewise basis rule.

    Degree components are realized as column-reduced bases on demand and
    memoized.  In the tensor flavor the ideal is two-sided.
    """

    def __init__(self, ambient: FreeGradedAlgebra, gens: list | None = None,
                 basis_rule=None, label: str = ""):
        self.ambient = ambient
        self.gens = list(gens or [])
        for g in self.gens:
            if g.is_zero():
                raise MildError("zero ideal generator")
            if g.degree <= 0:
                raise DegreeError("ideal generators must have positive degree")
            if g.algebra is not ambient:
                raise MildError("ideal generator outside the ambient algebra")
        self._rule = basis_rule
        self.label = label
        self._basis_cache: dict[int, list] = {}

    def is_explicitly_zero(self) -> bool:
        return self._rule is None and not self.gens

    def degree_cols(self, degree: int) -> list:
        """Basis (as vectors) of the degree component."""
        if degree <= 0:
            return []
        if degree in self._basis_cache:
            return self._basis_cache[degree]
        A = self.ambient
        if self._rule is not None:
            raw = self._rule(degree)
        else:
            raw = []
            for g in self.gens:
                dg = g.degree
                if dg > degree:
                    continue
                if A.flavor == "commutative":
                    for m in A.monomial_basis(degree - dg):
                        el = Element(A, {m: Fraction(1)}) * g
                        if not el.is_zero():
                            raw.append(A.vector_of(el, degree))
                else:
                    for dl in range(0, degree - dg + 1):
                        dr = degree - dg - dl
                        for ml in A.monomial_basis(dl):
                            left = Element(A, {ml: Fraction(1)}) * g
                            if left.is_zero():
                                continue
                            for mr in A.monomial_basis(dr):
                                el = left * Element(A, {mr: Fraction(1)})
                                if not el.is_zero():
                                    raw.append(A.vector_of(el, degree))
        basis = column_space_basis(Matrix(A.dim(degree), len(raw), raw), A.ring)
        self._basis_cache[degree] = basis
        return basis

    def degree_basis(self, degree: int) -> list[Element]:
        return [self.ambient.element_from_vec(degree, v) for v in self.degree_cols(degree)]

    def contains(self, el: Element) -> bool:
        if el.is_zero():
            return True
        A = self.ambient
        cols = self.degree_cols(el.degree)
        solver = LinearSolver(Matrix(A.dim(el.degree), len(cols), [dict(c) for c in cols]), A.ring)
        return solver.contains(A.vector_of(el))

    def first_d_instability(self, window_top: int):
        """(element, degree) witnessing d(I) not in I, or None if d-stable."""
        A = self.ambient
        if self._rule is None:
            # Generator check suffices: d(m*g) = dm*g +- m*dg.
            for g in self.gens:
                if g.degree + 1 > window_top:
                    continue
                dg = A.d(g)
                if not dg.is_zero() and not self.contains(dg):
                    return g, g.degree + 1
            return None
        for k in range(1, window_top):
            cols = self.degree_cols(k)
            if not cols:
                continue
            nxt = self.degree_cols(k + 1)
            solver = LinearSolver(Matrix(A.dim(k + 1), len(nxt), [dict(c) for c in nxt]), A.ring)
            dmat = A.differential_matrix(k)
            for v in cols:
                dv = dmat.apply(v)
                if dv and not solver.contains(dv):
                    return A.element_from_vec(k + 1, dv), k + 1
        return None


def ideal_product(I: HomogeneousIdeal, J: HomogeneousIdeal) -> HomogeneousIdeal:
    """The product ideal; its degree components are spans of products of the
    factors' degreewise bases (faithful for two-sided ideals as well)."""
    if I.ambient is not J.ambient:
        raise MildError("ideal product across different algebras")
    A = I.ambient

    def rule(degree: int) -> list:
        raw = []
        for dl in range(1, degree):
            lefts = I.degree_basis(dl)
            if not lefts:
                continue
            rights = J.degree_basis(degree - dl)
            for u in lefts:
                for v in rights:
                    p = u * v
                    if not p.is_zero():
                        raw.append(A.vector_of(p, degree))
        return raw

    # For commutative finitely generated factors the generator products
    # generate the product ideal; record them for reporting and for the
    # symbolic nilpotency certificates.  The degreewise rule stays the
    # source of truth either way.
    gens: list[Element] = []
    if A.flavor == "commutative" and I._rule is None and J._rule is None:
        for u in I.gens:
            for v in J.gens:
                p = u * v
                if not p.is_zero():
                    gens.append(p)
    return HomogeneousIdeal(A, gens=gens, basis_rule=rule,
                            label=f"({I.label})*({J.label})")


def ideal_power(I: HomogeneousIdeal, k: int) -> HomogeneousIdeal:
    if k < 1:
        raise MildError("ideal power needs k >= 1")
    out = I
    for _ in range(k - 1):
        out = ideal_product(out, I)
    out.label = f"({I.label})^{k}" if I.label else out.label
    return out


def d_closure(I: HomogeneousIdeal) -> HomogeneousIdeal:
    """Smallest d-stable ideal containing I (one pass: adjoin d of the bases)."""
    A = I.ambient

    def rule(degree: int) -> list:
        raw = [dict(v) for v in I.degree_cols(degree)]
        if degree >= 2:
            dmat = A.differential_matrix(degree - 1)
            for v in I.degree_cols(degree - 1):
                dv = dmat.apply(v)
                if dv:
                    raw.append(dv)
        return raw

    return HomogeneousIdeal(A, gens=None, basis_rule=rule, label=f"dclo({I.label})")


class QuotientAlgebra:
    """A/I with the induced differential (I verified d-stable in the window)."""

    def __init__(self, ambient: FreeGradedAlgebra, ideal: HomogeneousIdeal):
        self.ambient = ambient
        self.ideal = ideal
        self.ring = ambient.ring

    def ideal_cols(self, degree: int) -> list:
        return self.ideal.degree_cols(degree)

    def contains_in_ideal(self, el: Element) -> bool:
        return self.ideal.contains(el)

    def __repr__(self) -> str:
        return f"{self.ambient!r}/{self.ideal.label or 'I'}"


def quotient(A: FreeGradedAlgebra, I: HomogeneousIdeal, window_top: int) -> QuotientAlgebra:
    """Form A/I, checking d-stability of I up to window_top."""
    witness = I.first_d_instability(window_top)
    if witness is not None:
        el, k = witness
        raise NotDStable(f"d lands outside the ideal at degree {k}: {el}", k)
    return QuotientAlgebra(A, I)


# -- tensor powers, products, folding ------------------------------------


def _max_slot(A: FreeGradedAlgebra) -> int:
    slots = [g.slot for g in A.gens if g.slot is not None]
    return max(slots) if slots else 1


def tensor_power(A: FreeGradedAlgebra, n: int, cap: int | None = None) -> FreeGradedAlgebra:
    """n disjoint renamed copies of A: the tensor power for the commutative
    flavor, the free product for the tensor flavor (n = 1 returns A itself).

    For the tensor flavor the copies must not commute: the honest graded
    tensor product of noncommutative algebras admits no multiplicative fold
    map, so the free product is the representative on which the fold is a
    dga morphism.  Copies therefore keep their slots unchanged.
    """
    if n < 1:
        raise MildError("tensor power needs n >= 1")
    if n == 1:
        return A
    gens = []
    for copy in range(1, n + 1):
        for g in A.gens:
            slot = g.slot if A.flavor == "tensor" else None
            gens.append(Generator(f"{g.name}_{copy}", g.degree, slot))
    T = FreeGradedAlgebra(A.ring, A.flavor, gens,
                          cap=cap if cap is not None else A.cap,
                          connectivity=A.connectivity)
    for copy in range(1, n + 1):
        mapping = {i: T.index_of(f"{g.name}_{copy}") for i, g in enumerate(A.gens)}
        for i, dg in A.differentials.items():
            T.set_differential(
                f"{A.gens[i].name}_{copy}",
                T.element({tuple(mapping[j] for j in m): c for m, c in dg.terms.items()}),
            )
    return T.validate()


def tensor_product(A: FreeGradedAlgebra, B: FreeGradedAlgebra,
                   cap: int | None = None) -> FreeGradedAlgebra:
    """Graded tensor product of two algebras of the same flavor and ring."""
    if A.ring != B.ring or A.flavor != B.flavor:
        raise MildError("tensor product requires matching ring and flavor")
    sa = _max_slot(A)
    gens = []
    for g in A.gens:
        gens.append(Generator(f"{g.name}_L", g.degree,
                              (g.slot or 1) if A.flavor == "tensor" else None))
    for g in B.gens:
        gens.append(Generator(f"{g.name}_R", g.degree,
                              sa + (g.slot or 1) if A.flavor == "tensor" else None))
    T = FreeGradedAlgebra(A.ring, A.flavor, gens, cap=cap, connectivity=min(A.connectivity, B.connectivity))
    for src, suffix in ((A, "_L"), (B, "_R")):
        mapping = {i: T.index_of(g.name + suffix) for i, g in enumerate(src.gens)}
        for i, dg in src.differentials.items():
            T.set_differential(
                src.gens[i].name + suffix,
                T.element({tuple(mapping[j] for j in m): c for m, c in dg.terms.items()}),
            )
    return T.validate()


def mu_n(A: FreeGradedAlgebra, n: int, cap: int | None = None) -> AlgebraMorphism:
    """The n-fold product morphism A^{(x)n} -> A (copy i of a generator maps
    to the generator); surjective chain map."""
    T = tensor_power(A, n, cap=cap)
    if n == 1:
        f = AlgebraMorphism.identity(A)
        f.kind = "mu"
        f.mu_data = (A, 1)
        return f
    images = {}
    for copy in range(1, n + 1):
        for g in A.gens:
            images[T.index_of(f"{g.name}_{copy}")] = A.gen(g.name)
    f = AlgebraMorphism(T, A, images, kind="mu")
    f.mu_data = (A, n)
    return f


# -- module-basis splitting for extensions --------------------------------


def split_base_added(A: FreeGradedAlgebra, mono: Mono, added: set):
    """Split a monomial as (base part, added part, sign) where the element
    equals sign * base * added_word, or None when no such split exists.

    Commutative flavor: unshuffle, counting Koszul signs.  Tensor flavor
    (free product): the base part is the maximal leading run of base
    letters; the remainder starts with an added letter and is returned
    whole (it may contain base letters inside).
    """
    if A.flavor == "commutative":
        base, extra = [], []
        sign = 1
        for i in mono:
            if i in added:
                extra.append(i)
            else:
                if extra and A.gens[i].odd:
                    crossings = sum(1 for j in extra if A.gens[j].odd)
                    if crossings % 2:
                        sign = -sign
                base.append(i)
        return tuple(base), tuple(extra), sign
    k = 0
    while k < len(mono) and mono[k] not in added:
        k += 1
    return mono[:k], mono[k:], 1


def module_basis_monos(E: FreeGradedAlgebra, added: set, degree: int) -> list[Mono]:
    """Monomials spanning the extension as a base-algebra module.

    Commutative: monomials in added generators only.  Tensor free product:
    words starting with an added letter (the empty word in degree 0).
    """
    if degree == 0:
        return [()]
    out = []
    for m in E.monomial_basis(degree):
        if E.flavor == "commutative":
            if all(i in added for i in m):
                out.append(m)
        else:
            if m and m[0] in added:
                out.append(m)
    return out
