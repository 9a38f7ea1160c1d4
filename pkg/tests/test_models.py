from fractions import Fraction

import pytest

from corpus import (
    Q,
    Z2,
    cascade_space,
    complex_proj_plane,
    gamma0_on_sphere3,
    product_of_spheres,
    sphere2,
    sphere3,
    torsion_space,
    unit_inclusion,
)
from mild.algebra import AlgebraMorphism, FreeGradedAlgebra, HomogeneousIdeal, quotient
from mild.cohomology import is_quasi_iso
from mild.errors import HypothesisViolated, LiftFailed, NotSurjective
from mild.models import check_minimality, lift, relative_model


def assert_model_ok(model, window=None):
    window = window or model.window
    ok, bad = is_quasi_iso(model.projection, window)
    assert ok, f"projection fails at degree {bad}"
    f = model.modeled
    for i, g in enumerate(model.base.gens):
        assert model.projection.apply(model.inclusion.images[i]) == f.images[i]


def test_identity_model_is_trivial():
    S2 = sphere2()
    m = relative_model(AlgebraMorphism.identity(S2), "commutative", (0, 8))
    assert m.added == []
    assert_model_ok(m)


def test_absolute_model_of_odd_sphere():
    S3 = sphere3()
    m = relative_model(unit_inclusion(S3), "commutative", (0, 7))
    assert [(a.degree, a.kind) for a in m.added] == [(3, "surjectivity")]
    (a,) = m.added
    E = m.extension
    assert E.d(E.gen(a.name)).is_zero()
    assert m.projection.images[E.index_of(a.name)] == S3.gen("v")
    assert_model_ok(m)


def test_absolute_model_of_two_sphere():
    S2 = sphere2()
    m = relative_model(unit_inclusion(S2), "commutative", (0, 8))
    # one cocycle generator in degree 2, one kernel killer in degree 3
    kinds = sorted((a.degree, a.kind) for a in m.added)
    assert kinds == [(2, "surjectivity"), (3, "kernel")]
    assert check_minimality(m).all_decomposable()
    assert_model_ok(m)


def test_torsion_model_over_z2():
    B = torsion_space(Z2)
    m = relative_model(unit_inclusion(B), "commutative", (0, 6))
    # the degree-3 generator has du = 3*alpha^2: decomposable, content absorbed
    assert check_minimality(m).all_decomposable()
    assert_model_ok(m)
    E = m.extension
    u = next(a for a in m.added if a.degree == 3)
    alpha = next(a for a in m.added if a.degree == 2)
    assert E.d(E.gen(u.name)) == 3 * E.gen(alpha.name) ** 2


def test_cascade_forces_noninvertible_content():
    B = cascade_space(Z2)
    m = relative_model(unit_inclusion(B), "commutative", (0, 6))
    assert_model_ok(m)
    rep = check_minimality(m)
    bad = rep.nondecomposable()
    assert bad, "expected a torsion-forced linear correction"
    assert all(e.factor == 3 for e in bad)
    assert all(not Z2.is_invertible(e.factor) for e in bad)
    # over Q the same presentation has a fully decomposable model
    BQ = cascade_space(Q)
    mq = relative_model(unit_inclusion(BQ), "commutative", (0, 6))
    assert check_minimality(mq).all_decomposable()
    assert_model_ok(mq)


def test_model_of_mu2():
    S3 = sphere3()
    from mild.algebra import mu_n

    mu = mu_n(S3, 2)
    mu.source.set_cap(9)
    m = relative_model(mu, "commutative", (0, 8))
    assert_model_ok(m)


def test_model_with_quotient_target():
    mu, proj = gamma0_on_sphere3(Q, cap=10)
    m = relative_model(proj, "commutative", (0, 8))
    assert_model_ok(m)


def test_model_idempotence_on_quasi_iso():
    # modeling the constructed quasi-isomorphism adds nothing
    S2 = sphere2()
    m = relative_model(unit_inclusion(S2), "commutative", (0, 7))
    m2 = relative_model(m.projection, "commutative", (0, 7))
    assert m2.added == []


def test_stratification_is_triangular():
    B = cascade_space(Z2)
    m = relative_model(unit_inclusion(B), "commutative", (0, 6))
    E = m.extension
    seen = set()
    for a in m.added:
        dg = E.differentials.get(E.index_of(a.name))
        if dg is not None:
            for mono in dg.terms:
                for i in mono:
                    name = E.gens[i].name
                    assert name in seen or not any(x.name == name for x in m.added)
        seen.add(a.name)


def test_hypothesis_violations():
    # H^2(f) not injective: map Lambda(v2) -> R with v -> 0
    P = FreeGradedAlgebra(Q, "commutative", [("v", 2)], cap=8).validate()
    R0 = FreeGradedAlgebra(Q, "commutative", [], cap=8).validate()
    f = AlgebraMorphism(P, R0, {"v": R0.zero()})
    with pytest.raises(HypothesisViolated) as exc:
        relative_model(f, "commutative", (0, 6))
    assert exc.value.condition == "(v)" and exc.value.degree == 2

    # H^2 of the target has torsion
    PZ = FreeGradedAlgebra(Z2, "commutative", [("v", 2)], cap=8).validate()
    Pq = quotient(PZ, HomogeneousIdeal(PZ, [3 * PZ.gen("v")]), window_top=7)
    R0Z = FreeGradedAlgebra(Z2, "commutative", [], cap=8).validate()
    g = AlgebraMorphism(R0Z, Pq, {})
    with pytest.raises(HypothesisViolated) as exc:
        relative_model(g, "commutative", (0, 6))
    assert exc.value.condition == "(iii)"


def test_minimality_absolute_sphere():
    S3 = sphere3()
    m = relative_model(unit_inclusion(S3), "commutative", (0, 7))
    rep = check_minimality(m)
    assert rep.all_decomposable()


def test_lift_through_identity():
    S2 = sphere2()
    psi = AlgebraMorphism.identity(S2)
    phi = lift(psi, AlgebraMorphism.identity(S2), (0, 8))
    for i in range(len(S2.gens)):
        assert phi.images[i] == psi.images[i]


def test_lift_model_through_its_own_projection():
    S2 = sphere2()
    m = relative_model(unit_inclusion(S2), "commutative", (0, 7))
    phi = lift(m.projection, m.projection, (0, 7))
    for i, el in phi.images.items():
        assert m.projection.apply(el) == m.projection.images[i]


def test_lift_into_quotient_target():
    S2 = sphere2()
    J = HomogeneousIdeal(S2, [S2.gen("v") ** 2, S2.gen("w")])
    B = quotient(S2, J, window_top=8)
    eta = AlgebraMorphism(S2, B, {g.name: S2.gen(g.name) for g in S2.gens},
                          kind="projection")
    model = relative_model(unit_inclusion(B, flavor="commutative"), "commutative", (0, 6))
    phi = lift(model.projection, eta, (0, 6))
    # eta o phi = model projection, exactly modulo the ideal
    for i, el in phi.images.items():
        diff = eta.apply(el) - model.projection.images[i]
        assert diff.is_zero() or B.contains_in_ideal(diff)


def test_lift_requires_surjectivity():
    S3 = sphere3()
    R0 = FreeGradedAlgebra(Q, "commutative", [], cap=8).validate()
    inc = AlgebraMorphism(R0, S3, {})
    psi = AlgebraMorphism.identity(S3)
    with pytest.raises(NotSurjective):
        lift(psi, inc, (0, 6))


def test_lift_failure_never_occurs_on_certified_pairs():
    # five (psi, eta) pairs with eta a surjective quasi-iso
    pairs = []
    S2 = sphere2()
    S3 = sphere3()
    m2 = relative_model(unit_inclusion(S2), "commutative", (0, 7))
    m3 = relative_model(unit_inclusion(S3), "commutative", (0, 7))
    pairs.append((AlgebraMorphism.identity(S2), AlgebraMorphism.identity(S2)))
    pairs.append((m2.projection, m2.projection))
    pairs.append((m3.projection, m3.projection))
    pairs.append((m2.projection, AlgebraMorphism.identity(S2)))
    CP = complex_proj_plane(Q)
    mcp = relative_model(unit_inclusion(CP), "commutative", (0, 8))
    pairs.append((mcp.projection, mcp.projection))
    for psi, eta in pairs:
        phi = lift(psi, eta, (0, 6))
        for i in phi.images:
            got = eta.apply(phi.images[i])
            want = psi.apply(
                psi.source.gen(psi.source.gens[i].name))
            assert got == want
