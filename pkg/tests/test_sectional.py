from fractions import Fraction

import pytest

from corpus import (
    Q,
    Z2,
    free_sphere3,
    free_x3,
    product_of_spheres,
    sphere2,
    sphere3,
)
from mild.coeff import CoefficientRing
from mild.algebra import AlgebraMorphism, FreeGradedAlgebra, mu_n
from mild.cohomology import induced_map_on_H
from mild.errors import HypothesisViolated, MildError
from mild.sectional import (
    atc_report,
    build_gamma,
    build_p,
    hnil_upper_bound,
    hsc,
    hsecat,
    invariants_report,
    kernel_ideal,
    module_retraction,
    msc,
    msecat,
    nil_ker,
    nil_ker_h,
    retraction_as_morphism,
    ring_enlargement,
    tc_report,
    verify_multiplicative_retraction,
)

W10 = (0, 10)


def test_ring_enlargement():
    Z2r = CoefficientRing.localized(2)
    assert ring_enlargement(Z2r, 2).inverted_primes == (2, 3, 5)
    assert ring_enlargement(Z2r, 1) == Z2r
    assert ring_enlargement(Q, 7) == Q
    # minimality: dropping the largest new prime breaks the inequality
    big = ring_enlargement(Z2r, 2)
    pruned = CoefficientRing.localized(2, 3)
    assert pruned.rho() < 2 * Z2r.rho() <= big.rho()


def test_kernel_ideal_mu2_sphere3():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    K = kernel_ideal(mu, W10)
    assert [str(g) for g in K.gens] == ["v_1 - v_2"]
    # degreewise the ideal equals the cochain kernel
    for k in range(2, 11):
        fmat = mu.matrix_at(k)
        from mild.linalg import kernel_basis

        assert len(K.degree_cols(k)) == len(kernel_basis(fmat, Z2))


def test_kernel_ideal_augments_when_seeds_insufficient():
    # a non-fold morphism: no seeds, generators come from the degreewise kernels
    S2 = sphere2(Q, cap=9)
    P = FreeGradedAlgebra(Q, "commutative", [("v", 2)], cap=9).validate()
    f = AlgebraMorphism(S2, P, {"v": P.gen("v"), "w": P.zero()})
    K = kernel_ideal(f, (0, 8))
    assert K.gens and any(str(g) == "w" for g in K.gens)


def test_nil_ker_h_examples():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    mv = nil_ker_h(mu, W10)
    assert (mv.value, mv.status) == (1, "exact")

    S2 = sphere2(Q, cap=11)
    mu2 = mu_n(S2, 2, cap=11)
    mv2 = nil_ker_h(mu2, W10)
    assert (mv2.value, mv2.status) == (2, "exact")

    ident = AlgebraMorphism.identity(S3)
    ident.kind = "identity"
    assert nil_ker_h(ident, (0, 8)).value == 0


def test_nil_ker_examples():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    assert (nil_ker(mu, W10).value, nil_ker(mu, W10).status) == (1, "exact")

    # polynomial even generator: unbounded nilpotency, saturates at the window
    P = FreeGradedAlgebra(Z2, "commutative", [("v", 2)], cap=9).validate()
    muP = mu_n(P, 2, cap=9)
    mv = nil_ker(muP, (0, 8))
    assert (mv.value, mv.status) == (4, "saturated")

    ident = AlgebraMorphism.identity(S3)
    assert nil_ker(ident, (0, 8)).value == 0


def test_hnil_upper_bound_examples():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    mv = hnil_upper_bound(mu, W10)
    assert (mv.value, mv.status) == (1, "exact")

    ident = AlgebraMorphism.identity(S3)
    assert hnil_upper_bound(ident, (0, 8)).value == 0


def test_build_p_pushout_and_trivial_cases():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    K = kernel_ideal(mu, W10)
    inst0 = build_p(mu, 0, W10, kernel=K)
    assert inst0.pushout_commutes
    inst1 = build_p(mu, 1, W10, kernel=K)
    assert inst1.pushout_commutes

    ident = AlgebraMorphism.identity(S3)
    ident.kind = "identity"
    insti = build_p(ident, 1, (0, 8))
    assert insti.added == set()  # W_(m) empty, j_m the identity inclusion


def test_gamma_side_sphere3():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    K = kernel_ideal(mu, W10)
    # (ker)^2 = 0, so Gamma_1 is the quotient by the zero ideal
    inst1 = build_gamma(mu, 1, W10, kernel=K)
    assert inst1.added == set()
    # Gamma_0 = projection onto A/ker; H fails to inject at m=0
    inst0 = build_gamma(mu, 0, W10, kernel=K)
    ind = induced_map_on_H(inst0.inclusion, W10)
    assert not ind.all_injective()


def test_levels_sphere3_z2():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    K = kernel_ideal(mu, W10)
    instances = {}
    assert hsecat(mu, 3, W10, instances, kernel=K).value == 1
    assert msecat(mu, 3, W10, instances, kernel=K).value == 1
    assert hsc(mu, 3, W10, instances, kernel=K).value == 1
    assert msc(mu, 3, W10, instances, kernel=K).value == 1


def test_retraction_certificate_verifies_and_corrupts():
    S3 = sphere3(Z2, cap=11)
    mu = mu_n(S3, 2, cap=11)
    inst = build_p(mu, 1, W10, kernel=kernel_ideal(mu, W10))
    images = module_retraction(inst)
    assert images is not None
    gen_images = {inst.extension.gens[i].name: images[(i,)] for i in inst.added}
    cand = retraction_as_morphism(inst, gen_images)
    ok, witness = verify_multiplicative_retraction(cand, inst)
    assert ok, witness

    # corrupt the candidate on a base generator: no longer a retraction
    A = inst.inclusion.source
    E = inst.extension
    bad = {i: (cand.images[i] if i != E.index_of("v_1") else A.zero())
           for i in range(len(E.gens))}
    bad_cand = AlgebraMorphism(E, A, bad, check=False)
    ok2, witness2 = verify_multiplicative_retraction(bad_cand, inst)
    assert not ok2 and "v_1" in witness2


def test_bogus_candidate_rejected_with_chain_witness():
    # msc(mu_2 on the 2-sphere) = 2, so no level-1 multiplicative retraction
    # can verify; the all-zero candidate must fail the chain condition.
    S2 = sphere2(Z2, cap=9)
    mu = mu_n(S2, 2, cap=9)
    inst = build_gamma(mu, 1, (0, 8))
    A = inst.inclusion.source
    zero_images = {inst.extension.gens[i].name: A.zero() for i in inst.added}
    cand = retraction_as_morphism(inst, zero_images)
    ok, witness = verify_multiplicative_retraction(cand, inst)
    assert not ok and "chain condition" in witness


def test_tc_report_sphere3_squeeze():
    S3 = sphere3(Z2, cap=11)
    rep = tc_report(S3, n=2, m_max=3, window=W10)
    vals = {k: (v.value, v.status) for k, v in rep.members.items()}
    assert vals == {
        "nil_ker_H": (1, "exact"),
        "nil_ker": (1, "exact"),
        "Hnil_ub": (1, "exact"),
        "Hsecat": (1, "exact"),
        "msecat": (1, "exact"),
        "Hsc": (1, "exact"),
        "msc": (1, "exact"),
    }
    assert rep.brackets["TC_2"] == (1, 1)
    assert rep.brackets["tc_2"] == (1, 1)
    assert all(rep.pushout_checks.values())


def test_tc_report_n1_trivial():
    S3 = sphere3(Z2, cap=9)
    rep = tc_report(S3, n=1, m_max=1, window=(0, 8))
    assert all(v.value == 0 and v.status == "exact" for v in rep.members.values())


def test_tc_report_rejects_non_mild():
    P = FreeGradedAlgebra(Z2, "commutative", [("v", 2)], cap=9).validate()
    with pytest.raises(HypothesisViolated):
        tc_report(P, n=2, m_max=1, window=(0, 8))


def test_atc_report_values():
    FS3 = free_sphere3(Z2, cap=9)
    rep = atc_report(FS3, n=2, m_max=2, window=(0, 8))
    assert rep.members["Hsecat"].value == 2
    assert rep.members["msecat"].value == 2
    # within-instance chain discipline holds on the free-product side too
    assert rep.members["nil_ker_H"].value <= rep.members["Hsecat"].value

    rep1 = atc_report(FS3, n=1, m_max=1, window=(0, 8))
    assert all(v.value == 0 for v in rep1.members.values())


def test_atc_requires_decomposable():
    A = FreeGradedAlgebra(Z2, "tensor", [("x", 3, 1), ("y", 2, 1)], cap=9)
    A.set_differential("y", 3 * A.gen("x"))
    A.validate()
    with pytest.raises(HypothesisViolated):
        atc_report(A, n=2, m_max=1, window=(0, 8))


def test_atc_paired_comparison_recorded():
    FS3 = free_sphere3(Z2, cap=9)
    S3 = sphere3(Z2, cap=9)
    crep = tc_report(S3, n=2, m_max=2, window=(0, 8))
    arep = atc_report(FS3, n=2, m_max=2, window=(0, 8), paired=crep)
    cmp = arep.certificates["paired_comparison"]
    assert "Hsecat" in cmp and "free_leq_commutative" in cmp["Hsecat"]


def test_invariants_report_on_projection():
    # arbitrary surjective morphism: S2 x S3 model folding the odd generator
    A = FreeGradedAlgebra(Q, "commutative", [("a", 3), ("b", 3)], cap=9).validate()
    B = FreeGradedAlgebra(Q, "commutative", [("c", 3)], cap=9).validate()
    f = AlgebraMorphism(A, B, {"a": B.gen("c"), "b": B.gen("c")})
    rep = invariants_report(f, m_max=2, window=(0, 8), ring_enlarge="off")
    assert rep.members["nil_ker_H"].value == 1
    assert rep.members["Hsecat"].value is not None


def test_chain_inequalities_on_corpus():
    reports = []
    reports.append(tc_report(sphere3(Z2, cap=11), 2, 3, W10))
    reports.append(tc_report(sphere3(Q, cap=11), 2, 2, W10))
    reports.append(tc_report(product_of_spheres(Q, cap=9), 2, 2, (0, 8)))
    reports.append(atc_report(free_sphere3(Z2, cap=9), 2, 2, (0, 8)))
    reports.append(atc_report(free_x3(Z2, cap=9), 2, 2, (0, 8)))
    for rep in reports:
        m = rep.members

        def val(key):
            mv = m[key]
            return mv.value if mv.status == "exact" else None

        pairs = [("nil_ker_H", "Hsecat"), ("Hsecat", "msecat"),
                 ("Hsecat", "Hsc"), ("msecat", "msc"),
                 ("nil_ker_H", "Hnil_ub"), ("Hsc", "Hnil_ub")]
        for lo_key, hi_key in pairs:
            lo, hi = val(lo_key), val(hi_key)
            if lo is not None and hi is not None:
                assert lo <= hi, (rep.kind, lo_key, hi_key, lo, hi)
