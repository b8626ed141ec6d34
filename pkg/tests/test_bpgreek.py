"""Tests for BP_*BP formulas, Greek letter chains and the γ/ζ products"""
import pytest
from sympy import QQ

from app.bpgreek import (
    EXACT, I3, IdealSpec, auxiliary_coboundaries, beta_family_index, bp_ring, coassociativity_defect,
    counit_defects, eta_r, formula_checks, gamma_class, gamma_displays, gamma_expected, greek_chain, hazewinkel,
    phi_beta, phi_reduce, residue, valuation, zeta_gamma_product, zeta_x_terms,
)
from app.exceptions import IntegralityError, InvalidConfigError
from app.maysst import b
from app.ringstruct import DISCREPANCY, PASS
from app.s3hopf import PrimeContext, S3Monomial, TensorElement, b_element


@pytest.fixture(scope="module")
def ctx():
    return PrimeContext(7, 9)


@pytest.fixture(scope="module")
def checks(ctx):
    """Formula checks keyed by id"""
    return {check.check_id: check for check in formula_checks(ctx)}


def test_ideal_descriptions():
    """Ideals print their generators"""
    assert EXACT.describe() == "(0)"
    assert I3.describe() == "(p, v1, v2)"
    assert IdealSpec(modulus=2, mixed=((1, 1, 1),)).describe() == "(p^2, pv1)"
    assert IdealSpec(modulus=1, powers=((1, 3),)).describe() == "(p, v1^3)"


def test_valuation_and_residue():
    """p-adic valuation and symmetric residues of rationals"""
    assert valuation(QQ(49, 3), 7) == 2
    assert valuation(QQ(1, 7), 7) == -1
    assert valuation(QQ(0), 7) is None
    assert residue(QQ(1, 2), 7, 1) == -3
    with pytest.raises(IntegralityError):
        residue(QQ(1, 7), 7, 1)


def test_hazewinkel_first_generator(ctx):
    """v_1 = p m_1"""
    bp = bp_ring(7)
    v_in_m, m_in_v = hazewinkel(ctx, 1)
    assert v_in_m == bp.m(1) * 7
    assert m_in_v == bp.v(1).mul_ground(QQ(1, 7))


def test_hazewinkel_bound(ctx):
    """Generators are expanded up to s = 4"""
    with pytest.raises(InvalidConfigError):
        hazewinkel(ctx, 5)


@pytest.mark.parametrize("check_id", ["hazewinkel_v1", "hazewinkel_v2", "hazewinkel_v3"])
def test_hazewinkel_round_trips(checks, check_id):
    """v_s(m(v)) = v_s"""
    assert checks[check_id].status == PASS


@pytest.mark.parametrize("check_id", ["eta_r_v1", "eta_r_v2", "eta_r_v3"])
def test_right_unit(checks, check_id):
    """η_R(v_n) matches its closed form modulo the stated ideal"""
    assert checks[check_id].status == PASS, checks[check_id].details


@pytest.mark.parametrize("check_id", ["coproduct_t1", "coproduct_t2", "coproduct_t5"])
def test_coproduct_formulas(checks, check_id):
    """Δt_1 and Δt_2 exactly, Δt_5 modulo I_3"""
    assert checks[check_id].status == PASS, checks[check_id].details


def test_check_json(checks):
    """Checks serialize with their anchor"""
    payload = checks["eta_r_v1"].to_json()
    assert payload["anchor"] == "right unit"
    assert payload["status"] == PASS
    assert "expression" in payload["details"]


def test_eta_r_bound(ctx):
    """η_R is computed for n <= 3"""
    with pytest.raises(InvalidConfigError):
        eta_r(ctx, 4)


def test_eta_r_v1(ctx):
    """η_R(v_1) = v_1 + p t_1"""
    bp = bp_ring(7)
    assert eta_r(ctx, 1) == bp.v(1) + bp.t(1) * 7


def test_coassociativity_exact(ctx):
    """(Δ⊗1)Δt_2 = (1⊗Δ)Δt_2 in BP_*BP"""
    assert not coassociativity_defect(ctx, 2)


def test_coassociativity_mod_i3(ctx):
    """(Δ⊗1)Δt_3 = (1⊗Δ)Δt_3 modulo I_3"""
    assert not coassociativity_defect(ctx, 3, I3)


@pytest.mark.parametrize("s", [1, 2])
def test_counit(ctx, s):
    """Both counit laws hold on t_s"""
    left, right = counit_defects(ctx, s)
    assert not left
    assert not right


@pytest.mark.parametrize("n,t", [(4, 1), (0, 1), (2, 0)])
def test_greek_chain_rejects(ctx, n, t):
    """Chains exist for n = 1, 2, 3 and positive exponents"""
    with pytest.raises(InvalidConfigError):
        greek_chain(ctx, n, t)


def test_alpha_one(ctx):
    """δ_0(v_1) = t_1, so α_1 ↦ [t_1]"""
    chain = greek_chain(ctx, 1, 1)
    assert chain.arity == 1
    assert phi_reduce(ctx, chain) == TensorElement.word([S3Monomial([1])], 7)


def test_beta_one(ctx):
    """β_1 = δ_0δ_1(v_2) ↦ -b_{1,0}"""
    chain = greek_chain(ctx, 2, 1)
    assert [stage.label for stage in chain.stages] == ["v2^1", "δ1(v2^1)", "δ0δ1(v2^1)"]
    assert chain.ideal.describe() == "(p, v1)"
    assert phi_reduce(ctx, chain) == b_element(ctx, 1, 0).scale(-1)


def test_chain_json(ctx):
    """Every stage is reported with its ideal"""
    payload = greek_chain(ctx, 1, 1).to_json()
    assert payload["n"] == 1
    assert [stage["arity"] for stage in payload["stages"]] == [0, 1]
    assert payload["ideal"] == "(p)"


@pytest.mark.slow
def test_gamma_displays(ctx):
    """d(v_3^2) and δ_2(v_3^2) match their displays; δ_1δ_2 is at worst a discrepancy"""
    chain = greek_chain(ctx, 3, 2)
    assert [stage.label for stage in chain.stages] == ["v3^2", "δ2(v3^2)", "δ1δ2(v3^2)", "δ0δ1δ2(v3^2)"]
    d_v3, delta2, delta1_delta2 = gamma_displays(ctx, chain)
    assert d_v3.status == PASS
    assert delta2.status == PASS
    assert delta1_delta2.status in (PASS, DISCREPANCY)


def test_gamma_expected():
    """γ_s ↦ s(s²-1)ν_0 - s(s-1)ρk_1 with signed residues"""
    assert gamma_expected(7, 2) == {"nu_0": -1, "rho k_1": -2}
    assert gamma_expected(7, 1) == {"nu_0": 0, "rho k_1": 0}


@pytest.mark.parametrize("s", range(1, 15))
def test_gamma_expected_is_periodic(s):
    """The expected γ_s depends on s mod p only"""
    assert gamma_expected(7, s) == gamma_expected(7, s + 7)


def test_gamma_expected_vanishes_at_one_mod_p():
    assert gamma_expected(7, 8) == {"nu_0": 0, "rho k_1": 0}


@pytest.mark.slow
@pytest.mark.parametrize("s", [2, 3])
def test_gamma_class(ctx, s):
    """The image of γ_s is the predicted combination"""
    report = gamma_class(ctx, s)
    assert report.error is None
    assert report.status == PASS
    assert report.coefficients == {k: c for k, c in gamma_expected(7, s).items() if c}


def test_beta_family_index():
    """s = 1 and s = (p^3+1)/(p+1) start the family"""
    assert beta_family_index(7, 1) == 1
    assert beta_family_index(7, 43) == 2
    with pytest.raises(ValueError):
        beta_family_index(7, 5)


@pytest.mark.parametrize("n", [0, 1, 2, 4])
def test_phi_beta(ctx, n):
    """β_{p^n/p^n} ↦ -b_{1,n}; the rest of the family maps to zero"""
    assert phi_beta(ctx, 1, n) == b(ctx, 1, n % 3).scale(-1)
    assert not phi_beta(ctx, 43, n)


def test_zeta_x_terms(ctx):
    """Summands with odd exponent at least 3 all vanish under the reduction"""
    assert zeta_x_terms(ctx, 2) == [{"s": 43, "k": 0, "image": "0"}]
    terms = zeta_x_terms(ctx, 4)
    assert [(t["s"], t["k"]) for t in terms] == [(2101, 0), (43, 2)]
    assert all(t["image"] == "0" for t in terms)


@pytest.mark.parametrize("n,s", [(1, 2), (0, 2), (3, 0)])
def test_zeta_product_rejects(ctx, n, s):
    """The product needs n > 1 and s >= 1"""
    with pytest.raises(InvalidConfigError):
        zeta_gamma_product(ctx, n, s)


@pytest.mark.slow
@pytest.mark.parametrize("n,s,nontrivial", [(3, 2, True), (4, 2, False), (5, 2, True), (3, 6, False), (3, 7, False), (3, 8, False)])
def test_zeta_gamma_product(ctx, n, s, nontrivial):
    """γ_s β_{p^n/p^n} ζ_3 is nonzero exactly when n ≢ 1 mod 3 and s ≢ 0, ±1 mod p"""
    report = zeta_gamma_product(ctx, n, s)
    assert report.status == PASS, report.to_json()
    assert report.nontrivial == nontrivial


def test_auxiliary_coboundaries(ctx):
    """Listed coboundaries agree with the cobar differential, one misprint aside"""
    results = {check.check_id: check for check in auxiliary_coboundaries(ctx)}
    assert len(results) == 7
    assert results["aux_t2_t1t3"].status == PASS
    assert results["aux_t2t3_t1"].status == PASS
    assert results["aux_t2t3_t1p"].status == DISCREPANCY
    assert results["aux_t2t3_t1p"].details["mismatched"]
