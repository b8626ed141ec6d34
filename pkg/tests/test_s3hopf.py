"""Tests for the Hopf algebra S(3)"""
import pytest
from hypothesis import given, settings, strategies as st

from app.exceptions import InvalidConfigError
from app.s3hopf import (
    UNIT, PrimeContext, S3Monomial, TensorElement, apply_coproduct_at, b_element, collapse_counit, coproduct,
    may_filtration_closed_form, may_filtration_generator, monomial_degree, monomial_frobenius, monomial_mul,
)


@pytest.fixture(scope="module")
def ctx():
    """p = 7 with generators up to t_9"""
    return PrimeContext(7, 9)


def t(ctx, i, e=1):
    return S3Monomial.power(ctx, i, e)


def test_constants(ctx):
    """q = 12, D = 684 at p = 7"""
    assert ctx.q == 12
    assert ctx.D == 684
    assert ctx.p3 == 343


@pytest.mark.parametrize("p", [1, 2, 9, 15])
def test_rejects_non_odd_primes(p):
    """Only odd primes build a context"""
    with pytest.raises(InvalidConfigError):
        PrimeContext(p)


def test_algebra_only_below_seven():
    """p = 3 and 5 are algebra-only"""
    assert PrimeContext(5).algebra_only
    assert not PrimeContext(7).algebra_only


def test_frobenius_relation(ctx):
    """t^{p^3} = t"""
    assert ctx.reduce_exponent(343) == 1
    assert ctx.reduce_exponent(344) == 2
    assert monomial_mul(ctx, t(ctx, 1, 342), t(ctx, 1)) == t(ctx, 1)
    assert monomial_frobenius(ctx, t(ctx, 2), 3) == t(ctx, 2)


def test_monomial_normal_form_trims_zeros():
    """Trailing zero exponents are dropped"""
    assert S3Monomial([1, 0, 0]) == S3Monomial([1])
    assert S3Monomial([0, 0]) == UNIT
    assert UNIT.is_unit


def test_generator_degrees(ctx):
    """|t_1| = q, |t_3| ≡ 0 and |t_4| ≡ |t_1| mod D"""
    assert ctx.generator_degree(1) == 12
    assert ctx.generator_degree(2) == 96
    assert ctx.generator_degree(3) == 0
    assert ctx.generator_degree(4) == 12


def test_may_filtration_values(ctx):
    """M(t_1), M(t_2), M(t_3) = 1, 3, 5 and M(t_4) = p + 1"""
    assert [may_filtration_generator(ctx, i) for i in (1, 2, 3)] == [1, 3, 5]
    assert may_filtration_generator(ctx, 4) == 8
    assert may_filtration_generator(ctx, 5) == 22


def test_may_filtration_closed_form(ctx):
    """The recursion agrees with the closed form at p = 7"""
    for i in range(1, 10):
        assert may_filtration_generator(ctx, i) == may_filtration_closed_form(ctx, i)


def test_coproduct_t1_t2(ctx):
    """Δt_1 = t_1⊗1 + 1⊗t_1 and Δt_2 = t_2⊗1 + t_1⊗t_1^p + 1⊗t_2"""
    assert coproduct(ctx, t(ctx, 1)) == TensorElement({(t(ctx, 1), UNIT): 1, (UNIT, t(ctx, 1)): 1}, 7)
    expected = TensorElement({
        (t(ctx, 2), UNIT): 1,
        (t(ctx, 1), t(ctx, 1, 7)): 1,
        (UNIT, t(ctx, 2)): 1,
    }, 7)
    assert coproduct(ctx, t(ctx, 2)) == expected


def test_b10_coefficients(ctx):
    """b_{1,0} has the coefficients C(7, i)/7 on t_1^i ⊗ t_1^{7-i}"""
    b10 = b_element(ctx, 1, 0)
    assert len(b10) == 6
    expected = {1: 1, 2: 3, 3: 5, 4: 5, 5: 3, 6: 1}
    for i, c in expected.items():
        assert b10.coefficient([t(ctx, 1, i), t(ctx, 1, 7 - i)]) == c


def test_b11_is_frobenius_of_b10(ctx):
    """b_{1,1} is b_{1,0} with every factor raised to the p-th power"""
    b10 = b_element(ctx, 1, 0)
    frob = TensorElement({tuple(monomial_frobenius(ctx, m) for m in w): c for w, c in b10}, 7)
    assert b_element(ctx, 1, 1) == frob


def test_b_elements_vanish_below_one(ctx):
    """b_{s,k} = 0 for s <= 0"""
    assert not b_element(ctx, 0, 1)
    assert not b_element(ctx, -2, 0)


@pytest.mark.parametrize("exponents", [[3, 1], [0, 7, 1], [1, 1, 1]])
def test_coassociativity(ctx, exponents):
    """(Δ⊗1)Δ = (1⊗Δ)Δ on monomials"""
    delta = coproduct(ctx, S3Monomial(exponents))
    assert apply_coproduct_at(ctx, delta, 0) == apply_coproduct_at(ctx, delta, 1)


@pytest.mark.parametrize("s", range(1, 8))
def test_coassociativity_on_generators(ctx, s):
    """(Δ⊗1)Δt_s = (1⊗Δ)Δt_s for s <= 7"""
    delta = coproduct(ctx, t(ctx, s))
    assert apply_coproduct_at(ctx, delta, 0) == apply_coproduct_at(ctx, delta, 1)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=3, max_size=3), st.integers(0, 1))
def test_coassociativity_on_random_monomials(low, top):
    """(Δ⊗1)Δ = (1⊗Δ)Δ on t_1^a t_2^b t_3^c t_4^d"""
    ctx = PrimeContext(7, 9)
    delta = coproduct(ctx, S3Monomial(low + [top]))
    assert apply_coproduct_at(ctx, delta, 0) == apply_coproduct_at(ctx, delta, 1)


@pytest.mark.parametrize("exponents", [[1], [2, 1], [0, 0, 0, 1]])
def test_counit(ctx, exponents):
    """(ε⊗1)Δ(m) = m = (1⊗ε)Δ(m)"""
    m = S3Monomial(exponents)
    delta = coproduct(ctx, m)
    assert collapse_counit(delta, 0) == TensorElement.word([m], 7)
    assert collapse_counit(delta, 1) == TensorElement.word([m], 7)


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5])
def test_coproduct_is_homogeneous(ctx, i):
    """Every word of Δt_i has the degree of t_i mod D"""
    target = ctx.generator_degree(i)
    for (a, b), _ in coproduct(ctx, t(ctx, i)):
        assert (monomial_degree(ctx, a) + monomial_degree(ctx, b)) % ctx.D == target


def test_tensor_arithmetic(ctx):
    """Sums cancel to zero and scaling reduces mod p"""
    x = TensorElement.word([t(ctx, 1)], 7, 3)
    assert not (x - x)
    assert x.scale(5).coefficient([t(ctx, 1)]) == 1
    assert x.tensor(x).arity == 2
