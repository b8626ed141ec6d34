"""Tests for the reduced cobar complex"""
import pytest

from app.cobar import (
    CobarWord, cobar_differential, enumerate_words, identify_class, is_cocycle, lift_to_cocycle,
    restricted_cohomology, t1_subalgebra_comparison, word_filtration,
)
from app.exceptions import BasisCapExceeded, NotACocycleError, NotInSpanError
from app.s3hopf import PrimeContext, S3Monomial, TensorElement, b_element


@pytest.fixture(scope="module")
def ctx():
    return PrimeContext(7, 9)


def t(ctx, i, e=1):
    return S3Monomial.power(ctx, i, e)


def word(ctx, *factors, coefficient=1):
    return TensorElement.word(factors, ctx.p, coefficient)


def test_cobar_word_rejects_unit(ctx):
    """The reduced complex has no unit factors"""
    with pytest.raises(ValueError):
        CobarWord((t(ctx, 1), S3Monomial()))
    assert CobarWord((t(ctx, 1), t(ctx, 2))).may_filtration(ctx) == 4


def test_primitive_is_cocycle(ctx):
    """t_1 is primitive, so [t_1] and [t_1|t_1] are closed"""
    assert is_cocycle(ctx, word(ctx, t(ctx, 1)))
    assert is_cocycle(ctx, word(ctx, t(ctx, 1), t(ctx, 1)))


def test_differential_of_t2(ctx):
    """d[t_2] = -[t_1|t_1^p]: the first slot carries the minus sign"""
    assert cobar_differential(ctx, word(ctx, t(ctx, 2))) == word(ctx, t(ctx, 1), t(ctx, 1, 7), coefficient=-1)


def test_differential_of_square(ctx):
    """d[t_1^2] = -2[t_1|t_1]"""
    assert cobar_differential(ctx, word(ctx, t(ctx, 1, 2))) == word(ctx, t(ctx, 1), t(ctx, 1), coefficient=-2)


@pytest.mark.parametrize("factors", [
    ([0, 1],),
    ([0, 0, 1],),
    ([0, 1], [1]),
    ([3, 1], [0, 1]),
    ([1, 0, 1], [2], [0, 1]),
])
def test_d_squared_is_zero(ctx, factors):
    """d∘d = 0"""
    x = word(ctx, *(S3Monomial(f) for f in factors))
    assert not cobar_differential(ctx, cobar_differential(ctx, x))


def test_b10_is_a_cocycle(ctx):
    """b_{1,0} is closed in the cobar complex"""
    assert is_cocycle(ctx, b_element(ctx, 1, 0))


def test_enumerate_words_respects_bounds(ctx):
    """Every enumerated word has the requested degree and filtration"""
    words = enumerate_words(ctx, 2, 96, 5)
    assert words
    for w in words:
        assert len(w) == 2
        assert word_filtration(ctx, w) <= 5
        assert sum(m.degree(ctx) for m in w) % ctx.D == 96


def test_enumerate_words_cap(ctx):
    """The enumeration guard raises past the cap"""
    with pytest.raises(BasisCapExceeded):
        enumerate_words(ctx, 2, 96, 9, cap=1)


def test_h1_at_q(ctx):
    """H^{1,q} in filtration 1 is spanned by [t_1]"""
    result = restricted_cohomology(ctx, 1, 12, 1)
    assert result.dimension == 1
    assert result.classes[0] == word(ctx, t(ctx, 1))


def test_graded_h1_at_q(ctx):
    """The associated graded complex gives the same class"""
    assert restricted_cohomology(ctx, 1, 12, 1, graded=True).dimension == 1


def test_lift_keeps_cocycles(ctx):
    """A cocycle needs no correction"""
    b10 = b_element(ctx, 1, 0)
    assert lift_to_cocycle(ctx, b10) == b10


def test_identify_class_recovers_coefficient(ctx):
    """3·b_{1,0} + d[t_1^64] is three times b_{1,0}, with a checked certificate"""
    b10 = b_element(ctx, 1, 0)
    cocycle = b10.scale(3) + cobar_differential(ctx, word(ctx, t(ctx, 1, 64)))
    result = identify_class(ctx, cocycle, {"b10": b10}, may_bound=7)
    assert result.coordinates == {"b10": 3}
    assert cocycle - cobar_differential(ctx, result.primitive) == b10.scale(3)


def test_identify_class_rejects_non_cocycle(ctx):
    """[t_2] is not closed"""
    with pytest.raises(NotACocycleError):
        identify_class(ctx, word(ctx, t(ctx, 2)), {}, may_bound=3)


def test_identify_class_rejects_trivial_named_class(ctx):
    """[t_1|t_1] is a coboundary, so it cannot be part of a basis"""
    x = word(ctx, t(ctx, 1), t(ctx, 1))
    with pytest.raises(NotInSpanError):
        identify_class(ctx, x, {"h10 h10": x}, may_bound=2)


def test_identify_zero(ctx):
    """The zero cocycle has zero coordinates"""
    result = identify_class(ctx, TensorElement({}, 7), {"b10": b_element(ctx, 1, 0)}, may_bound=7)
    assert result.coordinates == {"b10": 0}


def test_t1_subalgebra_at_p3():
    """At p = 3 the cobar complex on t_1 has the dimensions of E[h_{1,j}] ⊗ P[b_{1,j}] for s <= 4"""
    small = PrimeContext(3, 3)
    comparison = t1_subalgebra_comparison(small)
    assert comparison.mismatches == []
    assert comparison.ok
    assert comparison.cobar[(1, small.q)] == 1
    assert comparison.cobar[(2, small.q * small.p)] == 1
    assert max(s for s, _ in comparison.cobar) == 4
