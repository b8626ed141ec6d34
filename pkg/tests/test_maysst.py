"""Tests for the May E_1-term"""
import pytest

from app.cobar import cobar_differential, cochain_filtration
from app.exceptions import BasisCapExceeded
from app.maysst import (
    CONCATENATE, E1Generator, E1Monomial, b, b_representative, canonical_exterior, d1, e1_element_to_cobar,
    e1_to_cobar, enumerate_e1_basis, exterior_product, h,
)
from app.s3hopf import PrimeContext, S3Monomial, TensorElement, b_element


@pytest.fixture(scope="module")
def ctx():
    return PrimeContext(7, 9)


def test_exterior_square_vanishes(ctx):
    """h_{i,j}^2 = 0"""
    assert not h(ctx, 1, 0) * h(ctx, 1, 0)


def test_exterior_anticommutes(ctx):
    """h_{1,1}h_{1,0} = -h_{1,0}h_{1,1}"""
    assert h(ctx, 1, 1) * h(ctx, 1, 0) == (h(ctx, 1, 0) * h(ctx, 1, 1)).scale(-1)


def test_canonical_exterior_sign():
    """One transposition gives sign -1, a repeat gives 0"""
    assert canonical_exterior([(2, 0), (1, 2)]) == (-1, ((1, 2), (2, 0)))
    assert canonical_exterior([(1, 0), (1, 3)])[0] == 0


def test_generator_index_is_taken_mod_three():
    """j lives in Z/3"""
    assert E1Generator(1, 4) == E1Generator(1, 1)
    with pytest.raises(ValueError):
        E1Generator(0, 0)


def test_tri_degrees(ctx):
    """h_{1,0} sits in (1, q, 1) and b_{1,0} in (2, pq, p)"""
    assert h(ctx, 1, 0).tri_degrees(ctx) == {(1, 12, 1)}
    assert b(ctx, 1, 0).tri_degrees(ctx) == {(2, 84, 7)}


def test_d1_h2(ctx):
    """d_1 h_{2,0} = -h_{1,0}h_{1,1}"""
    assert d1(ctx, h(ctx, 2, 0)) == (h(ctx, 1, 0) * h(ctx, 1, 1)).scale(-1)


def test_d1_h3(ctx):
    """d_1 h_{3,0} = -h_{1,0}h_{2,1} - h_{2,0}h_{1,2}"""
    expected = (h(ctx, 1, 0) * h(ctx, 2, 1)).scale(-1) - h(ctx, 2, 0) * h(ctx, 1, 2)
    assert d1(ctx, h(ctx, 3, 0)) == expected


def test_d1_h4_is_b(ctx):
    """Above the height d_1 h_{4,j} = b_{1,j+2}"""
    assert d1(ctx, h(ctx, 4, 0)) == b(ctx, 1, 2)
    assert d1(ctx, h(ctx, 4, 2)) == b(ctx, 1, 1)


def test_d1_kills_b(ctx):
    """b_{i,j} are d_1-cycles"""
    assert not d1(ctx, b(ctx, 1, 0))


@pytest.mark.parametrize("element", [
    lambda ctx: h(ctx, 3, 0),
    lambda ctx: h(ctx, 3, 1) * h(ctx, 2, 0),
    lambda ctx: exterior_product(ctx, (3, 0), (3, 1), (3, 2)),
    lambda ctx: h(ctx, 4, 0) * h(ctx, 2, 1),
])
def test_d1_squared(ctx, element):
    """d_1∘d_1 = 0"""
    x = element(ctx)
    assert not d1(ctx, d1(ctx, x))


def test_leibniz(ctx):
    """d_1(xy) = d_1(x)y - x d_1(y) for x of odd degree"""
    x, y = h(ctx, 2, 0), h(ctx, 3, 1)
    assert d1(ctx, x * y) == d1(ctx, x) * y - x * d1(ctx, y)


def test_enumerate_small_basis(ctx):
    """E_1^1 in filtration 1 is h_{1,0}, h_{1,1}, h_{1,2}"""
    basis = enumerate_e1_basis(ctx, 1, None, 1)
    assert basis == [E1Monomial(((1, 0),)), E1Monomial(((1, 1),)), E1Monomial(((1, 2),))]


def test_enumerate_respects_degree(ctx):
    """Every monomial has the requested (s, t) and filtration"""
    for mono in enumerate_e1_basis(ctx, 2, 96, 5):
        s, t, m = mono.tri_degree(ctx)
        assert (s, t) == (2, 96) and m <= 5


def test_enumerate_cap(ctx):
    """The enumeration guard raises past the cap"""
    with pytest.raises(BasisCapExceeded):
        enumerate_e1_basis(ctx, 2, None, 7, cap=2)


def test_b_representative_matches_b_element(ctx):
    """The binomial representative of b_{1,0} is the cobar b_{1,0}"""
    assert b_representative(ctx, 1, 0) == b_element(ctx, 1, 0)


def test_signed_representative(ctx):
    """h_{1,0}h_{1,1} ↦ [t_1|t_1^p] - [t_1^p|t_1]; the concatenated form keeps one ordering"""
    t1, t1p = S3Monomial([1]), S3Monomial([7])
    mono = E1Monomial(((1, 0), (1, 1)))
    assert e1_to_cobar(ctx, mono) == TensorElement({(t1, t1p): 1, (t1p, t1): -1}, 7)
    assert e1_to_cobar(ctx, mono, CONCATENATE) == TensorElement.word([t1, t1p], 7)


def test_signed_form_is_twice_the_concatenated_class(ctx):
    """[t_1|t_1^p] - [t_1^p|t_1] and 2[t_1|t_1^p] differ by d[t_1^{p+1}]"""
    mono = E1Monomial(((1, 0), (1, 1)))
    difference = e1_to_cobar(ctx, mono) - e1_to_cobar(ctx, mono, CONCATENATE).scale(2)
    assert difference == cobar_differential(ctx, TensorElement.word([S3Monomial([8])], 7))


def test_image_of_a_cocycle_closes_below_its_filtration(ctx):
    """g_0 = h_{2,0}h_{1,0} maps to a cochain whose differential has lower May filtration"""
    [mono] = exterior_product(ctx, (2, 0), (1, 0)).terms
    image = e1_to_cobar(ctx, mono)
    assert cochain_filtration(ctx, image) == mono.M(ctx)
    assert cochain_filtration(ctx, cobar_differential(ctx, image)) < mono.M(ctx)


def test_element_representative_is_linear(ctx):
    """Scalars pass through the representative map"""
    x = h(ctx, 1, 0).scale(3)
    assert e1_element_to_cobar(ctx, x) == TensorElement.word([S3Monomial([1])], 7, 3)


def test_unknown_convention(ctx):
    """Only the two conventions exist"""
    with pytest.raises(ValueError):
        e1_to_cobar(ctx, E1Monomial(((1, 0),)), "symmetric")
