"""Tests for exact linear algebra over Z/p"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.exactlin import (
    ModularMatrix, SparseEchelon, divide_by_p, kernel_basis, modular_fraction, quotient_coordinates,
    rank, rref, signed, solve, sparse_rank,
)
from app.exceptions import DimensionMismatchError, DivisibilityError, ModulusError


def matrices(p=7, max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_rref_identity_block():
    """rref of an invertible matrix is the identity"""
    m = ModularMatrix.from_rows([[2, 1], [1, 1]], 7)
    result = rref(m)
    assert result.pivots == (0, 1)
    assert (result.matrix.entries == np.eye(2, dtype=np.int64)).all()


def test_rank_mod_p_differs_from_rational_rank():
    """[[1, 2], [3, 6+7]] is singular mod 7 only"""
    m = ModularMatrix.from_rows([[1, 2], [3, 13]], 7)
    assert rank(m) == 1
    assert rank(ModularMatrix.from_rows([[1, 2], [3, 13]], 11)) == 2


def test_rank_of_empty_matrix():
    """Empty matrices have rank zero"""
    assert rank(ModularMatrix.zeros(0, 3, 5)) == 0


def test_composite_modulus_rejected():
    """Row reduction refuses Z/9"""
    with pytest.raises(ModulusError):
        rref(ModularMatrix.from_rows([[3, 1]], 9))


def test_from_rows_checks_columns():
    """A declared column count must match"""
    with pytest.raises(DimensionMismatchError):
        ModularMatrix.from_rows([[1, 2, 3]], 7, cols=2)


def test_kernel_of_zero_row_matrix_is_everything():
    """No equations means the whole space"""
    basis = kernel_basis(ModularMatrix.zeros(0, 3, 7))
    assert len(basis) == 3


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(rows):
    """rank + dim kernel = number of columns, and kernel vectors are killed"""
    m = ModularMatrix.from_rows(rows, 7)
    basis = kernel_basis(m)
    assert rank(m) + len(basis) == m.cols
    for v in basis:
        assert not (m @ v).any()


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solve_finds_preimage_of_image(rows, data):
    """Every m x has a solution, and the returned solution maps to it"""
    m = ModularMatrix.from_rows(rows, 7)
    x = data.draw(st.lists(st.integers(0, 6), min_size=m.cols, max_size=m.cols))
    target = m @ x
    found = solve(m, target)
    assert found is not None
    assert ((m @ found) == target).all()


def test_solve_inconsistent_returns_none():
    """x = 1 and x = 2 cannot both hold"""
    m = ModularMatrix.from_rows([[1], [1]], 5)
    assert solve(m, [1, 2]) is None


def test_solve_checks_target_length():
    """Target length must equal the row count"""
    with pytest.raises(DimensionMismatchError):
        solve(ModularMatrix.from_rows([[1, 0]], 5), [1, 2])


def test_quotient_coordinates_zero_iff_in_span():
    """Coordinates vanish exactly on the subspace"""
    subspace = [[1, 1, 0], [0, 1, 1]]
    assert not quotient_coordinates(subspace, [1, 2, 1], 5).any()
    assert quotient_coordinates(subspace, [0, 0, 1], 5).any()


def test_quotient_coordinates_without_subspace():
    """An empty subspace gives the vector itself"""
    coords = quotient_coordinates([], [3, 4], 5)
    assert list(coords) == [3, 4]


def test_sparse_echelon_tracks_combinations():
    """A dependent vector reduces to zero with a certificate over the inserted labels"""
    echelon = SparseEchelon(7)
    assert echelon.add({"a": 1, "b": 2}, label="u")
    assert echelon.add({"b": 1, "c": 1}, label="w")
    assert not echelon.add({"a": 1, "b": 3, "c": 1})
    residual, combo = echelon.reduce({"a": 2, "b": 5, "c": 1})
    assert residual == {}
    assert combo == {"u": 2, "w": 1}


def test_sparse_echelon_contains():
    """Membership matches the dense rank computation"""
    echelon = SparseEchelon(5)
    echelon.add({0: 1, 1: 1})
    assert echelon.contains({0: 3, 1: 3})
    assert not echelon.contains({1: 1})


@settings(max_examples=40, deadline=None)
@given(matrices(p=5))
def test_sparse_rank_matches_dense_rank(rows):
    """The sparse and dense eliminations agree"""
    vectors = [{c: v for c, v in enumerate(row) if v} for row in rows]
    assert sparse_rank(vectors, 5) == rank(ModularMatrix.from_rows(rows, 5))


def test_divide_by_p_exact():
    """Multiples of p divide cleanly mod p"""
    assert divide_by_p({"x": 14, "y": 49 + 21, "z": 0}, 7) == {"x": 2, "y": 3}


def test_divide_by_p_reports_remainder():
    """Non-multiples raise with the offending terms"""
    with pytest.raises(DivisibilityError) as exc:
        divide_by_p({"x": 14, "y": 15}, 7)
    assert exc.value.remainder == {"y": 15}


def test_modular_fraction():
    """1/3 mod 7 is 5"""
    assert modular_fraction(1, 3, 7) == 5
    with pytest.raises(ModulusError):
        modular_fraction(1, 14, 7)


@given(st.integers(-1000, 1000), st.sampled_from([3, 5, 7, 11]))
def test_signed_is_symmetric_representative(value, p):
    """signed(v) ≡ v and lies in (−p/2, p/2]"""
    s = signed(value, p)
    assert (s - value) % p == 0
    assert -p // 2 < s <= p // 2
