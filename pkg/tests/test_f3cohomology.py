"""Tests for H*F(n), its filtration spectral sequence and the named generators"""
import pytest

from app.exceptions import NotACocycleError
from app.f3cohomology import (
    class_representative, collapse_check, delta1_checks, dga_cohomology, evaluate_expression, f2_basis_ok,
    f2_named_classes, filtration_ss, first_page_equal, leading_differential, module_classes, name_generators,
    named_basis,
)
from app.maysst import d1, exterior_product, h
from app.relations import label_for, parse_expression
from app.s3hopf import PrimeContext


@pytest.fixture(scope="module")
def ctx():
    return PrimeContext(7, 9)


@pytest.mark.parametrize("n,expected", [
    (1, [1, 3, 3, 1]),
    (2, [1, 3, 8, 12, 8, 3, 1]),
    (3, [1, 4, 12, 25, 34, 34, 25, 12, 4, 1]),
])
def test_betti_vectors(ctx, n, expected):
    """Total dimension of H^k F(n) for each k"""
    assert dga_cohomology(ctx, n).betti == expected


def test_total_dimension_f3(ctx):
    """H*F(3) has dimension 152"""
    assert dga_cohomology(ctx, 3).total == 152


def test_dga_rejects_large_n(ctx):
    """F(n) is only built for n <= 3"""
    with pytest.raises(ValueError):
        dga_cohomology(ctx, 4)


def test_coboundary_membership(ctx):
    """h_{1,0}h_{1,1} = -d_1 h_{2,0} is a coboundary; h_{1,0} is not"""
    cohomology = dga_cohomology(ctx, 2)
    assert cohomology.is_coboundary(h(ctx, 1, 0) * h(ctx, 1, 1))
    assert not cohomology.is_coboundary(h(ctx, 1, 0))
    assert cohomology.cohomologous(h(ctx, 1, 0) + h(ctx, 1, 0) * h(ctx, 1, 1), h(ctx, 1, 0))


def test_coordinates_require_cocycle(ctx):
    """h_{2,0} is not closed"""
    cohomology = dga_cohomology(ctx, 2)
    x = h(ctx, 2, 0)
    with pytest.raises(NotACocycleError):
        cohomology.coordinates(x, [], x.tri_degrees(ctx).pop())


def test_coordinates_of_multiple(ctx):
    """3·g_0 has coordinate 3 on g_0"""
    cohomology = dga_cohomology(ctx, 2)
    g0 = class_representative(ctx, "g", 0)
    degree = g0.tri_degrees(ctx).pop()
    assert cohomology.coordinates(g0.scale(3), [g0], degree) == [3]


@pytest.mark.parametrize("n", [2, 3])
def test_filtration_spectral_sequence_converges(ctx, n):
    """E_infinity of the h_{n,*} filtration matches the direct computation"""
    pages = filtration_ss(ctx, n)
    assert pages.converged
    assert sum(pages.e_infinity.values()) == dga_cohomology(ctx, n).total


def test_first_page_differential_of_h3(ctx):
    """δ_1(h_{3,0}) = -e_{3,0} on the first page"""
    image = leading_differential(ctx, 3, h(ctx, 3, 0))
    assert first_page_equal(ctx, 3, image, evaluate_expression(ctx, "-e3(0)"))
    assert not first_page_equal(ctx, 3, image, evaluate_expression(ctx, "e3(0)"))


def test_first_page_displays(ctx):
    """All three displayed δ_1 values hold at every index"""
    results = delta1_checks(ctx)
    assert len(results) == 9
    assert all(holds for _, _, holds in results)


def test_module_has_76_classes(ctx):
    """M has 76 classes and rho·M doubles it"""
    assert len(module_classes(ctx)) == 76
    names = [c.name for c in named_basis(ctx)]
    assert len(names) == 152
    assert len(set(names)) == 152
    assert "nu_0" in names and "rho k_1" in names


def test_named_generators(ctx):
    """Every named class is a cocycle in its stated degree and together they form a basis"""
    report = name_generators(ctx)
    assert report.mismatches == []
    assert report.basis_ok
    assert report.rho_injective
    assert report.ok


def test_named_classes_are_cocycles(ctx):
    """d_1 kills every representative"""
    for cls in named_basis(ctx):
        assert not d1(ctx, cls.representative), cls.name


def test_f2_basis(ctx):
    """The 36 chosen classes form a basis of H*F(2)"""
    assert len(f2_named_classes(ctx)) == 36
    assert f2_basis_ok(ctx)


def test_may_spectral_sequence_collapses(ctx):
    """No piece can support a May differential"""
    report = collapse_check(ctx)
    assert report.ok
    assert report.checked == 152


def test_class_json(ctx):
    """Reports carry the tri-degree split into s, t and M"""
    payload = named_basis(ctx)[1].to_json()
    assert payload["name"] == label_for("h_{1,i}", 0)
    assert (payload["s"], payload["t"], payload["M"]) == (1, 12, 1)


def test_unknown_symbol(ctx):
    """Unknown symbols are rejected"""
    with pytest.raises(ValueError):
        class_representative(ctx, "zeta")


def test_expression_coefficients_reduce_mod_p(ctx):
    """1/3 becomes 5 mod 7"""
    [(coefficient, factors)] = parse_expression("1/3 g(1)")
    assert factors == [("g", 1, 1)]
    x = evaluate_expression(ctx, "1/3 g(1)")
    assert x == class_representative(ctx, "g", 1).scale(5)


@pytest.mark.parametrize("c", range(7))
def test_xi_closes_with_one_h2_orbit_term(ctx, c):
    """Σh_{3,i+1}e_{3,i} + c·h_{2,0}h_{2,1}h_{2,2} is a cocycle only for c = 1"""
    orbit = exterior_product(ctx, (2, 0), (2, 1), (2, 2))
    candidate = class_representative(ctx, "xi") + orbit.scale(c - 1)
    assert (not d1(ctx, candidate)) == (c == 1)


def test_xi_is_a_nonzero_class(ctx):
    """ξ is closed and not a boundary"""
    xi = class_representative(ctx, "xi")
    cohomology = dga_cohomology(ctx, 3)
    assert cohomology.is_cocycle(xi)
    assert not cohomology.is_coboundary(xi)


def test_collapse_ignores_first_differential_targets(ctx):
    """Pieces one May step below are d_1 targets and are not counted against the collapse"""
    dims = dga_cohomology(ctx, 3).dimensions
    adjacent = [(a, b) for a in dims for b in dims if b[0] == a[0] + 1 and b[1] == a[1] and b[2] == a[2] - 1]
    assert adjacent
    assert collapse_check(ctx).violations == []
