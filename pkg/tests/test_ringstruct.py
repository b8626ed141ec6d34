"""Tests for products in the named basis and the relation tables"""
import random

import pytest

from app.f3cohomology import class_representative, evaluate_expression
from app.maysst import d1
from app.relations import F3_RELATIONS
from app.ringstruct import (
    DISCREPANCY, FAIL, PASS, NamedRing, ProductTable, associativity_violations, check_relation,
    h1_product_audit, poincare_matches, poincare_polynomial_coefficients, verify_e3_products, verify_f2_statements,
    verify_f3_relations,
)
from app.s3hopf import PrimeContext


@pytest.fixture(scope="module")
def ctx():
    return PrimeContext(7, 9)


@pytest.fixture(scope="module")
def ring(ctx):
    """H*F(3) with its 152 named classes"""
    return NamedRing(ctx, 3)


def test_poincare_polynomial():
    """(1+t)^3(1+t+6t^2+3t^3+6t^4+t^5+t^6) expands to the expected Betti vector"""
    assert poincare_polynomial_coefficients() == [1, 4, 12, 25, 34, 34, 25, 12, 4, 1]


def test_poincare_series_matches(ctx):
    """The computed Betti vector of H*F(3) is the expected Poincaré polynomial"""
    assert poincare_matches(ctx)


def test_product_of_generators(ring):
    """h_{1,0}·e_{4,0} is the named class e_{4,0}h_{1,0}"""
    assert ring.multiply_names("h_{1,0}", "e_{4,0}") == {"e_{4,0}h_{1,0}": 1}


def test_square_of_odd_class_vanishes(ring):
    """h_{1,0}^2 = 0"""
    assert ring.multiply_names("h_{1,0}", "h_{1,0}") == {}


def test_unit_is_neutral(ring):
    """1·g_1 = g_1"""
    assert ring.multiply_names("1", "g_1") == {"g_1": 1}


def test_rho_multiplication(ring):
    """ρ·k_1 is the named class ρk_1"""
    assert ring.multiply_names("rho", "k_1") == {"rho k_1": 1}


def test_expressions_resolve(ring):
    """Relation-table expressions are accepted in place of labels"""
    assert ring.multiply_names("h1(0)", "e4(0)") == {"e_{4,0}h_{1,0}": 1}


def test_unknown_label(ring):
    """Unknown labels raise ValueError"""
    with pytest.raises(ValueError):
        ring.resolve("omega_3")


def test_display_uses_signed_coefficients(ring):
    """6 is shown as -1 mod 7"""
    assert ring.display({"g_0": 6}) == "-1·g_0"
    assert ring.display({}) == "0"


def test_graded_commutativity(ring):
    """xy = (-1)^{|x||y|} yx on a sample of generators"""
    table = ProductTable.build(ring, ["h_{1,0}", "h_{1,1}", "e_{4,0}", "g_0", "k_2", "rho"])
    assert table.graded_commutativity_violations(ring) == []
    assert table.nonzero()
    assert "·" in table.to_text()


def test_associativity(ring):
    """(ab)c = a(bc) in the named basis"""
    assert associativity_violations(ring, ["h_{1,0}", "e_{4,1}", "g_2", "rho"]) == []


def test_product_table_json(ring):
    """Every ordered pair appears once"""
    names = ["h_{1,0}", "g_0"]
    entries = ProductTable.build(ring, names).to_json()
    assert len(entries) == 4
    assert {(e["left"], e["right"]) for e in entries} == {(a, b) for a in names for b in names}


@pytest.mark.parametrize("result,status", [
    ("e4(0) h1(0)", PASS),
    ("0", FAIL),
    ("2 e4(0) h1(0)", FAIL),
    ("e4(0) h1(1)", DISCREPANCY),
])
def test_check_relation_statuses(ring, result, status):
    """A relation passes, fails on a wrong class, and is a discrepancy in the wrong degree"""
    relation = {"id": "sample", "left": "h1(0)", "right": "e4(0)", "result": result}
    assert check_relation(ring, relation, 0).status == status


@pytest.mark.parametrize("corrected,status", [("e4(0) h1(0)", DISCREPANCY), ("3 e4(0) h1(0)", FAIL)])
def test_check_relation_with_correction(ring, corrected, status):
    """A wrong printed side is a discrepancy only when its correction holds"""
    relation = {"id": "sample", "left": "h1(0)", "right": "e4(0)", "result": "-e4(0) h1(0)",
                "corrected": corrected, "note": "sign"}
    result = check_relation(ring, relation, 0)
    assert result.status == status
    assert result.details["printed"] == "-e4(0) h1(0)"


def test_e3_products(ctx):
    """Every product with e_{3,i} in H*F(2) holds"""
    results = verify_e3_products(ctx)
    assert results
    assert all(r.status == PASS for r in results), [r for r in results if r.status != PASS]


def test_f2_statements(ctx):
    """Σe_{3,i} = 0, Σe_{3,i}^2 ≃ 0 and the top-class identities"""
    assert all(r.status == PASS for r in verify_f2_statements(ctx))


def test_h1_product_coefficient(ctx):
    """e_{3,i+2}h_{1,i} ≃ -2·e_{3,i}h_{1,i}"""
    audit = h1_product_audit(ctx)
    assert audit["e3_shift_coefficients"] == [-2, -2, -2]
    assert audit["status"] == PASS


def test_f3_relations_relations_without_scan(ctx):
    """No printed product relation fails"""
    report = verify_f3_relations(ctx, scan=False)
    assert report.relations
    assert not [r for r in report.relations if r.status == FAIL]
    corrected = {r.relation_id for r in report.relations if "corrected" in r.details}
    assert corrected == {r["id"] for r in F3_RELATIONS if "corrected" in r}
    assert report.status == DISCREPANCY
    assert report.zero_scan_pairs == 0


@pytest.mark.slow
def test_f3_relations_zero_scan(ctx):
    """Every pair of M outside the listed relations multiplies to zero"""
    report = verify_f3_relations(ctx)
    assert report.zero_scan_pairs == 76 * 77 // 2
    assert report.zero_scan_violations == []
    assert report.status in (PASS, DISCREPANCY)


CORRECTED_ROWS = [relation for relation in F3_RELATIONS if "corrected" in relation]


def test_corrected_rows():
    """Exactly the rows with a contradicted printed side carry a correction"""
    assert sorted(r["id"] for r in CORRECTED_ROWS) == sorted([
        "a_dim5_17", "a_dim5_18", "a_dim6_14", "a_dim6_17", "a_dim7_5", "a_dim7_7", "a_dim9_2", "a_dim9_6",
    ])


@pytest.mark.parametrize("relation", CORRECTED_ROWS, ids=[r["id"] for r in CORRECTED_ROWS])
@pytest.mark.parametrize("i", range(3))
def test_corrected_side_holds(ring, relation, i):
    """The product matches the corrected side and not the printed one"""
    ctx = ring.ctx
    product = evaluate_expression(ctx, relation["left"], i) * evaluate_expression(ctx, relation["right"], i)
    assert ring.cohomology.cohomologous(product, evaluate_expression(ctx, relation["corrected"], i))
    assert not ring.cohomology.cohomologous(product, evaluate_expression(ctx, relation["result"], i))


def test_xi_times_g(ring):
    """ξg_0 = +1/2 e_{4,0}^2h_{1,1}"""
    ctx = ring.ctx
    product = class_representative(ctx, "xi") * class_representative(ctx, "g", 0)
    assert ring.cohomology.cohomologous(product, evaluate_expression(ctx, "1/2 e4(0)^2 h1(1)"))


def test_equal_products_share_a_coefficient(ring):
    """e_{4,0}ν_0·e_{4,0}e_{4,1} and e_{4,0}^2e_{4,1}·ν_0 are the same cocycle"""
    ctx = ring.ctx
    left = evaluate_expression(ctx, "e4(0) nu(0)") * evaluate_expression(ctx, "e4(0) e4(1)")
    right = evaluate_expression(ctx, "e4(0)^2 e4(1)") * evaluate_expression(ctx, "nu(0)")
    assert left == right
    assert ring.cohomology.cohomologous(left, evaluate_expression(ctx, "1/3 rho e4(0)^2 e4(2) g(1)"))


def _boundary(ring, degree, rng):
    """d_1 of a random cochain one step below `degree`"""
    s, t, m = degree
    source = (s - 1, t, m + 1)
    dga = ring.cohomology.dga
    cochain = dga.element([rng.randrange(ring.ctx.p) for _ in dga.basis(source)], source)
    return d1(ring.ctx, cochain)


@pytest.mark.parametrize("s", range(1, 10))
def test_coordinates_ignore_boundaries(ring, s):
    """Twenty random boundaries added to classes of degree s leave their coordinates alone"""
    rng = random.Random(s)
    classes = [cls for cls in ring.classes if cls.tri_degree[0] == s]
    for _ in range(20):
        cls = rng.choice(classes)
        perturbed = cls.representative + _boundary(ring, cls.tri_degree, rng)
        assert ring.express(perturbed) == {cls.name: 1}, cls.name


@pytest.mark.parametrize("s", range(2, 10))
def test_products_ignore_boundaries(ring, s):
    """Twenty products landing in degree s keep their class when both factors move by boundaries"""
    rng = random.Random(100 + s)
    positive = [cls for cls in ring.classes if cls.tri_degree[0] > 0]
    pairs = [(a, b) for a in positive for b in positive if a.tri_degree[0] + b.tri_degree[0] == s]
    for a, b in rng.choices(pairs, k=20):
        x = a.representative + _boundary(ring, a.tri_degree, rng)
        y = b.representative + _boundary(ring, b.tri_degree, rng)
        assert ring.express(x * y) == ring.express(a.representative * b.representative), (a.name, b.name)
