"""Ring structure of H*S(3) ≅ H*F(3): products in the named basis, relation tables, Poincaré series"""
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import Poly, expand, symbols

from app.exceptions import NotInSpanError
from app.exactlin import signed
from app.f3cohomology import (
    CohomologyClass, DGACohomology, TriDegree, dga_cohomology, evaluate_expression, f2_named_classes,
    named_basis, split_by_degree,
)
from app.maysst import E1Element
from app.relations import (
    E3_PRODUCTS, F2_STATEMENTS, F3_MODULE, F3_RELATIONS, label_for, parse_monomial,
)
from app.s3hopf import PrimeContext

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
DISCREPANCY = "discrepancy"

# (1+t)^3 (1 + t + 6t^2 + 3t^3 + 6t^4 + t^5 + t^6)
_T = symbols("t")
POINCARE_POLYNOMIAL = (1 + _T) ** 3 * (1 + _T + 6 * _T ** 2 + 3 * _T ** 3 + 6 * _T ** 4 + _T ** 5 + _T ** 6)


class NamedRing:
    """H*F(n) with a named basis: products of classes expressed as combinations of names"""

    def __init__(self, ctx: PrimeContext, n: int = 3):
        self.ctx = ctx
        self.n = n
        self.cohomology: DGACohomology = dga_cohomology(ctx, n)
        self.classes: List[CohomologyClass] = named_basis(ctx) if n == 3 else f2_named_classes(ctx)
        self.by_name: Dict[str, CohomologyClass] = {c.name: c for c in self.classes}
        self.by_degree: Dict[TriDegree, List[CohomologyClass]] = {}
        for cls in self.classes:
            if cls.tri_degree is not None:
                self.by_degree.setdefault(cls.tri_degree, []).append(cls)

    def resolve(self, text: str) -> E1Element:
        """A class label from the named basis, or a relation-table expression at i = 0"""
        if text in self.by_name:
            return self.by_name[text].representative
        try:
            return evaluate_expression(self.ctx, text)
        except ValueError:
            raise ValueError(f"Class not found: {text}")

    def express(self, x: E1Element) -> Dict[str, int]:
        """
        Coordinates of a cocycle in the named basis.

        Raises:
            NotACocycleError: x is not closed
            NotInSpanError: some homogeneous part has no named classes
        """
        out: Dict[str, int] = {}
        for degree, part in split_by_degree(self.ctx, x).items():
            named = self.by_degree.get(degree, [])
            if not named:
                if self.cohomology.is_coboundary(part):
                    continue
                raise NotInSpanError(f"no named classes at {degree}")
            coords = self.cohomology.coordinates(part, [c.representative for c in named], degree)
            for cls, c in zip(named, coords):
                if c:
                    out[cls.name] = c
        return out

    def multiply(self, a: E1Element, b: E1Element) -> Dict[str, int]:
        return self.express(a * b)

    def multiply_names(self, left: str, right: str) -> Dict[str, int]:
        return self.multiply(self.resolve(left), self.resolve(right))

    def display(self, combination: Dict[str, int]) -> str:
        if not combination:
            return "0"
        return " + ".join(f"{signed(c, self.ctx.p)}·{name}" for name, c in sorted(combination.items()))


def degree_of(cls: CohomologyClass) -> int:
    return cls.tri_degree[0] if cls.tri_degree else 0


@dataclass
class ProductTable:
    """Products of pairs of named classes, in the named basis"""
    entries: Dict[Tuple[str, str], Dict[str, int]]
    p: int

    @classmethod
    def build(cls, ring: NamedRing, names: Optional[Sequence[str]] = None) -> "ProductTable":
        """Table over `names` (default: the module M and rho)"""
        if names is None:
            names = [c.name for c in ring.classes if not c.name.startswith("rho ")]
        entries = {}
        for left in names:
            for right in names:
                entries[(left, right)] = ring.multiply_names(left, right)
        logger.info("product table: %d entries", len(entries))
        return cls(entries, ring.ctx.p)

    def graded_commutativity_violations(self, ring: NamedRing) -> List[Tuple[str, str]]:
        out = []
        for (a, b), value in self.entries.items():
            if (b, a) not in self.entries:
                continue
            sign = (-1) ** (degree_of(ring.by_name[a]) * degree_of(ring.by_name[b]))
            mirrored = {k: (sign * v) % self.p for k, v in self.entries[(b, a)].items()}
            if {k: v for k, v in mirrored.items() if v} != value:
                out.append((a, b))
        return out

    def nonzero(self) -> Dict[Tuple[str, str], Dict[str, int]]:
        return {k: v for k, v in self.entries.items() if v}

    def to_json(self) -> List[Dict[str, Any]]:
        return [{"left": a, "right": b, "product": {k: signed(v, self.p) for k, v in sorted(value.items())}}
                for (a, b), value in sorted(self.entries.items())]

    def to_text(self) -> str:
        lines = []
        for (a, b), value in sorted(self.nonzero().items()):
            terms = " + ".join(f"{signed(c, self.p)} {name}" for name, c in sorted(value.items()))
            lines.append(f"{a} · {b} = {terms}")
        return "\n".join(lines)


def associativity_violations(ring: NamedRing, names: Sequence[str], max_dimension: int = 9) -> List[Tuple[str, str, str]]:
    """Triples whose two bracketings differ after reduction to the named basis"""
    out = []
    for a, b, c in itertools.product(names, repeat=3):
        dims = sum(degree_of(ring.by_name[x]) for x in (a, b, c))
        if dims > max_dimension:
            continue
        ab = _combination_element(ring, ring.multiply_names(a, b))
        bc = _combination_element(ring, ring.multiply_names(b, c))
        left = ring.multiply(ab, ring.resolve(c))
        right = ring.multiply(ring.resolve(a), bc)
        if left != right:
            out.append((a, b, c))
    return out


def _combination_element(ring: NamedRing, combination: Dict[str, int]) -> E1Element:
    total = E1Element({}, ring.ctx.p)
    for name, c in combination.items():
        total = total + ring.by_name[name].representative.scale(c)
    return total


# Relation checks -----------------------------------------------------------

@dataclass
class RelationResult:
    relation_id: str
    i: int
    status: str
    details: Dict[str, Any] = field(default_factory=dict)


def check_relation(ring: NamedRing, relation: Dict[str, Any], i: int) -> RelationResult:
    """
    Compare left·right with the printed right-hand side at index i.

    A printed side that is inhomogeneous or sits in another tri-degree is a
    discrepancy of the display; otherwise the two must be cohomologous. A row
    carrying a corrected side is a discrepancy when only the correction holds.
    """
    ctx = ring.ctx
    lhs = evaluate_expression(ctx, relation["left"], i) * evaluate_expression(ctx, relation["right"], i)
    rhs = evaluate_expression(ctx, relation["result"], i)
    details: Dict[str, Any] = {}
    lhs_degrees, rhs_degrees = lhs.tri_degrees(ctx), rhs.tri_degrees(ctx)
    if rhs and (len(rhs_degrees) > 1 or (lhs and lhs_degrees != rhs_degrees)):
        details["printed_degrees"] = sorted(rhs_degrees)
        details["product_degrees"] = sorted(lhs_degrees)
        try:
            details["computed"] = {k: signed(v, ctx.p) for k, v in ring.express(lhs).items()}
        except NotInSpanError:
            pass
        return RelationResult(relation["id"], i, DISCREPANCY, details)
    if ring.cohomology.cohomologous(lhs, rhs):
        return RelationResult(relation["id"], i, PASS)
    details["computed"] = {k: signed(v, ctx.p) for k, v in ring.express(lhs).items()}
    details["printed"] = relation["result"]
    corrected = relation.get("corrected")
    if corrected and ring.cohomology.cohomologous(lhs, evaluate_expression(ctx, corrected, i)):
        details["corrected"] = corrected
        details["note"] = relation.get("note", "")
        return RelationResult(relation["id"], i, DISCREPANCY, details)
    return RelationResult(relation["id"], i, FAIL, details)


def _factor_key(factors, i: int) -> Tuple:
    counter: Counter = Counter()
    for symbol, offset, power in factors:
        counter[(symbol, (i + offset) % 3)] += power
    return tuple(sorted(counter.items()))


@dataclass
class F3RelationReport:
    relations: List[RelationResult]
    zero_scan_pairs: int = 0
    zero_scan_violations: List[Dict[str, Any]] = field(default_factory=list)
    nonzero_products: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def status(self) -> str:
        if any(r.status == FAIL for r in self.relations) or self.zero_scan_violations:
            return FAIL
        if any(r.status == DISCREPANCY for r in self.relations):
            return DISCREPANCY
        return PASS


def zero_scan(ring: NamedRing) -> Tuple[int, List[Dict[str, Any]], List[Dict[str, Any]]]:
    """
    Multiply every pair of classes of M. A pair whose factors form a listed
    class of M, or the left side of a listed relation, is skipped; every
    other product must vanish.

    Returns:
        (pairs scanned, violations, nonzero products with their expansions)
    """
    ctx = ring.ctx
    listed = set()
    for entry in F3_MODULE:
        factors = parse_monomial(entry["expr"])
        listed.update(_factor_key(factors, i) for i in range(3))
    related = set()
    for relation in F3_RELATIONS:
        factors = parse_monomial(relation["left"]) + parse_monomial(relation["right"])
        related.update(_factor_key(factors, i) for i in range(3))

    module = []
    for entry in F3_MODULE:
        for i in (range(3) if entry["cyclic"] else (0,)):
            module.append((label_for(entry["name"], i), parse_monomial(entry["expr"]), i))

    violations, nonzero = [], []
    scanned = 0
    for x in range(len(module)):
        for y in range(x, len(module)):
            (name_a, fa, ia), (name_b, fb, ib) = module[x], module[y]
            key = _factor_key([(s, (o + ia) % 3, e) for s, o, e in fa] + [(s, (o + ib) % 3, e) for s, o, e in fb], 0)
            scanned += 1
            if key in listed:
                continue
            product = ring.resolve(name_a) * ring.resolve(name_b)
            if not product or ring.cohomology.is_coboundary(product):
                continue
            entry = {"left": name_a, "right": name_b,
                     "product": {k: signed(v, ctx.p) for k, v in ring.express(product).items()}}
            nonzero.append(entry)
            if key not in related:
                violations.append(entry)
    return scanned, violations, nonzero


def verify_f3_relations(ctx: PrimeContext, scan: bool = True) -> F3RelationReport:
    """Every product relation at every i, then the exhaustive zero scan over M × M"""
    ring = NamedRing(ctx, 3)
    results = [check_relation(ring, relation, i) for relation in F3_RELATIONS for i in range(3)]
    report = F3RelationReport(results)
    if scan:
        report.zero_scan_pairs, report.zero_scan_violations, report.nonzero_products = zero_scan(ring)
    failed = [r for r in results if r.status != PASS]
    logger.info("H*F(3) relations: %d relation instances, %d not passing, %d zero-scan violations",
                len(results), len(failed), len(report.zero_scan_violations))
    return report


def verify_e3_products(ctx: PrimeContext) -> List[RelationResult]:
    """Products with e_{3,i} in H*F(2), every row at every i"""
    ring = NamedRing(ctx, 2)
    return [check_relation(ring, relation, i) for relation in E3_PRODUCTS for i in range(3)]


def verify_f2_statements(ctx: PrimeContext) -> List[RelationResult]:
    """The identities stated alongside the H*F(2) generator list"""
    ring = NamedRing(ctx, 2)
    out = []
    for statement in F2_STATEMENTS:
        for i in range(3):
            left = evaluate_expression(ctx, statement["left"], i)
            right = evaluate_expression(ctx, statement["right"], i)
            if statement["kind"] == "equal":
                holds = left == right
            else:
                holds = ring.cohomology.cohomologous(left, right)
            out.append(RelationResult(statement["id"], i, PASS if holds else FAIL))
    return out


def h1_product_audit(ctx: PrimeContext) -> Dict[str, Any]:
    """
    Nonzero products h_{1,j}·x for the dimension-3 classes x of H*F(2), and
    our coefficient c in e_{3,i+2}h_{1,i} ≃ c·e_{3,i}h_{1,i}.
    """
    ring = NamedRing(ctx, 2)
    products = []
    for cls in ring.classes:
        if not cls.tri_degree or cls.tri_degree[0] != 3:
            continue
        for j in range(3):
            value = ring.multiply(evaluate_expression(ctx, "h1(0)", j), cls.representative)
            if value:
                products.append({"left": label_for("h_{1,i}", j), "right": cls.name,
                                 "product": {k: signed(v, ctx.p) for k, v in value.items()}})
    coefficients = []
    for i in range(3):
        lhs = evaluate_expression(ctx, "e3(2) h1(0)", i)
        base = evaluate_expression(ctx, "e3(0) h1(0)", i)
        degree = next(iter(base.tri_degrees(ctx)))
        coefficients.append(signed(ring.cohomology.coordinates(lhs, [base], degree)[0], ctx.p))
    return {"products": products, "e3_shift_coefficients": coefficients,
            "status": PASS if all(c == -2 for c in coefficients) else FAIL}


# Poincaré series -----------------------------------------------------------

def poincare_polynomial_coefficients() -> List[int]:
    """Coefficients of (1+t)^3(1+t+6t^2+3t^3+6t^4+t^5+t^6), lowest degree first"""
    return [int(c) for c in reversed(Poly(expand(POINCARE_POLYNOMIAL), _T).all_coeffs())]


def poincare_series(ctx: PrimeContext) -> List[int]:
    """Betti vector of H*F(3)"""
    return dga_cohomology(ctx, 3).betti


def poincare_matches(ctx: PrimeContext) -> bool:
    return poincare_series(ctx) == poincare_polynomial_coefficients()
