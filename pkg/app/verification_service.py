"""Check suites shared by the CLI and the HTTP API, and their persistence"""
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sqlalchemy.orm import Session

from app.bpgreek import (
    auxiliary_coboundaries, formula_checks, gamma_class, greek_chain, phi_reduce, zeta_gamma_product,
)
from app.cobar import t1_subalgebra_comparison
from app.exactlin import signed
from app.exceptions import ConvergenceError
from app.f3cohomology import collapse_check, delta1_checks, dga_cohomology, f2_basis_ok, filtration_ss, name_generators
from app.models import CheckRecord, VerificationRun
from app.ringstruct import (
    DISCREPANCY, FAIL, PASS, NamedRing, ProductTable, h1_product_audit, poincare_polynomial_coefficients,
    verify_e3_products, verify_f2_statements, verify_f3_relations,
)
from app.s3hopf import PrimeContext, S3Monomial, TensorElement, b_element
from app.schemas import CheckResult, RunConfig, SuiteReport

logger = logging.getLogger(__name__)

DEFAULT_GAMMA_S = (2, 3, 4, 5)
DEFAULT_PRODUCT_CASES = ((3, 2), (4, 2), (5, 2))
T1_ORACLE_PRIME = 3

EXPECTED_BETTI = {
    1: [1, 3, 3, 1],
    2: [1, 3, 8, 12, 8, 3, 1],
}


def _check(check_id: str, anchor: str, ok: bool, details: Optional[Dict[str, Any]] = None) -> CheckResult:
    return CheckResult(check_id=check_id, anchor=anchor, status=PASS if ok else FAIL, details=details or {})


def overall_status(checks: Sequence[CheckResult]) -> str:
    """fail beats discrepancy beats pass"""
    statuses = {c.status for c in checks}
    if FAIL in statuses:
        return FAIL
    if DISCREPANCY in statuses:
        return DISCREPANCY
    return PASS


# Suites --------------------------------------------------------------------

def cohomology_checks(ctx: PrimeContext) -> List[CheckResult]:
    """Betti vectors, filtration spectral sequences, named generators, collapse and T[t_1] at p = 3"""
    checks = []
    for n, expected in list(EXPECTED_BETTI.items()) + [(3, poincare_polynomial_coefficients())]:
        betti = dga_cohomology(ctx, n).betti
        checks.append(_check(f"betti_f{n}", "cohomology of F(n)", betti == expected,
                             {"computed": betti, "expected": expected}))

    for n in (2, 3):
        try:
            pages = filtration_ss(ctx, n)
            checks.append(_check(f"filtration_f{n}", "filtration spectral sequence", True,
                                 {"e1_total": pages.total(1), "e_infinity_total": sum(pages.e_infinity.values())}))
        except ConvergenceError as e:
            checks.append(_check(f"filtration_f{n}", "filtration spectral sequence", False, {"dump": e.dump}))

    for check_id, i, holds in delta1_checks(ctx):
        checks.append(_check(f"{check_id}[{i}]", "first page differential", holds))

    naming = name_generators(ctx)
    checks.append(_check("named_generators", "generators of H*F(3)", naming.ok, {
        "classes": len(naming.classes),
        "mismatches": [{k: str(v) for k, v in m.items()} for m in naming.mismatches],
        "rho_injective": naming.rho_injective,
        "coincidences": naming.coincidences,
    }))
    checks.append(_check("named_generators_f2", "generators of H*F(2)", f2_basis_ok(ctx)))

    collapse = collapse_check(ctx)
    checks.append(_check("may_collapse", "collapse of the May spectral sequence", collapse.ok,
                         {"classes": collapse.checked, "violations": [str(v) for v in collapse.violations]}))

    t1 = t1_subalgebra_comparison(ctx if ctx.p == T1_ORACLE_PRIME else PrimeContext(T1_ORACLE_PRIME, 3))
    checks.append(_check("t1_subalgebra_p3", "cohomology of T[t_1]", t1.ok, {
        "max_s": t1.max_s, "may_bound": t1.may_bound, "pieces": len(t1.cobar), "mismatches": t1.mismatches,
    }))
    return checks


def relation_checks(ctx: PrimeContext, dump_products: bool = False) -> List[CheckResult]:
    """H*F(3) relations with the zero scan, the e_3 product table and the H*F(2) statements"""
    checks = []
    f3 = verify_f3_relations(ctx)
    for r in f3.relations:
        checks.append(CheckResult(check_id=f"{r.relation_id}[{r.i}]", anchor="product relations in H*F(3)",
                                  status=r.status, details=r.details))
    checks.append(_check("zero_scan", "product relations in H*F(3)", not f3.zero_scan_violations, {
        "pairs": f3.zero_scan_pairs,
        "violations": f3.zero_scan_violations,
        "nonzero_products": len(f3.nonzero_products),
    }))
    for r in verify_e3_products(ctx):
        checks.append(CheckResult(check_id=f"{r.relation_id}[{r.i}]", anchor="products with e_3 in H*F(2)",
                                  status=r.status, details=r.details))
    for r in verify_f2_statements(ctx):
        checks.append(CheckResult(check_id=f"{r.relation_id}[{r.i}]", anchor="generators of H*F(2)",
                                  status=r.status, details=r.details))
    audit = h1_product_audit(ctx)
    checks.append(CheckResult(check_id="h1_products", anchor="products h_1 with dimension 3 classes",
                              status=audit["status"], details=audit))
    if dump_products:
        table = ProductTable.build(NamedRing(ctx, 3))
        checks.append(_check("product_table", "product relations in H*F(3)", True, {"entries": table.to_json()}))
    return checks


def gamma_checks(ctx: PrimeContext, s_values: Sequence[int] = DEFAULT_GAMMA_S,
                 may_bound: Optional[int] = None) -> List[CheckResult]:
    """BP formulas, the φ images of α_1 and β_1, auxiliary coboundaries and the classes of γ_s"""
    checks = [CheckResult(**c.to_json()) for c in formula_checks(ctx)]

    alpha = phi_reduce(ctx, greek_chain(ctx, 1, 1))
    checks.append(_check("phi_alpha1", "reduction map", alpha == TensorElement.word([S3Monomial([1])], ctx.p),
                         {"image": repr(alpha)}))
    beta = phi_reduce(ctx, greek_chain(ctx, 2, 1))
    checks.append(_check("phi_beta1", "reduction map", beta == b_element(ctx, 1, 0).scale(-1),
                         {"image_terms": len(beta)}))

    checks.extend(CheckResult(**c.to_json()) for c in auxiliary_coboundaries(ctx))

    for s in s_values:
        report = gamma_class(ctx, s, may_bound) if may_bound else gamma_class(ctx, s)
        checks.extend(CheckResult(**d.to_json()) for d in report.displays)
        checks.append(CheckResult(check_id=f"gamma_{s}", anchor="class of gamma_s", status=report.status,
                                  details={"coefficients": report.coefficients, "expected": report.expected,
                                           "cocycle_terms": report.cocycle_terms, "error": report.error}))
    return checks


def product_checks(ctx: PrimeContext, cases: Sequence[Tuple[int, int]] = DEFAULT_PRODUCT_CASES) -> List[CheckResult]:
    """γ_s β_{p^n/p^n} ζ_3 for each (n, s)"""
    checks = []
    for n, s in cases:
        report = zeta_gamma_product(ctx, n, s)
        checks.append(CheckResult(check_id=f"zeta_gamma_n{n}_s{s}", anchor="products with zeta",
                                  status=report.status, details=report.to_json()))
    return checks


def run_suite(config: RunConfig, suite: str, gamma_s: Sequence[int] = DEFAULT_GAMMA_S,
              product_cases: Sequence[Tuple[int, int]] = DEFAULT_PRODUCT_CASES) -> SuiteReport:
    """
    Run a named suite.

    Args:
        config: Validated run configuration
        suite: cohomology, relations, gamma, product or verify-all
        gamma_s: s values for the gamma suite
        product_cases: (n, s) pairs for the product suite

    Returns:
        SuiteReport with every check in a fixed order
    """
    ctx = config.context()
    if config.algebra_only:
        logger.warning("p = %d < 7: algebra-only mode, topological statements are not asserted", config.prime)
    checks: List[CheckResult] = []
    if suite in ("cohomology", "verify-all"):
        checks += cohomology_checks(ctx)
    if suite in ("relations", "verify-all"):
        checks += relation_checks(ctx, config.dump_products)
    if suite in ("gamma", "verify-all"):
        checks += gamma_checks(ctx, gamma_s, config.may_bound)
    if suite in ("product", "verify-all"):
        checks += product_checks(ctx, product_cases)
    status = overall_status(checks)
    logger.info("%s at p = %d: %d checks, %s", suite, config.prime, len(checks), status)
    return SuiteReport(suite=suite, prime=config.prime, algebra_only=config.algebra_only, status=status, checks=checks)


# Persistence ---------------------------------------------------------------

def store_report(db: Session, report: SuiteReport, config: RunConfig) -> VerificationRun:
    """
    Store a suite report with one row per check.

    Args:
        db: Database session
        report: The finished report
        config: Configuration the report was produced with

    Returns:
        Created VerificationRun object
    """
    run = VerificationRun(
        command=report.suite,
        prime=report.prime,
        config=config.model_dump(),
        status=report.status,
    )
    db.add(run)
    db.flush()  # Flush to get run ID before adding the checks

    for position, check in enumerate(report.checks):
        db.add(CheckRecord(
            run_id=run.id,
            position=position,
            check_id=check.check_id,
            anchor=check.anchor,
            status=check.status,
            details=check.details,
        ))
    db.commit()
    db.refresh(run)
    report.run_id = run.id
    return run


def list_runs(db: Session, limit: int = 50) -> List[VerificationRun]:
    return db.query(VerificationRun).order_by(VerificationRun.created_at.desc()).limit(limit).all()


def get_run(db: Session, run_id: str) -> Optional[VerificationRun]:
    return db.query(VerificationRun).filter(VerificationRun.id == run_id).first()


def product_of(ctx: PrimeContext, left: str, right: str) -> Dict[str, int]:
    """left · right in the named basis of H*F(3), signed coefficients"""
    ring = NamedRing(ctx, 3)
    return {name: signed(c, ctx.p) for name, c in sorted(ring.multiply_names(left, right).items())}
