"""FastAPI application entrypoint"""
from fastapi import FastAPI, Depends, HTTPException, Query
from sqlalchemy.orm import Session
from typing import List
from contextlib import asynccontextmanager
from app.config import DEFAULT_MAX_GEN, DEFAULT_PRIME, configure_logging
from app.database import get_db, init_db
from app.exceptions import InvalidConfigError, NotInSpanError, S3CohomologyError
from app.schemas import (
    RunConfig, ProductRequest, ProductResponse, RunRequest, RunResponse, SuiteReport,
    BettiResponse, GammaResponse, ZetaResponse, CheckResult
)
from app.s3hopf import PrimeContext
from app.f3cohomology import dga_cohomology
from app.ringstruct import NamedRing
from app.bpgreek import gamma_class, zeta_gamma_product
from app.verification_service import run_suite, store_report, list_runs, get_run, product_of
from app.debug import router as debug_router


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan context manager for startup/shutdown events"""
    # Startup
    configure_logging()
    init_db()
    yield


# Initialize FastAPI app
app = FastAPI(
    title="S(3) Cohomology API",
    description="Exact computations in the cohomology of the third Morava stabilizer algebra",
    version="1.0.0",
    lifespan=lifespan
)

# Include debug router
app.include_router(debug_router)


def context_for(prime: int) -> PrimeContext:
    """Validate a prime through RunConfig and build its context"""
    try:
        return RunConfig(prime=prime).context()
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@app.get("/")
async def root():
    """Show API info"""
    return {
        "message": "S(3) Cohomology API",
        "version": "1.0.0",
        "api_docs": "/docs",
        "endpoints": {
            "GET /cohomology/betti?n=": "Betti vector of H*F(n)",
            "GET /cohomology/classes": "Named basis of H*F(3)",
            "POST /products": "Product of two classes in the named basis",
            "GET /gamma/{s}": "Class of the image of gamma_s",
            "GET /zeta-gamma?n=&s=": "Product gamma_s beta zeta_3",
            "POST /runs": "Run and store a check suite",
            "GET /runs": "List stored runs",
            "GET /runs/{id}": "Stored run with its checks"
        }
    }


@app.get("/cohomology/betti", response_model=BettiResponse)
async def get_betti(n: int = Query(3, ge=1, le=3), prime: int = DEFAULT_PRIME):
    """Total dimension of H^k F(n) for each k"""
    ctx = context_for(prime)
    cohomology = dga_cohomology(ctx, n)
    return BettiResponse(n=n, betti=cohomology.betti, total=cohomology.total)


@app.get("/cohomology/classes")
async def get_classes(prime: int = DEFAULT_PRIME):
    """Named generators of H*F(3) with their tri-degrees"""
    ring = NamedRing(context_for(prime), 3)
    return [
        {"name": c.name, "tri_degree": list(c.tri_degree) if c.tri_degree else None}
        for c in ring.classes
    ]


@app.post("/products", response_model=ProductResponse)
async def multiply(request: ProductRequest, prime: int = DEFAULT_PRIME):
    """
    Multiply two classes of H*F(3).

    Either side may be a class label or an expression such as 'h1(0) g(1)'.
    """
    ctx = context_for(prime)
    try:
        product = product_of(ctx, request.left, request.right)
    except NotInSpanError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except (ValueError, S3CohomologyError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    return ProductResponse(left=request.left, right=request.right, product=product)


@app.get("/gamma/{s}", response_model=GammaResponse)
async def get_gamma(s: int, prime: int = DEFAULT_PRIME):
    """Image of γ_s in H^3 S(3) in the named basis, with the intermediate BP cochains"""
    if s < 1:
        raise HTTPException(status_code=400, detail="s must be positive")
    ctx = context_for(prime)
    try:
        report = gamma_class(ctx, s)
    except S3CohomologyError as e:
        raise HTTPException(status_code=500, detail=f"Error computing gamma_{s}: {str(e)}")
    if report.error:
        raise HTTPException(status_code=422, detail=report.error)
    return GammaResponse(
        s=s,
        coefficients=report.coefficients,
        expected=report.expected,
        status=report.status,
        displays=[CheckResult(**d.to_json()) for d in report.displays],
        chain=report.chain.to_json(),
    )


@app.get("/zeta-gamma", response_model=ZetaResponse)
async def get_zeta_gamma(n: int, s: int, prime: int = DEFAULT_PRIME):
    """γ_s β_{p^n/p^n} ζ_3 in the named basis"""
    ctx = context_for(prime)
    try:
        report = zeta_gamma_product(ctx, n, s)
    except InvalidConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except NotInSpanError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return ZetaResponse(**report.to_json())


@app.post("/runs", response_model=SuiteReport)
async def create_run(request: RunRequest, db: Session = Depends(get_db)):
    """
    Run a check suite and store the result.

    DISCREPANCY results are recorded but do not make the run fail.
    """
    try:
        config = RunConfig(prime=request.prime, max_gen=DEFAULT_MAX_GEN, persist=True)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    try:
        report = run_suite(config, request.suite, request.gamma_s,
                           [tuple(case) for case in request.product_cases])
        store_report(db, report, config)
        return report
    except InvalidConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Error running {request.suite}: {str(e)}")


@app.get("/runs", response_model=List[RunResponse])
async def get_runs(limit: int = Query(50, ge=1, le=500), db: Session = Depends(get_db)):
    """Most recent stored runs first"""
    return list_runs(db, limit)


@app.get("/runs/{run_id}", response_model=RunResponse)
async def get_run_by_id(run_id: str, db: Session = Depends(get_db)):
    run = get_run(db, run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run
