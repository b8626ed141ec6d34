"""Pydantic schemas for run configuration, reports and API payloads"""
from pydantic import BaseModel, Field, field_validator
from typing import Optional, Dict, List, Any
from datetime import datetime
from sympy import isprime

from app.config import DEFAULT_MAX_GEN, DEFAULT_MAY_BOUND, DEFAULT_PRIME, TOPOLOGICAL_MIN_PRIME
from app.s3hopf import PrimeContext

SUITES = ("cohomology", "relations", "gamma", "product", "verify-all")
FORMATS = ("json", "text")


# Run configuration
class RunConfig(BaseModel):
    """Validated settings shared by the CLI and the HTTP API"""
    prime: int = Field(DEFAULT_PRIME, description="Odd prime p")
    max_gen: int = Field(DEFAULT_MAX_GEN, description="Largest generator index t_i used in S(3)")
    may_bound: int = Field(DEFAULT_MAY_BOUND, description="May filtration bound for class identification")
    out: Optional[str] = Field(None, description="Report path (stdout when omitted)")
    format: str = Field("json", description="Report format: json or text")
    persist: bool = Field(False, description="Store the run in the database")
    dump_products: bool = Field(False, description="Include the full product table in relation reports")

    @field_validator("prime")
    @classmethod
    def check_prime(cls, v: int) -> int:
        if v < 3 or not isprime(v):
            raise ValueError(f"{v} is not an odd prime")
        return v

    @field_validator("max_gen", "may_bound")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("bounds must be positive")
        return v

    @field_validator("format")
    @classmethod
    def check_format(cls, v: str) -> str:
        if v not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}")
        return v

    @property
    def algebra_only(self) -> bool:
        return self.prime < TOPOLOGICAL_MIN_PRIME

    def context(self) -> PrimeContext:
        return PrimeContext(self.prime, self.max_gen)


# Check reports
class CheckResult(BaseModel):
    """Outcome of one check"""
    check_id: str
    anchor: str
    status: str  # "pass", "fail" or "discrepancy"
    details: Dict[str, Any] = Field(default_factory=dict)

    class Config:
        from_attributes = True


class SuiteReport(BaseModel):
    """All checks of one suite run"""
    suite: str
    prime: int
    algebra_only: bool
    status: str
    checks: List[CheckResult]
    run_id: Optional[str] = None


# Requests
class ProductRequest(BaseModel):
    """Schema for a product of two named classes"""
    left: str = Field(..., description="Class label or expression, e.g. 'e_{4,0}' or 'h1(0) g(1)'")
    right: str = Field(..., description="Class label or expression")


class ProductResponse(BaseModel):
    left: str
    right: str
    product: Dict[str, int]


class RunRequest(BaseModel):
    """Schema for starting a stored run"""
    suite: str = Field(..., description="One of cohomology, relations, gamma, product, verify-all")
    prime: int = DEFAULT_PRIME
    gamma_s: List[int] = Field(default_factory=lambda: [2, 3, 4, 5])
    product_cases: List[List[int]] = Field(default_factory=lambda: [[3, 2], [4, 2], [5, 2]])

    @field_validator("suite")
    @classmethod
    def check_suite(cls, v: str) -> str:
        if v not in SUITES:
            raise ValueError(f"unknown suite {v}")
        return v


# Responses
class RunResponse(BaseModel):
    """Schema for a stored run"""
    id: str
    command: str
    prime: int
    status: str
    created_at: datetime
    checks: List[CheckResult]

    class Config:
        from_attributes = True


class BettiResponse(BaseModel):
    n: int
    betti: List[int]
    total: int


class GammaResponse(BaseModel):
    s: int
    coefficients: Dict[str, int]
    expected: Dict[str, int]
    status: str
    displays: List[CheckResult]
    chain: Dict[str, Any]


class ZetaResponse(BaseModel):
    n: int
    s: int
    case: int
    b_coefficient: int
    combination: Dict[str, int]
    expected: Dict[str, int]
    nontrivial: bool
    status: str
    x_terms: List[Dict[str, Any]]
