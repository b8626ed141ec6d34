"""Debug endpoints for inspecting the finite DGA and the product table"""
from fastapi import APIRouter, HTTPException, Query
from typing import Dict, Any
from app.config import DEFAULT_PRIME
from app.f3cohomology import dga_cohomology
from app.ringstruct import NamedRing, ProductTable
from app.schemas import RunConfig

router = APIRouter(prefix="/debug", tags=["debug"])


def _context(prime: int):
    try:
        return RunConfig(prime=prime).context()
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/pieces")
async def get_piece_statistics(n: int = Query(3, ge=1, le=3), prime: int = DEFAULT_PRIME) -> Dict[str, Any]:
    """
    Sizes of the (s, t, M) pieces of F(n) and of their cohomology.
    Only pieces with non-zero cohomology are listed individually.
    """
    cohomology = dga_cohomology(_context(prime), n)
    dga = cohomology.dga
    pieces = [
        {
            "degree": list(degree),
            "monomials": len(dga.basis(degree)),
            "cocycles": len(piece.cocycles),
            "cohomology": piece.dimension,
        }
        for degree, piece in sorted(cohomology.pieces.items())
        if piece.dimension
    ]
    return {
        "n": n,
        "prime": prime,
        "dga_dimension": dga.dimension,
        "piece_count": len(dga.pieces),
        "largest_piece": max(len(monos) for monos in dga.pieces.values()),
        "cohomology_total": cohomology.total,
        "pieces": pieces,
    }


@router.get("/product-table")
async def get_product_table(prime: int = DEFAULT_PRIME, nonzero_only: bool = True) -> Dict[str, Any]:
    """Pairwise products of the named generators of H*F(3)"""
    ring = NamedRing(_context(prime), 3)
    table = ProductTable.build(ring)
    entries = table.to_json()
    if nonzero_only:
        entries = [e for e in entries if e.get("product")]
    return {
        "prime": prime,
        "generators": len(ring.classes),
        "nonzero_products": len(table.nonzero()),
        "commutativity_violations": [list(pair) for pair in table.graded_commutativity_violations(ring)],
        "entries": entries,
    }
