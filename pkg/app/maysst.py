"""
The May E_1-term E[h_{i,j}] ⊗ P[b_{i,j}] of S(3): tri-graded monomials,
the first May differential d_1 and the representative map into the cobar
complex.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import binomial

from app.config import DEFAULT_BASIS_CAP
from app.exceptions import BasisCapExceeded
from app.s3hopf import PrimeContext, S3Monomial, TensorElement, Word, may_filtration_generator

logger = logging.getLogger(__name__)

H = "H"
B = "B"

Index = Tuple[int, int]


@dataclass(frozen=True, order=True)
class E1Generator:
    """h_{i,j} (kind H, s = 1) or b_{i,j} (kind B, s = 2); j is taken mod 3"""
    i: int
    j: int
    kind: str = H

    def __post_init__(self):
        if self.i < 1:
            raise ValueError(f"generator index must be >= 1, got {self.i}")
        if self.kind not in (H, B):
            raise ValueError(f"unknown generator kind {self.kind}")
        object.__setattr__(self, "j", self.j % 3)

    @property
    def s(self) -> int:
        return 1 if self.kind == H else 2

    def t(self, ctx: PrimeContext) -> int:
        shift = self.j if self.kind == H else self.j + 1
        return (2 * (ctx.p ** self.i - 1) * ctx.p ** (shift % 3)) % ctx.D

    def M(self, ctx: PrimeContext) -> int:
        base = may_filtration_generator(ctx, self.i, self.j)
        return base if self.kind == H else ctx.p * base

    def name(self) -> str:
        return f"{self.kind.lower()}_{{{self.i},{self.j}}}"


@dataclass(frozen=True)
class E1Monomial:
    """
    h_{a_1}⋯h_{a_k}·∏ b_c^{e_c} in canonical form: the exterior indices are
    strictly increasing in (i, j) order and the polynomial part is sorted.
    """
    exterior: Tuple[Index, ...] = ()
    poly: Tuple[Tuple[Index, int], ...] = ()

    @property
    def s(self) -> int:
        return len(self.exterior) + 2 * sum(e for _, e in self.poly)

    def t(self, ctx: PrimeContext) -> int:
        total = sum(E1Generator(i, j, H).t(ctx) for i, j in self.exterior)
        total += sum(e * E1Generator(i, j, B).t(ctx) for (i, j), e in self.poly)
        return total % ctx.D

    def M(self, ctx: PrimeContext) -> int:
        total = sum(E1Generator(i, j, H).M(ctx) for i, j in self.exterior)
        return total + sum(e * E1Generator(i, j, B).M(ctx) for (i, j), e in self.poly)

    def tri_degree(self, ctx: PrimeContext) -> Tuple[int, int, int]:
        return self.s, self.t(ctx), self.M(ctx)

    def name(self) -> str:
        parts = [f"h_{{{i},{j}}}" for i, j in self.exterior]
        parts += [f"b_{{{i},{j}}}" + (f"^{e}" if e > 1 else "") for (i, j), e in self.poly]
        return "".join(parts) or "1"


ONE = E1Monomial()


def canonical_exterior(indices: Sequence[Index]) -> Tuple[int, Tuple[Index, ...]]:
    """
    Sort an exterior word into increasing order.

    Returns:
        (sign, sorted indices); sign is 0 when an index repeats
    """
    normalized = [(i, j % 3) for i, j in indices]
    if len(set(normalized)) != len(normalized):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(normalized, 2) if a > b)
    return (-1) ** inversions, tuple(sorted(normalized))


def _merge_poly(a: Tuple[Tuple[Index, int], ...], b: Tuple[Tuple[Index, int], ...]) -> Tuple[Tuple[Index, int], ...]:
    out: Dict[Index, int] = dict(a)
    for key, e in b:
        out[key] = out.get(key, 0) + e
    return tuple(sorted(out.items()))


def monomial_product(x: E1Monomial, y: E1Monomial) -> Tuple[int, E1Monomial]:
    """x·y = sign·canonical monomial (sign 0 when the exterior parts overlap)"""
    sign, ext = canonical_exterior(x.exterior + y.exterior)
    if not sign:
        return 0, ONE
    return sign, E1Monomial(ext, _merge_poly(x.poly, y.poly))


class E1Element:
    """F_p-linear combination of E_1 monomials"""

    def __init__(self, terms: Dict[E1Monomial, int] = None, modulus: int = 7):
        self.modulus = modulus
        self.terms: Dict[E1Monomial, int] = {}
        for mono, c in (terms or {}).items():
            c %= modulus
            if c:
                self.terms[mono] = c

    @classmethod
    def monomial(cls, mono: E1Monomial, modulus: int, coefficient: int = 1) -> "E1Element":
        return cls({mono: coefficient}, modulus)

    @classmethod
    def from_exterior(cls, indices: Sequence[Index], modulus: int, coefficient: int = 1) -> "E1Element":
        """h_{a_1}⋯h_{a_k} written in any order"""
        sign, ext = canonical_exterior(indices)
        return cls({E1Monomial(ext): sign * coefficient} if sign else {}, modulus)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, E1Element):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: "E1Element") -> "E1Element":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return E1Element(out, self.modulus)

    def __neg__(self) -> "E1Element":
        return self.scale(-1)

    def __sub__(self, other: "E1Element") -> "E1Element":
        return self + (-other)

    def __mul__(self, other: "E1Element") -> "E1Element":
        out: Dict[E1Monomial, int] = {}
        for x, cx in self.terms.items():
            for y, cy in other.terms.items():
                sign, mono = monomial_product(x, y)
                if sign:
                    out[mono] = out.get(mono, 0) + sign * cx * cy
        return E1Element(out, self.modulus)

    def scale(self, k: int) -> "E1Element":
        return E1Element({m: c * k for m, c in self.terms.items()}, self.modulus)

    def coefficient(self, mono: E1Monomial) -> int:
        return self.terms.get(mono, 0)

    def tri_degrees(self, ctx: PrimeContext) -> set:
        return {m.tri_degree(ctx) for m in self.terms}

    def __repr__(self) -> str:
        parts = [f"{c}·{m.name()}" for m, c in sorted(self.terms.items(), key=lambda kv: (kv[0].exterior, kv[0].poly))]
        return " + ".join(parts) if parts else "0"


def h(ctx: PrimeContext, i: int, j: int) -> E1Element:
    return E1Element.monomial(E1Monomial(((i, j % 3),)), ctx.p)


def b(ctx: PrimeContext, i: int, j: int) -> E1Element:
    return E1Element.monomial(E1Monomial((), (((i, j % 3), 1),)), ctx.p)


def exterior_product(ctx: PrimeContext, *indices: Index) -> E1Element:
    return E1Element.from_exterior(indices, ctx.p)


# First May differential ----------------------------------------------------

@lru_cache(maxsize=None)
def _d1_generator(ctx: PrimeContext, i: int, j: int) -> Tuple[Tuple[E1Monomial, int], ...]:
    """
    d_1(h_{i,j}) = -Σ_{k=1}^{i-1} h_{k,j} h_{i-k,j+k} for i <= 3,
    d_1(h_{i,j}) = b_{i-3,j+2} for i > 3.
    """
    if i > 3:
        return ((E1Monomial((), (((i - 3, (j + 2) % 3), 1),)), 1),)
    out: Dict[E1Monomial, int] = {}
    for k in range(1, i):
        sign, ext = canonical_exterior([(k, j), (i - k, j + k)])
        if sign:
            mono = E1Monomial(ext)
            out[mono] = out.get(mono, 0) - sign
    return tuple((m, c) for m, c in out.items() if c)


def d1_monomial(ctx: PrimeContext, mono: E1Monomial) -> Dict[E1Monomial, int]:
    """Signed Leibniz rule: d(xy) = d(x)y + (-1)^{s(x)} x d(y); d_1(b) = 0"""
    out: Dict[E1Monomial, int] = {}
    ext = mono.exterior
    for pos, (i, j) in enumerate(ext):
        sign = -1 if pos % 2 else 1
        for image, c in _d1_generator(ctx, i, j):
            # d_1(h) has even s, so it slots in place without extra sign
            s2, new_ext = canonical_exterior(ext[:pos] + image.exterior + ext[pos + 1:])
            if not s2:
                continue
            target = E1Monomial(new_ext, _merge_poly(mono.poly, image.poly))
            out[target] = out.get(target, 0) + sign * s2 * c
    return out


def d1(ctx: PrimeContext, x: E1Element) -> E1Element:
    out: Dict[E1Monomial, int] = {}
    for mono, c in x.terms.items():
        for target, cc in d1_monomial(ctx, mono).items():
            out[target] = out.get(target, 0) + c * cc
    return E1Element(out, x.modulus)


# Enumeration ---------------------------------------------------------------

def e1_generators(ctx: PrimeContext, may_bound: int, generators: Optional[Iterable[int]] = None,
                  kinds: Sequence[str] = (H, B)) -> List[E1Generator]:
    """All generators with M <= may_bound, in (i, j, kind) order"""
    allowed = set(generators) if generators is not None else None
    out = []
    for i in range(1, ctx.max_gen + 1):
        if allowed is not None and i not in allowed:
            continue
        for j in range(3):
            for kind in kinds:
                g = E1Generator(i, j, kind)
                if g.M(ctx) <= may_bound:
                    out.append(g)
    return sorted(out)


def enumerate_e1_basis(ctx: PrimeContext, s: int, t: Optional[int], may_bound: int,
                       generators: Optional[Iterable[int]] = None,
                       cap: int = DEFAULT_BASIS_CAP) -> List[E1Monomial]:
    """
    Monomials of cohomological degree s, internal degree t mod D (any t when
    None) and May filtration <= may_bound, sorted by (exterior, poly).

    Raises:
        BasisCapExceeded: more than `cap` monomials
    """
    gens = e1_generators(ctx, may_bound, generators)
    h_gens = [g for g in gens if g.kind == H]
    b_gens = [g for g in gens if g.kind == B]
    found: List[E1Monomial] = []

    def with_poly(ext: Tuple[Index, ...], s_left: int, m_left: int, t_acc: int):
        def walk(k: int, poly: List[Tuple[Index, int]], s_rem: int, m_rem: int, t_cur: int):
            if s_rem == 0:
                if t is None or t_cur % ctx.D == t % ctx.D:
                    found.append(E1Monomial(ext, tuple(poly)))
                    if len(found) > cap:
                        raise BasisCapExceeded(f"E_1^{s} (M<={may_bound})", len(found), cap)
                return
            if k == len(b_gens):
                return
            g = b_gens[k]
            walk(k + 1, poly, s_rem, m_rem, t_cur)
            e = 1
            while 2 * e <= s_rem and e * g.M(ctx) <= m_rem:
                walk(k + 1, poly + [((g.i, g.j), e)], s_rem - 2 * e, m_rem - e * g.M(ctx), t_cur + e * g.t(ctx))
                e += 1

        walk(0, [], s_left, m_left, t_acc)

    for k in range(0, min(s, len(h_gens)) + 1):
        if (s - k) % 2:
            continue
        for combo in itertools.combinations(h_gens, k):
            m_used = sum(g.M(ctx) for g in combo)
            if m_used > may_bound:
                continue
            ext = tuple((g.i, g.j) for g in combo)
            with_poly(ext, s - k, may_bound - m_used, sum(g.t(ctx) for g in combo))
    found.sort(key=lambda m: (m.exterior, m.poly))
    logger.debug("E_1 basis s=%d t=%s M<=%d: %d monomials", s, t, may_bound, len(found))
    return found


# Representatives in the cobar complex --------------------------------------

CONCATENATE = "concatenate"
ALTERNATING = "alternating"


def b_representative(ctx: PrimeContext, i: int, j: int) -> TensorElement:
    """b_{i,j} ↦ Σ_{k=1}^{p-1} (C(p,k)/p) [t_i^{k p^j} | t_i^{(p-k) p^j}]"""
    p = ctx.p
    shift = p ** (j % 3)
    terms: Dict[Word, int] = {}
    for k in range(1, p):
        coefficient = int(binomial(p, k)) // p
        word = (S3Monomial.power(ctx, i, k * shift), S3Monomial.power(ctx, i, (p - k) * shift))
        terms[word] = coefficient
    return TensorElement(terms, p)


def e1_to_cobar(ctx: PrimeContext, mono: E1Monomial, convention: str = ALTERNATING) -> TensorElement:
    """
    Cobar representative of an E_1 monomial.

    h_{i,j} ↦ [t_i^{p^j}] and b_{i,j} ↦ its binomial sum. The exterior part
    maps to Σ sign(σ)·(permuted h-words) over all orderings, so h_{1,0}h_{1,1}
    ↦ [t_1|t_1^p] - [t_1^p|t_1]. With k exterior factors this is k! times the
    concatenated word in canonical order, modulo lower filtration; class
    identification uses the concatenated word.
    """
    p = ctx.p
    h_words = [S3Monomial.generator(ctx, i, j) for i, j in mono.exterior]
    if convention == CONCATENATE:
        result = TensorElement.word(h_words, p)
    elif convention == ALTERNATING:
        terms: Dict[Word, int] = {}
        for perm in itertools.permutations(range(len(h_words))):
            inversions = sum(1 for a, c in itertools.combinations(perm, 2) if a > c)
            word = tuple(h_words[k] for k in perm)
            terms[word] = terms.get(word, 0) + (-1) ** inversions
        result = TensorElement(terms, p)
    else:
        raise ValueError(f"unknown convention {convention}")
    for (i, j), e in mono.poly:
        for _ in range(e):
            result = result.tensor(b_representative(ctx, i, j))
    return result


def e1_element_to_cobar(ctx: PrimeContext, x: E1Element, convention: str = ALTERNATING) -> TensorElement:
    result = TensorElement({}, ctx.p)
    for mono, c in x.terms.items():
        result = result + e1_to_cobar(ctx, mono, convention).scale(c)
    return result
