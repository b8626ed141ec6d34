"""Reduced cobar complex of S(3): differential, restricted cohomology and class identification"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from app.config import DEFAULT_BASIS_CAP
from app.exceptions import BasisCapExceeded, NotACocycleError, NotInSpanError
from app.exactlin import SparseEchelon, sparse_add
from app.maysst import enumerate_e1_basis
from app.s3hopf import (
    PrimeContext, S3Monomial, TensorElement, Word, may_filtration_generator, monomial_degree,
    monomial_filtration, monomial_mul, monomial_sort_key, reduced_coproduct_terms,
)

logger = logging.getLogger(__name__)


def word_degree(ctx: PrimeContext, word: Word) -> int:
    return sum(monomial_degree(ctx, m) for m in word) % ctx.D


def word_filtration(ctx: PrimeContext, word: Word) -> int:
    """M([a_1|...|a_s]) = M(a_1) + ... + M(a_s)"""
    return sum(monomial_filtration(ctx, m) for m in word)


def word_sort_key(ctx: PrimeContext, word: Word) -> Tuple:
    return tuple(monomial_sort_key(ctx, m) for m in word)


@dataclass(frozen=True)
class CobarWord:
    """[a_1|...|a_s] with no unit factor"""
    factors: Word

    def __post_init__(self):
        if any(not m for m in self.factors):
            raise ValueError("reduced cobar words have no unit factor")

    @property
    def s(self) -> int:
        return len(self.factors)

    def degree(self, ctx: PrimeContext) -> int:
        return word_degree(ctx, self.factors)

    def may_filtration(self, ctx: PrimeContext) -> int:
        return word_filtration(ctx, self.factors)

    def element(self, ctx: PrimeContext, coefficient: int = 1) -> TensorElement:
        return TensorElement.word(self.factors, ctx.p, coefficient)


def cochain_filtration(ctx: PrimeContext, element: TensorElement) -> int:
    """Largest May filtration among the terms (-1 for zero)"""
    return max((word_filtration(ctx, w) for w in element.terms), default=-1)


def cochain_degrees(ctx: PrimeContext, element: TensorElement) -> set:
    return {word_degree(ctx, w) for w in element.terms}


# Differential --------------------------------------------------------------

@lru_cache(maxsize=500000)
def _word_differential(ctx: PrimeContext, word: Word) -> Tuple[Tuple[Word, int], ...]:
    out: Dict[Word, int] = {}
    p = ctx.p
    for i, factor in enumerate(word):
        sign = -1 if i % 2 == 0 else 1
        for (a, b), c in reduced_coproduct_terms(ctx, factor).items():
            nw = word[:i] + (a, b) + word[i + 1:]
            out[nw] = (out.get(nw, 0) + sign * c) % p
    return tuple((w, c) for w, c in out.items() if c)


def word_differential(ctx: PrimeContext, word: Word) -> Dict[Word, int]:
    return dict(_word_differential(ctx, tuple(word)))


def cobar_differential(ctx: PrimeContext, element: TensorElement, graded: bool = False) -> TensorElement:
    """
    d[a_1|...|a_s] = Σ_i (-1)^i [a_1|...|Δ̄(a_i)|...|a_s] on the reduced complex.

    The outer terms 1⊗α and α⊗1 of the unreduced formula cancel the
    primitive parts of each Δ(a_i), leaving the reduced coproduct Δ̄.
    With graded=True only terms of equal May filtration are kept (d_0).
    """
    p = ctx.p
    out: Dict[Word, int] = {}
    for w, c in element.terms.items():
        level = word_filtration(ctx, w) if graded else None
        for nw, cc in _word_differential(ctx, w):
            if graded and word_filtration(ctx, nw) != level:
                continue
            out[nw] = (out.get(nw, 0) + c * cc) % p
    return TensorElement(out, p)


def is_cocycle(ctx: PrimeContext, element: TensorElement) -> bool:
    return not cobar_differential(ctx, element)


# Enumeration ---------------------------------------------------------------

@lru_cache(maxsize=64)
def monomial_index(ctx: PrimeContext, bound: int,
                   generators: Optional[FrozenSet[int]] = None) -> Dict[Tuple[int, int], Tuple[S3Monomial, ...]]:
    """
    Non-unit monomials with May filtration <= bound, keyed by (M, degree).

    Restricting `generators` to a subset of indices enumerates a sub-Hopf
    algebra such as F_p[t_1]/(t_1^{p^3} - t_1).
    """
    slots = []
    for i in range(1, ctx.max_gen + 1):
        if generators is not None and i not in generators:
            continue
        weight = may_filtration_generator(ctx, i)
        if weight > bound:
            continue
        for j in range(3):
            slots.append((i, j, weight))
    found: Dict[Tuple[int, int], List[S3Monomial]] = {}

    def walk(k: int, digits: Dict[Tuple[int, int], int], used: int):
        if k == len(slots):
            if digits:
                m = S3Monomial.from_digits(ctx, digits)
                found.setdefault((used, monomial_degree(ctx, m)), []).append(m)
            return
        i, j, weight = slots[k]
        walk(k + 1, digits, used)
        for e in range(1, ctx.p):
            if used + e * weight > bound:
                break
            digits[(i, j)] = e
            walk(k + 1, digits, used + e * weight)
        digits.pop((i, j), None)

    walk(0, {}, 0)
    return {key: tuple(sorted(ms, key=lambda m: monomial_sort_key(ctx, m))) for key, ms in found.items()}


def enumerate_words(ctx: PrimeContext, s: int, t: int, may_bound: int,
                    generators: Optional[Iterable[int]] = None, exact: bool = False,
                    cap: int = DEFAULT_BASIS_CAP) -> List[Word]:
    """
    All reduced cobar words of length s, internal degree t mod D and
    filtration <= may_bound (== may_bound when exact), in lexicographic
    order of factor sort keys.

    Raises:
        BasisCapExceeded: more than `cap` words
    """
    gens = frozenset(generators) if generators is not None else None
    index = monomial_index(ctx, may_bound, gens)
    by_level: Dict[int, List[Tuple[int, S3Monomial]]] = {}
    for (level, deg), ms in index.items():
        by_level.setdefault(level, []).extend((deg, m) for m in ms)
    t %= ctx.D
    words: List[Word] = []

    def extend(prefix: Tuple[S3Monomial, ...], used: int, deg: int):
        remaining = s - len(prefix)
        if remaining == 1:
            need = (t - deg) % ctx.D
            levels = [may_bound - used] if exact else range(1, may_bound - used + 1)
            for level in levels:
                for m in index.get((level, need), ()):
                    words.append(prefix + (m,))
                    if len(words) > cap:
                        raise BasisCapExceeded(f"C^{s} at t={t}, M<={may_bound}", len(words), cap)
            return
        # every later factor needs filtration >= 1
        for level in range(1, may_bound - used - (remaining - 1) + 1):
            for d, m in by_level.get(level, ()):
                extend(prefix + (m,), used + level, (deg + d) % ctx.D)

    if s == 0:
        return [()] if t == 0 and (not exact or may_bound == 0) else []
    extend((), 0, 0)
    words.sort(key=lambda w: word_sort_key(ctx, w))
    return words


# Restricted cohomology -----------------------------------------------------

@dataclass
class RestrictedCohomology:
    """Cohomology of a degree- and filtration-restricted piece of the cobar complex"""
    s: int
    t: int
    may_bound: int
    dimension: int
    classes: List[TensorElement]
    coboundaries: List[TensorElement]
    cocycle_dimension: int
    word_count: int


def _kernel(ctx: PrimeContext, words: Sequence[Word], graded: bool) -> List[Dict[Word, int]]:
    """Kernel of d on span(words), via an echelon of the images with combination tracking"""
    p = ctx.p
    echelon = SparseEchelon(p)
    kernel = []
    for w in words:
        image = cobar_differential(ctx, TensorElement.word(w, p), graded=graded).terms
        residual, combo = echelon.reduce(image)
        if residual:
            echelon.add(image, label=w)
            continue
        vec = {w: 1}
        sparse_add(vec, combo, -1, p)
        kernel.append(vec)
    return kernel


def restricted_cohomology(ctx: PrimeContext, s: int, t: int, may_bound: int,
                          generators: Optional[Iterable[int]] = None, graded: bool = False,
                          cap: int = DEFAULT_BASIS_CAP) -> RestrictedCohomology:
    """
    H^{s,t} of the subcomplex of words with May filtration <= may_bound.

    With graded=True the associated graded complex (d_0, exact filtration
    levels) is used instead and the levels are summed.

    Returns:
        RestrictedCohomology with class representatives chosen as the
        kernel vectors independent modulo coboundaries, in word order
    """
    p = ctx.p
    levels = range(1 if s else 0, may_bound + 1) if graded else [may_bound]
    classes: List[TensorElement] = []
    coboundaries: List[TensorElement] = []
    cocycle_dim = 0
    word_count = 0
    for level in levels:
        words = enumerate_words(ctx, s, t, level, generators, exact=graded, cap=cap)
        sources = enumerate_words(ctx, s - 1, t, level, generators, exact=graded, cap=cap) if s > 1 else []
        word_count += len(words)
        kernel = _kernel(ctx, words, graded)
        cocycle_dim += len(kernel)
        image = SparseEchelon(p)
        for w in sources:
            vec = cobar_differential(ctx, TensorElement.word(w, p), graded=graded)
            if image.add(vec.terms):
                coboundaries.append(vec)
        for vec in kernel:
            if image.add(vec):
                classes.append(TensorElement(vec, p))
    logger.debug("H^{%d,%d} (M<=%d%s): %d words, dim %d", s, t, may_bound, ", graded" if graded else "",
                 word_count, len(classes))
    return RestrictedCohomology(s, t % ctx.D, may_bound, len(classes), classes, coboundaries, cocycle_dim, word_count)


# The sub-Hopf algebra on t_1 ------------------------------------------------

@dataclass
class T1Comparison:
    """Dimensions of H^{s,t} F_p[t_1]/(t_1^{p^3} - t_1) against E[h_{1,j}] ⊗ P[b_{1,j}], keyed by (s, t)"""
    max_s: int
    may_bound: int
    cobar: Dict[Tuple[int, int], int]
    e1: Dict[Tuple[int, int], int]

    @property
    def mismatches(self) -> List[Dict[str, int]]:
        keys = sorted(set(self.cobar) | set(self.e1))
        return [{"s": s, "t": t, "cobar": self.cobar.get((s, t), 0), "e1": self.e1.get((s, t), 0)}
                for s, t in keys if self.cobar.get((s, t), 0) != self.e1.get((s, t), 0)]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def t1_subalgebra_comparison(ctx: PrimeContext, max_s: int = 4, may_bound: int = 6,
                             cap: int = DEFAULT_BASIS_CAP) -> T1Comparison:
    """
    Restricted cobar cohomology of T = F_p[t_1]/(t_1^{p^3} - t_1) next to the
    count of E[h_{1,j}] ⊗ P[b_{1,j}] monomials, for 1 <= s <= max_s.

    The differential of T keeps the May filtration of every word, so words of
    filtration <= may_bound form a direct summand.
    """
    gens = frozenset({1})
    e1: Dict[Tuple[int, int], int] = {}
    cobar: Dict[Tuple[int, int], int] = {}
    for s in range(1, max_s + 1):
        for mono in enumerate_e1_basis(ctx, s, None, may_bound, gens, cap=cap):
            key = (s, mono.t(ctx))
            e1[key] = e1.get(key, 0) + 1
        for t in range(0, ctx.D, ctx.q):
            dim = restricted_cohomology(ctx, s, t, may_bound, gens, cap=cap).dimension
            if dim:
                cobar[(s, t)] = dim
    logger.info("T[t_1] at p = %d: %d pieces up to s = %d", ctx.p, len(cobar), max_s)
    return T1Comparison(max_s, may_bound, cobar, e1)


# Class identification ------------------------------------------------------

@dataclass
class Identification:
    """Coordinates of a cocycle in a named basis, with the coboundary certificate"""
    coordinates: Dict[str, int]
    primitive: TensorElement
    lifts: Dict[str, TensorElement] = field(default_factory=dict)
    high_sources: int = 0
    low_sources: int = 0


def lift_to_cocycle(ctx: PrimeContext, representative: TensorElement, cap: int = DEFAULT_BASIS_CAP) -> TensorElement:
    """
    Add corrections of strictly lower May filtration so that the
    representative becomes a genuine cobar cocycle.

    Raises:
        NotACocycleError: no correction exists in lower filtration
    """
    p = ctx.p
    defect = cobar_differential(ctx, representative)
    if not defect:
        return representative
    degrees = cochain_degrees(ctx, representative)
    if len(degrees) != 1:
        raise NotACocycleError("representative is not homogeneous in internal degree")
    t = degrees.pop()
    s = representative.arity
    top = cochain_filtration(ctx, representative)
    echelon = SparseEchelon(p)
    for w in enumerate_words(ctx, s, t, top - 1, cap=cap):
        echelon.add(word_differential(ctx, w), label=w)
    residual, combo = echelon.reduce({k: -v for k, v in defect.terms.items()})
    if residual:
        raise NotACocycleError(f"no lower-filtration correction for a representative of filtration {top}")
    return representative + TensorElement(combo, p)


@lru_cache(maxsize=8)
def _preimage_pool(ctx: PrimeContext, top_generator: int) -> Dict[Tuple[S3Monomial, S3Monomial], Tuple[S3Monomial, ...]]:
    """Index (a, b) -> monomials m whose reduced coproduct contains a ⊗ b"""
    gens = [S3Monomial.generator(ctx, i, j) for i in range(1, top_generator + 1) for j in range(3)]
    pool = set()
    for g in gens:
        pool.add(g)
        pool.add(monomial_mul(ctx, g, g))
    for x in range(len(gens)):
        for y in range(x + 1, len(gens)):
            pool.add(monomial_mul(ctx, gens[x], gens[y]))
    index: Dict[Tuple[S3Monomial, S3Monomial], List[S3Monomial]] = {}
    for m in sorted(pool, key=lambda m: monomial_sort_key(ctx, m)):
        for pair in reduced_coproduct_terms(ctx, m):
            index.setdefault(pair, []).append(m)
    return {k: tuple(v) for k, v in index.items()}


def _high_candidates(ctx: PrimeContext, word: Word, pool, merge: bool) -> List[Word]:
    out = []
    for i in range(len(word) - 1):
        pair = (word[i], word[i + 1])
        found = list(pool.get(pair, ()))
        if merge:
            found.append(monomial_mul(ctx, *pair))
        for m in found:
            if m:
                out.append(word[:i] + (m,) + word[i + 2:])
    return out


def identify_class(ctx: PrimeContext, cocycle: TensorElement, named: Dict[str, TensorElement],
                   may_bound: int, source_bound: Optional[int] = None, closure_rounds: int = 3,
                   merge_candidates: bool = False, top_generator: Optional[int] = None,
                   cap: int = DEFAULT_BASIS_CAP) -> Identification:
    """
    Express a cobar cocycle as Σ c_k·(named class k) + d(u).

    Named representatives are first lifted to genuine cocycles. Terms of
    the cocycle above `may_bound` are cancelled with coboundaries of
    preimage candidates (generator powers and products of two generators
    whose reduced coproduct contains an adjacent pair); the rest is solved
    against d of all (s-1)-words with filtration <= source_bound.

    Raises:
        NotACocycleError: the input is not closed
        NotInSpanError: no such expression exists among the searched sources
    """
    p = ctx.p
    if cobar_differential(ctx, cocycle):
        raise NotACocycleError("input cochain is not a cocycle")
    if not cocycle:
        return Identification({name: 0 for name in named}, TensorElement({}, p))
    degrees = cochain_degrees(ctx, cocycle)
    if len(degrees) != 1:
        raise NotInSpanError("cocycle is not homogeneous in internal degree")
    t = degrees.pop()
    s = cocycle.arity
    source_bound = may_bound if source_bound is None else source_bound

    lifts = {name: lift_to_cocycle(ctx, rep, cap=cap) for name, rep in named.items()}

    # Cancel the part above the bound
    working = dict(cocycle.terms)
    primitive: Dict[Word, int] = {}
    extra_coboundaries: List[Tuple[Dict[Word, int], Dict[Word, int]]] = []
    high_count = 0
    high_words = [w for w in working if word_filtration(ctx, w) > may_bound]
    if high_words:
        top_gen = top_generator or max((len(m) for w in working for m in w), default=1) + 1
        pool = _preimage_pool(ctx, min(top_gen, ctx.max_gen))
        candidates: Dict[Word, Dict[Word, int]] = {}
        frontier = set(high_words)
        for _ in range(closure_rounds):
            new_frontier = set()
            for hw in frontier:
                for u in _high_candidates(ctx, hw, pool, merge_candidates):
                    if u in candidates:
                        continue
                    candidates[u] = word_differential(ctx, u)
                    for nw in candidates[u]:
                        if word_filtration(ctx, nw) > may_bound and nw not in working:
                            new_frontier.add(nw)
            frontier = new_frontier
            if not frontier:
                break
        high_count = len(candidates)
        echelon = SparseEchelon(p)
        ordered = sorted(candidates, key=lambda u: word_sort_key(ctx, u))
        for u in ordered:
            high_part = {w: c for w, c in candidates[u].items() if word_filtration(ctx, w) > may_bound}
            residual, combo = echelon.reduce(high_part)
            if residual:
                echelon.add(high_part, label=u)
            else:
                # a combination whose coboundary lies below the bound
                chain = {u: 1}
                sparse_add(chain, combo, -1, p)
                image: Dict[Word, int] = {}
                for v, c in chain.items():
                    sparse_add(image, candidates[v], c, p)
                extra_coboundaries.append((image, chain))
        high_part = {w: c for w, c in working.items() if word_filtration(ctx, w) > may_bound}
        residual, combo = echelon.reduce(high_part)
        if residual:
            raise NotInSpanError(f"{len(residual)} terms above filtration {may_bound} could not be cancelled")
        for u, c in combo.items():
            sparse_add(working, candidates[u], -c, p)
            primitive[u] = (primitive.get(u, 0) + c) % p
        logger.info("cancelled %d high terms with %d candidate sources", len(high_part), high_count)

    # Solve the bounded part
    echelon = SparseEchelon(p)
    sources = enumerate_words(ctx, s - 1, t, source_bound, cap=cap) if s > 1 else []
    for w in sources:
        echelon.add(word_differential(ctx, w), label=("src", w))
    for k, (image, chain) in enumerate(extra_coboundaries):
        echelon.add(image, label=("extra", k))
    for name, lift in lifts.items():
        if not echelon.add(lift.terms, label=("class", name)):
            raise NotInSpanError(f"named class {name} is dependent on the others modulo coboundaries")
    residual, combo = echelon.reduce(working)
    if residual:
        raise NotInSpanError(f"cocycle not in span: {len(residual)} residual terms")
    coordinates = {name: 0 for name in named}
    for label, c in combo.items():
        kind, key = label
        if kind == "class":
            coordinates[key] = c
        elif kind == "src":
            primitive[key] = (primitive.get(key, 0) + c) % p
        else:
            for v, cv in extra_coboundaries[key][1].items():
                primitive[v] = (primitive.get(v, 0) + c * cv) % p

    certificate = TensorElement(primitive, p)
    check = cocycle - cobar_differential(ctx, certificate)
    for name, c in coordinates.items():
        check = check - lifts[name].scale(c)
    if check:
        raise NotInSpanError("certificate verification failed")
    return Identification(coordinates, certificate, lifts, high_count, len(sources))
