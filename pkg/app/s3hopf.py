"""The Hopf algebra S(3) = F_p[t_1, t_2, ...]/(t_i^{p^3} - t_i): basis, grading, coproduct, May filtration"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Tuple

from sympy import isprime

from app.config import DEFAULT_MAX_GEN, DEFAULT_PRIME, TOPOLOGICAL_MIN_PRIME
from app.exceptions import DivisibilityError, InvalidConfigError
from app.exactlin import divide_by_p

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrimeContext:
    """The prime p with its derived constants q = 2(p-1) and D = 2(p^3-1)"""
    p: int = DEFAULT_PRIME
    max_gen: int = DEFAULT_MAX_GEN

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise InvalidConfigError(f"p must be an odd prime, got {self.p}")
        if self.max_gen < 1:
            raise InvalidConfigError(f"max_gen must be positive, got {self.max_gen}")

    @property
    def q(self) -> int:
        return 2 * (self.p - 1)

    @property
    def D(self) -> int:
        return 2 * (self.p ** 3 - 1)

    @property
    def p3(self) -> int:
        return self.p ** 3

    @property
    def algebra_only(self) -> bool:
        """Results below p = 7 are algebraic checks only"""
        return self.p < TOPOLOGICAL_MIN_PRIME

    def generator_degree(self, i: int) -> int:
        """|t_i| = 2(p^i - 1) mod D"""
        return (2 * (self.p ** i - 1)) % self.D

    def reduce_exponent(self, e: int) -> int:
        """Normal form of an exponent under t^{p^3} = t"""
        if e < self.p3:
            return e
        return (e - 1) % (self.p3 - 1) + 1

    def digits(self, e: int) -> Tuple[int, int, int]:
        """Base-p digits (e_0, e_1, e_2) of an exponent in [0, p^3)"""
        p = self.p
        return (e % p, (e // p) % p, e // (p * p))


class S3Monomial(tuple):
    """
    Basis monomial of S(3), stored as the exponents (e_1, e_2, ...) of t_1, t_2, ...
    with each e_i in [0, p^3) and trailing zeros trimmed. The unit is ().
    """

    def __new__(cls, exponents: Iterable[int] = ()):
        exps = list(exponents)
        while exps and exps[-1] == 0:
            exps.pop()
        return super().__new__(cls, exps)

    @classmethod
    def generator(cls, ctx: PrimeContext, i: int, j: int = 0) -> "S3Monomial":
        """t_i^{p^j}"""
        return cls.power(ctx, i, ctx.p ** (j % 3))

    @classmethod
    def power(cls, ctx: PrimeContext, i: int, e: int) -> "S3Monomial":
        """t_i^e, reduced"""
        exps = [0] * i
        exps[i - 1] = ctx.reduce_exponent(e)
        return cls(exps)

    @classmethod
    def from_digits(cls, ctx: PrimeContext, digits: Dict[Tuple[int, int], int]) -> "S3Monomial":
        """Build ∏ (t_i^{p^j})^{e_{i,j}} from {(i, j): e_{i,j}}"""
        top = max((i for i, _ in digits), default=0)
        exps = [0] * top
        for (i, j), e in digits.items():
            exps[i - 1] += e * ctx.p ** (j % 3)
        return cls(ctx.reduce_exponent(e) for e in exps)

    @property
    def is_unit(self) -> bool:
        return len(self) == 0

    def exponent(self, i: int) -> int:
        return self[i - 1] if i <= len(self) else 0

    def digit_map(self, ctx: PrimeContext) -> Dict[Tuple[int, int], int]:
        """{(i, j): e_{i,j}} over nonzero digits"""
        out = {}
        for i, e in enumerate(self, start=1):
            for j, d in enumerate(ctx.digits(e)):
                if d:
                    out[(i, j)] = d
        return out

    def degree(self, ctx: PrimeContext) -> int:
        return monomial_degree(ctx, self)

    def may_filtration(self, ctx: PrimeContext) -> int:
        return monomial_filtration(ctx, self)

    def name(self, ctx: PrimeContext = None) -> str:
        if not self:
            return "1"
        return "*".join(f"t{i}^{e}" if e != 1 else f"t{i}" for i, e in enumerate(self, start=1) if e)


UNIT = S3Monomial()


# May filtration ------------------------------------------------------------

@lru_cache(maxsize=None)
def may_filtration_generator(ctx: PrimeContext, i: int, j: int = 0) -> int:
    """
    M(t_i^{p^j}) by the defining recursion.

    2i-1 for i <= 3; for i > 3 one more than the largest of
    M(t_k^{p^j}) + M(t_{i-k}^{p^{j+k}}) (0 < k < i) and p·M(t_{i-3}^{p^{j+2}}).
    """
    if i < 1:
        raise ValueError(f"generator index must be >= 1, got {i}")
    if i <= 3:
        return 2 * i - 1
    candidates = [may_filtration_generator(ctx, k, j) + may_filtration_generator(ctx, i - k, (j + k) % 3)
                  for k in range(1, i)]
    candidates.append(ctx.p * may_filtration_generator(ctx, i - 3, (j + 2) % 3))
    return max(candidates) + 1


def may_filtration_closed_form(ctx: PrimeContext, i: int) -> int:
    """(2s-1)p^r + p^{r-1} + ... + 1 for i = 3r + s, s in {1, 2, 3}"""
    r, s = divmod(i - 1, 3)
    s += 1
    return (2 * s - 1) * ctx.p ** r + sum(ctx.p ** k for k in range(r))


@lru_cache(maxsize=None)
def monomial_filtration(ctx: PrimeContext, m: S3Monomial) -> int:
    return sum(may_filtration_generator(ctx, i) * sum(ctx.digits(e)) for i, e in enumerate(m, start=1))


@lru_cache(maxsize=None)
def monomial_degree(ctx: PrimeContext, m: S3Monomial) -> int:
    return sum(e * ctx.generator_degree(i) for i, e in enumerate(m, start=1)) % ctx.D


def monomial_sort_key(ctx: PrimeContext, m: S3Monomial) -> Tuple:
    """Order by (May filtration, internal degree, exponent vector)"""
    return (monomial_filtration(ctx, m), monomial_degree(ctx, m), tuple(m))


# Monomial arithmetic -------------------------------------------------------

def monomial_mul(ctx: PrimeContext, a: S3Monomial, b: S3Monomial) -> S3Monomial:
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    exps = list(a)
    for idx, e in enumerate(b):
        if e:
            exps[idx] = ctx.reduce_exponent(exps[idx] + e)
    return S3Monomial(exps)


def monomial_frobenius(ctx: PrimeContext, m: S3Monomial, k: int = 1) -> S3Monomial:
    """m^{p^k}"""
    if k % 3 == 0 or not m:
        return m
    factor = ctx.p ** (k % 3)
    return S3Monomial(ctx.reduce_exponent(e * factor) if e else 0 for e in m)


def monomial_overflows(ctx: PrimeContext, a: S3Monomial, b: S3Monomial) -> bool:
    """True when a·b carries a base-p digit (the case where M is not additive)"""
    for i in range(1, max(len(a), len(b)) + 1):
        da, db = ctx.digits(a.exponent(i)), ctx.digits(b.exponent(i))
        if any(x + y >= ctx.p for x, y in zip(da, db)):
            return True
    return False


# Tensor elements -----------------------------------------------------------

Word = Tuple[S3Monomial, ...]


class TensorElement:
    """
    F_p-combination of k-fold tensor words of S(3) monomials.

    Terms map a tuple of monomials to a nonzero residue mod `modulus`
    (p, or p² for the lifted b-element computation).
    """
    __slots__ = ("terms", "modulus")

    def __init__(self, terms: Dict[Word, int] = None, modulus: int = DEFAULT_PRIME):
        self.modulus = modulus
        self.terms: Dict[Word, int] = {}
        for word, c in (terms or {}).items():
            c %= modulus
            if c:
                self.terms[word] = c

    @classmethod
    def word(cls, factors: Iterable[S3Monomial], modulus: int, coefficient: int = 1) -> "TensorElement":
        return cls({tuple(factors): coefficient}, modulus)

    def __iter__(self) -> Iterator[Tuple[Word, int]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.modulus == other.modulus and self.terms == other.terms

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return TensorElement(out, self.modulus)

    def __neg__(self) -> "TensorElement":
        return TensorElement({w: -c for w, c in self.terms.items()}, self.modulus)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, k: int) -> "TensorElement":
        return TensorElement({w: c * k for w, c in self.terms.items()}, self.modulus)

    def coefficient(self, factors: Iterable[S3Monomial]) -> int:
        return self.terms.get(tuple(factors), 0)

    @property
    def arity(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    def multiply(self, ctx: PrimeContext, other: "TensorElement") -> "TensorElement":
        """Factorwise product of two k-fold elements"""
        return TensorElement(_tensor_mul(ctx, self.terms, other.terms, self.modulus), self.modulus)

    def tensor(self, other: "TensorElement") -> "TensorElement":
        """Concatenate words: (a ⊗ b)"""
        out: Dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return TensorElement(out, self.modulus)

    def reduce_mod(self, modulus: int) -> "TensorElement":
        return TensorElement(self.terms, modulus)

    def sorted_terms(self, ctx: PrimeContext) -> List[Tuple[Word, int]]:
        return sorted(self.terms.items(), key=lambda kv: tuple(monomial_sort_key(ctx, m) for m in kv[0]))

    def to_json(self, ctx: PrimeContext) -> List[Dict]:
        """Sorted term list for reports"""
        return [{"word": [m.name() for m in w], "coefficient": c} for w, c in self.sorted_terms(ctx)]

    def __repr__(self) -> str:
        parts = [f"{c}[{'|'.join(m.name() for m in w)}]" for w, c in self.terms.items()]
        return " + ".join(parts) if parts else "0"


def _tensor_mul(ctx: PrimeContext, a: Dict[Word, int], b: Dict[Word, int], modulus: int) -> Dict[Word, int]:
    out: Dict[Word, int] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = tuple(monomial_mul(ctx, x, y) for x, y in zip(wa, wb))
            out[w] = (out.get(w, 0) + ca * cb) % modulus
    return {w: c for w, c in out.items() if c}


def _tensor_pow(ctx: PrimeContext, a: Dict[Word, int], n: int, modulus: int) -> Dict[Word, int]:
    arity = len(next(iter(a))) if a else 2
    result: Dict[Word, int] = {tuple(UNIT for _ in range(arity)): 1}
    base = a
    while n:
        if n & 1:
            result = _tensor_mul(ctx, result, base, modulus)
        n >>= 1
        if n:
            base = _tensor_mul(ctx, base, base, modulus)
    return result


def _frobenius_terms(ctx: PrimeContext, a: Dict[Word, int], k: int) -> Dict[Word, int]:
    out: Dict[Word, int] = {}
    for w, c in a.items():
        fw = tuple(monomial_frobenius(ctx, m, k) for m in w)
        out[fw] = out.get(fw, 0) + c
    return out


# Coproduct -----------------------------------------------------------------

def _leading_sum(ctx: PrimeContext, s: int, k: int) -> Dict[Word, int]:
    """Σ_{i+j=s} t_i^{p^k} ⊗ t_j^{p^{i+k}} with t_0 = 1"""
    out: Dict[Word, int] = {}
    for i in range(s + 1):
        j = s - i
        left = S3Monomial.generator(ctx, i, k) if i else UNIT
        right = S3Monomial.generator(ctx, j, i + k) if j else UNIT
        out[(left, right)] = out.get((left, right), 0) + 1
    return out


@lru_cache(maxsize=None)
def b_element(ctx: PrimeContext, s: int, k: int) -> TensorElement:
    """
    b_{s,k} in S(3) ⊗ S(3).

    Computed from b_{s,k-1} = (1/p)(Δ(t_s^{p^k}) - Σ t_i^{p^k} ⊗ t_j^{p^{i+k}} + b_{s-3,k+2})
    with every coefficient lifted to [0, p) and the p-th power taken over Z/p².
    b_{s,k} = 0 for s <= 0.

    Raises:
        DivisibilityError: the numerator is not a multiple of p
    """
    p = ctx.p
    if s <= 0:
        return TensorElement({}, p)
    shift = (k % 3) + 1
    lifted = dict(generator_coproduct(ctx, s).terms)
    # X^{p^shift} ≡ (Frob^{shift-1} X)^p mod p² since Frob^{shift-1} X ≡ X^{p^{shift-1}} mod p
    base = _frobenius_terms(ctx, lifted, shift - 1)
    numerator = _tensor_pow(ctx, base, p, p * p)
    for w, c in _leading_sum(ctx, s, shift).items():
        numerator[w] = (numerator.get(w, 0) - c) % (p * p)
    for w, c in b_element(ctx, s - 3, (shift + 2) % 3).terms.items():
        numerator[w] = (numerator.get(w, 0) + c) % (p * p)
    try:
        quotient = divide_by_p(numerator, p, what=f"b_{{{s},{k % 3}}} numerator")
    except DivisibilityError:
        logger.error("b-element division failed for s=%d k=%d", s, k)
        raise
    logger.debug("b_{%d,%d}: %d terms", s, k % 3, len(quotient))
    return TensorElement(quotient, p)


@lru_cache(maxsize=None)
def generator_coproduct(ctx: PrimeContext, s: int) -> TensorElement:
    """Δ(t_s) = Σ_{i+j=s} t_i ⊗ t_j^{p^i} - b_{s-3,2}"""
    terms = _leading_sum(ctx, s, 0)
    element = TensorElement(terms, ctx.p)
    if s > 3:
        element = element - b_element(ctx, s - 3, 2)
    return element


@lru_cache(maxsize=None)
def _generator_power_coproduct(ctx: PrimeContext, i: int, j: int, e: int) -> Dict[Word, int]:
    """Δ((t_i^{p^j})^e)"""
    frob = _frobenius_terms(ctx, generator_coproduct(ctx, i).terms, j)
    return _tensor_pow(ctx, frob, e, ctx.p)


@lru_cache(maxsize=200000)
def _monomial_coproduct(ctx: PrimeContext, m: S3Monomial) -> Dict[Word, int]:
    result: Dict[Word, int] = {(UNIT, UNIT): 1}
    for (i, j), e in sorted(m.digit_map(ctx).items()):
        result = _tensor_mul(ctx, result, _generator_power_coproduct(ctx, i, j, e), ctx.p)
    return result


def coproduct(ctx: PrimeContext, m: S3Monomial) -> TensorElement:
    """Δ(m), extended multiplicatively from the generators"""
    return TensorElement(_monomial_coproduct(ctx, S3Monomial(m)), ctx.p)


def reduced_coproduct_terms(ctx: PrimeContext, m: S3Monomial) -> Dict[Word, int]:
    """Terms of Δ(m) with no unit factor (shared dict, do not mutate)"""
    return _reduced_coproduct(ctx, S3Monomial(m))


@lru_cache(maxsize=200000)
def _reduced_coproduct(ctx: PrimeContext, m: S3Monomial) -> Dict[Word, int]:
    return {w: c for w, c in _monomial_coproduct(ctx, m).items() if w[0] and w[1]}


def counit(m: S3Monomial) -> int:
    return 1 if not m else 0


def apply_coproduct_at(ctx: PrimeContext, element: TensorElement, position: int) -> TensorElement:
    """Apply Δ to the factor at `position` of every word"""
    out: Dict[Word, int] = {}
    for w, c in element.terms.items():
        for (a, b), cc in _monomial_coproduct(ctx, w[position]).items():
            nw = w[:position] + (a, b) + w[position + 1:]
            out[nw] = (out.get(nw, 0) + c * cc) % element.modulus
    return TensorElement(out, element.modulus)


def collapse_counit(element: TensorElement, position: int) -> TensorElement:
    """Apply ε to the factor at `position`"""
    out: Dict[Word, int] = {}
    for w, c in element.terms.items():
        if not w[position]:
            nw = w[:position] + w[position + 1:]
            out[nw] = out.get(nw, 0) + c
    return TensorElement(out, element.modulus)
