"""
BP-side chain computations: Hazewinkel generators, right unit, coproduct,
Greek letter chains and their images in the S(3) cobar complex.

Polynomials live in Q[m_1..m_5, v_1..v_5, t(k)_1..t(k)_5] (a sympy sparse ring).
A k-fold cobar word t(0)-part | t(1)-part | ... uses the slot variables
t(0), ..., t(k-1) with every BP_* coefficient moved to the far left.
"""
import logging
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import QQ, binomial, multiplicity
from sympy.polys.rings import PolyElement, ring as polynomial_ring

from app.cobar import cochain_degrees, cobar_differential, identify_class
from app.config import DEFAULT_BASIS_CAP, DEFAULT_MAY_BOUND
from app.exceptions import (
    BasisCapExceeded, DivisibilityError, IntegralityError, InvalidConfigError, NotACocycleError, NotInSpanError,
)
from app.exactlin import modular_fraction, signed
from app.f3cohomology import evaluate_expression, named_basis
from app.maysst import CONCATENATE, E1Element, b as may_b, e1_element_to_cobar
from app.relations import label_for
from app.ringstruct import DISCREPANCY, FAIL, PASS, NamedRing
from app.s3hopf import UNIT, PrimeContext, S3Monomial, TensorElement, b_element

logger = logging.getLogger(__name__)

TOP = 5
SLOTS = 3
HAZEWINKEL_BOUND = 4

Monomial = Tuple[int, ...]


# Ideals --------------------------------------------------------------------

@dataclass(frozen=True)
class IdealSpec:
    """
    The ideal generated by p^modulus, v_j for j in kill, v_j^bound for
    (j, bound) in powers, p^e v_j^k for (e, j, k) in mixed, and every
    monomial of degree d in the v's listed in total.

    The monomial part is a ring map on rational polynomials and is applied
    during arithmetic; the p-adic part applies to p-integral results only.
    """
    modulus: Optional[int] = None
    kill: Tuple[int, ...] = ()
    powers: Tuple[Tuple[int, int], ...] = ()
    mixed: Tuple[Tuple[int, int, int], ...] = ()
    total: Tuple[Tuple[Tuple[int, ...], int], ...] = ()

    def kills(self, j: int) -> bool:
        return j in self.kill or any(v == j and bound <= 1 for v, bound in self.powers)

    def monomial_part(self) -> "IdealSpec":
        return IdealSpec(kill=self.kill, powers=self.powers, total=self.total)

    def with_modulus(self, modulus: Optional[int]) -> "IdealSpec":
        return replace(self, modulus=modulus)

    def describe(self) -> str:
        def p_power(e):
            return "p" if e == 1 else f"p^{e}"

        gens = [p_power(self.modulus)] if self.modulus else []
        gens += [f"v{j}" for j in self.kill]
        gens += [f"{p_power(e)}v{j}" + (f"^{k}" if k > 1 else "") for e, j, k in self.mixed]
        gens += [f"v{j}^{bound}" for j, bound in self.powers]
        gens += ["(" + ",".join(f"v{j}" for j in js) + f")^{d}" for js, d in self.total]
        return "(" + ", ".join(gens) + ")" if gens else "(0)"


EXACT = IdealSpec()
I3 = IdealSpec(modulus=1, kill=(1, 2))

# (k, working ideal, result ideal) for each connecting map, v_n^t first
CHAIN_PLANS: Dict[int, List[Tuple[int, IdealSpec, IdealSpec]]] = {
    1: [(0, IdealSpec(modulus=2), IdealSpec(modulus=1))],
    2: [
        (1, IdealSpec(modulus=1, powers=((1, 3),)), IdealSpec(modulus=1, powers=((1, 2),))),
        (0, IdealSpec(modulus=2, mixed=((1, 1, 1),), powers=((1, 2),)), IdealSpec(modulus=1, kill=(1,))),
    ],
    3: [
        (2, IdealSpec(modulus=1, kill=(1,), powers=((2, 4),)), IdealSpec(modulus=1, kill=(1,), powers=((2, 3),))),
        (1, IdealSpec(modulus=1, total=(((1, 2), 3),)), IdealSpec(modulus=1, total=(((1, 2), 2),))),
        (0, IdealSpec(modulus=2, mixed=((1, 1, 1), (1, 2, 1)), total=(((1, 2), 2),)), I3),
    ],
}


def valuation(c, p: int) -> Optional[int]:
    """p-adic valuation of a rational, None for zero"""
    if not c:
        return None
    return multiplicity(p, int(c.numerator)) - multiplicity(p, int(c.denominator))


def residue(c, p: int, a: int) -> int:
    """Symmetric residue of a p-integral rational mod p^a"""
    num, den = int(c.numerator), int(c.denominator)
    if den % p == 0:
        raise IntegralityError(f"coefficient {c} is not p-integral")
    modulus = p ** a
    r = num * pow(den, -1, modulus) % modulus
    return r - modulus if r > modulus // 2 else r


# The ring ------------------------------------------------------------------

class BPRing:
    """Sparse rational polynomials for BP_*BP computations at a fixed prime"""

    def __init__(self, p: int, cap: int = DEFAULT_BASIS_CAP):
        self.p = p
        self.cap = cap
        names = ([f"m{i}" for i in range(1, TOP + 1)] + [f"v{i}" for i in range(1, TOP + 1)]
                 + [f"t{k}_{i}" for k in range(SLOTS) for i in range(1, TOP + 1)])
        self.ring = polynomial_ring(",".join(names), QQ)[0]
        self.ngens = len(names)
        self._cache: Dict[Tuple, PolyElement] = {}

    # generators

    @staticmethod
    def m_index(i: int) -> int:
        return i - 1

    @staticmethod
    def v_index(i: int) -> int:
        return TOP + i - 1

    @staticmethod
    def t_index(i: int, slot: int = 0) -> int:
        return 2 * TOP + slot * TOP + i - 1

    def term(self, coefficient=1, v: Dict[int, int] = None, slots: Sequence[Dict[int, int]] = (),
             m: Dict[int, int] = None) -> PolyElement:
        """coefficient · m-monomial · v-monomial · (slot 0 | slot 1 | ...)"""
        exps = [0] * self.ngens
        for i, e in (m or {}).items():
            exps[self.m_index(i)] += e
        for i, e in (v or {}).items():
            exps[self.v_index(i)] += e
        for k, slot in enumerate(slots):
            for i, e in slot.items():
                exps[self.t_index(i, k)] += e
        return self.ring.from_dict({tuple(exps): coefficient})

    def m(self, i: int, power: int = 1) -> PolyElement:
        return self.term(m={i: power})

    def v(self, i: int, power: int = 1) -> PolyElement:
        return self.term(v={i: power})

    def t(self, i: int, slot: int = 0, power: int = 1) -> PolyElement:
        if i == 0:
            return self.ring.one
        exps = [0] * self.ngens
        exps[self.t_index(i, slot)] = power
        return self.ring.from_dict({tuple(exps): 1})

    # ideal arithmetic

    def _killed(self, ideal: IdealSpec, mono: Monomial) -> bool:
        for j in ideal.kill:
            if mono[self.v_index(j)]:
                return True
        for j, bound in ideal.powers:
            if mono[self.v_index(j)] >= bound:
                return True
        for js, d in ideal.total:
            if sum(mono[self.v_index(j)] for j in js) >= d:
                return True
        return False

    def _p_bound(self, ideal: IdealSpec, mono: Monomial) -> Optional[int]:
        bounds = [ideal.modulus] if ideal.modulus else []
        for e, j, k in ideal.mixed:
            if mono[self.v_index(j)] >= k:
                bounds.append(e)
        return min(bounds) if bounds else None

    def truncate(self, f: PolyElement, ideal: IdealSpec) -> PolyElement:
        """Drop monomials in the monomial part of the ideal"""
        if not (ideal.kill or ideal.powers or ideal.total):
            return f
        return self.ring.from_dict({mono: c for mono, c in f.items() if not self._killed(ideal, mono)})

    def reduce(self, f: PolyElement, ideal: IdealSpec) -> PolyElement:
        """
        Normal form modulo the ideal.

        Raises:
            IntegralityError: a coefficient that must be reduced mod p^a is not p-integral
        """
        out = {}
        for mono, c in f.items():
            if self._killed(ideal, mono):
                continue
            bound = self._p_bound(ideal, mono)
            if bound is not None:
                c = residue(c, self.p, bound)
                if not c:
                    continue
            out[mono] = c
        return self.ring.from_dict(out)

    def is_integral(self, f: PolyElement) -> bool:
        return all(int(c.denominator) % self.p for c in f.values())

    def denominator_exponent(self, f: PolyElement) -> int:
        return max([0] + [-valuation(c, self.p) for c in f.values()])

    def _mod_coefficients(self, f: PolyElement, precision: int) -> PolyElement:
        out = {}
        for mono, c in f.items():
            r = residue(c, self.p, precision)
            if r:
                out[mono] = r
        return self.ring.from_dict(out)

    def mul(self, f: PolyElement, g: PolyElement, ideal: IdealSpec, precision: Optional[int] = None) -> PolyElement:
        h = self.truncate(f * g, ideal)
        if precision is not None:
            h = self._mod_coefficients(h, precision)
        if len(h) > self.cap:
            raise BasisCapExceeded("polynomial terms", len(h), self.cap)
        return h

    def power(self, f: PolyElement, e: int, ideal: IdealSpec, precision: Optional[int] = None) -> PolyElement:
        result = self.ring.one
        base = f
        while e:
            if e & 1:
                result = self.mul(result, base, ideal, precision)
            e >>= 1
            if e:
                base = self.mul(base, base, ideal, precision)
        return result

    def frobenius_power(self, f: PolyElement, k: int, ideal: IdealSpec, precision: Optional[int] = None) -> PolyElement:
        """
        f^{p^k}, exactly or modulo p^precision.

        For precision <= k uses f^{p^k} ≡ (F^{k-precision+1} f)^{p^{precision-1}},
        where F raises every monomial to the p-th power.
        """
        if precision is None or precision > k:
            return self.power(f, self.p ** k, ideal, precision)
        q = self.p ** (k - precision + 1)
        raised = self.ring.from_dict({tuple(e * q for e in mono): c for mono, c in f.items()})
        return self.power(self.truncate(raised, ideal), self.p ** (precision - 1), ideal, precision)

    def substitute(self, f: PolyElement, images: Dict[int, PolyElement], ideal: IdealSpec) -> PolyElement:
        """Simultaneous substitution of generators by polynomials"""
        powers: Dict[Tuple[int, int], PolyElement] = {}
        out = self.ring.zero
        for mono, c in f.items():
            rest = list(mono)
            value = self.ring.one
            for index, image in images.items():
                e = mono[index]
                if not e:
                    continue
                rest[index] = 0
                if (index, e) not in powers:
                    powers[(index, e)] = self.power(image, e, ideal)
                value = self.mul(value, powers[(index, e)], ideal)
            out += value.mul_monom(tuple(rest)).mul_ground(c)
        return self.truncate(out, ideal)

    def divide_p(self, f: PolyElement, what: str = "expression") -> PolyElement:
        remainder = {mono: c for mono, c in f.items() if valuation(c, self.p) < 1}
        if remainder:
            raise DivisibilityError(f"{what} not divisible by p", remainder)
        return f.mul_ground(QQ(1, self.p))

    # Hazewinkel generators

    def m_in_v(self, s: int, ideal: IdealSpec = EXACT) -> PolyElement:
        """m_s = (v_s + Σ_{0<i<s} v_{s-i}^{p^i} m_i)/p"""
        mono = ideal.monomial_part()
        key = ("m", s, mono)
        if key not in self._cache:
            total = self.v(s)
            for i in range(1, s):
                total += self.mul(self.truncate(self.v(s - i, self.p ** i), mono), self.m_in_v(i, mono), mono)
            self._cache[key] = self.truncate(total, mono).mul_ground(QQ(1, self.p))
        return self._cache[key]

    def v_in_m(self, s: int) -> PolyElement:
        """v_s = p m_s - Σ_{0<i<s} v_{s-i}^{p^i} m_i"""
        key = ("v", s)
        if key not in self._cache:
            total = self.m(s) * self.p
            for i in range(1, s):
                total -= self.mul(self.power(self.v_in_m(s - i), self.p ** i, EXACT), self.m(i), EXACT)
            self._cache[key] = total
        return self._cache[key]

    def hazewinkel_round_trip(self, s: int) -> PolyElement:
        """v_s(m(v)), which must equal v_s"""
        images = {self.m_index(i): self.m_in_v(i) for i in range(1, s + 1)}
        return self.substitute(self.v_in_m(s), images, EXACT)

    # right unit

    def _eta_m(self, n: int, ideal: IdealSpec) -> PolyElement:
        """η_R(m_n) = Σ_{i+j=n} m_i t_j^{p^i}"""
        total = self.t(n)
        for i in range(1, n + 1):
            total += self.m_in_v(i, ideal) * self.t(n - i, 0, self.p ** i)
        return self.truncate(total, ideal)

    def _eta_rational(self, n: int, ideal: IdealSpec) -> PolyElement:
        key = ("eta", n, ideal)
        if key not in self._cache:
            total = self._eta_m(n, ideal) * self.p
            for i in range(1, n):
                lower = self.power(self._eta_rational(n - i, ideal), self.p ** i, ideal)
                total -= self.mul(lower, self._eta_m(i, ideal), ideal)
            self._cache[key] = self.truncate(total, ideal)
        return self._cache[key]

    def eta_r(self, n: int, ideal: IdealSpec = EXACT) -> PolyElement:
        """
        η_R(v_n) modulo the ideal.

        Raises:
            InvalidConfigError: n outside 1..3
            IntegralityError: the rational expansion has a p in a denominator
        """
        if not 1 <= n <= 3:
            raise InvalidConfigError(f"η_R(v_{n}) is only expanded for n <= 3")
        f = self._eta_rational(n, ideal.monomial_part())
        if not self.is_integral(f):
            raise IntegralityError(f"η_R(v{n}) is not p-integral modulo {ideal.describe()}")
        return self.reduce(f, ideal)

    # coproduct

    def coproduct(self, s: int, ideal: IdealSpec = EXACT) -> PolyElement:
        """
        Δ(t_s) in slots (0, 1) from
        Σ_{i+j+k=s} m_i t_j^{p^i} ⊗ t_k^{p^{i+j}} = Σ_{i+j=s} m_i (Δt_j)^{p^i}.

        Raises:
            InvalidConfigError: s > 3 without p, v1, v2 in the ideal
            IntegralityError: the result is not p-integral
        """
        if s < 1 or s > TOP:
            raise InvalidConfigError(f"Δ(t_{s}) is outside t_1..t_{TOP}")
        if s > 3 and not (ideal.modulus == 1 and ideal.kills(1) and ideal.kills(2)):
            raise InvalidConfigError(f"Δ(t_{s}) is only computed modulo (p, v1, v2)")
        key = ("delta", s, ideal)
        if key in self._cache:
            return self._cache[key]
        p = self.p
        mono = ideal.monomial_part()
        total = self.ring.zero
        for i in range(0, s + 1):
            coefficient = self.ring.one if i == 0 else self.m_in_v(i, mono)
            if not coefficient:
                continue
            for j in range(0, s - i + 1):
                k = s - i - j
                total += coefficient * self.t(j, 0, p ** i) * self.t(k, 1, p ** (i + j))
        for i in range(1, s + 1):
            coefficient = self.m_in_v(i, mono)
            if not coefficient:
                continue
            if i == s:
                total -= coefficient
                continue
            precision = None
            if ideal.modulus is not None:
                precision = ideal.modulus + self.denominator_exponent(coefficient)
            inner = self.frobenius_power(self.coproduct(s - i, ideal), i, mono, precision)
            total -= self.mul(inner, coefficient, mono)
        total = self.truncate(total, mono)
        if not self.is_integral(total):
            raise IntegralityError(f"Δ(t_{s}) is not p-integral modulo {ideal.describe()}")
        result = self.reduce(total, ideal)
        logger.debug("Δ(t_%d) mod %s: %d terms", s, ideal.describe(), len(result))
        self._cache[key] = result
        return result

    def b_one(self, k: int, ideal: IdealSpec = EXACT) -> PolyElement:
        """b_{1,k} = Σ_{0<i<p^{k+1}} (C(p^{k+1}, i)/p) t_1^i ⊗ t_1^{p^{k+1}-i}"""
        n = self.p ** (k + 1)
        total = self.ring.zero
        for i in range(1, n):
            total += self.term(int(binomial(n, i)) // self.p, slots=({1: i}, {1: n - i}))
        return self.reduce(total, ideal)

    def b_two(self, k: int, ideal: IdealSpec) -> PolyElement:
        """b_{2,k} = (Δ(t_2)^{p^{k+1}} - Σ_{i+j=2} t_i^{p^{k+1}} ⊗ t_j^{p^{i+k+1}})/p, modulo v1"""
        if not ideal.kills(1) or ideal.modulus is None:
            raise InvalidConfigError("b_{2,k} is only built modulo (p^a, v1)")
        precision = ideal.modulus + 1
        e = self.p ** (k + 1)
        raised = self.frobenius_power(self.coproduct(2, ideal.with_modulus(precision)), k + 1,
                                      ideal.monomial_part(), precision)
        primitive = (self.term(slots=({2: e}, {}))
                     + self.term(slots=({1: e}, {1: self.p * e}))
                     + self.term(slots=({}, {2: e})))
        difference = self._mod_coefficients(raised - primitive, precision)
        return self.reduce(self.divide_p(difference, f"Δ(t_2)^(p^{k + 1})"), ideal)

    def primitive_part(self, s: int, ideal: IdealSpec = EXACT) -> PolyElement:
        """Σ_{i+j=s} t_i ⊗ t_j^{p^i}"""
        total = self.ring.zero
        for i in range(0, s + 1):
            total += self.t(i, 0) * self.t(s - i, 1, self.p ** i)
        return self.reduce(total, ideal)

    # cobar complex

    def shift(self, f: PolyElement, by: int = 1) -> PolyElement:
        """Move every tensor slot k to k + by"""
        out = {}
        base = 2 * TOP
        for mono, c in f.items():
            new = list(mono[:base]) + [0] * (SLOTS * TOP)
            for k in range(SLOTS):
                for i in range(1, TOP + 1):
                    e = mono[self.t_index(i, k)]
                    if e:
                        if k + by >= SLOTS:
                            raise InvalidConfigError("cobar degree exceeds the available tensor slots")
                        new[self.t_index(i, k + by)] = e
            out[tuple(new)] = c
        return self.ring.from_dict(out)

    def slot_empty(self, mono: Monomial, k: int) -> bool:
        return not any(mono[self.t_index(i, k)] for i in range(1, TOP + 1))

    def boundary_coefficient(self, j: int, k: int, ideal: IdealSpec) -> PolyElement:
        """v_j sitting after k tensor slots, rewritten with its coefficients on the far left"""
        if k == 0:
            return self.v(j)
        key = ("boundary", j, k, ideal)
        if key not in self._cache:
            f = self.eta_r(j, ideal)
            for _ in range(k - 1):
                f = self.coproduct_slot(f, 0, ideal)
            self._cache[key] = f
        return self._cache[key]

    def _slot_image(self, i: int, slot: int, ideal: IdealSpec) -> PolyElement:
        delta = self.coproduct(i, ideal)
        if slot == 0:
            return delta
        images = {}
        for k in (0, 1):
            for n in range(1, TOP + 1):
                images[self.t_index(n, k)] = self.t(n, slot + k)
        for j in range(1, TOP + 1):
            if any(mono[self.v_index(j)] for mono in delta.keys()):
                images[self.v_index(j)] = self.boundary_coefficient(j, slot, ideal)
        return self.substitute(delta, images, ideal)

    def coproduct_slot(self, f: PolyElement, slot: int, ideal: IdealSpec) -> PolyElement:
        """Apply Δ to tensor slot `slot`, shifting the later slots up by one"""
        images = {}
        monomials = list(f.keys())
        for i in range(1, TOP + 1):
            if any(mono[self.t_index(i, slot)] for mono in monomials):
                images[self.t_index(i, slot)] = self._slot_image(i, slot, ideal)
        for k in range(slot + 1, SLOTS):
            for i in range(1, TOP + 1):
                if any(mono[self.t_index(i, k)] for mono in monomials):
                    if k + 1 >= SLOTS:
                        raise InvalidConfigError("cobar degree exceeds the available tensor slots")
                    images[self.t_index(i, k)] = self.t(i, k + 1)
        return self.substitute(f, images, ideal)

    def reduced_coproduct_slot(self, f: PolyElement, slot: int, ideal: IdealSpec) -> PolyElement:
        g = self.coproduct_slot(f, slot, ideal)
        return self.ring.from_dict({mono: c for mono, c in g.items()
                                    if not self.slot_empty(mono, slot) and not self.slot_empty(mono, slot + 1)})

    def differential(self, f: PolyElement, arity: int, ideal: IdealSpec) -> PolyElement:
        """
        Cobar differential of an arity-k cochain Σ a·W:
        (η_R(a) - a)|W + a·Σ_i (-1)^{i+1} Δ̄ on slot i.
        """
        if arity + 1 > SLOTS:
            raise InvalidConfigError("cobar degree exceeds the available tensor slots")
        base = 2 * TOP
        groups: Dict[Monomial, Dict[Monomial, Any]] = {}
        for mono, c in f.items():
            if any(mono[:TOP]):
                raise InvalidConfigError("cochains must be written in the v_i")
            t_part = (0,) * base + mono[base:]
            groups.setdefault(mono[TOP:base], {})[t_part] = c
        out = self.ring.zero
        for v_part, words in groups.items():
            a = self.ring.from_dict({(0,) * TOP + v_part + (0,) * (SLOTS * TOP): 1})
            eta = self.ring.one
            for j, e in enumerate(v_part, start=1):
                if e:
                    eta = self.mul(eta, self.power(self.eta_r(j, ideal), e, ideal), ideal)
            out += self.mul(eta - a, self.shift(self.ring.from_dict(words)), ideal)
        for slot in range(arity):
            image = self.reduced_coproduct_slot(f, slot, ideal)
            out += -image if slot % 2 == 0 else image
        return self.reduce(out, ideal)

    def connecting(self, f: PolyElement, arity: int, k: int, working: IdealSpec, result: IdealSpec) -> PolyElement:
        """
        δ_k: lift, take d modulo the working ideal, divide by v_k (p for k = 0),
        reduce modulo the result ideal.

        Raises:
            DivisibilityError: d of the lift is not divisible
        """
        image = self.differential(f, arity, working)
        quotient, remainder = {}, {}
        if k == 0:
            for mono, c in image.items():
                if valuation(c, self.p) < 1:
                    remainder[mono] = c
                else:
                    quotient[mono] = c / self.p
        else:
            index = self.v_index(k)
            for mono, c in image.items():
                if not mono[index]:
                    remainder[mono] = c
                else:
                    lowered = list(mono)
                    lowered[index] -= 1
                    quotient[tuple(lowered)] = c
        if remainder:
            divisor = "p" if k == 0 else f"v{k}"
            raise DivisibilityError(f"d of the lift is not divisible by {divisor} modulo {working.describe()}",
                                    {self.term_text(mono, c): str(c) for mono, c in remainder.items()})
        return self.reduce(self.ring.from_dict(quotient), result)

    # display

    def term_text(self, mono: Monomial, c) -> str:
        def factor(name, e):
            return name if e == 1 else f"{name}^{e}"

        coefficients = [factor(f"m{i}", mono[self.m_index(i)]) for i in range(1, TOP + 1) if mono[self.m_index(i)]]
        coefficients += [factor(f"v{i}", mono[self.v_index(i)]) for i in range(1, TOP + 1) if mono[self.v_index(i)]]
        slots = []
        last = max([k for k in range(SLOTS) if not self.slot_empty(mono, k)], default=-1)
        for k in range(last + 1):
            slot = [factor(f"t{i}", mono[self.t_index(i, k)]) for i in range(1, TOP + 1) if mono[self.t_index(i, k)]]
            slots.append(" ".join(slot) or "1")
        body = " ".join(coefficients)
        if slots:
            body = f"{body} [{' | '.join(slots)}]".strip()
        return f"{c} {body}".strip() if body else str(c)

    def to_text(self, f: PolyElement) -> str:
        if not f:
            return "0"
        return " + ".join(self.term_text(mono, c) for mono, c in sorted(f.items(), reverse=True))

    def degree(self, mono: Monomial) -> int:
        """Internal degree with |v_i| = |m_i| = |t_i| = 2(p^i - 1)"""
        total = 0
        for i in range(1, TOP + 1):
            weight = 2 * (self.p ** i - 1)
            total += weight * (mono[self.m_index(i)] + mono[self.v_index(i)])
            total += weight * sum(mono[self.t_index(i, k)] for k in range(SLOTS))
        return total

    def is_homogeneous(self, f: PolyElement) -> bool:
        return len({self.degree(mono) for mono in f.keys()}) <= 1


@lru_cache(maxsize=4)
def bp_ring(p: int) -> BPRing:
    return BPRing(p)


def hazewinkel(ctx: PrimeContext, s: int) -> Tuple[PolyElement, PolyElement]:
    """(v_s in the m's, m_s in the v's)"""
    if not 1 <= s <= HAZEWINKEL_BOUND:
        raise InvalidConfigError(f"Hazewinkel generators are expanded for s <= {HAZEWINKEL_BOUND}")
    bp = bp_ring(ctx.p)
    return bp.v_in_m(s), bp.m_in_v(s)


def eta_r(ctx: PrimeContext, n: int, ideal: IdealSpec = EXACT) -> PolyElement:
    return bp_ring(ctx.p).eta_r(n, ideal)


def bp_coproduct(ctx: PrimeContext, s: int, ideal: IdealSpec = EXACT) -> PolyElement:
    return bp_ring(ctx.p).coproduct(s, ideal)


# Formula checks ------------------------------------------------------------

@dataclass
class DisplayCheck:
    """A computed BP expression against its displayed form"""
    check_id: str
    anchor: str
    status: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {"check_id": self.check_id, "anchor": self.anchor, "status": self.status, "details": self.details}


def compare_display(bp: BPRing, check_id: str, anchor: str, computed: PolyElement, printed: PolyElement,
                    mismatch: str = FAIL) -> DisplayCheck:
    difference = computed - printed
    if not difference:
        return DisplayCheck(check_id, anchor, PASS, {"expression": bp.to_text(computed)})
    missing = {mono: c for mono, c in printed.items() if computed.get(mono) != c}
    extra = {mono: c for mono, c in computed.items() if printed.get(mono) != c}
    logger.info("%s: displayed form differs in %d terms", check_id, len(difference))
    return DisplayCheck(check_id, anchor, mismatch, {
        "computed": bp.to_text(computed),
        "printed": bp.to_text(printed),
        "missing": bp.to_text(bp.ring.from_dict(missing)),
        "extra": bp.to_text(bp.ring.from_dict(extra)),
    })


def formula_checks(ctx: PrimeContext) -> List[DisplayCheck]:
    """Right unit and coproduct formulas against their closed forms"""
    bp = bp_ring(ctx.p)
    p = ctx.p
    checks = []
    for s in range(1, 4):
        round_trip = bp.hazewinkel_round_trip(s)
        checks.append(compare_display(bp, f"hazewinkel_v{s}", "Hazewinkel generators", round_trip, bp.v(s)))

    checks.append(compare_display(bp, "eta_r_v1", "right unit", bp.eta_r(1), bp.v(1) + bp.term(p, slots=({1: 1},))))

    v2_ideal = IdealSpec(modulus=2, mixed=((1, 1, 1),), powers=((1, p * p),))
    printed = (bp.v(2) + bp.term(v={1: 1}, slots=({1: p},)) + bp.term(p, slots=({2: 1},))
               - bp.term(v={1: p}, slots=({1: 1},)))
    checks.append(compare_display(bp, "eta_r_v2", "right unit", bp.eta_r(2, v2_ideal), bp.reduce(printed, v2_ideal)))

    v3_ideal = IdealSpec(modulus=2, mixed=((1, 1, 1),), powers=((1, 3),))
    printed = (bp.v(3) + bp.term(v={2: 1}, slots=({1: p * p},)) + bp.term(v={1: 1}, slots=({2: p},))
               + bp.term(p, slots=({3: 1},)) - bp.term(v={2: p}, slots=({1: 1},))
               - bp.term(v={1: 2, 2: p - 1}, slots=({1: p},)))
    checks.append(compare_display(bp, "eta_r_v3", "right unit", bp.eta_r(3, v3_ideal), bp.reduce(printed, v3_ideal)))

    checks.append(compare_display(bp, "coproduct_t1", "coproduct", bp.coproduct(1), bp.primitive_part(1)))
    printed = bp.primitive_part(2) - bp.v(1) * bp.b_one(0)
    checks.append(compare_display(bp, "coproduct_t2", "coproduct", bp.coproduct(2), printed))
    printed = bp.primitive_part(5, I3) - bp.v(3) * bp.b_two(2, I3) - bp.v(4) * bp.b_one(3, I3)
    checks.append(compare_display(bp, "coproduct_t5", "coproduct", bp.coproduct(5, I3), bp.reduce(printed, I3)))
    return checks


def coassociativity_defect(ctx: PrimeContext, s: int, ideal: IdealSpec = EXACT) -> PolyElement:
    """(Δ⊗1)Δ(t_s) - (1⊗Δ)Δ(t_s)"""
    bp = bp_ring(ctx.p)
    delta = bp.coproduct(s, ideal)
    return bp.reduce(bp.coproduct_slot(delta, 0, ideal) - bp.coproduct_slot(delta, 1, ideal), ideal)


def counit_defects(ctx: PrimeContext, s: int, ideal: IdealSpec = EXACT) -> Tuple[PolyElement, PolyElement]:
    """(ε⊗1)Δ(t_s) - t_s and (1⊗ε)Δ(t_s) - t_s"""
    bp = bp_ring(ctx.p)
    delta = bp.coproduct(s, ideal)
    right = bp.ring.from_dict({mono: c for mono, c in delta.items() if bp.slot_empty(mono, 1)})
    moved = {}
    for mono, c in delta.items():
        if not bp.slot_empty(mono, 0):
            continue
        new = list(mono)
        for i in range(1, TOP + 1):
            new[bp.t_index(i, 0)] = mono[bp.t_index(i, 1)]
            new[bp.t_index(i, 1)] = 0
        moved[tuple(new)] = c
    t_s = bp.reduce(bp.t(s), ideal)
    return bp.ring.from_dict(moved) - t_s, right - t_s


# Greek letter chains -------------------------------------------------------

@dataclass
class ChainStage:
    label: str
    ideal: str
    poly: PolyElement
    arity: int


@dataclass
class GreekCochain:
    """δ_0 ··· δ_{n-1}(v_n^t) with every intermediate stage"""
    p: int
    n: int
    t: int
    poly: PolyElement
    arity: int
    ideal: IdealSpec
    stages: List[ChainStage] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        bp = bp_ring(self.p)
        return {
            "n": self.n,
            "t": self.t,
            "ideal": self.ideal.describe(),
            "stages": [{"label": st.label, "ideal": st.ideal, "arity": st.arity, "expression": bp.to_text(st.poly)}
                       for st in self.stages],
        }


def greek_chain(ctx: PrimeContext, n: int, t: int) -> GreekCochain:
    """
    Raises:
        InvalidConfigError: n outside 1..3 or t < 1
        DivisibilityError: some stage is not divisible
    """
    if n not in CHAIN_PLANS:
        raise InvalidConfigError(f"Greek letter chains are built for n = 1, 2, 3, not {n}")
    if t < 1:
        raise InvalidConfigError("the exponent t must be positive")
    bp = bp_ring(ctx.p)
    poly, arity, ideal = bp.v(n, t), 0, EXACT
    label = f"v{n}^{t}"
    stages = [ChainStage(label, ideal.describe(), poly, arity)]
    for k, working, result in CHAIN_PLANS[n]:
        poly = bp.connecting(poly, arity, k, working, result)
        arity += 1
        ideal = result
        label = f"δ{k}{label}" if label.startswith("δ") else f"δ{k}({label})"
        stages.append(ChainStage(label, result.describe(), poly, arity))
        logger.debug("%s mod %s: %d terms", label, result.describe(), len(poly))
    return GreekCochain(ctx.p, n, t, poly, arity, ideal, stages)


def gamma_displays(ctx: PrimeContext, chain: GreekCochain) -> List[DisplayCheck]:
    """d(v3^s), δ2(v3^s) and δ1δ2(v3^s) against their displayed forms"""
    bp = bp_ring(ctx.p)
    p, s = ctx.p, chain.t
    (_, w2, r2), (_, _, r1), _ = CHAIN_PLANS[3]
    e = p * p

    printed = bp.ring.zero
    for k in range(1, 4):
        if s >= k:
            printed += bp.term(int(binomial(s, k)), v={2: k, 3: s - k}, slots=({1: k * e},))
    computed = bp.differential(bp.v(3, s), 0, w2)
    checks = [compare_display(bp, "gamma_d_v3", "gamma chain", computed, bp.reduce(printed, w2))]

    printed = bp.ring.zero
    for k in range(1, 4):
        if s >= k:
            printed += bp.term(int(binomial(s, k)), v={2: k - 1, 3: s - k}, slots=({1: k * e},))
    checks.append(compare_display(bp, "gamma_delta2", "gamma chain", chain.stages[1].poly, bp.reduce(printed, r2)))

    two = s * (s - 1)
    choose2 = int(binomial(s, 2))
    three = s * (s - 1) * (s - 2)
    mixed = s * int(binomial(s - 1, 2))
    displayed = []
    if s >= 2:
        displayed += [
            (two, {3: s - 2}, ({2: p}, {1: e})),
            (choose2, {3: s - 2}, ({1: p}, {1: 2 * e})),
        ]
    if s >= 3:
        displayed += [
            (three, {3: s - 3, 2: 1}, ({1: e + p}, {1: e})),
            (mixed, {3: s - 3, 1: 1}, ({1: 2 * e}, {1: e})),
            (mixed, {3: s - 3, 2: 1}, ({1: e + p}, {1: 2 * e})),
            (mixed, {3: s - 3, 2: 1}, ({2: p}, {1: 2 * e})),
            (mixed, {3: s - 3, 1: 1}, ({2: p, 1: p}, {1: 2 * e})),
        ]
    printed = bp.ring.zero
    for coefficient, v, slots in displayed:
        printed += bp.term(coefficient, v=v, slots=slots)
    checks.append(compare_display(bp, "gamma_delta1_delta2", "gamma chain", chain.stages[2].poly,
                                  bp.reduce(printed, r1), mismatch=DISCREPANCY))
    return checks


def phi_reduce(ctx: PrimeContext, chain: GreekCochain) -> TensorElement:
    """
    The image in the S(3) cobar complex: p, v1, v2, v4, v5 ↦ 0, v3 ↦ 1,
    t_i ↦ t_i with t^{p^3} = t.
    """
    bp = bp_ring(ctx.p)
    p = ctx.p
    terms: Dict[Tuple[S3Monomial, ...], int] = {}
    for mono, c in chain.poly.items():
        if any(mono[:TOP]):
            raise InvalidConfigError("cochains must be written in the v_i")
        if any(mono[bp.v_index(j)] for j in range(1, TOP + 1) if j != 3):
            continue
        value = residue(c, p, 1)
        if not value:
            continue
        word = []
        for k in range(chain.arity):
            word.append(S3Monomial(ctx.reduce_exponent(mono[bp.t_index(i, k)]) for i in range(1, TOP + 1)))
        if any(m.is_unit for m in word):
            raise InvalidConfigError("cobar word with an empty tensor slot")
        key = tuple(word)
        terms[key] = (terms.get(key, 0) + value) % p
    return TensorElement({w: c for w, c in terms.items() if c}, p)


@dataclass
class GammaReport:
    """Class of the image of γ_s in the named basis of H^3 S(3)"""
    s: int
    coefficients: Dict[str, int]
    expected: Dict[str, int]
    status: str
    displays: List[DisplayCheck]
    chain: GreekCochain
    cocycle_terms: int
    certificate_terms: int = 0
    error: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "coefficients": self.coefficients,
            "expected": self.expected,
            "status": self.status,
            "displays": [d.to_json() for d in self.displays],
            "chain": self.chain.to_json(),
            "cocycle_terms": self.cocycle_terms,
            "certificate_terms": self.certificate_terms,
            "error": self.error,
        }


def gamma_expected(p: int, s: int) -> Dict[str, int]:
    return {label_for("nu_i", 0): signed(s * (s * s - 1), p), "rho " + label_for("k_i", 1): signed(-s * (s - 1), p)}


def _named_cobar(ctx: PrimeContext, s: int, t: int) -> Dict[str, TensorElement]:
    return {cls.name: e1_element_to_cobar(ctx, cls.representative, CONCATENATE)
            for cls in named_basis(ctx)
            if cls.tri_degree is not None and cls.tri_degree[0] == s and cls.tri_degree[1] == t}


def gamma_class(ctx: PrimeContext, s: int, may_bound: int = DEFAULT_MAY_BOUND) -> GammaReport:
    """
    Build γ_s, reduce it to S(3) and identify the class against every named
    class of H^3 in its internal degree.
    """
    p = ctx.p
    chain = greek_chain(ctx, 3, s)
    displays = gamma_displays(ctx, chain)
    cocycle = phi_reduce(ctx, chain)
    expected = gamma_expected(p, s)
    coefficients: Dict[str, int] = {}
    certificate, error = 0, None
    if cocycle:
        degrees = cochain_degrees(ctx, cocycle)
        try:
            if len(degrees) != 1:
                raise NotInSpanError("image of γ_s is not homogeneous")
            named = _named_cobar(ctx, 3, degrees.pop())
            identification = identify_class(ctx, cocycle, named, may_bound, top_generator=5)
            coefficients = {name: signed(c, p) for name, c in identification.coordinates.items()}
            certificate = len(identification.primitive)
        except (NotInSpanError, NotACocycleError) as exc:
            logger.warning("γ_%d: %s", s, exc)
            error = str(exc)
    found = {k: c for k, c in coefficients.items() if c}
    wanted = {k: c for k, c in expected.items() if c}
    status = PASS if error is None and found == wanted else FAIL
    logger.info("γ_%d ↦ %s (%s)", s, found, status)
    return GammaReport(s, found, wanted, status, displays, chain, len(cocycle), certificate, error)


# Products with ζ -----------------------------------------------------------

@lru_cache(maxsize=8)
def b_class_coefficient(ctx: PrimeContext, j: int) -> int:
    """c with [b_{1,j}] = c·e_{4,j+1} in H^2 S(3)"""
    name = label_for("e_{4,i}", j + 1)
    named = {name: e1_element_to_cobar(ctx, evaluate_expression(ctx, "e4(0)", j + 1), CONCATENATE)}
    identification = identify_class(ctx, b_element(ctx, 1, j % 3), named, DEFAULT_MAY_BOUND)
    c = signed(identification.coordinates.get(name, 0), ctx.p)
    if not c:
        raise NotInSpanError(f"b_(1,{j}) is not a multiple of {name}")
    return c


def beta_family_index(p: int, s: int) -> int:
    """i with s = (p^{2i-1} + 1)/(p + 1)"""
    i = 1
    while True:
        value = (p ** (2 * i - 1) + 1) // (p + 1)
        if value == s:
            return i
        if value > s:
            raise ValueError(f"{s} is not of the form (p^(2i-1)+1)/(p+1)")
        i += 1


def phi_beta(ctx: PrimeContext, s: int, n: int) -> E1Element:
    """Image of β_{s p^n / p^n} in E_1: -b_{1,n} for s = 1, zero for the other s of the family"""
    if beta_family_index(ctx.p, s) == 1:
        return may_b(ctx, 1, n % 3).scale(-1)
    return E1Element({}, ctx.p)


def zeta_x_terms(ctx: PrimeContext, n: int) -> List[Dict[str, Any]]:
    """The β_{s p^k / p^k} summands of x_n with s > 1, each with its image"""
    p = ctx.p
    out = []
    for k in range(n + 1):
        e = n - k + 1
        if e < 3 or e % 2 == 0:
            continue
        s = (p ** e + 1) // (p + 1)
        image = phi_beta(ctx, s, k)
        out.append({"s": s, "k": k, "image": "0" if not image else repr(image)})
    return out


@dataclass
class ZetaReport:
    """γ_s β_{p^n/p^n} ζ_3 in the named basis"""
    n: int
    s: int
    case: int
    b_coefficient: int
    combination: Dict[str, int]
    expected: Dict[str, int]
    status: str
    x_terms: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def nontrivial(self) -> bool:
        return bool(self.combination)

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "s": self.s,
            "case": self.case,
            "b_coefficient": self.b_coefficient,
            "combination": self.combination,
            "expected": self.expected,
            "nontrivial": self.nontrivial,
            "status": self.status,
            "x_terms": self.x_terms,
        }


def zeta_gamma_product(ctx: PrimeContext, n: int, s: int) -> ZetaReport:
    """
    Raises:
        InvalidConfigError: n <= 1 or s < 1
    """
    if n <= 1:
        raise InvalidConfigError("the product is taken for n > 1")
    if s < 1:
        raise InvalidConfigError("s must be positive")
    p = ctx.p
    case = n % 3
    c_b = b_class_coefficient(ctx, case)
    ring = NamedRing(ctx, 3)
    h10 = evaluate_expression(ctx, "h1(0)")
    e4 = evaluate_expression(ctx, "e4(0)", case + 1)
    gamma = (evaluate_expression(ctx, "nu(0)").scale(s * (s * s - 1))
             - evaluate_expression(ctx, "rho k(1)").scale(s * (s - 1)))
    # φ(β_{p^n/p^n}) = -[b_{1,n}] = -c_b e_{4,n+1}
    product = (h10 * e4 * gamma).scale(-c_b)
    combination = {name: signed(c, p) for name, c in ring.express(product).items() if c % p}

    coefficient = signed(modular_fraction(s * (s * s - 1), 3, p), p)
    family = "e_{4,i}e_{4,i+1}g_{i+2}"
    expected = {}
    if coefficient and case == 0:
        expected = {label_for(family, 2): coefficient}
    elif coefficient and case == 2:
        expected = {label_for(family, 0): coefficient}
    status = PASS if combination == expected else FAIL
    logger.info("γ_%d β ζ at n = %d: %s (%s)", s, n, combination, status)
    return ZetaReport(n, s, case, c_b, combination, expected, status, zeta_x_terms(ctx, n))


# Auxiliary coboundaries ----------------------------------------------------

# (id, scale, source word, displayed terms, complete); a displayed term is
# (coefficient, parts) with parts tensored left to right.
AUXILIARY_COBOUNDARIES = [
    ("aux_t5_t1", (1, 1), ("t5^p", "t1^p2"), [
        ((-1, 1), ("t1^p", "t4^p2", "t1^p2")),
        ((-1, 1), ("t2^p", "t3", "t1^p2")),
        ((-1, 1), ("t3^p", "t2^p", "t1^p2")),
        ((-1, 1), ("t4^p", "t1^p2", "t1^p2")),
        ((1, 1), ("b(2,0)", "t1^p2")),
    ], True),
    ("aux_t2_t4", (1, 1), ("t2^p", "t4^p2"), [
        ((-1, 1), ("t1^p", "t1^p2", "t4^p2")),
        ((1, 1), ("t2^p", "t1^p2", "t3")),
        ((1, 1), ("t2^p", "t2^p2", "t2^p")),
        ((1, 1), ("t2^p", "t3^p2", "t1^p2")),
        ((-1, 1), ("t2^p", "b(1,1)")),
    ], True),
    ("aux_t1_t1t4", (1, 1), ("t1^p", "t1^p2 t4^p2"), [
        ((1, 1), ("t1^p", "t4^p2", "t1^p2")),
        ((-1, 1), ("t1^p", "b(1,1)*(1|t1^p2)")),
        ((-1, 1), ("t1^p", "b(1,1)*(t1^p2|1)")),
        ((1, 1), ("t1^p", "t1^p2", "t4^p2")),
    ], False),
    ("aux_t2_t1t3", (-1, 1), ("t2^p", "t1^p2 t3"), [
        ((-1, 1), ("t2^p", "t1^p2", "t3")),
        ((-1, 1), ("t2^p", "t3", "t1^p2")),
    ], False),
    ("aux_t2t3_t1", (-2, 1), ("t2^p t3", "t1^p2"), [
        ((2, 1), ("t3", "t2^p", "t1^p2")),
        ((2, 1), ("t2^p", "t3", "t1^p2")),
    ], False),
    ("aux_t4_t1", (1, 2), ("t4^p", "t1^2p2"), [
        ((1, 2), ("b(1,0)", "t1^2p2")),
        ((1, 1), ("t4^p", "t1^p2", "t1^p2")),
    ], False),
    ("aux_t2t3_t1p", (1, 1), ("t2 t3^p2", "t1^p"), [
        ((-1, 1), ("t3^p2", "t2^p", "t1^p")),
        ((-1, 1), ("t2^p", "t3^p2", "t1^p")),
    ], False),
]

_GENERATOR = re.compile(r"t(\d)(?:\^(\d*)p(\d?))?")
_B_PART = re.compile(r"b\((\d),(\d)\)(?:\*\((.+)\|(.+)\))?")


def _slot_monomial(ctx: PrimeContext, text: str) -> S3Monomial:
    text = text.strip()
    if text == "1":
        return UNIT
    exponents = [0] * 5
    for token in text.split():
        m = _GENERATOR.fullmatch(token)
        if not m:
            raise ValueError(f"Unreadable monomial: {token}")
        e = 1
        if token != f"t{m.group(1)}":
            e = int(m.group(2) or 1) * ctx.p ** int(m.group(3) or 1)
        exponents[int(m.group(1)) - 1] += e
    return S3Monomial(ctx.reduce_exponent(e) for e in exponents)


def _part(ctx: PrimeContext, text: str) -> TensorElement:
    m = _B_PART.fullmatch(text)
    if m:
        element = b_element(ctx, int(m.group(1)), int(m.group(2)))
        if m.group(3):
            factor = TensorElement.word([_slot_monomial(ctx, m.group(3)), _slot_monomial(ctx, m.group(4))], ctx.p)
            element = element.multiply(ctx, factor)
        return element
    return TensorElement.word([_slot_monomial(ctx, text)], ctx.p)


def displayed_element(ctx: PrimeContext, terms) -> TensorElement:
    total = TensorElement({}, ctx.p)
    for (num, den), parts in terms:
        element = _part(ctx, parts[0])
        for part in parts[1:]:
            element = element.tensor(_part(ctx, part))
        total = total + element.scale(modular_fraction(num, den, ctx.p))
    return total


def auxiliary_coboundaries(ctx: PrimeContext) -> List[DisplayCheck]:
    """Each listed coboundary must contain its displayed terms with the displayed coefficients"""
    p = ctx.p
    checks = []
    for check_id, (num, den), source, terms, complete in AUXILIARY_COBOUNDARIES:
        word = TensorElement.word([_slot_monomial(ctx, part) for part in source], p, modular_fraction(num, den, p))
        computed = cobar_differential(ctx, word)
        printed = displayed_element(ctx, terms)
        mismatched = {w: c for w, c in printed.terms.items() if computed.coefficient(w) != c}
        details = {"computed_terms": len(computed), "displayed_terms": len(printed)}
        if mismatched:
            details["mismatched"] = [{"word": " | ".join(m.name(ctx) for m in w), "displayed": signed(c, p),
                                      "computed": signed(computed.coefficient(w), p)}
                                     for w, c in sorted(mismatched.items(), key=lambda kv: str(kv[0]))]
            status = DISCREPANCY
        elif complete and computed != printed:
            details["undisplayed_terms"] = len(computed - printed)
            status = DISCREPANCY
        else:
            status = PASS
        checks.append(DisplayCheck(check_id, "auxiliary coboundaries", status, details))
    return checks
