"""Dirichlet characters mod q as exact root-of-unity maps.

The unit group (Z/qZ)* is decomposed through the CRT into cyclic factors:
one factor per odd prime power p^e (generated by a primitive root lifted so
it stays primitive for every power of p), the factor {+-1} for 2^2, and the
pair {-1, 5} for 2^e with e >= 3. A character is an exponent vector against
this fixed basis; evaluation is a discrete-log lookup per component followed
by exact angle arithmetic, so no character value is ever a rounded float.

Moduli up to 10**6 are supported. Discrete-log tables are built once per
modulus and shared by every character mod q; characters themselves are
lightweight exponent tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidModulusError
from .roots import UnitValue

MAX_MODULUS = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond any supported modulus."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, (prime, exponent) pairs."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(p: int) -> int:
    """Smallest primitive root mod odd prime p."""
    order_factors = [r for r, _ in factorize(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in order_factors):
            return g
        g += 1


@dataclass(frozen=True)
class BasisElement:
    """One cyclic factor of (Z/qZ)*: generator, order, and dlog table."""

    prime: int
    prime_power: int          # the component modulus p^e
    generator: int            # lifted generator, taken mod q
    order: int
    dlog: np.ndarray          # dlog[r % prime_power] = k, -1 off the orbit

    def __hash__(self):
        return hash((self.prime, self.prime_power, self.generator, self.order))


def _crt_lift(g: int, pe: int, q: int) -> int:
    """x with x = g mod pe and x = 1 mod q/pe."""
    m = q // pe
    if m == 1:
        return g % q
    t = (g - 1) * pow(m, -1, pe) % pe
    return (1 + m * t) % q


def _component_basis(p: int, e: int, q: int) -> list[BasisElement]:
    pe = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            dlog = np.full(4, -1, dtype=np.int32)
            dlog[1] = 0
            dlog[3] = 1
            return [BasisElement(2, 4, _crt_lift(3, 4, q), 2, dlog)]
        half = pe // 4
        dlog5 = np.full(pe, -1, dtype=np.int32)
        dlogm = np.full(pe, -1, dtype=np.int32)
        x = 1
        for b in range(half):
            dlog5[x] = b
            dlogm[x] = 0
            dlog5[pe - x] = b
            dlogm[pe - x] = 1
            x = 5 * x % pe
        return [
            BasisElement(2, pe, _crt_lift(pe - 1, pe, q), 2, dlogm),
            BasisElement(2, pe, _crt_lift(5, pe, q), half, dlog5),
        ]
    g = _primitive_root(p)
    if e >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    order = pe // p * (p - 1)
    dlog = np.full(pe, -1, dtype=np.int32)
    x = 1
    for k in range(order):
        dlog[x] = k
        x = x * g % pe
    return [BasisElement(p, pe, _crt_lift(g, pe, q), order, dlog)]


class CharacterGroup:
    """The character group mod q: fixed basis plus shared dlog tables."""

    def __init__(self, q: int):
        if q <= 0:
            raise InvalidModulusError(f"modulus must be positive, got {q}")
        if q > MAX_MODULUS:
            raise InvalidModulusError(
                f"modulus {q} exceeds supported bound {MAX_MODULUS}")
        self.modulus = q
        self.factorization = factorize(q)
        # 2^1 contributes a trivial factor with no basis element, so
        # coprimality with 2 needs its own check in that case.
        self._check_odd = (2, 1) in self.factorization
        self.basis: list[BasisElement] = []
        for p, e in self.factorization:
            self.basis.extend(_component_basis(p, e, q))
        self.orders = tuple(b.order for b in self.basis)
        self.generators = tuple(b.generator for b in self.basis)
        self.exponent = math.lcm(*self.orders) if self.orders else 1
        self.phi = math.prod(self.orders) if self.orders else 1

    def __repr__(self):
        return f"CharacterGroup(q={self.modulus}, orders={self.orders})"

    def dlogs(self, n: int) -> tuple[int, ...] | None:
        """Exponent of n on each basis element, None when gcd(n, q) > 1."""
        if self._check_odd and n % 2 == 0:
            return None
        out = []
        for b in self.basis:
            k = int(b.dlog[n % b.prime_power])
            if k < 0:
                return None
            out.append(k)
        return tuple(out)

    def character(self, exponents: tuple[int, ...]) -> "Character":
        norm = tuple(c % d for c, d in zip(exponents, self.orders))
        if len(exponents) != len(self.orders):
            raise ValueError("exponent vector length mismatch with basis")
        return Character(self, norm)

    def principal(self) -> "Character":
        return Character(self, tuple(0 for _ in self.orders))


@lru_cache(maxsize=64)
def character_group(q: int) -> CharacterGroup:
    return CharacterGroup(q)


@dataclass(frozen=True)
class Character:
    """Dirichlet character mod q, identified by its basis exponent vector."""

    group: CharacterGroup
    exponents: tuple[int, ...]

    def __hash__(self):
        return hash((self.group.modulus, self.exponents))

    def __eq__(self, other):
        return (isinstance(other, Character)
                and self.group.modulus == other.group.modulus
                and self.exponents == other.exponents)

    @property
    def modulus(self) -> int:
        return self.group.modulus

    def __call__(self, n: int) -> UnitValue:
        return eval_char(self, n)

    @property
    def is_principal(self) -> bool:
        return all(c == 0 for c in self.exponents)

    def conjugate(self) -> "Character":
        return self.group.character(
            tuple(-c % d for c, d in zip(self.exponents, self.group.orders)))

    @property
    def order(self) -> int:
        return math.lcm(*(d // math.gcd(d, c) for c, d in
                          zip(self.exponents, self.group.orders))) \
            if self.exponents else 1

    @property
    def label(self) -> str:
        """Label q.j with j = product of generator^exponent mod q."""
        q = self.modulus
        j = 1
        for g, c in zip(self.group.generators, self.exponents):
            j = j * pow(g, c, q) % q
        if q == 1:
            j = 1
        return f"{q}.{j}"

    def value_table(self) -> tuple[UnitValue, ...]:
        """chi(0), ..., chi(q-1) as exact values. Built fresh per call."""
        return tuple(eval_char(self, n) for n in range(self.modulus))

    def angle_numerators(self, scale: int) -> np.ndarray:
        """Angles of chi(0..q-1) as integer numerators over `scale`.

        scale must be a multiple of the character's order. Entries for
        gcd(n, q) > 1 are -1. Vectorized; this is the sieve's lookup table.
        """
        q = self.modulus
        if q == 1:
            return np.zeros(1, dtype=np.int64)
        res = np.arange(q, dtype=np.int64)
        t = np.zeros(q, dtype=np.int64)
        bad = np.zeros(q, dtype=bool)
        if self.group._check_odd:
            bad |= res % 2 == 0
        for b, c in zip(self.group.basis, self.exponents):
            k = b.dlog[res % b.prime_power].astype(np.int64)
            bad |= k < 0
            step = c * scale
            if step % b.order:
                raise ValueError("scale not divisible by the character order")
            t = (t + (step // b.order) % scale * np.where(k < 0, 0, k)) % scale
        t[bad] = -1
        return t

    def conductor(self) -> int:
        return conductor(self)

    @property
    def is_primitive(self) -> bool:
        return is_primitive(self)

    def descriptor(self) -> dict:
        return {"modulus": self.modulus,
                "label": self.label,
                "exponents": list(self.exponents),
                "orders": list(self.group.orders),
                "parity": parity(self),
                "conductor": self.conductor(),
                "principal": self.is_principal}

    def __repr__(self):
        return f"Character({self.label})"


def enumerate_characters(q: int) -> list[Character]:
    """All phi(q) characters mod q, in deterministic basis order."""
    grp = character_group(q)
    return [Character(grp, exps)
            for exps in itertools.product(*(range(d) for d in grp.orders))]


def eval_char(chi: Character, n: int) -> UnitValue:
    """chi(n) as an exact UnitValue; 0 when gcd(n, q) > 1."""
    grp = chi.group
    ks = grp.dlogs(n % grp.modulus)
    if ks is None:
        return UnitValue.zero()
    angle = Fraction(0)
    for c, d, k in zip(chi.exponents, grp.orders, ks):
        angle += Fraction(c * k, d)
    return UnitValue.from_fraction(angle)


def parity(chi: Character) -> int:
    """+1 for even characters (chi(-1) = 1), -1 for odd ones."""
    q = chi.modulus
    v = eval_char(chi, q - 1 if q > 1 else 1)
    if v.is_one:
        return 1
    if v.denominator == 2:
        return -1
    raise AssertionError("chi(-1) must be a square root of unity")


def conductor(chi: Character) -> int:
    """Smallest modulus inducing chi, via per-component character orders.

    For an odd prime power component with character order m: the factor is 1
    when m = 1, else p^(1 + v_p(m)). For the 2-part: trivial -> 1, the
    component through {-1} alone -> 4, and when the 5-part has order
    m = 2^t > 1 the factor is 2^(t+2) regardless of the {-1} exponent.
    """
    grp = chi.group
    cond = 1
    i = 0
    for p, e in grp.factorization:
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                c = chi.exponents[i]
                cond *= 4 if c % 2 else 1
                i += 1
            else:
                a = chi.exponents[i] % 2
                b = chi.exponents[i + 1] % grp.orders[i + 1]
                if b == 0:
                    cond *= 4 if a else 1
                else:
                    m = grp.orders[i + 1] // math.gcd(grp.orders[i + 1], b)
                    cond *= 4 * m
                i += 2
        else:
            d = grp.orders[i]
            c = chi.exponents[i]
            m = d // math.gcd(d, c)
            if m > 1:
                v = 0
                while m % p == 0:
                    m //= p
                    v += 1
                cond *= p ** (1 + v)
            i += 1
    return cond


def is_primitive(chi: Character) -> bool:
    return conductor(chi) == chi.modulus


def character_from_label(label: str) -> Character:
    """Resolve a q.j label back to the character with that generator image."""
    q_str, _, j_str = label.partition(".")
    q, j = int(q_str), int(j_str)
    grp = character_group(q)
    ks = grp.dlogs(j % q if q > 1 else 0)
    if ks is None:
        raise InvalidModulusError(f"label {label}: {j} not coprime to {q}")
    return Character(grp, tuple(ks))
