"""Dirichlet L-functions, special constants, and the series F(s).

Everything funnels through the Hurwitz zeta function: L(s, chi) =
q^(-s) sum_a chi(a) zeta(s, a/q), with zeta(s, a) evaluated by
Euler-Maclaurin under an explicit, escalating error bound. Special values
at s = 0 avoid floats entirely: L(0, chi) is a finite exact sum for odd chi,
and L'(0, chi) for even chi is computed twice, by the log-gamma sum and
through the functional equation, with a mandatory cross-check since every
leading-coefficient number downstream multiplies it.

The series attached to a modified character is
F(s) = (prod over S of (1 - chi(p) p^-s)/(1 - f(p) p^-s)) * L(s, chi);
its Euler-factor ratio has simple poles exactly at s = 2*pi*i(a_p/b_p + n)/log p
where f(p) = e(a_p/b_p), detected through the rational angle, never by float
equality alone.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import Character, eval_char, is_primitive, parity
from .errors import (DomainError, NearPoleWarning, ParityError, PoleError,
                     PrecisionError, PrimitivityError, UntrustedTheoryWarning)
from .modified import ModifiedCharacter, compute_pole_order, compute_sign_shift
from .roots import CyclotomicSum

MAX_ABS_S = 100.0


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, by the defining recurrence. Exact."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    acc = Fraction(0)
    for j in range(n):
        acc += math.comb(n + 1, j) * bernoulli(j)
    return -acc / (n + 1)


def _em_sum(s: complex, a: float, M: int, B: int) -> tuple[complex, float]:
    """One Euler-Maclaurin evaluation of zeta(s, a) with its error bound.

    Valid when Re(s) + 2B + 1 > 0; the bound is the standard |B_{2B+2}|
    term inflated by |s + 2B + 1|/(Re(s) + 2B + 1).
    """
    sigma = s.real
    ns = np.arange(M, dtype=np.float64) + a
    part = complex(np.sum(np.exp(-s * np.log(ns))))
    w = M + a
    lw = math.log(w)
    val = part + cmath.exp((1 - s) * lw) / (s - 1) + cmath.exp(-s * lw) / 2
    rising = s                       # (s)_{2j-1} for the current j
    for j in range(1, B + 1):
        coef = float(bernoulli(2 * j) / math.factorial(2 * j))
        val += coef * rising * cmath.exp((-s - 2 * j + 1) * lw)
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
    j = B + 1
    coef = abs(float(bernoulli(2 * j) / math.factorial(2 * j)))
    denom = sigma + 2 * B + 1
    bound = (coef * abs(rising) * w ** (-sigma - 2 * B - 1)
             * abs(s + 2 * B + 1) / denom)
    return val, bound


def _term_scale(s: complex, a: float, M: int) -> float:
    """Magnitude of the largest term the Euler-Maclaurin sum touches.

    For sigma > 0 with small a that is the leading a^(-sigma); for
    sigma < 0 the boundary term (M+a)^(1-sigma). Rounding error in any
    fixed-precision evaluation is proportional to this scale.
    """
    sigma = s.real
    lead = math.exp(-sigma * math.log(a)) if sigma > 0 else 1.0
    edge = math.exp(max(1.0 - sigma, 0.0) * math.log(M + a))
    return max(lead, edge, 1.0)


def _em_sum_bigfloat(s: complex, a: float, M: int, B: int,
                     eps: float) -> tuple[complex, float]:
    """The same Euler-Maclaurin formula on an arbitrary-precision backend.

    Used when the term scale times machine epsilon exceeds the requested
    absolute budget: deep negative sigma (terms of size (M+a)^|sigma|
    cancelling to an O(1) value) or small a with large positive sigma
    (a huge leading term). Working precision is sized so arithmetic
    rounding stays far below eps, leaving the truncation bound honest.
    """
    import mpmath as mp

    sigma = s.real
    dps = (25 + int(max(0.0, math.log10(_term_scale(s, a, M))))
           + int(max(0.0, -math.log10(eps))))
    # If the Bernoulli terms grow before decaying, their peak sets the
    # cancellation scale instead of the power-sum terms.
    ratio = (abs(s) + 2 * B) / (2 * math.pi * (M + a))
    if ratio > 1:
        dps += int(2 * B * math.log10(ratio)) + 5
    with mp.workdps(dps):
        ms = mp.mpc(s)
        val = mp.fsum((mp.mpf(n) + a) ** (-ms) for n in range(M))
        w = mp.mpf(M) + a
        val += w ** (1 - ms) / (ms - 1) + w ** (-ms) / 2
        rising = ms
        for j in range(1, B + 1):
            coef = bernoulli(2 * j) / math.factorial(2 * j)
            val += (mp.mpf(coef.numerator) / coef.denominator
                    * rising * w ** (-ms - 2 * j + 1))
            rising = rising * (ms + 2 * j - 1) * (ms + 2 * j)
        j = B + 1
        coef = abs(bernoulli(2 * j)) / math.factorial(2 * j)
        denom = sigma + 2 * B + 1
        bound = (mp.mpf(coef.numerator) / coef.denominator * abs(rising)
                 * w ** (-sigma - 2 * B - 1) * abs(ms + 2 * B + 1) / denom)
        return complex(val), float(bound)


def hurwitz_zeta_with_bound(s, a: float, eps: float = 1e-12,
                            M: int = 50, B: int = 20) -> tuple[complex, float]:
    """zeta(s, a) for 0 < a <= 1 with a reported rigorous error bound.

    Escalates the truncation M and the Bernoulli depth B until the bound
    meets eps; raises PrecisionError with suggested parameters if the
    ceilings are hit first.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta(s, a) has its only pole at s = 1")
    if not 0 < a <= 1:
        raise DomainError(f"a must be in (0, 1], got {a}")
    if abs(s) > MAX_ABS_S:
        raise DomainError(f"|s| = {abs(s):.3g} exceeds supported {MAX_ABS_S}")
    B = max(B, int((2 - s.real) / 2) + 3)
    M = max(M, int(abs(s)))
    for _ in range(14):
        # Double-precision rounding is proportional to the largest term
        # touched; when that eats the eps budget, run the identical
        # formula at scaled precision instead. The scaled route still
        # returns a complex128, so its bound carries the one final
        # rounding of the result, which no escalation can remove.
        rounding = 1e-15 * _term_scale(s, a, M) * math.log2(M + 4)
        if rounding > eps / 4:
            try:
                val, bound = _em_sum_bigfloat(s, a, M, B, eps)
            except OverflowError:
                raise PrecisionError(
                    f"zeta({s}, {a}) overflows double precision") from None
            if math.isfinite(bound) and bound <= eps:
                return val, bound + abs(val) * 2.0 ** -52
        else:
            val, bound = _em_sum(s, a, M, B)
            bound += rounding
            if math.isfinite(bound) and bound <= eps:
                return val, bound
        # Bernoulli terms shrink like ((|s|+2B)/(2 pi (M+a)))^2 per step;
        # grow whichever parameter the ratio says is binding.
        if (abs(s) + 2 * B) >= 2 * math.pi * (M + a) or B >= 120:
            if M >= 1 << 18:
                break
            M *= 2
        else:
            B += 8
    raise PrecisionError(
        f"Euler-Maclaurin bound stuck above eps={eps:g} for s={s}",
        suggested={"M": M, "B": B})


def hurwitz_zeta(s, a: float, eps: float = 1e-12) -> complex:
    """zeta(s, a), absolute error at most eps plus one ulp of the value.

    eps no smaller than 1e-12; the ulp rider only matters when the value
    itself exceeds about eps / 2e-16.
    """
    if eps < 1e-12:
        raise DomainError("precision targets tighter than 1e-12 unsupported")
    val, _ = hurwitz_zeta_with_bound(s, a, eps)
    return val


_DIGAMMA_TAIL = (Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42),
                 Fraction(-1, 30), Fraction(5, 66), Fraction(-691, 2730),
                 Fraction(7, 6), Fraction(-3617, 510))


def digamma(x: float) -> float:
    """psi(x) for real x > 0: shift to x >= 12, then the Stirling tail."""
    if x <= 0:
        raise DomainError("digamma implemented for positive real x only")
    acc = 0.0
    while x < 12:
        acc -= 1 / x
        x += 1
    inv2 = 1 / (x * x)
    t = math.log(x) - 0.5 / x
    p = inv2
    for j, b in enumerate(_DIGAMMA_TAIL, start=1):
        t -= float(b) / (2 * j) * p
        p *= inv2
    return acc + t


_LANCZOS_G = 7.0
_LANCZOS = (0.99999999999980993, 676.5203681218851, -1259.1392167224028,
            771.32342877765313, -176.61502916214059, 12.507343278686905,
            -0.13857109526572012, 9.9843695780195716e-6,
            1.5056327351493116e-7)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) by the Lanczos expansion with reflection for Re z < 1/2."""
    z = complex(z)
    if z.real < 0.5:
        if z.imag == 0 and z.real.is_integer():
            raise PoleError(f"Gamma pole at z = {z}")
        s = cmath.sin(math.pi * z)
        return math.pi / (s * complex_gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def gauss_sum(chi: Character) -> complex:
    """tau(chi) = sum_a chi(a) e(a/q), angles kept exact until the end."""
    q = chi.modulus
    if q == 1:
        return 1 + 0j
    tot = 0j
    for a in range(1, q + 1):
        v = eval_char(chi, a)
        if v.is_zero:
            continue
        ang = float((v.angle + Fraction(a, q)) % 1)
        tot += complex(math.cos(2 * math.pi * ang), math.sin(2 * math.pi * ang))
    return tot


@dataclass
class LContext:
    """Read-after-build evaluation context for one character."""

    chi: Character
    eps: float = 1e-12
    em_shift: int = 50
    bernoulli_depth: int = 20
    _tau: complex | None = field(default=None, repr=False)
    _eps_chi: complex | None = field(default=None, repr=False)

    @property
    def kappa(self) -> int:
        return 0 if parity(self.chi) == 1 else 1

    @property
    def tau(self) -> complex:
        if self._tau is None:
            self._tau = gauss_sum(self.chi)
        return self._tau

    @property
    def root_number(self) -> complex:
        """epsilon(chi) = tau(chi)/(i^kappa sqrt(q)); unimodular if primitive."""
        if self._eps_chi is None:
            q = self.chi.modulus
            eps_chi = self.tau / (1j ** self.kappa * math.sqrt(q))
            if is_primitive(self.chi) and abs(abs(eps_chi) - 1) > 10 * self.eps:
                raise PrecisionError(
                    f"|epsilon(chi)| = {abs(eps_chi)!r} should be 1 for"
                    f" primitive chi {self.chi.label}")
            self._eps_chi = eps_chi
        return self._eps_chi


def _l_at_one(chi: Character, eps: float) -> complex:
    """L(1, chi) for non-principal chi: -(1/q) sum chi(a) psi(a/q).

    The Hurwitz route has a removable singularity at s = 1 (each term poles,
    the chi-sum cancels); the digamma form is the finite part directly.
    """
    del eps
    q = chi.modulus
    tot = 0j
    for a in range(1, q):
        v = eval_char(chi, a)
        if v.is_zero:
            continue
        tot += v.to_complex() * digamma(a / q)
    return -tot / q


def L_value(ctx: LContext, s) -> complex:
    """L(s, chi) through Hurwitz zeta.

    Total error at most ctx.eps, except that per-term budgets are floored
    at 1e-14, so for very large moduli the guarantee degrades gracefully
    to about phi(q) * 1e-14.
    """
    chi = ctx.chi
    q = chi.modulus
    s = complex(s)
    if s == 1:
        if chi.is_principal:
            raise PoleError("L(s, principal chi) has a pole at s = 1")
        return _l_at_one(chi, ctx.eps)
    phi = chi.group.phi
    # Floor at 1e-14: tighter per-term budgets are below what double
    # accumulation of the q-term combination can honor anyway.
    per_eps = max(ctx.eps * q ** s.real / max(phi, 1), 1e-14)
    tot = 0j
    for a in range(1, q + 1):
        v = eval_char(chi, a)
        if v.is_zero:
            continue
        term, _ = hurwitz_zeta_with_bound(s, a / q, per_eps,
                                          ctx.em_shift, ctx.bernoulli_depth)
        tot += v.to_complex() * term
    return cmath.exp(-s * math.log(q)) * tot if q > 1 else tot


def L0_exact(chi: Character):
    """L(0, chi) = -(1/q) sum_{a<q} chi(a) a, exactly.

    Returns a Fraction when the character is real (angles 0 and 1/2 fold
    into rationals), otherwise an exact CyclotomicSum. Odd chi only: for
    even chi the value is 0 by the sine factor, which is the wrong-parity
    case here.
    """
    if parity(chi) != -1:
        raise ParityError("L(0, chi) vanishes for even chi; odd chi required")
    q = chi.modulus
    pairs = []
    for a in range(1, q):
        v = eval_char(chi, a)
        if v.is_zero:
            continue
        pairs.append((v.angle, Fraction(-a, q)))
    cs = CyclotomicSum.from_pairs(pairs)
    if cs.is_rational:
        return cs.rational
    return cs


def lprime0_direct(chi: Character) -> complex:
    """L'(0, chi) = sum_{a<q} chi(a) log Gamma(a/q) for even primitive chi.

    The log q and log 2pi companions of the textbook formula cancel against
    sum chi(a) = 0 and L(0, chi) = 0.
    """
    if parity(chi) != 1:
        raise ParityError("L'(0, chi) formula requires even chi")
    if chi.is_principal:
        raise PrimitivityError("principal characters excluded (L is not entire)")
    if not is_primitive(chi):
        raise PrimitivityError("L'(0) dual-route check requires primitive chi")
    tot = 0j
    q = chi.modulus
    for a in range(1, q):
        v = eval_char(chi, a)
        if v.is_zero:
            continue
        tot += v.to_complex() * math.lgamma(a / q)
    return tot


def lprime0_functional(chi: Character, eps: float = 1e-12) -> complex:
    """L'(0, chi) = epsilon(chi) sqrt(q) L(1, conj chi) / 2, the second route."""
    if parity(chi) != 1:
        raise ParityError("L'(0, chi) formula requires even chi")
    if chi.is_principal:
        raise PrimitivityError("principal characters excluded (L is not entire)")
    if not is_primitive(chi):
        raise PrimitivityError("functional-equation route requires primitive chi")
    ctx = LContext(chi, eps)
    lbar = _l_at_one(chi.conjugate(), eps)
    return ctx.root_number * math.sqrt(chi.modulus) * lbar / 2


def Lprime0(chi: Character, eps: float = 1e-12,
            agreement: float = 1e-8) -> complex:
    """L'(0, chi) with the mandatory two-route agreement check."""
    direct = lprime0_direct(chi)
    via_fe = lprime0_functional(chi, eps)
    gap = abs(direct - via_fe)
    if gap > agreement:
        raise PrecisionError(
            f"L'(0, chi) routes disagree by {gap:.3e} for {chi.label}",
            suggested={"direct": direct, "functional": via_fe})
    return direct


def euler_factor_ratio(mc: ModifiedCharacter, s,
                       near_tol: float = 1e-8) -> complex:
    """prod over S of (1 - chi(p) p^-s) / (1 - f(p) p^-s).

    Poles sit exactly at s = 2*pi*i*(a_p/b_p + n)/log p where
    f(p) = e(a_p/b_p). The nearest lattice point is computed from the exact
    angle; a hit raises PoleError carrying (p, n), a near miss (< near_tol)
    computes the value but emits NearPoleWarning with the exact location.
    """
    s = complex(s)
    chi = mc.base
    out = 1 + 0j
    for p, fv in mc.modifications:
        lp = math.log(p)
        n_near = round(s.imag * lp / (2 * math.pi) - float(fv.angle))
        s_pole = 2j * math.pi * (float(fv.angle) + n_near) / lp
        dist = abs(s - s_pole)
        den = 1 - fv.to_complex() * cmath.exp(-s * lp)
        if den == 0 or dist <= 1e-15 * max(1.0, abs(s_pole)):
            raise PoleError(
                f"s = {s} is a pole of the factor at p = {p} (branch n = {n_near})",
                prime=p, index=n_near)
        if dist < near_tol:
            warnings.warn(
                f"s within {dist:.2e} of the pole at p={p}, n={n_near},"
                f" location {s_pole}", NearPoleWarning, stacklevel=2)
        num = 1 - eval_char(chi, p).to_complex() * cmath.exp(-s * lp)
        out *= num / den
    return out


def signed_pole_order(mc: ModifiedCharacter) -> int:
    """Order of F at s = 0: positive = pole, negative = zero, unclamped."""
    t = compute_sign_shift(mc)
    return t if parity(mc.base) == -1 else t - 1


def evaluate_F(mc: ModifiedCharacter, s, eps: float = 1e-12) -> complex:
    """F(s) = euler_factor_ratio(mc, s) * L(s, chi)."""
    ratio = euler_factor_ratio(mc, s)
    ctx = LContext(mc.base, eps)
    return ratio * L_value(ctx, s)


def functional_equation_check(ctx: LContext, s) -> float:
    """|L(s,chi) - eps(chi) L(1-s, conj) 2^s pi^(s-1) q^(1/2-s) Gamma(1-s) sin(pi(s+kappa)/2)|."""
    chi = ctx.chi
    if not is_primitive(chi):
        raise PrimitivityError(
            f"functional equation requires a primitive character,"
            f" got {chi.label} of conductor {chi.conductor()}")
    s = complex(s)
    if abs(s.imag) < 1e-9 and s.real >= 1 - 1e-9 \
            and abs(s.real - round(s.real)) < 1e-9:
        raise DomainError(f"Gamma(1-s) pole at s = {s}")
    if chi.modulus == 1 and (abs(s) < 1e-9 or abs(s - 1) < 1e-9):
        raise DomainError("zeta pole on one side of the equation")
    q = chi.modulus
    kappa = ctx.kappa
    lhs = L_value(ctx, s)
    ctx_bar = LContext(chi.conjugate(), ctx.eps)
    rhs = (ctx.root_number * L_value(ctx_bar, 1 - s)
           * 2 ** s * math.pi ** (s - 1) * q ** (0.5 - s)
           * complex_gamma(1 - s) * cmath.sin(math.pi * (s + kappa) / 2))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class LeadingCoefficient:
    """a_{N+k} with its full factor breakdown.

    factors holds (p, group, value) with group 1 for f(p) = 1 (factor
    (1 - chi(p))/log p), group 2 for chi(p) = 1 (factor log p/(1 - f(p))),
    group 3 otherwise (factor (1 - chi(p))/(1 - f(p))). The headline value
    is always c_chi * k!/(N+k)! * product of all factors, so it can be
    recomputed from the parts.
    """

    N: int
    k: int
    value: complex
    c_chi: complex
    c_chi_exact: object | None
    factorial_ratio: Fraction
    factors: tuple[tuple[int, int, complex], ...]

    def recompute(self) -> complex:
        out = self.c_chi * float(self.factorial_ratio)
        for _, _, f in self.factors:
            out *= f
        return out

    def describe(self) -> dict:
        return {
            "N": self.N, "k": self.k,
            "value": [self.value.real, self.value.imag],
            "c_chi": [self.c_chi.real, self.c_chi.imag],
            "c_chi_exact": str(self.c_chi_exact) if self.c_chi_exact is not None else None,
            "factorial_ratio": [self.factorial_ratio.numerator,
                                self.factorial_ratio.denominator],
            "factors": [{"p": p, "group": g, "value": [v.real, v.imag]}
                        for p, g, v in self.factors],
        }


def l_special_factor(chi: Character):
    """c_chi: L(0, chi) exact for odd chi, checked L'(0, chi) for even.

    Returns (complex value, exact form or None).
    """
    if parity(chi) == -1:
        exact = L0_exact(chi)
        val = complex(Fraction(exact)) if isinstance(exact, Fraction) \
            else exact.to_complex()
        return val, exact
    return Lprime0(chi), None


def leading_coefficient(mc: ModifiedCharacter, k: int) -> LeadingCoefficient:
    """a_{N+k} = c_chi * k!/(N+k)! * three factor groups over S."""
    if k < 0:
        raise DomainError("order k must be nonnegative")
    if not mc.theory_trusted:
        warnings.warn(
            "base character is imprimitive; leading coefficient is untrusted",
            UntrustedTheoryWarning, stacklevel=2)
    chi = mc.base
    n_pole = compute_pole_order(mc)
    c_val, c_exact = l_special_factor(chi)
    ratio = Fraction(math.factorial(k), math.factorial(n_pole + k))
    factors = []
    value = c_val * float(ratio)
    for p, fv in mc.modifications:
        chi_p = eval_char(chi, p)
        lp = math.log(p)
        if fv.is_one:
            g, fac = 1, (1 - chi_p.to_complex()) / lp
        elif chi_p.is_one:
            g, fac = 2, lp / (1 - fv.to_complex())
        else:
            g, fac = 3, (1 - chi_p.to_complex()) / (1 - fv.to_complex())
        factors.append((p, g, fac))
        value *= fac
    return LeadingCoefficient(n_pole, k, value, c_val, c_exact, ratio,
                              tuple(factors))
