"""Rational approximation of log p / log q and the pole-series diagnostic.

The analytic continuation of F(s) has poles accumulating on the imaginary
axis at ordinates 2 pi (a/b + n)/log q, so how close the partial-sum
contour can push left is governed by how well numbers log p / log q are
approximated by rationals. This module computes validated continued
fractions of those ratios, the exponent mu = gamma log p log q, the
resulting minimal admissible Riesz order, and a partial-sum trace of the
series sum_n n^(-k) prod_p |1 - e(n log p / log q)|^(-1) whose spikes sit
exactly at convergent denominators.

Partial quotients are extracted by the Euclidean algorithm on the integer
pair (floor(log p * 2^bits), floor(log q * 2^bits)), which is exact given
the scaled logs; the run is repeated at twice the precision and only the
agreeing prefix of quotients is kept, since the tail bits of a fixed
precision log can flip late quotients.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InvalidPrimeError, TruncatedTableWarning
from .characters import is_prime
from .modified import ModifiedCharacter
from .summation import NeumaierSum

MAX_DEPTH = 200
MIN_BITS = 128
MAX_SERIES_N = 10**7
_FRAC_BITS = 63
_SERIES_BLOCK = 1 << 20


def _scaled_log(n: int, bits: int) -> int:
    """floor(log(n) * 2^bits) with all bits correct.

    mpmath's log (AGM-based at high precision) is accurate to its working
    precision; a generous guard makes the floor itself safe.
    """
    import mpmath as mp

    with mp.workprec(bits + 64):
        return int(mp.floor(mp.log(n) * mp.mpf(2) ** bits))


def _euclid_quotients(num: int, den: int, depth: int) -> list[int]:
    """Partial quotients of num/den, at most depth of them."""
    out: list[int] = []
    while den and len(out) < depth:
        a, num = divmod(num, den)
        out.append(a)
        num, den = den, num
    return out


@dataclass(frozen=True)
class ConvergentTable:
    """Validated continued fraction data for alpha = log p / log q."""

    p: int
    q: int
    precision: int
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    quality: tuple[float, ...]
    trusted_depth: int

    @property
    def alpha(self) -> float:
        return math.log(self.p) / math.log(self.q)

    def denominators(self) -> list[int]:
        return [b for _, b in self.convergents]

    def rows(self):
        """(a_i, h_i, b_i, quality_i) per convergent, for tabular output."""
        return list(zip(self.partial_quotients,
                        (h for h, _ in self.convergents),
                        (b for _, b in self.convergents),
                        self.quality))


def continued_fraction(p: int, q: int, depth: int = 40,
                       bits: int = 256) -> ConvergentTable:
    """Continued fraction of log p / log q with self-validated quotients.

    Quotients come from the Euclidean algorithm on scaled integer logs,
    recomputed at 2*bits; only the agreeing prefix is trusted. Asking for
    more quotients than the precision supports returns the trusted prefix
    and warns rather than inventing digits.
    """
    if not (is_prime(p) and is_prime(q)) or p == q:
        raise InvalidPrimeError(
            f"need two distinct primes, got p={p}, q={q}")
    if bits < MIN_BITS:
        raise DomainError(f"bits must be at least {MIN_BITS}, got {bits}")
    if not 1 <= depth <= MAX_DEPTH:
        raise DomainError(f"depth must be in [1, {MAX_DEPTH}], got {depth}")

    quots = _euclid_quotients(_scaled_log(p, bits), _scaled_log(q, bits),
                              depth + 1)
    check = _euclid_quotients(_scaled_log(p, 2 * bits),
                              _scaled_log(q, 2 * bits), depth + 1)
    agree = 0
    while agree < min(len(quots), len(check)) and quots[agree] == check[agree]:
        agree += 1
    if agree < depth:
        warnings.warn(
            f"only {agree} partial quotients of log {p}/log {q} are stable"
            f" at {bits} bits; table truncated (asked for {depth})",
            TruncatedTableWarning, stacklevel=2)
    kept = quots[:min(agree, depth)]

    hs = [0, 1]   # h_{-2}, h_{-1}
    bs = [1, 0]
    convs: list[tuple[int, int]] = []
    for a in kept:
        hs.append(a * hs[-1] + hs[-2])
        bs.append(a * bs[-1] + bs[-2])
        convs.append((hs[-1], bs[-1]))

    import mpmath as mp

    quality: list[float] = []
    with mp.workprec(2 * bits):
        alpha = mp.log(p) / mp.log(q)
        for h, b in convs:
            gap = abs(alpha - mp.mpf(h) / b)
            if b < 2 or gap == 0:
                quality.append(math.inf)
            else:
                quality.append(float(-mp.log(gap) / mp.log(b)))

    return ConvergentTable(p, q, bits, tuple(kept), tuple(convs),
                           tuple(quality), agree)


def reconstruct_alpha(table: ConvergentTable) -> Fraction:
    """Fold the partial quotients back into a single rational."""
    if not table.partial_quotients:
        raise DomainError("empty quotient list")
    x = Fraction(table.partial_quotients[-1])
    for a in reversed(table.partial_quotients[:-1]):
        x = a + 1 / x
    return x


def bugeaud_mu(p: int, q: int, gamma: float) -> float:
    """The exponent mu = gamma * log p * log q.

    gamma is a configuration knob: only the existence of a workable value,
    uniform in p and q, is known. Every downstream threshold carries the
    gamma it was computed with.
    """
    if not (is_prime(p) and is_prime(q)):
        raise InvalidPrimeError(f"need primes, got p={p}, q={q}")
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    # grouped so that exchanging p and q is exact, not just near
    return gamma * (math.log(p) * math.log(q))


def fitted_lower_constant(table: ConvergentTable, gamma: float = 1.0,
                          max_denominator: int = 10**6) -> float:
    """Empirical inf of |alpha - h/b| * b^(mu+1) over the table's convergents.

    A recorded lower bound for the constant C(p, q); nothing is proved by
    it, the convergents are merely the worst rationals available.
    """
    mu = bugeaud_mu(table.p, table.q, gamma)
    best = math.inf
    for (h, b), quality in zip(table.convergents, table.quality):
        if b < 2 or b > max_denominator or not math.isfinite(quality):
            continue
        # |alpha - h/b| = b^(-quality)
        best = min(best, b ** (mu + 1 - quality))
    return best


def min_riesz_order(mc: ModifiedCharacter, gamma: float) -> int:
    """Least admissible Riesz order: ceil(10 + gamma (|S|+1) max (log p)^2).

    With S empty there are no off-axis poles to dodge and any order works,
    so the answer is 0.
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    primes = mc.primes
    if not primes:
        return 0
    worst = max(math.log(p) for p in primes) ** 2
    return math.ceil(10 + gamma * (len(primes) + 1) * worst)


@dataclass(frozen=True)
class PoleSeriesTrace:
    """Partial-sum trace of the pole series at one anchor prime.

    verdict is heuristic by construction: a numerical partial sum cannot
    prove convergence, it can only compare the observed spike growth
    against the n^(-k) decay.
    """

    anchor: int
    k: int
    n_max: int
    ns: np.ndarray
    terms: np.ndarray
    partials: np.ndarray
    max_term: float
    max_term_n: int
    records: tuple[tuple[int, float], ...]
    spike_exponent: float
    tail_estimate: float
    total_estimate: float
    verdict: str

    def rows(self):
        return list(zip(self.ns.tolist(), self.terms.tolist(),
                        self.partials.tolist()))


def _fixed_point_angles(others: list[int], anchor: int) -> list[tuple[int, int]]:
    """frac(log p / log anchor) as A_hi, A_lo halves of a 63-bit integer."""
    import mpmath as mp

    pairs = []
    with mp.workprec(2 * _FRAC_BITS):
        lq = mp.log(anchor)
        for p in others:
            a = int(mp.nint(mp.frac(mp.log(p) / lq) * 2 ** _FRAC_BITS))
            pairs.append((a >> 32, a & 0xFFFFFFFF))
    return pairs


def pole_series_diagnostic(mc: ModifiedCharacter, anchor: int, k: int,
                           n_max: int, record_cap: int = 4096) -> PoleSeriesTrace:
    """Partial sums of sum_n n^(-k) prod_{p in S, p != anchor} 1/|1 - e(n a_p)|.

    a_p = log p / log anchor. The product factor spikes exactly when some
    n a_p is near an integer, i.e. at convergent denominators of a_p, so the
    trace keeps every running record of the product alongside geometrically
    spaced partial sums. Full per-n rows are kept while n <= record_cap.
    """
    if k < 2:
        raise DomainError(f"series needs k >= 2, got {k}")
    if not 1 <= n_max <= MAX_SERIES_N:
        raise DomainError(f"n_max must be in [1, {MAX_SERIES_N}], got {n_max}")
    if anchor not in mc.primes:
        raise InvalidPrimeError(
            f"anchor {anchor} is not one of the modified primes {mc.primes}")
    others = [p for p in mc.primes if p != anchor]
    angles = _fixed_point_angles(others, anchor)

    cps: list[int] = []
    c = 1
    while c < n_max:
        cps.append(c)
        c = max(c + 1, int(c * 1.05))
    cps.append(n_max)
    checkpoints = np.array(cps, dtype=np.int64)

    acc = NeumaierSum()
    ns: list[int] = []
    terms: list[float] = []
    partials: list[float] = []
    records: list[tuple[int, float]] = []
    best_g = 0.0
    max_term = 0.0
    max_term_n = 1
    last_decade_start = max(1, n_max // 10)
    sum_g_tail = 0.0
    cnt_tail = 0

    for lo in range(1, n_max + 1, _SERIES_BLOCK):
        hi = min(lo + _SERIES_BLOCK, n_max + 1)
        n = np.arange(lo, hi, dtype=np.uint64)
        g = np.ones(hi - lo, dtype=np.float64)
        for a_hi, a_lo in angles:
            m = (((n * np.uint64(a_hi)) % np.uint64(1 << 31)) * np.uint64(1 << 32)
                 + n * np.uint64(a_lo)) % np.uint64(1 << _FRAC_BITS)
            # n * frac(log p / log anchor) is never an integer: p and the
            # anchor are multiplicatively independent.
            assert not np.any(m == 0)
            frac = m.astype(np.float64) * 2.0 ** -_FRAC_BITS
            g /= 2.0 * np.sin(np.pi * frac)
        nf = n.astype(np.float64)
        term = g * np.exp(-k * np.log(nf))

        j = int(np.argmax(term))
        if term[j] > max_term:
            max_term = float(term[j])
            max_term_n = lo + j
        # running records of the product factor locate the spikes
        for j in np.flatnonzero(np.maximum.accumulate(g) == g):
            if g[j] > best_g:
                best_g = float(g[j])
                records.append((lo + int(j), best_g))
        if hi > last_decade_start:
            cut = max(lo, last_decade_start)
            sum_g_tail += float(np.sum(g[cut - lo:]))
            cnt_tail += hi - cut

        dense_top = min(hi, record_cap + 1)
        keep = list(range(lo, dense_top))
        a, b = np.searchsorted(checkpoints, (max(lo, record_cap + 1), hi))
        keep.extend(checkpoints[a:b].tolist())
        running = acc.value + np.cumsum(term)
        for cur in keep:
            ns.append(cur)
            terms.append(float(term[cur - lo]))
            partials.append(float(running[cur - lo]))
        acc.add(float(np.sum(term)))

    # Spike envelope exponent: how fast product records grow with n.
    spike = 0.0
    for nrec, grec in records:
        if nrec >= 2 and grec > 1.0:
            spike = max(spike, math.log(grec) / math.log(nrec))
    # zeta-style tail with the mean product factor over the last decade;
    # exact (empty product aside) only in the sense of Euler-Maclaurin.
    g_mean = sum_g_tail / cnt_tail if cnt_tail else 1.0
    w = float(n_max) + 1.0
    tail = g_mean * (w ** (1 - k) / (k - 1) + w ** (-k) / 2
                     + k * w ** (-k - 1) / 12)
    total = acc.value + tail
    if k - spike > 1.0:
        verdict = (f"convergent (heuristic): records grow like n^{spike:.3f}"
                   f" against decay n^-{k}")
    else:
        verdict = (f"inconclusive (heuristic): records grow like"
                   f" n^{spike:.3f}, too close to the decay n^-{k}")
    return PoleSeriesTrace(anchor, k, n_max, np.array(ns, dtype=np.int64),
                           np.array(terms), np.array(partials), max_term,
                           max_term_n, tuple(records), spike, tail, total,
                           verdict)
