"""Compensated summation and the fixed-grid reduction scheme.

Sieved values are reduced chunk-by-chunk on a fixed absolute grid: chunk c
covers n in [1 + c*CHUNK, 1 + (c+1)*CHUNK). Per-chunk partial sums depend
only on the data, never on how work was split into blocks or threads, and
the chunk sums are folded left to right through a Neumaier accumulator.
Consequently every reported sum is bit-identical for any block size and any
thread count, which the test suite asserts literally.
"""

from __future__ import annotations

import numpy as np

CHUNK = 4096


class NeumaierSum:
    """Kahan-Babuska compensated accumulator for real floats."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float) -> None:
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


class ComplexNeumaierSum:
    """Componentwise compensated accumulator for complex values."""

    __slots__ = ("re", "im")

    def __init__(self):
        self.re = NeumaierSum()
        self.im = NeumaierSum()

    def add(self, z: complex) -> None:
        self.re.add(z.real)
        self.im.add(z.imag)

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)


def chunk_cuts(lo: int, hi: int) -> np.ndarray:
    """Absolute chunk boundaries strictly inside [lo, hi).

    Positions n such that n > lo, n < hi, and n = 1 mod CHUNK: each marks the
    start of a new chunk of the fixed grid anchored at n = 1.
    """
    first = lo + (1 - lo) % CHUNK
    if first <= lo:
        first += CHUNK
    return np.arange(first, hi, CHUNK, dtype=np.int64)


def piecewise_sums(values: np.ndarray, lo: int, cuts: np.ndarray) -> np.ndarray:
    """Sums of values split at absolute positions `cuts`.

    values[i] corresponds to n = lo + i. cuts must be sorted, inside
    (lo, lo + len(values)). Returns len(cuts) + 1 partial piece sums.
    """
    if len(values) == 0:
        return np.zeros(1, dtype=values.dtype)
    idx = np.concatenate(([0], cuts - lo))
    return np.add.reduceat(values, idx)
