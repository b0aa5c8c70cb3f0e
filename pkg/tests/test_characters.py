"""Character construction, parity, conductor, and group-level counting."""

import math

import numpy as np
import pytest

from modchar.characters import (character_from_label, character_group,
                                conductor, enumerate_characters, eval_char,
                                is_primitive, parity)
from modchar.errors import InvalidModulusError
from modchar.roots import UnitValue


def chi3():
    return character_from_label("3.2")


def test_chi3_value_table():
    chi = chi3()
    assert eval_char(chi, 0).is_zero
    assert eval_char(chi, 1).is_one
    assert eval_char(chi, 2) == UnitValue.minus_one()
    assert eval_char(chi, 3).is_zero
    # period 3
    for n in range(30):
        assert eval_char(chi, n) == eval_char(chi, n + 3)


def test_parity_examples():
    assert parity(chi3()) == -1
    for q in (1, 2, 3, 4, 5, 8, 12):
        assert parity(character_group(q).principal()) == 1
    # the real character mod 5 is even: chi(4) = chi(-1) = +1
    real5 = [c for c in enumerate_characters(5)
             if c.order == 2 and c.is_primitive]
    assert len(real5) == 1
    assert parity(real5[0]) == 1


def test_conductor_examples():
    chi = chi3()
    assert conductor(chi) == 3 and is_primitive(chi)
    # lift chi3 to modulus 9: the exponent doubles because the cyclic
    # component mod 9 has order 6 and restriction divides by 3
    lifted = [c for c in enumerate_characters(9)
              if not c.is_principal and conductor(c) == 3]
    assert lifted, "some character mod 9 must be induced from modulus 3"
    for c in lifted:
        assert not is_primitive(c)
    for q in (4, 6, 9, 10, 12):
        assert conductor(character_group(q).principal()) == 1


def test_character_count_is_totient():
    def phi(q):
        return sum(1 for n in range(1, q + 1) if math.gcd(n, q) == 1)
    for q in range(1, 61):
        assert len(enumerate_characters(q)) == phi(q)


def test_odd_character_count():
    # exactly phi(q)/2 odd characters whenever q > 2
    for q in range(3, 51):
        chars = enumerate_characters(q)
        odd = sum(1 for c in chars if parity(c) == -1)
        assert odd == len(chars) // 2, f"q = {q}"
    for q in (1, 2):
        assert all(parity(c) == 1 for c in enumerate_characters(q))


def test_multiplicativity_exhaustive():
    # chi(mn) = chi(m) chi(n) on residues, checked in exact angle integers
    for q in range(1, 101):
        for chi in enumerate_characters(q):
            scale = max(chi.order, 1)
            t = chi.angle_numerators(scale)
            res = np.arange(q, dtype=np.int64)
            prod = res[:, None] * res[None, :] % q if q > 1 \
                else np.zeros((1, 1), dtype=np.int64)
            lhs = t[prod]
            rhs = (t[:, None] + t[None, :]) % scale
            bad = (t[:, None] < 0) | (t[None, :] < 0)
            assert np.array_equal(lhs < 0, bad)
            assert np.array_equal(lhs[~bad], rhs[~bad])


def test_period_sums_bounded():
    # |sum_{n<=x} chi(n)| <= q for every non-principal chi, q <= 50, x <= 1e4
    x = 10**4
    for q in range(2, 51):
        for chi in enumerate_characters(q):
            if chi.is_principal:
                continue
            scale = chi.order
            t = chi.angle_numerators(scale)
            vals = np.where(t < 0, 0,
                            np.exp(2j * np.pi * t / scale))
            full = vals[np.arange(1, x + 1) % q]
            running = np.cumsum(full)
            assert np.abs(running).max() <= q + 1e-9, chi.label


def test_label_round_trip():
    for q in range(1, 31):
        for chi in enumerate_characters(q):
            assert character_from_label(chi.label) == chi


def test_conjugate_and_order():
    for q in (5, 7, 12, 16):
        for chi in enumerate_characters(q):
            conj = chi.conjugate()
            for n in range(q):
                a, b = eval_char(chi, n), eval_char(conj, n)
                if a.is_zero:
                    assert b.is_zero
                else:
                    assert (a * b).is_one
            assert chi.order == conj.order


def test_bad_labels():
    with pytest.raises(InvalidModulusError):
        character_from_label("6.2")   # 2 not coprime to 6
    with pytest.raises(ValueError):
        character_from_label("nonsense")
