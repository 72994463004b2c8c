import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherdr.arith import (
    PParams,
    binom,
    check_unit_lemma,
    indices_of_weight,
    legendre_valuation,
    mbinom,
    qbinom,
    reduce_mod,
    valuation,
)
from higherdr.errors import ComponentOutOfRange, PreconditionViolation


def test_binom_examples():
    assert binom((4,), (2,)) == 6
    assert binom((1, 1), (1, 0)) == 1
    assert binom((0,), (0,)) == 1
    with pytest.raises(ComponentOutOfRange):
        binom((1,), (2,))


def test_mbinom_examples():
    assert mbinom(4, 2, 2) == 2
    assert mbinom(3, 1, 2) == 1
    assert mbinom(5, 5, 4) == 1


def test_qbinom_examples():
    P = PParams(2, 1, 1, 3)
    assert qbinom((4,), (2,), P) == 3
    assert qbinom((3,), (1,), P) == 3
    assert qbinom((2,), (1,), P) == 2
    assert qbinom((4,), (1,), P) == 2
    assert qbinom(6, 3, 3) == 10
    assert qbinom(4, 3, 3) == 4


def test_qbinom_can_be_a_fraction_prime_to_p():
    # binom(7, 3) = 35 while mbinom(7, 3, 3) = 2
    x = qbinom(7, 3, 3)
    assert x == Fraction(35, 2)
    assert reduce_mod(x, 9) * 2 % 9 == 35 % 9


def test_unit_lemma_examples():
    assert check_unit_lemma(4, PParams(2, 1, 1, 1))
    assert check_unit_lemma(6, PParams(3, 1, 1, 1))
    assert check_unit_lemma(4, PParams(3, 1, 1, 1))
    with pytest.raises(PreconditionViolation):
        check_unit_lemma(2, PParams(3, 1, 1, 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 60), st.integers(0, 60), st.sampled_from([1, 2, 3, 4, 5, 8, 9, 25, 27]))
def test_factorisation_and_symmetry(k, k1, pm):
    k, k1 = max(k, k1), min(k, k1)
    q = qbinom(k, k1, pm)
    assert q * mbinom(k, k1, pm) == math.comb(k, k1)
    assert q == qbinom(k, k - k1, pm)
    assert mbinom(k, k1, pm) == mbinom(k, k - k1, pm)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80))
def test_level_zero_degeneracy(k, k1):
    k, k1 = max(k, k1), min(k, k1)
    assert mbinom(k, k1, 1) == math.comb(k, k1)
    assert qbinom(k, k1, 1) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 300), st.sampled_from([2, 3, 5, 7]))
def test_legendre_matches_direct_valuation(k, p):
    assert legendre_valuation(k, p) == valuation(math.factorial(k), p, cap=10 ** 6)


def test_params_bounds_and_override():
    with pytest.raises(PreconditionViolation):
        PParams(4, 1, 1, 1)
    with pytest.raises(PreconditionViolation):
        PParams(101, 0, 1, 1)
    P = PParams.checked(101, 0, 1, 1, bounds={"p": 200})
    assert P.modulus == 101


def test_indices_of_weight_counts():
    for n in (1, 2, 3):
        for w in range(7):
            assert len(indices_of_weight(w, n)) == math.comb(w + n - 1, n - 1)
