import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Poly, embed_element, embed_word
from higherdr.arith import PParams, indices_of_weight
from higherdr.dpcore import (
    DPElement,
    WeightWindow,
    d0_coordinate,
    degeneracy_map,
    dga_differential,
    dp_add_expand,
    dp_mul,
    dp_scale_substitute,
    face_map,
    l_differential,
    normalized_basis,
    tau,
    words,
)
from higherdr.errors import GradeMismatch, IndexOutOfRange

P21 = PParams(2, 1, 1, 3)
P22 = PParams(2, 1, 2, 3)


def small_words(n, grade, w_max=4):
    return st.lists(st.lists(st.integers(0, w_max), min_size=n, max_size=n).map(tuple),
                    min_size=grade, max_size=grade).map(tuple)


def elements(params, grade):
    return st.dictionaries(small_words(params.n, grade), st.integers(-5, 5), max_size=4).map(
        lambda d: DPElement(params, grade, d))


def test_mul_examples():
    x = tau(P21, (1,))
    assert dp_mul(x, x) == tau(P21, (2,))
    y = tau(P21, (2,))
    assert dp_mul(y, y) == 2 * tau(P21, (4,))


def test_add_expand_examples():
    e = dp_add_expand((2,), P21)
    assert e.coefficient([(1,), (1,)]) == 2
    assert e.coefficient([(2,), (0,)]) == 1
    e4 = dp_add_expand((4,), P21)
    assert [e4.coefficient([(v,), (4 - v,)]) for v in range(5)] == [1, 2, 3, 2, 1]


def test_scale_substitute():
    assert dp_scale_substitute(-1, (3,)) == -1
    assert dp_scale_substitute(2, (1, 2), modulus=5) == 3


def test_face_map_examples():
    x = tau(P21, (1,))
    assert face_map(1, 0, x) == DPElement.monomial(P21, [(1,), (0,)])
    assert face_map(1, 2, x) == DPElement.monomial(P21, [(0,), (1,)])
    assert face_map(1, 1, x) == DPElement.monomial(P21, [(1,), (0,)]) + DPElement.monomial(P21, [(0,), (1,)])
    with pytest.raises(IndexOutOfRange):
        face_map(1, 3, x)
    with pytest.raises(GradeMismatch):
        face_map(2, 0, x)


def test_degeneracy_is_counit():
    x = DPElement.monomial(P21, [(2,), (0,)])
    assert degeneracy_map(2, 0, x) == tau(P21, (2,))
    assert degeneracy_map(2, 1, x).is_zero()
    with pytest.raises(IndexOutOfRange):
        degeneracy_map(2, 2, x)


def test_first_differential_example():
    d = dga_differential(1, tau(P21, (4,)))
    assert d == -(2 * DPElement.monomial(P21, [(1,), (3,)]) + 3 * DPElement.monomial(P21, [(2,), (2,)])
                  + 2 * DPElement.monomial(P21, [(3,), (1,)]))


def test_d0_coordinate():
    assert d0_coordinate(1, P22) == tau(P22, (0, 1))


@settings(max_examples=40, deadline=None)
@given(elements(P22, 2))
def test_cosimplicial_identities(x):
    r = 2
    for i in range(r + 2):
        for j in range(i + 1, r + 3):
            assert face_map(r + 1, j, face_map(r, i, x)) == face_map(r + 1, i, face_map(r, j - 1, x))
    for j in range(r + 1):
        for i in range(r + 2):
            lhs = degeneracy_map(r + 1, j, face_map(r, i, x))
            if i < j:
                rhs = face_map(r - 1, i, degeneracy_map(r, j - 1, x))
            elif i in (j, j + 1):
                rhs = x
            else:
                rhs = face_map(r - 1, i - 1, degeneracy_map(r, j, x))
            assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(elements(P22, 2))
def test_differentials_square_to_zero(x):
    assert dga_differential(3, dga_differential(2, x)).is_zero()
    assert l_differential(2, l_differential(1, x)).is_zero()


@settings(max_examples=60, deadline=None)
@given(elements(P22, 1), elements(P22, 1), elements(P22, 1))
def test_product_commutative_associative(a, b, c):
    assert dp_mul(a, b) == dp_mul(b, a)
    assert dp_mul(dp_mul(a, b), c) == dp_mul(a, dp_mul(b, c))


def test_window_truncation():
    x = tau(P21, (3,))
    assert dp_mul(x, x, WeightWindow(5)).is_zero()
    assert not dp_mul(x, x, WeightWindow(6)).is_zero()


def test_normalized_basis_has_no_zero_slot():
    B = normalized_basis(2, WeightWindow(5), 2)
    assert B and all(all(any(V) for V in w) for w in B)
    assert len(set(B)) == len(B)


def test_exact_mode_matches_rational_embedding():
    P = PParams(3, 1, 1, 2)
    for I in range(8):
        x = DPElement.monomial(P, [(I,)], modulus=None)
        d = dga_differential(1, x)
        xs = Poly.var_power(2, 0, 1)
        ys = Poly.var_power(2, 1, 1)
        c = embed_word(((I,),), P.pm, 1).terms[(I,)]
        expected = (xs ** I + ys ** I - (xs + ys) ** I).scale(c)
        assert embed_element(d, P.pm) == expected


def test_words_enumeration_counts():
    for w in range(6):
        assert len(words(1, w, 2)) == len(indices_of_weight(w, 2))
        assert len(words(2, w, 1)) == w + 1
    assert list(itertools.islice(words(2, 2, 1, nonzero=True), 5)) == [((1,), (1,))]
