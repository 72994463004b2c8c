import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import Poly, dp_embed
from higherdr.arith import PParams, indices_below, indices_of_weight, msub, qbinom, reduce_mod
from higherdr.strat import (
    binomial_cancellation,
    eps_apply,
    eps_image,
    reduces_to_identity,
    stratification_eps,
    verify_cocycle,
    verify_horizontality,
    verify_inverse,
)

GRID = [PParams(p, m, n, 3) for p in (2, 3) for m in (0, 1) for n in (1, 2)]


def test_eps_examples():
    P = PParams(2, 1, 1, 2)
    assert eps_image(P, (0,)) == {((0,), (0,)): 1}
    assert eps_image(P, (1,)) == {((0,), (1,)): -1, ((1,), (0,)): 1}
    assert eps_image(P, (2,)) == {((0,), (2,)): 1, ((1,), (1,)): -2, ((2,), (0,)): 1}


@pytest.mark.parametrize("P", [PParams(2, 1, 2, 1), PParams(3, 1, 1, 1), PParams(2, 2, 1, 1)], ids=str)
def test_eps_matches_rational_difference_power(P):
    # eps(1 (x) tau^{I}) embeds as (x - y)^I / floor(I / p^m)!, x the module slot
    n = P.n
    for w in range(9):
        for I in indices_of_weight(w, n):
            got = Poly(2 * n)
            for (V, W), c in eps_image(P, I).items():
                scale = c
                for k in V + W:
                    scale *= dp_embed(k, P.pm)
                got = got + Poly(2 * n, {V + W: scale})
            want = Poly.const(2 * n, 1)
            for j in range(n):
                want = want * (Poly.var_power(2 * n, j, 1) - Poly.var_power(2 * n, n + j, 1)) ** I[j]
                want = want.scale(dp_embed(I[j], P.pm))
            assert got == want


def test_eps_is_weight_preserving_and_invertible():
    P = PParams(3, 1, 2, 2)
    S = stratification_eps(P, 5)
    for w, basis in S.bases.items():
        assert S.matrix(w).shape == (len(basis), len(basis))
        for col, (A, I) in enumerate(basis):
            for key in eps_apply(P, A, I, P.modulus):
                assert sum(map(sum, key)) == w
    assert verify_inverse(P, 5)


def _signed_inverse(P, V, B, q, sign_on_first):
    """The inverse with a sign ``(-1)^{|U|}`` (or on the other slot) attached."""
    out = {}
    for U in indices_below(V):
        s = (-1) ** sum(U if sign_on_first else msub(V, U))
        c = s * qbinom(V, U, P)
        out[(tuple(a + b for a, b in zip(U, B)), msub(V, U))] = c
    return out


@pytest.mark.parametrize("sign_on_first", [True, False])
def test_signed_inverse_is_not_an_inverse(sign_on_first):
    # the unsigned inverse works; attaching a sign to either slot breaks it
    P = PParams(3, 1, 1, 2)
    q = P.modulus
    S = stratification_eps(P, 4)
    broken = False
    for w, basis in S.bases.items():
        pos = {b: k for k, b in enumerate(basis)}
        M = np.zeros((len(basis),) * 2, dtype=object)
        for col, (V, B) in enumerate(basis):
            for key, c in _signed_inverse(P, V, B, q, sign_on_first).items():
                if key in pos:
                    M[pos[key], col] += reduce_mod(c, q)
        prod = (S.matrix(w).astype(object) @ M) % q
        broken |= not np.array_equal(prod, np.eye(len(basis), dtype=object))
    assert broken
    assert verify_inverse(P, 4)


@pytest.mark.parametrize("P", GRID, ids=str)
def test_stratification_axioms(P):
    assert reduces_to_identity(P, 6)
    assert verify_cocycle(P, 6)


@pytest.mark.parametrize("P", GRID, ids=str)
def test_horizontality(P):
    assert verify_horizontality(P, 6)


def test_reports_are_structured():
    P = PParams(2, 1, 1, 2)
    assert verify_cocycle(P, 4, report=True) == {"ok": True}
    assert verify_horizontality(P, 4, report=True) == {"ok": True}


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=3))
def test_binomial_cancellation(L):
    assert binomial_cancellation(L)
