"""The stratification of the m-PD envelope and the horizontality of the
Poincare-lemma augmentation.

Elements here are sparse dicts keyed by tuples of multi-indices, one per
slot.  A slot is either divided-power (``tau``; product uses ``mbinom``) or
an ordinary polynomial variable (``t``; exponents simply add).

In a grade-2 key ``(V, W)`` for the target of ``eps``, ``V`` is the slot of
the module and ``W`` the slot of the ring; on the source side ``(A, I)`` has
the ring slot first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .arith import (
    PParams,
    binom,
    indices_below,
    indices_of_weight,
    madd,
    mbinom_multi,
    msub,
    qbinom,
    reduce_mod,
)
from .dpcore import WeightWindow
from .homology import as_matrix, snf_local

DP, POLY = "dp", "poly"


# -- sparse multi-slot algebra -------------------------------------------------

def _mul(x: dict, y: dict, kinds: Sequence[str], pm: int, q: int | None, w_max: int | None = None) -> dict:
    out: dict = {}
    for kx, cx in x.items():
        for ky, cy in y.items():
            key = tuple(madd(a, b) for a, b in zip(kx, ky))
            if w_max is not None and sum(map(sum, key)) > w_max:
                continue
            c = cx * cy
            for a, s, kind in zip(kx, key, kinds):
                if kind == DP:
                    c *= mbinom_multi(s, a, pm)
            out[key] = out.get(key, 0) + c
    return _clean(out, q)


def _clean(x: dict, q: int | None) -> dict:
    if q is None:
        return {k: c for k, c in x.items() if c}
    out = {}
    for k, c in x.items():
        c = reduce_mod(c, q)
        if c:
            out[k] = c
    return out


def _add(x: dict, y: dict, q: int | None, scale: int = 1) -> dict:
    out = dict(x)
    for k, c in y.items():
        out[k] = out.get(k, 0) + scale * c
    return _clean(out, q)


# -- eps -------------------------------------------------------------------------

def eps_image(params: PParams, I) -> dict:
    """``eps(1 (x) tau^{I}) = sum_V qbinom(I, V) tau^{V} (x) (-tau)^{I-V}``."""
    out = {}
    for V in indices_below(I):
        W = msub(I, V)
        out[(V, W)] = qbinom(I, V, params) * (-1) ** sum(W)
    return out


def eps_apply(params: PParams, A, I, q: int | None = None) -> dict:
    """``eps(tau^{A} (x) tau^{I})``, linear over the ring slot."""
    z = (0,) * params.n
    return _mul({(z, tuple(A)): 1}, eps_image(params, tuple(I)), (DP, DP), params.pm, q)


def eps_inverse_apply(params: PParams, V, B, q: int | None = None) -> dict:
    """``eps^{-1}(tau^{V} (x) tau^{B}) = sum_U qbinom(V, U) tau^{U+B} (x) tau^{V-U}``."""
    z = (0,) * params.n
    img = {(U, msub(V, U)): qbinom(V, U, params) for U in indices_below(V)}
    return _mul({(tuple(B), z): 1}, img, (DP, DP), params.pm, q)


def _pairs(n: int, w: int) -> list[tuple]:
    return [(A, I) for wa in range(w + 1) for A in indices_of_weight(wa, n)
            for I in indices_of_weight(w - wa, n)]


@dataclass
class StratMatrix:
    """``eps`` on the weight-``w`` words, ``w <= window.w_max``; one square block per weight."""

    params: PParams
    window: WeightWindow
    blocks: dict[int, np.ndarray] = field(default_factory=dict)
    bases: dict[int, list] = field(default_factory=dict)

    def matrix(self, w: int) -> np.ndarray:
        return self.blocks[w]


def stratification_eps(params: PParams, window: WeightWindow | int) -> StratMatrix:
    if isinstance(window, int):
        window = WeightWindow(window)
    q = params.modulus
    out = StratMatrix(params, window)
    for w in range(window.w_max + 1):
        basis = _pairs(params.n, w)
        pos = {b: k for k, b in enumerate(basis)}
        M = np.zeros((len(basis), len(basis)), dtype=object)
        for col, (A, I) in enumerate(basis):
            for key, c in eps_apply(params, A, I, q).items():
                M[pos[key], col] += c
        out.bases[w] = basis
        out.blocks[w] = as_matrix(M, q)
    return out


def reduces_to_identity(params: PParams, w_max: int) -> bool:
    """Killing the positive-weight ring slot turns ``eps(1 (x) tau^{I})`` into ``tau^{I} (x) 1``."""
    z = (0,) * params.n
    for w in range(w_max + 1):
        for I in indices_of_weight(w, params.n):
            img = _clean(eps_image(params, I), params.modulus)
            if {k: c for k, c in img.items() if k[1] == z} != {(I, z): 1}:
                return False
    return True


def verify_inverse(params: PParams, w_max: int) -> bool:
    """The closed-form inverse composes to the identity, and each block has unit SNF."""
    q = params.modulus
    eps = stratification_eps(params, w_max)
    for w, basis in eps.bases.items():
        pos = {b: k for k, b in enumerate(basis)}
        Minv = np.zeros((len(basis), len(basis)), dtype=object)
        for col, (V, B) in enumerate(basis):
            for key, c in eps_inverse_apply(params, V, B, q).items():
                Minv[pos[key], col] += c
        Minv = as_matrix(Minv, q)
        prod = (eps.blocks[w].astype(object) @ Minv.astype(object)) % q
        if not np.array_equal(prod, np.eye(len(basis), dtype=object) % q):
            return False
        if any(e != 0 for e in snf_local(eps.blocks[w], params.p, params.N, transforms=False).exponents):
            return False
    return True


# -- cocycle --------------------------------------------------------------------

def _pullback(params: PParams, which: str, key, q) -> dict:
    """Pull ``eps`` back to the two-slot ring: keys ``(V, A, B)`` with the
    module slot ``V`` and ring slots ``A, B``.

    ``which`` names the ring coordinate that replaces the single one:
    ``"12"`` the first ring slot, ``"01"`` the second, ``"02"`` their sum
    (the comultiplication).
    """
    V, A, B = key
    z = (0,) * params.n
    img: dict = {}
    for (U, K), c in eps_image(params, V).items():
        if which == "12":
            terms = {(U, K, z): c}
        elif which == "01":
            terms = {(U, z, K): c}
        else:
            terms = {(U, L, msub(K, L)): c * qbinom(K, L, params) for L in indices_below(K)}
        img = _add(img, terms, q)
    return _mul({(z, A, B): 1}, img, (DP, DP, DP), params.pm, q)


def _apply_linear(params, which, x: dict, q) -> dict:
    out: dict = {}
    for key, c in x.items():
        out = _add(out, _pullback(params, which, key, q), q, c)
    return out


def verify_cocycle(params: PParams, window: WeightWindow | int, report: bool = False):
    """``p02* eps == p01* eps o p12* eps`` on every basis word of the window."""
    w_max = window.w_max if isinstance(window, WeightWindow) else window
    q = params.modulus
    n = params.n
    for w in range(w_max + 1):
        for wv in range(w + 1):
            for V in indices_of_weight(wv, n):
                for A, B in _pairs(n, w - wv):
                    key = (V, A, B)
                    lhs = _pullback(params, "02", key, q)
                    rhs = _apply_linear(params, "01", _pullback(params, "12", key, q), q)
                    if lhs != rhs:
                        if report:
                            return {"ok": False, "basis": _jsonable(key), "lhs": _dump(lhs), "rhs": _dump(rhs)}
                        return False
    return {"ok": True} if report else True


# -- horizontality ---------------------------------------------------------------

def _ordinary_power(params: PParams, k: int, j: int, slot: int, nslots: int) -> dict:
    """``tau_j^k`` (ordinary power) in a divided-power slot: ``floor(k/p^m)! tau_j^{k}``."""
    z = (0,) * params.n
    key = [z] * nslots
    e = [0] * params.n
    e[j] = k
    key[slot] = tuple(e)
    return {tuple(key): math.factorial(k // params.pm)}


def _x_right_power(params: PParams, L, q, w_max) -> dict:
    """``(t - tau_P)^L`` with keys ``(J, V, W)``: t-exponent, module slot, ring slot."""
    n = params.n
    z = (0,) * n
    kinds = (POLY, DP, DP)
    acc = {(z, z, z): 1}
    for j, l in enumerate(L):
        f: dict = {}
        for a in range(l + 1):
            e = [0] * n
            e[j] = l - a
            tau_a = _ordinary_power(params, a, j, 2, 3)
            term = {(tuple(e), z, k[2]): binom(l, a) * (-1) ** a * c for k, c in tau_a.items()}
            f = _add(f, term, q)
        acc = _mul(acc, f, kinds, params.pm, q, w_max)
    return acc


def _iota_right(params: PParams, K, q) -> dict:
    """``iota(e_K) (x) 1``: ``sum_L binom(K, L) (-t)^L tau_M^{K-L}``."""
    z = (0,) * params.n
    return _clean({(L, msub(K, L), z): binom(K, L) * (-1) ** sum(L) for L in indices_below(K)}, q)


def _iota_left(params: PParams, K, q, w_max) -> dict:
    """``eps(1 (x) iota(e_K))``; a ``t`` on the ring side becomes ``t - tau_P``."""
    z = (0,) * params.n
    out: dict = {}
    for L in indices_below(K):
        coeff = binom(K, L) * (-1) ** sum(L)
        e = {(z, U, W): c for (U, W), c in eps_image(params, msub(K, L)).items()}
        term = _mul(_x_right_power(params, L, q, w_max), e, (POLY, DP, DP), params.pm, q, w_max)
        out = _add(out, term, q, coeff)
    return out


def _closed_difference_power(params: PParams, K, slot_a: int, slot_b: int, sign_b: int, q, w_max) -> dict:
    """``(x_a + sign_b * x_b)^K`` (ordinary power) in a three-slot algebra."""
    z = (0,) * params.n
    acc = {(z, z, z): 1}
    kinds = (POLY, DP, DP)
    for j, k in enumerate(K):
        f: dict = {}
        for a in range(k + 1):
            pa = _slot_power(params, a, j, slot_a, kinds)
            pb = _slot_power(params, k - a, j, slot_b, kinds)
            prod = _mul(pa, pb, kinds, params.pm, None)
            f = _add(f, prod, q, math.comb(k, a) * sign_b ** (k - a))
        acc = _mul(acc, f, kinds, params.pm, q, w_max)
    return acc


def _slot_power(params, k, j, slot, kinds) -> dict:
    if kinds[slot] == DP:
        return _ordinary_power(params, k, j, slot, 3)
    z = (0,) * params.n
    e = [0] * params.n
    e[j] = k
    key = [z, z, z]
    key[slot] = tuple(e)
    return {tuple(key): 1}


def verify_horizontality(params: PParams, window: WeightWindow | int, report: bool = False):
    """Both paths around the square agree on ``e_K`` and on the basis
    ``sum_J binom(I, J) t^J e_{I-J}``, and equal the closed forms
    ``(tau_M - t)^K`` and ``(tau_M - tau_P)^I`` respectively."""
    w_max = window.w_max if isinstance(window, WeightWindow) else window
    q = params.modulus
    pm = params.pm
    from .hdr import augmentation_basis

    basis = [K for K in augmentation_basis(params) if sum(K) <= w_max]
    left = {K: _iota_left(params, K, q, w_max) for K in basis}
    right = {K: _iota_right(params, K, q) for K in basis}
    for K in basis:
        closed = _closed_difference_power(params, K, 1, 0, -1, q, w_max)
        if left[K] != right[K] or right[K] != closed:
            if report:
                return {"ok": False, "basis": ["e", list(K)], "left": _dump(left[K]), "right": _dump(right[K])}
            return False
    for I in basis:
        lsum: dict = {}
        rsum: dict = {}
        for J in indices_below(I):
            xr = _x_right_power(params, J, q, w_max)
            c = binom(I, J)
            lsum = _add(lsum, _mul(xr, left[msub(I, J)], (POLY, DP, DP), pm, q, w_max), q, c)
            rsum = _add(rsum, _mul(xr, right[msub(I, J)], (POLY, DP, DP), pm, q, w_max), q, c)
        closed = _closed_difference_power(params, I, 1, 2, -1, q, w_max)
        if lsum != rsum or lsum != closed:
            if report:
                return {"ok": False, "basis": ["new", list(I)], "left": _dump(lsum), "right": _dump(rsum)}
            return False
    return {"ok": True} if report else True


def binomial_cancellation(L: Sequence[int]) -> bool:
    """``sum_J binom(L, J) x^{L-J} (y - x)^J == y^L`` in ``Z[x, y]``."""
    n = len(L)
    lhs: dict = {}
    for J in indices_below(L):
        # (y - x)^J expanded coordinatewise
        parts = [[((j - a, a), math.comb(j, a) * (-1) ** (j - a)) for a in range(j + 1)] for j in J]
        for choice in _product(parts):
            xs = tuple(L[k] - J[k] + choice[k][0][0] for k in range(n))
            ys = tuple(choice[k][0][1] for k in range(n))
            c = binom(L, J) * math.prod(ch[1] for ch in choice)
            lhs[(xs, ys)] = lhs.get((xs, ys), 0) + c
    lhs = {k: c for k, c in lhs.items() if c}
    return lhs == {((0,) * n, tuple(L)): 1}


def _product(parts):
    if not parts:
        yield ()
        return
    for head in parts[0]:
        for rest in _product(parts[1:]):
            yield (head,) + rest


def _jsonable(key):
    return [list(k) for k in key]


def _dump(x: dict) -> list:
    return [[_jsonable(k), int(c)] for k, c in sorted(x.items())]
