"""Higher de Rham complexes in coordinates.

A basis element of the linearized complex is a pair ``(I, S)`` standing for
``tau^{I} (x) tau-bar_{S}``: ``I`` is a multi-index, ``S`` a sorted tuple of
0-based coordinates, and ``tau-bar_j`` is the class of ``tau^{p^m 1_j}``.
Its weight is ``|I| + |S| p^m``.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .arith import (
    MultiIndex,
    PParams,
    binom,
    box_indices,
    indices_below,
    indices_of_weight,
    msub,
    qbinom,
    reduce_mod,
    unit,
)
from .dpcore import (
    DPElement,
    dga_differential,
    l_differential,
    tau,
    words,
)
from .errors import ParamMismatch, PreconditionViolation
from .homology import (
    BasedComplex,
    ComplexMap,
    as_matrix,
    direct_sum,
    identity,
    in_column_span,
    matmul,
    snf_local,
    tensor_complex,
    unitriangular_inverse,
)

HdrForm = tuple  # (I, S)


def form_weight(params: PParams, form: HdrForm) -> int:
    I, S = form
    return sum(I) + len(S) * params.pm


def wedge_insert(j: int, S: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """``tau-bar_j ^ tau-bar_S`` as ``(sign, S')``, or None if ``j`` is in ``S``."""
    if j in S:
        return None
    before = sum(1 for s in S if s < j)
    return (-1) ** before, tuple(sorted(S + (j,)))


def sort_wedge(js: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sign of the permutation sorting ``js``, or None on a repeat."""
    if len(set(js)) != len(js):
        return None
    inv = sum(1 for a, b in itertools.combinations(js, 2) if a > b)
    return (-1) ** inv, tuple(sorted(js))


# -- the complexes ------------------------------------------------------------

def build_hdr(params: PParams) -> BasedComplex:
    """The complex of level-m forms: an exterior algebra with zero differential."""
    n = params.n
    basis = {r: [S for S in itertools.combinations(range(n), r)] for r in range(n + 1)}
    return BasedComplex(params.p, params.N, basis, {}, lambda S: len(S) * params.pm)


def lhdr_basis(params: PParams, r: int, w: int) -> list[HdrForm]:
    rest = w - r * params.pm
    if rest < 0:
        return []
    return [(I, S) for S in itertools.combinations(range(params.n), r)
            for I in indices_of_weight(rest, params.n)]


def lhdr_d(params: PParams, form: HdrForm) -> dict[HdrForm, int]:
    """``d(tau^{I} (x) w) = sum_j qbinom(i_j, p^m) tau^{I - p^m 1_j} (x) tau-bar_j ^ w``."""
    I, S = form
    pm = params.pm
    out: dict = {}
    for j in range(params.n):
        if I[j] < pm:
            continue
        ins = wedge_insert(j, S)
        if ins is None:
            continue
        sign, S2 = ins
        key = (msub(I, unit(j, params.n, pm)), S2)
        out[key] = out.get(key, 0) + sign * qbinom(I[j], pm, pm)
    return out


def build_lhdr(params: PParams, w: int) -> BasedComplex:
    """The weight-``w`` component of the linearized higher de Rham complex."""
    if w < 0:
        raise PreconditionViolation("weight must be non-negative")
    n = params.n
    basis = {r: lhdr_basis(params, r, w) for r in range(n + 1)}
    diff = {}
    for r in range(n):
        pos = {f: k for k, f in enumerate(basis[r + 1])}
        M = np.zeros((len(basis[r + 1]), len(basis[r])), dtype=object)
        for col, f in enumerate(basis[r]):
            for g, c in lhdr_d(params, f).items():
                M[pos[g], col] += c
        diff[r] = M
    return BasedComplex(params.p, params.N, basis, diff, lambda f: form_weight(params, f))


def build_lhdr_window(params: PParams, w_max: int) -> BasedComplex:
    """Direct sum of the weight components ``0..w_max``."""
    return direct_sum([build_lhdr(params, w) for w in range(w_max + 1)])


# -- the Poincare lemma maps ---------------------------------------------------

def augmentation_basis(params: PParams) -> list[MultiIndex]:
    """Multi-indices with every entry ``< p^m``, in (weight, lex) order."""
    return box_indices(params.pm, params.n)


def augmentation_complex(params: PParams, weights: Sequence[int] | None = None) -> BasedComplex:
    basis = [I for I in augmentation_basis(params) if weights is None or sum(I) in weights]
    wf = (lambda I: sum(I)) if weights is not None else None
    return BasedComplex(params.p, params.N, {0: basis}, {}, wf)


def iota_prime(params: PParams, w_max: int) -> ComplexMap:
    """``e_I -> tau^{I}`` into the window of weights ``<= w_max``."""
    src = augmentation_complex(params, range(w_max + 1))
    tgt = build_lhdr_window(params, w_max)
    pos = {f: k for k, f in enumerate(tgt.basis[0])}
    M = np.zeros((tgt.rank(0), src.rank(0)), dtype=object)
    for col, I in enumerate(src.basis[0]):
        M[pos[(I, ())], col] = 1
    return ComplexMap(src, tgt, {0: M})


def augmented_lhdr(params: PParams, w: int) -> BasedComplex:
    """``0 -> (+)_{I in B, |I| = w} R -> LHDR^0_w -> ... -> LHDR^n_w -> 0``,
    with the augmentation placed in degree -1."""
    C = build_lhdr(params, w)
    aug = [I for I in augmentation_basis(params) if sum(I) == w]
    basis = {-1: [("e", I) for I in aug]}
    basis.update(C.basis)
    diff = dict(C.diff)
    pos = {f: k for k, f in enumerate(C.basis[0])}
    M = np.zeros((C.rank(0), len(aug)), dtype=object)
    for col, I in enumerate(aug):
        M[pos[(I, ())], col] = 1
    diff[-1] = M
    return BasedComplex(params.p, params.N, basis, diff)


def _eval_point(params: PParams, a) -> tuple[int, ...]:
    a = tuple(int(x) % params.modulus for x in a)
    if len(a) != params.n:
        raise PreconditionViolation(f"evaluation point needs {params.n} coordinates")
    return a


def beta(params: PParams, a) -> np.ndarray:
    """Matrix of ``e_I -> sum_J binom(I, J) a^J e_{I-J}`` on the augmentation basis."""
    a = _eval_point(params, a)
    q = params.modulus
    B = augmentation_basis(params)
    pos = {I: k for k, I in enumerate(B)}
    M = np.zeros((len(B), len(B)), dtype=object)
    for col, I in enumerate(B):
        for J in indices_below(I):
            c = binom(I, J) * math.prod(pow(x, j, q) for x, j in zip(a, J))
            M[pos[msub(I, J)], col] += c
    return as_matrix(M, q)


def beta_inverse(params: PParams, a) -> np.ndarray:
    return unitriangular_inverse(beta(params, a), params.modulus)


def iota(params: PParams, a, w_max: int | None = None) -> ComplexMap:
    """``iota' o beta^{-1}``; not weight-homogeneous, so the target is the
    whole window up to ``w_max`` (at least the top weight of the basis)."""
    top = params.n * (params.pm - 1)
    W = top if w_max is None else max(top, w_max)
    Binv = beta_inverse(params, a)
    src = augmentation_complex(params)
    tgt = build_lhdr_window(params, W)
    tgt.weight_of = None
    pos = {f: k for k, f in enumerate(tgt.basis[0])}
    E = np.zeros((tgt.rank(0), src.rank(0)), dtype=object)
    for col, I in enumerate(src.basis[0]):
        E[pos[(I, ())], col] = 1
    return ComplexMap(src, tgt, {0: matmul(as_matrix(E, params.modulus), Binv, params.modulus)})


# -- Kunneth -------------------------------------------------------------------

def kunneth_iso(px: PParams, py: PParams, w: int) -> ComplexMap:
    """``LHDR_X (x) LHDR_Y -> LHDR_{X x Y}`` in weight ``w``:
    ``(tau^{I} (x) w) (x) (tau^{I'} (x) w') -> tau^{(I, I')} (x) (w ^ w')``."""
    if (px.p, px.m, px.N) != (py.p, py.m, py.N):
        raise ParamMismatch("Kunneth factors need equal p, m and N")
    pz = px.with_(n=px.n + py.n)
    parts = [tensor_complex(build_lhdr(px, w1), build_lhdr(py, w - w1)) for w1 in range(w + 1)]
    src = direct_sum(parts)
    tgt = build_lhdr(pz, w)
    mats = {}
    for r in tgt.degrees:
        pos = {f: k for k, f in enumerate(tgt.basis[r])}
        M = np.zeros((tgt.rank(r), src.rank(r)), dtype=object)
        for col, (_, (I, S), (I2, S2)) in enumerate(src.basis.get(r, [])):
            key = (tuple(I) + tuple(I2), tuple(S) + tuple(s + px.n for s in S2))
            M[pos[key], col] = 1
        mats[r] = M
    return ComplexMap(src, tgt, mats)


# -- cross-check against the quotient of the normalized cosimplicial complex -----

def _is_good(V: MultiIndex, pm: int) -> int | None:
    """The coordinate ``j`` if ``V = p^m 1_j``, else None."""
    nz = [k for k, v in enumerate(V) if v]
    if len(nz) == 1 and V[nz[0]] == pm:
        return nz[0]
    return None


def project_form(params: PParams, word) -> tuple[int, tuple[int, ...]] | None:
    """Normal form of a word ``tau-bar_{j_1} (x) ... (x) tau-bar_{j_r}`` in the exterior basis."""
    js = []
    for V in word:
        j = _is_good(V, params.pm)
        if j is None:
            return None
        js.append(j)
    return sort_wedge(js)


def _elem_to_vec(x: DPElement, pos: dict) -> list[int]:
    v = [0] * len(pos)
    for word, c in x.terms.items():
        v[pos[word]] += c
    return v


_WORD_LIMIT = 20000


def crosscheck_report(params: PParams, w: int) -> dict:
    """Quotient of the normalized complex by the ideal generated by the bad
    ``tau^{I}`` in degrees ``r <= 2`` and weight ``w``, compared with the forms."""
    p, N, q, pm, n = params.p, params.N, params.modulus, params.pm, params.n
    report: dict = {"w": w, "degrees": {}}
    ok = True
    for r in (1, 2):
        basis = words(r, w, n, nonzero=True)
        if len(basis) > _WORD_LIMIT:
            raise PreconditionViolation(f"weight {w} too large for the quotient cross-check")
        pos = {b: k for k, b in enumerate(basis)}
        gens = [b for b in basis if any(_is_good(V, pm) is None for V in b)]
        cols = [[1 if k == pos[g] else 0 for k in range(len(basis))] for g in gens]
        if r == 2:
            for J in indices_of_weight(w, n):
                if _is_good(J, pm) is None and any(J):
                    cols.append(_elem_to_vec(dga_differential(1, tau(params, J)), pos))
        expected = math.comb(n, r) if w == r * pm else 0
        if basis:
            G = np.array(cols, dtype=object).T.reshape(len(basis), len(cols)) if cols else \
                np.zeros((len(basis), 0), dtype=object)
            ex = snf_local(G, p, N, transforms=False).exponents if cols else []
            ex = list(ex) + [N] * (len(basis) - len(ex))
            free = sum(1 for e in ex if e == N)
            torsion = sorted(e for e in ex if 0 < e < N)
        else:
            free, torsion = 0, []
        # the projection to the exterior basis must kill every generator
        kills = True
        for col in cols:
            acc: dict = {}
            for k, c in enumerate(col):
                if c:
                    pr = project_form(params, basis[k])
                    if pr is not None:
                        acc[pr[1]] = (acc.get(pr[1], 0) + pr[0] * c) % q
            if any(acc.values()):
                kills = False
                break
        deg_ok = free == expected and not torsion and kills
        report["degrees"][r] = {"quotient_free_rank": free, "torsion": torsion,
                                "expected_rank": expected, "projection_kills_ideal": kills,
                                "ok": deg_ok}
        ok &= deg_ok
    # induced differential from degree 1 to 2 vanishes on the forms
    dzero = True
    for j in range(n):
        if w == pm:
            x = dga_differential(1, tau(params, unit(j, n, pm)))
            if any(project_form(params, word) is not None and c % q for word, c in x.terms.items()):
                dzero = False
    report["induced_differential_zero"] = dzero
    ok &= dzero
    if w == 2 * pm:
        rel = _relations_in_ideal(params)
        report["relations"] = rel
        ok &= all(rel.values())
    report["ok"] = bool(ok)
    return report


def _relations_in_ideal(params: PParams) -> dict:
    """``tau-bar_i (x) tau-bar_i`` and ``tau-bar_i (x) tau-bar_j + tau-bar_j (x) tau-bar_i``
    lie in the ideal, and ``qbinom(2p^m, p^m)`` is a unit."""
    p, N, pm, n = params.p, params.N, params.pm, params.n
    w = 2 * pm
    basis = words(2, w, n, nonzero=True)
    pos = {b: k for k, b in enumerate(basis)}
    cols = [[1 if k == pos[b] else 0 for k in range(len(basis))]
            for b in basis if any(_is_good(V, pm) is None for V in b)]
    for J in indices_of_weight(w, n):
        if _is_good(J, pm) is None:
            cols.append(_elem_to_vec(dga_differential(1, tau(params, J)), pos))
    G = np.array(cols, dtype=object).T.reshape(len(basis), len(cols))
    out = {"square_coefficient_unit": qbinom(w, pm, pm) % p != 0}
    sq = True
    anti = True
    for i in range(n):
        v = [0] * len(basis)
        v[pos[(unit(i, n, pm), unit(i, n, pm))]] = 1
        sq &= in_column_span(G, v, p, N)
        for j in range(i + 1, n):
            v = [0] * len(basis)
            v[pos[(unit(i, n, pm), unit(j, n, pm))]] += 1
            v[pos[(unit(j, n, pm), unit(i, n, pm))]] += 1
            anti &= in_column_span(G, v, p, N)
    out["squares_vanish"] = sq
    out["anticommutativity"] = anti
    return out


def crosscheck_quotient(params: PParams, w: int) -> bool:
    return crosscheck_report(params, w)["ok"]


def project_linearized(params: PParams, word) -> tuple[int, HdrForm] | None:
    """``tau-bar_{j_1} (x) ... (x) tau-bar_{j_r} (x) tau^{I}`` to
    ``tau^{I} (x) tau-bar_{j_r} ^ ... ^ tau-bar_{j_1}`` in the basis ``(I, S)``."""
    pr = project_form(params, tuple(reversed(word[:-1])))
    if pr is None:
        return None
    return pr[0], (tuple(word[-1]), pr[1])


def crosscheck_linearized(params: PParams, w: int) -> bool:
    """The linearized differential, taken modulo forms with a bad slot,
    agrees with the closed formula of :func:`lhdr_d` in degrees 0 and 1."""
    q = params.modulus
    for r in range(min(2, params.n + 1)):
        for word in words(r + 1, w, params.n, nonzero=True, free_last=True):
            x = DPElement.monomial(params, word)
            lhs: dict = {}
            for w2, c in l_differential(r, x).terms.items():
                pr = project_linearized(params, w2)
                if pr is not None:
                    lhs[pr[1]] = (lhs.get(pr[1], 0) + pr[0] * c) % q
            rhs: dict = {}
            src = project_linearized(params, word)
            if src is not None:
                for f, c in lhdr_d(params, src[1]).items():
                    rhs[f] = reduce_mod(rhs.get(f, 0) + src[0] * c, q)
            lhs = {k: v for k, v in lhs.items() if v}
            rhs = {k: v for k, v in rhs.items() if v}
            if lhs != rhs:
                return False
    return True
