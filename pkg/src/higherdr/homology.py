"""Finite free cochain complexes over ``Z/p^N``.

Homology is computed over the local ring itself via a Smith normal form
whose pivot is the entry of least p-adic valuation (row-major tiebreak).
Matrices are dense numpy arrays: ``int64`` while ``p^{2N}`` fits, Python
integers (``dtype=object``) beyond that.
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from .arith import reduce_mod, valuation
from .errors import NotAComplex, NotChainMap, PreconditionViolation

_INT64_SAFE = 2 ** 62


def ring_dtype(q: int):
    return np.int64 if q * q < _INT64_SAFE else object


def as_matrix(M, q: int, shape=None) -> np.ndarray:
    """Reduce ``M`` modulo ``q`` into an array of the ring dtype."""
    A = np.array(M, dtype=object)
    if shape is not None:
        A = A.reshape(shape)
    flat = [reduce_mod(x, q) for x in A.flat]
    return np.array(flat, dtype=ring_dtype(q)).reshape(A.shape)


def identity(k: int, q: int) -> np.ndarray:
    return np.eye(k, dtype=np.int64).astype(ring_dtype(q))


def matmul(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """``A @ B mod q`` without int64 overflow on long inner dimensions."""
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=ring_dtype(q))
    if ring_dtype(q) is object:
        return (A.astype(object) @ B.astype(object)) % q
    # each product is < q^2 < 2^62; accumulate in chunks so sums cannot overflow
    chunk = max(1, _INT64_SAFE // max(1, (q - 1) ** 2) // 2)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, A.shape[1], chunk):
        out = (out + (A[:, s:s + chunk] @ B[s:s + chunk, :]) % q) % q
    return out


# -- Smith normal form -------------------------------------------------------

@dataclass
class SNFResult:
    """``L @ M @ R == diag(p^e)`` modulo ``p^N``.

    ``exponents`` has length ``min(rows, cols)``; an exponent equal to ``N``
    stands for a zero diagonal entry.  ``R_inv`` is the inverse of ``R``.
    """

    exponents: list[int]
    L: np.ndarray | None
    R: np.ndarray | None
    R_inv: np.ndarray | None
    N: int

    @property
    def rank(self) -> int:
        return sum(1 for e in self.exponents if e < self.N)


def snf_local(M, p: int, N: int, transforms: bool = True) -> SNFResult:
    """Smith normal form of ``M`` over ``Z/p^N``."""
    q = p ** N
    A = as_matrix(M, q)
    r, c = A.shape
    L = identity(r, q) if transforms else None
    R = identity(c, q) if transforms else None
    Rinv = identity(c, q) if transforms else None
    exps: list[int] = []
    for t in range(min(r, c)):
        sub = A[t:, t:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            exps.extend([N] * (min(r, c) - t))
            break
        best = None
        for i, j in zip(*nz):  # row-major order from np.nonzero
            v = valuation(int(sub[i, j]), p, N)
            if best is None or v < best[0]:
                best = (v, i + t, j + t)
                if v == 0:
                    break
        v, i, j = best
        if i != t:
            A[[t, i], :] = A[[i, t], :]
            if transforms:
                L[[t, i], :] = L[[i, t], :]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if transforms:
                R[:, [t, j]] = R[:, [j, t]]
                Rinv[[t, j], :] = Rinv[[j, t], :]
        pv = p ** v
        unit = int(A[t, t]) // pv
        uinv = pow(unit, -1, q)
        A[t, :] = (A[t, :] * uinv) % q
        if transforms:
            L[t, :] = (L[t, :] * uinv) % q
        # clear column t below the pivot
        fr = A[t + 1:, t] // pv
        if np.any(fr):
            A[t + 1:, :] = (A[t + 1:, :] - np.outer(fr, A[t, :]) % q) % q
            if transforms:
                L[t + 1:, :] = (L[t + 1:, :] - np.outer(fr, L[t, :]) % q) % q
        # clear row t right of the pivot; only row t changes in A
        fc = A[t, t + 1:] // pv
        if np.any(fc):
            A[t, t + 1:] = 0
            if transforms:
                R[:, t + 1:] = (R[:, t + 1:] - np.outer(R[:, t], fc) % q) % q
                Rinv[t, :] = (Rinv[t, :] + matmul(fc.reshape(1, -1), Rinv[t + 1:, :], q)[0]) % q
        exps.append(v)
    return SNFResult(exps, L, R, Rinv, N)


def in_column_span(M, v, p: int, N: int) -> bool:
    """Whether the vector ``v`` lies in the column span of ``M`` over ``Z/p^N``."""
    q = p ** N
    M = as_matrix(M, q)
    v = as_matrix(np.asarray(v, dtype=object).reshape(-1, 1), q)
    if M.shape[1] == 0:
        return not np.any(v)
    s = snf_local(M, p, N)
    w = matmul(s.L, v, q)[:, 0]
    for k in range(M.shape[0]):
        e = s.exponents[k] if k < len(s.exponents) else N
        if int(w[k]) % (p ** e):
            return False
    return True


def unitriangular_inverse(U: np.ndarray, q: int) -> np.ndarray:
    """Inverse of an upper unitriangular matrix by back-substitution."""
    k = U.shape[0]
    X = identity(k, q)
    for i in range(k - 1, -1, -1):
        for j in range(i + 1, k):
            if U[i, j]:
                X[i, :] = (X[i, :] - int(U[i, j]) * X[j, :]) % q
    return X


# -- complexes ----------------------------------------------------------------

@dataclass
class BasedComplex:
    """A cochain complex of free ``Z/p^N``-modules with chosen bases.

    ``diff[d]`` has rows indexed by ``basis[d + 1]`` and columns by
    ``basis[d]``; missing differentials are zero.
    """

    p: int
    N: int
    basis: dict[int, list]
    diff: dict[int, np.ndarray] = field(default_factory=dict)
    weight_of: Callable[[Hashable], int] | None = None

    def __post_init__(self):
        q = self.modulus
        self.basis = {d: list(b) for d, b in self.basis.items()}
        for d in list(self.diff):
            shape = (len(self.basis.get(d + 1, [])), len(self.basis.get(d, [])))
            self.diff[d] = as_matrix(self.diff[d], q, shape)
            if self.diff[d].shape != shape:
                raise PreconditionViolation(f"diff[{d}] has shape {self.diff[d].shape}, expected {shape}")

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def degrees(self) -> range:
        ds = [d for d, b in self.basis.items()]
        if not ds:
            return range(0)
        return range(min(ds), max(ds) + 1)

    def rank(self, d: int) -> int:
        return len(self.basis.get(d, []))

    def d(self, k: int) -> np.ndarray:
        if k in self.diff:
            return self.diff[k]
        return np.zeros((self.rank(k + 1), self.rank(k)), dtype=ring_dtype(self.modulus))

    def ranks(self) -> dict[int, int]:
        return {d: self.rank(d) for d in self.degrees}

    def check(self):
        q = self.modulus
        for k in self.degrees:
            if np.any(matmul(self.d(k + 1), self.d(k), q)):
                raise NotAComplex(f"d^{k + 1} o d^{k} is not zero mod {q}")

    def weight_blocks(self) -> dict[int, "BasedComplex"] | None:
        """Split into weight components, or None if the differential mixes weights."""
        if self.weight_of is None:
            return None
        wts = {d: [self.weight_of(x) for x in self.basis.get(d, [])] for d in self.degrees}
        for k in self.degrees:
            M = self.d(k)
            rows, cols = np.nonzero(M)
            for i, j in zip(rows, cols):
                if wts[k + 1][i] != wts[k][j]:
                    return None
        keys = sorted({w for ws in wts.values() for w in ws})
        out = {}
        for w in keys:
            idx = {d: [i for i, x in enumerate(wts[d]) if x == w] for d in self.degrees}
            basis = {d: [self.basis[d][i] for i in idx[d]] for d in self.degrees}
            diff = {k: self.d(k)[np.ix_(idx.get(k + 1, []), idx[k])] for k in self.degrees
                    if idx.get(k + 1)}
            out[w] = BasedComplex(self.p, self.N, basis, diff, self.weight_of)
        return out


@dataclass
class ComplexMap:
    """Degreewise matrices ``matrices[d]`` (target basis x source basis)."""

    source: BasedComplex
    target: BasedComplex
    matrices: dict[int, np.ndarray]

    def __post_init__(self):
        q = self.target.modulus
        for d in list(self.matrices):
            shape = (self.target.rank(d), self.source.rank(d))
            self.matrices[d] = as_matrix(self.matrices[d], q, shape)

    def f(self, d: int) -> np.ndarray:
        if d in self.matrices:
            return self.matrices[d]
        return np.zeros((self.target.rank(d), self.source.rank(d)),
                        dtype=ring_dtype(self.target.modulus))

    def check(self):
        q = self.target.modulus
        degs = set(self.source.degrees) | set(self.target.degrees)
        for d in degs:
            lhs = matmul(self.target.d(d), self.f(d), q)
            rhs = matmul(self.f(d + 1), self.source.d(d), q)
            if np.any((lhs - rhs) % q):
                raise NotChainMap(f"map does not commute with differentials in degree {d}")


# -- homology -----------------------------------------------------------------

@dataclass(frozen=True)
class DegreeHomology:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


@dataclass
class HomologySummary:
    N: int
    degrees: dict[int, DegreeHomology]

    def is_zero(self) -> bool:
        return all(h.is_zero() for h in self.degrees.values())

    def __getitem__(self, d: int) -> DegreeHomology:
        return self.degrees.get(d, DegreeHomology(0))

    def as_dict(self) -> dict:
        return {str(d): {"free_rank": h.free_rank, "torsion": list(h.torsion)}
                for d, h in sorted(self.degrees.items())}

    @staticmethod
    def merge(N: int, parts: Sequence["HomologySummary"]) -> "HomologySummary":
        free: dict[int, int] = defaultdict(int)
        tors: dict[int, list] = defaultdict(list)
        for part in parts:
            for d, h in part.degrees.items():
                free[d] += h.free_rank
                tors[d].extend(h.torsion)
        degs = sorted(set(free) | set(tors))
        return HomologySummary(N, {d: DegreeHomology(free[d], tuple(sorted(tors[d]))) for d in degs})


def _homology_at(C: BasedComplex, k: int) -> DegreeHomology:
    p, N, q = C.p, C.N, C.modulus
    c = C.rank(k)
    if c == 0:
        return DegreeHomology(0)
    s = snf_local(C.d(k), p, N)
    E = list(s.exponents) + [N] * (c - len(s.exponents))
    keep = [i for i in range(c) if E[i] > 0]
    if not keep:
        return DegreeHomology(0)
    Y = matmul(s.R_inv, C.d(k - 1), q)
    rows = []
    for i in keep:
        shift = p ** (N - E[i])
        row = [int(x) for x in Y[i, :]]
        if any(x % shift for x in row):
            raise NotAComplex(f"image of d^{k - 1} is not inside ker d^{k}")
        rows.append([x // shift for x in row])
    ncols = C.rank(k - 1)
    pres = np.zeros((len(keep), ncols + len(keep)), dtype=object)
    for a, i in enumerate(keep):
        pres[a, :ncols] = rows[a]
        pres[a, ncols + a] = p ** E[i] % q
    f = snf_local(pres, p, N, transforms=False).exponents
    return DegreeHomology(sum(1 for e in f if e == N), tuple(sorted(e for e in f if 0 < e < N)))


def _homology_block(C: BasedComplex) -> HomologySummary:
    return HomologySummary(C.N, {k: _homology_at(C, k) for k in C.degrees})


def homology(C: BasedComplex, threads: int | None = None, check: bool = True) -> HomologySummary:
    """Per-degree homology; weight blocks are processed independently."""
    if check:
        C.check()
    blocks = C.weight_blocks()
    if not blocks:
        return _homology_block(C)
    keys = sorted(blocks)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda w: _homology_block(blocks[w]), keys))
    else:
        parts = [_homology_block(blocks[w]) for w in keys]
    out = HomologySummary.merge(C.N, parts)
    for d in C.degrees:
        out.degrees.setdefault(d, DegreeHomology(0))
    return out


def mapping_cone(f: ComplexMap) -> BasedComplex:
    """``C^k = A^{k+1} (+) B^k`` with ``d(a, b) = (-d_A a, f a + d_B b)``."""
    A, B = f.source, f.target
    q = B.modulus
    spans = [(A.degrees.start - 1, A.degrees.stop - 2)] if len(A.degrees) else []
    spans += [(B.degrees.start, B.degrees.stop - 1)] if len(B.degrees) else []
    lo = min(a for a, _ in spans)
    hi = max(b for _, b in spans)
    basis, diff = {}, {}
    for k in range(lo, hi + 1):
        basis[k] = [("src", x) for x in A.basis.get(k + 1, [])] + [("tgt", y) for y in B.basis.get(k, [])]
    for k in range(lo, hi):
        a0, b0 = A.rank(k + 1), B.rank(k)
        a1, b1 = A.rank(k + 2), B.rank(k + 1)
        M = np.zeros((a1 + b1, a0 + b0), dtype=ring_dtype(q))
        if a1 and a0:
            M[:a1, :a0] = (-A.d(k + 1)) % q
        if b1 and a0:
            M[a1:, :a0] = f.f(k + 1)
        if b1 and b0:
            M[a1:, a0:] = B.d(k)
        diff[k] = M
    wf = None
    if A.weight_of is not None and B.weight_of is not None:
        wa, wb = A.weight_of, B.weight_of
        wf = lambda lab: wa(lab[1]) if lab[0] == "src" else wb(lab[1])  # noqa: E731
    return BasedComplex(B.p, B.N, basis, diff, wf)


def is_quasi_iso(f: ComplexMap, threads: int | None = None) -> tuple[bool, HomologySummary]:
    f.check()
    summary = homology(mapping_cone(f), threads=threads)
    return summary.is_zero(), summary


def identity_map(C: BasedComplex) -> ComplexMap:
    return ComplexMap(C, C, {d: identity(C.rank(d), C.modulus) for d in C.degrees})


def base_change(C: BasedComplex, N2: int) -> BasedComplex:
    """Reduce all differentials modulo ``p^{N2}``."""
    if not 1 <= N2 <= C.N:
        raise PreconditionViolation(f"N'={N2} must satisfy 1 <= N' <= {C.N}")
    q2 = C.p ** N2
    return BasedComplex(C.p, N2, C.basis, {k: np.asarray(M, dtype=object) % q2 for k, M in C.diff.items()},
                        C.weight_of)


def tensor_complex(A: BasedComplex, B: BasedComplex) -> BasedComplex:
    """``A (x) B`` with ``d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy``.

    Basis of degree ``k``: pairs ``(x, y)`` ordered by the degree of ``x``,
    then ``x``, then ``y``.
    """
    if (A.p, A.N) != (B.p, B.N):
        raise PreconditionViolation("tensor factors over different rings")
    q = A.modulus
    lo = A.degrees.start + B.degrees.start
    hi = A.degrees.stop + B.degrees.stop - 2
    basis: dict[int, list] = {}
    pos: dict[int, dict] = {}
    for k in range(lo, hi + 1):
        labs = []
        for i in A.degrees:
            j = k - i
            for x in A.basis.get(i, []):
                for y in B.basis.get(j, []):
                    labs.append((i, x, y))
        basis[k] = labs
        pos[k] = {lab: t for t, lab in enumerate(labs)}
    Aidx = {d: {x: t for t, x in enumerate(A.basis.get(d, []))} for d in A.degrees}
    Bidx = {d: {y: t for t, y in enumerate(B.basis.get(d, []))} for d in B.degrees}
    diff = {}
    for k in range(lo, hi):
        M = np.zeros((len(basis[k + 1]), len(basis[k])), dtype=object)
        for col, (i, x, y) in enumerate(basis[k]):
            j = k - i
            dA = A.d(i)
            xi = Aidx[i][x]
            for r, x2 in enumerate(A.basis.get(i + 1, [])):
                c = int(dA[r, xi])
                if c:
                    M[pos[k + 1][(i + 1, x2, y)], col] += c
            dB = B.d(j)
            yi = Bidx[j][y]
            sign = -1 if i % 2 else 1
            for r, y2 in enumerate(B.basis.get(j + 1, [])):
                c = int(dB[r, yi])
                if c:
                    M[pos[k + 1][(i, x, y2)], col] += sign * c
        diff[k] = M % q
    wf = None
    if A.weight_of is not None and B.weight_of is not None:
        wa, wb = A.weight_of, B.weight_of
        wf = lambda lab: wa(lab[1]) + wb(lab[2])  # noqa: E731
    return BasedComplex(A.p, A.N, basis, diff, wf)


def direct_sum(parts: Sequence[BasedComplex]) -> BasedComplex:
    """Block sum; labels are taken as given and must be distinct."""
    if not parts:
        raise PreconditionViolation("empty direct sum")
    p, N = parts[0].p, parts[0].N
    q = p ** N
    degs = sorted({d for C in parts for d in C.degrees})
    basis = {d: [x for C in parts for x in C.basis.get(d, [])] for d in degs}
    diff = {}
    for k in degs:
        M = np.zeros((len(basis.get(k + 1, [])), len(basis[k])), dtype=ring_dtype(q))
        r0 = c0 = 0
        for C in parts:
            r, c = C.rank(k + 1), C.rank(k)
            if r and c:
                M[r0:r0 + r, c0:c0 + c] = C.d(k)
            r0, c0 = r0 + r, c0 + c
        diff[k] = M
    return BasedComplex(p, N, basis, diff, parts[0].weight_of)
