"""The free m-PD polynomial algebra and its tensor powers.

An element of ``P(r)`` is a finite linear combination of tensor words
``tau^{V_1} (x) ... (x) tau^{V_r}``; a word is stored as a tuple of ``r``
multi-indices.  Coordinates of the base are evaluated at a point, so the
coefficient ring is ``Z/p^N`` (or the integers, when ``modulus`` is None).

Slot conventions.  The coface ``face_map(r, 0, .)`` appends a unit slot on
the right, ``face_map(r, r + 1, .)`` prepends one on the left, and the inner
coface ``i`` (``1 <= i <= r``) applies the comultiplication
``tau^{I} -> sum_V qbinom(I, V) tau^{V} (x) tau^{I-V}`` to the slot at
0-based position ``r - i``.  The codegeneracy ``degeneracy_map(r, j, .)``
is the counit on the slot at position ``r - 1 - j``.  With these choices the
cosimplicial identities hold and ``d^1(tau^{I}) = -sum_{0<V<I} ...``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Tuple

from .arith import (
    MultiIndex,
    PParams,
    indices_below,
    indices_of_weight,
    madd,
    mbinom_multi,
    msub,
    normalize,
    qbinom,
    reduce_mod,
)
from .errors import GradeMismatch, IndexOutOfRange, PreconditionViolation

Word = Tuple[MultiIndex, ...]

_DEFAULT = object()


@dataclass(frozen=True)
class WeightWindow:
    """Keeps only terms of total weight ``<= w_max``."""

    w_max: int

    def __post_init__(self):
        if self.w_max < 0:
            raise PreconditionViolation("w_max must be non-negative")

    def admits(self, w: int) -> bool:
        return w <= self.w_max


def word_weight(word: Word) -> int:
    return sum(sum(V) for V in word)


def word_key(word: Word):
    """Canonical order: (grade, weight, factor list)."""
    return (len(word), word_weight(word), word)


class DPElement:
    """Immutable sparse element of ``P(r)``."""

    __slots__ = ("params", "grade", "modulus", "_terms")

    def __init__(self, params: PParams, grade: int, terms: Mapping[Word, int] | None = None,
                 modulus=_DEFAULT):
        self.params = params
        self.grade = grade
        self.modulus = params.modulus if modulus is _DEFAULT else modulus
        clean = {}
        for word, c in (terms or {}).items():
            if len(word) != grade or any(len(V) != params.n for V in word):
                raise GradeMismatch(f"word {word} does not have grade {grade} and n={params.n}")
            c = reduce_mod(c, self.modulus) if self.modulus is not None else normalize(c)
            if c:
                clean[tuple(tuple(V) for V in word)] = c
        self._terms = clean

    # -- constructors
    @classmethod
    def zero(cls, params, grade, modulus=_DEFAULT):
        return cls(params, grade, {}, modulus)

    @classmethod
    def one(cls, params, grade=0, modulus=_DEFAULT):
        z = (0,) * params.n
        return cls(params, grade, {(z,) * grade: 1}, modulus)

    @classmethod
    def monomial(cls, params, word: Iterable[Iterable[int]], coeff: int = 1, modulus=_DEFAULT):
        word = tuple(tuple(V) for V in word)
        return cls(params, len(word), {word: coeff}, modulus)

    # -- accessors
    @property
    def terms(self) -> Mapping[Word, int]:
        return MappingProxyType(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: word_key(kv[0]))

    def coefficient(self, word) -> int:
        return self._terms.get(tuple(tuple(V) for V in word), 0)

    def weights(self) -> set[int]:
        return {word_weight(w) for w in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # -- arithmetic
    def _check(self, other: "DPElement"):
        if self.grade != other.grade:
            raise GradeMismatch(f"grades {self.grade} and {other.grade} differ")
        if self.params.n != other.params.n or self.params.pm != other.params.pm:
            raise GradeMismatch("elements live in different algebras")
        if self.modulus != other.modulus:
            raise GradeMismatch("coefficient rings differ")

    def __add__(self, other: "DPElement") -> "DPElement":
        self._check(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0) + c
        return DPElement(self.params, self.grade, out, self.modulus)

    def __neg__(self) -> "DPElement":
        return DPElement(self.params, self.grade, {w: -c for w, c in self._terms.items()}, self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar: int) -> "DPElement":
        return DPElement(self.params, self.grade, {w: scalar * c for w, c in self._terms.items()},
                         self.modulus)

    def __eq__(self, other):
        if not isinstance(other, DPElement):
            return NotImplemented
        return (self.grade == other.grade and self.modulus == other.modulus
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.grade, self.modulus, frozenset(self._terms.items())))

    def reduce(self, modulus: int) -> "DPElement":
        return DPElement(self.params, self.grade, self._terms, modulus)

    def truncate(self, window: WeightWindow | None) -> "DPElement":
        if window is None:
            return self
        return DPElement(self.params, self.grade,
                         {w: c for w, c in self._terms.items() if window.admits(word_weight(w))},
                         self.modulus)

    def __repr__(self):
        if not self._terms:
            return f"DPElement(grade={self.grade}, 0)"
        body = " + ".join(f"{c}*{_fmt_word(w)}" for w, c in self.items())
        return f"DPElement(grade={self.grade}, {body})"


def _fmt_word(word: Word) -> str:
    if not word:
        return "1"
    return "(x)".join("t^" + "".join(map(str, V)) if any(V) else "1" for V in word)


def _accumulate(out: dict, word, c):
    if c:
        out[word] = out.get(word, 0) + c


def tau(params: PParams, I, modulus=_DEFAULT) -> DPElement:
    """The grade-1 basis element ``tau^{I}``."""
    return DPElement.monomial(params, [tuple(I)], 1, modulus)


def d0_coordinate(j: int, params: PParams, modulus=_DEFAULT) -> DPElement:
    """``tau_j = d^0(t_j)``, the defining generator of ``P(1)``."""
    e = [0] * params.n
    e[j] = 1
    return tau(params, e, modulus)


# -- products and expansions ----------------------------------------------

def dp_mul(a: DPElement, b: DPElement, window: WeightWindow | None = None) -> DPElement:
    """Slotwise product using ``tau^{V} tau^{W} = mbinom(V+W, V) tau^{V+W}``."""
    a._check(b)
    pm = a.params.pm
    out: dict = {}
    for wa, ca in a._terms.items():
        for wb, cb in b._terms.items():
            word = tuple(madd(V, W) for V, W in zip(wa, wb))
            if window is not None and not window.admits(word_weight(word)):
                continue
            coeff = ca * cb
            for V, W, S in zip(wa, wb, word):
                coeff *= mbinom_multi(S, V, pm)
            _accumulate(out, word, coeff)
    return DPElement(a.params, a.grade, out, a.modulus)


def dp_scale_substitute(c: int, I, modulus: int | None = None) -> int:
    """Coefficient picked up by ``tau^{I}`` under ``tau -> c*tau``: ``c^{|I|}``."""
    e = sum(I) if not isinstance(I, int) else I
    if modulus is None:
        return c ** e
    return pow(c, e, modulus)


def dp_linear_expand(I, params: PParams, a: int = 1, b: int = 1, modulus=_DEFAULT) -> DPElement:
    """``(a*tau (x) 1 + b*1 (x) tau)^{I}`` in ``P(2)``."""
    I = tuple(I)
    out = {}
    for V in indices_below(I):
        W = msub(I, V)
        c = qbinom(I, V, params) * a ** sum(V) * b ** sum(W)
        _accumulate(out, (V, W), c)
    return DPElement(params, 2, out, modulus)


def dp_add_expand(I, params: PParams, modulus=_DEFAULT) -> DPElement:
    """``(tau (x) 1 + 1 (x) tau)^{I} = sum_V qbinom(I, V) tau^{V} (x) tau^{I-V}``."""
    return dp_linear_expand(I, params, 1, 1, modulus)


# -- cosimplicial structure -------------------------------------------------

def face_map(r: int, i: int, x: DPElement) -> DPElement:
    """Coface ``(d_r^i)^*: P(r) -> P(r+1)``."""
    if x.grade != r:
        raise GradeMismatch(f"expected grade {r}, got {x.grade}")
    if not 0 <= i <= r + 1:
        raise IndexOutOfRange(f"face index {i} not in 0..{r + 1}")
    params = x.params
    zero = (0,) * params.n
    out: dict = {}
    if i == 0:
        for w, c in x._terms.items():
            out[w + (zero,)] = c
    elif i == r + 1:
        for w, c in x._terms.items():
            out[(zero,) + w] = c
    else:
        pos = r - i
        for w, c in x._terms.items():
            I = w[pos]
            for V in indices_below(I):
                new = w[:pos] + (V, msub(I, V)) + w[pos + 1:]
                _accumulate(out, new, c * qbinom(I, V, params))
    return DPElement(params, r + 1, out, x.modulus)


def degeneracy_map(r: int, j: int, x: DPElement) -> DPElement:
    """Codegeneracy ``P(r) -> P(r-1)``: the counit on slot ``r - 1 - j``."""
    if x.grade != r:
        raise GradeMismatch(f"expected grade {r}, got {x.grade}")
    if not 0 <= j <= r - 1:
        raise IndexOutOfRange(f"degeneracy index {j} not in 0..{r - 1}")
    pos = r - 1 - j
    out: dict = {}
    for w, c in x._terms.items():
        if not any(w[pos]):
            _accumulate(out, w[:pos] + w[pos + 1:], c)
    return DPElement(x.params, r - 1, out, x.modulus)


def words(r: int, w: int, n: int, nonzero: bool = False, free_last: bool = False) -> list[Word]:
    """Tensor words of length ``r`` and total weight ``w`` in canonical order.

    With ``nonzero`` every factor must be non-zero; ``free_last`` exempts the
    last factor from that requirement (the linearized variant).
    """
    if r == 0:
        return [()] if w == 0 else []
    out = []
    for split in _compositions(w, r):
        pools = []
        for k, wk in enumerate(split):
            must = nonzero and not (free_last and k == r - 1)
            if must and wk == 0:
                break
            pools.append(indices_of_weight(wk, n))
        else:
            out.extend(itertools.product(*pools))
    out.sort(key=word_key)
    return out


def _compositions(w: int, r: int):
    if r == 1:
        yield (w,)
        return
    for first in range(w + 1):
        for rest in _compositions(w - first, r - 1):
            yield (first,) + rest


def normalized_basis(r: int, window: WeightWindow, n: int) -> list[Word]:
    """Basis of the weight-windowed part of the normalized complex in degree
    ``r``: words with every factor non-zero."""
    out = []
    for w in range(window.w_max + 1):
        out.extend(words(r, w, n, nonzero=True))
    return out


def linearized_normalized_basis(r: int, window: WeightWindow, n: int) -> list[Word]:
    """Words of length ``r + 1`` whose first ``r`` factors are non-zero."""
    out = []
    for w in range(window.w_max + 1):
        out.extend(words(r + 1, w, n, nonzero=True, free_last=True))
    return out


def dga_differential(r: int, x: DPElement) -> DPElement:
    """``d^r = sum_{i=0}^{r+1} (-1)^i (d_r^i)^*``."""
    if x.grade != r:
        raise GradeMismatch(f"expected grade {r}, got {x.grade}")
    out = DPElement.zero(x.params, r + 1, x.modulus)
    for i in range(r + 2):
        f = face_map(r, i, x)
        out = out + f if i % 2 == 0 else out - f
    return out


def l_differential(r: int, x: DPElement) -> DPElement:
    """Differential of the linearized algebra ``LP(r) = P(r+1)``:
    ``sum_{i=1}^{r+2} (-1)^{i+1} (d_{r+1}^i)^*``."""
    if x.grade != r + 1:
        raise GradeMismatch(f"expected grade {r + 1}, got {x.grade}")
    out = DPElement.zero(x.params, r + 2, x.modulus)
    for i in range(1, r + 3):
        f = face_map(r + 1, i, x)
        out = out + f if i % 2 == 1 else out - f
    return out
