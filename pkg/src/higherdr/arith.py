"""Binomial combinatorics for divided powers of level m.

Three coefficient families are used throughout:

* ``binom(I, J)``   -- the ordinary multinomial-style binomial, componentwise;
* ``mbinom(k, k', p^m)`` -- ``q! / (q'! q''!)`` with ``q = floor(k / p^m)`` etc.;
* ``qbinom(I, J)``  -- ``binom / mbinom``, the structure constant of
  ``(x + y)^{I}`` in the divided-power basis.

``qbinom`` is p-integral but not always an integer (``qbinom(7, 3)`` at
``p^m = 3`` is ``35/2``); non-integral values are returned as exact
fractions whose denominator is prime to ``p``, and :func:`reduce_mod` maps
them into ``Z/p^N``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

from .errors import ComponentOutOfRange, DivisibilityViolation, PreconditionViolation

MultiIndex = Tuple[int, ...]

# default parameter bounds; raise them with ``PParams.checked(..., bounds=...)``
DEFAULT_BOUNDS = {"p": 97, "m": 4, "n": 4, "N": 16}


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


@dataclass(frozen=True, order=True)
class PParams:
    """Global configuration: prime ``p``, level ``m``, ``n`` coordinates and
    coefficients in ``Z/p^N``."""

    p: int
    m: int
    n: int
    N: int

    def __post_init__(self):
        self.validate()

    def validate(self, bounds=None):
        b = dict(DEFAULT_BOUNDS)
        if bounds:
            b.update(bounds)
        if not is_prime(self.p):
            raise PreconditionViolation(f"p={self.p} is not prime")
        if self.m < 0 or self.n < 1 or self.N < 1:
            raise PreconditionViolation(f"invalid parameters {self}")
        for key in ("p", "m", "n", "N"):
            if getattr(self, key) > b[key]:
                raise PreconditionViolation(
                    f"{key}={getattr(self, key)} exceeds configured bound {b[key]}"
                )

    @classmethod
    def checked(cls, p, m, n, N, bounds=None) -> "PParams":
        # bypass the default-bound check in __post_init__ when wider bounds are given
        obj = object.__new__(cls)
        for key, val in zip("p m n N".split(), (p, m, n, N)):
            object.__setattr__(obj, key, int(val))
        obj.validate(bounds)
        return obj

    @property
    def pm(self) -> int:
        return self.p ** self.m

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def with_(self, **changes) -> "PParams":
        fields = self.as_dict()
        fields.update(changes)
        return PParams.checked(**fields, bounds={k: max(v, fields[k]) for k, v in DEFAULT_BOUNDS.items()})

    def as_dict(self) -> dict:
        return {"p": self.p, "m": self.m, "n": self.n, "N": self.N}


# -- factorials -----------------------------------------------------------

_FACTORIALS = [1]


def factorial(k: int) -> int:
    """Memoized factorial; the table grows on demand."""
    if k < 0:
        raise PreconditionViolation("factorial of a negative number")
    table = _FACTORIALS
    while len(table) <= k:
        table.append(table[-1] * len(table))
    return table[k]


def legendre_valuation(k: int, p: int) -> int:
    """``v_p(k!)`` by Legendre's formula."""
    v, q = 0, k
    while q:
        q //= p
        v += q
    return v


def valuation(x: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero."""
    if x == 0:
        if cap is None:
            raise PreconditionViolation("valuation of zero without a cap")
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


# -- multi-indices --------------------------------------------------------

def weight(I: Sequence[int]) -> int:
    return sum(I)


def leq(J: Sequence[int], I: Sequence[int]) -> bool:
    return all(j <= i for j, i in zip(J, I))


def madd(I: Sequence[int], J: Sequence[int]) -> MultiIndex:
    return tuple(i + j for i, j in zip(I, J))


def msub(I: Sequence[int], J: Sequence[int]) -> MultiIndex:
    if not leq(J, I):
        raise ComponentOutOfRange(f"{tuple(J)} is not <= {tuple(I)}")
    return tuple(i - j for i, j in zip(I, J))


def unit(i: int, n: int, scale: int = 1) -> MultiIndex:
    """``scale * 1_i`` in N^n (0-based coordinate ``i``)."""
    return tuple(scale if k == i else 0 for k in range(n))


def indices_of_weight(w: int, n: int) -> list[MultiIndex]:
    """All I in N^n with |I| = w, in lexicographic order."""
    if n == 1:
        return [(w,)] if w >= 0 else []
    out = []
    for first in range(w + 1):
        for rest in indices_of_weight(w - first, n - 1):
            out.append((first,) + rest)
    return out


def indices_below(I: Sequence[int]) -> Iterator[MultiIndex]:
    """All 0 <= V <= I, lexicographic."""
    return itertools.product(*(range(i + 1) for i in I))


def box_indices(bound: int, n: int) -> list[MultiIndex]:
    """All I with every entry < bound, sorted by (weight, lex)."""
    out = list(itertools.product(range(bound), repeat=n))
    out.sort(key=lambda I: (sum(I), I))
    return out


# -- the three binomials ---------------------------------------------------

def _as_index(x) -> MultiIndex:
    return (x,) if isinstance(x, int) else tuple(x)


def binom(I, J) -> int:
    """Componentwise product of ordinary binomials."""
    I, J = _as_index(I), _as_index(J)
    if len(I) != len(J) or not leq(J, I):
        raise ComponentOutOfRange(f"{J} is not <= {I}")
    return math.prod(math.comb(i, j) for i, j in zip(I, J))


@functools.lru_cache(maxsize=None)
def mbinom(k: int, k1: int, pm: int) -> int:
    """``q!/(q'! q''!)`` for ``q, q', q''`` the integer parts of
    ``k/pm, k1/pm, (k-k1)/pm``."""
    if not 0 <= k1 <= k or pm < 1:
        raise ComponentOutOfRange(f"mbinom({k}, {k1}, {pm}) out of range")
    q, q1, q2 = k // pm, k1 // pm, (k - k1) // pm
    assert q - q1 - q2 in (0, 1), (k, k1, pm)
    num = factorial(q)
    den = factorial(q1) * factorial(q2)
    if num % den:
        raise DivisibilityViolation(f"mbinom({k}, {k1}, {pm}) is not integral")
    return num // den


def mbinom_multi(I, J, pm: int) -> int:
    I, J = _as_index(I), _as_index(J)
    if len(I) != len(J) or not leq(J, I):
        raise ComponentOutOfRange(f"{J} is not <= {I}")
    return math.prod(mbinom(i, j, pm) for i, j in zip(I, J))


def _prime_of(pm: int) -> int | None:
    if pm == 1:
        return None
    d = 2
    while pm % d:
        d += 1
    return d


@functools.lru_cache(maxsize=None)
def qbinom_1(k: int, k1: int, pm: int) -> int | Fraction:
    b = math.comb(k, k1)
    mb = mbinom(k, k1, pm)
    if b % mb == 0:
        return b // mb
    x = Fraction(b, mb)
    p = _prime_of(pm)
    if p is None or x.denominator % p == 0:
        raise DivisibilityViolation(f"binom({k},{k1})/mbinom = {x} is not {p}-integral")
    return x


def reduce_mod(c, q: int) -> int:
    """Image of an integer or p-integral fraction in ``Z/q``."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return c.numerator % q
        try:
            return c.numerator * pow(c.denominator, -1, q) % q
        except ValueError:
            raise DivisibilityViolation(f"{c} has no image modulo {q}") from None
    return int(c) % q


def normalize(c):
    """Fractions with denominator 1 become ints."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def qbinom(I, J, params: PParams | int) -> int | Fraction:
    """``binom(I, J) / mbinom(I, J)``; p-integrality is checked.

    ``params`` may be a :class:`PParams` or the integer ``p^m`` directly.
    """
    pm = params.pm if isinstance(params, PParams) else int(params)
    I, J = _as_index(I), _as_index(J)
    if len(I) != len(J) or not leq(J, I):
        raise ComponentOutOfRange(f"{J} is not <= {I}")
    return normalize(math.prod(qbinom_1(i, j, pm) for i, j in zip(I, J)))


def check_unit_lemma(i: int, params: PParams | int, p: int | None = None) -> bool:
    """True iff ``qbinom(i, p^m) = 1 mod p``, for ``i >= p^m``."""
    if isinstance(params, PParams):
        pm, p = params.pm, params.p
    else:
        pm = int(params)
        if p is None:
            raise PreconditionViolation("prime p is required when passing p^m directly")
    if i < pm:
        raise PreconditionViolation(f"i={i} < p^m={pm}")
    return reduce_mod(qbinom_1(i, pm, pm), p) == 1


def is_unit(x, p: int) -> bool:
    return reduce_mod(x, p) != 0
