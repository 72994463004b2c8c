"""Presentations of the degree-2 and degree-3 terms of the jet complex of
order ``p^m``, and an elimination probe for the degree-3 relations.

Generators are tuples of multi-indices ``U`` with ``1 <= |U| <= p^m``
standing for ``(dt)^{U_1} (x) (dt)^{U_2} (x) ...``.  Nothing here decides
freeness in degree 3: :func:`omega3_probe` only reports what elimination
by unit pivots achieves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from .arith import PParams, indices_below, indices_of_weight, leq, msub, qbinom, reduce_mod
from .errors import NoUnitSplitting, PreconditionViolation

Index = tuple


def jet_indices(params: PParams) -> list[Index]:
    """``U`` with ``1 <= |U| <= p^m`` in (weight, lex) order."""
    return [U for w in range(1, params.pm + 1) for U in indices_of_weight(w, params.n)]


def qualifying(params: PParams) -> list[Index]:
    pm = params.pm
    return [I for w in range(pm + 1, 2 * pm + 1) for I in indices_of_weight(w, params.n)]


def _in_range(params: PParams, U) -> bool:
    return 1 <= sum(U) <= params.pm


@dataclass
class SplittingChoice:
    params: PParams
    split: dict[Index, tuple[Index, Index]] = field(default_factory=dict)

    def A(self, I) -> Index | None:
        pair = self.split.get(tuple(I))
        return pair[0] if pair else None

    def B(self, I) -> Index | None:
        pair = self.split.get(tuple(I))
        return pair[1] if pair else None

    def is_split(self, U, V) -> bool:
        """``(U, V) == (A(U+V), B(U+V))``; False when ``U+V`` does not qualify."""
        I = tuple(u + v for u, v in zip(U, V))
        return self.split.get(I) == (tuple(U), tuple(V))

    def b_preimages(self, W) -> list[Index]:
        return sorted(I for I, (_, B) in self.split.items() if B == tuple(W))

    def as_dict(self) -> dict:
        return {",".join(map(str, I)): [list(a), list(b)] for I, (a, b) in sorted(self.split.items())}


def _valid_split(params: PParams, I, A) -> bool:
    if not (any(A) and leq(A, I) and A != I):
        return False
    B = msub(I, A)
    if not (_in_range(params, A) and _in_range(params, B)):
        return False
    return reduce_mod(qbinom(I, A, params), params.p) != 0


def find_splittings(params: PParams, overrides: dict | None = None) -> SplittingChoice:
    """Lexicographically smallest ``0 < A < I`` with ``qbinom(I, A)`` a unit
    and both halves of weight at most ``p^m``; ``overrides`` fixes ``A(I)``."""
    choice = SplittingChoice(params)
    overrides = {tuple(k): tuple(v) for k, v in (overrides or {}).items()}
    for I in qualifying(params):
        if I in overrides:
            A = overrides[I]
            if not _valid_split(params, I, A):
                raise PreconditionViolation(f"override A={A} is not a unit splitting of {I}")
        else:
            A = next((V for V in indices_below(I) if _valid_split(params, I, V)), None)
            if A is None:
                raise NoUnitSplitting(f"no unit splitting of {I} for p={params.p}, m={params.m}")
        choice.split[I] = (A, msub(I, A))
    return choice


# -- degree 2 --------------------------------------------------------------------

def omega2_generators(params: PParams) -> list[tuple[Index, Index]]:
    J = jet_indices(params)
    return [(U, V) for U in J for V in J]


def omega2_basis(params: PParams, choice: SplittingChoice | None = None, w_max: int | None = None) -> dict:
    """The pairs other than the splittings, plus an exact elimination certificate.

    For each qualifying ``I`` the relation ``sum_S qbinom(I, S) (S, I-S) = 0``
    has a unit coefficient at ``(A(I), B(I))``, which is then expressed through
    the basis; the certificate is re-substituted into the relation.
    """
    choice = choice or find_splittings(params)
    q = params.modulus
    gens = [g for g in omega2_generators(params) if w_max is None or sum(map(sum, g)) <= w_max]
    excluded = [g for g in gens if choice.is_split(*g)]
    basis = [g for g in gens if not choice.is_split(*g)]
    certificates = {}
    exact = True
    Is = [I for I in qualifying(params) if w_max is None or sum(I) <= w_max]
    for I in Is:
        rel = {}
        for S in indices_below(I):
            T = msub(I, S)
            if _in_range(params, S) and _in_range(params, T):
                rel[(S, T)] = reduce_mod(qbinom(I, S, params), q)
        A, B = choice.split[I]
        u = rel[(A, B)]
        uinv = pow(u, -1, q)
        expr = {g: (-c * uinv) % q for g, c in rel.items() if g != (A, B) and c % q}
        certificates[I] = expr
        # substitute back: u * expr + rest must vanish
        check = {g: c for g, c in rel.items() if g != (A, B)}
        for g, c in expr.items():
            check[g] = (check.get(g, 0) + u * c) % q
        exact &= not any(c % q for c in check.values())
    return {
        "basis": basis,
        "excluded": excluded,
        "rank": len(basis),
        "expected_rank": len(gens) - len(Is),
        "certificates": certificates,
        "certificate_exact": exact,
    }


# -- degree 3 --------------------------------------------------------------------

def omega3_generators(params: PParams, choice: SplittingChoice) -> list[tuple[Index, Index, Index]]:
    J = jet_indices(params)
    bset = {B for _, B in choice.split.values()}
    out = []
    for U, V, W in itertools.product(J, J, J):
        if choice.is_split(V, W):
            continue
        if W not in bset and choice.is_split(U, V):
            continue
        out.append((U, V, W))
    return out


def _relation(params: PParams, choice: SplittingChoice, gen, genset: set, q: int, flags: dict) -> dict:
    U, V, W = gen
    UV = tuple(u + v for u, v in zip(U, V))
    Is = choice.b_preimages(W)
    a_set = {choice.A(I) for I in Is}
    rel: dict = {}

    def add(key, c):
        if not all(_in_range(params, X) for X in key):
            flags["out_of_range_terms"].append([list(x) for x in key])
            return
        if key not in genset:
            flags["non_generator_terms"].append([list(x) for x in key])
        rel[key] = (rel.get(key, 0) + c) % q

    for S in indices_below(UV):
        if not any(S) or S == UV or S in a_set:
            continue
        add((msub(UV, S), S, W), reduce_mod(qbinom(UV, S, params), q))
    for I in Is:
        A = choice.A(I)
        if not leq(A, UV):
            flags["a_not_below"].append({"generator": [list(x) for x in gen], "I": list(I)})
            continue
        lead = reduce_mod(qbinom(UV, A, params), q) * pow(reduce_mod(qbinom(I, A, params), q), -1, q)
        for T in indices_below(I):
            if not any(T) or T == I or T == A:
                continue
            add((msub(UV, A), T, msub(I, T)), -lead * reduce_mod(qbinom(I, T, params), q))
    return {k: c for k, c in rel.items() if c}


def _eliminate(relations: list[tuple], aux: list, p: int, q: int) -> tuple[list, list]:
    """Greedy elimination of auxiliary generators by unit pivots (mod ``q``).

    Relations are visited in order; each takes the first remaining auxiliary
    generator with a unit coefficient as its pivot and is then substituted
    into the later relations.
    """
    rows = [dict(r) for _, r in relations]
    remaining = list(aux)
    pivots = []
    for i, row in enumerate(rows):
        piv = next((g for g in remaining if row.get(g, 0) % p), None)
        if piv is None:
            continue
        pivots.append(piv)
        remaining.remove(piv)
        inv = pow(row[piv], -1, q)
        for later in rows[i + 1:]:
            c = later.get(piv, 0)
            if c:
                f = c * inv % q
                for g, v in row.items():
                    later[g] = (later.get(g, 0) - f * v) % q
                    if not later[g]:
                        del later[g]
    return pivots, remaining


def omega3_probe(params: PParams, choice: SplittingChoice | None = None, w_max: int | None = None) -> dict:
    """Generators and relations of the degree-3 term as displayed, followed
    by unit-pivot elimination of the auxiliary generators over ``Z/p`` and
    ``Z/p^N``.  The report carries evidence only, no freeness verdict."""
    choice = choice or find_splittings(params)
    p, q = params.p, params.modulus
    gens = omega3_generators(params, choice)
    if w_max is not None:
        gens = [g for g in gens if sum(map(sum, g)) <= w_max]
    genset = set(gens)
    bset = {B for _, B in choice.split.values()}
    aux = [g for g in gens if choice.is_split(g[0], g[1]) and g[2] in bset]
    flags = {"out_of_range_terms": [], "non_generator_terms": [], "a_not_below": []}
    relations = [(g, _relation(params, choice, g, genset, q, flags)) for g in aux]
    nonunit = [g for g, r in relations if not any(c % p for c in r.values())]

    graph = nx.DiGraph()
    reentry = False
    for U, V, W in aux:
        graph.add_node(W)
        for I in choice.b_preimages(W):
            for T in indices_below(I):
                rest = msub(I, T)
                if any(T) and T != I and T != choice.A(I) and rest in bset:
                    reentry = True
                    graph.add_edge(W, rest)
    cycles = sorted(sorted(c) for c in itertools.islice(nx.simple_cycles(graph), 200))

    piv_p, rem_p = _eliminate(relations, aux, p, p)
    piv_q, rem_q = _eliminate(relations, aux, p, q)

    def dump(gs):
        return [[list(x) for x in g] for g in gs]

    return {
        "params": params.as_dict(),
        "choice": choice.as_dict(),
        "generator_count": len(gens),
        "auxiliary_count": len(aux),
        "relation_count": len(relations),
        "eliminated_count": len(piv_q),
        "eliminated_count_mod_p": len(piv_p),
        "residual_generators": dump(rem_q),
        "residual_generators_mod_p": dump(rem_p),
        "remaining_count": len(gens) - len(piv_q),
        "b_cycles": [[list(x) for x in c] for c in cycles],
        "obstructions": {
            "all_coefficients_nonunit": dump(nonunit),
            "b_reentry": reentry,
        },
        "flags": {k: sorted(v, key=repr)[:50] for k, v in flags.items()},
        "flag_counts": {k: len(v) for k, v in flags.items()},
    }
