"""Frobenius descent for the linearized complexes, mod p.

The level-raising pullback sends ``tau'^{I} (x) w`` (level m) to
``tau^{p^s I} (x) w`` (level m+s).  The map ``phi`` adds the twists by
``tau^{J}``, ``J`` in the box ``[0, p^s)^n``, and is checked to be a
quasi-isomorphism weight by weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arith import PParams, box_indices, madd, mbinom_multi, unit
from .errors import LevelMismatch, PreconditionViolation
from .hdr import _is_good, build_lhdr, lhdr_basis
from .homology import BasedComplex, ComplexMap, is_quasi_iso


@dataclass(frozen=True)
class FrobParams:
    base: PParams
    s: int = 1

    def __post_init__(self):
        if self.s < 1:
            raise PreconditionViolation("s must be at least 1")
        if self.base.N != 1:
            raise PreconditionViolation("Frobenius descent is implemented mod p only (N = 1)")

    @property
    def target(self) -> PParams:
        return self.base.with_(m=self.base.m + self.s)

    @property
    def ps(self) -> int:
        return self.base.p ** self.s

    def twists(self) -> list[tuple[int, ...]]:
        return box_indices(self.ps, self.base.n)


def _check_target(fp: FrobParams, target: PParams | None) -> PParams:
    tgt = fp.target
    if target is not None and (target.m, target.p, target.n) != (tgt.m, tgt.p, tgt.n):
        raise LevelMismatch(f"target level {target.m} does not equal {tgt.m}")
    return tgt


def frobenius_pullback(fp: FrobParams, w: int, target: PParams | None = None) -> ComplexMap:
    """Weight ``w`` at level m to weight ``p^s w`` at level m+s."""
    tgt = _check_target(fp, target)
    src_c = build_lhdr(fp.base, w)
    tgt_c = build_lhdr(tgt, fp.ps * w)
    mats = {}
    for r in src_c.degrees:
        pos = {f: k for k, f in enumerate(tgt_c.basis[r])}
        M = np.zeros((tgt_c.rank(r), src_c.rank(r)), dtype=object)
        for col, (I, S) in enumerate(src_c.basis[r]):
            M[pos[(tuple(fp.ps * i for i in I), S)], col] = 1
        mats[r] = M
    return ComplexMap(src_c, tgt_c, mats)


def phi_source(fp: FrobParams, W: int) -> BasedComplex:
    """``(+)_J LHDR_m`` in the weights ``w`` with ``p^s w + |J| = W``."""
    base = fp.base
    basis = {}
    diff = {}
    for r in range(base.n + 1):
        basis[r] = []
    parts = []
    for J in fp.twists():
        rest = W - sum(J)
        if rest < 0 or rest % fp.ps:
            continue
        parts.append((J, build_lhdr(base, rest // fp.ps)))
    for r in range(base.n + 1):
        basis[r] = [(J, f) for J, C in parts for f in C.basis[r]]
    for r in range(base.n):
        M = np.zeros((len(basis[r + 1]), len(basis[r])), dtype=object)
        r0 = c0 = 0
        for _, C in parts:
            a, b = C.rank(r + 1), C.rank(r)
            if a and b:
                M[r0:r0 + a, c0:c0 + b] = C.d(r)
            r0, c0 = r0 + a, c0 + b
        diff[r] = M
    return BasedComplex(base.p, base.N, basis, diff)


def phi_map(fp: FrobParams, W: int, target: PParams | None = None) -> ComplexMap:
    """``F_J(tau'^{I} (x) w) = tau^{J} tau^{p^s I} (x) w`` in target weight ``W``.

    The twist acts in every form degree; setting it to zero in positive
    degree does not commute with the differential.
    """
    tgt = _check_target(fp, target)
    src = phi_source(fp, W)
    tgt_c = build_lhdr(tgt, W)
    pm = tgt.pm
    mats = {}
    for r in src.degrees:
        pos = {f: k for k, f in enumerate(tgt_c.basis[r])}
        M = np.zeros((tgt_c.rank(r), src.rank(r)), dtype=object)
        for col, (J, (I, S)) in enumerate(src.basis[r]):
            lifted = tuple(fp.ps * i for i in I)
            total = madd(J, lifted)
            M[pos[(total, S)], col] = mbinom_multi(total, J, pm)
        mats[r] = M
    return ComplexMap(src, tgt_c, mats)


def twist_kills_forms(fp: FrobParams) -> bool:
    """``tau^{J} tau-bar_i`` lies in the ideal at level m+s whenever ``J != 0``."""
    tgt = fp.target
    for J in fp.twists():
        if not any(J):
            continue
        for i in range(tgt.n):
            if _is_good(madd(J, unit(i, tgt.n, tgt.pm)), tgt.pm) is not None:
                return False
    return True


def h0_bijection(fp: FrobParams) -> bool:
    """``(I, J) -> J + p^s I`` matches the two augmentation bases."""
    from .hdr import augmentation_basis

    src = {madd(J, tuple(fp.ps * i for i in I)) for I in augmentation_basis(fp.base) for J in fp.twists()}
    return src == set(augmentation_basis(fp.target)) and \
        len(src) == len(augmentation_basis(fp.base)) * len(fp.twists())


def verify_frobenius_descent(fp: FrobParams, w_max: int, threads: int | None = None) -> dict:
    """Pullback chain-map checks for source weights ``<= w_max`` and the cone
    of ``phi`` in each target weight ``<= p^s w_max``."""
    out = {"params": {**fp.base.as_dict(), "s": fp.s}, "pullback_chain_map": True,
           "phi_quasi_iso": True, "failures": []}
    for w in range(w_max + 1):
        try:
            frobenius_pullback(fp, w).check()
        except Exception as exc:  # noqa: BLE001 - recorded in the report
            out["pullback_chain_map"] = False
            out["failures"].append({"kind": "pullback", "weight": w, "error": str(exc)})
    for W in range(fp.ps * w_max + 1):
        f = phi_map(fp, W)
        ok, summary = is_quasi_iso(f, threads=threads)
        if not ok:
            out["phi_quasi_iso"] = False
            out["failures"].append({"kind": "phi", "weight": W, "cone": summary.as_dict()})
    out["twist_kills_forms"] = twist_kills_forms(fp)
    out["h0_bijection"] = h0_bijection(fp)
    out["ok"] = all(out[k] for k in ("pullback_chain_map", "phi_quasi_iso", "twist_kills_forms", "h0_bijection"))
    return out
