"""Verification suites run by the command-line driver.

Each runner takes a :class:`RunConfig` and returns a dict with ``status``
(``pass``, ``fail`` or ``advisory``) and per-point diagnostics.  Runners
never raise for a failed check; unexpected exceptions are caught and
reported as failures of the point that raised them.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import arith, frob, hdr, jet, strat
from .arith import PParams
from .homology import base_change, homology, is_quasi_iso

ASSERTED = ("arith-lemmas", "poincare", "stratification", "frobenius", "kunneth",
            "basechange", "crosscheck", "golden")
ADVISORY = ("jet",)
ALL_SUITES = ASSERTED + ADVISORY

DEFAULT_GRID = {"p": [2, 3], "m": [0, 1], "n": [1, 2], "N": [1, 2, 3]}
DEFAULT_EVALS = ["0", "1", "2", "7"]

# per-suite weight caps used when no --max-weight is given
WEIGHT_DEFAULTS = {"poincare": 12, "stratification": 6, "frobenius": 8, "kunneth": 8,
                   "basechange": 12, "golden": 6}


@dataclass
class RunConfig:
    grid: dict = field(default_factory=lambda: {k: list(v) for k, v in DEFAULT_GRID.items()})
    max_weight: int | None = None
    evals: list = field(default_factory=lambda: list(DEFAULT_EVALS))
    suites: list = field(default_factory=lambda: list(ALL_SUITES))
    threads: int = 1
    s: int = 1
    golden_dir: str | None = None
    timings: bool = False

    def points(self) -> list[PParams]:
        g = self.grid
        return [PParams(p, m, n, N) for p, m, n, N in itertools.product(g["p"], g["m"], g["n"], g["N"])]

    def weight(self, suite: str) -> int:
        return self.max_weight if self.max_weight is not None else WEIGHT_DEFAULTS[suite]

    def echo(self) -> dict:
        return {"grid": self.grid, "max_weight": self.max_weight, "eval": self.evals,
                "suites": self.suites, "threads": self.threads, "s": self.s}


def _key(P: PParams) -> str:
    return f"p={P.p},m={P.m},n={P.n},N={P.N}"


def _map_points(cfg: RunConfig, fn: Callable, points: list) -> list[dict]:
    def guarded(P):
        try:
            out = fn(P)
        except Exception as exc:  # noqa: BLE001 - surfaced as a failed point
            out = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
        out.setdefault("point", _key(P) if isinstance(P, PParams) else str(P))
        return out

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            return list(ex.map(guarded, points))
    return [guarded(P) for P in points]


def _status(points: list[dict]) -> str:
    return "pass" if all(pt.get("ok") for pt in points) else "fail"


def _eval_point(text: str, P: PParams) -> tuple[int, ...]:
    vals = [int(x) for x in str(text).split(",")]
    if len(vals) == 1:
        vals = vals * P.n
    return tuple(vals[:P.n]) + (0,) * max(0, P.n - len(vals))


# -- suites ------------------------------------------------------------------------

def run_arith(cfg: RunConfig) -> dict:
    pts = []
    for p, m in itertools.product((2, 3, 5), (0, 1, 2)):
        pm = p ** m
        bad = [i for i in range(pm, 2001) if not arith.check_unit_lemma(i, pm, p)]
        pts.append({"point": f"p={p},m={m}", "ok": not bad, "unit_lemma_failures": bad[:10]})
    # binom = qbinom * mbinom and the level-0 degeneracy
    ok = True
    for pm in (1, 2, 3, 4, 9):
        for k in range(0, 40):
            for k1 in range(k + 1):
                q = arith.qbinom(k, k1, pm)
                ok &= q * arith.mbinom(k, k1, pm) == math.comb(k, k1)
                if pm == 1:
                    ok &= q == 1
    pts.append({"point": "factorisation", "ok": bool(ok)})
    return {"status": _status(pts), "points": pts}


def run_poincare(cfg: RunConfig) -> dict:
    w_max = cfg.weight("poincare")

    def one(P: PParams) -> dict:
        per_w = []
        total = 0
        ok = True
        for w in range(w_max + 1):
            C = hdr.build_lhdr(P, w)
            C.check()
            exact = homology(hdr.augmented_lhdr(P, w), threads=cfg.threads).is_zero()
            h0 = homology(C)[0].free_rank
            total += h0
            n_aug = sum(1 for I in hdr.augmentation_basis(P) if sum(I) == w)
            ok &= exact and h0 == n_aug
            per_w.append({"w": w, "augmented_exact": exact, "h0": h0, "augmentation_rank": n_aug})
        complete = w_max >= P.n * (P.pm - 1)
        if complete:
            ok &= total == P.pm ** P.n
        evals = []
        for text in cfg.evals:
            a = _eval_point(text, P)
            B = hdr.beta(P, a)
            Binv = hdr.beta_inverse(P, a)
            inv_ok = bool(np.array_equal((B.astype(object) @ Binv.astype(object)) % P.modulus,
                                         np.eye(len(B), dtype=object)))
            qi, _ = is_quasi_iso(hdr.iota(P, a))
            evals.append({"a": list(a), "beta_invertible": inv_ok, "iota_quasi_iso": qi})
            ok &= inv_ok and qi
        return {"ok": bool(ok), "total_h0": total, "expected_total": P.pm ** P.n,
                "window_complete": complete, "weights": per_w, "evals": evals}

    pts = _map_points(cfg, one, cfg.points())
    return {"status": _status(pts), "points": pts}


def _pmn(cfg: RunConfig) -> list[PParams]:
    """One point per (p, m, n), at the largest requested precision."""
    N = max(cfg.grid["N"])
    seen = []
    for P in cfg.points():
        Q = P.with_(N=N)
        if Q not in seen:
            seen.append(Q)
    return seen


def run_strat(cfg: RunConfig) -> dict:
    w = cfg.weight("stratification")

    def one(P: PParams) -> dict:
        coc = strat.verify_cocycle(P, w, report=True)
        hor = strat.verify_horizontality(P, w, report=True)
        ident = strat.reduces_to_identity(P, w)
        inv = strat.verify_inverse(P, w)
        micro = all(strat.binomial_cancellation(L) for L in arith.box_indices(4, P.n))
        return {"ok": bool(coc["ok"] and hor["ok"] and ident and inv and micro),
                "cocycle": coc, "horizontality": hor, "identity_mod_augmentation": ident,
                "invertible": inv, "binomial_cancellation": micro}

    pts = _map_points(cfg, one, _pmn(cfg))
    return {"status": _status(pts), "points": pts}


def run_frobenius(cfg: RunConfig) -> dict:
    w = cfg.weight("frobenius")
    pts_in = []
    for P in cfg.points():
        Q = P.with_(N=1)
        if Q not in pts_in:
            pts_in.append(Q)

    def one(P: PParams) -> dict:
        return frob.verify_frobenius_descent(frob.FrobParams(P, cfg.s), w)

    pts = _map_points(cfg, one, pts_in)
    return {"status": _status(pts), "points": pts}


def _signed_permutation(M: np.ndarray, q: int) -> bool:
    if M.shape[0] != M.shape[1]:
        return False
    nz = M != 0
    if not (nz.sum(axis=0) == 1).all() or not (nz.sum(axis=1) == 1).all():
        return False
    return all(int(x) % q in (1, q - 1) for x in M[nz])


def run_kunneth(cfg: RunConfig) -> dict:
    w_max = cfg.weight("kunneth")
    pts_in = [P for P in cfg.points() if P.n == 1]

    def one(P: PParams) -> dict:
        bad = []
        for w in range(w_max + 1):
            f = hdr.kunneth_iso(P, P, w)
            try:
                f.check()
            except Exception as exc:  # noqa: BLE001
                bad.append({"w": w, "error": str(exc)})
                continue
            for d in f.source.degrees:
                if not _signed_permutation(f.f(d), P.modulus):
                    bad.append({"w": w, "degree": d, "error": "not a signed permutation"})
        return {"ok": not bad, "failures": bad}

    pts = _map_points(cfg, one, pts_in)
    return {"status": _status(pts), "points": pts}


def run_basechange(cfg: RunConfig) -> dict:
    w_max = cfg.weight("basechange")

    def one(P: PParams) -> dict:
        bad = []
        for N2 in range(1, P.N):
            for w in range(w_max + 1):
                big = base_change(hdr.build_lhdr(P, w), N2)
                small = hdr.build_lhdr(P.with_(N=N2), w)
                same = all(np.array_equal(np.asarray(big.d(k), dtype=object) % P.p ** N2,
                                          np.asarray(small.d(k), dtype=object)) for k in small.degrees)
                if not same:
                    bad.append({"N'": N2, "w": w})
        return {"ok": not bad, "failures": bad}

    pts = _map_points(cfg, one, [P for P in cfg.points() if P.N > 1])
    return {"status": _status(pts), "points": pts}


def run_crosscheck(cfg: RunConfig) -> dict:
    def one(P: PParams) -> dict:
        bound = 2 * P.pm + 1 if cfg.max_weight is None else cfg.max_weight
        reports = [hdr.crosscheck_report(P, w) for w in range(bound + 1)]
        lin = all(hdr.crosscheck_linearized(P, w) for w in range(bound + 1))
        ok = all(r["ok"] for r in reports) and lin
        failing = [r for r in reports if not r["ok"]]
        return {"ok": bool(ok), "weights_checked": bound + 1, "linearized": lin,
                "failing": failing[:3]}

    pts = _map_points(cfg, one, [P for P in cfg.points() if P.n <= 2])
    return {"status": _status(pts), "points": pts}


def run_golden(cfg: RunConfig) -> dict:
    from .golden import compare_golden

    pts = compare_golden(cfg.golden_dir)
    return {"status": _status(pts), "points": pts}


def run_jet(cfg: RunConfig) -> dict:
    pts_in = []
    for P in cfg.points():
        Q = P.with_(N=max(cfg.grid["N"]))
        if Q not in pts_in and Q.pm <= 3 and Q.n <= 2:
            pts_in.append(Q)

    def one(P: PParams) -> dict:
        choice = jet.find_splittings(P)
        o2 = jet.omega2_basis(P, choice)
        o3 = jet.omega3_probe(P, choice)
        return {"ok": bool(o2["certificate_exact"] and o2["rank"] == o2["expected_rank"]),
                "omega2_rank": o2["rank"], "omega2_certificate_exact": o2["certificate_exact"],
                "omega3": o3}

    pts = _map_points(cfg, one, pts_in)
    return {"status": "advisory", "points": pts}


RUNNERS = {
    "arith-lemmas": run_arith,
    "poincare": run_poincare,
    "stratification": run_strat,
    "frobenius": run_frobenius,
    "kunneth": run_kunneth,
    "basechange": run_basechange,
    "crosscheck": run_crosscheck,
    "golden": run_golden,
    "jet": run_jet,
}


def run_suites(cfg: RunConfig) -> tuple[dict, bool]:
    results = {}
    ok = True
    for name in ALL_SUITES:
        if name not in cfg.suites:
            continue
        t0 = time.perf_counter()
        res = RUNNERS[name](cfg)
        if cfg.timings:
            res["seconds"] = round(time.perf_counter() - t0, 3)
        results[name] = res
        if name in ASSERTED and res["status"] != "pass":
            ok = False
    return results, ok


def homology_table(P: PParams, weights, threads: int = 1) -> list[dict]:
    rows = []
    for w in weights:
        C = hdr.build_lhdr(P, w)
        H = homology(C, threads=threads)
        rows.append({
            "weight": w,
            "ranks": {str(d): C.rank(d) for d in C.degrees},
            "homology": H.as_dict(),
            "augmentation_rank": sum(1 for I in hdr.augmentation_basis(P) if sum(I) == w),
            "augmented_exact": homology(hdr.augmented_lhdr(P, w)).is_zero(),
        })
    return rows
