"""Golden homology tables for a small parameter grid.

Regenerate the bundled files with ``python -m higherdr.golden DIR``.
"""

from __future__ import annotations

import itertools
import json
import sys
from pathlib import Path

from .arith import PParams

GOLDEN_GRID = {"p": [2, 3], "m": [0, 1], "n": [1, 2], "N": [2]}
GOLDEN_WEIGHT = 6
SCHEMA = "higherdr-golden/1"


def default_dir() -> Path:
    return Path(__file__).parent / "data" / "golden"


def golden_name(P: PParams) -> str:
    return f"lhdr_p{P.p}_m{P.m}_n{P.n}_N{P.N}.json"


def golden_payload(P: PParams, w_max: int = GOLDEN_WEIGHT) -> dict:
    from .suites import homology_table

    return {"schema": SCHEMA, "params": P.as_dict(), "max_weight": w_max,
            "table": homology_table(P, range(w_max + 1))}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_golden(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    g = GOLDEN_GRID
    for p, m, n, N in itertools.product(g["p"], g["m"], g["n"], g["N"]):
        P = PParams(p, m, n, N)
        path = directory / golden_name(P)
        path.write_text(dumps(golden_payload(P)))
        out.append(path)
    return out


def _diff(expected, actual, path="$") -> list[str]:
    if isinstance(expected, dict) and isinstance(actual, dict):
        out = []
        for k in sorted(set(expected) | set(actual), key=str):
            if k not in actual:
                out.append(f"{path}.{k}: missing from recomputation")
            elif k not in expected:
                out.append(f"{path}.{k}: not in golden file")
            else:
                out.extend(_diff(expected[k], actual[k], f"{path}.{k}"))
        return out
    if isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            return [f"{path}: length {len(expected)} != {len(actual)}"]
        return [d for i, (a, b) in enumerate(zip(expected, actual)) for d in _diff(a, b, f"{path}[{i}]")]
    if expected != actual:
        return [f"{path}: golden {expected!r} != computed {actual!r}"]
    return []


def compare_golden(directory: str | Path | None = None) -> list[dict]:
    directory = Path(directory) if directory else default_dir()
    files = sorted(directory.glob("*.json"))
    if not files:
        return [{"point": str(directory), "ok": False, "error": "no golden files found"}]
    out = []
    for path in files:
        entry = {"point": path.name}
        try:
            stored = json.loads(path.read_text())
            P = PParams(**stored["params"])
            fresh = json.loads(dumps(golden_payload(P, stored["max_weight"])))
        except Exception as exc:  # noqa: BLE001 - a corrupted file is a failed point
            entry.update(ok=False, error=f"unreadable golden file: {type(exc).__name__}: {exc}")
            out.append(entry)
            continue
        diff = _diff(stored, fresh)
        entry.update(ok=not diff, diff=diff[:20])
        out.append(entry)
    return out


if __name__ == "__main__":
    for p in write_golden(sys.argv[1] if len(sys.argv) > 1 else default_dir()):
        print(p)
