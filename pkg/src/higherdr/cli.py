"""Command-line driver.

Commands: ``verify`` (suites, exit 0 iff all asserted suites pass),
``homology`` (per-weight tables of the linearized complex), ``explore-jet``
(advisory jet reports) and ``report`` (everything, including jet).

Config files are flat ``key = value`` lines; repeating a key builds a list
and command-line flags override the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, PreconditionViolation
from .suites import ALL_SUITES, DEFAULT_EVALS, DEFAULT_GRID, RunConfig, homology_table, run_jet, run_suites

SCHEMA = "higherdr-report/1"

_LIST_KEYS = {"p", "m", "n", "N", "eval", "suite"}
_KEY_ALIASES = {"modulus-exp": "N", "modulus_exp": "N", "max_weight": "max-weight",
                "golden_dir": "golden-dir"}
_KNOWN = _LIST_KEYS | {"max-weight", "out", "format", "threads", "s", "golden-dir", "timings"}


def parse_config_text(text: str) -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = _KEY_ALIASES.get(key, key)
        if key not in _KNOWN:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        vals = [v.strip() for v in val.split(",")] if key in _LIST_KEYS and key != "eval" else [val]
        if key in _LIST_KEYS:
            out.setdefault(key, []).extend(v for v in vals if v)
        elif key in out:
            raise ConfigError(f"config line {lineno}: {key!r} given twice")
        else:
            out[key] = val
    return out


def _ints(vals, name) -> list[int]:
    try:
        return [int(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigError(f"{name} expects integers, got {vals!r}") from None


def _split_list(vals):
    out = []
    for v in vals or []:
        out.extend(x for x in str(v).split(",") if x != "")
    return out


def build_config(args: argparse.Namespace) -> tuple[RunConfig, dict]:
    file_cfg: dict = {}
    if args.config:
        try:
            file_cfg = parse_config_text(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def pick(flag, key):
        return flag if flag is not None else file_cfg.get(key)

    grid = {}
    for key, flag in (("p", args.p), ("m", args.m), ("n", args.n), ("N", args.modulus_exp)):
        vals = pick(flag, key)
        grid[key] = _ints(_split_list(vals), key) if vals is not None else list(DEFAULT_GRID[key])
        if not grid[key]:
            raise ConfigError(f"empty value list for {key}")
    cfg = RunConfig(grid=grid)
    try:
        cfg.points()
    except PreconditionViolation as exc:
        raise ConfigError(str(exc)) from None

    mw = pick(args.max_weight, "max-weight")
    if mw is not None:
        cfg.max_weight = _ints([mw], "max-weight")[0]
        if cfg.max_weight < 0:
            raise ConfigError("max-weight must be non-negative")
    ev = pick(args.eval, "eval")
    cfg.evals = list(ev) if ev is not None else list(DEFAULT_EVALS)
    for e in cfg.evals:
        _ints(str(e).split(","), "eval")
    suites = pick(args.suite, "suite")
    if suites is not None:
        names = _split_list(suites)
        if names in (["none"], []):
            names = []
        elif "all" in names:
            names = list(ALL_SUITES)
        unknown = [s for s in names if s not in ALL_SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
        cfg.suites = names
    th = pick(args.threads, "threads")
    cfg.threads = max(1, _ints([th], "threads")[0]) if th is not None else 1
    s = pick(getattr(args, "s", None), "s")
    cfg.s = _ints([s], "s")[0] if s is not None else 1
    if cfg.s < 1:
        raise ConfigError("s must be at least 1")
    cfg.golden_dir = pick(args.golden_dir, "golden-dir")
    cfg.timings = bool(args.timings or str(file_cfg.get("timings", "")).lower() in ("1", "true", "yes"))

    fmt = pick(args.format, "format") or "json"
    if fmt not in ("json", "csv"):
        raise ConfigError(f"unknown format {fmt!r}")
    return cfg, {"format": fmt, "out": pick(args.out, "out")}


# -- output ---------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj, sort_keys=True) if isinstance(obj, (list, dict)) else obj


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(report):
        w.writerow([k, v])
    return buf.getvalue()


def emit(report: dict, opts: dict) -> None:
    text = render(report, opts["format"])
    if opts["out"]:
        Path(opts["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def _report(command: str, cfg: RunConfig, **body) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command, "config": cfg.echo(), **body}


# -- commands -------------------------------------------------------------------

def cmd_verify(cfg: RunConfig, opts: dict, command: str = "verify") -> int:
    results, ok = run_suites(cfg)
    report = _report(command, cfg, suites=results, passed=ok)
    if command == "report":
        report["homology"] = {
            f"p={P.p},m={P.m},n={P.n},N={P.N}": homology_table(P, range((6 if cfg.max_weight is None else cfg.max_weight) + 1))
            for P in cfg.points()
        }
    emit(report, opts)
    for name, res in results.items():
        if res["status"] == "fail":
            _print_failure(name, res)
    return 0 if ok else 1


def _print_failure(name: str, res: dict) -> None:
    for pt in res["points"]:
        if not pt.get("ok"):
            detail = pt.get("error") or "; ".join(pt.get("diff", [])[:5]) or "check failed"
            print(f"[{name}] {pt.get('point')}: {detail}", file=sys.stderr)


def cmd_homology(cfg: RunConfig, opts: dict) -> int:
    w_max = cfg.max_weight if cfg.max_weight is not None else 6
    tables = {}
    for P in cfg.points():
        tables[f"p={P.p},m={P.m},n={P.n},N={P.N}"] = homology_table(P, range(w_max + 1), cfg.threads)
    emit(_report("homology", cfg, homology=tables), opts)
    return 0


def cmd_explore_jet(cfg: RunConfig, opts: dict) -> int:
    emit(_report("explore-jet", cfg, jet=run_jet(cfg)), opts)
    return 0


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", nargs="+", help="primes (list)")
    common.add_argument("--m", nargs="+", help="levels (list)")
    common.add_argument("--n", nargs="+", help="numbers of coordinates (list)")
    common.add_argument("--modulus-exp", nargs="+", dest="modulus_exp", help="N, coefficients in Z/p^N (list)")
    common.add_argument("--max-weight", dest="max_weight")
    common.add_argument("--eval", action="append", help="evaluation point, e.g. 3 or 1,2 (repeatable)")
    common.add_argument("--suite", action="append", help=f"suite(s): {', '.join(ALL_SUITES)}, all or none")
    common.add_argument("--out")
    common.add_argument("--format", help="json (default) or csv")
    common.add_argument("--config")
    common.add_argument("--threads")
    common.add_argument("--s", help="Frobenius iteration count")
    common.add_argument("--golden-dir", dest="golden_dir")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (non-deterministic)")

    parser = argparse.ArgumentParser(prog="higherdr", description="Higher de Rham complexes over Z/p^N.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run verification suites"),
                        ("homology", "homology tables of the linearized complex"),
                        ("explore-jet", "advisory jet-complex elimination reports"),
                        ("report", "all suites plus homology tables")):
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg, opts = build_config(args)
        if args.command == "verify":
            return cmd_verify(cfg, opts)
        if args.command == "report":
            return cmd_verify(cfg, opts, command="report")
        if args.command == "homology":
            return cmd_homology(cfg, opts)
        return cmd_explore_jet(cfg, opts)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
