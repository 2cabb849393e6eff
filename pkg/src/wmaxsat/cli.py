"""Command-line front end.

Exit codes: 0 ok, 1 a verification check failed, 2 parse error,
3 contract or capacity error, 4 no optimum or reference for ``analyze``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import glob
import io
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional

import tomli

from . import formula, oracle
from .analysis import analyze_local_optima, parse_assignment
from .backbone import PseudoBackboneFrequencies
from .bgls import BglsParams, gap_percent, run_bgls, summary_csv
from .generate import random_suite
from .walksat import WalksatParams

log = logging.getLogger("wmaxsat")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_PARSE, EXIT_CONTRACT, EXIT_NO_REFERENCE = 0, 1, 2, 3, 4

DEFAULTS = {
    "n1": 50,
    "n2": 50,
    "num": 400,
    "p0": 0.0,
    "phi": 0.2,
    "break_metric": "count",
    "cap": oracle.DEFAULT_CAP,
    "jobs": 1,
    "repetitions": 1,
    "tries": 50,
    "baseline_column": "grasp",
    "random_n": "4:10",
    "random_m": "5:40",
    "random_w": "1:100",
    "random": 0,
}

BENCH_COLUMNS = [
    "row", "instance", "repetition", "seed", "best_weight", "mean_weight", "optimum",
    "baseline", "gap_pct", "improvement_pct", "optima_reached", "millis",
]


class NoReference(Exception):
    pass


# ---------------------------------------------------------------------------
# settings


def _settings(args: argparse.Namespace) -> Dict:
    """Merge built-in defaults, the config file, then explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, "rb") as f:
            cfg = tomli.load(f)
        merged.update({k.replace("-", "_"): v for k, v in cfg.items()})
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "func"):
            merged[key] = value
    if merged.get("seed") is None:
        merged["seed"] = int(os.environ.get("WMAXSAT_SEED", "0"))
    return merged


def _bgls_params(s: Dict) -> BglsParams:
    return BglsParams(
        n1=int(s["n1"]),
        n2=int(s["n2"]),
        num=int(s["num"]),
        p0=float(s["p0"]),
        phi=float(s["phi"]),
        master_seed=int(s["seed"]),
        break_metric=s["break_metric"],
        phase_time_limit=s.get("time_limit"),
    )


def load_optima_table(path: Optional[str] = None) -> Dict[str, Dict[str, Optional[int]]]:
    """Instance name -> {column: value}; blank cells become None."""
    if path is None:
        text = resources.files("wmaxsat").joinpath("data/jnh_optima.csv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    table = {}
    for row in csv.DictReader(rows):
        name = row.pop("instance")
        table[name] = {k: (int(v) if v else None) for k, v in row.items()}
        if table[name].get("optimum") is not None and table[name]["optimum"] <= 0:
            raise formula.ContractError(f"optimum for {name} must be positive")
    return table


def instance_name(path) -> str:
    return Path(path).name.split(".")[0]


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _range(spec: str):
    lo, _, hi = str(spec).partition(":")
    return int(lo), int(hi or lo)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    s = _settings(args)
    inst = formula.load(s["instance"])
    params = _bgls_params(s)
    optimum = s.get("optimum")
    if optimum is None:
        optimum = load_optima_table(s.get("optima_table")).get(instance_name(s["instance"]), {}).get("optimum")
    freqs = None
    if s.get("load_freqs"):
        freqs = PseudoBackboneFrequencies.from_json(Path(s["load_freqs"]).read_text(encoding="utf-8"))
    report = run_bgls(inst, params, jobs=int(s["jobs"]), frequencies=freqs)
    timing = not s.get("no_timing")
    if s.get("save_freqs"):
        Path(s["save_freqs"]).write_text(report.frequencies.to_json(), encoding="utf-8")
    gap = gap_percent(report.best_weight, optimum)
    msg = f"{instance_name(s['instance'])}: best weight {report.best_weight}"
    if gap is not None:
        msg += f" (optimum {optimum}, gap {gap:.4f}%)"
    print(msg, file=sys.stderr)
    if s.get("format", "json") == "csv":
        _emit(summary_csv(instance_name(s["instance"]), report, optimum), s.get("out"))
    else:
        data = report.to_dict(timing)
        data["instance"] = instance_name(s["instance"])
        data["optimum"] = optimum
        data["params"] = {
            "n1": params.n1, "n2": params.n2, "num": params.num, "p0": params.p0,
            "phi": params.phi, "seed": params.master_seed, "break_metric": params.break_metric,
        }
        _emit(json.dumps(data, indent=2, sort_keys=True) + "\n", s.get("out"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def _bench_task(task):
    path, rep, params = task
    inst = formula.load(path)
    t0 = time.monotonic()
    report = run_bgls(inst, params)
    return report.best_weight, 1000.0 * (time.monotonic() - t0)


def _expand(patterns) -> List[str]:
    paths = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        paths.extend(hits if hits else [pat])
    return paths


def _fmt(x, digits=4):
    return "" if x is None else f"{x:.{digits}f}"


def bench_rows(paths: List[str], s: Dict) -> List[Dict]:
    base = _bgls_params(s)
    reps = int(s["repetitions"])
    if reps < 1:
        raise formula.ContractError("repetitions must be >= 1")
    table = load_optima_table(s.get("optima_table"))
    for p in paths:
        formula.load(p)  # fail fast on unparseable inputs
    tasks = []
    for p in paths:
        for r in range(reps):
            params = dataclasses.replace(base, master_seed=base.master_seed + r)
            tasks.append((p, r, params))
    jobs = int(s["jobs"])
    if jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]
    timing = not s.get("no_timing")
    bcol = s["baseline_column"]
    rows: List[Dict] = []
    summaries: List[Dict] = []
    for i, p in enumerate(paths):
        name = instance_name(p)
        known = table.get(name, {})
        optimum = known.get("optimum")
        baseline = known.get(bcol)
        weights, imps, millis = [], [], []
        for r in range(reps):
            weight, ms = results[i * reps + r]
            imp = 100.0 * (weight - baseline) / optimum if optimum and baseline is not None else None
            weights.append(weight)
            imps.append(imp)
            millis.append(ms)
            rows.append({
                "row": "run", "instance": name, "repetition": r, "seed": base.master_seed + r,
                "best_weight": weight, "mean_weight": "", "optimum": optimum or "",
                "baseline": "" if baseline is None else baseline,
                "gap_pct": _fmt(gap_percent(weight, optimum)), "improvement_pct": _fmt(imp),
                "optima_reached": int(optimum is not None and weight >= optimum),
                "millis": f"{ms:.1f}" if timing else "",
            })
        best = max(weights)
        mean_imp = sum(imps) / len(imps) if imps[0] is not None else None
        summary = {
            "row": "summary", "instance": name, "repetition": "", "seed": "",
            "best_weight": best, "mean_weight": f"{sum(weights) / len(weights):.1f}",
            "optimum": optimum or "", "baseline": "" if baseline is None else baseline,
            "gap_pct": _fmt(gap_percent(best, optimum)), "improvement_pct": _fmt(mean_imp),
            "optima_reached": sum(1 for w in weights if optimum is not None and w >= optimum),
            "millis": f"{sum(millis) / len(millis):.1f}" if timing else "",
        }
        summaries.append(summary)
    rows.extend(summaries)
    if summaries:
        gaps = [float(x["gap_pct"]) for x in summaries if x["gap_pct"] != ""]
        imps_all = [float(x["improvement_pct"]) for x in summaries if x["improvement_pct"] != ""]
        rows.append({
            "row": "total", "instance": "ALL", "repetition": "", "seed": "", "best_weight": "",
            "mean_weight": "", "optimum": "", "baseline": "",
            "gap_pct": _fmt(sum(gaps) / len(gaps) if gaps else None),
            "improvement_pct": _fmt(sum(imps_all) / len(imps_all) if imps_all else None),
            "optima_reached": sum(1 for x in summaries if x["optima_reached"]),
            "millis": "",
        })
    return rows


def cmd_bench(args) -> int:
    s = _settings(args)
    patterns = list(s.get("instances") or [])
    paths = _expand(patterns)
    rows = bench_rows(paths, s)
    if s.get("format", "csv") == "json":
        _emit(json.dumps(rows, indent=2) + "\n", s.get("out"))
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        _emit(buf.getvalue(), s.get("out"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    s = _settings(args)
    inst = formula.load(s["instance"])
    if s.get("reference"):
        reference = parse_assignment(Path(s["reference"]).read_text(encoding="utf-8"), inst.num_variables)
        mode = "reference"
    elif inst.num_variables <= int(s["cap"]):
        reference = oracle.biased_optimum(inst, int(s["cap"]))
        mode = "exact"
    else:
        raise NoReference(
            f"{inst.num_variables} variables exceed the oracle cap {s['cap']}; pass --reference"
        )
    params = WalksatParams(
        num=int(s.get("analyze_num", 200)),
        p0=float(s.get("analyze_p0", 0.0)),
        phi=float(s["phi"]),
        break_metric=s["break_metric"],
    )
    report = analyze_local_optima(inst, reference, int(s["tries"]), params, int(s["seed"]), int(s["jobs"]))
    print(
        f"{instance_name(s['instance'])} ({mode}): majority match "
        f"{report.majority_match_fraction:.3f}, ties {report.majority_ties}",
        file=sys.stderr,
    )
    if s.get("format", "csv") == "json":
        data = report.to_dict()
        data["instance"] = instance_name(s["instance"])
        data["mode"] = mode
        _emit(json.dumps(data, indent=2, sort_keys=True) + "\n", s.get("out"))
    else:
        _emit(report.to_csv(), s.get("out"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def verify_instance(inst: formula.WeightedInstance, cap: int, seed: int) -> Dict:
    if inst.num_variables > cap:
        return {"status": "skipped", "reason": f"{inst.num_variables} variables exceed cap {cap}"}
    trace = oracle.reduce_by_backbone(inst, cap)
    optimum = oracle.exact_optima(inst, cap).optimal_weight
    checks = {
        "lemma1_unique_optimum": oracle.verify_lemma1(inst, cap),
        "lemma2_optimal_for_original": oracle.verify_lemma2(inst, cap),
        "bias_weight_identity": oracle.check_bias_identity(inst, cap),
        "fix_literal_conservation": oracle.check_fix_conservation(inst, random.Random(seed)),
        "backbone_fixing": oracle.check_backbone_fixing(inst, cap),
        "reduction_reconstructs_optimum": trace.weight == optimum and len(trace.steps) == inst.num_variables,
    }
    return {
        "status": "pass" if all(checks.values()) else "fail",
        "optimum": optimum,
        "checks": checks,
    }


def _verify_task(task):
    name, inst, cap, seed = task
    out = {"instance": name, "num_variables": inst.num_variables, "num_clauses": inst.num_clauses}
    out.update(verify_instance(inst, cap, seed))
    return out


def cmd_verify(args) -> int:
    s = _settings(args)
    cap = int(s["cap"])
    seed = int(s["seed"])
    tasks = []
    for i, path in enumerate(_expand(s.get("instances") or [])):
        tasks.append((instance_name(path), formula.load(path), cap, seed + i))
    count = int(s["random"])
    if count:
        suite = random_suite(seed, count, _range(s["random_n"]), _range(s["random_m"]), _range(s["random_w"]))
        for i, inst in enumerate(suite):
            tasks.append((f"random-{seed}-{i}", inst, cap, seed + i))
    jobs = int(s["jobs"])
    if jobs > 1 and tasks:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_verify_task, tasks))
    else:
        results = [_verify_task(t) for t in tasks]
    for r in results:
        if r["status"] == "skipped":
            log.warning("%s skipped: %s", r["instance"], r["reason"])
    failed = [r["instance"] for r in results if r["status"] == "fail"]
    report = {
        "passed": sum(1 for r in results if r["status"] == "pass"),
        "failed": len(failed),
        "skipped": sum(1 for r in results if r["status"] == "skipped"),
        "instances": results,
    }
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", s.get("out"))
    print(f"verify: {report['passed']} passed, {report['failed']} failed, {report['skipped']} skipped", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--config", help="TOML file with defaults for any flag")
    p.add_argument("--n1", type=int, help="sampling-phase tries (default 50)")
    p.add_argument("--n2", type=int, help="backbone-phase tries (default 50)")
    p.add_argument("--num", type=int, help="flip loop bound per try (default 400)")
    p.add_argument("--p0", type=float, help="initial noise probability (default 0)")
    p.add_argument("--phi", type=float, help="noise adaptation constant (default 0.2)")
    p.add_argument("--seed", type=int, help="master seed (falls back to $WMAXSAT_SEED, then 0)")
    p.add_argument("--break-metric", choices=("count", "weight"))
    p.add_argument("--cap", type=int, help="oracle variable cap (default 22)")
    p.add_argument("--optima-table", help="CSV of known optima (default: bundled jnh table)")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), help=f"output format (default {fmt_default})")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--no-timing", action="store_const", const=True, help="omit wall-clock fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wmaxsat", description="Backbone guided local search for weighted MAX-SAT")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run BGLS on one instance")
    p.add_argument("instance")
    p.add_argument("--optimum", type=int, help="known optimum for the gap report")
    p.add_argument("--time-limit", type=float, help="per-phase wall-clock limit in seconds (not reproducible)")
    p.add_argument("--save-freqs", help="write the sampled frequencies as JSON")
    p.add_argument("--load-freqs", help="skip sampling and guide with frequencies saved by --save-freqs")
    _common(p, "json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a campaign over many instances")
    p.add_argument("instances", nargs="*", default=None, help="instance files or glob patterns")
    p.add_argument("--repetitions", type=int, help="seeded runs per instance (default 1)")
    p.add_argument("--baseline-column", help="optima-table column used for the improvement figure (default grasp)")
    _common(p, "csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("analyze", help="distance of sampled local optima to an optimum")
    p.add_argument("instance")
    p.add_argument("--reference", help="assignment file used in place of an exact optimum")
    p.add_argument("--tries", type=int, help="local optima to sample (default 50)")
    p.add_argument("--analyze-num", type=int, help="flip loop bound for sampling (default 200)")
    p.add_argument("--analyze-p0", type=float, help="noise for sampling (default 0)")
    _common(p, "csv")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="machine-check the exact backbone results on small instances")
    p.add_argument("instances", nargs="*", default=None)
    p.add_argument("--random", type=int, help="also check this many seeded random instances")
    p.add_argument("--random-n", help="variable range lo:hi (default 4:10)")
    p.add_argument("--random-m", help="clause range lo:hi (default 5:40)")
    p.add_argument("--random-w", help="weight range lo:hi (default 1:100)")
    _common(p, "json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    del args.verbose
    if getattr(args, "instances", None) == []:
        args.instances = None
    try:
        return args.func(args)
    except (formula.ParseError, OSError, tomli.TOMLDecodeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NoReference as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_REFERENCE
    except formula.ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
