"""Command-line front end.

Four subcommands: `formulas` (closed-form reports), `verify` (statistical
rank certification), `scan` (formula self-consistency sweep), `oracle`
(brute-force counts over tiny fields).  Output is text, json, or csv;
json and csv are byte-identical across runs with equal seeds, so they can
be diffed or golden-filed.  Text output may add timing.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 resource
refusal.

Flags can come from a `key=value` config file (--config); explicit flags
win.  The seed falls back to the RCL_SEED environment variable, then 0.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

from rclab import __version__
from rclab import curvespace, formulas, oracle
from rclab.linalg import DEFAULT_PRIME, MAX_MODULUS, is_prime

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_REFUSED = 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything one invocation needs; every report echoes `seed`."""

    command: str
    fmt: str
    output: str | None
    seed: int
    n: int | None = None
    d: int | None = None
    e: int | None = None
    e_min: int | None = None
    e_max: int | None = None
    prime: int | None = None
    trials: int | None = None
    n_max: int | None = None
    budget: int | None = None
    samples: int | None = None
    primes: list[int] | None = None
    coeffs: list[int] | None = None
    check: str | None = None
    threshold: int | None = None
    tolerance: float | None = None
    any_range: bool = False


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_int_list(raw: str) -> list[int]:
    try:
        return [int(x) for x in raw.split(",") if x.strip() != ""]
    except ValueError:
        raise ValueError(f"not a comma-separated integer list: {raw!r}")


def _parse_e_range(raw: str) -> tuple[int, int]:
    raw = raw.strip()
    if ".." in raw:
        lo_s, _, hi_s = raw.partition("..")
        lo, hi = int(lo_s), int(hi_s)
    else:
        lo = hi = int(raw)
    if lo < 1 or hi < lo:
        raise ValueError(f"bad degree range {raw!r}")
    return lo, hi


def load_config_file(path: str) -> dict[str, str]:
    """Line-based key=value file; # starts a comment; keys match long flag
    names (dashes and underscores interchangeable)."""
    cfg: dict[str, str] = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        cfg[key.strip().replace("_", "-")] = value.strip()
    return cfg


class _Resolver:
    """Merge CLI args over config-file values; track unknown keys."""

    def __init__(self, args: argparse.Namespace, cfg: dict[str, str]):
        self.args = vars(args)
        self.cfg = cfg
        self.seen: set[str] = set()

    def get(self, name: str, cast, default=None):
        self.seen.add(name)
        value = self.args.get(name.replace("-", "_"))
        if value is not None:
            return value
        if name in self.cfg:
            try:
                return cast(self.cfg[name])
            except ValueError as exc:
                raise UsageError(f"config key {name}: {exc}")
        return default

    def finish(self):
        unknown = sorted(set(self.cfg) - self.seen)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")


def _resolve_seed(r: _Resolver) -> int:
    seed = r.get("seed", int, None)
    if seed is not None:
        return seed
    env = os.environ.get("RCL_SEED", "")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"RCL_SEED is not an integer: {env!r}")
    return 0


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")
    if p > MAX_MODULUS:
        raise UsageError(f"prime {p} exceeds the supported maximum {MAX_MODULUS}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rclab",
        description="dimension counts for rational curves on hypersurfaces, "
                    "certified over finite fields")
    parser.add_argument("--version", action="version", version=f"rclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--format", choices=("text", "json", "csv"),
                       help="output format (default text)")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--seed", type=int, help="base seed (default RCL_SEED or 0)")

    p = sub.add_parser("formulas", help="closed-form dimension report for one (n, d)")
    common(p)
    p.add_argument("--n", type=int, help="ambient projective dimension")
    p.add_argument("--d", type=int, help="hypersurface degree")
    p.add_argument("--e", help="curve degree or range, e.g. 2 or 1..4")

    p = sub.add_parser("verify", help="statistical rank certification over F_p")
    common(p)
    p.add_argument("--what", choices=curvespace.CHECKS,
                   help="which certificate to run")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--e", type=int)
    p.add_argument("--prime", type=int, help=f"working prime (default {DEFAULT_PRIME})")
    p.add_argument("--trials", type=int, help="random trials per round (default 50)")
    p.add_argument("--threshold", type=int,
                   help="passes required (default trials-1; trials for line singularity)")
    p.add_argument("--any-range", action="store_const", const=True,
                   help="run dimension checks outside the stated range n >= d+2")

    p = sub.add_parser("scan", help="sweep the formula web for inconsistencies")
    common(p)
    p.add_argument("--n-max", type=int, help="largest ambient dimension (default 60)")

    p = sub.add_parser("oracle", help="brute-force counts over tiny fields")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--e", type=int)
    p.add_argument("--primes", type=_parse_int_list,
                   help="comma-separated enumeration primes, e.g. 3,5,7")
    p.add_argument("--budget", type=int,
                   help=f"max candidates per enumeration (default {oracle.DEFAULT_BUDGET})")
    p.add_argument("--samples", type=int,
                   help=f"random hypersurfaces to aggregate (default {oracle.DEFAULT_SAMPLES})")
    p.add_argument("--coeffs", type=_parse_int_list,
                   help="fixed hypersurface coefficients in canonical monomial order "
                        "(overrides random sampling)")
    p.add_argument("--tolerance", type=float,
                   help="fail (exit 1) if |slope - expected| exceeds this")
    return parser


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"missing required option --{flag}")
    return value


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _envelope(cfg: RunConfig, prime: int | None, payload: dict) -> dict:
    return {
        "tool": "rclab",
        "version": __version__,
        "command": cfg.command,
        "seed": cfg.seed,
        "prime": prime,
        **payload,
    }


# ---------------------------------------------------------------- formulas

_FORMULAS_CSV = [
    "n", "d", "e", "form_space_dim", "param_count", "obstruction_count",
    "ambient_moduli_dim", "expected_moduli_dim", "expected_fiber_dim",
    "threshold_degree", "line_singular_conditions", "singular_curve_codim",
    "smooth_boundary_dim", "singular_boundary_dim", "multiple_cover_dims",
    "excess_base_codim", "excess_recursive_codim", "excess_closed_codim", "ok",
]


def _report_ok(rep: formulas.DimReport) -> bool:
    return all(v is not False for v in rep.verdicts.values())


def cmd_formulas(cfg: RunConfig) -> int:
    reports = [formulas.dim_report(cfg.n, cfg.d, e)
               for e in range(cfg.e_min, cfg.e_max + 1)]
    ok = all(_report_ok(r) for r in reports)

    if cfg.fmt == "json":
        payload = _envelope(cfg, None, {
            "n": cfg.n, "d": cfg.d, "e_min": cfg.e_min, "e_max": cfg.e_max,
            "reports": [r.as_dict() for r in reports],
            "ok": ok,
        })
        _emit(_json_text(payload), cfg.output)
    elif cfg.fmt == "csv":
        rows = []
        for r in reports:
            d = r.as_dict()
            covers = ";".join(f"{k}:{v}" for k, v in sorted(r.multiple_cover_dims.items()))
            row = [d[c] if d.get(c) is not None else "" for c in _FORMULAS_CSV[:-5]]
            row += [covers,
                    "" if r.excess_base_codim is None else r.excess_base_codim,
                    "" if r.excess_recursive_codim is None else r.excess_recursive_codim,
                    "" if r.excess_closed_codim is None else r.excess_closed_codim,
                    _report_ok(r)]
            rows.append(row)
        _emit(_csv_text(_FORMULAS_CSV, rows), cfg.output)
    else:
        lines = [f"rclab {__version__}  formulas  n={cfg.n} d={cfg.d} "
                 f"e={cfg.e_min}..{cfg.e_max} seed={cfg.seed}"]
        head = f"{'e':>3} {'moduli':>7} {'fiber':>6} {'thresh':>7} " \
               f"{'recur':>6} {'closed':>7} {'sing.curve':>11} ok"
        lines.append(head)
        for r in reports:
            thr = "-" if r.threshold_degree is None else r.threshold_degree
            rec = "-" if r.excess_recursive_codim is None else r.excess_recursive_codim
            clo = "-" if r.excess_closed_codim is None else r.excess_closed_codim
            lines.append(f"{r.e:>3} {r.expected_moduli_dim:>7} {r.expected_fiber_dim:>6} "
                         f"{thr:>7} {rec:>6} {clo:>7} {r.singular_curve_codim:>11} "
                         f"{'yes' if _report_ok(r) else 'NO'}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_PASS if ok else EXIT_FAIL


# ---------------------------------------------------------------- verify

_VERIFY_CSV = ["round", "prime", "trial", "ok", "rank", "value", "expected",
               "invariant_ok", "t_marked", "chart"]


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.check in ("jacobian", "marked") and cfg.n < cfg.d + 2 and not cfg.any_range:
        raise UsageError(
            f"dimension checks are stated for n >= d+2; got n={cfg.n}, d={cfg.d} "
            f"(pass --any-range to run anyway)")
    if cfg.prime <= cfg.d * cfg.e:
        raise UsageError(f"prime {cfg.prime} too small: composed forms of degree "
                         f"d*e = {cfg.d * cfg.e} need a larger field")
    _check_prime(cfg.prime)

    start = time.perf_counter()
    report = curvespace.run_check(
        cfg.check, cfg.n, cfg.d, cfg.e, prime=cfg.prime, trials=cfg.trials,
        seed=cfg.seed, threshold=cfg.threshold)
    elapsed = time.perf_counter() - start

    if cfg.fmt == "json":
        payload = _envelope(cfg, cfg.prime, report.as_dict())
        # check/n/d/e/seed already present from as_dict; keep envelope copies out
        _emit(_json_text(payload), cfg.output)
    elif cfg.fmt == "csv":
        rows = []
        for ri, rnd in enumerate(report.rounds):
            for t in rnd.trials:
                rows.append([ri, rnd.prime, t.trial, t.ok, t.rank,
                             "" if t.value is None else t.value,
                             "" if t.expected is None else t.expected,
                             t.invariant_ok,
                             "" if t.t_marked is None else t.t_marked,
                             "" if t.chart is None else t.chart])
        _emit(_csv_text(_VERIFY_CSV, rows), cfg.output)
    else:
        lines = [f"rclab {__version__}  verify {report.check}  n={cfg.n} d={cfg.d} "
                 f"e={cfg.e} prime={cfg.prime} trials={cfg.trials} seed={cfg.seed}"]
        for ri, rnd in enumerate(report.rounds):
            lines.append(f"round {ri} (prime {rnd.prime}): "
                         f"{rnd.passes}/{len(rnd.trials)} passed, threshold {rnd.threshold}")
            for t in rnd.trials:
                val = "" if t.value is None else f" value {t.value} (expected {t.expected})"
                mark = "" if t.t_marked is None else f" t={t.t_marked} chart={t.chart}"
                flag = "ok" if t.ok else "ANOMALY"
                lines.append(f"  trial {t.trial:>3}: rank {t.rank}{val}{mark}  {flag}")
        lines.append(f"verdict: {'PASS' if report.verdict else 'FAIL'}"
                     f" (invariant {'held' if report.invariant_ok else 'VIOLATED'})")
        lines.append(f"elapsed_seconds: {elapsed:.3f}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_PASS if report.verdict else EXIT_FAIL


# ---------------------------------------------------------------- scan

_SCAN_CSV = ["n", "d", "e", "check", "value"]


def cmd_scan(cfg: RunConfig) -> int:
    start = time.perf_counter()
    result = formulas.consistency_scan(cfg.n_max)
    elapsed = time.perf_counter() - start

    if cfg.fmt == "json":
        payload = _envelope(cfg, None, {
            "n_max": result.n_max,
            "cases_scanned": result.cases_scanned,
            "violations": [dict(v) for v in result.violations],
            "ok": result.ok,
        })
        _emit(_json_text(payload), cfg.output)
    elif cfg.fmt == "csv":
        rows = [[v["n"], v["d"], v["e"], v["check"], repr(v["value"])]
                for v in result.violations]
        _emit(_csv_text(_SCAN_CSV, rows), cfg.output)
    else:
        lines = [f"rclab {__version__}  scan  n_max={result.n_max} seed={cfg.seed}",
                 f"cases scanned: {result.cases_scanned}",
                 f"violations: {len(result.violations)}"]
        for v in result.violations:
            lines.append(f"  (n={v['n']}, d={v['d']}, e={v['e']}): "
                         f"{v['check']} value {v['value']}")
        lines.append(f"elapsed_seconds: {elapsed:.3f}")
        _emit("\n".join(lines) + "\n", cfg.output)
    return EXIT_PASS if result.ok else EXIT_FAIL


# ---------------------------------------------------------------- oracle

_ORACLE_CSV = ["prime", "count"]


def cmd_oracle(cfg: RunConfig) -> int:
    for q in cfg.primes:
        _check_prime(q)
    start = time.perf_counter()
    if cfg.coeffs is not None:
        profile = oracle.fixed_profile(cfg.n, cfg.d, cfg.e, cfg.primes, cfg.coeffs,
                                       seed=cfg.seed, budget=cfg.budget)
    else:
        profile = oracle.count_profile(cfg.n, cfg.d, cfg.e, cfg.primes,
                                       seed=cfg.seed, budget=cfg.budget,
                                       samples=cfg.samples)
    elapsed = time.perf_counter() - start

    slope = profile.slope() if len(profile.counts) >= 2 else None
    within = None
    if cfg.tolerance is not None and slope is not None:
        within = abs(slope - profile.expected_exponent) <= cfg.tolerance

    if cfg.fmt == "json":
        payload = _envelope(cfg, None, {
            "n": cfg.n, "d": cfg.d, "e": cfg.e,
            "primes": list(cfg.primes),
            "budget": cfg.budget,
            "samples": profile.samples,
            "coeffs": cfg.coeffs,
            "counts": [[q, c] for q, c in profile.counts],
            "expected_exponent": profile.expected_exponent,
            "slope": slope,
            "tolerance": cfg.tolerance,
            "within_tolerance": within,
        })
        _emit(_json_text(payload), cfg.output)
    elif cfg.fmt == "csv":
        rows = [[q, c] for q, c in profile.counts]
        _emit(_csv_text(_ORACLE_CSV, rows), cfg.output)
    else:
        lines = [f"rclab {__version__}  oracle  n={cfg.n} d={cfg.d} e={cfg.e} "
                 f"seed={cfg.seed} samples={profile.samples}"]
        for q, c in profile.counts:
            lines.append(f"  q={q:>3}: {c} solutions")
        if slope is not None:
            lines.append(f"slope: {slope:.4f} (expected exponent "
                         f"{profile.expected_exponent})")
            if within is not None:
                lines.append(f"within tolerance {cfg.tolerance}: "
                             f"{'yes' if within else 'NO'}")
        lines.append(f"elapsed_seconds: {elapsed:.3f}")
        _emit("\n".join(lines) + "\n", cfg.output)
    if within is False:
        return EXIT_FAIL
    return EXIT_PASS


# ---------------------------------------------------------------- driver

def _build_config(args: argparse.Namespace) -> RunConfig:
    cfgfile = load_config_file(args.config) if args.config else {}
    r = _Resolver(args, cfgfile)
    command = args.command
    fmt = r.get("format", str, "text")
    if fmt not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {fmt!r}")
    output = r.get("output", str, None)
    seed = _resolve_seed(r)
    cfg = RunConfig(command=command, fmt=fmt, output=output, seed=seed)

    if command == "formulas":
        cfg.n = _require(r.get("n", int), "n")
        cfg.d = _require(r.get("d", int), "d")
        e_raw = _require(r.get("e", str), "e")
        try:
            cfg.e_min, cfg.e_max = _parse_e_range(str(e_raw))
        except ValueError as exc:
            raise UsageError(str(exc))
        if cfg.n < 2 or cfg.d < 1:
            raise UsageError(f"need n >= 2 and d >= 1, got n={cfg.n}, d={cfg.d}")
    elif command == "verify":
        cfg.check = _require(r.get("what", str), "what")
        if cfg.check not in curvespace.CHECKS:
            raise UsageError(f"unknown check {cfg.check!r}")
        cfg.n = _require(r.get("n", int), "n")
        cfg.d = _require(r.get("d", int), "d")
        cfg.e = _require(r.get("e", int), "e")
        cfg.prime = r.get("prime", int, DEFAULT_PRIME)
        cfg.trials = r.get("trials", int, 50)
        cfg.threshold = r.get("threshold", int, None)
        cfg.any_range = bool(r.get("any-range", _parse_bool, False))
        if cfg.n < 2 or cfg.d < 1 or cfg.e < 1 or cfg.trials < 1:
            raise UsageError("need n >= 2, d >= 1, e >= 1, trials >= 1")
    elif command == "scan":
        cfg.n_max = r.get("n-max", int, 60)
        if cfg.n_max < 0:
            raise UsageError("n-max must be nonnegative")
    elif command == "oracle":
        cfg.n = _require(r.get("n", int), "n")
        cfg.d = _require(r.get("d", int), "d")
        cfg.e = _require(r.get("e", int), "e")
        cfg.primes = r.get("primes", _parse_int_list, None)
        if not cfg.primes:
            raise UsageError("missing required option --primes")
        cfg.budget = r.get("budget", int, oracle.DEFAULT_BUDGET)
        cfg.samples = r.get("samples", int, oracle.DEFAULT_SAMPLES)
        cfg.coeffs = r.get("coeffs", _parse_int_list, None)
        cfg.tolerance = r.get("tolerance", float, None)
        if cfg.n < 2 or cfg.d < 1 or cfg.e < 1:
            raise UsageError("need n >= 2, d >= 1, e >= 1")
        if cfg.samples < 1 or cfg.budget < 1:
            raise UsageError("samples and budget must be positive")
    r.finish()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the message; normalize --version/-h to 0
        return int(exc.code or 0)
    try:
        cfg = _build_config(args)
        if cfg.command == "formulas":
            return cmd_formulas(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        if cfg.command == "scan":
            return cmd_scan(cfg)
        return cmd_oracle(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.BudgetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ValueError, curvespace.InconsistentMarkingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
