"""Command-line interface.

    frobpp test N [--a A --b B --c C]
    frobpp liars N C
    frobpp gcd Q C [--a A --b B]
    frobpp scan {split,prime-power} [--c-max 128] [--p-min 3] --p-max P
    frobpp search-q --primes P1,P2 --c C --n-max N
    frobpp exclude [--c-max 128] --n-max N [--small-factor-bound 17] [--q-max 4096]
    frobpp verify REPORT

Every option may also come from ``--config FILE``: plain ``key = value``
lines, ``#`` comments, keys spelled like the long options (``n-max`` or
``n_max``).  Flags given on the command line win over the file.

Exit status of ``test``: 0 probable prime, 1 composite, 2 confirmed FPP
certificate, 4 congruence held but compositeness could not be confirmed by
factorization, 3 error.  Other commands exit 0 on success, 1 when the
outcome is negative (failed verification, counterexample found) and 3 on
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

from .divsieve.crtsearch import crt_q_search
from .divsieve.gcdcand import gcd_candidates
from .divsieve.pipeline import default_c_values, exclusion_pipeline
from .divsieve.report import FORMAT_VERSION
from .divsieve.scans import PRIME_POWER, SPLIT, run_scan
from .frobtest import (
    C_CUTOFF,
    COMPOSITE,
    FPP_CERTIFICATE,
    FPP_UNCONFIRMED,
    PROBABLE_PRIME,
    count_liars,
    frobenius_test,
    frobenius_test_abc,
)
from .ntkernel import RHO_ITERATIONS, SEGMENT_SIZE, TRIAL_BOUND
from .verify import ReportFormatError, verify_file

EXIT_CODES = {PROBABLE_PRIME: 0, COMPOSITE: 1, FPP_CERTIFICATE: 2, FPP_UNCONFIRMED: 4}
EXIT_ERROR = 3


@dataclass
class RunConfig:
    n_max: int = 10**6
    c_max: int = 128
    c_cutoff: int = C_CUTOFF
    p_lo: int = 3
    p_hi: int = 10**5
    q_max: int = 1 << 12
    small_factor_bound: int = 17
    trial_bound: int = TRIAL_BOUND
    rho_iterations: int = RHO_ITERATIONS
    seed: int = 0
    workers: int = 1
    segment_size: int = SEGMENT_SIZE
    output: str | None = None
    format: str = "json"

    def validate(self) -> None:
        for name in ("n_max", "c_max", "c_cutoff", "p_lo", "p_hi", "q_max",
                     "small_factor_bound", "trial_bound", "rho_iterations", "workers", "segment_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name.replace('_', '-')} must be positive")
        if self.p_lo > self.p_hi:
            raise ValueError("p-min must not exceed p-max")
        if self.format not in ("json", "csv", "human"):
            raise ValueError(f"unknown format {self.format!r}")

    def budget(self) -> dict[str, int]:
        return {"trial_bound": self.trial_bound, "rho_iterations": self.rho_iterations, "seed": self.seed}


_CONFIG_FIELDS = {f for f in RunConfig.__dataclass_fields__}
_INT_FIELDS = _CONFIG_FIELDS - {"output", "format"}


def read_config_file(path: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        key = {"p_min": "p_lo", "p_max": "p_hi"}.get(key, key)
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = int(value) if key in _INT_FIELDS else value
    return values


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--n-max", dest="n_max", type=int, default=argparse.SUPPRESS)
    g.add_argument("--c-max", dest="c_max", type=int, default=argparse.SUPPRESS,
                   help="radicands are taken below this bound")
    g.add_argument("--c-cutoff", dest="c_cutoff", type=int, default=argparse.SUPPRESS,
                   help="largest c tried when selecting c for a test")
    g.add_argument("--p-min", "--p-lo", dest="p_lo", type=int, default=argparse.SUPPRESS)
    g.add_argument("--p-max", "--p-hi", dest="p_hi", type=int, default=argparse.SUPPRESS)
    g.add_argument("--q-max", dest="q_max", type=int, default=argparse.SUPPRESS)
    g.add_argument("--small-factor-bound", dest="small_factor_bound", type=int, default=argparse.SUPPRESS)
    g.add_argument("--trial-bound", dest="trial_bound", type=int, default=argparse.SUPPRESS)
    g.add_argument("--rho-iterations", dest="rho_iterations", type=int, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    g.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    g.add_argument("--segment-size", dest="segment_size", type=int, default=argparse.SUPPRESS)
    g.add_argument("--output", default=argparse.SUPPRESS, help="report path")
    g.add_argument("--format", choices=("json", "csv", "human"), default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frobpp", description="Frobenius pseudoprime tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="Frobenius test of one integer")
    p.add_argument("n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--c", type=int)
    _common(p)

    p = sub.add_parser("liars", help="count Frobenius liars modulo n")
    p.add_argument("n", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--collect", action="store_true", help="list every liar in the report")
    _common(p)

    p = sub.add_parser("gcd", help="candidate primes p for an FPP n = p*q")
    p.add_argument("q", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    _common(p)

    p = sub.add_parser("scan", help="scan a prime range")
    p.add_argument("kind", choices=("split", "prime-power"))
    p.add_argument("--c-list", dest="c_list", type=_int_list, help="comma-separated radicands")
    p.add_argument("--squarefree", action="store_true",
                   help="use every square-free c below c-max instead of the odd primes")
    p.add_argument("--checkpoint", help="append-only JSON-lines checkpoint file")
    _common(p)

    p = sub.add_parser("search-q", help="enumerate cofactors for fixed prime factors")
    p.add_argument("--primes", type=_int_list, required=True)
    p.add_argument("--c", type=int, required=True)
    _common(p)

    p = sub.add_parser("exclude", help="run the layered exclusion pipeline")
    p.add_argument("--c-list", dest="c_list", type=_int_list)
    p.add_argument("--squarefree", action="store_true")
    p.add_argument("--heavy-threshold", dest="heavy_threshold", type=int, default=10**5)
    _common(p)

    p = sub.add_parser("verify", help="re-verify a report by recomputation")
    p.add_argument("report")
    _common(p)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _CONFIG_FIELDS:
        if name in vars(args):
            values[name] = getattr(args, name)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _dump(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, indent=1) + "\n"


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)


def _report(cfg: RunConfig, kind: str, body: dict[str, Any]) -> dict[str, Any]:
    return {"format_version": FORMAT_VERSION, "report": kind, "run_config": asdict(cfg), **body}


def _radicands(args, cfg: RunConfig) -> list[int]:
    if getattr(args, "c_list", None):
        return sorted(set(args.c_list))
    return default_c_values(cfg.c_max, getattr(args, "squarefree", False))


def cmd_test(args, cfg: RunConfig) -> int:
    given = [args.a, args.b, args.c]
    if any(x is not None for x in given) and not all(x is not None for x in given):
        raise ValueError("--a, --b and --c must be given together")
    if args.c is not None:
        verdict = frobenius_test_abc(args.n, args.a, args.b, args.c, **cfg.budget())
        mode = "abc"
    else:
        verdict = frobenius_test(args.n, cfg.c_cutoff, **cfg.budget())
        mode = "canonical"
    rec = _report(cfg, "verdict", {"mode": mode, "verdict": verdict.to_record()})
    _write(cfg, _dump(rec))
    if cfg.format == "human":
        print(f"{verdict.n}: {verdict.kind} (c={verdict.c_used})")
    else:
        print(verdict.to_json())
    return EXIT_CODES[verdict.kind]


def cmd_liars(args, cfg: RunConfig) -> int:
    census = count_liars(args.n, args.c, collect=args.collect or cfg.format == "csv",
                         workers=cfg.workers)
    if cfg.format == "csv":
        _write(cfg, census.to_csv())
    else:
        _write(cfg, _dump(_report(cfg, "liars", {"census": census.to_record()})))
    print(f"liars={census.liar_count} coprime={census.coprime_liar_count}")
    return 0


def cmd_gcd(args, cfg: RunConfig) -> int:
    rep = gcd_candidates(args.q, args.a, args.b, args.c, **cfg.budget())
    _write(cfg, _dump(_report(cfg, "gcd", {"gcd": rep.to_record()})))
    cands = ",".join(map(str, rep.candidate_primes))
    print(f"q={rep.q} c={rep.c} branch={rep.branch} gcd={rep.gcd_value} candidates={cands}"
          + ("" if rep.unfactored_cofactor == 1 else f" unfactored={rep.unfactored_cofactor}"))
    return 0


def cmd_scan(args, cfg: RunConfig) -> int:
    kind = SPLIT if args.kind == "split" else PRIME_POWER
    report = run_scan(kind, _radicands(args, cfg), cfg.p_lo, cfg.p_hi, seed=cfg.seed,
                      trial_bound=cfg.trial_bound, rho_iterations=cfg.rho_iterations,
                      segment_size=cfg.segment_size, workers=cfg.workers,
                      checkpoint=args.checkpoint)
    if cfg.format == "csv":
        buf = io.StringIO()
        extra = sorted({k for h in report.hits for k in h} - {"p", "c"})
        fields = ["p", "c", *extra]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(report.hits)
        _write(cfg, buf.getvalue())
    else:
        rec = report.to_record()
        rec["run_config"] = asdict(cfg)
        _write(cfg, _dump(rec))
    hits = " ".join(f"{h['p']}(c={h['c']})" for h in report.hits)
    print(f"scan {args.kind}: {len(report.hits)} hits, {len(report.skipped)} skipped, "
          f"complete={report.complete}" + (f": {hits}" if hits else ""))
    return 0


def cmd_search_q(args, cfg: RunConfig) -> int:
    res = crt_q_search(args.primes, args.c, cfg.n_max, **cfg.budget())
    _write(cfg, _dump(_report(cfg, "search-q", {"search": res.to_record()})))
    print(f"primes={','.join(map(str, res.primes))} c={res.c} status={res.status} "
          f"candidates={res.candidates} tested={res.tested} passing={len(res.passing)}")
    return 1 if res.passing else 0


def cmd_exclude(args, cfg: RunConfig) -> int:
    rec = exclusion_pipeline(cfg.c_max, cfg.n_max, cfg.small_factor_bound, cfg.q_max,
                             c_values=_radicands(args, cfg), heavy_threshold=args.heavy_threshold,
                             workers=cfg.workers, **cfg.budget())
    rec["run_config"] = asdict(cfg)
    _write(cfg, _dump(rec))
    claim = rec["claim"]
    print(f"{'HOLDS' if claim['holds'] else 'NOT ESTABLISHED'}: {claim['statement']}; "
          f"certificates={len(rec['certificates'])} unverified={len(rec['unverified'])}")
    return 0 if claim["holds"] else 1


def cmd_verify(args, cfg: RunConfig) -> int:
    result = verify_file(args.report)
    for msg in result.problems:
        print(f"FAIL {msg}")
    print(f"{'pass' if result.ok else 'fail'}: {result.kind} report, {result.checked} items rechecked")
    return 0 if result.ok else 1


COMMANDS = {
    "test": cmd_test,
    "liars": cmd_liars,
    "gcd": cmd_gcd,
    "scan": cmd_scan,
    "search-q": cmd_search_q,
    "exclude": cmd_exclude,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except ReportFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
