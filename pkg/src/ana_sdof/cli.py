"""Command-line front end.

Exit codes: 0 success / verification passed, 1 verification failed,
2 usage error or input outside a formula's range.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .ana_schemes import SchemeKind, UnsupportedConfigError, build_precoders, build_scheme, phase_plan
from .channel_model import sample_states
from .dof_analysis import DEFAULT_GRID_DB, SnrGrid, monte_carlo_sdof, trial_seed, verify_ranks
from .entropy_oracle import (
    HypothesisViolation,
    non_exchangeable_example,
    random_sources,
    verify_essential_lemma,
)
from .sdof_theory import (
    AntennaConfig,
    CsitMode,
    OutOfRangeError,
    bc_dof_region_delayed,
    bcc_region_delayed,
    bcc_region_perfect,
    format_rational,
    sdof_wiretap,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-10
SEED_ENV = "ANA_DOF_SEED"

REGIONS = {
    "sdof-delayed": bcc_region_delayed,
    "sdof-perfect": bcc_region_perfect,
    "dof-delayed": bc_dof_region_delayed,
}


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer")
    if not 0 <= value < 2**64:
        raise UsageError(f"{SEED_ENV} must be a 64-bit unsigned integer")
    return value


# ---------------------------------------------------------------------------
# run configs


@dataclass(frozen=True)
class SdofConfig:
    cfg: AntennaConfig
    mode: CsitMode


@dataclass(frozen=True)
class SweepConfig:
    nA: int
    nB: int
    m_min: int = 1
    m_max: int = 8
    modes: tuple[CsitMode, ...] = tuple(CsitMode)

    def validate(self):
        if self.m_min < 1 or self.m_max < self.m_min:
            raise UsageError("need 1 <= m-min <= m-max")
        AntennaConfig(1, self.nA, self.nB)


@dataclass(frozen=True)
class RegionConfig:
    cfg: AntennaConfig
    which: str = "sdof-delayed"
    fmt: str = "json"


@dataclass(frozen=True)
class SimulateConfig:
    kind: SchemeKind
    cfg: AntennaConfig
    trials: int = 10
    grid_db: tuple[float, ...] = DEFAULT_GRID_DB
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    artificial_noise: bool = True

    def validate(self):
        if self.trials < 1:
            raise UsageError("trials must be >= 1")
        if self.tol <= 0:
            raise UsageError("tol must be positive")
        try:
            SnrGrid.from_db(self.grid_db)
        except ValueError as exc:
            raise UsageError(str(exc))


@dataclass(frozen=True)
class LemmaConfig:
    count: int = 1000
    L_max: int = 5
    q: int = 2
    seed: int = DEFAULT_SEED
    tol: float = 1e-9
    inject_nonexchangeable: bool = False

    def validate(self):
        if self.count < 0:
            raise UsageError("count must be >= 0")
        if not 2 <= self.L_max <= 6:
            raise UsageError("l-max must lie in [2, 6]")
        if not 2 <= self.q <= 4:
            raise UsageError("q must lie in [2, 4]")
        if self.tol <= 0:
            raise UsageError("tol must be positive")


# ---------------------------------------------------------------------------
# commands; each returns (exit code, output text)


def cmd_sdof(rc: SdofConfig) -> tuple[int, str]:
    value = sdof_wiretap(rc.cfg, rc.mode)
    text = format_rational(value)
    if value.denominator != 1:
        text += f" ≈ {float(value):.6f}"
    return EXIT_OK, text + "\n"


def cmd_sweep(rc: SweepConfig) -> tuple[int, str]:
    rc.validate()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "mode", "sdof_num", "sdof_den", "sdof_float"])
    for m in range(rc.m_min, rc.m_max + 1):
        cfg = AntennaConfig(m, rc.nA, rc.nB)
        for mode in rc.modes:
            try:
                v = sdof_wiretap(cfg, mode)
            except OutOfRangeError:
                # no value is stated for this range; keep the row, leave it blank
                writer.writerow([m, mode.value, "", "", ""])
                continue
            writer.writerow([m, mode.value, v.numerator, v.denominator, f"{float(v):.6f}"])
    return EXIT_OK, buf.getvalue()


def region_record(rc: RegionConfig) -> dict:
    region = REGIONS[rc.which](rc.cfg)
    return {
        "which": rc.which,
        "cfg": {"m": rc.cfg.m, "nA": rc.cfg.nA, "nB": rc.cfg.nB},
        "halfplanes": [
            {"a": format_rational(a), "b": format_rational(b), "c": format_rational(c)}
            for a, b, c in region.halfplanes
        ],
        "vertices": [
            {
                "dA": format_rational(x),
                "dB": format_rational(y),
                "dA_float": round(float(x), 6),
                "dB_float": round(float(y), 6),
            }
            for x, y in region.vertices
        ],
    }


def cmd_region(rc: RegionConfig) -> tuple[int, str]:
    record = region_record(rc)
    if rc.fmt == "json":
        return EXIT_OK, _dump_json(record)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["record", "index", "a", "b", "c"])
    for i, h in enumerate(record["halfplanes"]):
        writer.writerow(["halfplane", i, h["a"], h["b"], h["c"]])
    for i, v in enumerate(record["vertices"]):
        writer.writerow(["vertex", i, v["dA"], v["dB"], ""])
    return EXIT_OK, buf.getvalue()


def simulate_record(rc: SimulateConfig) -> dict:
    rc.validate()
    grid = SnrGrid.from_db(rc.grid_db)
    est = monte_carlo_sdof(rc.kind, rc.cfg, rc.trials, grid, rc.seed, rc.artificial_noise)
    plan = phase_plan(rc.kind, rc.cfg)
    precoders = build_precoders(rc.kind, rc.cfg, plan)
    rank_ok = 0
    for i in range(rc.trials):
        scheme = build_scheme(rc.kind, rc.cfg, sample_states(rc.cfg.capped(), plan.total, trial_seed(rc.seed, i)), precoders)
        rank_ok += verify_ranks(scheme, rc.tol).passed
    record = est.to_record()
    record["seed"] = rc.seed
    record["taus"] = list(plan.taus)
    record["rank_checks_passed"] = rank_ok
    record["pass"] = bool(record["pass"] and rank_ok == rc.trials)
    return record


def cmd_simulate(rc: SimulateConfig) -> tuple[int, str]:
    record = simulate_record(rc)
    return (EXIT_OK if record["pass"] else EXIT_FAIL), _dump_json(record)


def lemma_record(rc: LemmaConfig) -> dict:
    rc.validate()
    sources = list(random_sources(rc.count, rc.L_max, rc.q, rc.seed))
    if rc.inject_nonexchangeable:
        sources.append(non_exchangeable_example())
    checked = failures = 0
    violations = []
    worst1 = worst2 = 0.0
    counterexamples = []
    for i, src in enumerate(sources):
        try:
            report = verify_essential_lemma(src, rc.tol)
        except HypothesisViolation as exc:
            violations.append({"index": i, "reason": str(exc)})
            continue
        checked += 1
        worst1 = min(worst1, report.worst_margin_ess1)
        worst2 = min(worst2, report.worst_margin_ess2)
        if not report.passed:
            failures += 1
            counterexamples.append(report.to_record())
    return {
        "count": rc.count,
        "L_max": rc.L_max,
        "q": rc.q,
        "seed": rc.seed,
        "tol": rc.tol,
        "checked": checked,
        "failures": failures,
        "worst_margin_ess1": worst1,
        "worst_margin_ess2": worst2,
        "hypothesis_violations": violations,
        "counterexamples": counterexamples,
        "pass": failures == 0,
    }


def cmd_verify_lemma(rc: LemmaConfig) -> tuple[int, str]:
    record = lemma_record(rc)
    return (EXIT_OK if record["pass"] else EXIT_FAIL), _dump_json(record)


def _dump_json(record) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _antenna_args(p: argparse.ArgumentParser):
    p.add_argument("--m", type=int, required=True, help="transmit antennas")
    p.add_argument("--na", type=int, required=True, help="receiver A antennas")
    p.add_argument("--nb", type=int, required=True, help="receiver B antennas")


def _output_args(p: argparse.ArgumentParser, formats: Sequence[str] = ()):
    p.add_argument("--out", help="write to this file instead of stdout")
    if formats:
        p.add_argument("--format", choices=formats, default=formats[0])


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected comma-separated dB values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ana-sdof",
        description="Secrecy DoF of the two-user MIMO broadcast channel with delayed CSIT.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sdof", help="wiretap SDoF for one antenna configuration")
    _antenna_args(p)
    p.add_argument("--csit", required=True, help="perfect | delayed | partial | none")
    _output_args(p)

    p = sub.add_parser("sweep", help="CSV of wiretap SDoF over a range of m")
    p.add_argument("--na", type=int, required=True)
    p.add_argument("--nb", type=int, required=True)
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--csit", action="append", help="repeatable; default: all four modes")
    _output_args(p)

    p = sub.add_parser("region", help="half-planes and vertices of a DoF/SDoF region")
    _antenna_args(p)
    p.add_argument("--which", choices=sorted(REGIONS), default="sdof-delayed")
    _output_args(p, ("json", "csv"))

    p = sub.add_parser("simulate", help="Monte-Carlo pre-log check of an ANA scheme")
    p.add_argument("--kind", choices=[k.value for k in SchemeKind], required=True)
    _antenna_args(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--grid-db", type=_grid, default=DEFAULT_GRID_DB)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative rank threshold")
    p.add_argument("--no-artificial-noise", action="store_true")
    _output_args(p, ("json",))

    p = sub.add_parser("verify-lemma", help="search for counterexamples to the subset-entropy inequalities")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--l-max", type=int, default=5)
    p.add_argument("--q", type=int, default=2, help="largest alphabet size drawn")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--inject-nonexchangeable", action="store_true", help=argparse.SUPPRESS)
    _output_args(p, ("json",))

    p = sub.add_parser("dump-channel", help="JSON dump of a seeded channel realization")
    _antenna_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    _output_args(p, ("json",))

    p = sub.add_parser("layout", help="block shapes and sparsity masks of a scheme")
    p.add_argument("--kind", choices=[k.value for k in SchemeKind], required=True)
    _antenna_args(p)
    p.add_argument("--seed", type=int)
    _output_args(p, ("json",))
    return parser


def _cfg(args) -> AntennaConfig:
    try:
        return AntennaConfig(args.m, args.na, args.nb)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))


def _seed(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return seed


def _mode(text: str) -> CsitMode:
    try:
        return CsitMode.parse(text)
    except ValueError:
        raise UsageError(f"unknown CSIT mode {text!r}")


def dispatch(args) -> tuple[int, str]:
    if args.command == "sdof":
        return cmd_sdof(SdofConfig(_cfg(args), _mode(args.csit)))
    if args.command == "sweep":
        modes = tuple(_mode(c) for c in args.csit) if args.csit else tuple(CsitMode)
        return cmd_sweep(SweepConfig(args.na, args.nb, args.m_min, args.m_max, modes))
    if args.command == "region":
        return cmd_region(RegionConfig(_cfg(args), args.which, args.format))
    if args.command == "simulate":
        rc = SimulateConfig(
            SchemeKind(args.kind),
            _cfg(args),
            args.trials,
            args.grid_db,
            _seed(args),
            args.tol,
            not args.no_artificial_noise,
        )
        return cmd_simulate(rc)
    if args.command == "verify-lemma":
        rc = LemmaConfig(args.count, args.l_max, args.q, _seed(args), args.tol, args.inject_nonexchangeable)
        return cmd_verify_lemma(rc)
    if args.command == "dump-channel":
        if args.n < 1:
            raise UsageError("n must be >= 1")
        return EXIT_OK, sample_states(_cfg(args), args.n, _seed(args)).to_json() + "\n"
    if args.command == "layout":
        kind, cfg = SchemeKind(args.kind), _cfg(args)
        plan = phase_plan(kind, cfg)
        scheme = build_scheme(kind, cfg, sample_states(cfg.capped(), plan.total, _seed(args)), build_precoders(kind, cfg, plan))
        return EXIT_OK, _dump_json(scheme.layout())
    raise UsageError(f"unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = dispatch(args)
    except (UsageError, OutOfRangeError, UnsupportedConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
