"""Command-line interface: mining, attribute generation, stats, DOT export.

Subcommands::

    mddmine mine --db clicks.spmf --attrs clicks.tsv --min-sup 0.01 \\
        --constraint "gap(time)>=30" --constraint "avg(price)<=70" --miner mpp
    mddmine gen-attrs --db clicks.spmf --seed 7 --output clicks.tsv
    mddmine stats --db clicks.spmf
    mddmine export-dot --db clicks.spmf --attrs clicks.tsv --output clicks.dot

Minimum support is an absolute count, or a fraction of the sequence count
when it contains a decimal point (converted by ceiling, so 4% of 80 rounds
up to 4).  Scenario presets install fixed constraint sets over time, price,
and quality attributes.  With ``--emit-stats`` a run report (phase wall
times and miner counters, tab-separated) is written next to the output.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .constraints import parse_constraint
from .mdd import build_mdd, export_dot
from .miner import MiningCounters, mine
from .nodeinfo import propagate
from .oracle import mine_bruteforce, mine_ppcc
from .seqdb import (
    DEFAULT_PROFILE,
    SeqDbError,
    attach_attributes,
    format_attribute_tsv,
    generate_attributes,
    parse_attribute_tsv,
    parse_spmf,
    stats,
)

SCENARIO_TIME = (
    "gap(time)>=30", "gap(time)<=900", "span(time)>=900", "span(time)<=3600",
)
SCENARIO_PRICE = (
    "avg(price)>=30", "avg(price)<=70", "med(price)>=40", "med(price)<=60",
)
SCENARIO_QUALITY = (
    "avg(quality)>=40", "avg(quality)<=60", "med(quality)>=30", "med(quality)<=70",
)
SCENARIOS = {
    1: SCENARIO_TIME,
    2: SCENARIO_TIME + SCENARIO_PRICE,
    3: SCENARIO_TIME + SCENARIO_PRICE + SCENARIO_QUALITY,
}


@dataclass
class RunConfig:
    command: str
    db_path: str
    attrs_path: str | None = None
    miner: str = "mpp"
    min_support: str = "1"
    constraints: tuple[str, ...] = ()
    scenario: int | None = None
    output: str = "-"
    report: str | None = None
    seed: int = 0
    profile: str = "time:time,price:uniform,quality:uniform"
    ordering_attr: str | None = None
    disable_prop5: bool = False
    median_pareto: bool = False
    emit_stats: bool = False
    threads: int = 1
    max_len: int | None = None


def _parse_min_support(text: str):
    """Return ("abs", n) or ("frac", fraction); raise ValueError if invalid."""
    if "." in text or "/" in text:
        frac = Fraction(text)
        if not 0 < frac <= 1:
            raise ValueError("fractional minimum support must be in (0, 1]")
        return ("frac", frac)
    value = int(text)
    if value < 1:
        raise ValueError("absolute minimum support must be at least 1")
    return ("abs", value)


def _resolve_theta(min_support: str, n_sequences: int) -> int:
    kind, value = _parse_min_support(min_support)
    if kind == "abs":
        return value
    return max(1, math.ceil(value * n_sequences))


def _load_db(config: RunConfig):
    db = parse_spmf(Path(config.db_path).read_text())
    if config.attrs_path:
        table = parse_attribute_tsv(Path(config.attrs_path).read_text())
        ordering = config.ordering_attr
        if ordering is None and "time" in table.names:
            ordering = "time"
        if ordering == "none":
            ordering = None
        db = attach_attributes(db, table, ordering_attribute=ordering)
    return db


def _specs_from(config: RunConfig):
    texts = list(config.constraints)
    if config.scenario is not None:
        texts.extend(SCENARIOS[config.scenario])
    return tuple(parse_constraint(t) for t in texts)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _cmd_mine(config: RunConfig) -> int:
    db = _load_db(config)
    specs = _specs_from(config)
    theta = _resolve_theta(config.min_support, len(db))
    counters = MiningCounters()
    build_s = prop_s = 0.0
    t0 = time.perf_counter()
    if config.miner == "mpp":
        mdd = build_mdd(db, specs)
        t1 = time.perf_counter()
        store = propagate(mdd, db, specs, pareto_median=config.median_pareto)
        t2 = time.perf_counter()
        patterns = mine(
            mdd, store, db, specs, theta,
            use_prop5=not config.disable_prop5,
            counters=counters, threads=config.threads,
        )
        t3 = time.perf_counter()
        build_s, prop_s, mine_s = t1 - t0, t2 - t1, t3 - t2
    elif config.miner == "ppcc":
        patterns = mine_ppcc(
            db, specs, theta,
            counters=counters, use_prop5=not config.disable_prop5,
        )
        mine_s = time.perf_counter() - t0
    elif config.miner == "brute":
        patterns = mine_bruteforce(db, specs, theta, max_len=config.max_len)
        mine_s = time.perf_counter() - t0
    else:
        raise ValueError(f"unknown miner {config.miner!r}")

    _write(config.output, patterns.render())
    if config.emit_stats:
        report = _format_report(build_s, prop_s, mine_s, counters, len(patterns))
        if config.report:
            _write(config.report, report)
        elif config.output != "-":
            _write(config.output + ".report.tsv", report)
        else:
            sys.stderr.write(report)
    return 0


def _format_report(build_s, prop_s, mine_s, counters: MiningCounters, written: int) -> str:
    rows = [
        ("mdd_build_seconds", f"{build_s:.6f}"),
        ("info_prop_seconds", f"{prop_s:.6f}"),
        ("mining_seconds", f"{mine_s:.6f}"),
        ("nodes_visited", counters.nodes_visited),
        ("entries_created", counters.entries_created),
        ("scanned_sequences", counters.scanned_sequences),
        ("constraint_checks", counters.constraint_checks),
        ("info_probes", counters.info_probes),
        ("patterns_emitted", counters.patterns_emitted),
        ("peak_entries", counters.peak_entries),
        ("patterns_written", written),
    ]
    return "\n".join(f"{k}\t{v}" for k, v in rows) + "\n"


def _parse_profile(text: str):
    pairs = []
    for part in text.split(","):
        name, _, kind = part.partition(":")
        if not name or kind not in ("time", "uniform"):
            raise ValueError(
                f"bad profile entry {part!r}; expected name:time or name:uniform"
            )
        pairs.append((name, kind))
    return tuple(pairs)


def _cmd_gen_attrs(config: RunConfig) -> int:
    db = parse_spmf(Path(config.db_path).read_text())
    profile = _parse_profile(config.profile) if config.profile else DEFAULT_PROFILE
    table = generate_attributes(db, config.seed, profile)
    _write(config.output, format_attribute_tsv(table))
    return 0


def _cmd_stats(config: RunConfig) -> int:
    db = _load_db(config)
    s = stats(db)
    lines = [
        f"n_sequences\t{s.n_sequences}",
        f"n_items\t{s.n_items}",
        f"max_len\t{s.max_len}",
        f"avg_len\t{s.avg_len}",
    ]
    _write(config.output, "\n".join(lines) + "\n")
    return 0


def _cmd_export_dot(config: RunConfig) -> int:
    db = _load_db(config)
    specs = _specs_from(config)
    mdd = build_mdd(db, specs)
    _write(config.output, export_dot(mdd))
    return 0


_COMMANDS = {
    "mine": _cmd_mine,
    "gen-attrs": _cmd_gen_attrs,
    "stats": _cmd_stats,
    "export-dot": _cmd_export_dot,
}


def run(config: RunConfig) -> int:
    """Execute one configured command; returns a process exit status."""
    try:
        return _COMMANDS[config.command](config)
    except (SeqDbError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mddmine",
        description="Constraint-based sequential pattern mining.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--db", required=True, help="SPMF sequence file")
        p.add_argument("--attrs", help="attribute TSV to attach")
        p.add_argument("--ordering-attr",
                       help="ordering attribute name, or 'none' (default: "
                            "'time' when present)")
        p.add_argument("--output", default="-", help="output path, '-' for stdout")

    p = sub.add_parser("mine", help="mine frequent constrained patterns")
    add_common(p)
    p.add_argument("--min-sup", required=True,
                   help="absolute count, or fraction of N if it contains '.'")
    p.add_argument("--constraint", action="append", default=[],
                   help="e.g. 'gap(time)>=30', 'itemset{1,5,9}'; repeatable")
    p.add_argument("--scenario", type=int, choices=sorted(SCENARIOS),
                   help="install a preset constraint set")
    p.add_argument("--miner", choices=("mpp", "ppcc", "brute"), default="mpp")
    p.add_argument("--disable-prop5", action="store_true",
                   help="disable early candidate abandonment")
    p.add_argument("--median-pareto", action="store_true",
                   help="keep every non-dominated median candidate per node")
    p.add_argument("--emit-stats", action="store_true",
                   help="write a run report (phase times and counters)")
    p.add_argument("--report", help="run report path (implies --emit-stats)")
    p.add_argument("--threads", type=int, default=1,
                   help="top-level mining tasks (default 1)")
    p.add_argument("--max-len", type=int, help="pattern length cap (brute miner)")

    p = sub.add_parser("gen-attrs", help="generate synthetic attributes")
    p.add_argument("--db", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", default="time:time,price:uniform,quality:uniform",
                   help="comma list of name:time|uniform")
    p.add_argument("--output", default="-")

    p = sub.add_parser("stats", help="database statistics")
    add_common(p)

    p = sub.add_parser("export-dot", help="render the diagram as DOT")
    add_common(p)
    p.add_argument("--constraint", action="append", default=[])
    p.add_argument("--scenario", type=int, choices=sorted(SCENARIOS))

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command, db_path=args.db)
    for name, attr in (
        ("attrs_path", "attrs"), ("miner", "miner"), ("min_support", "min_sup"),
        ("scenario", "scenario"), ("output", "output"), ("report", "report"),
        ("seed", "seed"), ("profile", "profile"), ("ordering_attr", "ordering_attr"),
        ("disable_prop5", "disable_prop5"), ("median_pareto", "median_pareto"),
        ("emit_stats", "emit_stats"), ("threads", "threads"), ("max_len", "max_len"),
    ):
        if hasattr(args, attr) and getattr(args, attr) is not None:
            setattr(config, name, getattr(args, attr))
    if getattr(args, "constraint", None):
        config.constraints = tuple(args.constraint)
    if config.report:
        config.emit_stats = True
    return config


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "mine":
        try:
            _parse_min_support(args.min_sup)
        except ValueError as exc:
            parser.error(str(exc))
        if args.threads < 1:
            parser.error("--threads must be at least 1")
    return run(_config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
