#!/usr/bin/env python3
"""
thickset: certificates for largeness, thickness and meagerness

Command-line front end over the library in src/. Every subcommand reads
its inputs from files, prints one JSON report on stdout and exits with

    0  ok
    2  undecided (search budget exhausted)
    3  a precondition of the operation does not hold
    1  any other error (bad input, failed replay, unreadable file)

Progress lines go to stderr so stdout stays deterministic.

Subcommands:
  classify   m-large / m-thick / (k,m)-prethick / k-meager queries
  cover      greedy translate cover of a set, or of a partition cell
  net        maximal E-separated subset of a set
  prethick   cell of a finite cover that becomes m-thick after shifting
  sigma      exact (or bracketed) invariant submeasure of a set
  density    window density of a set of integers
  witness    large set of small window density avoiding a given set
  partition  staged construction of a two-piece k-meager partition
  verify     replay the certificates of a saved partition
  validate   check a group table (and an action table) against the axioms
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from sys import stderr
from time import perf_counter

from src.covering import greedy_cover, max_E_separated, partition_large_cell, prethick_cell
from src.errors import CertificateError, PreconditionError, ThicksetError
from src.groups import (
    FiniteGroup,
    FiniteSet,
    WindowedGroup,
    validate_group,
    validate_gspace,
)
from src.inputs import (
    file_digest,
    group_from_dict,
    load_group,
    load_gspace,
    load_set,
    read_definition,
)
from src.models import LIMITS, HorizonPolicy, Limits, fraction_str, parse_fraction
from src.partition.construction import build_meager_partition, horizon_requirements
from src.partition.storage import load_partition, save_partition, stage_table, write_stage_table
from src.partition.verify import verify_meagerness
from src.reports import HORIZON_CAVEAT, RunReport, emit
from src.setcalc import is_k_m_prethick, is_k_meager, is_m_large, is_m_thick
from src.submeasure.sigma import sigma_estimate, solecki_sigma
from src.submeasure.window import syndetic_witness_Z, window_density

QUERY_PATTERN = re.compile(r"^(?:(m-large|m-thick|meager)=(\d+)|prethick=(\d+),(\d+))$")


class UsageError(ThicksetError):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _carrier(args, report: RunReport, limits: Limits):
    """The carrier named by --space or --group."""
    if getattr(args, "space", None):
        report.inputs["space"] = file_digest(args.space)
        return load_gspace(args.space, limits)
    if not getattr(args, "group", None):
        raise UsageError("one of --group or --space is required")
    report.inputs["group"] = file_digest(args.group)
    return load_group(args.group, limits)


def _set(path: str, carrier, report: RunReport, label: str) -> FiniteSet:
    report.inputs[label] = file_digest(path)
    return load_set(path, carrier)


def _policy(carrier, args) -> HorizonPolicy | None:
    if not isinstance(carrier, WindowedGroup):
        return None
    if args.margin is None:
        raise PreconditionError(f"{carrier.name} is windowed; pass --margin")
    return HorizonPolicy(carrier.horizon, args.margin)


def _line(args, limits: Limits) -> tuple[WindowedGroup, HorizonPolicy]:
    if args.horizon is None:
        raise UsageError("--horizon is required")
    carrier = WindowedGroup(1, args.horizon, limits=limits)
    return carrier, HorizonPolicy(args.horizon, args.margin or 0)


def _status(value: str) -> str:
    return "undecided" if value == "undecided" else "ok"


def _require(replayed: bool, what: str) -> None:
    if not replayed:
        raise CertificateError(f"{what} failed its replay")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_classify(args, report: RunReport, limits: Limits) -> None:
    match = QUERY_PATTERN.match(args.query)
    if not match:
        raise UsageError(f"unknown query {args.query!r}; expected m-large=N, m-thick=N, prethick=k,m or meager=k")
    carrier = _carrier(args, report, limits)
    A = _set(args.set, carrier, report, "set")
    policy = _policy(carrier, args)
    kind, value, k, m = match.groups()

    if kind == "m-large":
        result = is_m_large(A, int(value), policy, limits)
        if result.witness is not None:
            _require(result.witness.replay(), "largeness witness")
        status = result.status
    elif kind == "m-thick":
        result = is_m_thick(A, int(value), policy, limits)
        _require(result.replay(), "thickness verdict")
        status = result.verdict
    elif kind == "meager":
        result = is_k_meager(A, int(value), policy, limits)
        _require(result.replay(), "meagerness certificates")
        status = result.status
    else:
        result = is_k_m_prethick(A, int(k), int(m), policy, limits)
        if result.verdict is not None:
            _require(result.verdict.replay(), "thickness of KA")
        status = result.status

    report.status = _status(status)
    report.payload = {"set_size": len(A), **result.to_dict()}
    if policy is not None:
        report.payload["caveat"] = HORIZON_CAVEAT


def cmd_cover(args, report: RunReport, limits: Limits) -> None:
    G = _carrier(args, report, limits)
    if not isinstance(G, FiniteGroup):
        raise PreconditionError("cover needs a finite group")
    if args.cells:
        cells = [_set(path, G, report, f"cell{i}") for i, path in enumerate(args.cells)]
        index, cert = partition_large_cell(G, cells)
        report.payload = {"cell": index, "cells": len(cells), **cert.to_dict()}
        return
    if not args.set:
        raise UsageError("cover needs --set or --cells")
    A = _set(args.set, G, report, "set")
    cert = greedy_cover(G, A, verbose=args.verbose)
    report.payload = cert.to_dict()


def cmd_net(args, report: RunReport, limits: Limits) -> None:
    carrier = _carrier(args, report, limits)
    E = _set(args.E, carrier, report, "E")
    S = _set(args.S, carrier, report, "S")
    policy = _policy(carrier, args)
    cert = max_E_separated(E, S, policy)
    _require(cert.replay(), "net certificate")
    report.payload = cert.to_dict()
    if policy is not None:
        report.payload["caveat"] = HORIZON_CAVEAT


def cmd_prethick(args, report: RunReport, limits: Limits) -> None:
    carrier = _carrier(args, report, limits)
    cells = [_set(path, carrier, report, f"cell{i}") for i, path in enumerate(args.cells)]
    found = prethick_cell(cells, args.m, limits, verbose=args.verbose)
    if found.verdict is not None:
        _require(found.verdict.replay(), "thickness of K A_i")
    report.status = _status(found.status)
    report.payload = found.to_dict()


def cmd_sigma(args, report: RunReport, limits: Limits) -> None:
    G = _carrier(args, report, limits)
    if not isinstance(G, FiniteGroup):
        raise PreconditionError("sigma needs a finite group")
    H = FiniteSet.full(G) if args.H == "full" else _set(args.H, G, report, "H")
    A = _set(args.set, G, report, "set")
    if args.bracket:
        interval = sigma_estimate(G, H, A)
        report.payload = {"H_size": len(H), "method": "coset-bracket", **interval.to_dict()}
        return
    cert = solecki_sigma(G, H, A, limits=limits)
    report.payload = {"H_size": len(H), "method": "exact", **cert.to_dict()}


def cmd_density(args, report: RunReport, limits: Limits) -> None:
    carrier, policy = _line(args, limits)
    A = _set(args.set, carrier, report, "set")
    oracle = window_density(A, args.L, policy)
    report.payload = {"value": fraction_str(oracle.eval(A)), **oracle.describe()}


def cmd_witness(args, report: RunReport, limits: Limits) -> None:
    carrier, policy = _line(args, limits)
    A = _set(args.set, carrier, report, "set")
    found = syndetic_witness_Z(A, parse_fraction(args.eps), args.L, policy)
    _require(found.replay(), "syndetic witness")
    report.payload = {**found.to_dict(), "caveat": HORIZON_CAVEAT}


def cmd_partition(args, report: RunReport, limits: Limits) -> None:
    need = horizon_requirements(args.k, args.stages, limits)
    margin = args.margin if args.margin is not None else need["margin"]
    horizon = args.horizon if args.horizon is not None else need["horizon"] - need["margin"] + margin
    policy = HorizonPolicy(horizon, margin)
    result = build_meager_partition(args.k, args.stages, policy, limits, verbose=not args.quiet)
    certificates = verify_meagerness(result)

    report.payload = {
        **result.to_dict(),
        "requirements": need,
        "certificates": len(certificates),
        "caveat": HORIZON_CAVEAT,
    }
    if args.out:
        digest = save_partition(result, args.out)
        table_path = write_stage_table(result, Path(args.out).with_suffix(".stages.csv"))
        report.payload["result_digest"] = digest
        print(f"[ok] Wrote {args.out}", file=stderr)
        print(f"[ok] Wrote {table_path}", file=stderr)
    if not args.quiet:
        print(stage_table(result).to_string(index=False), file=stderr)


def cmd_verify(args, report: RunReport, limits: Limits) -> None:
    report.inputs["in"] = file_digest(args.input)
    result = load_partition(args.input)
    certificates = verify_meagerness(result)
    report.payload = {
        "k": result.k,
        "stages": len(result.stages),
        **result.policy.describe(),
        "certificates": [c.to_dict() for c in certificates],
        "caveat": HORIZON_CAVEAT,
    }


def cmd_validate(args, report: RunReport, limits: Limits) -> None:
    report.inputs["group"] = file_digest(args.group)
    data = read_definition(Path(args.group))
    if data.get("kind", "table" if "table" in data else None) == "table":
        checked = validate_group(data["table"], limits, name=data.get("name", "G"))
        if not checked.ok:
            report.status = "error"
            report.message = checked.summary()
            report.payload = {"group": checked.to_dict()}
            return
    G = group_from_dict(data, Path(args.group).parent, limits)
    if not isinstance(G, FiniteGroup):
        raise PreconditionError("validate needs a finite group")
    report.payload = {"group": validate_group(G.mul_table, limits, name=G.name).to_dict()}

    if args.space:
        report.inputs["space"] = file_digest(args.space)
        space = read_definition(Path(args.space))
        checked = validate_gspace(G, space.get("action", []), limits, name=space.get("name", "X"))
        report.payload["space"] = checked.to_dict()
        if not checked.ok:
            report.status = "error"
            report.message = checked.summary()


COMMANDS = {
    "classify": cmd_classify,
    "cover": cmd_cover,
    "net": cmd_net,
    "prethick": cmd_prethick,
    "sigma": cmd_sigma,
    "density": cmd_density,
    "witness": cmd_witness,
    "partition": cmd_partition,
    "verify": cmd_verify,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="Override the candidate budget")
    common.add_argument("--out", default=None, help="Also write the output to this file")
    common.add_argument("--verbose", action="store_true", help="Progress lines on stderr")

    parser = _Parser(prog="thickset", description="Certificates for large, thick and meager sets.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def group_flags(p, space: bool = True):
        p.add_argument("--group", help="Group definition file (TOML or JSON)")
        if space:
            p.add_argument("--space", help="G-space definition file")
        p.add_argument("--margin", type=int, default=None, help="Margin for windowed groups")

    p = sub.add_parser("classify", parents=[common], help="Classify a set")
    group_flags(p)
    p.add_argument("--set", required=True)
    p.add_argument("--query", required=True, help="m-large=N | m-thick=N | prethick=k,m | meager=k")

    p = sub.add_parser("cover", parents=[common], help="Greedy translate cover")
    group_flags(p, space=False)
    p.add_argument("--set")
    p.add_argument("--cells", nargs="+")

    p = sub.add_parser("net", parents=[common], help="Maximal E-separated subset")
    group_flags(p, space=False)
    p.add_argument("--E", required=True)
    p.add_argument("--S", required=True)

    p = sub.add_parser("prethick", parents=[common],
                       help="Prethick cell of a cover (finite groups and G-spaces only; windowed groups are refused)")
    group_flags(p)
    p.add_argument("--cells", nargs="+", required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("sigma", parents=[common], help="Invariant submeasure of a set")
    group_flags(p, space=False)
    p.add_argument("--H", default="full", help="'full' or a set file for the subgroup")
    p.add_argument("--set", required=True)
    how = p.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="Exact linear program (default)")
    how.add_argument("--bracket", action="store_true",
                     help="Closed-form bracket from the uniform measure on H, any group order")

    p = sub.add_parser("density", parents=[common], help="Window density on the integers")
    p.add_argument("--set", required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--margin", type=int, default=None)

    p = sub.add_parser("witness", parents=[common], help="Syndetic witness on the integers")
    p.add_argument("--set", required=True)
    p.add_argument("--eps", required=True, help="Rational, e.g. 1/10")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--margin", type=int, default=None)

    p = sub.add_parser("partition", parents=[common], help="Build a k-meager partition")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--margin", type=int, default=None)
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="Replay a saved partition")
    p.add_argument("--in", dest="input", required=True)

    p = sub.add_parser("validate", parents=[common], help="Check group and action tables")
    p.add_argument("--group", required=True)
    p.add_argument("--space", default=None)
    return parser


def dispatch(argv: list[str] | None = None) -> tuple[RunReport, int]:
    """
    Run one subcommand and return its report and exit code. Nothing is
    printed to stdout here.
    """
    started = perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"[error] {e}", file=stderr)
        report = RunReport("usage", status="error", message=str(e))
        return report, report.exit_code

    # partition --out names the result file, not the report
    report = RunReport(args.command, output=None if args.command == "partition" else args.out)
    try:
        limits = LIMITS.with_budget(args.budget)
        COMMANDS[args.command](args, report, limits)
    except PreconditionError as e:
        report.status, report.message, report.payload = "precondition-failed", str(e), {}
    except (ThicksetError, OSError) as e:
        report.status, report.message, report.payload = "error", str(e), {}
    if report.message:
        print(f"[{report.status}] {report.message}", file=stderr)
    report.elapsed = perf_counter() - started
    return report, report.exit_code


def main(argv: list[str] | None = None) -> int:
    report, code = dispatch(argv)
    emit(report, sys.stdout, report.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
