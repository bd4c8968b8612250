"""Saving and loading partition results, plus a per-stage summary table."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd

from src.errors import CertificateError
from src.groups import FiniteSet, WindowedGroup, interval
from src.models import TOOL_NAME, TOOL_VERSION, HorizonPolicy, fraction_str
from src.partition.construction import (
    PartitionResult,
    StageLedger,
    StageRecord,
    forbidden_region,
    stage_parameters,
)
from src.setcalc import LargenessWitness
from src.submeasure.window import WindowDensity

SCHEMA = "thickset.partition/1"


def encode_set(S: FiniteSet) -> dict:
    pts = S.members
    if len(pts) == 0:
        return {"encoding": "delta", "first": None, "deltas": []}
    return {"encoding": "delta", "first": int(pts[0]), "deltas": np.diff(pts).tolist()}


def decode_set(carrier: WindowedGroup, data: dict) -> FiniteSet:
    if data.get("encoding") != "delta":
        raise CertificateError(f"unknown set encoding {data.get('encoding')!r}")
    if data["first"] is None:
        return FiniteSet.empty(carrier)
    steps = np.asarray([data["first"], *data["deltas"]], dtype=np.int64)
    return FiniteSet(carrier, np.cumsum(steps))


def _ledger(data: dict, side: str) -> StageLedger:
    return StageLedger(side, Fraction(data["actual"]), Fraction(data["subadditive"]), Fraction(data["geometric"]))


def _digest(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_partition(result: PartitionResult, path: str | Path) -> str:
    """
    Write the result as JSON (stage sets delta-encoded). Forbidden
    regions are not stored; the loader recomputes them.

    Returns:
        sha256 digest of the stored body
    """
    stages = []
    for record in result.stages:
        stages.append({
            "n": record.n,
            "K": record.K.to_list(),
            "A": encode_set(record.A),
            "B": encode_set(record.B),
            "witness_radius_A": int(record.witness_A.F.members[-1]),
            "witness_radius_B": int(record.witness_B.F.members[-1]),
            "density_A": fraction_str(record.density_A),
            "density_B": fraction_str(record.density_B),
            "gap_A": record.gap_A,
            "gap_B": record.gap_B,
            "ledger_A": record.ledger_A.to_dict(),
            "ledger_B": record.ledger_B.to_dict(),
        })
    body = {
        "schema": SCHEMA,
        "k": result.k,
        "horizon": result.policy.horizon,
        "margin": result.policy.margin,
        "radius": result.radius,
        "stages": stages,
        "A": encode_set(result.A),
    }
    digest = _digest(body)
    payload = {**body, "digest": digest, "tool": {"name": TOOL_NAME, "version": TOOL_VERSION}}
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return digest


def load_partition(path: str | Path) -> PartitionResult:
    """
    Rebuild a PartitionResult from disk. The digest must match; the
    forbidden regions and the complement of A are recomputed here.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CertificateError(f"cannot read partition file {path}: {e}") from e
    if payload.get("schema") != SCHEMA:
        raise CertificateError(f"unsupported partition schema {payload.get('schema')!r}")
    body = {key: value for key, value in payload.items() if key not in ("digest", "tool")}
    if _digest(body) != payload.get("digest"):
        raise CertificateError(f"digest mismatch in {path}")

    k = int(body["k"])
    policy = HorizonPolicy(int(body["horizon"]), int(body["margin"]))
    radius = int(body["radius"])
    core = policy.shrink(radius)
    lo, hi = core.inner_window()
    carrier = WindowedGroup(1, policy.horizon)

    records: list[StageRecord] = []
    shifts, A_sets, B_sets = [], [], []
    for stage in body["stages"]:
        n = int(stage["n"])
        params = stage_parameters(k, n)
        oracle = WindowDensity(carrier, params.L, core)
        K_n = tuple(stage["K"])
        A_n = decode_set(carrier, stage["A"])
        B_n = decode_set(carrier, stage["B"])
        forbidden_A, _ = forbidden_region(carrier, K_n, shifts, B_sets, core, oracle)
        shifts.append(K_n)
        A_sets.append(A_n)
        forbidden_B, _ = forbidden_region(carrier, K_n, shifts, A_sets, core, oracle)
        B_sets.append(B_n)
        s_A, s_B = int(stage["witness_radius_A"]), int(stage["witness_radius_B"])
        records.append(StageRecord(
            n, FiniteSet.of(carrier, K_n), params, A_n, B_n, forbidden_A, forbidden_B,
            _ledger(stage["ledger_A"], "A"), _ledger(stage["ledger_B"], "B"),
            LargenessWitness(interval(carrier, -s_A, s_A), A_n, (lo, hi)),
            LargenessWitness(interval(carrier, -s_B, s_B), B_n, (lo, hi)),
            Fraction(stage["density_A"]), Fraction(stage["density_B"]),
            int(stage["gap_A"]), int(stage["gap_B"]),
        ))

    A = decode_set(carrier, body["A"])
    B_side = interval(carrier, *policy.inner_window()).difference(A)
    return PartitionResult(k, policy, radius, tuple(records), A, B_side)


def stage_table(result: PartitionResult) -> pd.DataFrame:
    rows = []
    for record in result.stages:
        rows.append({
            "stage": record.n,
            "K": " ".join(str(x) for x in record.K),
            "eps": fraction_str(record.params.eps),
            "L": record.params.L,
            "size_A": len(record.A),
            "size_B": len(record.B),
            "density_A": float(record.density_A),
            "density_B": float(record.density_B),
            "gap_A": record.gap_A,
            "gap_B": record.gap_B,
            "gap_bound": record.params.gap_bound,
            "forbidden_A": float(record.ledger_A.actual),
            "budget_A": float(record.ledger_A.geometric),
            "forbidden_B": float(record.ledger_B.actual),
            "budget_B": float(record.ledger_B.geometric),
        })
    return pd.DataFrame(rows)


def write_stage_table(result: PartitionResult, path: str | Path) -> Path:
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    stage_table(result).to_csv(output_path, index=False)
    return output_path
