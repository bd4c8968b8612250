"""Run reports: the JSON envelope every CLI subcommand prints."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from sys import stderr
from typing import Any, TextIO

import numpy as np

from src.models import LIMITS, TOOL_NAME, TOOL_VERSION, fraction_str

EXIT_CODES = {"ok": 0, "undecided": 2, "precondition-failed": 3, "error": 1}

HORIZON_CAVEAT = (
    "Largeness and thickness claims are relative to the inner window of the stated horizon; "
    "gaps are bounded explicitly and nothing is claimed outside the window."
)


@dataclass
class RunReport:
    command: str
    status: str = "ok"
    inputs: dict[str, str] = field(default_factory=dict)
    payload: dict[str, Any] = field(default_factory=dict)
    message: str | None = None
    elapsed: float | None = None
    output: str | None = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def deterministic(self) -> dict:
        """Everything except timing."""
        out = {
            "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
            "schema_version": LIMITS.report_schema_version,
            "command": self.command,
            "status": self.status,
            "inputs": dict(sorted(self.inputs.items())),
            "result": self.payload,
        }
        if self.message is not None:
            out["message"] = self.message
        return out

    def to_dict(self) -> dict:
        out = self.deterministic()
        if self.elapsed is not None:
            out["timing"] = {"elapsed_seconds": round(self.elapsed, 3)}
        return out


def _plain(value):
    """json.dumps fallback for numpy scalars and exact rationals."""
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render(report: RunReport, timing: bool = True) -> str:
    body = report.to_dict() if timing else report.deterministic()
    return json.dumps(body, indent=2, sort_keys=True, default=_plain)


def emit(report: RunReport, stream: TextIO, out_path: str | Path | None = None) -> None:
    """Print the report; with `out_path`, also write it to disk."""
    text = render(report)
    print(text, file=stream)
    if out_path is not None:
        path = Path(out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        print(f"[ok] Wrote {path}", file=stderr)
