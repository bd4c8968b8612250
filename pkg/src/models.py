from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from sys import stderr
from typing import Literal

from src.errors import PreconditionError


TOOL_NAME = "thickset"
TOOL_VERSION = "0.1.0"

LIMITS_PATH = Path(__file__).parent.parent / "config" / "limits.json"

# Flip for progress lines on stderr (construction stages, searches)
VERBOSE = False


@dataclass(frozen=True)
class Limits:
    """Resource limits shared by every module."""

    max_group_order: int = 4096
    exhaustive_associativity_order: int = 64
    associativity_samples_per_element: int = 10
    candidate_budget: int = 2_000_000
    exact_sigma_order_cap: int = 128
    max_windowed_dimension: int = 3
    horizon_safety_factor: int = 8
    report_schema_version: str = "1"

    def with_budget(self, budget: int | None) -> Limits:
        if budget is None:
            return self
        if budget < 1:
            raise PreconditionError(f"budget must be positive, got {budget}")
        return replace(self, candidate_budget=budget)


def load_limits(path: str | Path | None = None) -> Limits:
    """
    Load resource limits from config/limits.json.

    Values in the file override the defaults; unknown keys are ignored
    with a warning. A missing file means defaults. An unreadable file
    is reported on stderr and the defaults are used.
    """
    config_path = Path(path) if path is not None else LIMITS_PATH
    default_config = {f.name: f.default for f in fields(Limits)}

    if not config_path.exists():
        return Limits()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = json.load(f)
    except Exception as e:
        print(f"[limits] Error loading config: {e}", file=stderr)
        return Limits()

    unknown = sorted(set(config) - set(default_config))
    for key in unknown:
        print(f"[limits] Ignoring unknown key '{key}'", file=stderr)
    merged = {**default_config, **{k: v for k, v in config.items() if k in default_config}}
    return Limits(**merged)


# Limits used when a caller passes none
LIMITS = load_limits()


Verdict = Literal["thick", "not-thick", "undecided"]
LargeStatus = Literal["large", "not-large", "undecided"]
PrethickStatus = Literal["prethick", "not-prethick", "undecided"]
MeagerStatus = Literal["meager", "not-meager", "undecided"]


@dataclass(frozen=True)
class HorizonPolicy:
    """
    Finite horizon for classifiers over windowed integer groups.

    Vectors live in the ball of radius `horizon`. Patterns F and shifts
    K range over the margin ball of radius `margin`, and placements x
    range over the inner window of radius `horizon - margin`, so every
    translate F x stays inside the horizon.
    """

    horizon: int
    margin: int

    def __post_init__(self):
        if self.horizon < 1:
            raise PreconditionError(f"horizon must be positive, got {self.horizon}")
        if not 0 <= self.margin < self.horizon:
            raise PreconditionError(
                f"margin must satisfy 0 <= margin < horizon, got margin={self.margin} "
                f"horizon={self.horizon}"
            )

    @property
    def inner_radius(self) -> int:
        return self.horizon - self.margin

    def inner_window(self) -> tuple[int, int]:
        return -self.inner_radius, self.inner_radius

    @property
    def inner_length(self) -> int:
        return 2 * self.inner_radius + 1

    def shrink(self, extra: int) -> HorizonPolicy:
        """Same horizon, inner window narrowed by `extra` on both sides."""
        return HorizonPolicy(self.horizon, self.margin + extra)

    def describe(self) -> dict:
        lo, hi = self.inner_window()
        return {"horizon": self.horizon, "margin": self.margin, "inner_window": [lo, hi]}


def fraction_str(value: Fraction | int) -> str:
    """Render an exact rational as 'p/q' (or 'p' for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str | int | float | Fraction) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        return Fraction(text).limit_denominator(10**9)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise PreconditionError(f"not a rational number: {text!r}") from e
