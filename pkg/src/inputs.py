"""
Reading groups, G-spaces and sets from input files.

Group files are TOML (or JSON) with a `kind`:

    kind = "cyclic"     order = 6
    kind = "product"    factors = [{kind = "cyclic", order = 2}, "z3.toml"]
    kind = "dihedral"   n = 4
    kind = "symmetric"  n = 3
    kind = "table"      table = [[0, 1], [1, 0]]
    kind = "windowed"   dimension = 1, horizon = 1000

A G-space file names its group (a path, relative to the file, or an
inline table) and gives `action`, one row per group element.

Set files use a small expression language; top-level expressions are
unioned:

    {0, 3, 5}  [2, 9]  ap(0, 4, 10)  complement(...)  union(..., ...)
    full  empty  # comment
"""

from __future__ import annotations

import hashlib
import json
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

import numpy as np

from src.errors import GroupDefinitionError, PreconditionError, SetSpecError
from src.groups import (
    Carrier,
    FiniteGroup,
    FiniteSet,
    GSpace,
    WindowedGroup,
    cyclic,
    dihedral,
    interval,
    product,
    symmetric,
)
from src.models import LIMITS, Limits

GROUP_KINDS = ("cyclic", "dihedral", "product", "symmetric", "table", "windowed")


def file_digest(path: str | Path) -> str:
    """sha256 of the raw file bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_definition(path: Path) -> dict[str, Any]:
    try:
        if path.suffix == ".json":
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        else:
            with open(path, "rb") as f:
                data = tomllib.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise GroupDefinitionError(f"cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise GroupDefinitionError(f"{path}: expected a table at top level")
    return data


def group_from_dict(data: dict[str, Any], base: Path | None = None,
                    limits: Limits | None = None) -> FiniteGroup | WindowedGroup:
    """Build a group from an already-parsed definition."""
    limits = limits or LIMITS
    kind = data.get("kind")
    if kind is None:
        kind = "table" if "table" in data else "cyclic" if "order" in data else None
    if kind not in GROUP_KINDS:
        raise GroupDefinitionError(f"unknown group kind {kind!r}; expected one of {', '.join(GROUP_KINDS)}")

    try:
        if kind == "cyclic":
            G = cyclic(int(data["order"]), limits)
        elif kind == "dihedral":
            G = dihedral(int(data["n"]), limits)
        elif kind == "symmetric":
            G = symmetric(int(data["n"]), limits)
        elif kind == "table":
            G = FiniteGroup.from_table(data["table"], name=data.get("name", "G"), limits=limits)
        elif kind == "product":
            factors = [_resolve_group(f, base, limits) for f in data["factors"]]
            if len(factors) < 2 or not all(isinstance(f, FiniteGroup) for f in factors):
                raise GroupDefinitionError("a product needs at least two finite factors")
            G = factors[0]
            for factor in factors[1:]:
                G = product(G, factor, limits)
        else:
            return WindowedGroup(
                int(data.get("dimension", data.get("d", 1))),
                int(data["horizon"]),
                data.get("name", ""),
                limits,
            )
    except KeyError as e:
        raise GroupDefinitionError(f"{kind} group definition is missing {e}") from e

    if "name" in data and G.name != data["name"]:
        G = _renamed(G, data["name"])
    return G


def _renamed(G: FiniteGroup, name: str) -> FiniteGroup:
    return FiniteGroup(name=name, mul_table=G.mul_table, inv_table=G.inv_table,
                       identity=G.identity, key=G.key, factors=G.factors)


def _resolve_group(ref, base: Path | None, limits: Limits) -> FiniteGroup | WindowedGroup:
    if isinstance(ref, str):
        return load_group((base or Path(".")) / ref, limits)
    if isinstance(ref, dict):
        return group_from_dict(ref, base, limits)
    raise GroupDefinitionError(f"group reference must be a path or a table, got {type(ref).__name__}")


def load_group(path: str | Path, limits: Limits | None = None) -> FiniteGroup | WindowedGroup:
    path = Path(path)
    return group_from_dict(read_definition(path), path.parent, limits)


def load_gspace(path: str | Path, limits: Limits | None = None) -> GSpace:
    path = Path(path)
    data = read_definition(path)
    if "group" not in data or "action" not in data:
        raise GroupDefinitionError(f"{path}: a G-space file needs 'group' and 'action'")
    group = _resolve_group(data["group"], path.parent, limits or LIMITS)
    if not isinstance(group, FiniteGroup):
        raise GroupDefinitionError("G-spaces need a finite acting group")
    return GSpace.from_table(group, data["action"], name=data.get("name", "X"), limits=limits)


# ---------------------------------------------------------------------------
# Set expressions
# ---------------------------------------------------------------------------

TOKEN_PATTERN = re.compile(
    r"(?P<skip>\s+|#[^\n]*)|(?P<int>-?\d+)|(?P<name>[A-Za-z_]+)|(?P<punct>[{}\[\](),])|(?P<bad>.)"
)
KEYWORDS = ("full", "empty", "ap", "complement", "union")


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for match in TOKEN_PATTERN.finditer(text):
        kind = match.lastgroup
        if kind == "skip":
            continue
        if kind == "bad":
            raise SetSpecError(f"unexpected character {match.group()!r}", *_position(text, match.start()))
        tokens.append((kind, match.group(), match.start()))
    return tokens


class _SetParser:
    """Recursive-descent evaluator over a token list."""

    def __init__(self, text: str, carrier: Carrier):
        self.text = text
        self.carrier = carrier
        self.tokens = _tokenize(text)
        self.i = 0

    def fail(self, message: str, offset: int | None = None):
        if offset is None:
            offset = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        raise SetSpecError(message, *_position(self.text, offset))

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, value: str | None = None, kind: str | None = None) -> tuple[str, str, int]:
        token = self.peek()
        if token is None:
            self.fail(f"expected {value or kind}, got end of input")
        if (value is not None and token[1] != value) or (kind is not None and token[0] != kind):
            self.fail(f"expected {value or kind}, got {token[1]!r}")
        self.i += 1
        return token

    def integer(self) -> int:
        return int(self.take(kind="int")[1])

    def element(self):
        token = self.peek()
        if token is not None and token[1] == "(":
            self.take("(")
            coords = [self.integer()]
            while self.peek() is not None and self.peek()[1] == ",":
                self.take(",")
                coords.append(self.integer())
            self.take(")")
            return tuple(coords)
        return self.integer()

    def program(self) -> FiniteSet:
        acc = FiniteSet.empty(self.carrier)
        while self.peek() is not None:
            acc = acc.union(self.expr())
            if self.peek() is not None and self.peek()[1] == ",":
                self.take(",")
        return acc

    def expr(self) -> FiniteSet:
        token = self.peek()
        if token is None:
            self.fail("expected a set expression, got end of input")
        kind, value, offset = token
        if value == "{":
            self.take("{")
            items = []
            while self.peek() is not None and self.peek()[1] != "}":
                items.append(self.element())
                if self.peek() is not None and self.peek()[1] == ",":
                    self.take(",")
            self.take("}")
            return FiniteSet.of(self.carrier, items)
        if value == "[":
            self.take("[")
            lo = self.integer()
            self.take(",")
            hi = self.integer()
            self.take("]")
            return self.interval(lo, hi, offset)
        if kind != "name":
            self.fail(f"expected a set expression, got {value!r}")
        if value not in KEYWORDS:
            self.fail(f"unknown keyword {value!r}")
        self.take()
        if value == "full":
            return FiniteSet.full(self.carrier)
        if value == "empty":
            return FiniteSet.empty(self.carrier)
        self.take("(")
        if value == "ap":
            start = self.integer()
            self.take(",")
            step = self.integer()
            self.take(",")
            count = self.integer()
            self.take(")")
            if count < 0:
                self.fail(f"ap count must be non-negative, got {count}", offset)
            return FiniteSet.of(self.carrier, (start + step * np.arange(count)).tolist())
        if value == "complement":
            inner = self.expr()
            self.take(")")
            return inner.complement()
        parts = [self.expr()]
        while self.peek() is not None and self.peek()[1] == ",":
            self.take(",")
            parts.append(self.expr())
        self.take(")")
        acc = parts[0]
        for part in parts[1:]:
            acc = acc.union(part)
        return acc

    def interval(self, lo: int, hi: int, offset: int) -> FiniteSet:
        if isinstance(self.carrier, WindowedGroup):
            try:
                return interval(self.carrier, lo, hi)
            except PreconditionError as e:
                self.fail(str(e), offset)
        return FiniteSet.of(self.carrier, range(lo, hi + 1))


def parse_set(text: str, carrier: Carrier) -> FiniteSet:
    """
    Evaluate a set expression on `carrier`.

    Raises:
        SetSpecError: malformed text, with line and column
        CarrierError: an id outside a finite carrier
        WindowOverflowError: a vector outside a windowed carrier's horizon
    """
    return _SetParser(text, carrier).program()


def load_set(path: str | Path, carrier: Carrier) -> FiniteSet:
    return parse_set(Path(path).read_text(encoding="utf-8"), carrier)
