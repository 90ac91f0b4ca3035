"""Run reports written by every command.

JSON reports serialize floats with 17 significant digits and non-finite values as ``null``.
"""

import json
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Literal

ReportFormat = Literal["json", "text"]


@dataclass
class RunReport:
    """Inputs, parameters and results of one command run."""

    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    """Input file path to content digest."""

    parameters: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def to_dict(self, *, with_timestamp: bool = True) -> dict[str, Any]:
        """Plain dict form; drop the timestamp to compare runs."""
        data: dict[str, Any] = {
            "command": self.command,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "results": self.results,
            "warnings": self.warnings,
        }
        if with_timestamp:
            data["timestamp"] = self.timestamp
        return data

    def render(self, fmt: ReportFormat = "json") -> str:
        """Render as JSON or as aligned ``key: value`` lines.

        Example
        -------
        >>> report = RunReport("corr", results={"r": 0.1, "n": 3}, timestamp="t")
        >>> print(report.render("text"))
        command   : corr
        results.r : 0.10000000000000001
        results.n : 3
        timestamp : t

        """
        if fmt == "json":
            return to_json(self.to_dict())
        flat = dict(_flatten(self.to_dict()))
        width = max(len(k) for k in flat)
        return "\n".join(f"{k:<{width}} : {v}" for k, v in flat.items())


def to_json(value: Any, indent: int = 2) -> str:
    """Serialize like ``json.dumps`` but with 17 significant digits per float.

    Example
    -------
    >>> print(to_json({"r": 0.5, "bad": float("nan")}, indent=0))
    {"r": 0.5, "bad": null}

    """
    return _encode(value, indent, 0)


def _encode(value: Any, indent: int, level: int) -> str:
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _number(value)
    if isinstance(value, str):
        return json.dumps(value)

    if isinstance(value, Mapping):
        items = [f"{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in value.items()]
        return _wrap("{", items, "}", indent, level)
    if isinstance(value, Sequence):
        return _wrap("[", [_encode(v, indent, level + 1) for v in value], "]", indent, level)
    if hasattr(value, "item"):  # numpy scalars
        return _encode(value.item(), indent, level)
    raise TypeError(f"Cannot serialize {type(value).__name__}.")


def _number(value: float) -> str:
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    # keep floats recognizable as floats
    return text if any(c in text for c in ".en") else f"{text}.0"


def _wrap(open_: str, items: list[str], close: str, indent: int, level: int) -> str:
    if not items:
        return open_ + close
    if not indent:
        return open_ + ", ".join(items) + close
    pad = " " * indent * (level + 1)
    return f"{open_}\n{pad}" + f",\n{pad}".join(items) + f"\n{' ' * indent * level}{close}"


def _flatten(value: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(value, Mapping):
        if not value:
            return []
        return [p for k, v in value.items() for p in _flatten(v, f"{prefix}{k}.")]
    if isinstance(value, (list, tuple)):
        if all(not isinstance(v, (Mapping, list, tuple)) for v in value):
            return [(prefix.rstrip("."), ", ".join(_scalar(v) for v in value))] if value else []
        return [p for i, v in enumerate(value) for p in _flatten(v, f"{prefix}{i}.")]
    return [(prefix.rstrip("."), _scalar(value))]


def _scalar(value: Any) -> str:
    if isinstance(value, float):
        return _number(value)
    return str(value)
