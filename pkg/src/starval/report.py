"""Structured-text (JSON) reports with a config echo.

Floats are written with 17 significant digits so that parsing a report gives
back the exact doubles. Field order follows insertion order. Reports that
contain NaN or infinities are refused.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ReportError

TOOL = "starval"


@dataclass
class RunConfig:
    command: str
    n: int
    quadrature: dict
    tolerances: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _plain(obj, path="$"):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.to_dict() if hasattr(obj, "to_dict") else dataclasses.asdict(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v, f"{path}.{k}") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v, f"{path}[{i}]") for i, v in enumerate(obj)]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist(), path)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ReportError(f"refusing to emit non-finite value {x!r} at {path}")
        return x
    if obj is None or isinstance(obj, str):
        return obj
    raise ReportError(f"cannot serialize {type(obj).__name__} at {path}")


def format_float(x: float) -> str:
    s = f"{x:.17g}"
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _dump(obj, indent: int, level: int = 0) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def dumps(obj, indent: int = 2) -> str:
    return _dump(_plain(obj), indent) + "\n"


def emit_report(result, config: RunConfig | dict, started: float | None = None) -> str:
    """Serialize a module result with the config echo, tool version and wall clock."""
    cfg = config.to_dict() if isinstance(config, RunConfig) else dict(config)
    now = time.time()
    doc = {
        "tool": TOOL,
        "version": __version__,
        "command": cfg.get("command"),
        "config": cfg,
        "result": result,
        "wall_clock": {
            "finished": _dt.datetime.fromtimestamp(now, _dt.timezone.utc).isoformat(),
            "elapsed_seconds": now - started if started is not None else 0.0,
        },
    }
    return dumps(doc)


def parse_report(text: str) -> dict:
    return json.loads(text)


def write_report(text: str, path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
