"""Canonical report serialization and comparison.

Reports are JSON with sorted keys and floats normalized to 6
significant digits, so serialize -> load -> serialize is byte-stable
and golden-file comparisons are meaningful. Undefined metrics are null.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import FormatError

SCHEMA = "aeforge-report/1"


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise FormatError(f"non-finite value {obj!r} in report")
        return float(f"{obj:.6g}")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, str):
        return obj
    if hasattr(obj, "item"):  # numpy scalar
        return _normalize(obj.item())
    raise FormatError(f"unsupported report value type {type(obj).__name__}")


def canonical_json(report: dict) -> str:
    return json.dumps(_normalize(report), sort_keys=True,
                      separators=(",", ":"), allow_nan=False) + "\n"


def serialize_report(report: dict, path) -> None:
    if report.get("schema") != SCHEMA:
        raise FormatError(f"report schema must be {SCHEMA!r}, got {report.get('schema')!r}")
    Path(path).write_text(canonical_json(report))


def load_report(path) -> dict:
    try:
        report = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise FormatError(
            f"{path}: schema version mismatch: {report.get('schema')!r} != {SCHEMA!r}"
        )
    return report


def _walk(a, b, path, tol_for, diffs):
    if isinstance(a, dict) or isinstance(b, dict):
        a_keys = set(a.keys()) if isinstance(a, dict) else set()
        b_keys = set(b.keys()) if isinstance(b, dict) else set()
        for k in sorted(a_keys | b_keys):
            kp = f"{path}.{k}" if path else str(k)
            if k not in a_keys or k not in b_keys:
                diffs.append({"path": kp, "a": a.get(k) if isinstance(a, dict) else a,
                              "b": b.get(k) if isinstance(b, dict) else b})
            else:
                _walk(a[k], b[k], kp, tol_for, diffs)
        return
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            diffs.append({"path": f"{path}.length", "a": len(a), "b": len(b)})
            return
        for i, (x, y) in enumerate(zip(a, b)):
            _walk(x, y, f"{path}[{i}]", tol_for, diffs)
        return
    num = (int, float)
    if (isinstance(a, num) and isinstance(b, num)
            and not isinstance(a, bool) and not isinstance(b, bool)):
        if abs(a - b) > tol_for(path):
            diffs.append({"path": path, "a": a, "b": b})
        return
    if a != b:
        diffs.append({"path": path, "a": a, "b": b})


def compare_reports(a: dict, b: dict, tolerances=0.0) -> list[dict]:
    """Diff entries for every leaf outside tolerance.

    `tolerances` is a single float, or a {path-prefix: tol} dict where
    the longest matching prefix wins (default 0 for unmatched paths).
    """
    if a.get("schema") != b.get("schema"):
        raise FormatError(
            f"schema version mismatch: {a.get('schema')!r} vs {b.get('schema')!r}"
        )

    if isinstance(tolerances, dict):
        def tol_for(path: str) -> float:
            best = 0.0
            best_len = -1
            for prefix, tol in tolerances.items():
                if path.startswith(prefix) and len(prefix) > best_len:
                    best, best_len = tol, len(prefix)
            return best
    else:
        def tol_for(path: str) -> float:
            return float(tolerances)

    diffs: list[dict] = []
    _walk(_normalize(a), _normalize(b), "", tol_for, diffs)
    return diffs
