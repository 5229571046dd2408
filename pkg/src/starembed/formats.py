"""Sequence files (JSON) and results tables (CSV)."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional

from .core import RequestSequence
from .errors import InputError

RESULTS_HEADER = (
    "seq_id",
    "policy",
    "seed",
    "cost_mean",
    "cost_stderr",
    "opt_cost",
    "off_cost",
    "ratio_vs_opt",
    "ratio_vs_off",
    "blocks",
    "violations",
)
UNDEFINED = "undefined"


def parse_probability(text: str | float | Fraction) -> Fraction:
    """Accept ``"2/3"``, ``"0.6667"`` or a number; the value is kept exact."""
    try:
        p = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a probability: {text!r}") from None
    if not 0 <= p <= 1:
        raise InputError(f"probability out of [0, 1]: {text!r}")
    return p


def sequence_to_dict(seq: RequestSequence, meta: Optional[dict[str, Any]] = None) -> dict[str, Any]:
    return {
        "n": seq.n,
        "initial_center": seq.initial_center,
        "requests": [[r.u, r.v] for r in seq.requests],
        "meta": meta or {},
    }


def dumps_sequence(seq: RequestSequence, meta: Optional[dict[str, Any]] = None) -> str:
    # one request per line keeps diffs readable
    lines = [
        "{",
        f'  "n": {seq.n},',
        f'  "initial_center": {seq.initial_center},',
    ]
    if seq.requests:
        lines.append('  "requests": [')
        body = [f"    [{r.u}, {r.v}]" for r in seq.requests]
        lines.append(",\n".join(body))
        lines.append("  ],")
    else:
        lines.append('  "requests": [],')
    lines.append(f'  "meta": {json.dumps(meta or {}, sort_keys=True)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def sequence_from_dict(data: Any) -> tuple[RequestSequence, dict[str, Any]]:
    if not isinstance(data, dict):
        raise InputError("sequence file must hold a JSON object")
    try:
        n = data["n"]
        c0 = data["initial_center"]
        raw = data["requests"]
    except KeyError as exc:
        raise InputError(f"sequence file is missing {exc.args[0]!r}") from None
    if not isinstance(raw, list) or any(
        not isinstance(r, list) or len(r) != 2 or not all(type(x) is int for x in r) for r in raw
    ):
        raise InputError("requests must be a list of [int, int] pairs")
    if type(n) is not int or type(c0) is not int:
        raise InputError("n and initial_center must be integers")
    meta = data.get("meta") or {}
    return RequestSequence.of(n, c0, raw), meta


def loads_sequence(text: str) -> tuple[RequestSequence, dict[str, Any]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return sequence_from_dict(data)


def load_sequence(path: str | Path) -> tuple[RequestSequence, dict[str, Any]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads_sequence(text)


def format_number(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form
    return str(value)


def format_ratio(num: float, den: Optional[float]) -> str:
    if den is None:
        return ""
    if den == 0:
        return UNDEFINED
    return repr(num / den)


def results_csv(rows: Iterable[dict[str, Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for row in rows:
        writer.writerow([format_number(row.get(k)) for k in RESULTS_HEADER])
    return buf.getvalue()


def read_results_csv(text: str) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RESULTS_HEADER:
        raise InputError("unexpected results header")
    return list(reader)
