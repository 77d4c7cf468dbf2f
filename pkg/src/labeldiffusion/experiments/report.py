"""Aggregation and CSV output."""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from collections import defaultdict

import numpy as np

VOLATILE = ("runtime_ms",)
METRICS = ("f1", "f1_paper_variant", "precision", "recall", "conductance",
           "touched_nodes", "pushes")


def _as_dict(rec) -> dict:
    return dataclasses.asdict(rec) if dataclasses.is_dataclass(rec) else dict(rec)


def summarize(records, keys=("point", "method", "cluster"), metrics=METRICS) -> list[dict]:
    """Mean and population std of each metric per group.

    Error rows are counted, not averaged. Non-finite values (an undefined
    conductance, say) are left out of the statistics.
    """
    rows = [_as_dict(r) for r in records]
    if not rows:
        raise ValueError("nothing to summarize")
    groups: dict = defaultdict(list)
    for r in rows:
        groups[tuple(r[k] for k in keys)].append(r)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(v) for v in k)):
        members = groups[key]
        ok = [r for r in members if not r.get("error")]
        row = dict(zip(keys, key))
        row["count"] = len(ok)
        row["errors"] = len(members) - len(ok)
        for m in metrics:
            vals = np.array([r[m] for r in ok if m in r], dtype=float)
            vals = vals[np.isfinite(vals)]
            row[f"{m}_mean"] = float(vals.mean()) if len(vals) else math.nan
            row[f"{m}_std"] = float(vals.std()) if len(vals) else math.nan
        out.append(row)
    return out


def to_csv(records, exclude=()) -> str:
    rows = [_as_dict(r) for r in records]
    if not rows:
        return ""
    header = [k for k in rows[0] if k not in exclude]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def write_csv(path, records, exclude=()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(records, exclude))


def digest(records) -> str:
    """SHA-256 of the CSV without timing columns."""
    return hashlib.sha256(to_csv(records, exclude=VOLATILE).encode()).hexdigest()


def write_config_echo(path, config) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
