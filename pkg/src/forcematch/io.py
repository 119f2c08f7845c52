"""CSV and JSON file formats.

Dataset CSV       ``individual_id,t,x,y``
Behaviour log CSV ``individual_id,t,mode`` with mode ``F`` or ``C``
Design rows CSV   focal columns, then one ``assoc_<id>_dir,assoc_<id>_dist,
                  assoc_<id>_travel,assoc_<id>_gap`` block per associate
FitResult JSON    field names of :class:`~forcematch.force_model.FitResult`
Trace CSV         ``generation,best_rss``
"""

from __future__ import annotations

import csv
import math
from datetime import datetime
from pathlib import Path

import numpy as np

from .core import GroupDataset, Trajectory, id_sort_key
from .errors import DuplicateTimestamp, MalformedRow, NonFiniteValue, ValidationError
from .extraction import DesignRows
from .force_model.fitting import FitResult
from .simulator import BehaviorLog

DATASET_HEADER = ["individual_id", "t", "x", "y"]
LOG_HEADER = ["individual_id", "t", "mode"]
ROW_COLUMNS = ["focal_id", "t", "observed_direction", "previous_bearing", "dt_next",
               "dt_prev", "da", "iid", "cm_direction"]
ASSOC_FIELDS = ("dir", "dist", "travel", "gap")


def fmt(v) -> str:
    """17 significant digits: exact float round trip, empty for missing."""
    v = float(v)
    return "" if math.isnan(v) else format(v, ".17g")


def _parse_time(text, iso_time):
    if iso_time:
        try:
            return datetime.fromisoformat(text.replace("Z", "+00:00")).timestamp()
        except ValueError:
            pass
    return float(text)


def read_dataset(path, iso_time: bool = False, crs_note: str | None = None) -> GroupDataset:
    """Read a dataset CSV (rows in any order).

    ``iso_time`` additionally accepts ISO-8601 time stamps, converted to
    seconds since the epoch.

    Raises
    ------
    MalformedRow, NonFiniteValue, DuplicateTimestamp
        With the offending line number.
    """
    cols: dict[str, list] = {}
    seen: dict[str, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != DATASET_HEADER:
            raise MalformedRow(f"expected header {','.join(DATASET_HEADER)}, got {header}", 1)
        for line, rec in enumerate(reader, start=2):
            if not rec or (len(rec) == 1 and not rec[0].strip()):
                continue
            if len(rec) != 4:
                raise MalformedRow(f"expected 4 fields, got {len(rec)}", line)
            aid = rec[0].strip()
            if not aid:
                raise MalformedRow("empty individual_id", line)
            try:
                t = _parse_time(rec[1].strip(), iso_time)
                x, y = float(rec[2]), float(rec[3])
            except ValueError as exc:
                raise MalformedRow(str(exc), line) from None
            if not (math.isfinite(t) and math.isfinite(x) and math.isfinite(y)):
                raise NonFiniteValue("non-finite value", line)
            first = seen.setdefault(aid, {}).setdefault(t, line)
            if first != line:
                raise DuplicateTimestamp(f"{aid!r} already has t={rec[1].strip()} (line {first})", line)
            cols.setdefault(aid, []).append((t, x, y))
    trajs = {}
    for aid, recs in cols.items():
        arr = np.array(sorted(recs))
        trajs[aid] = Trajectory(aid, arr[:, 0], arr[:, 1], arr[:, 2])
    kwargs = {} if crs_note is None else {"crs_note": crs_note}
    return GroupDataset(trajs, **kwargs)


def write_dataset(path, data: GroupDataset):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(DATASET_HEADER) + "\n")
        for aid in data.ids:
            tr = data[aid]
            fh.writelines(f"{aid},{fmt(t)},{fmt(x)},{fmt(y)}\n" for t, x, y in zip(tr.t, tr.x, tr.y))


def write_behavior_log(path, log: BehaviorLog):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(LOG_HEADER) + "\n")
        ts = [fmt(t) for t in log.t]
        for j, aid in enumerate(log.ids):
            modes = np.where(log.cohesion[:, j], "C", "F")
            fh.writelines(f"{aid},{t},{m}\n" for t, m in zip(ts, modes))


def read_behavior_log(path) -> BehaviorLog:
    per: dict[str, list] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != LOG_HEADER:
            raise MalformedRow(f"expected header {','.join(LOG_HEADER)}", 1)
        for line, rec in enumerate(reader, start=2):
            if len(rec) != 3 or rec[2] not in ("F", "C"):
                raise MalformedRow("expected individual_id,t,mode with mode F or C", line)
            per.setdefault(rec[0], []).append((float(rec[1]), rec[2] == "C"))
    ids = tuple(sorted(per, key=id_sort_key))
    if not ids:
        raise ValidationError("empty behaviour log")
    t = np.array([r[0] for r in sorted(per[ids[0]])])
    modes = np.column_stack([[m for _, m in sorted(per[a])] for a in ids])
    return BehaviorLog(ids, t, modes)


def write_rows(path, rows: DesignRows):
    header = list(ROW_COLUMNS)
    for aid in rows.associate_ids:
        header += [f"assoc_{aid}_{f}" for f in ASSOC_FIELDS]
    blocks = (rows.assoc_dir, rows.assoc_dist, rows.assoc_travel, rows.assoc_gap)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(rows)):
            rec = [rows.focal_id] + [fmt(v) for v in (
                rows.t[i], rows.observed[i], rows.previous[i], rows.dt_next[i],
                rows.dt_prev[i], rows.da[i], rows.iid[i], rows.cm[i])]
            for j in range(len(rows.associate_ids)):
                rec += [fmt(b[i, j]) for b in blocks]
            fh.write(",".join(rec) + "\n")


def read_rows(path) -> DesignRows:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[: len(ROW_COLUMNS)] != ROW_COLUMNS:
            raise MalformedRow("not a design-rows file: bad header", 1)
        extra = header[len(ROW_COLUMNS):]
        if len(extra) % len(ASSOC_FIELDS):
            raise MalformedRow("associate columns must come in blocks of 4", 1)
        assoc_ids = []
        for b in range(0, len(extra), len(ASSOC_FIELDS)):
            names = extra[b:b + len(ASSOC_FIELDS)]
            aid = names[0][len("assoc_"):-len("_dir")]
            if names != [f"assoc_{aid}_{f}" for f in ASSOC_FIELDS]:
                raise MalformedRow(f"bad associate block {names}", 1)
            assoc_ids.append(aid)
        recs, focal = [], None
        for line, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise MalformedRow(f"expected {len(header)} fields, got {len(rec)}", line)
            if focal is None:
                focal = rec[0]
            elif rec[0] != focal:
                raise MalformedRow("a rows file holds a single focal individual", line)
            try:
                recs.append([float(v) if v else math.nan for v in rec[1:]])
            except ValueError as exc:
                raise MalformedRow(str(exc), line) from None
    m = len(assoc_ids)
    arr = np.array(recs, dtype=float).reshape(len(recs), 8 + 4 * m)
    blocks = arr[:, 8:].reshape(len(recs), m, 4)
    return DesignRows(
        focal or "", assoc_ids,
        t=arr[:, 0], observed=arr[:, 1], previous=arr[:, 2], dt_next=arr[:, 3],
        dt_prev=arr[:, 4], da=arr[:, 5], iid=arr[:, 6], cm=arr[:, 7],
        assoc_dir=blocks[:, :, 0], assoc_dist=blocks[:, :, 1],
        assoc_travel=blocks[:, :, 2], assoc_gap=blocks[:, :, 3],
    )


def write_fit(path, result: FitResult):
    Path(path).write_text(result.to_json() + "\n", encoding="utf-8")


def read_fit(path) -> FitResult:
    return FitResult.from_json(Path(path).read_text(encoding="utf-8"))


def write_trace(path, result: FitResult):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("generation,best_rss\n")
        fh.writelines(f"{g},{fmt(v)}\n" for g, v in enumerate(result.optimizer_trace))
