"""CSV ingestion and serialization of point-based trajectory files.

Required columns: ``traj_id``, ``DateTime``, ``lat``, ``lon``. An optional
label column is named by the caller; every other column passes through as a
string-valued extra. Rows of one trajectory need not be contiguous.
"""

from __future__ import annotations

import csv
import os
from datetime import datetime
from pathlib import Path
from typing import IO

import numpy as np

from trajaug.core import Trajectory, TrajectoryDataset, validate_dataset
from trajaug.errors import InconsistentLabel, MissingColumn, ParseError

REQUIRED = ("traj_id", "DateTime", "lat", "lon")
TIME_FORMATS = ("%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M:%S.%f")


def parse_datetime(text: str) -> datetime:
    for fmt in TIME_FORMATS:
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            pass
    raise ValueError(text)


def format_datetime(ts: np.datetime64) -> str:
    dt = ts.astype(datetime)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%d %H:%M:%S.%f")
    return dt.strftime("%Y-%m-%d %H:%M:%S")


def read_csv(src: IO[str], label_column: str | None = None) -> TrajectoryDataset:
    reader = csv.reader(src)
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumn("traj_id") from None
    for name in REQUIRED + ((label_column,) if label_column else ()):
        if name not in header:
            raise MissingColumn(name)
    pos = {name: header.index(name) for name in header}
    extra_names = [h for h in header if h not in REQUIRED and h != label_column]

    groups: dict[str, dict] = {}
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(rownum, "<row>", ",".join(row))
        traj_id = row[pos["traj_id"]]
        g = groups.setdefault(traj_id, {"t": [], "lat": [], "lon": [], "x": [], "labels": set()})
        raw_time = row[pos["DateTime"]]
        try:
            g["t"].append(np.datetime64(parse_datetime(raw_time), "us"))
        except ValueError:
            raise ParseError(rownum, "DateTime", raw_time) from None
        for col in ("lat", "lon"):
            try:
                g[col].append(float(row[pos[col]]))
            except ValueError:
                raise ParseError(rownum, col, row[pos[col]]) from None
        g["x"].append([row[pos[name]] for name in extra_names])
        if label_column:
            g["labels"].add(row[pos[label_column]])

    trajectories = []
    for traj_id, g in groups.items():
        label = None
        if label_column:
            if len(g["labels"]) > 1:
                raise InconsistentLabel(traj_id)
            label = g["labels"].pop()
        extras = {name: [vals[j] for vals in g["x"]] for j, name in enumerate(extra_names)}
        trajectories.append(Trajectory(traj_id, g["t"], g["lat"], g["lon"], extras, label))
    return validate_dataset(TrajectoryDataset(trajectories, label_column))


def load_csv(path: str | os.PathLike, label_column: str | None = None) -> TrajectoryDataset:
    with open(path, newline="", encoding="utf-8") as fh:
        return read_csv(fh, label_column)


def write_dataset(ds: TrajectoryDataset, out: IO[str]) -> None:
    """Rows grouped by trajectory in canonical order (synthetics right after
    their original), time-ordered within each trajectory."""
    extra_names: list[str] = []
    for traj in ds:
        for name in traj.extras:
            if name not in extra_names:
                extra_names.append(name)
    header = list(REQUIRED) + ([ds.label_column] if ds.label_column else []) + extra_names
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for traj in ds:
        order = np.argsort(traj.times, kind="stable")
        for i in order:
            row = [traj.id, format_datetime(traj.times[i]), f"{traj.lat[i]:.9f}", f"{traj.lon[i]:.9f}"]
            if ds.label_column:
                row.append(traj.label or "")
            row.extend(traj.extras[name][i] if name in traj.extras else "" for name in extra_names)
            writer.writerow(row)


def write_csv(ds: TrajectoryDataset, path: str | os.PathLike) -> None:
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        write_dataset(ds, fh)
