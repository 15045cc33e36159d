"""File formats: topology CSV, distance CSV, schedule CSV, report JSON.

Floats are written with ``repr`` so files round-trip bit-exactly, which
keeps seeded experiment outputs byte-identical across runs and platforms.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

import numpy as np

from .core import InterferenceReport, Schedule
from .topology import Topology, validate_distance_matrix

TOPOLOGY_HEADER = ["node", "x_m", "y_m"]
DISTANCE_HEADER = ["i", "j", "d_m"]
SCHEDULE_HEADER = ["node", "delta_ns"]


class FileFormatError(ValueError):
    """Malformed input file; message carries file and line context."""


def _fail(path, line_no, msg):
    raise FileFormatError(f"{path}:{line_no}: {msg}")


def _open_text(path):
    return Path(path).open("r", newline="")


def _read_rows(path, expected_header):
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            _fail(path, 1, "empty file")
        if [h.strip() for h in header] != expected_header:
            _fail(path, 1, f"expected header {','.join(expected_header)!r}, got {','.join(header)!r}")
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_header):
                _fail(path, line_no, f"expected {len(expected_header)} fields, got {len(row)}")
            rows.append((line_no, row))
    if not rows:
        _fail(path, 2, "no data rows")
    return rows


def _parse_int(path, line_no, text, what):
    try:
        return int(text)
    except ValueError:
        _fail(path, line_no, f"{what} must be an integer, got {text!r}")


def _parse_float(path, line_no, text, what):
    try:
        value = float(text)
    except ValueError:
        _fail(path, line_no, f"{what} must be a number, got {text!r}")
    if not np.isfinite(value):
        _fail(path, line_no, f"{what} must be finite, got {text!r}")
    return value


def write_topology(topo: Topology, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TOPOLOGY_HEADER)
        for node, (x, y) in enumerate(topo.positions_m):
            writer.writerow([node, repr(float(x)), repr(float(y))])


def read_topology(path) -> Topology:
    rows = _read_rows(path, TOPOLOGY_HEADER)
    seen = {}
    for line_no, (node_s, x_s, y_s) in rows:
        node = _parse_int(path, line_no, node_s, "node")
        if node in seen:
            _fail(path, line_no, f"duplicate node {node}")
        seen[node] = (
            _parse_float(path, line_no, x_s, "x_m"),
            _parse_float(path, line_no, y_s, "y_m"),
        )
    n = len(seen)
    if sorted(seen) != list(range(n)):
        _fail(path, rows[-1][0], f"node ids must be contiguous 0..{n - 1}")
    return Topology(np.array([seen[i] for i in range(n)]))


def write_distances(d: np.ndarray, path) -> None:
    """Write the upper triangle of a distance matrix."""
    d = np.asarray(d, dtype=float)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DISTANCE_HEADER)
        n = d.shape[0]
        for i in range(n):
            for j in range(i + 1, n):
                writer.writerow([i, j, repr(float(d[i, j]))])


def read_distances(path) -> np.ndarray:
    """Read pairwise distances; either orientation or just one triangle.

    When both (i, j) and (j, i) appear they must agree. Every off-diagonal
    pair must be covered; explicit diagonal entries must be zero.
    """
    rows = _read_rows(path, DISTANCE_HEADER)
    entries: dict[tuple[int, int], tuple[int, float]] = {}
    n = 0
    for line_no, (i_s, j_s, d_s) in rows:
        i = _parse_int(path, line_no, i_s, "i")
        j = _parse_int(path, line_no, j_s, "j")
        value = _parse_float(path, line_no, d_s, "d_m")
        if i < 0 or j < 0:
            _fail(path, line_no, "node ids must be nonnegative")
        if i == j:
            if value != 0:
                _fail(path, line_no, f"self-distance of node {i} must be 0, got {value}")
            continue
        if value < 0:
            _fail(path, line_no, f"distance must be nonnegative, got {value}")
        key = (min(i, j), max(i, j))
        if key in entries:
            prev_line, prev = entries[key]
            if prev != value:
                _fail(
                    path,
                    line_no,
                    f"conflicting distance for pair {key}: {prev} (line {prev_line}) vs {value}",
                )
        else:
            entries[key] = (line_no, value)
        n = max(n, i + 1, j + 1)
    if n < 2:
        _fail(path, rows[-1][0], "need at least 2 nodes")
    d = np.zeros((n, n))
    missing = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in entries:
                missing.append((i, j))
            else:
                d[i, j] = d[j, i] = entries[(i, j)][1]
    if missing:
        _fail(path, rows[-1][0], f"missing distances for pairs {missing[:5]}")
    return validate_distance_matrix(d)


def write_schedule(schedule: Schedule, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SCHEDULE_HEADER)
        for node, delta in enumerate(schedule.delays_ns):
            writer.writerow([node, repr(float(delta))])


def read_schedule(path) -> Schedule:
    rows = _read_rows(path, SCHEDULE_HEADER)
    seen = {}
    for line_no, (node_s, delta_s) in rows:
        node = _parse_int(path, line_no, node_s, "node")
        if node in seen:
            _fail(path, line_no, f"duplicate node {node}")
        seen[node] = _parse_float(path, line_no, delta_s, "delta_ns")
    n = len(seen)
    if sorted(seen) != list(range(n)):
        _fail(path, rows[-1][0], f"node ids must be contiguous 0..{n - 1}")
    return Schedule(np.array([seen[i] for i in range(n)]))


def report_to_json(report: InterferenceReport, **extra) -> str:
    payload = dict(extra)
    payload.update(report.to_dict())
    return json.dumps(payload, indent=2, sort_keys=True)


def rows_to_csv(header, rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()
