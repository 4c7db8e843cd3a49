"""Trajectory log reading and writing.

CSV layout: header ``t,x,y,yaw,warning_active,rka_active`` (s, m, m, rad,
0/1, 0/1). JSON carries the same per-sample fields under ``samples`` plus
optional run metadata. File stems of the form ``<scenario>__<run>`` name the
scenario and run when the file itself does not.
"""

from __future__ import annotations

import csv
import json
import math
from array import array
from pathlib import Path
from typing import Optional

from .errors import InvariantError, MonotonicityViolation, ParseError, RddsError, SchemaError
from .event_extraction import TestRun

COLUMNS = ("t", "x", "y", "yaw", "warning_active", "rka_active")
MAX_SAMPLES = 10**7
STEM_SEPARATOR = "__"
SIDECAR_SUFFIX = ".truth.json"
SERIES_SUFFIX = ".series.csv"


def split_stem(path) -> tuple[str, str]:
    """(scenario_ref, run_id) from a file name; scenario_ref is '' when absent."""
    stem = Path(path).name
    for suffix in (SIDECAR_SUFFIX, ".csv", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
            break
    if STEM_SEPARATOR in stem:
        scenario, run = stem.split(STEM_SEPARATOR, 1)
        return scenario, run
    return "", stem


def _bool_cell(text: str, path, line: int, col: int) -> bool:
    if text == "1":
        return True
    if text == "0":
        return False
    raise ParseError(f"expected 0 or 1, got {text!r}", path=path, line=line, column=col)


def _float_cell(text: str, path, line: int, col: int) -> float:
    try:
        val = float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", path=path, line=line, column=col) from None
    if not math.isfinite(val):
        raise ParseError(f"non-finite value {text!r}", path=path, line=line, column=col)
    return val


class _Columns:
    def __init__(self, path):
        self.path = path
        self.t, self.x, self.y, self.yaw = (array("d") for _ in range(4))
        self.warn, self.rka = array("b"), array("b")

    def push(self, row: int, line: int, t, x, y, yaw, w, r):
        if len(self.t) >= MAX_SAMPLES:
            raise InvariantError(f"{self.path}: run exceeds {MAX_SAMPLES} samples")
        if self.t and t <= self.t[-1]:
            where = f"row {row}" if line is None else f"row {row} (line {line})"
            raise MonotonicityViolation(
                f"{self.path}: {where}: t={t!r} does not increase past {self.t[-1]!r}", row=row
            )
        self.t.append(t)
        self.x.append(x)
        self.y.append(y)
        self.yaw.append(yaw)
        self.warn.append(w)
        self.rka.append(r)

    def build(self, **meta) -> TestRun:
        try:
            return TestRun(
                t=self.t, x=self.x, y=self.y, yaw=self.yaw,
                warning_active=self.warn, rka_active=self.rka, **meta,
            )
        except RddsError as exc:
            raise type(exc)(f"{self.path}: {exc}") from exc


def _read_csv(path: Path) -> _Columns:
    cols = _Columns(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError("empty file, header row required", path=path, line=1)
        header = [h.strip() for h in header]
        for i, name in enumerate(COLUMNS):
            if name not in header:
                raise SchemaError(f"missing column {name!r}", path=path, line=1)
            if i >= len(header) or header[i] != name:
                raise SchemaError(
                    f"column {i + 1} must be {name!r}, got {header[i] if i < len(header) else None!r}", path=path, line=1, column=i + 1
                )
        row = 0
        for cells in reader:
            line = reader.line_num
            if not cells or all(not c.strip() for c in cells):
                continue
            row += 1
            if len(cells) < len(COLUMNS):
                raise ParseError(
                    f"expected {len(COLUMNS)} values, got {len(cells)}", path=path, line=line, column=len(cells) + 1
                )
            cells = [c.strip() for c in cells]
            nums = [_float_cell(cells[c], path, line, c + 1) for c in range(4)]
            flags = [_bool_cell(cells[c], path, line, c + 1) for c in (4, 5)]
            cols.push(row, line, *nums, *flags)
    return cols


def _json_bool(val, where: str, path) -> bool:
    if isinstance(val, bool):
        return val
    if val in (0, 1) and not isinstance(val, float):
        return bool(val)
    raise SchemaError(f"{where}: expected a boolean, got {val!r}", path=path)


def _read_json(path: Path) -> tuple[_Columns, dict]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict) or not isinstance(data.get("samples"), list):
        raise SchemaError("expected an object with a 'samples' list", path=path)
    cols = _Columns(path)
    for i, sample in enumerate(data["samples"]):
        where = f"samples[{i}]"
        if not isinstance(sample, dict):
            raise SchemaError(f"{where}: expected an object", path=path)
        for name in COLUMNS:
            if name not in sample:
                raise SchemaError(f"{where}: missing field {name!r}", path=path)
        nums = []
        for name in COLUMNS[:4]:
            val = sample[name]
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
                raise SchemaError(f"{where}.{name}: expected a finite number, got {val!r}", path=path)
            nums.append(float(val))
        flags = [_json_bool(sample[n], f"{where}.{n}", path) for n in COLUMNS[4:]]
        cols.push(i + 1, None, *nums, *flags)
    meta = {k: data[k] for k in ("run_id", "scenario_ref", "speed", "departure_angle") if data.get(k) is not None}
    return cols, meta


def ingest_run(path, format: Optional[str] = None, scenario_ref: Optional[str] = None, run_id: Optional[str] = None) -> TestRun:
    """Read and validate one run log.

    Explicit ``scenario_ref``/``run_id`` override the file's own metadata,
    which in turn overrides the ``<scenario>__<run>`` file-name convention.
    """
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format not in ("csv", "json"):
        raise ValueError(f"unknown run format {format!r}")
    stem_scenario, stem_run = split_stem(path)
    meta = {"scenario_ref": stem_scenario, "run_id": stem_run}
    try:
        if format == "csv":
            cols = _read_csv(path)
        else:
            cols, file_meta = _read_json(path)
            meta.update(file_meta)
    except OSError as exc:
        raise ParseError(f"cannot read run ({exc.strerror})", path=path) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text ({exc.reason})", path=path) from exc
    if scenario_ref is not None:
        meta["scenario_ref"] = scenario_ref
    if run_id is not None:
        meta["run_id"] = run_id
    meta["run_id"] = str(meta["run_id"])
    meta["scenario_ref"] = str(meta["scenario_ref"])
    for key in ("speed", "departure_angle"):
        if key in meta:
            meta[key] = float(meta[key])
    return cols.build(**meta)


def run_filename(run: TestRun, format: str = "csv") -> str:
    return f"{run.scenario_ref}{STEM_SEPARATOR}{run.run_id}.{format}"


def write_run_csv(run: TestRun, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for t, x, y, yaw, w, r in zip(
            run.t.tolist(), run.x.tolist(), run.y.tolist(), run.yaw.tolist(),
            run.warning_active.tolist(), run.rka_active.tolist(),
        ):
            writer.writerow((repr(t), repr(x), repr(y), repr(yaw), int(w), int(r)))


def write_run_json(run: TestRun, path) -> None:
    data = {
        "run_id": run.run_id,
        "scenario_ref": run.scenario_ref,
        "speed": run.speed,
        "departure_angle": run.departure_angle,
        "samples": [
            {"t": t, "x": x, "y": y, "yaw": yaw, "warning_active": w, "rka_active": r}
            for t, x, y, yaw, w, r in zip(
                run.t.tolist(), run.x.tolist(), run.y.tolist(), run.yaw.tolist(),
                run.warning_active.tolist(), run.rka_active.tolist(),
            )
        ],
    }
    Path(path).write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")


def discover_runs(paths, format: str = "csv") -> list[Path]:
    """Expand directories into sorted run files of the given format."""
    found = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(p.glob(f"*.{format}")):
                if f.name.endswith(SIDECAR_SUFFIX) or f.name.endswith(SERIES_SUFFIX):
                    continue
                found.append(f)
        else:
            found.append(p)
    return found
