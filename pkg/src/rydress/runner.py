"""Worker pool and resumable on-disk result store for grid scans."""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Iterable

WORKERS_ENV = "RYDRESS_WORKERS"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


class ResultStore:
    """Append-only JSON-lines store keyed by grid index.

    Rows are written by the parent process only, so a single writer owns
    the file.  ``rows()`` returns them sorted by index, never by completion
    order.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._rows: dict[int, dict] = {}
        if self.path.exists():
            with open(self.path) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        row = json.loads(line)
                        self._rows[int(row["index"])] = row

    @property
    def done(self) -> set[int]:
        return set(self._rows)

    def add(self, row: dict) -> None:
        self._rows[int(row["index"])] = row
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a") as fh:
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    def rows(self) -> list[dict]:
        return [self._rows[k] for k in sorted(self._rows)]


def map_points(fn: Callable, tasks: Iterable[tuple[int, object]], workers: int = 1,
               store: ResultStore | None = None) -> list[dict]:
    """Evaluate ``fn(task)`` for every (index, task) not already stored.

    ``fn`` must be a picklable top-level function returning a dict; the
    index is added to the dict.  Exceptions become rows with an ``error``
    field so a scan always runs to completion.
    """
    done = store.done if store is not None else set()
    todo = [(i, t) for i, t in tasks if i not in done]
    results: dict[int, dict] = {}

    def record(i, row):
        row = dict(row)
        row["index"] = i
        results[i] = row
        if store is not None:
            store.add(row)

    if workers <= 1 or len(todo) <= 1:
        for i, t in todo:
            record(i, _safe(fn, t))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(_safe, fn, t) for i, t in todo}
            for i in sorted(futures):
                record(i, futures[i].result())
    if store is not None:
        return store.rows()
    return [results[k] for k in sorted(results)]


def _safe(fn, task) -> dict:
    try:
        return fn(task)
    except Exception as exc:  # recorded per point, the scan continues
        return {"error": f"{type(exc).__name__}: {exc}"}


def write_csv(path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row.get(k, "")) for k in columns})


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x
