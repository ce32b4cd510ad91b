"""Replica CSV files.

``replica_XXX.csv``  header ``replica,n,d,count_all,count_selected``; one row
per degree with count_all > 0 and d <= d_max, then the sentinel rows
``d = -1`` (count_all = |V_n|, count_selected = |S_n|) and ``d = -2`` (mass
above d_max, all and selected).

``replica_XXX_new.csv``  header ``replica,n,d,count_new,count_new_selected``;
added vertices counted by their degree at creation, cumulative up to n.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from ..graph import Checkpoint

HEADER = ["replica", "n", "d", "count_all", "count_selected"]
NEW_HEADER = ["replica", "n", "d", "count_new", "count_new_selected"]
SIZE_ROW = -1
OVERFLOW_ROW = -2


def replica_paths(run_dir, replica):
    run_dir = Path(run_dir)
    return run_dir / f"replica_{replica:03d}.csv", run_dir / f"replica_{replica:03d}_new.csv"


def write_replica(run_dir, replica, checkpoints, d_max=None):
    main, new = replica_paths(run_dir, replica)
    with open(main, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for cp in checkpoints:
            over_all = over_sel = 0
            for d, count in enumerate(cp.histogram):
                sel = cp.x_star[d] if d < len(cp.x_star) else 0
                if d_max is not None and d > d_max:
                    over_all += count
                    over_sel += sel
                elif count:
                    w.writerow([replica, cp.n, d, count, sel])
            w.writerow([replica, cp.n, SIZE_ROW, cp.n_vertices, cp.s_size])
            w.writerow([replica, cp.n, OVERFLOW_ROW, over_all, over_sel])
    with open(new, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NEW_HEADER)
        for cp in checkpoints:
            for d, count in enumerate(cp.new_degrees):
                sel = cp.new_selected_degrees[d] if d < len(cp.new_selected_degrees) else 0
                if count:
                    w.writerow([replica, cp.n, d, count, sel])
    return main, new


@dataclass
class StoredCheckpoint:
    """A checkpoint read back from disk; histograms are dicts degree -> count."""

    replica: int
    n: int
    counts: dict = field(default_factory=dict)
    selected: dict = field(default_factory=dict)
    n_vertices: int = 0
    s_size: int = 0
    overflow_all: int = 0
    overflow_selected: int = 0
    new_counts: dict = field(default_factory=dict)
    new_selected: dict = field(default_factory=dict)

    def to_checkpoint(self):
        def dense(dct):
            top = max(dct, default=-1)
            return tuple(dct.get(d, 0) for d in range(top + 1))

        return Checkpoint(n=self.n, histogram=dense(self.counts), x_star=dense(self.selected),
                          s_size=self.s_size, n_vertices=self.n_vertices,
                          new_degrees=dense(self.new_counts),
                          new_selected_degrees=dense(self.new_selected))


def read_replica(path, new_path=None):
    """Checkpoints of one replica file in step order."""
    by_n = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            r, n, d, a, s = (int(v) for v in row)
            cp = by_n.setdefault(n, StoredCheckpoint(replica=r, n=n))
            if d == SIZE_ROW:
                cp.n_vertices, cp.s_size = a, s
            elif d == OVERFLOW_ROW:
                cp.overflow_all, cp.overflow_selected = a, s
            else:
                cp.counts[d] = a
                if s:
                    cp.selected[d] = s
    if new_path is not None and Path(new_path).exists():
        with open(new_path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            if next(reader) != NEW_HEADER:
                raise ValueError(f"{new_path}: unexpected header")
            for row in reader:
                r, n, d, a, s = (int(v) for v in row)
                cp = by_n.get(n)
                if cp is not None:
                    cp.new_counts[d] = a
                    if s:
                        cp.new_selected[d] = s
    return [by_n[n] for n in sorted(by_n)]
