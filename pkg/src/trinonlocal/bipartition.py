"""Cell coordinates of kets under the three cyclic bipartitions.

Under ``A|BC`` a basis ket ``|i,j,k>`` sits at row ``i`` and fused column
``(j, k)``; ``B|CA`` uses row ``j`` and column ``(k, i)``; ``C|AB`` uses row
``k`` and column ``(i, j)``.  Columns stay as ordered pairs in every report.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

from .field import CycNum
from .states import CUTS, Dims, Ket, StateSet

Col = tuple[int, int]

_ALIASES = {"A|BC": "A|BC", "A-BC": "A|BC", "B|CA": "B|CA", "B-CA": "B|CA", "C|AB": "C|AB", "C-AB": "C|AB"}


@dataclass(frozen=True)
class Bipartition:
    tag: str

    def __post_init__(self):
        if self.tag not in CUTS:
            raise ValueError(f"unknown bipartition {self.tag!r}")

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        try:
            return cls(_ALIASES[text.strip().upper()])
        except KeyError:
            raise ValueError(f"unknown bipartition {text!r}; use A-BC, B-CA or C-AB") from None

    @property
    def party(self) -> int:
        return CUTS.index(self.tag)

    def shape(self, dims: Dims) -> tuple[int, tuple[int, int]]:
        """``(n_row, (n_c1, n_c2))`` for this cut."""
        a = self.party
        return dims[a], (dims[(a + 1) % 3], dims[(a + 2) % 3])

    def joint_dim(self, dims: Dims) -> int:
        _, (n1, n2) = self.shape(dims)
        return n1 * n2

    def split(self, idx) -> tuple[int, Col]:
        a = self.party
        return idx[a], (idx[(a + 1) % 3], idx[(a + 2) % 3])

    def columns(self, dims: Dims) -> list[Col]:
        _, (n1, n2) = self.shape(dims)
        return list(itertools.product(range(n1), range(n2)))

    def flatten(self, col: Col, dims: Dims) -> int:
        _, (_, n2) = self.shape(dims)
        return col[0] * n2 + col[1]

    @property
    def flag(self) -> str:
        return self.tag.replace("|", "-")

    def __str__(self):
        return self.tag


ALL_CUTS = tuple(Bipartition(t) for t in CUTS)


@dataclass(frozen=True)
class Cell:
    row: int
    col: Col
    amp: CycNum


def cells(x: Ket, b: Bipartition) -> list[Cell]:
    out = [Cell(*b.split(idx), a) for idx, a in x.items()]
    out.sort(key=lambda c: (c.row, c.col))
    return out


def matched_row_pairs(x: Ket, y: Ket, b: Bipartition) -> list[tuple[Cell, Cell]]:
    by_row: dict[int, list[Cell]] = {}
    for c in cells(y, b):
        by_row.setdefault(c.row, []).append(c)
    return [(cx, cy) for cx in cells(x, b) for cy in by_row.get(cx.row, ())]


class CollisionError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneStructure:
    bipartition: Bipartition
    rows: int
    cols: tuple[int, int]
    grid: dict  # (row, col) -> label

    def to_json(self) -> dict:
        return {
            "bipartition": self.bipartition.tag,
            "rows": self.rows,
            "cols": list(self.cols),
            "slots": [{"row": r, "col": list(c), "label": lab}
                      for (r, c), lab in sorted(self.grid.items())],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bipartition", "row", "col1", "col2", "label"])
        for (r, c), lab in sorted(self.grid.items()):
            w.writerow([self.bipartition.tag, r, c[0], c[1], lab])
        return buf.getvalue()

    def ascii(self, stopper_label: str | None = None) -> str:
        """Terminal rendering: one line per row, one field per fused column."""
        n1, n2 = self.cols
        columns = list(itertools.product(range(n1), range(n2)))
        names = {lab for lab in self.grid.values()}
        width = max([len(_short(n)) for n in names] + [2]) + 1
        head = " " * 4 + "".join(f"{c1}{c2}".rjust(width) for c1, c2 in columns)
        lines = [f"{self.bipartition.tag}  ({self.rows} x {n1 * n2})", head]
        for r in range(self.rows):
            cells_ = []
            for c in columns:
                lab = self.grid.get((r, c))
                cells_.append(("." if lab is None else _short(lab)).rjust(width))
            lines.append(f"{r:>3} " + "".join(cells_))
        return "\n".join(lines)


def _short(label: str) -> str:
    return label[3:] if label.startswith("phi") else label


def plane_structure(s: StateSet, b: Bipartition, include_stopper: bool = False) -> PlaneStructure:
    """Slot map of every non-stopper state; the stopper fills all slots, so
    it is skipped unless ``include_stopper`` (then it never collides)."""
    rows, cols = b.shape(s.dims)
    grid: dict = {}
    for n, (lab, ket) in enumerate(s.states):
        if n == s.stopper and not include_stopper:
            continue
        for c in cells(ket, b):
            key = (c.row, c.col)
            if n == s.stopper:
                grid.setdefault(key, lab)
                continue
            prev = grid.get(key)
            if prev is not None and prev != s.stopper_label:
                raise CollisionError(f"slot {key} of {b.tag} claimed by {prev!r} and {lab!r}")
            grid[key] = lab
    return PlaneStructure(b, rows, cols, grid)


def cube_coordinates(s: StateSet) -> list[dict]:
    """Flat list of occupied cubes ``(i, j, k)`` with their state labels."""
    out = []
    for n, (lab, ket) in enumerate(s.states):
        if n == s.stopper:
            continue
        for idx, a in ket.items():
            out.append({"idx": list(idx), "label": lab, **a.to_json()})
    out.sort(key=lambda e: e["idx"])
    return out
