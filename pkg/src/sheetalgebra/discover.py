"""Structure discovery: find data blocks in a raw sheet, group identical
formulas, read off neighbouring labels and subscript sequences, and propose
layout directives good enough to decompile with.

All heuristics are deterministic: fixed scan order, fixed word lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .layout import DOWN, RIGHT, LayoutDirective, LayoutSet
from .model import (
    Call,
    CellAddr,
    EquationSet,
    Number,
    RangeArg,
    Rect,
    Text,
    col_to_letters,
    is_constant,
    lhs_sort_key,
    walk,
)
from .formula import canonical_relative_text

MONTHS = ("january", "february", "march", "april", "may", "june", "july",
          "august", "september", "october", "november", "december")
MONTHS_SHORT = tuple(m[:3] for m in MONTHS)
WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday",
            "saturday", "sunday")
WEEKDAYS_SHORT = tuple(d[:3] for d in WEEKDAYS)


@dataclass(frozen=True)
class FormulaGroup:
    canonical_relative: str
    cells: tuple


def discover_groups(s: EquationSet) -> list[FormulaGroup]:
    """Partition the non-constant formula cells by canonical relative form.
    Largest groups first; ties broken by first cell."""
    groups: dict[str, list[CellAddr]] = {}
    for eq in s:
        if not isinstance(eq.lhs, CellAddr) or is_constant(eq.rhs):
            continue
        key = canonical_relative_text(eq.rhs, eq.lhs)
        groups.setdefault(key, []).append(eq.lhs)
    out = [FormulaGroup(key, tuple(sorted(cells, key=lhs_sort_key)))
           for key, cells in groups.items()]
    out.sort(key=lambda g: (-len(g.cells), lhs_sort_key(g.cells[0])))
    return out


def _is_text_cell(eq) -> bool:
    return isinstance(eq.rhs, Text)


def discover_blocks(s: EquationSet) -> list[Rect]:
    """Rectangular data regions: bounding boxes of connected runs of
    non-text cells, grown until boxes no longer overlap.  Every cell on the
    boundary ring is then blank or text by construction of the components.
    Ranges passed to SUM extend a box they overlap."""
    by_sheet: dict[str, set[tuple[int, int]]] = {}
    sum_rects: dict[str, list[Rect]] = {}
    for eq in s:
        if not isinstance(eq.lhs, CellAddr):
            continue
        sheet = eq.lhs.sheet
        if not _is_text_cell(eq):
            by_sheet.setdefault(sheet, set()).add((eq.lhs.col, eq.lhs.row))
        for node in walk(eq.rhs):
            if isinstance(node, Call) and node.func == "SUM":
                for arg in node.args:
                    if isinstance(arg, RangeArg):
                        for rect in arg.range.rects:
                            if rect.bounded:
                                sum_rects.setdefault(rect.sheet, []).append(rect)

    blocks: list[Rect] = []
    for sheet in sorted(by_sheet):
        cells = by_sheet[sheet]
        boxes = []
        unvisited = set(cells)
        for start in sorted(cells, key=lambda cr: (cr[1], cr[0])):
            if start not in unvisited:
                continue
            stack = [start]
            unvisited.discard(start)
            comp = []
            while stack:
                c, r = stack.pop()
                comp.append((c, r))
                for nc, nr in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
                    if (nc, nr) in unvisited:
                        unvisited.discard((nc, nr))
                        stack.append((nc, nr))
            cols = [c for c, _ in comp]
            rows = [r for _, r in comp]
            boxes.append([min(cols), max(cols), min(rows), max(rows)])

        for rect in sum_rects.get(sheet, ()):
            for box in boxes:
                if rect.col_lo <= box[1] and box[0] <= rect.col_hi \
                        and rect.row_lo <= box[3] and box[2] <= rect.row_hi:
                    box[0] = min(box[0], rect.col_lo)
                    box[1] = max(box[1], rect.col_hi)
                    box[2] = min(box[2], rect.row_lo)
                    box[3] = max(box[3], rect.row_hi)

        # merge overlapping boxes to a fixpoint so blocks never overlap
        changed = True
        while changed:
            changed = False
            for i in range(len(boxes)):
                for j in range(i + 1, len(boxes)):
                    a, b = boxes[i], boxes[j]
                    if a[0] <= b[1] and b[0] <= a[1] and a[2] <= b[3] and b[2] <= a[3]:
                        boxes[i] = [min(a[0], b[0]), max(a[1], b[1]),
                                    min(a[2], b[2]), max(a[3], b[3])]
                        del boxes[j]
                        changed = True
                        break
                if changed:
                    break
        boxes.sort(key=lambda b: (b[2], b[0]))
        blocks.extend(Rect(sheet, b[0], b[1], b[2], b[3]) for b in boxes)
    return blocks


def sanitize_identifier(label: str) -> str:
    name = label.strip().replace(" ", "_")
    name = re.sub(r"[^A-Za-z0-9_]", "", name)
    if not name:
        return ""
    if not re.match(r"[A-Za-z_]", name):
        name = "_" + name
    return name


@dataclass(frozen=True)
class LabelCandidates:
    # column/row index -> (identifier, source cell or None for fallbacks)
    columns: dict
    rows: dict


def infer_labels(s: EquationSet, block: Rect) -> LabelCandidates:
    """Name candidates from text cells near the block: for each column the
    nearest text cell at most two rows above; for each row the nearest text
    cell at most two columns to the left."""

    def text_at(col, row):
        if col < 1 or row < 1:
            return None
        eq = s.get(CellAddr(block.sheet, col, row))
        if eq is not None and isinstance(eq.rhs, Text):
            return eq
        return None

    columns = {}
    for col in range(block.col_lo, block.col_hi + 1):
        found = None
        for dr in (1, 2):
            eq = text_at(col, block.row_lo - dr)
            if eq is not None:
                name = sanitize_identifier(eq.rhs.value)
                if name:
                    found = (name, eq.lhs)
                    break
        columns[col] = found or (f"col_{col_to_letters(col)}", None)

    rows = {}
    for row in range(block.row_lo, block.row_hi + 1):
        found = None
        for dc in (1, 2):
            eq = text_at(block.col_lo - dc, row)
            if eq is not None:
                name = sanitize_identifier(eq.rhs.value)
                if name:
                    found = (name, eq.lhs)
                    break
        rows[row] = found or (f"row_{row}", None)
    return LabelCandidates(columns, rows)


@dataclass(frozen=True)
class SubscriptCandidate:
    axis: str  # "rows": sequence runs down; "cols": sequence runs right
    kind: str  # "arithmetic", "months", "weekdays"
    values: tuple
    cells: tuple
    step: int | None = None


def _integer_sequence(eqs):
    values = []
    for eq in eqs:
        if eq is None or not isinstance(eq.rhs, Number):
            return None
        v = eq.rhs.value
        if v != int(v):
            return None
        values.append(int(v))
    if len(values) < 2:
        return None
    step = values[1] - values[0]
    if any(b - a != step for a, b in zip(values, values[1:])) or step == 0:
        return None
    return values, step


def _word_run(eqs):
    words = []
    for eq in eqs:
        if eq is None or not isinstance(eq.rhs, Text):
            return None
        words.append(eq.rhs.value.strip().lower())
    if len(words) < 2:
        return None
    for kind, cycle in (("months", MONTHS), ("months", MONTHS_SHORT),
                        ("weekdays", WEEKDAYS), ("weekdays", WEEKDAYS_SHORT)):
        if words[0] in cycle:
            start = cycle.index(words[0])
            if all(w == cycle[(start + i) % len(cycle)] for i, w in enumerate(words)):
                return kind, words
    return None


def infer_subscripts(s: EquationSet, block: Rect) -> list[SubscriptCandidate]:
    """Index-sequence candidates: the column left of the block and the row
    above it, then the block's own first column/row.  A candidate is an
    integer arithmetic progression or a month/weekday run."""

    def eq_at(col, row):
        if col < 1 or row < 1:
            return None
        return s.get(CellAddr(block.sheet, col, row))

    probes = [
        ("rows", [eq_at(block.col_lo - 1, r)
                  for r in range(block.row_lo, block.row_hi + 1)]),
        ("cols", [eq_at(c, block.row_lo - 1)
                  for c in range(block.col_lo, block.col_hi + 1)]),
        ("rows", [eq_at(block.col_lo, r)
                  for r in range(block.row_lo, block.row_hi + 1)]),
        ("cols", [eq_at(c, block.row_lo)
                  for c in range(block.col_lo, block.col_hi + 1)]),
    ]
    out = []
    for axis, eqs in probes:
        seq = _integer_sequence(eqs)
        if seq is not None:
            values, step = seq
            cells = tuple(eq.lhs for eq in eqs)
            out.append(SubscriptCandidate(axis, "arithmetic", tuple(values), cells, step))
            continue
        run = _word_run(eqs)
        if run is not None:
            kind, words = run
            cells = tuple(eq.lhs for eq in eqs)
            out.append(SubscriptCandidate(axis, kind, tuple(words), cells))
    return out


@dataclass(frozen=True)
class LayoutProposal:
    directives: LayoutSet
    name_evidence: dict = field(default_factory=dict)
    subscript_evidence: dict = field(default_factory=dict)


def propose_layout(s: EquationSet) -> LayoutProposal:
    """Blocks -> one 1-D directive per column (or row), named from nearby
    labels and indexed by a detected subscript sequence (fallback 1..n)."""
    directives = []
    name_evidence = {}
    subscript_evidence = {}
    used_names = set()

    def unique(name):
        if name not in used_names:
            used_names.add(name)
            return name
        k = 2
        while f"{name}_{k}" in used_names:
            k += 1
        used_names.add(f"{name}_{k}")
        return f"{name}_{k}"

    for block in discover_blocks(s):
        labels = infer_labels(s, block)
        candidates = infer_subscripts(s, block)
        rows_cand = next((c for c in candidates if c.axis == "rows"), None)
        cols_cand = next((c for c in candidates if c.axis == "cols"), None)

        if cols_cand is not None and rows_cand is None:
            # sequence runs along the top: arrays run right, one per row
            n = block.col_hi - block.col_lo + 1
            box = _index_range(cols_cand, n)
            for row in range(block.row_lo, block.row_hi + 1):
                name = unique(labels.rows[row][0])
                d = LayoutDirective(name, (box,),
                                    CellAddr(block.sheet, block.col_lo, row), RIGHT)
                directives.append(d)
                name_evidence[name] = labels.rows[row]
                if cols_cand is not None:
                    subscript_evidence[name] = cols_cand
        else:
            n = block.row_hi - block.row_lo + 1
            box = _index_range(rows_cand, n)
            for col in range(block.col_lo, block.col_hi + 1):
                name = unique(labels.columns[col][0])
                d = LayoutDirective(name, (box,),
                                    CellAddr(block.sheet, col, block.row_lo), DOWN)
                directives.append(d)
                name_evidence[name] = labels.columns[col]
                if rows_cand is not None:
                    subscript_evidence[name] = rows_cand
    return LayoutProposal(LayoutSet(directives), name_evidence, subscript_evidence)


def _index_range(candidate, n):
    if (candidate is not None and candidate.kind == "arithmetic"
            and candidate.step == 1 and len(candidate.values) == n):
        return (candidate.values[0], candidate.values[-1])
    return (1, n)
