"""A simple spreadsheet engine: dependency analysis, cycle detection, and
numeric evaluation of cell equation sets.

Values are plain Python objects: float, str, bool, None (empty), or
CellError.  Errors propagate through arithmetic; cells on a dependency cycle
evaluate to CellError("CYCLE") while off-cycle cells still evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .formula import substitute_names, to_absolute
from .model import (
    AbsRef,
    Binary,
    Bool,
    Call,
    CellAddr,
    ElemRef,
    Empty,
    EquationSet,
    Formula,
    NameRef,
    Neg,
    Number,
    RangeArg,
    RelRef,
    Rect,
    Text,
    walk,
)

DIV0, CYCLE, VALUE, REF = "DIV0", "CYCLE", "VALUE", "REF"


@dataclass(frozen=True)
class CellError:
    tag: str

    def __str__(self):
        return f"#{self.tag}!"


def _clip_rect(rect: Rect, extent: dict) -> Rect | None:
    """Bound an unbounded rectangle side by the sheet's occupied extent."""
    if rect.bounded:
        return rect
    box = extent.get(rect.sheet)
    if box is None:
        return None
    c_lo, c_hi, r_lo, r_hi = box
    return Rect(
        rect.sheet,
        rect.col_lo if rect.col_lo is not None else c_lo,
        rect.col_hi if rect.col_hi is not None else c_hi,
        rect.row_lo if rect.row_lo is not None else r_lo,
        rect.row_hi if rect.row_hi is not None else r_hi,
    )


def _sheet_extent(s: EquationSet) -> dict:
    extent = {}
    for lhs in s.lhs_set():
        if not isinstance(lhs, CellAddr):
            continue
        box = extent.get(lhs.sheet)
        if box is None:
            extent[lhs.sheet] = [lhs.col, lhs.col, lhs.row, lhs.row]
        else:
            box[0] = min(box[0], lhs.col)
            box[1] = max(box[1], lhs.col)
            box[2] = min(box[2], lhs.row)
            box[3] = max(box[3], lhs.row)
    return extent


def _resolved_rhs(s: EquationSet) -> dict:
    """Each cell's formula with relative references fixed up against its own
    cell and defined names substituted."""
    out = {}
    for eq in s:
        if not isinstance(eq.lhs, CellAddr):
            raise DomainError("evaluation expects cell left-hand sides")
        rhs = to_absolute(eq.rhs, eq.lhs)
        out[eq.lhs] = substitute_names(rhs, s.names)
    return out


def _range_cells(rng, extent, defined):
    cells = []
    seen = set()
    for rect in rng.rects:
        clipped = _clip_rect(rect, extent)
        if clipped is None:
            continue
        for a in clipped.cells():
            if a not in seen:
                seen.add(a)
                cells.append(a)
    return [a for a in cells if a in defined] if defined is not None else cells


def build_deps(s: EquationSet) -> dict:
    """Dependency graph: cell -> set of cells its formula references,
    including cells inside range arguments."""
    resolved = _resolved_rhs(s)
    extent = _sheet_extent(s)
    deps = {}
    for lhs, rhs in resolved.items():
        refs = set()
        for node in walk(rhs):
            if isinstance(node, AbsRef):
                refs.add(node.addr)
            elif isinstance(node, RangeArg):
                refs.update(_range_cells(node.range, extent, None))
        deps[lhs] = refs
    return deps


def _cycle_members(deps: dict) -> set:
    """Strongly connected components of size > 1, plus self-loops.
    Iterative Tarjan."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    counter = [0]
    cyclic = set()

    for root in deps:
        if root in index:
            continue
        work = [(root, iter(sorted(d for d in deps[root] if d in deps)))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = lowlink[child] = counter[0]
                    counter[0] += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(sorted(d for d in deps[child] if d in deps))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                if len(comp) > 1:
                    cyclic.update(comp)
                elif comp[0] in deps[comp[0]]:
                    cyclic.add(comp[0])
    return cyclic


def _topo_order(deps: dict, tie_break=None, resolved=frozenset()) -> list:
    """Kahn's algorithm over the non-resolved nodes.  Edges into `resolved`
    nodes (cycle members, whose values are already fixed) do not count."""
    indeg = {n: 0 for n in deps if n not in resolved}
    dependents = {n: [] for n in indeg}
    for n in indeg:
        for d in deps[n]:
            if d in indeg:
                indeg[n] += 1
                dependents[d].append(n)
    key = tie_break or (lambda a: (a.sheet, a.row, a.col))
    ready = sorted((n for n, d in indeg.items() if d == 0), key=key)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        fresh = []
        for m in dependents[node]:
            indeg[m] -= 1
            if indeg[m] == 0:
                fresh.append(m)
        for m in sorted(fresh, key=key):
            ready.append(m)
    return order


def _to_number(v):
    if isinstance(v, CellError):
        return v
    if v is None:
        return 0.0
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, float):
        return v
    return CellError(VALUE)


def _arith(op: str, lv, rv):
    a, b = _to_number(lv), _to_number(rv)
    if isinstance(a, CellError):
        return a
    if isinstance(b, CellError):
        return b
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0:
                return CellError(DIV0)
            return a / b
        v = a ** b
        if isinstance(v, complex):
            return CellError(VALUE)
        return float(v)
    except ZeroDivisionError:
        return CellError(DIV0)
    except (OverflowError, ValueError):
        return CellError(VALUE)


def _compare(op: str, lv, rv):
    for v in (lv, rv):
        if isinstance(v, CellError):
            return v
    lv = 0.0 if lv is None else lv
    rv = 0.0 if rv is None else rv
    if op == "=":
        return lv == rv
    if op == "<>":
        return lv != rv
    if type(lv) is not type(rv):
        return CellError(VALUE)
    try:
        if op == "<":
            return lv < rv
        if op == "<=":
            return lv <= rv
        if op == ">":
            return lv > rv
        return lv >= rv
    except TypeError:
        return CellError(VALUE)


def _flatten_args(args, cell_value, extent, defined):
    values = []
    for arg in args:
        if isinstance(arg, RangeArg):
            for a in _range_cells(arg.range, extent, defined):
                values.append(cell_value(a))
        else:
            values.append(arg)
    return values


def _numeric_args(values, skip_empty=True):
    nums = []
    for v in values:
        if isinstance(v, CellError):
            return v
        if v is None and skip_empty:
            continue
        n = _to_number(v)
        if isinstance(n, CellError):
            return n
        nums.append(n)
    return nums


def _call(func, values):
    if func == "SUM":
        nums = _numeric_args(values)
        return nums if isinstance(nums, CellError) else float(sum(nums))
    if func in ("MIN", "MAX"):
        nums = _numeric_args(values)
        if isinstance(nums, CellError):
            return nums
        if not nums:
            return 0.0
        return float(min(nums) if func == "MIN" else max(nums))
    if func in ("ABS", "SQRT", "EXP", "LN", "NOT"):
        if len(values) != 1:
            return CellError(VALUE)
        v = values[0]
        if isinstance(v, CellError):
            return v
        if func == "NOT":
            return not _truthy(v)
        n = _to_number(v)
        if isinstance(n, CellError):
            return n
        try:
            if func == "ABS":
                return abs(n)
            if func == "SQRT":
                return math.sqrt(n)
            if func == "EXP":
                return math.exp(n)
            return math.log(n)
        except (ValueError, OverflowError):
            return CellError(VALUE)
    if func == "MOD":
        if len(values) != 2:
            return CellError(VALUE)
        a, b = (_to_number(v) for v in values)
        for v in (a, b):
            if isinstance(v, CellError):
                return v
        if b == 0:
            return CellError(DIV0)
        return a - b * math.floor(a / b)
    if func == "IF":
        if len(values) not in (2, 3):
            return CellError(VALUE)
        cond = values[0]
        if isinstance(cond, CellError):
            return cond
        if _truthy(cond):
            return values[1]
        return values[2] if len(values) == 3 else False
    if func in ("AND", "OR"):
        bools = []
        for v in values:
            if isinstance(v, CellError):
                return v
            bools.append(_truthy(v))
        return all(bools) if func == "AND" else any(bools)
    return CellError(VALUE)


def _truthy(v):
    if isinstance(v, bool):
        return v
    if v is None:
        return False
    if isinstance(v, float):
        return v != 0
    return bool(v)


def _eval_formula(f: Formula, cell_value, extent, defined):
    if isinstance(f, Number):
        return f.value
    if isinstance(f, Text):
        return f.value
    if isinstance(f, Bool):
        return f.value
    if isinstance(f, Empty):
        return None
    if isinstance(f, AbsRef):
        v = cell_value(f.addr)
        # a reference to an empty cell reads as 0, as in a spreadsheet
        return 0.0 if v is None else v
    if isinstance(f, (RelRef, ElemRef)):
        return CellError(REF)
    if isinstance(f, NameRef):
        return CellError(REF)
    if isinstance(f, Neg):
        v = _to_number(_eval_formula(f.operand, cell_value, extent, defined))
        return v if isinstance(v, CellError) else -v
    if isinstance(f, Binary):
        lv = _eval_formula(f.left, cell_value, extent, defined)
        rv = _eval_formula(f.right, cell_value, extent, defined)
        if f.op in ("+", "-", "*", "/", "^"):
            return _arith(f.op, lv, rv)
        return _compare(f.op, lv, rv)
    if isinstance(f, Call):
        args = [a if isinstance(a, RangeArg)
                else _eval_formula(a, cell_value, extent, defined)
                for a in f.args]
        return _call(f.func, _flatten_args(args, cell_value, extent, defined))
    if isinstance(f, RangeArg):
        return CellError(VALUE)
    raise DomainError(f"cannot evaluate node {f!r}")


def evaluate(s: EquationSet, tie_break=None) -> dict:
    """Evaluate every cell in dependency order.  Returns a grid mapping each
    defined cell to its value."""
    resolved = _resolved_rhs(s)
    extent = _sheet_extent(s)
    deps = build_deps(s)
    cyclic = _cycle_members(deps)
    defined = set(resolved)

    grid: dict[CellAddr, object] = {a: CellError(CYCLE) for a in cyclic}

    def cell_value(a: CellAddr):
        if a in grid:
            return grid[a]
        return None  # undefined cells read as empty

    for a in _topo_order(deps, tie_break, cyclic):
        grid[a] = _eval_formula(resolved[a], cell_value, extent, defined)
    return grid


def evaluate_cell(s: EquationSet, a: CellAddr):
    grid = evaluate(s)
    return grid.get(a)
