"""Core data model: cell addresses, ranges, array elements, formula trees,
equations and equation sets.

A spreadsheet is modeled as a finite set of `lhs = formula` definitions with
at most one equation per left-hand side.  All types here are immutable values;
operations elsewhere always build new sets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .errors import BoundednessError, ConflictError, DomainError

DEFAULT_SHEET = "Sheet1"


def col_to_letters(n: int) -> str:
    """Bijective base-26 column label: 1 -> A, 26 -> Z, 27 -> AA."""
    if n < 1:
        raise DomainError(f"column number must be >= 1, got {n}")
    s = ""
    while n:
        n, r = divmod(n - 1, 26)
        s = chr(ord("A") + r) + s
    return s


def letters_to_col(s: str) -> int:
    if not s or not s.isalpha():
        raise DomainError(f"not a column label: {s!r}")
    n = 0
    for ch in s.upper():
        n = n * 26 + (ord(ch) - ord("A") + 1)
    return n


@dataclass(frozen=True, order=True)
class CellAddr:
    sheet: str
    col: int
    row: int

    def __post_init__(self):
        if self.col < 1 or self.row < 1:
            raise DomainError(f"cell coordinates must be >= 1: col={self.col} row={self.row}")
        if not self.sheet:
            raise DomainError("sheet name must be nonempty")

    def offset(self, d_col: int, d_row: int) -> "CellAddr":
        return CellAddr(self.sheet, self.col + d_col, self.row + d_row)

    def a1(self, with_sheet: bool = False) -> str:
        text = f"{col_to_letters(self.col)}{self.row}"
        if with_sheet or self.sheet != DEFAULT_SHEET:
            return f"{self.sheet}!{text}"
        return text

    def __str__(self):
        return self.a1()


def addr(text: str, sheet: str = DEFAULT_SHEET) -> CellAddr:
    """Convenience constructor: addr("D2") or addr("Sheet2!D2")."""
    if "!" in text:
        sheet, text = text.split("!", 1)
    i = 0
    while i < len(text) and text[i].isalpha():
        i += 1
    if i == 0 or not text[i:].isdigit():
        raise DomainError(f"not a cell address: {text!r}")
    return CellAddr(sheet, letters_to_col(text[:i]), int(text[i:]))


@dataclass(frozen=True)
class Rect:
    """One rectangle of a range.  None bounds mean unbounded on that side."""

    sheet: str
    col_lo: int | None
    col_hi: int | None
    row_lo: int | None
    row_hi: int | None

    def __post_init__(self):
        for lo, hi in ((self.col_lo, self.col_hi), (self.row_lo, self.row_hi)):
            if lo is not None and lo < 1:
                raise DomainError(f"range bound must be >= 1, got {lo}")
            if lo is not None and hi is not None and lo > hi:
                raise DomainError(f"empty rectangle: {lo}..{hi}")

    @property
    def bounded(self) -> bool:
        return None not in (self.col_lo, self.col_hi, self.row_lo, self.row_hi)

    def contains(self, a: CellAddr) -> bool:
        return (
            a.sheet == self.sheet
            and (self.col_lo is None or a.col >= self.col_lo)
            and (self.col_hi is None or a.col <= self.col_hi)
            and (self.row_lo is None or a.row >= self.row_lo)
            and (self.row_hi is None or a.row <= self.row_hi)
        )

    def cells(self):
        if not self.bounded:
            raise BoundednessError("cannot enumerate an unbounded rectangle")
        for r in range(self.row_lo, self.row_hi + 1):
            for c in range(self.col_lo, self.col_hi + 1):
                yield CellAddr(self.sheet, c, r)


@dataclass(frozen=True)
class CellRange:
    """Union of rectangles, possibly non-contiguous, possibly unbounded."""

    rects: tuple[Rect, ...]

    @classmethod
    def cell(cls, a: CellAddr) -> "CellRange":
        return cls((Rect(a.sheet, a.col, a.col, a.row, a.row),))

    @classmethod
    def box(cls, a: CellAddr, b: CellAddr) -> "CellRange":
        if a.sheet != b.sheet:
            raise DomainError("range corners must share a sheet")
        return cls((Rect(a.sheet, min(a.col, b.col), max(a.col, b.col),
                         min(a.row, b.row), max(a.row, b.row)),))

    @classmethod
    def columns(cls, lo: int, hi: int, sheet: str = DEFAULT_SHEET) -> "CellRange":
        return cls((Rect(sheet, lo, hi, None, None),))

    @classmethod
    def rows(cls, lo: int, hi: int, sheet: str = DEFAULT_SHEET) -> "CellRange":
        return cls((Rect(sheet, None, None, lo, hi),))

    def union(self, other: "CellRange") -> "CellRange":
        return CellRange(self.rects + other.rects)

    @property
    def bounded(self) -> bool:
        return all(r.bounded for r in self.rects)

    def contains(self, a: CellAddr) -> bool:
        return any(r.contains(a) for r in self.rects)

    def is_single_cell(self) -> bool:
        cells = []
        for r in self.rects:
            if not r.bounded:
                return False
            cells.extend(r.cells())
            if len(set(cells)) > 1:
                return False
        return len(set(cells)) == 1

    def __str__(self):
        from .formula import print_range

        return print_range(self)


def enumerate_range(r: CellRange) -> list[CellAddr]:
    """Cells rectangle by rectangle, row-major within each; duplicates dropped,
    first occurrence kept."""
    if not r.bounded:
        raise BoundednessError("cannot enumerate an unbounded range")
    seen = set()
    out = []
    for rect in r.rects:
        for a in rect.cells():
            if a not in seen:
                seen.add(a)
                out.append(a)
    return out


def range_contains(r: CellRange, a: CellAddr) -> bool:
    return r.contains(a)


@dataclass(frozen=True, order=True)
class ArrayElem:
    name: str
    subs: tuple[int, ...]

    def __post_init__(self):
        if not self.subs:
            raise DomainError("array element needs at least one subscript")

    def __str__(self):
        return f"{self.name}[{','.join(str(s) for s in self.subs)}]"


# ---------------------------------------------------------------------------
# Formula trees


class Formula:
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Number(Formula):
    value: float

    # structural equality is bitwise on the IEEE double
    def _bits(self):
        return struct.pack("<d", self.value)

    def __eq__(self, other):
        return isinstance(other, Number) and self._bits() == other._bits()

    def __hash__(self):
        return hash(self._bits())


@dataclass(frozen=True)
class Text(Formula):
    value: str


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


@dataclass(frozen=True)
class Empty(Formula):
    pass


@dataclass(frozen=True)
class AbsRef(Formula):
    addr: CellAddr


@dataclass(frozen=True)
class RelRef(Formula):
    d_col: int
    d_row: int


@dataclass(frozen=True)
class Here:
    """Relative subscript marker inside an array-element reference."""

    offset: int = 0


@dataclass(frozen=True)
class ElemRef(Formula):
    name: str
    subs: tuple  # each entry: int or Here


@dataclass(frozen=True)
class NameRef(Formula):
    name: str


@dataclass(frozen=True)
class Neg(Formula):
    operand: Formula


BINARY_OPS = ("+", "-", "*", "/", "^", "=", "<>", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Binary(Formula):
    op: str
    left: Formula
    right: Formula

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise DomainError(f"unknown operator {self.op!r}")


@dataclass(frozen=True)
class Call(Formula):
    func: str
    args: tuple


@dataclass(frozen=True)
class RangeArg(Formula):
    range: CellRange


def children(f: Formula) -> tuple:
    if isinstance(f, Neg):
        return (f.operand,)
    if isinstance(f, Binary):
        return (f.left, f.right)
    if isinstance(f, Call):
        return f.args
    return ()


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, Neg):
        return Neg(kids[0])
    if isinstance(f, Binary):
        return Binary(f.op, kids[0], kids[1])
    if isinstance(f, Call):
        return Call(f.func, tuple(kids))
    return f


def transform(f: Formula, fn) -> Formula:
    """Bottom-up rewrite: children first, then fn applied to the rebuilt node."""
    kids = children(f)
    if kids:
        new_kids = tuple(transform(k, fn) for k in kids)
        if any(a is not b for a, b in zip(kids, new_kids)):
            f = rebuild(f, new_kids)
    return fn(f)


def walk(f: Formula):
    yield f
    for k in children(f):
        yield from walk(k)


def is_constant(f: Formula) -> bool:
    """True when the formula references nothing: only literals and operators."""
    return all(
        isinstance(n, (Number, Text, Bool, Empty, Neg, Binary))
        for n in walk(f)
    )


def validate_range_args(f: Formula):
    """RangeArg nodes are legal only directly under a Call."""
    from .errors import SubstitutionError

    def check(node, under_call):
        if isinstance(node, RangeArg) and not under_call:
            raise SubstitutionError("range is only allowed as a function argument")
        is_call = isinstance(node, Call)
        for k in children(node):
            check(k, is_call)

    check(f, False)


# ---------------------------------------------------------------------------
# Equations and equation sets


@dataclass(frozen=True)
class Equation:
    lhs: "CellAddr | ArrayElem"
    rhs: Formula


def lhs_sort_key(lhs):
    if isinstance(lhs, CellAddr):
        return (0, lhs.sheet, lhs.row, lhs.col)
    return (1, lhs.name, lhs.subs)


class EquationSet:
    """Immutable set of equations plus a defined-name table and optional
    layout directives carried along from a source document."""

    __slots__ = ("_eqs", "_names", "_layouts")

    def __init__(self, equations=(), names=None, layouts=()):
        eqs = {}
        for eq in equations:
            prev = eqs.get(eq.lhs)
            if prev is not None and prev.rhs != eq.rhs:
                raise ConflictError(f"conflicting equations for {eq.lhs}")
            eqs[eq.lhs] = eq
        self._eqs = eqs
        self._names = dict(names) if names else {}
        self._layouts = tuple(layouts)

    @property
    def names(self) -> dict:
        return dict(self._names)

    @property
    def layouts(self) -> tuple:
        return self._layouts

    def equations(self) -> list[Equation]:
        """Equations in canonical order: cells by (sheet, row, col), then
        array elements by (name, subscripts)."""
        return [self._eqs[k] for k in sorted(self._eqs, key=lhs_sort_key)]

    def lhs_set(self) -> set:
        return set(self._eqs)

    def get(self, lhs) -> Equation | None:
        return self._eqs.get(lhs)

    def __contains__(self, lhs):
        return lhs in self._eqs

    def __len__(self):
        return len(self._eqs)

    def __iter__(self):
        return iter(self.equations())

    def __eq__(self, other):
        return (
            isinstance(other, EquationSet)
            and self._eqs == other._eqs
            and self._names == other._names
            and self._layouts == other._layouts
        )

    def __hash__(self):
        return hash(frozenset(self._eqs))

    def __repr__(self):
        return f"EquationSet({len(self._eqs)} equations)"

    def with_names(self, names: dict) -> "EquationSet":
        return EquationSet(self._eqs.values(), names, self._layouts)

    def with_layouts(self, layouts) -> "EquationSet":
        return EquationSet(self._eqs.values(), self._names, layouts)

    def replace_equations(self, equations) -> "EquationSet":
        return EquationSet(equations, self._names, self._layouts)

    def sheets(self) -> set[str]:
        return {eq.lhs.sheet for eq in self._eqs.values() if isinstance(eq.lhs, CellAddr)}

    def all_cell_lhs(self) -> bool:
        return all(isinstance(lhs, CellAddr) for lhs in self._eqs)

    def all_array_lhs(self) -> bool:
        return all(isinstance(lhs, ArrayElem) for lhs in self._eqs)


EMPTY_SET = EquationSet()
