"""Formula text: tokenizer, parser and printer for the A1 and R1C1 dialects,
plus conversions between the raw / relative / absolute / substituted
representations of a formula.

The "canonical" dialect is the package's own printing convention, used as a
grouping key and in saved files: absolute references print A1-style, relative
references print R1C1 bracket style, function names uppercase, no whitespace,
minimal parentheses.
"""

from __future__ import annotations

import re

from .errors import (
    AnchorError,
    CrossSheetError,
    DomainError,
    FormulaSyntaxError,
    OutOfGridError,
)
from .model import (
    DEFAULT_SHEET,
    AbsRef,
    Binary,
    Bool,
    Call,
    CellAddr,
    CellRange,
    ElemRef,
    Empty,
    Formula,
    Here,
    NameRef,
    Neg,
    Number,
    RangeArg,
    Rect,
    RelRef,
    Text,
    col_to_letters,
    letters_to_col,
    transform,
    validate_range_args,
)

A1 = "a1"
R1C1 = "r1c1"
CANONICAL = "canonical"

# ---------------------------------------------------------------------------
# Tokenizer (shared with the script language)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<str>"(?:[^"]|"")*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|<>|\\/|><|\.\.|[-+*/^=<>(),:\[\]{}!@.;])
    """,
    re.VERBOSE,
)

NUM, STR, ID, OP, EOF = "num", "str", "id", "op", "eof"


def tokenize(src: str):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {src[pos]!r}", pos)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append((EOF, "", n))
    return tokens


class TokenStream:
    def __init__(self, src: str):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0

    def peek(self, ahead=0):
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != EOF:
            self.i += 1
        return tok

    def at_op(self, *ops, ahead=0):
        kind, text, _ = self.peek(ahead)
        return kind == OP and text in ops

    def accept_op(self, *ops):
        if self.at_op(*ops):
            return self.next()
        return None

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != OP or text != op:
            raise FormulaSyntaxError(f"expected {op!r}, found {text or 'end of input'!r}", pos)
        return self.next()

    def expect_id(self):
        kind, text, pos = self.peek()
        if kind != ID:
            raise FormulaSyntaxError(f"expected identifier, found {text or 'end of input'!r}", pos)
        return self.next()

    def mark(self):
        return self.i

    def reset(self, mark):
        self.i = mark

    @property
    def at_eof(self):
        return self.peek()[0] == EOF


def unquote_string(text: str) -> str:
    return text[1:-1].replace('""', '"')


def quote_string(value: str) -> str:
    return '"' + value.replace('"', '""') + '"'


_CELL_RE = re.compile(r"([A-Za-z]+)(\d+)\Z")
_R1C1_FULL_RE = re.compile(r"[Rr](\d+)[Cc](\d+)\Z")


class FormulaParser:
    """Recursive-descent parser over a shared token stream.

    allow_ranges controls whether a bare range (A1:B2, A:C, 2:4) may appear
    at the current position; it is enabled inside call arguments.
    """

    def __init__(self, stream: TokenStream, dialect: str = A1,
                 sheet: str = DEFAULT_SHEET):
        self.s = stream
        self.dialect = dialect
        self.sheet = sheet
        self._range_depth = 0

    # -- entry points -------------------------------------------------------

    def expression(self, allow_ranges=False) -> Formula:
        if allow_ranges:
            self._range_depth += 1
        try:
            return self._comparison()
        finally:
            if allow_ranges:
                self._range_depth -= 1

    # -- precedence ladder --------------------------------------------------

    def _comparison(self):
        left = self._additive()
        while self.s.at_op("=", "<>", "<", "<=", ">", ">="):
            op = self.s.next()[1]
            left = Binary(op, left, self._additive())
        return left

    def _additive(self):
        left = self._multiplicative()
        while self.s.at_op("+", "-"):
            op = self.s.next()[1]
            left = Binary(op, left, self._multiplicative())
        return left

    def _multiplicative(self):
        left = self._unary()
        while self.s.at_op("*", "/"):
            op = self.s.next()[1]
            left = Binary(op, left, self._unary())
        return left

    def _unary(self):
        if self.s.accept_op("-"):
            operand = self._unary()
            if isinstance(operand, Number):
                return Number(-operand.value)
            return Neg(operand)
        return self._power()

    def _power(self):
        base = self._primary()
        if self.s.accept_op("^"):
            return Binary("^", base, self._unary())
        return base

    # -- primaries ----------------------------------------------------------

    def _primary(self) -> Formula:
        kind, text, pos = self.s.peek()
        if kind == NUM:
            self.s.next()
            value = Number(float(text))
            if self._range_depth and self.s.at_op(":") and self.s.peek(1)[0] == NUM:
                # row range like 2:4 (function-argument position only)
                self.s.next()
                hi = int(self.s.next()[1])
                return RangeArg(CellRange.rows(int(float(text)), hi, self.sheet))
            return value
        if kind == STR:
            self.s.next()
            return Text(unquote_string(text))
        if kind == OP and text == "(":
            self.s.next()
            inner = self.expression(allow_ranges=self._range_depth > 0)
            self.s.expect_op(")")
            return inner
        if kind == ID:
            return self._identifier_primary()
        raise FormulaSyntaxError(f"unexpected {text or 'end of input'!r} in formula", pos)

    def _identifier_primary(self) -> Formula:
        _, text, pos = self.s.next()
        upper = text.upper()
        if upper == "TRUE" and not self.s.at_op("("):
            return Bool(True)
        if upper == "FALSE" and not self.s.at_op("("):
            return Bool(False)

        sheet = self.sheet
        if self.s.at_op("!"):
            self.s.next()
            sheet = text
            _, text, pos = self.s.peek()
            if self.s.peek()[0] != ID:
                raise FormulaSyntaxError("expected reference after sheet prefix", pos)
            self.s.next()
            upper = text.upper()

        if self.s.at_op("("):
            if upper == "EMPTY" and self.s.peek(1)[1] == ")":
                self.s.next()
                self.s.next()
                return Empty()
            return self._call(upper)
        if self.dialect in (R1C1, CANONICAL):
            ref = self._try_r1c1(text, sheet)
            if ref is not None:
                return ref
        if self.s.at_op("["):
            return self._elem_ref(text)
        if self.dialect in (A1, CANONICAL):
            m = _CELL_RE.match(text)
            if m:
                a = CellAddr(sheet, letters_to_col(m.group(1)), int(m.group(2)))
                if self._range_depth and self.s.at_op(":"):
                    rng = self._try_range_tail(a)
                    if rng is not None:
                        return rng
                return AbsRef(a)
            if (self._range_depth and text.isalpha() and self.s.at_op(":")
                    and self.s.peek(1)[0] == ID and self.s.peek(1)[1].isalpha()
                    and not _CELL_RE.match(self.s.peek(1)[1])):
                self.s.next()
                other = self.s.next()[1]
                return RangeArg(CellRange.columns(letters_to_col(text),
                                                  letters_to_col(other), sheet))
        return NameRef(text)

    def _try_range_tail(self, first: CellAddr):
        mark = self.s.mark()
        self.s.expect_op(":")
        kind, text, _ = self.s.peek()
        m = _CELL_RE.match(text) if kind == ID else None
        if m is None:
            self.s.reset(mark)
            return None
        self.s.next()
        second = CellAddr(first.sheet, letters_to_col(m.group(1)), int(m.group(2)))
        return RangeArg(CellRange.box(first, second))

    def _call(self, func: str) -> Formula:
        self.s.expect_op("(")
        args = []
        if not self.s.at_op(")"):
            while True:
                args.append(self.expression(allow_ranges=True))
                if not self.s.accept_op(","):
                    break
        self.s.expect_op(")")
        return Call(func, tuple(args))

    def _elem_ref(self, name: str) -> Formula:
        self.s.expect_op("[")
        subs = []
        while True:
            subs.append(self._subscript())
            if not self.s.accept_op(","):
                break
        self.s.expect_op("]")
        return ElemRef(name, tuple(subs))

    def _subscript(self):
        kind, text, pos = self.s.peek()
        if kind == ID and text.upper() == "HERE":
            self.s.next()
            if self.s.at_op("+", "-"):
                sign = -1 if self.s.next()[1] == "-" else 1
                k_kind, k_text, k_pos = self.s.next()
                if k_kind != NUM:
                    raise FormulaSyntaxError("expected integer after HERE offset", k_pos)
                return Here(sign * int(float(k_text)))
            return Here(0)
        neg = False
        if self.s.accept_op("-"):
            neg = True
            kind, text, pos = self.s.peek()
        if kind != NUM:
            raise FormulaSyntaxError("expected subscript", pos)
        self.s.next()
        value = int(float(text))
        return -value if neg else value

    # -- R1C1 references ----------------------------------------------------

    def _try_r1c1(self, text: str, sheet: str):
        m = _R1C1_FULL_RE.match(text)
        if m:
            return AbsRef(CellAddr(sheet, int(m.group(2)), int(m.group(1))))
        upper = text.upper()
        if upper == "RC":
            if self.s.at_op("["):
                return RelRef(self._bracket_int(), 0)
            return RelRef(0, 0)
        if upper == "R" and self.s.at_op("["):
            mark = self.s.mark()
            d_row = self._bracket_int()
            kind, ctext, _ = self.s.peek()
            if kind != ID or not re.fullmatch(r"[Cc]", ctext):
                self.s.reset(mark)
                return None
            self.s.next()
            d_col = self._bracket_int() if self.s.at_op("[") else 0
            return RelRef(d_col, d_row)
        return None

    def _bracket_int(self) -> int:
        self.s.expect_op("[")
        sign = -1 if self.s.accept_op("-") else 1
        kind, text, pos = self.s.next()
        if kind != NUM:
            raise FormulaSyntaxError("expected integer offset", pos)
        self.s.expect_op("]")
        return sign * int(float(text))


def parse_formula(src: str, dialect: str = A1, sheet: str = DEFAULT_SHEET) -> Formula:
    if not src.strip():
        raise FormulaSyntaxError("empty formula")
    stream = TokenStream(src)
    f = FormulaParser(stream, dialect, sheet).expression()
    if not stream.at_eof:
        kind, text, pos = stream.peek()
        raise FormulaSyntaxError(f"unexpected trailing {text!r}", pos)
    validate_range_args(f)
    return f


# ---------------------------------------------------------------------------
# Printing


def fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _rel_r1c1(d_col: int, d_row: int) -> str:
    r = "R" if d_row == 0 else f"R[{d_row}]"
    c = "C" if d_col == 0 else f"C[{d_col}]"
    return r + c


_PREC_ATOM = 9
_PREC = {"=": 1, "<>": 1, "<": 1, "<=": 1, ">": 1, ">=": 1,
         "+": 2, "-": 2, "*": 3, "/": 3, "^": 5}
_PREC_NEG = 4


def print_range(r: CellRange) -> str:
    parts = [_print_rect(rect) for rect in r.rects]
    if len(parts) == 1:
        return parts[0]
    return "(" + ",".join(parts) + ")"


def _print_rect(rect: Rect) -> str:
    prefix = "" if rect.sheet == DEFAULT_SHEET else rect.sheet + "!"
    if rect.bounded:
        lo = f"{col_to_letters(rect.col_lo)}{rect.row_lo}"
        hi = f"{col_to_letters(rect.col_hi)}{rect.row_hi}"
        return f"{prefix}{lo}:{hi}"
    if rect.col_lo is not None and rect.col_hi is not None and rect.row_lo is None and rect.row_hi is None:
        return f"{prefix}{col_to_letters(rect.col_lo)}:{col_to_letters(rect.col_hi)}"
    if rect.row_lo is not None and rect.row_hi is not None and rect.col_lo is None and rect.col_hi is None:
        return f"{prefix}{rect.row_lo}:{rect.row_hi}"
    raise DomainError("range shape has no printable form")


def print_formula(f: Formula, dialect: str = CANONICAL, anchor: CellAddr | None = None,
                  spaced_elems: bool = False) -> str:
    def ref_abs(a: CellAddr) -> str:
        if dialect == R1C1:
            prefix = "" if a.sheet == DEFAULT_SHEET else a.sheet + "!"
            return f"{prefix}R{a.row}C{a.col}"
        return a.a1()

    def ref_rel(d_col: int, d_row: int) -> str:
        if dialect == A1:
            if anchor is None:
                raise AnchorError("A1 printing of a relative reference needs an anchor")
            col, row = anchor.col + d_col, anchor.row + d_row
            if col < 1 or row < 1:
                raise OutOfGridError(f"relative reference leaves the grid: col={col} row={row}")
            return CellAddr(anchor.sheet, col, row).a1()
        return _rel_r1c1(d_col, d_row)

    def sub_text(s) -> str:
        if isinstance(s, Here):
            if s.offset == 0:
                return "HERE"
            sign = "+" if s.offset > 0 else "-"
            if spaced_elems:
                return f"HERE {sign} {abs(s.offset)}"
            return f"HERE{sign}{abs(s.offset)}"
        return str(s)

    def go(node: Formula, min_prec: int) -> str:
        if isinstance(node, Number):
            return fmt_number(node.value)
        if isinstance(node, Text):
            return quote_string(node.value)
        if isinstance(node, Bool):
            return "TRUE" if node.value else "FALSE"
        if isinstance(node, Empty):
            return "EMPTY()"
        if isinstance(node, AbsRef):
            return ref_abs(node.addr)
        if isinstance(node, RelRef):
            return ref_rel(node.d_col, node.d_row)
        if isinstance(node, ElemRef):
            if spaced_elems:
                return f"{node.name}[ {', '.join(sub_text(s) for s in node.subs)} ]"
            return f"{node.name}[{','.join(sub_text(s) for s in node.subs)}]"
        if isinstance(node, NameRef):
            return node.name
        if isinstance(node, Neg):
            text = "-" + go(node.operand, _PREC_NEG)
            return f"({text})" if _PREC_NEG < min_prec else text
        if isinstance(node, Binary):
            p = _PREC[node.op]
            if node.op == "^":
                text = go(node.left, p + 1) + node.op + go(node.right, p)
            else:
                text = go(node.left, p) + node.op + go(node.right, p + 1)
            return f"({text})" if p < min_prec else text
        if isinstance(node, Call):
            return f"{node.func}({','.join(go(a, 0) for a in node.args)})"
        if isinstance(node, RangeArg):
            return print_range(node.range)
        raise DomainError(f"unprintable node {node!r}")

    return go(f, 0)


def canonical_text(f: Formula) -> str:
    return print_formula(f, CANONICAL)


# ---------------------------------------------------------------------------
# Representation conversions


def contains_here(f: Formula) -> bool:
    from .model import walk

    return any(
        isinstance(n, ElemRef) and any(isinstance(s, Here) for s in n.subs)
        for n in walk(f)
    )


def to_absolute(f: Formula, anchor: CellAddr) -> Formula:
    """Resolve every relative reference against the anchor cell."""
    if contains_here(f):
        raise DomainError("formula contains HERE markers; resolve them first")

    def fix(node):
        if isinstance(node, RelRef):
            col, row = anchor.col + node.d_col, anchor.row + node.d_row
            if col < 1 or row < 1:
                raise OutOfGridError(
                    f"reference leaves the grid at {anchor}: col={col} row={row}")
            return AbsRef(CellAddr(anchor.sheet, col, row))
        return node

    return transform(f, fix)


def to_relative(f: Formula, anchor: CellAddr) -> Formula:
    """Turn every absolute reference into an offset from the anchor.
    Cross-sheet references cannot be made relative."""

    def fix(node):
        if isinstance(node, AbsRef):
            if node.addr.sheet != anchor.sheet:
                raise CrossSheetError(
                    f"cannot make {node.addr} relative to {anchor} on another sheet")
            return RelRef(node.addr.col - anchor.col, node.addr.row - anchor.row)
        return node

    return transform(f, fix)


def relative_form(f: Formula, anchor: CellAddr | None) -> Formula:
    """Lenient relative view used as a comparison/grouping key: same-sheet
    absolute references become offsets, cross-sheet ones stay absolute."""
    if anchor is None:
        return f

    def fix(node):
        if isinstance(node, AbsRef) and node.addr.sheet == anchor.sheet:
            return RelRef(node.addr.col - anchor.col, node.addr.row - anchor.row)
        return node

    return transform(f, fix)


def canonical_relative_text(f: Formula, anchor: CellAddr | None) -> str:
    return canonical_text(relative_form(f, anchor))


def substitute_names(f: Formula, names: dict) -> Formula:
    """Replace defined names by their ranges: single-cell names become plain
    references, multi-cell names become range arguments (only legal inside a
    function call).  Unknown names pass through."""

    def fix(node):
        if isinstance(node, NameRef) and node.name in names:
            rng = names[node.name]
            if rng.is_single_cell():
                from .model import enumerate_range

                return AbsRef(enumerate_range(rng)[0])
            return RangeArg(rng)
        return node

    out = transform(f, fix)
    validate_range_args(out)
    return out
