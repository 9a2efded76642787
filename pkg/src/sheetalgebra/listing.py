"""Human-readable listings of equation sets, including the grouped
compressed form, and re-expansion of a grouped listing back into a set.

A grouped region line looks like

    Sheet1[ {1} >< { 37..829 by 33 } ] = Sheet1[ HERE, HERE - 33 ]+1

reading: the cells at the cross product of those columns and rows all hold
the given relative formula, with HERE+-k standing for an offset from the
containing cell (column subscript first, row second).
"""

from __future__ import annotations

from .errors import FormulaSyntaxError
from .formula import (
    CANONICAL,
    FormulaParser,
    TokenStream,
    canonical_relative_text,
    canonical_text,
    print_formula,
    relative_form,
)
from .model import (
    CellAddr,
    ElemRef,
    Equation,
    EquationSet,
    Formula,
    Here,
    RelRef,
    transform,
)

ID, OP, NUM, EOF = "id", "op", "num", "eof"


def _eq_line(eq) -> str:
    if isinstance(eq.lhs, CellAddr):
        lhs = eq.lhs.a1()
    else:
        lhs = str(eq.lhs)
    return f"{lhs} = {canonical_text(eq.rhs)}"


def _trailer_lines(s: EquationSet) -> list[str]:
    lines = [str(d) for d in s.layouts]
    for name, rng in sorted(s.names.items()):
        lines.append(f"name {rng} as {name}")
    return lines


def show(s: EquationSet, grouped: bool = False) -> str:
    if not grouped:
        lines = [_eq_line(eq) for eq in s]
    else:
        lines = _grouped_lines(s)
    lines.extend(_trailer_lines(s))
    return "\n".join(lines)


def _axis_text(values) -> str:
    values = list(values)
    if len(values) == 1:
        return f"{{{values[0]}}}"
    step = values[1] - values[0]
    if all(b - a == step for a, b in zip(values, values[1:])) and step > 0:
        if step == 1:
            return f"{{ {values[0]}..{values[-1]} }}"
        return f"{{ {values[0]}..{values[-1]} by {step} }}"
    return f"{{ {', '.join(str(v) for v in values)} }}"


def _here_text(f: Formula, sheet: str) -> str:
    def fix(node):
        if isinstance(node, RelRef):
            return ElemRef(sheet, (Here(node.d_col), Here(node.d_row)))
        return node

    return print_formula(transform(f, fix), CANONICAL, spaced_elems=True)


def _grouped_lines(s: EquationSet) -> list[str]:
    # group cell equations per sheet by canonical relative form
    groups: dict[tuple[str, str], list] = {}
    plain = []
    order: dict[tuple[str, str], tuple] = {}
    for eq in s:
        if not isinstance(eq.lhs, CellAddr):
            plain.append(_eq_line(eq))
            continue
        key = (eq.lhs.sheet, canonical_relative_text(eq.rhs, eq.lhs))
        groups.setdefault(key, []).append(eq)
        if key not in order:
            order[key] = (eq.lhs.sheet, eq.lhs.row, eq.lhs.col)

    lines = []
    for key in sorted(groups, key=order.get):
        sheet, _ = key
        eqs = groups[key]
        if len(eqs) == 1:
            lines.append(_eq_line(eqs[0]))
            continue
        rep = eqs[0]
        body = _here_text(relative_form(rep.rhs, rep.lhs), sheet)
        by_col: dict[int, list[int]] = {}
        for eq in eqs:
            by_col.setdefault(eq.lhs.col, []).append(eq.lhs.row)
        by_rows: dict[tuple, list[int]] = {}
        for col in sorted(by_col):
            rows = tuple(sorted(by_col[col]))
            by_rows.setdefault(rows, []).append(col)
        for rows, cols in sorted(by_rows.items(), key=lambda kv: (kv[1][0], kv[0][0])):
            lines.append(
                f"{sheet}[ {_axis_text(sorted(cols))} >< {_axis_text(rows)} ] = {body}")
    lines.extend(plain)
    return lines


# ---------------------------------------------------------------------------
# Re-expanding a grouped listing


def _parse_axis(stream: TokenStream) -> list[int]:
    stream.expect_op("{")
    values: list[int] = []
    while True:
        kind, text, pos = stream.next()
        if kind != NUM:
            raise FormulaSyntaxError("expected integer in axis set", pos)
        lo = int(float(text))
        if stream.accept_op(".."):
            kind, text, pos = stream.next()
            if kind != NUM:
                raise FormulaSyntaxError("expected integer after '..'", pos)
            hi = int(float(text))
            step = 1
            nxt = stream.peek()
            if nxt[0] == ID and nxt[1] == "by":
                stream.next()
                kind, text, pos = stream.next()
                if kind != NUM:
                    raise FormulaSyntaxError("expected integer after 'by'", pos)
                step = int(float(text))
            values.extend(range(lo, hi + 1, step))
        else:
            values.append(lo)
        if not stream.accept_op(","):
            break
    stream.expect_op("}")
    return values


def _relativize_here(f: Formula, sheet: str) -> Formula:
    def fix(node):
        if (isinstance(node, ElemRef) and node.name == sheet
                and len(node.subs) == 2
                and all(isinstance(sub, Here) for sub in node.subs)):
            return RelRef(node.subs[0].offset, node.subs[1].offset)
        return node

    return transform(f, fix)


def parse_listing(text: str) -> EquationSet:
    """Parse a listing produced by show(): plain equation lines, region
    lines, layout and name lines.  Region lines expand to one equation per
    cell holding the relative formula."""
    from .fileio import _parse_entry, _DocState

    stream = TokenStream(text)
    state = _DocState()
    while not stream.at_eof:
        if stream.accept_op(",") or stream.accept_op(";") or stream.accept_op("."):
            continue
        kind, tok_text, _ = stream.peek()
        if (kind == ID and stream.peek(1)[1] == "[" and stream.peek(2)[1] == "{"):
            _parse_region(stream, state)
        else:
            _parse_entry(stream, state)
    return EquationSet(state.equations, state.names, state.layouts)


def _parse_region(stream: TokenStream, state):
    sheet = stream.expect_id()[1]
    stream.expect_op("[")
    cols = _parse_axis(stream)
    stream.expect_op("><")
    rows = _parse_axis(stream)
    stream.expect_op("]")
    stream.expect_op("=")
    rhs = FormulaParser(stream, CANONICAL).expression()
    rhs = _relativize_here(rhs, sheet)
    for col in cols:
        for row in rows:
            state.equations.append(Equation(CellAddr(sheet, col, row), rhs))
