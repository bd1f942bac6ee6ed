"""Boolean network model, ``.bn`` parsing and structure-matrix extraction.

Grammar, one declaration per line::

    # comment
    input CD8
    X1 = X2 & !X3
    output Y1 = X1

Operators by increasing binding strength: ``<->``, ``|``, ``^``, ``&``,
``!``. Constants are ``0`` and ``1``. Names match
``[A-Za-z_][A-Za-z0-9_]*`` optionally followed by parenthesised suffixes
such as ``PLCg(act)``; a suffix must directly follow the name and contain
only word characters, which keeps it distinct from grouping parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .expr import (
    BinOp,
    Const,
    Expr,
    Not,
    Var,
    render,
    truth_table,
    variables,
)
from .stp import LogicalMatrix, stp, swap_matrix

__all__ = [
    "NetworkError",
    "BnSyntaxError",
    "UndeclaredVariable",
    "DuplicateName",
    "BooleanNetwork",
    "parse_network",
    "load_network",
    "structure_matrix",
    "is_functional",
    "is_functional_via_columns",
    "functional_variables",
]


class NetworkError(ValueError):
    pass


class BnSyntaxError(NetworkError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UndeclaredVariable(NetworkError):
    pass


class DuplicateName(NetworkError):
    pass


# ---------------------------------------------------------------------------
# expressions


_NAME = r"[A-Za-z_][A-Za-z0-9_]*(?:\([A-Za-z0-9_]*\))*"
_TOKEN = re.compile(rf"\s*(?:(?P<name>{_NAME})|(?P<const>[01])|(?P<op><->|[!&|^()]))")


class _ExprParser:
    def __init__(self, text: str, line: int, col0: int):
        self.text = text
        self.line = line
        self.col0 = col0
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                col = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise BnSyntaxError(f"unexpected character {text[col]!r}", line, col0 + col + 1)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def _error(self, msg: str):
        if self.i < len(self.tokens):
            col = self.tokens[self.i][2]
        else:
            col = len(self.text)
        raise BnSyntaxError(msg, self.line, self.col0 + col + 1)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            self._error(f"expected {value or 'expression'}")
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.tokens:
            self._error("empty expression")
        e = self.binary(1)
        if self.i != len(self.tokens):
            self._error(f"unexpected token {self.peek()[1]!r}")
        return e

    _LEVELS = {1: "<->", 2: "|", 3: "^", 4: "&"}

    def binary(self, level: int) -> Expr:
        if level > 4:
            return self.unary()
        op = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.peek()[0] == "op" and self.peek()[1] == op:
            self.take()
            left = BinOp(op, left, self.binary(level + 1))
        return left

    def unary(self) -> Expr:
        kind, value, _ = self.peek()
        if kind == "op" and value == "!":
            self.take()
            return Not(self.unary())
        if kind == "op" and value == "(":
            self.take()
            e = self.binary(1)
            self.take(")")
            return e
        if kind == "name":
            self.take()
            return Var(value)
        if kind == "const":
            self.take()
            return Const(value == "1")
        self._error("expected a name, constant, '!' or '('")


def parse_expr(text: str, line: int = 1, col0: int = 0) -> Expr:
    return _ExprParser(text, line, col0).parse()


# ---------------------------------------------------------------------------
# structure matrices and functional variables


def structure_matrix(expr: Expr, var_order: Sequence[str]) -> LogicalMatrix:
    """The 2 x 2^k matrix L with f(x_1..x_k) = L ⋉ x_1 ⋉ ... ⋉ x_k."""
    values = truth_table(expr, var_order)
    return LogicalMatrix(2, np.where(values, 1, 2))


def is_functional(expr: Expr, candidate: str) -> bool:
    """True iff flipping ``candidate`` changes the value for some assignment."""
    names = variables(expr)
    if candidate not in names:
        return False
    order = [candidate] + [v for v in names if v != candidate]
    table = truth_table(expr, order)
    half = table.size // 2
    return bool(np.any(table[:half] != table[half:]))


def is_functional_via_columns(L: LogicalMatrix, position: int) -> bool:
    """Column test on ``L ⋉ W_[2, 2^(i-1)]`` for the ``position``-th variable (1-based)."""
    k = L.cols.bit_length() - 1
    if L.rows != 2 or L.cols != 1 << k:
        raise ValueError("expected a 2 x 2^k structure matrix")
    if not 1 <= position <= k:
        raise ValueError(f"position {position} outside [1, {k}]")
    m = stp(L, swap_matrix(2, 1 << (position - 1)))
    half = 1 << (k - 1)
    return bool(np.any(m.col_index[:half] != m.col_index[half:]))


def functional_variables(expr: Expr, order: Sequence[str]) -> tuple[str, ...]:
    """Functional variables of ``expr`` listed in the order of ``order``."""
    syn = set(variables(expr))
    return tuple(v for v in order if v in syn and is_functional(expr, v))


# ---------------------------------------------------------------------------
# networks


@dataclass(frozen=True)
class BooleanNetwork:
    """State nodes with update rules, output sensors and free input nodes.

    ``declaration`` records every name in file order and fixes both the
    canonical serialization and the index order used by structure matrices.
    """

    states: tuple[tuple[str, Expr], ...]
    outputs: tuple[tuple[str, Expr], ...] = ()
    inputs: tuple[str, ...] = ()
    declaration: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.declaration:
            decl = tuple(self.inputs) + tuple(n for n, _ in self.states) + tuple(n for n, _ in self.outputs)
            object.__setattr__(self, "declaration", decl)
        self._validate()

    def _validate(self):
        names = [n for n, _ in self.states] + list(self.inputs) + [n for n, _ in self.outputs]
        seen = set()
        for n in names:
            if n in seen:
                raise DuplicateName(f"duplicate node name {n!r}")
            seen.add(n)
        if sorted(self.declaration) != sorted(names):
            raise NetworkError("declaration order does not match the declared nodes")
        known = set(self.variables)
        for owner, e in list(self.states) + list(self.outputs):
            for v in variables(e):
                if v not in known:
                    raise UndeclaredVariable(f"{owner!r} references undeclared node {v!r}")

    # -- naming -------------------------------------------------------------

    @cached_property
    def variables(self) -> tuple[str, ...]:
        """State and input names in declaration order."""
        kinds = set(self.state_names) | set(self.inputs)
        return tuple(n for n in self.declaration if n in kinds)

    @cached_property
    def state_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.states)

    @cached_property
    def output_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.outputs)

    @cached_property
    def index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.variables)}

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def p(self) -> int:
        return len(self.outputs)

    @cached_property
    def updates(self) -> dict[str, Expr]:
        return dict(self.states)

    @cached_property
    def sensors(self) -> dict[str, Expr]:
        return dict(self.outputs)

    def is_input(self, name: str) -> bool:
        return name in set(self.inputs)

    # -- functional signatures ---------------------------------------------

    @cached_property
    def functional(self) -> dict[str, tuple[str, ...]]:
        """Functional variables of every update and sensor, declaration-ordered."""
        out = {}
        for name, e in list(self.states) + list(self.outputs):
            out[name] = functional_variables(e, self.variables)
        return out

    def local_structure_matrix(self, name: str) -> LogicalMatrix:
        """Structure matrix of a node's rule over its functional variables."""
        e = self.updates.get(name)
        if e is None:
            e = self.sensors[name]
        return structure_matrix(e, self.functional[name])

    # -- derived networks ---------------------------------------------------

    def with_updates(self, new: Mapping[str, Expr]) -> "BooleanNetwork":
        states = tuple((n, new.get(n, e)) for n, e in self.states)
        return replace(self, states=states)

    def fix_inputs(self, values: Mapping[str, bool]) -> "BooleanNetwork":
        """Substitute constants for inputs, dropping them from the network."""
        from .expr import substitute

        mapping = {name: Const(bool(values.get(name, False))) for name in self.inputs}
        states = tuple((n, substitute(e, mapping)) for n, e in self.states)
        outputs = tuple((n, substitute(e, mapping)) for n, e in self.outputs)
        decl = tuple(n for n in self.declaration if n not in mapping)
        return BooleanNetwork(states, outputs, (), decl)

    # -- serialization ------------------------------------------------------

    def to_bn(self, header: Iterable[str] = ()) -> str:
        lines = [f"# {h}" if h else "#" for h in header]
        inputs = set(self.inputs)
        for name in self.declaration:
            if name in inputs:
                lines.append(f"input {name}")
            elif name in self.updates:
                lines.append(f"{name} = {render(self.updates[name])}")
            else:
                lines.append(f"output {name} = {render(self.sensors[name])}")
        return "\n".join(lines) + "\n"


def parse_network(text: str) -> BooleanNetwork:
    states: list[tuple[str, Expr]] = []
    outputs: list[tuple[str, Expr]] = []
    inputs: list[str] = []
    decl: list[str] = []
    where: dict[str, int] = {}
    name_re = re.compile(rf"\s*({_NAME})\s*")

    def declare(name: str, lineno: int):
        if name in where:
            raise DuplicateName(f"line {lineno}: duplicate node name {name!r} (first declared on line {where[name]})")
        where[name] = lineno
        decl.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.lstrip()
        offset = len(line) - len(stripped)
        keyword = None
        for kw in ("input", "output"):
            if re.match(rf"{kw}\s", stripped):
                keyword = kw
                offset += len(kw)
                break
        m = name_re.match(line, offset)
        if not m:
            raise BnSyntaxError("expected a node name", lineno, offset + 1)
        name = m.group(1)
        rest_at = m.end()
        if keyword == "input":
            if line[rest_at:].strip():
                raise BnSyntaxError("unexpected text after input name", lineno, rest_at + 1)
            declare(name, lineno)
            inputs.append(name)
            continue
        if rest_at >= len(line) or line[rest_at] != "=":
            raise BnSyntaxError("expected '='", lineno, rest_at + 1)
        expr = parse_expr(line[rest_at + 1 :], lineno, rest_at + 1)
        declare(name, lineno)
        (outputs if keyword == "output" else states).append((name, expr))

    return BooleanNetwork(tuple(states), tuple(outputs), tuple(inputs), tuple(decl))


def load_network(path) -> BooleanNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())
