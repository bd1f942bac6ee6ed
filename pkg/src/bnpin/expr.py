"""Boolean expression trees, evaluation and two-level minimization."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Not",
    "BinOp",
    "TRUE",
    "FALSE",
    "variables",
    "evaluate",
    "substitute",
    "render",
    "truth_table",
    "from_truth_table",
    "MAX_FANIN",
    "FaninTooLarge",
]

# in-degree above this is rejected; the tables would have more than 2**16 rows
MAX_FANIN = 16


class FaninTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of & | ^ <->
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Not, BinOp]

TRUE = Const(True)
FALSE = Const(False)

_BINOPS: dict[str, Callable] = {
    "&": np.logical_and,
    "|": np.logical_or,
    "^": np.logical_xor,
    "<->": lambda a, b: np.logical_not(np.logical_xor(a, b)),
}

# binding strength, higher binds tighter
_PREC = {"<->": 1, "|": 2, "^": 3, "&": 4}


def variables(expr: Expr) -> list[str]:
    """Syntactic variables in first-occurrence order."""
    seen: dict[str, None] = {}

    def walk(e):
        if isinstance(e, Var):
            seen.setdefault(e.name, None)
        elif isinstance(e, Not):
            walk(e.arg)
        elif isinstance(e, BinOp):
            walk(e.left)
            walk(e.right)

    walk(expr)
    return list(seen)


def evaluate(expr: Expr, env: Mapping[str, object]):
    """Evaluate on scalars or on equally-shaped boolean arrays."""
    if isinstance(expr, Const):
        return np.bool_(expr.value)
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Not):
        return np.logical_not(evaluate(expr.arg, env))
    return _BINOPS[expr.op](evaluate(expr.left, env), evaluate(expr.right, env))


def substitute(expr: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if isinstance(expr, Var):
        return mapping.get(expr.name, expr)
    if isinstance(expr, Not):
        return Not(substitute(expr.arg, mapping))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, substitute(expr.left, mapping), substitute(expr.right, mapping))
    return expr


def render(expr: Expr, _parent: int = 0) -> str:
    """Canonical text form with the fewest parentheses the grammar allows."""
    if isinstance(expr, Const):
        return "1" if expr.value else "0"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Not):
        inner = render(expr.arg, 5)
        return "!" + inner
    prec = _PREC[expr.op]
    # left-associative chains print flat; the right operand gets a tighter bound
    text = f"{render(expr.left, prec)} {expr.op} {render(expr.right, prec + 1)}"
    if expr.op in ("&", "|", "^") and isinstance(expr.right, BinOp) and expr.right.op == expr.op:
        text = f"{render(expr.left, prec)} {expr.op} {render(expr.right, prec)}"
    return f"({text})" if prec < _parent else text


def assignment_grid(k: int) -> np.ndarray:
    """``(k, 2**k)`` boolean grid in structure-matrix column order.

    Column ``j`` assigns variable ``m`` the value TRUE iff bit ``k-1-m`` of
    ``j`` is clear, so the first variable is most significant and TRUE
    precedes FALSE.
    """
    j = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return ((j[None, :] >> shifts[:, None]) & 1) == 0


def truth_table(expr: Expr, var_order: Sequence[str]) -> np.ndarray:
    """Values of ``expr`` over all assignments of ``var_order`` (column order)."""
    k = len(var_order)
    if k > MAX_FANIN:
        raise FaninTooLarge(f"{k} variables exceeds the fan-in cap of {MAX_FANIN}")
    grid = assignment_grid(k)
    env = {name: grid[m] for m, name in enumerate(var_order)}
    missing = [v for v in variables(expr) if v not in env]
    if missing:
        raise KeyError(f"variables missing from order: {missing}")
    out = np.broadcast_to(evaluate(expr, env), (1 << k,))
    return np.array(out, dtype=bool)


# ---------------------------------------------------------------------------
# Quine-McCluskey


def _prime_implicants(minterms: list[int], k: int) -> list[tuple[int, int]]:
    # implicant = (value, mask); mask bits are "don't care"
    current = {(m, 0) for m in minterms}
    primes: set[tuple[int, int]] = set()
    while current:
        merged: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        by_mask: dict[int, list[tuple[int, int]]] = {}
        for imp in current:
            by_mask.setdefault(imp[1], []).append(imp)
        for mask, group in by_mask.items():
            values = {v for v, _ in group}
            for v in values:
                for bit in range(k):
                    b = 1 << bit
                    if mask & b or v & b:
                        continue
                    if (v | b) in values:
                        merged.add((v, mask | b))
                        used.add((v, mask))
                        used.add((v | b, mask))
        primes |= current - used
        current = merged
    return sorted(primes, key=lambda p: (bin(p[1]).count("1") * -1, p[0], p[1]))


def _covers(imp: tuple[int, int], m: int) -> bool:
    v, mask = imp
    return (m & ~mask) == v


def _literal_count(imp: tuple[int, int], k: int) -> int:
    return k - bin(imp[1]).count("1")


def _minimum_cover(primes, minterms, k, exact_limit=16):
    remaining = set(minterms)
    chosen = []
    # essential primes first
    for m in minterms:
        covering = [p for p in primes if _covers(p, m)]
        if len(covering) == 1 and covering[0] not in chosen:
            chosen.append(covering[0])
    for p in chosen:
        remaining -= {m for m in remaining if _covers(p, m)}
    if not remaining:
        return chosen
    rest = [p for p in primes if p not in chosen and any(_covers(p, m) for m in remaining)]
    if len(rest) <= exact_limit:
        for size in range(1, len(rest) + 1):
            best = None
            for combo in itertools.combinations(rest, size):
                if all(any(_covers(p, m) for p in combo) for m in remaining):
                    cost = sum(_literal_count(p, k) for p in combo)
                    if best is None or cost < best[0]:
                        best = (cost, combo)
            if best is not None:
                return chosen + list(best[1])
    # greedy fallback for wide tables
    while remaining:
        p = max(rest, key=lambda q: (sum(_covers(q, m) for m in remaining), -_literal_count(q, k)))
        chosen.append(p)
        remaining -= {m for m in remaining if _covers(p, m)}
    return chosen


def _conjunction(terms: list[Expr], op: str) -> Expr:
    out = terms[0]
    for t in terms[1:]:
        out = BinOp(op, out, t)
    return out


def from_truth_table(values: Sequence[bool], names: Sequence[str]) -> Expr:
    """Minimal sum-of-products expression for a table in column order.

    Exact for up to four variables; wider tables may get a greedy cover.
    """
    k = len(names)
    values = np.asarray(values, dtype=bool)
    if values.size != 1 << k:
        raise ValueError("table length must be 2**len(names)")
    if values.all():
        return TRUE
    if not values.any():
        return FALSE
    full = (1 << k) - 1
    # column j holds the assignment whose TRUE-bit pattern is full - j
    minterms = sorted(full - j for j in np.flatnonzero(values))
    primes = _prime_implicants(minterms, k)
    cover = _minimum_cover(primes, minterms, k)
    cover.sort(key=lambda p: (-p[0], p[1]))
    products = []
    for v, mask in cover:
        lits: list[Expr] = []
        for m, name in enumerate(names):
            b = 1 << (k - 1 - m)
            if mask & b:
                continue
            lits.append(Var(name) if v & b else Not(Var(name)))
        products.append(_conjunction(lits, "&"))
    return _conjunction(products, "|")
