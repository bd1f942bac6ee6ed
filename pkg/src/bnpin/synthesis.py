"""Controller synthesis for pinned nodes.

For a pin ``X_i`` with desired predecessor ``X_w`` the new rule is
``X_i(t+1) = g_i(...) (+)_i f_i(...)`` and must depend on ``X_w`` alone.
In matrix form the requirement is

    M_op ⋉ L_g ⋉ (I ⊗ F) ⋉ M_r  ==  (A ⊗ 1ᵀ) ⋉ Wᵀ_[2, 2^(ι-1)]

where ``F`` is ``L_f`` (type 2), ``L_f`` composed with a factor-dropping
matrix (type 1), or the constant ``ϑ`` (type 3). The solver works
pointwise on columns and the result is re-checked in matrix form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .expr import Const, Expr, Not, BinOp, Var, evaluate, from_truth_table, render, substitute
from .network import BooleanNetwork, structure_matrix
from .planner import Pin, PinningPlan
from .stp import (
    NEGATION,
    LogicalMatrix,
    delta,
    delta_vector,
    dummy_matrix,
    identity,
    kron,
    ones_row,
    power_reducing_matrix,
    stp,
    stp_chain,
    swap_matrix,
    transpose,
)
from .wiring import (
    AugmentedNetwork,
    build_wiring_digraph,
    decompose_into_observed_paths,
    is_observed_path,
)

__all__ = [
    "ControllerError",
    "SynthesisError",
    "PinController",
    "PinnedNetwork",
    "OPERATORS",
    "operator_name",
    "operator_expr",
    "target_matrix",
    "compose_pinned_matrix",
    "solve_controller",
    "synthesize",
    "POSITIVE",
    "NEGATIVE",
]

POSITIVE = identity(2)
NEGATIVE = NEGATION


class ControllerError(RuntimeError):
    """No binary operator admits a feedback law; signals an internal inconsistency."""


class SynthesisError(RuntimeError):
    pass


# (u, f) columns ordered TT, TF, FT, FF; value 1 = TRUE
_TEMPLATES: dict[tuple[int, ...], str] = {
    (1, 2, 2, 2): "u & f",
    (1, 1, 1, 2): "u | f",
    (2, 1, 1, 2): "u ^ f",
    (1, 2, 2, 1): "u <-> f",
    (1, 1, 1, 1): "1",
    (2, 2, 2, 2): "0",
    (1, 1, 2, 2): "u",
    (1, 2, 1, 2): "f",
    (2, 2, 1, 1): "!u",
    (2, 1, 2, 1): "!f",
    (2, 1, 1, 1): "!(u & f)",
    (2, 2, 2, 1): "!(u | f)",
    (1, 2, 1, 1): "!u | f",
    (1, 1, 2, 1): "u | !f",
    (2, 1, 2, 2): "u & !f",
    (2, 2, 1, 2): "!u & f",
}
_NAMES = {
    (1, 2, 2, 2): "and",
    (1, 1, 1, 2): "or",
    (2, 1, 1, 2): "xor",
    (1, 2, 2, 1): "xnor",
    (2, 1, 1, 1): "nand",
    (2, 2, 2, 1): "nor",
}

_FIRST = [(1, 2, 2, 2), (1, 1, 1, 2), (2, 1, 1, 2), (1, 2, 2, 1)]
OPERATORS: tuple[LogicalMatrix, ...] = tuple(
    delta(2, c)
    for c in _FIRST + sorted(c for c in itertools.product((1, 2), repeat=4) if c not in _FIRST)
)


def operator_name(m: LogicalMatrix) -> str:
    key = tuple(int(i) for i in m.col_index)
    return _NAMES.get(key, _TEMPLATES[key])


def operator_expr(m: LogicalMatrix, u: Expr, f: Expr) -> Expr:
    from .network import parse_expr

    template = parse_expr(_TEMPLATES[tuple(int(i) for i in m.col_index)])
    return substitute(template, {"u": u, "f": f})


# ---------------------------------------------------------------------------
# matrix forms


def target_matrix(polarity: LogicalMatrix, position: int, k: int) -> LogicalMatrix:
    """The 2 x 2^k matrix whose only functional variable is ``position``."""
    if not 1 <= position <= k:
        raise ValueError(f"position {position} outside [1, {k}]")
    if polarity not in (POSITIVE, NEGATIVE):
        raise ValueError("polarity must be I_2 or δ_2[2,1]")
    head = kron(polarity, ones_row(1 << (k - 1)))
    return stp(head, transpose(swap_matrix(2, 1 << (position - 1))))


def _drop_factor(position: int, k: int) -> LogicalMatrix:
    """Matrix mapping x_1 ⋉ ... ⋉ x_k to the product without x_position."""
    if position < k:
        return kron(identity(1 << (position - 1)), dummy_matrix())
    # the last factor has no successor for D to act on
    return kron(identity(1 << (k - 1)), ones_row(2))


def compose_pinned_matrix(
    pin_type: int,
    op: LogicalMatrix,
    feedback: LogicalMatrix,
    local: Optional[LogicalMatrix],
    position: int,
    constant: Optional[LogicalMatrix] = None,
) -> LogicalMatrix:
    """Structure matrix of ``g (+) f`` over the controller's variables."""
    if op.shape != (2, 4):
        raise ValueError("operator matrix must be 2 x 4")
    k = feedback.cols.bit_length() - 1
    if feedback.cols != 1 << k:
        raise ValueError("feedback matrix must have 2^k columns")
    if pin_type == 1:
        if local is None or local.cols != 1 << (k - 1):
            raise ValueError("type 1 needs L_f over one variable fewer than L_g")
        inner = stp(local, _drop_factor(position, k))
        return stp_chain(op, feedback, kron(identity(1 << k), inner), power_reducing_matrix(1 << k))
    if pin_type == 2:
        if local is None or local.cols != feedback.cols:
            raise ValueError("type 2 needs L_f and L_g over the same variables")
        return stp_chain(op, feedback, kron(identity(1 << k), local), power_reducing_matrix(1 << k))
    if pin_type == 3:
        if constant is None or constant.shape != (2, 1) or k != 1:
            raise ValueError("type 3 needs a constant and a one-variable feedback")
        return stp_chain(op, feedback, swap_matrix(2, 2), constant)
    raise ValueError(f"unknown pin type {pin_type}")


# ---------------------------------------------------------------------------
# solving


def _local_values(pin_type: int, local, position: int, k: int, constant) -> np.ndarray:
    """f on the controller's variables, in column order, as 1/2 indices."""
    if pin_type == 2:
        return local.col_index.copy()
    if pin_type == 3:
        return np.full(2, int(constant.col_index[0]))
    cols = np.arange(1 << k)
    hi = cols >> (k - position + 1)
    lo = cols & ((1 << (k - position)) - 1)
    reduced = (hi << (k - position)) | lo
    return local.col_index[reduced]


def _minimal_feedback(allowed: np.ndarray, k: int) -> Optional[np.ndarray]:
    """Feedback table with the fewest functional variables, or None.

    ``allowed[j]`` is a 2-bit mask of admissible outputs (1: TRUE, 2: FALSE).
    """
    cols = np.arange(1 << k)
    bits = [(cols >> (k - 1 - m)) & 1 for m in range(k)]
    for size in range(k + 1):
        for subset in itertools.combinations(range(k), size):
            key = np.zeros(1 << k, dtype=np.int64)
            for m in subset:
                key = (key << 1) | bits[m]
            meet = np.full(1 << size, 3, dtype=np.int64)
            np.bitwise_and.at(meet, key, allowed)
            if np.all(meet != 0):
                # prefer TRUE where both values are admissible
                choice = np.where(meet & 1, 1, 2)
                return choice[key]
    return None


@dataclass(frozen=True)
class PinController:
    node: str
    type: int
    op: LogicalMatrix
    feedback: LogicalMatrix
    variables: tuple[str, ...]
    predecessor: str
    position: int
    polarity: LogicalMatrix = POSITIVE
    constant: Optional[LogicalMatrix] = None
    feedback_expr: Optional[Expr] = None
    update_expr: Optional[Expr] = None

    @property
    def op_name(self) -> str:
        return operator_name(self.op)

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "type": self.type,
            "predecessor": self.predecessor,
            "position": self.position,
            "variables": list(self.variables),
            "operator": self.op_name,
            "operator_matrix": str(self.op),
            "feedback_matrix": str(self.feedback),
            "feedback": render(self.feedback_expr) if self.feedback_expr is not None else None,
            "polarity": "positive" if self.polarity == POSITIVE else "negative",
            "constant": None if self.constant is None else int(self.constant.col_index[0]),
            "update": render(self.update_expr) if self.update_expr is not None else None,
        }


def solve_controller(
    pin_type: int,
    local: Optional[LogicalMatrix],
    position: int,
    polarity: LogicalMatrix = POSITIVE,
    constant: Optional[LogicalMatrix] = None,
    k: Optional[int] = None,
) -> tuple[LogicalMatrix, LogicalMatrix]:
    """Return ``(M_op, L_g)`` solving the pinned-dynamics equation.

    Operators are tried in the order and, or, xor, xnor, then the other
    twelve; the first one admitting a feedback law wins, and its feedback
    uses as few functional variables as possible.
    """
    if k is None:
        if pin_type == 1:
            k = local.cols.bit_length()
        elif pin_type == 2:
            k = local.cols.bit_length() - 1
        else:
            k = 1
    f = _local_values(pin_type, local, position, k, constant)
    target = target_matrix(polarity, position, k).col_index
    for op in OPERATORS:
        table = op.col_index  # index by 2*(u-1) + (f-1)
        allowed = np.zeros(1 << k, dtype=np.int64)
        for u in (1, 2):
            ok = table[2 * (u - 1) + (f - 1)] == target
            allowed |= np.where(ok, u, 0)
        if np.any(allowed == 0):
            continue
        g = _minimal_feedback(allowed, k)
        feedback = LogicalMatrix(2, g)
        composed = compose_pinned_matrix(pin_type, op, feedback, local, position, constant)
        if composed != target_matrix(polarity, position, k):
            raise ControllerError("pointwise solution failed the matrix check")
        return op, feedback
    raise ControllerError("no binary operator admits a solution")


def controller_for_pin(
    net: BooleanNetwork, pin: Pin, polarity: LogicalMatrix = POSITIVE
) -> PinController:
    f_expr = net.updates[pin.node]
    constant = None
    local = None
    if pin.type == 3:
        value = bool(evaluate(f_expr, {}))
        constant = delta_vector(2, 1 if value else 2)
    else:
        local = structure_matrix(f_expr, pin.functional)
    op, feedback = solve_controller(pin.type, local, pin.position, polarity, constant, k=len(pin.extended))
    g_expr = from_truth_table(feedback.col_index == 1, pin.extended)
    update = operator_expr(op, g_expr, f_expr)
    return PinController(
        pin.node,
        pin.type,
        op,
        feedback,
        pin.extended,
        pin.predecessor,
        pin.position,
        polarity,
        constant,
        g_expr,
        update,
    )


# ---------------------------------------------------------------------------
# assembling the pinned network


@dataclass(frozen=True)
class PinnedNetwork:
    augmented: AugmentedNetwork
    plan: PinningPlan
    controllers: tuple[PinController, ...]
    decomposition: tuple[tuple[str, ...], ...] = field(default=())

    @property
    def network(self) -> BooleanNetwork:
        return self.augmented.network

    def to_bn(self) -> str:
        w = self.plan.weights
        header = [
            "pinned network",
            f"planner: {self.plan.planner}",
            f"cost weights: C1={w.c1:g} C2={w.c2:g} C3={w.c3:g}",
            f"pins: {len(self.controllers)}",
        ]
        for c in self.controllers:
            g = render(c.feedback_expr)
            sign = "" if c.polarity == POSITIVE else "!"
            header.append(
                f"pin {c.node}: type {c.type}, predecessor {c.predecessor}, op {c.op_name}, g = {g}, net effect {c.node} = {sign}{c.predecessor}"
            )
        return self.network.to_bn(header)


def synthesize(
    aug: AugmentedNetwork,
    plan: PinningPlan,
    polarity: LogicalMatrix = POSITIVE,
) -> PinnedNetwork:
    """Solve every pin, rewrite the pinned rules and re-certify the paths."""
    net = aug.network
    controllers = tuple(controller_for_pin(net, pin, polarity) for pin in plan.pins)
    pinned_net = net.with_updates({c.node: c.update_expr for c in controllers})
    pinned = AugmentedNetwork(aug.base, pinned_net, aug.mode, aug.mirrors)
    g = build_wiring_digraph(pinned)
    for c in controllers:
        if g.in_neighbors[c.node] != (c.predecessor,):
            raise SynthesisError(f"pinned rule of {c.node} depends on {g.in_neighbors[c.node]}")
    for path in plan.paths:
        if not is_observed_path(g, path):
            raise SynthesisError(f"planned path {path} is not an observed path after pinning")
    decomposition = decompose_into_observed_paths(g)
    if decomposition is None:
        raise SynthesisError("pinned wiring does not decompose into observed paths")
    return PinnedNetwork(pinned, plan, controllers, tuple(decomposition))
