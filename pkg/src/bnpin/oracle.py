"""Brute-force observability by state-space enumeration.

States are packed into integers little-endian in state declaration order
(bit ``i`` holds the ``i``-th state). Inputs are fixed to constants before
enumeration. A network is observable when the coarsest output-consistent
partition that is stable under the successor map is discrete.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .expr import evaluate
from .network import BooleanNetwork

__all__ = [
    "DEFAULT_STATE_CAP",
    "StateSpaceTooLarge",
    "StateSpace",
    "ObservabilityVerdict",
    "enumerate_state_space",
    "is_observable",
    "distinguishing_horizon",
    "naive_is_observable",
]

DEFAULT_STATE_CAP = 22


class StateSpaceTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class StateSpace:
    names: tuple[str, ...]
    outputs: tuple[str, ...]
    successor: np.ndarray  # int64, length 2^n
    observation: np.ndarray  # int64 packed outputs, length 2^n
    inputs: tuple[tuple[str, bool], ...] = ()

    @property
    def n(self) -> int:
        return len(self.names)

    def decode(self, code: int) -> dict[str, bool]:
        return {name: bool((code >> i) & 1) for i, name in enumerate(self.names)}


def _bits(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(bool)


def enumerate_state_space(
    bn: BooleanNetwork,
    inputs: Optional[Mapping[str, bool]] = None,
    cap: int = DEFAULT_STATE_CAP,
) -> StateSpace:
    inputs = dict(inputs or {})
    unknown = set(inputs) - set(bn.inputs)
    if unknown:
        raise KeyError(f"not input nodes: {sorted(unknown)}")
    fixed = tuple((name, bool(inputs.get(name, False))) for name in bn.inputs)
    net = bn.fix_inputs(dict(fixed)) if bn.inputs else bn
    n = net.n
    if n > cap:
        raise StateSpaceTooLarge(f"{n} state nodes exceeds the oracle cap of {cap}")
    bits = _bits(n)
    env = {name: bits[i] for i, name in enumerate(net.state_names)}
    size = 1 << n
    succ = np.zeros(size, dtype=np.int64)
    for i, (_, e) in enumerate(net.states):
        v = np.broadcast_to(evaluate(e, env), (size,))
        succ |= v.astype(np.int64) << i
    obs = np.zeros(size, dtype=np.int64)
    for j, (_, e) in enumerate(net.outputs):
        v = np.broadcast_to(evaluate(e, env), (size,))
        obs |= v.astype(np.int64) << j
    return StateSpace(net.state_names, net.output_names, succ, obs, fixed)


def _refine(space: StateSpace) -> np.ndarray:
    """Labels of the coarsest successor-stable refinement of the output partition."""
    _, label = np.unique(space.observation, return_inverse=True)
    count = label.max() + 1
    while True:
        pair = label * count + label[space.successor]
        _, new = np.unique(pair, return_inverse=True)
        new_count = new.max() + 1
        if new_count == count:
            return new
        label, count = new, new_count


@dataclass(frozen=True)
class ObservabilityVerdict:
    observable: bool
    n: int
    classes: int
    witness: Optional[tuple[dict[str, bool], dict[str, bool]]] = None
    inputs: tuple[tuple[str, bool], ...] = ()

    def to_dict(self) -> dict:
        out = {
            "observable": self.observable,
            "states": self.n,
            "classes": self.classes,
            "inputs": {k: v for k, v in self.inputs},
            "witness": None,
        }
        if self.witness is not None:
            a, b = self.witness
            out["witness"] = [
                {k: int(v) for k, v in a.items()},
                {k: int(v) for k, v in b.items()},
            ]
        return out


def is_observable(
    bn: BooleanNetwork,
    inputs: Optional[Mapping[str, bool]] = None,
    cap: int = DEFAULT_STATE_CAP,
) -> ObservabilityVerdict:
    space = enumerate_state_space(bn, inputs, cap)
    labels = _refine(space)
    classes = int(labels.max()) + 1
    size = labels.size
    if classes == size:
        return ObservabilityVerdict(True, space.n, classes, None, space.inputs)
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    dup = np.flatnonzero(sorted_labels[1:] == sorted_labels[:-1])[0]
    a, b = int(order[dup]), int(order[dup + 1])
    return ObservabilityVerdict(False, space.n, classes, (space.decode(a), space.decode(b)), space.inputs)


def distinguishing_horizon(space: StateSpace, a: int, b: int, limit: Optional[int] = None) -> Optional[int]:
    """First step at which the output sequences from ``a`` and ``b`` differ."""
    seen = set()
    t = 0
    while limit is None or t <= limit:
        if space.observation[a] != space.observation[b]:
            return t
        key = (a, b) if a <= b else (b, a)
        if key in seen or a == b:
            return None
        seen.add(key)
        a, b = int(space.successor[a]), int(space.successor[b])
        t += 1
    return None


def naive_is_observable(space: StateSpace) -> bool:
    """Pairwise simulation; quadratic, for cross-checking small networks."""
    size = space.successor.size
    return all(
        distinguishing_horizon(space, a, b) is not None
        for a in range(size)
        for b in range(a + 1, size)
    )
