"""Augmented networks, wiring digraphs and observed-path certificates."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .expr import Var
from .network import BooleanNetwork

__all__ = [
    "AugmentedNetwork",
    "Vertex",
    "WiringDigraph",
    "augment",
    "build_wiring_digraph",
    "is_observed_path",
    "decompose_into_observed_paths",
    "check_P1",
    "virtual_name",
]


def virtual_name(output: str) -> str:
    return f"sv_{output}"


@dataclass(frozen=True)
class AugmentedNetwork:
    """A network whose sensors each read exactly one state variable.

    In ``collapse`` mode the base network already has this form and
    ``network is base``. In ``augment`` mode every sensor ``Y_j = g_j`` is
    moved into a virtual state ``sv_Y_j`` updated by ``g_j`` and the mirror
    output reads that virtual state.
    """

    base: BooleanNetwork
    network: BooleanNetwork
    mode: str
    mirrors: tuple[tuple[str, str], ...]  # (output name, directly observable state)

    @cached_property
    def terminals(self) -> tuple[str, ...]:
        """Distinct directly observable states in sensor order."""
        seen: dict[str, None] = {}
        for _, x in self.mirrors:
            seen.setdefault(x, None)
        return tuple(seen)

    @property
    def directly_observable(self) -> frozenset[str]:
        return frozenset(self.terminals)

    @cached_property
    def virtual_nodes(self) -> tuple[str, ...]:
        base = set(self.base.state_names)
        return tuple(n for n in self.network.state_names if n not in base)

    def mirror_of(self, state: str) -> Optional[str]:
        for y, x in self.mirrors:
            if x == state:
                return y
        return None


def _single_state_read(bn: BooleanNetwork, output: str) -> Optional[str]:
    fv = bn.functional[output]
    if len(fv) == 1 and fv[0] in bn.updates:
        return fv[0]
    return None


def augment(bn: BooleanNetwork, mode: str = "collapse") -> AugmentedNetwork:
    """Bring ``bn`` into the form where outputs copy single states.

    ``collapse`` keeps the network as is when every sensor reads one state
    variable (identity or negation) and falls back to full augmentation
    otherwise; ``augment`` always appends one virtual state per sensor.
    """
    if mode not in ("collapse", "augment"):
        raise ValueError(f"unknown augmentation mode {mode!r}")
    if bn.p < 1:
        raise ValueError("observability analysis needs at least one output")
    if mode == "collapse":
        reads = [_single_state_read(bn, y) for y in bn.output_names]
        if all(r is not None for r in reads):
            return AugmentedNetwork(bn, bn, "collapse", tuple(zip(bn.output_names, reads)))
    states = list(bn.states)
    outputs = []
    mirrors = []
    taken = set(bn.declaration)
    for y, g in bn.outputs:
        v = virtual_name(y)
        while v in taken:
            v = "_" + v
        taken.add(v)
        states.append((v, g))
        outputs.append((y, Var(v)))
        mirrors.append((y, v))
    decl = tuple(n for n in bn.declaration if n not in bn.sensors)
    decl = decl + tuple(v for _, v in mirrors) + bn.output_names
    net = BooleanNetwork(tuple(states), tuple(outputs), bn.inputs, decl)
    return AugmentedNetwork(bn, net, "augment", tuple(mirrors))


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str  # "state", "mirror" or "input"
    directly_observable: bool = False


@dataclass(frozen=True)
class WiringDigraph:
    """Functional-dependency digraph; an edge u -> v means u feeds v's rule."""

    vertices: tuple[Vertex, ...]
    in_neighbors: dict  # vertex id -> tuple of ids, declaration order

    @cached_property
    def by_id(self) -> dict[str, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def order(self) -> dict[str, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    @cached_property
    def states(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.kind == "state")

    @cached_property
    def terminals(self) -> tuple[str, ...]:
        """Directly observable states, ordered by the mirrors reading them."""
        seen: dict[str, None] = {}
        for v in self.vertices:
            if v.kind == "mirror":
                seen.setdefault(self.in_neighbors[v.id][0], None)
        return tuple(seen)

    @cached_property
    def out_neighbors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for v in self.vertices:
            for u in self.in_neighbors.get(v.id, ()):
                out[u].append(v.id)
        return {k: tuple(vs) for k, vs in out.items()}

    @cached_property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple((u, v.id) for v in self.vertices for u in self.in_neighbors.get(v.id, ()))

    def is_state(self, v: str) -> bool:
        return self.by_id[v].kind == "state"

    def is_observable(self, v: str) -> bool:
        return self.by_id[v].directly_observable

    def mirror_of(self, state: str) -> Optional[str]:
        for v in self.out_neighbors[state]:
            if self.by_id[v].kind == "mirror":
                return v
        return None

    def max_in_degree(self) -> tuple[int, Optional[str]]:
        best = (0, None)
        for s in self.states:
            d = len(self.in_neighbors[s])
            if d > best[0]:
                best = (d, s)
        return best

    def max_out_degree(self) -> tuple[int, Optional[str]]:
        best = (0, None)
        for v in self.vertices:
            d = len(self.out_neighbors[v.id])
            if d > best[0]:
                best = (d, v.id)
        return best

    def with_mirror(self, path: Sequence[str]) -> tuple[str, ...]:
        m = self.mirror_of(path[-1]) if path else None
        return tuple(path) + ((m,) if m else ())

    def to_dot(self, plan=None) -> str:
        """Deterministic DOT rendering, optionally overlaying a pinning plan."""
        path_edges: set[tuple[str, str]] = set()
        pin_label: dict[str, str] = {}
        if plan is not None:
            for path in plan.paths:
                full = self.with_mirror(path)
                path_edges.update(zip(full, full[1:]))
            for pin in plan.pins:
                pin_label[pin.node] = f"type {pin.type}"
        lines = ["digraph wiring {", "  rankdir=LR;"]
        for v in self.vertices:
            attrs = [f'kind="{v.kind}"']
            if v.kind == "mirror":
                attrs.append("shape=box")
            elif v.kind == "input":
                attrs.append("shape=diamond")
            elif v.directly_observable:
                attrs += ["shape=doublecircle", 'observable="true"']
            else:
                attrs.append("shape=circle")
            if v.id in pin_label:
                attrs += [f'pin="{pin_label[v.id]}"', f'xlabel="{pin_label[v.id]}"', "style=filled", "fillcolor=lightgrey"]
            lines.append(f'  "{v.id}" [{", ".join(attrs)}];')
        for u, v in self.edges:
            extra = " [color=red, penwidth=2]" if (u, v) in path_edges else ""
            lines.append(f'  "{u}" -> "{v}"{extra};')
        if plan is not None:
            # desired edges that the controllers add
            for u, v in sorted(path_edges - set(self.edges), key=lambda e: (self.order[e[1]], self.order[e[0]])):
                lines.append(f'  "{u}" -> "{v}" [color=red, style=dashed, penwidth=2];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_wiring_digraph(aug: AugmentedNetwork) -> WiringDigraph:
    net = aug.network
    do = aug.directly_observable
    inputs = set(net.inputs)
    vertices = []
    in_nb: dict[str, tuple[str, ...]] = {}
    for name in net.variables:
        if name in inputs:
            vertices.append(Vertex(name, "input"))
            in_nb[name] = ()
        else:
            vertices.append(Vertex(name, "state", name in do))
            in_nb[name] = net.functional[name]
    for y, x in aug.mirrors:
        vertices.append(Vertex(y, "mirror"))
        in_nb[y] = (x,)
    return WiringDigraph(tuple(vertices), in_nb)


def _strip_mirror(g: WiringDigraph, path: Sequence[str]) -> Optional[list[str]]:
    path = list(path)
    if path and g.by_id[path[-1]].kind == "mirror":
        if len(path) < 2 or g.in_neighbors[path[-1]] != (path[-2],):
            return None
        path.pop()
    return path


def is_observed_path(g: WiringDigraph, path: Sequence[str]) -> bool:
    """Terminal is the only directly observable vertex and each step is the
    sole in-neighbor of the next vertex. A trailing mirror output is allowed."""
    states = _strip_mirror(g, path)
    if not states or len(set(states)) != len(states):
        return False
    if any(not g.is_state(v) for v in states):
        return False
    if not g.is_observable(states[-1]) or any(g.is_observable(v) for v in states[:-1]):
        return False
    return all(g.in_neighbors[b] == (a,) for a, b in zip(states, states[1:]))


def _backward_chains(g: WiringDigraph) -> tuple[list[list[str]], set[str]]:
    visited = set(g.terminals)
    paths = []
    for t in g.terminals:
        path = [t]
        cur = t
        while True:
            nb = g.in_neighbors[cur]
            if len(nb) != 1:
                break
            u = nb[0]
            if u in visited or not g.is_state(u) or g.is_observable(u):
                break
            path.append(u)
            visited.add(u)
            cur = u
        paths.append(path[::-1])
    return paths, visited


def decompose_into_observed_paths(g: WiringDigraph) -> Optional[list[tuple[str, ...]]]:
    """Split the state vertices into one observed path per directly
    observable vertex, or return None when some state is left over.

    Success certifies observability: each path is read backwards through
    invertible single-variable copies from its sensed terminal.
    """
    paths, visited = _backward_chains(g)
    if len(visited) != len(g.states):
        return None
    return [tuple(p) for p in paths]


def uncovered_states(g: WiringDigraph) -> list[str]:
    _, visited = _backward_chains(g)
    return [s for s in g.states if s not in visited]


def check_P1(g: WiringDigraph) -> list[str]:
    """Non-directly-observable states that are nobody's sole in-neighbor."""
    sole_parent = {g.in_neighbors[s][0] for s in g.states if len(g.in_neighbors[s]) == 1}
    bad = []
    for s in g.states:
        if g.is_observable(s):
            continue
        # the witness j must differ from s itself
        ok = any(
            j != s and g.in_neighbors[j] == (s,) for j in g.out_neighbors[s] if g.is_state(j)
        ) if s in sole_parent else False
        if not ok:
            bad.append(s)
    return bad
