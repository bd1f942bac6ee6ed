"""Pinning-node identification.

Two planners produce ``p`` desired observed paths over the wiring digraph:

* ``algorithm1`` is the greedy backward extension from each sensed
  terminal, pinning every head whose in-neighbors are not exactly the
  chosen predecessor.
* ``cover_plan`` builds a minimum path cover from a maximum matching on
  the split bipartite graph, then merges surplus paths into the observed
  ones. Each merge junction costs one type-1 (or type-3) pin, so the
  number of such pins equals ``|cover| - p``.

``categorize`` turns a set of paths into a :class:`PinningPlan`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .wiring import AugmentedNetwork, WiringDigraph, build_wiring_digraph

__all__ = [
    "CostWeights",
    "Pin",
    "PinningPlan",
    "PathCover",
    "PlanError",
    "algorithm1",
    "categorize",
    "min_path_cover",
    "merge_paths",
    "greedy_plan",
    "cover_plan",
    "make_plan",
]


class PlanError(RuntimeError):
    pass


@dataclass(frozen=True)
class CostWeights:
    """Per-pin costs. Adding an edge (types 1 and 3) is dearer than deleting."""

    c1: float = 2.0
    c2: float = 1.0
    c3: float = 2.0

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3) < 0:
            raise ValueError("cost weights must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "CostWeights":
        parts = [float(x) for x in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected three comma-separated weights C1,C2,C3")
        return cls(*parts)


@dataclass(frozen=True)
class Pin:
    node: str
    type: int
    predecessor: str  # the desired in-neighbor on the observed path
    position: int  # 1-based rank of predecessor in `extended`
    functional: tuple[str, ...]  # in-neighbors of the unpinned rule
    extended: tuple[str, ...]  # variables the controller may read


@dataclass(frozen=True)
class PathCover:
    paths: tuple[tuple[str, ...], ...]
    cycle_breaks: tuple[tuple[tuple[str, ...], str, str], ...] = ()  # (cycle, vertex, how)
    matching_size: int = 0

    def __len__(self):
        return len(self.paths)


@dataclass(frozen=True)
class PinningPlan:
    planner: str
    paths: tuple[tuple[str, ...], ...]
    pins: tuple[Pin, ...]
    weights: CostWeights = field(default_factory=CostWeights)
    cover: Optional[PathCover] = None

    def _of_type(self, t: int) -> frozenset[str]:
        return frozenset(p.node for p in self.pins if p.type == t)

    @property
    def pin_set(self) -> frozenset[str]:
        return frozenset(p.node for p in self.pins)

    @property
    def type1(self) -> frozenset[str]:
        return self._of_type(1)

    @property
    def type2(self) -> frozenset[str]:
        return self._of_type(2)

    @property
    def type3(self) -> frozenset[str]:
        return self._of_type(3)

    @property
    def cost(self) -> float:
        w = self.weights
        return len(self.type1) * w.c1 + len(self.type2) * w.c2 + len(self.type3) * w.c3

    def pin(self, node: str) -> Pin:
        for p in self.pins:
            if p.node == node:
                return p
        raise KeyError(node)

    def to_dict(self, g: Optional[WiringDigraph] = None) -> dict:
        paths = [list(g.with_mirror(p)) if g else list(p) for p in self.paths]
        out = {
            "planner": self.planner,
            "paths": paths,
            "pins": [asdict(p) for p in self.pins],
            "pin_types": {
                "type1": sorted(self.type1, key=self._rank),
                "type2": sorted(self.type2, key=self._rank),
                "type3": sorted(self.type3, key=self._rank),
            },
            "cost": {
                "weights": asdict(self.weights),
                "type1": len(self.type1),
                "type2": len(self.type2),
                "type3": len(self.type3),
                "total": self.cost,
            },
        }
        if self.cover is not None:
            out["cover"] = {
                "size": len(self.cover),
                "paths": [list(p) for p in self.cover.paths],
                "matching_size": self.cover.matching_size,
                "cycle_breaks": [
                    {"cycle": list(c), "vertex": v, "how": how} for c, v, how in self.cover.cycle_breaks
                ],
            }
        return out

    def _rank(self, node):
        for i, path in enumerate(self.paths):
            if node in path:
                return (i, path.index(node))
        return (len(self.paths), 0)


# ---------------------------------------------------------------------------
# categorization


def _check_paths(g: WiringDigraph, paths: Sequence[Sequence[str]]) -> None:
    seen: set[str] = set()
    for path in paths:
        if not path:
            raise PlanError("empty path")
        for v in path:
            if not g.is_state(v):
                raise PlanError(f"{v!r} is not a state vertex")
            if v in seen:
                raise PlanError(f"{v!r} appears on more than one path")
            seen.add(v)
        if not g.is_observable(path[-1]):
            raise PlanError(f"path ending at {path[-1]!r} does not end at a directly observable vertex")
        if any(g.is_observable(v) for v in path[:-1]):
            raise PlanError("a directly observable vertex sits inside a path")
    if len({p[-1] for p in paths}) != len(paths):
        raise PlanError("two paths share a terminal")
    missing = [s for s in g.states if s not in seen]
    if missing:
        raise PlanError(f"paths leave states uncovered: {missing}")


def categorize(
    aug: AugmentedNetwork,
    paths: Sequence[Sequence[str]],
    weights: CostWeights = CostWeights(),
    planner: str = "manual",
    cover: Optional[PathCover] = None,
    g: Optional[WiringDigraph] = None,
) -> PinningPlan:
    """Pin every non-head path vertex whose in-neighbors differ from its
    predecessor, and classify the pin by how its in-neighbors must change."""
    g = g or build_wiring_digraph(aug)
    _check_paths(g, paths)
    idx = g.order
    pins = []
    for path in paths:
        for pred, v in zip(path, path[1:]):
            nb = g.in_neighbors[v]
            if nb == (pred,):
                continue
            if not nb:
                pins.append(Pin(v, 3, pred, 1, (), (pred,)))
            elif pred not in nb:
                ext = tuple(sorted(nb + (pred,), key=idx.__getitem__))
                pins.append(Pin(v, 1, pred, ext.index(pred) + 1, nb, ext))
            else:
                pins.append(Pin(v, 2, pred, nb.index(pred) + 1, nb, nb))
    return PinningPlan(planner, tuple(tuple(p) for p in paths), tuple(pins), weights, cover)


# ---------------------------------------------------------------------------
# Algorithm 1


def _chain_length(g: WiringDigraph, v: str, visited: set[str]) -> int:
    # length of the unique-in-neighbor chain ending at v
    n, cur, seen = 1, v, {v}
    while True:
        nb = g.in_neighbors[cur]
        if len(nb) != 1:
            return n
        u = nb[0]
        if u in visited or u in seen or not g.is_state(u) or g.is_observable(u):
            return n
        n += 1
        seen.add(u)
        cur = u


def algorithm1(aug: AugmentedNetwork, g: Optional[WiringDigraph] = None) -> tuple[set[str], list[tuple[str, ...]]]:
    """Greedy two-phase path construction.

    Ties among candidate predecessors go to the longest unique-in-neighbor
    chain, then to the earliest declared vertex; uncovered seeds are taken
    in declaration order and always placed ahead of the last path.
    """
    g = g or build_wiring_digraph(aug)
    order = g.order
    visited = set(g.terminals)
    paths = [[t] for t in g.terminals]
    pins: set[str] = set()

    def free(u):
        return u not in visited and g.is_state(u) and not g.is_observable(u)

    # phase 1: unique in-neighbors only
    for path in paths:
        while True:
            nb = g.in_neighbors[path[0]]
            if len(nb) == 1 and free(nb[0]):
                path.insert(0, nb[0])
                visited.add(nb[0])
            else:
                break

    def phase2():
        for path in paths:
            while True:
                head = path[0]
                cands = [u for u in g.in_neighbors[head] if free(u)]
                if not cands:
                    break
                v = max(cands, key=lambda u: (_chain_length(g, u, visited), -order[u]))
                if g.in_neighbors[head] != (v,):
                    pins.add(head)
                path.insert(0, v)
                visited.add(v)

    phase2()
    while len(visited) < len(g.states):
        x = next(s for s in g.states if s not in visited)
        last = paths[-1]
        pins.add(last[0])
        last.insert(0, x)
        visited.add(x)
        phase2()
    return pins, [tuple(p) for p in paths]


def greedy_plan(aug: AugmentedNetwork, weights: CostWeights = CostWeights()) -> PinningPlan:
    g = build_wiring_digraph(aug)
    pins, paths = algorithm1(aug, g)
    plan = categorize(aug, paths, weights, "greedy", g=g)
    if plan.pin_set != pins:
        raise PlanError(f"algorithm pins {sorted(pins)} disagree with categorization {sorted(plan.pin_set)}")
    return plan


# ---------------------------------------------------------------------------
# minimum path cover


def _cover_edges(g: WiringDigraph):
    # u -> v usable as a path step: both states, u not directly observable, no self loops
    for v in g.states:
        for u in g.in_neighbors[v]:
            if u != v and g.is_state(u) and not g.is_observable(u):
                yield u, v


def _step_cost(g: WiringDigraph, u: str, v: str) -> int:
    return 0 if g.in_neighbors[v] == (u,) else 1


def _max_matching(g: WiringDigraph, forbidden=frozenset()) -> dict[str, str]:
    """Maximum matching on the split graph that, among maximum matchings,
    uses the fewest steps into vertices with extra in-neighbors."""
    states = list(g.states)
    pos = {s: i for i, s in enumerate(states)}
    edges = [e for e in _cover_edges(g) if e not in forbidden]
    if not edges:
        return {}
    n = len(states)
    big = 2 * n + 2
    cost = np.zeros((n, n))
    for u, v in edges:
        cost[pos[u], pos[v]] = -big + _step_cost(g, u, v)
    rows, cols = linear_sum_assignment(cost)
    succ = {}
    for r, c in zip(rows, cols):
        if cost[r, c] < 0:
            succ[states[r]] = states[c]
    return succ


def min_path_cover(g: WiringDigraph, max_rounds: Optional[int] = None) -> PathCover:
    """Matching-based cover, improved by local search when cycles had to be opened.

    Each round forbids one edge of an opened cycle and re-solves the
    matching; the change is kept when the cover gets smaller (or equally
    small with fewer steps into vertices that have extra in-neighbors).
    """
    def score(c: PathCover):
        steps = sum(_step_cost(g, a, b) for p in c.paths for a, b in zip(p, p[1:]))
        return (len(c.paths), steps)

    forbidden: frozenset = frozenset()
    best = _cover_from_matching(g, _max_matching(g))
    rounds = len(g.states) if max_rounds is None else max_rounds
    for _ in range(rounds):
        opened = [cyc for cyc, _, how in best.cycle_breaks if how == "open"]
        if not opened:
            break
        improved = None
        for cyc in opened:
            for u, v in zip(cyc, cyc[1:] + cyc[:1]):
                trial = forbidden | {(u, v)}
                cand = _cover_from_matching(g, _max_matching(g, trial))
                if score(cand) < score(best) and (improved is None or score(cand) < score(improved[1])):
                    improved = (trial, cand)
        if improved is None:
            break
        forbidden, best = improved
    return best


def _cover_from_matching(g: WiringDigraph, succ: dict[str, str]) -> PathCover:
    """Vertex-disjoint simple paths covering every state vertex.

    Directly observable vertices only end paths. Cycles left by the
    matching are first spliced into an existing path at no extra path
    cost, either before a head, after a tail or between two consecutive
    path vertices; a cycle that cannot be spliced is opened into a new
    path at the vertex whose incoming step is dearest to keep.
    """
    order = g.order
    succ = dict(succ)
    matching_size = len(succ)
    pred = {v: u for u, v in succ.items()}
    edge_set = set(_cover_edges(g))

    # find cycles: vertices not reachable from any head
    reached: set[str] = set()
    for s in g.states:
        if s not in pred:
            cur = s
            while cur is not None:
                reached.add(cur)
                cur = succ.get(cur)
    on_path = set(reached)
    cycles = []
    for s in g.states:
        if s in reached:
            continue
        cyc = [s]
        reached.add(s)
        cur = succ[s]
        while cur != s:
            cyc.append(cur)
            reached.add(cur)
            cur = succ[cur]
        cycles.append(cyc)

    breaks = []
    for cyc in cycles:
        cset = set(cyc)
        best = None
        # splice a cycle vertex c in front of a path head h: c -> h
        heads = [h for h in g.states if h not in pred and h not in cset]
        for c in cyc:
            s = succ[c]
            for h in heads:
                if (c, h) in edge_set:
                    delta = _step_cost(g, c, h) - _step_cost(g, c, s)
                    key = (delta, 0, order[c], order[h])
                    if best is None or key < best[0]:
                        best = (key, "head", c, h)
        # splice a path tail t in front of a cycle vertex c: t -> c
        tails = [t for t in g.states if t not in succ and t not in cset and not g.is_observable(t)]
        for c in cyc:
            q = pred[c]
            for t in tails:
                if (t, c) in edge_set:
                    delta = _step_cost(g, t, c) - _step_cost(g, q, c)
                    key = (delta, 1, order[c], order[t])
                    if best is None or key < best[0]:
                        best = (key, "tail", c, t)
        # insert the opened cycle c .. pred[c] into a path step a -> b
        for c in cyc:
            q = pred[c]
            for a in sorted(on_path, key=order.__getitem__):
                b = succ.get(a)
                if b is None or (a, c) not in edge_set or (q, b) not in edge_set:
                    continue
                delta = (
                    _step_cost(g, a, c) + _step_cost(g, q, b) - _step_cost(g, a, b) - _step_cost(g, q, c)
                )
                key = (delta, 2, order[c], order[a])
                if best is None or key < best[0]:
                    best = (key, "insert", c, a)
        on_path |= cset
        if best is not None:
            _, how, c, other = best
            if how == "insert":
                q, b = pred[c], succ[other]
                succ[other] = c
                pred[c] = other
                succ[q] = b
                pred[b] = q
            elif how == "head":
                s = succ[c]
                del pred[s]
                succ[c] = other
                pred[other] = c
            else:
                q = pred[c]
                del succ[q]
                succ[other] = c
                pred[c] = other
            breaks.append((tuple(cyc), c, f"splice-{how}"))
            continue
        # open the cycle at the vertex whose incoming step costs most
        c = max(cyc, key=lambda v: (_step_cost(g, pred[v], v), -order[v]))
        q = pred.pop(c)
        del succ[q]
        breaks.append((tuple(cyc), c, "open"))

    paths = []
    for s in g.states:
        if s in pred:
            continue
        path = [s]
        while path[-1] in succ:
            path.append(succ[path[-1]])
        paths.append(tuple(path))

    terminal_rank = {t: i for i, t in enumerate(g.terminals)}
    paths.sort(key=lambda p: (0, terminal_rank[p[-1]]) if p[-1] in terminal_rank else (1, order[p[0]]))
    return PathCover(tuple(paths), tuple(breaks), matching_size)


def merge_paths(
    cover: PathCover,
    terminals: Sequence[str],
    target: Optional[str] = None,
) -> list[tuple[str, ...]]:
    """Concatenate surplus cover paths ahead of one terminal path.

    The receiving path is the shortest one (earliest terminal on ties)
    unless ``target`` names its terminal. Each junction later becomes a
    type-1 or type-3 pin.
    """
    by_terminal = {p[-1]: p for p in cover.paths if p[-1] in set(terminals)}
    if len(by_terminal) < len(terminals):
        missing = [t for t in terminals if t not in by_terminal]
        raise PlanError(f"cover has no path ending at terminals {missing}")
    surplus = [p for p in cover.paths if p[-1] not in by_terminal]
    merged = [by_terminal[t] for t in terminals]
    if not surplus:
        return merged
    if target is None:
        k = min(range(len(merged)), key=lambda i: (len(merged[i]), i))
    else:
        k = list(terminals).index(target)
    chain: tuple[str, ...] = ()
    for p in surplus:
        chain += p
    merged[k] = chain + merged[k]
    return merged


def cover_plan(
    aug: AugmentedNetwork,
    weights: CostWeights = CostWeights(),
    target: Optional[str] = None,
) -> PinningPlan:
    g = build_wiring_digraph(aug)
    cover = min_path_cover(g)
    paths = merge_paths(cover, g.terminals, target)
    return categorize(aug, paths, weights, "cover", cover=cover, g=g)


def make_plan(aug: AugmentedNetwork, planner: str = "cover", weights: CostWeights = CostWeights()) -> PinningPlan:
    if planner == "greedy":
        return greedy_plan(aug, weights)
    if planner == "cover":
        return cover_plan(aug, weights)
    raise ValueError(f"unknown planner {planner!r}")
