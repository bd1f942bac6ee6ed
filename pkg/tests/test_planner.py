import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bnpin.generate import RandomNetworkConfig, dag_network, path_network, random_network
from bnpin.network import parse_network
from bnpin.planner import (
    CostWeights,
    PlanError,
    algorithm1,
    categorize,
    cover_plan,
    greedy_plan,
    make_plan,
    merge_paths,
    min_path_cover,
)
from bnpin.wiring import augment, build_wiring_digraph

O1 = ("X2", "X1")
O2 = ("X9", "X8", "X10", "X17", "X6", "X7", "X4", "X3")
O3 = ("X5", "X13", "X11", "X16", "X14", "X15", "X12", "X18")


def brute_min_cover(g) -> int:
    """Fewest vertex-disjoint paths covering the states; sensed states end paths."""
    states = list(g.states)
    choices = []
    for u in states:
        outs = [] if g.is_observable(u) else [v for v in g.out_neighbors[u] if v != u and g.is_state(v)]
        choices.append(outs)
    best = len(states)

    def acyclic(succ):
        for start in succ:
            seen = {start}
            cur = succ.get(start)
            while cur is not None:
                if cur in seen:
                    return False
                seen.add(cur)
                cur = succ.get(cur)
        return True

    def rec(i, succ, used):
        nonlocal best
        if i == len(states):
            if acyclic(succ):
                best = min(best, len(states) - len(succ))
            return
        rec(i + 1, succ, used)
        for v in choices[i]:
            if v not in used:
                succ[states[i]] = v
                used.add(v)
                rec(i + 1, succ, used)
                used.discard(v)
                del succ[states[i]]

    rec(0, {}, set())
    return best


def check_plan(aug, plan):
    g = build_wiring_digraph(aug)
    seen = [v for p in plan.paths for v in p]
    assert len(seen) == len(set(seen)) and set(seen) == set(g.states)
    assert sorted(p[-1] for p in plan.paths) == sorted(g.terminals)
    assert all(not g.is_observable(v) for p in plan.paths for v in p[:-1])
    for pin in plan.pins:
        nb = g.in_neighbors[pin.node]
        if pin.type == 1:
            assert pin.predecessor not in nb and nb
        elif pin.type == 2:
            assert pin.predecessor in nb and set(nb) != {pin.predecessor}
        else:
            assert nb == ()
    expected = {
        v for p in plan.paths for a, v in zip(p, p[1:]) if g.in_neighbors[v] != (a,)
    }
    assert plan.pin_set == expected


def test_tlgl_greedy(tlgl_aug):
    plan = greedy_plan(tlgl_aug)
    assert plan.paths == (O1, O2, O3)
    assert plan.type1 == {"X13"}
    assert plan.type2 == {"X4", "X10", "X11", "X12", "X18"}
    assert plan.type3 == set()
    check_plan(tlgl_aug, plan)


def test_tlgl_cover(tlgl_aug):
    plan = cover_plan(tlgl_aug)
    assert len(plan.cover) == 4
    assert plan.type1 == {"X2"}
    assert plan.type2 == {"X4", "X10", "X11", "X12", "X18"}
    assert len(plan.type1) + len(plan.type3) == len(plan.cover) - 3
    check_plan(tlgl_aug, plan)


def test_tlgl_published_cover_paths(tlgl_aug):
    merged = [("X5",) + O1, O2, ("X13", "X11", "X16", "X14", "X15", "X12", "X18")]
    plan = categorize(tlgl_aug, merged)
    assert plan.type1 == {"X2"}
    assert plan.type2 == {"X4", "X10", "X11", "X12", "X18"}


def test_merge_targets():
    from bnpin.planner import PathCover

    cover = PathCover((("a", "b"), ("c",), ("d", "e", "f")))
    assert merge_paths(cover, ["b", "f"]) == [("d", "e", "f"), ("c", "a", "b")] or merge_paths(
        cover, ["b", "f"]
    ) == [("c", "a", "b"), ("d", "e", "f")]
    assert merge_paths(cover, ["b", "f"], target="f") == [("a", "b"), ("c", "d", "e", "f")]
    same = PathCover((("a", "b"),))
    assert merge_paths(same, ["b"]) == [("a", "b")]


def test_tcell_plans(tcell_aug):
    for planner in ("greedy", "cover"):
        plan = make_plan(tcell_aug, planner)
        check_plan(tcell_aug, plan)
        assert len(plan.paths) == 4


def test_tcell_cover_is_minimum_by_matching(tcell_aug):
    # the matching found 8 paths and the cover is cycle-free, so 8 is optimal
    plan = cover_plan(tcell_aug)
    assert len(plan.cover) == 8
    assert plan.cover.cycle_breaks == ()
    assert len(plan.pins) == 13


def test_tcell_published_paths(tcell_aug):
    paths = [
        "Lck Rlk PLCg(act) IP3 Ca Calcin NFAT".split(),
        "TCRbind PAGCsk cCbl Gads SLP76 Itk PLCg(bind) RasGRP1 Fos SEK JNK Jun AP1".split(),
        "Fyn TCRphos ZAP70 LAT Grb2Sos Ras Raf MEK ERK Rsk CREB CRE".split(),
        "DAG PKCth IKKbeta IkB NFkB".split(),
    ]
    plan = categorize(tcell_aug, paths)
    assert plan.type1 == {"SEK", "Fos", "RasGRP1", "PLCg(bind)", "Gads", "cCbl"}
    assert plan.type2 == {"PLCg(act)", "Ras", "ZAP70", "TCRphos", "AP1", "PAGCsk", "Itk"}


def test_already_observed_network_needs_no_pins():
    bn = parse_network("X1 = X3\nX2 = !X1\nX3 = X2\nX4 = X4 & X1\nX5 = X4\noutput Y1 = X3\noutput Y2 = X5\n")
    aug = augment(bn)
    for planner in ("greedy", "cover"):
        assert make_plan(aug, planner).pins == ()


def test_bn5_plans(bn5):
    aug = augment(bn5)
    greedy = greedy_plan(aug)
    assert greedy.paths == (("X4", "X3", "X1", "X2"),)
    assert greedy.type1 == {"X1"}
    cover = cover_plan(aug)
    assert len(cover.cover) == 2
    assert len(cover.pins) == 1


def test_constant_node_mid_path_is_type3():
    bn = parse_network("X1 = X2\nX2 = 1\nX3 = X3 | X1\noutput Y = X2\n")
    aug = augment(bn)
    plan = categorize(aug, [("X3", "X1", "X2")])
    assert plan.type3 == {"X2"}
    assert plan.type2 == set()


def test_bad_paths_rejected(tlgl_aug):
    with pytest.raises(PlanError):
        categorize(tlgl_aug, [O1, O2])
    with pytest.raises(PlanError):
        categorize(tlgl_aug, [O1 + ("X5",), O2, O3[1:]])


def test_cost_weights():
    assert CostWeights.parse("3,1,5") == CostWeights(3, 1, 5)
    with pytest.raises(ValueError):
        CostWeights.parse("1,2")
    with pytest.raises(ValueError):
        CostWeights(-1, 1, 1)


def test_cost_monotone_in_weights(tlgl_aug):
    plan = greedy_plan(tlgl_aug)
    base = categorize(tlgl_aug, plan.paths, CostWeights(2, 1, 2)).cost
    for bumped in (CostWeights(3, 1, 2), CostWeights(2, 2, 2), CostWeights(2, 1, 3)):
        assert categorize(tlgl_aug, plan.paths, bumped).cost >= base


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(1, 2))
def test_cover_size_matches_brute_force_on_dags(seed, n, p):
    rng = np.random.default_rng(seed)
    bn = dag_network(rng, RandomNetworkConfig(n, p=p))
    aug = augment(bn)
    g = build_wiring_digraph(aug)
    plan = cover_plan(aug)
    assert len(plan.cover) == brute_min_cover(g)
    assert len(plan.type1) + len(plan.type3) == len(plan.cover) - len(g.terminals)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 3), st.booleans())
def test_plans_satisfy_invariants(seed, n, p, chains):
    rng = np.random.default_rng(seed)
    cfg = RandomNetworkConfig(n, p=min(p, n))
    bn = path_network(rng, cfg) if chains else random_network(rng, cfg)
    aug = augment(bn)
    greedy = greedy_plan(aug)
    cover = cover_plan(aug)
    check_plan(aug, greedy)
    check_plan(aug, cover)
    pins, _ = algorithm1(aug)
    assert pins == greedy.pin_set


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(1, 3))
def test_cover_never_adds_more_edges_than_greedy_on_dags(seed, n, p):
    rng = np.random.default_rng(seed)
    aug = augment(dag_network(rng, RandomNetworkConfig(n, p=min(p, n))))
    greedy, cover = greedy_plan(aug), cover_plan(aug)
    assert len(cover.type1) + len(cover.type3) <= len(greedy.type1) + len(greedy.type3)


def test_cover_dominance_on_random_corpus():
    rng = np.random.default_rng(11)
    worse = 0
    for _ in range(200):
        n = int(rng.integers(2, 16))
        aug = augment(random_network(rng, RandomNetworkConfig(n, p=min(2, n))))
        greedy, cover = greedy_plan(aug), cover_plan(aug)
        g1 = len(greedy.type1) + len(greedy.type3)
        c1 = len(cover.type1) + len(cover.type3)
        worse += c1 > g1
    assert worse == 0


def test_min_path_cover_on_chain():
    bn = parse_network("X1 = X1\nX2 = X1\nX3 = X2\noutput Y = X3\n")
    cover = min_path_cover(build_wiring_digraph(augment(bn)))
    assert cover.paths == (("X1", "X2", "X3"),)
