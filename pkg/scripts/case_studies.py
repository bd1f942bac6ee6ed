"""Plan, pin and verify both bundled case studies; print a compact summary."""

import argparse

from bnpin import case_study
from bnpin.expr import render
from bnpin.oracle import DEFAULT_STATE_CAP, is_observable
from bnpin.planner import make_plan
from bnpin.synthesis import synthesize
from bnpin.wiring import augment, build_wiring_digraph, decompose_into_observed_paths


def summarize(name: str, planner: str) -> None:
    bn = case_study(name)
    aug = augment(bn)
    plan = make_plan(aug, planner)
    pinned = synthesize(aug, plan)
    decomposes = decompose_into_observed_paths(build_wiring_digraph(pinned.augmented)) is not None
    print(f"{name} [{planner}] n={bn.n} p={len(bn.outputs)}")
    if plan.cover is not None:
        print(f"  cover paths: {len(plan.cover)}")
    for path in plan.paths:
        print("  path: " + " -> ".join(path))
    print(f"  pins: {len(plan.pins)} ({100 * len(plan.pins) / bn.n:.1f}%)"
          f" type1={sorted(plan.type1)} type2={sorted(plan.type2)} type3={sorted(plan.type3)}")
    for c in pinned.controllers:
        print(f"  {c.node} = {render(c.update_expr)}")
    print(f"  pinned wiring decomposes: {decomposes}")
    if bn.n <= DEFAULT_STATE_CAP:
        print(f"  oracle: original observable={is_observable(bn).observable},"
              f" pinned observable={is_observable(pinned.network).observable}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=["tlgl", "tcell"])
    args = ap.parse_args()
    for name in args.names:
        for planner in ("greedy", "cover"):
            summarize(name, planner)


if __name__ == "__main__":
    main()
