"""Random Boolean networks for property tests and benchmark corpora."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Const, Expr, Not, Var, from_truth_table
from .network import BooleanNetwork

__all__ = ["RandomNetworkConfig", "random_rule", "random_network", "path_network", "dag_network", "bench_corpus"]


@dataclass(frozen=True)
class RandomNetworkConfig:
    n: int
    p: int = 1
    max_indegree: int = 3
    sensor_mode: str = "copy"  # "copy" reads one state, "mixed" may read a function of two
    constant_prob: float = 0.0


def random_rule(rng: np.random.Generator, names: list[str]) -> Expr:
    """Uniformly random Boolean function of ``names``, minimized for readability."""
    if not names:
        return Const(bool(rng.integers(2)))
    values = rng.integers(0, 2, size=1 << len(names)).astype(bool)
    return from_truth_table(values, names)


def _names(n: int) -> list[str]:
    return [f"X{i + 1}" for i in range(n)]


def _sensors(rng, cfg: RandomNetworkConfig, names: list[str], sensed=None):
    outputs = []
    picks = list(sensed) if sensed is not None else list(rng.choice(names, size=min(cfg.p, len(names)), replace=False))
    for j, x in enumerate(picks):
        if cfg.sensor_mode == "mixed" and rng.random() < 0.5 and len(names) > 1:
            other = str(rng.choice([v for v in names if v != x]))
            outputs.append((f"Y{j + 1}", random_rule(rng, [str(x), other])))
        else:
            outputs.append((f"Y{j + 1}", Var(str(x))))
    return tuple(outputs)


def random_network(rng: np.random.Generator, cfg: RandomNetworkConfig) -> BooleanNetwork:
    names = _names(cfg.n)
    states = []
    for x in names:
        if rng.random() < cfg.constant_prob:
            states.append((x, Const(bool(rng.integers(2)))))
            continue
        k = int(rng.integers(1, cfg.max_indegree + 1))
        fanin = sorted(rng.choice(cfg.n, size=min(k, cfg.n), replace=False))
        states.append((x, random_rule(rng, [names[i] for i in fanin])))
    return BooleanNetwork(tuple(states), _sensors(rng, cfg, names))


def path_network(rng: np.random.Generator, cfg: RandomNetworkConfig) -> BooleanNetwork:
    """States split into chains, each sensed at its end; chain heads get random rules.

    Non-head vertices copy or negate their predecessor, so these networks
    usually decompose into observed paths.
    """
    names = _names(cfg.n)
    order = list(rng.permutation(names))
    cuts = sorted(rng.choice(range(1, cfg.n), size=min(cfg.p - 1, cfg.n - 1), replace=False)) if cfg.n > 1 else []
    chains = [order[a:b] for a, b in zip([0] + list(cuts), list(cuts) + [cfg.n])]
    rules: dict[str, Expr] = {}
    for chain in chains:
        head = chain[0]
        k = int(rng.integers(0, cfg.max_indegree + 1))
        fanin = [str(v) for v in rng.choice(names, size=min(k, cfg.n), replace=False)]
        rules[head] = random_rule(rng, sorted(fanin, key=names.index))
        for a, b in zip(chain, chain[1:]):
            rules[b] = Var(a) if rng.random() < 0.5 else Not(Var(a))
    states = tuple((x, rules[x]) for x in names)
    return BooleanNetwork(states, _sensors(rng, cfg, names, sensed=[c[-1] for c in chains]))


def dag_network(rng: np.random.Generator, cfg: RandomNetworkConfig) -> BooleanNetwork:
    """Acyclic wiring: each state reads only lower-indexed states."""
    names = _names(cfg.n)
    states = []
    for i, x in enumerate(names):
        if i == 0:
            states.append((x, Const(bool(rng.integers(2)))))
            continue
        k = int(rng.integers(0, min(cfg.max_indegree, i) + 1))
        fanin = sorted(rng.choice(i, size=k, replace=False))
        states.append((x, random_rule(rng, [names[j] for j in fanin])))
    return BooleanNetwork(tuple(states), _sensors(rng, cfg, names))


def bench_corpus(
    out_dir,
    sizes=tuple(range(10, 19)) + (24, 32, 48, 64, 96, 128, 192, 256),
    seed: int = 7,
    p: int = 2,
    max_indegree: int = 3,
) -> list:
    """Write one random network per size as ``n<size>.bn``; returns the paths."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for n in sizes:
        bn = random_network(rng, RandomNetworkConfig(n, p=p, max_indegree=max_indegree))
        path = out / f"n{n:04d}.bn"
        path.write_text(bn.to_bn([f"random network, n={n}, seed={seed}"]), encoding="utf-8")
        paths.append(path)
    return paths
