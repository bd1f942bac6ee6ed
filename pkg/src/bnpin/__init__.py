"""Observability of Boolean networks by pinning control on the wiring digraph."""

from importlib import resources

from .network import BooleanNetwork, load_network, parse_network
from .oracle import is_observable
from .planner import CostWeights, PinningPlan, make_plan
from .synthesis import synthesize
from .wiring import augment, build_wiring_digraph, decompose_into_observed_paths

__all__ = [
    "BooleanNetwork",
    "CostWeights",
    "PinningPlan",
    "augment",
    "build_wiring_digraph",
    "decompose_into_observed_paths",
    "is_observable",
    "load_network",
    "make_plan",
    "parse_network",
    "synthesize",
    "case_study",
]


def case_study(name: str) -> BooleanNetwork:
    """Bundled networks: ``tlgl``, ``tcell`` or ``bn5``."""
    text = resources.files(__package__).joinpath("data", f"{name}.bn").read_text(encoding="utf-8")
    return parse_network(text)
