"""Contraction path optimization for tensor networks."""

from ._core import (
    Network,
    TnpathError,
    cost,
    exhaustive_bfs,
    exhaustive_dfs,
    export_dot,
    generate,
    greedy,
    partition,
    sampled_greedy,
)

__all__ = [
    "Network",
    "TnpathError",
    "cost",
    "exhaustive_bfs",
    "exhaustive_dfs",
    "export_dot",
    "generate",
    "greedy",
    "partition",
    "sampled_greedy",
]
