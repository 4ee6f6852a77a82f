"""Resource caps for the brute-force engines.

Defaults are conservative desk-scale values; every refusal raises
:class:`~permclosure.errors.BudgetExceeded` naming the limiting quantity.
The environment variable ``PERMCLOSURE_BUDGET`` overrides the tuple-space
cap for a whole process; the CLI ``--budget`` flag does the same per run.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .errors import BudgetExceeded


@dataclass(frozen=True)
class Budget:
    tuple_space: int = 10_000_000        # max |Omega|^k for a full orbit coloring
    exhaustive_degree: int = 9           # max degree for iterating all of Sym(Omega)
    backtracking_degree: int = 16        # max degree for the backtracking closure engine
    partition_degree: int = 10           # max degree for the partition-closure engine
    gl_enumeration: int = 25_000         # max |GL_a(p)| enumerated for intersections
    element_enumeration: int = 1_000_000 # max group elements listed explicitly
    frame_points: int = 2048             # max points for a tensor frame action
    section_search_nodes: int = 20_000   # cap for the explicit section search

    def with_tuple_space(self, limit: int) -> "Budget":
        return replace(self, tuple_space=limit)

    def check(self, quantity: str, value: int, limit: int) -> None:
        if value > limit:
            raise BudgetExceeded(quantity, value, limit)


def default_budget() -> Budget:
    env = os.environ.get("PERMCLOSURE_BUDGET")
    if env:
        return Budget(tuple_space=int(env))
    return Budget()
