"""Integer difference-constraint feasibility with conflict extraction.

A set of constraints of the form  x - y <= k  (either side may be the
designated zero node) is feasible over the integers iff the corresponding
edge-weighted graph has no negative cycle; a feasible set admits the
shortest-path potentials as a concrete solution.  On infeasibility the
negative cycle is returned so the caller can turn it into a conflict clause.
"""

from __future__ import annotations

from collections import deque
from typing import Hashable, Optional, Sequence

Node = Hashable
ZERO: Node = ("!zero",)  # implicit node valued 0; single-variable bounds refer to it


class DiffConstraint:
    """x - y <= k, with an opaque tag identifying the asserting literal."""

    __slots__ = ("x", "y", "k", "tag")

    def __init__(self, x: Node, y: Node, k: int, tag=None):
        self.x = x
        self.y = y
        self.k = k
        self.tag = tag

    def __repr__(self):
        return f"{self.x!r} - {self.y!r} <= {self.k}"


def solve_difference_constraints(
    constraints: Sequence[DiffConstraint],
) -> tuple[Optional[dict[Node, int]], Optional[list[DiffConstraint]]]:
    """Returns (values, None) on feasibility or (None, cycle) on a negative cycle.

    Values include every node mentioned plus ZERO, shifted so ZERO maps to 0.
    The solution is deterministic in the input order.
    """
    nodes: dict[Node, int] = {ZERO: 0}
    for c in constraints:
        nodes.setdefault(c.x, len(nodes))
        nodes.setdefault(c.y, len(nodes))
    n = len(nodes)
    # x - y <= k  =>  edge y -> x of weight k
    edges: list[list[tuple[int, int, DiffConstraint]]] = [[] for _ in range(n)]
    for c in constraints:
        edges[nodes[c.y]].append((nodes[c.x], c.k, c))

    dist = [0] * n  # virtual source connected to every node with weight 0
    pred: list[Optional[DiffConstraint]] = [None] * n
    pred_node = [-1] * n
    relax_count = [0] * n
    queue = deque(range(n))
    in_queue = [True] * n

    while queue:
        u = queue.popleft()
        in_queue[u] = False
        du = dist[u]
        for v, w, constraint in edges[u]:
            if du + w < dist[v]:
                dist[v] = du + w
                pred[v] = constraint
                pred_node[v] = u
                relax_count[v] += 1
                if relax_count[v] > n:
                    return None, _extract_cycle(v, pred, pred_node, n)
                if not in_queue[v]:
                    queue.append(v)
                    in_queue[v] = True

    index_of = {i: node for node, i in nodes.items()}
    shift = dist[nodes[ZERO]]
    values = {index_of[i]: dist[i] - shift for i in range(n)}
    return values, None


def _extract_cycle(
    start: int,
    pred: list[Optional[DiffConstraint]],
    pred_node: list[int],
    n: int,
) -> list[DiffConstraint]:
    # walk predecessors n times to guarantee landing inside the cycle
    u = start
    for _ in range(n):
        u = pred_node[u]
    cycle = []
    v = u
    while True:
        cycle.append(pred[v])
        v = pred_node[v]
        if v == u:
            break
    return cycle
