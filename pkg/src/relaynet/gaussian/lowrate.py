"""Orthogonal-routing lower bound for low-SNR Gaussian networks."""

from __future__ import annotations

import math
from collections import deque

from ..errors import ArgumentError
from ..netmodel import GaussNetwork


def max_flow(capacity: dict[tuple[str, str], float], source: str, sink: str, tol: float = 1e-12) -> float:
    """Max-flow value by capacity-scaling augmenting paths on real capacities.

    Scaling phases push paths whose bottleneck is at least the current
    threshold; a final shortest-augmenting-path phase (threshold ``tol``
    times the largest capacity) finishes exactly up to that tolerance.
    """
    residual: dict[str, dict[str, float]] = {}
    for (u, v), c in capacity.items():
        if c < 0:
            raise ArgumentError("capacities must be non-negative")
        residual.setdefault(u, {}).setdefault(v, 0.0)
        residual.setdefault(v, {}).setdefault(u, 0.0)
        residual[u][v] += c
    if source not in residual or sink not in residual or source == sink:
        return 0.0
    cmax = max(capacity.values(), default=0.0)
    if cmax <= 0:
        return 0.0
    floor = tol * cmax
    flow = 0.0
    delta = 2.0 ** math.floor(math.log2(cmax))
    while True:
        threshold = max(delta, floor)
        while True:
            path = _bfs_path(residual, source, sink, threshold)
            if path is None:
                break
            push = min(residual[u][v] for u, v in path)
            for u, v in path:
                residual[u][v] -= push
                residual[v][u] += push
            flow += push
        if threshold <= floor:
            return flow
        delta /= 2


def _bfs_path(residual, source, sink, threshold):
    parent = {source: None}
    todo = deque([source])
    while todo:
        u = todo.popleft()
        for v, r in residual[u].items():
            if r > threshold and v not in parent:
                parent[v] = u
                if v == sink:
                    path = []
                    while parent[v] is not None:
                        path.append((parent[v], v))
                        v = parent[v]
                    return path[::-1]
                todo.append(v)
    return None


def support_degree(net: GaussNetwork) -> int:
    """Largest neighbour count in the undirected graph of non-zero links."""
    nbrs = {v: set() for v in net.nodes}
    for (i, j), h in net.channels.items():
        if abs(complex(h[0, 0])) > 0:
            nbrs[i].add(j)
            nbrs[j].add(i)
    return max((len(s) for s in nbrs.values()), default=0)


def orthogonal_capacities(net: GaussNetwork) -> tuple[dict[tuple[str, str], float], int]:
    if not net.is_single_antenna():
        raise ArgumentError("orthogonal routing bound needs single-antenna nodes")
    d = support_degree(net)
    caps = {}
    if d == 0:
        return caps, 0
    scale = 1.0 / (2 * d * (d + 1))
    for (i, j), h in net.channels.items():
        g = abs(complex(h[0, 0])) ** 2
        if g > 0:
            caps[(i, j)] = scale * net.rate_factor * math.log2(1 + d * net.power * g)
    return caps, d


def orthogonal_routing_bound(net: GaussNetwork, dest: str | None = None) -> float:
    """Rate of routing over edge-coloured orthogonal links; at least C̄ / (2d(d+1))."""
    dest = net.destination if dest is None else dest
    caps, _ = orthogonal_capacities(net)
    return max_flow(caps, net.source, dest)
