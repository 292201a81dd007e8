"""Finite undirected graphs: colourings, chromatic number, girth and cycles."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Mapping, Sequence


@total_ordering
class _Infinity:
    """Marker for an unbounded value; compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("inf-marker")

    def __repr__(self):
        return "INF"

    def to_json(self):
        return "inf"


INF = _Infinity()


@dataclass(frozen=True)
class Graph:
    vertices: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < v < self.vertices):
                raise ValueError(f"edge {(u, v)} not normalised or out of range")

    @classmethod
    def from_edges(cls, vertices: int, edges: Iterable[Sequence[int]]) -> Graph:
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return cls(vertices, frozenset(norm))

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def to_json(self) -> dict:
        return {"vertices": self.vertices, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: Mapping) -> Graph:
        return cls.from_edges(int(data["vertices"]), data.get("edges", []))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi style G(n, p) drawn from a seeded generator."""
    rng = random.Random(seed)
    return Graph.from_edges(
        n, ((u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p)
    )


def disjoint_union(graphs: Iterable[Graph]) -> Graph:
    offset = 0
    edges = []
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.vertices
    return Graph.from_edges(offset, edges)


def is_colouring(g: Graph, colouring: Mapping[int, object] | Sequence[object]) -> bool:
    """True when every vertex is coloured and no edge is monochromatic."""
    try:
        colours = [colouring[v] for v in range(g.vertices)]
    except (KeyError, IndexError):
        return False
    return all(colours[u] != colours[v] for u, v in g.edges)


def clique_number(g: Graph) -> int:
    adj = g.adjacency()
    best = 0

    def expand(size: int, candidates: set[int]):
        nonlocal best
        if size > best:
            best = size
        if size + len(candidates) <= best:
            return
        for v in sorted(candidates):
            expand(size + 1, candidates & adj[v])
            candidates = candidates - {v}
            if size + len(candidates) <= best:
                return

    expand(0, set(range(g.vertices)))
    return best


def _colourable(adj: list[set[int]], k: int) -> list[int] | None:
    n = len(adj)
    colour = [-1] * n

    def pick() -> int:
        # DSATUR choice: most distinct neighbour colours, then highest degree
        best, key = -1, None
        for v in range(n):
            if colour[v] >= 0:
                continue
            sat = len({colour[w] for w in adj[v] if colour[w] >= 0})
            cand = (sat, len(adj[v]), -v)
            if key is None or cand > key:
                best, key = v, cand
        return best

    def solve(done: int, used: int) -> bool:
        if done == n:
            return True
        v = pick()
        banned = {colour[w] for w in adj[v]}
        # only one fresh colour needs trying: unused colours are interchangeable
        for c in range(min(used + 1, k)):
            if c in banned:
                continue
            colour[v] = c
            if solve(done + 1, max(used, c + 1)):
                return True
            colour[v] = -1
        return False

    return list(colour) if solve(0, 0) else None


def optimal_colouring(g: Graph) -> list[int]:
    if g.vertices == 0:
        return []
    adj = g.adjacency()
    for k in range(max(1, clique_number(g)), g.vertices + 1):
        found = _colourable(adj, k)
        if found is not None:
            return found
    raise AssertionError("unreachable: n colours always suffice")


def chromatic_number(g: Graph) -> int:
    """Exact chromatic number. Finite graphs never need the INF marker."""
    return len(set(optimal_colouring(g)))


def girth(g: Graph):
    """Length of a shortest cycle, or INF for forests."""
    adj = g.adjacency()
    best = INF
    for root in range(g.vertices):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    length = dist[u] + dist[w] + 1
                    if best is INF or length < best:
                        best = length
    return best


def find_cycles(g: Graph, max_len: int) -> list[tuple[int, ...]]:
    """All simple cycles with at most max_len vertices, each listed once.

    A cycle is reported starting at its smallest vertex, in the direction whose
    second vertex is the smaller neighbour.
    """
    adj = [sorted(s) for s in g.adjacency()]
    out = []

    def walk(start: int, path: list[int], seen: set[int]):
        u = path[-1]
        for w in adj[u]:
            if w == start and len(path) >= 3 and path[1] < path[-1]:
                out.append(tuple(path))
            elif w > start and w not in seen and len(path) < max_len:
                seen.add(w)
                path.append(w)
                walk(start, path, seen)
                path.pop()
                seen.remove(w)

    for s in range(g.vertices):
        walk(s, [s], {s})
    return sorted(out, key=lambda c: (len(c), c))
