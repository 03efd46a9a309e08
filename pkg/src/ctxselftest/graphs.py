"""Vertex-weighted exclusivity graphs and their noncontextual bound.

Vertices are labelled ``1..n`` everywhere outside this module's internals;
row/column 0 of every SDP matrix is reserved for the handle vector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GraphSizeError, InvalidArgumentError

DEFAULT_MAX_ENUMERATION = 30


def _normalize_edges(n: int, edges: Iterable) -> frozenset[tuple[int, int]]:
    out = set()
    for e in edges:
        i, j = (int(x) for x in e)
        if i == j:
            raise InvalidArgumentError(f"self-loop on vertex {i}")
        if not (1 <= i <= n and 1 <= j <= n):
            raise InvalidArgumentError(f"edge {{{i},{j}}} has a vertex outside 1..{n}")
        pair = (min(i, j), max(i, j))
        if pair in out:
            raise InvalidArgumentError(f"edge {{{i},{j}}} listed twice")
        out.add(pair)
    return frozenset(out)


@dataclass(frozen=True)
class ExclusivityGraph:
    """Immutable exclusivity graph with nonnegative vertex weights."""

    n: int
    edges: frozenset = field(default_factory=frozenset)
    weights: tuple = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgumentError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", _normalize_edges(self.n, self.edges))
        w = tuple(float(x) for x in self.weights) if len(self.weights) else (1.0,) * self.n
        if len(w) != self.n:
            raise InvalidArgumentError(f"expected {self.n} weights, got {len(w)}")
        if any(not np.isfinite(x) or x < 0 for x in w):
            raise InvalidArgumentError("weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    def __repr__(self):
        return f"ExclusivityGraph(n={self.n}, edges={sorted(self.edges)}, weights={list(self.weights)})"

    @property
    def dim(self) -> int:
        return self.n + 1

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def non_edges(self) -> list[tuple[int, int]]:
        """Vertex pairs i < j that are not edges, in lexicographic order."""
        return [
            (i, j)
            for i in range(1, self.n + 1)
            for j in range(i + 1, self.n + 1)
            if (i, j) not in self.edges
        ]

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> list[int]:
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    def with_edges(self, edges) -> "ExclusivityGraph":
        return ExclusivityGraph(self.n, edges, self.weights)

    def with_weights(self, weights) -> "ExclusivityGraph":
        return ExclusivityGraph(self.n, self.edges, weights)

    def relabel(self, perm: dict[int, int]) -> "ExclusivityGraph":
        """Graph with vertex ``i`` renamed ``perm[i]``."""
        w = [0.0] * self.n
        for i, x in enumerate(self.weights, start=1):
            w[perm[i] - 1] = x
        return ExclusivityGraph(self.n, [(perm[i], perm[j]) for i, j in self.edges], w)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.sorted_edges()],
            "weights": list(self.weights),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExclusivityGraph":
        if not isinstance(d, dict):
            raise InvalidArgumentError("graph JSON must be an object")
        if "n" not in d:
            raise InvalidArgumentError("graph JSON is missing field 'n'")
        if not isinstance(d["n"], int) or isinstance(d["n"], bool):
            raise InvalidArgumentError("graph JSON field 'n' must be an integer")
        edges = d.get("edges", [])
        if not isinstance(edges, list) or any(
            not isinstance(e, (list, tuple)) or len(e) != 2 for e in edges
        ):
            raise InvalidArgumentError("graph JSON field 'edges' must be a list of [i, j] pairs")
        weights = d.get("weights")
        if weights is not None and (
            not isinstance(weights, list)
            or any(isinstance(w, bool) or not isinstance(w, (int, float)) for w in weights)
        ):
            raise InvalidArgumentError("graph JSON field 'weights' must be a list of numbers")
        return cls(d["n"], edges, tuple(weights) if weights else ())


def cycle_graph(n: int) -> ExclusivityGraph:
    """The n-cycle ``1-2-...-n-1`` with unit weights."""
    if int(n) != n or n < 3:
        raise InvalidArgumentError(f"cycle needs n >= 3, got {n}")
    n = int(n)
    return ExclusivityGraph(n, [(i, i % n + 1) for i in range(1, n + 1)])


def adjacency_matrix(g: ExclusivityGraph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i - 1, j - 1] = a[j - 1, i - 1] = 1.0
    return a


def weighted_independence_number(g: ExclusivityGraph, max_n: int = DEFAULT_MAX_ENUMERATION) -> float:
    """Maximum total weight of an independent set, by exhaustive search.

    Deterministic noncontextual behaviours are exactly the indicator vectors
    of independent sets, so this is the noncontextual bound of the
    inequality with the graph's weights.
    """
    if g.n > max_n:
        raise GraphSizeError(
            f"exhaustive search is capped at n <= {max_n} (got n={g.n}); "
            "for odd cycles use the closed form (n - 1) / 2"
        )
    nbr_mask = [0] * g.n
    for i, j in g.edges:
        nbr_mask[i - 1] |= 1 << (j - 1)
        nbr_mask[j - 1] |= 1 << (i - 1)
    w = g.weights
    suffix = [0.0] * (g.n + 1)
    for k in range(g.n - 1, -1, -1):
        suffix[k] = suffix[k + 1] + w[k]

    best = 0.0
    # depth-first over include/exclude decisions; a vertex is only included
    # when none of its already-chosen neighbours blocks it
    stack = [(0, 0, 0.0)]
    while stack:
        k, chosen, total = stack.pop()
        if total + suffix[k] <= best:
            continue
        if k == g.n:
            best = total
            continue
        stack.append((k + 1, chosen, total))
        if not (nbr_mask[k] & chosen):
            stack.append((k + 1, chosen | (1 << k), total + w[k]))
    return best


def cycle_order(g: ExclusivityGraph) -> list[int] | None:
    """Vertex order ``[v_1, ..., v_n]`` if the graph is a single n-cycle, else None.

    The order starts at vertex 1 and proceeds towards its smaller neighbour,
    so the plain labelling ``1-2-...-n`` maps to ``[1, 2, ..., n]``.
    """
    if g.n < 3 or len(g.edges) != g.n:
        return None
    nbrs = {i: g.neighbors(i) for i in range(1, g.n + 1)}
    if any(len(v) != 2 for v in nbrs.values()):
        return None
    order = [1, nbrs[1][0]]
    while len(order) < g.n:
        a, b = nbrs[order[-1]]
        nxt = b if a == order[-2] else a
        if nxt == order[0]:
            return None
        order.append(nxt)
    if order[0] not in nbrs[order[-1]]:
        return None
    return order


def parse_graph_spec(spec: str) -> ExclusivityGraph:
    """``cycle:<n>`` shorthand or a path to a graph JSON file."""
    if spec.startswith("cycle:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise InvalidArgumentError(f"bad cycle size in {spec!r}") from None
        return cycle_graph(n)
    path = Path(spec)
    if not path.exists():
        raise InvalidArgumentError(f"graph file not found: {spec}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"graph file {spec} is not valid JSON: {exc}") from None
    return ExclusivityGraph.from_dict(data)
