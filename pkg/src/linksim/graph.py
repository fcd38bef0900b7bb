"""Rooted directed trees (arborescences) and their matrix operators.

Node and edge indices are 1-based at the public boundary (configs, error
messages, per-edge accessors) and 0-based inside array code; conversion
happens in this module.  The root is always node 1.  Edge order is the
user-supplied order and defines the edge index j and the columns of the
incidence matrix.

The integer matrices D and H are kept in integer dtype so combinatorial
identities such as H @ D == I hold exactly, with no tolerance involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class GraphError(ValueError):
    """Invalid graph structure."""


class WrongEdgeCount(GraphError):
    pass


class MultipleParents(GraphError):
    pass


class CycleDetected(GraphError):
    pass


class Disconnected(GraphError):
    pass


@dataclass(frozen=True)
class Arborescence:
    """A validated rooted out-branching tree with n nodes and n-1 edges.

    edges[j] = (tail, head) with 1-based node indices; edges[j] is edge
    j+1 in 1-based edge numbering.  Use :func:`validate_arborescence` to
    construct with full validation and specific error types.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]
    root: int = field(default=1)

    @property
    def edge_count(self) -> int:
        return self.node_count - 1

    @cached_property
    def parents(self) -> np.ndarray:
        """0-based parent of each node; -1 for the root."""
        p = np.full(self.node_count, -1, dtype=np.intp)
        for tail, head in self.edges:
            p[head - 1] = tail - 1
        return p

    @cached_property
    def edge_into(self) -> np.ndarray:
        """0-based index of the edge whose head is each node; -1 for the root."""
        e = np.full(self.node_count, -1, dtype=np.intp)
        for j, (_, head) in enumerate(self.edges):
            e[head - 1] = j
        return e

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """0-based child lists per node."""
        kids: list[list[int]] = [[] for _ in range(self.node_count)]
        for tail, head in self.edges:
            kids[tail - 1].append(head - 1)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """0-based node order with every parent before its children."""
        order: list[int] = []
        stack = [self.root - 1]
        while stack:
            i = stack.pop()
            order.append(i)
            stack.extend(reversed(self.children[i]))
        return tuple(order)


def validate_arborescence(node_count: int, edge_list) -> Arborescence:
    """Validate and build an arborescence rooted at node 1.

    Raises WrongEdgeCount, MultipleParents, CycleDetected or Disconnected
    with a 1-based description of the offending node/edge.
    """
    if node_count < 1:
        raise GraphError(f"node_count must be >= 1, got {node_count}")
    edges = tuple((int(t), int(h)) for t, h in edge_list)
    if len(edges) != node_count - 1:
        raise WrongEdgeCount(
            f"expected {node_count - 1} edges for {node_count} nodes, got {len(edges)}"
        )
    for j, (tail, head) in enumerate(edges, start=1):
        for v in (tail, head):
            if not 1 <= v <= node_count:
                raise GraphError(f"edge {j} references node {v} outside 1..{node_count}")
        if tail == head:
            raise CycleDetected(f"edge {j} is a self-loop on node {tail}")

    parent = [0] * (node_count + 1)  # 1-based; 0 = no parent
    for j, (tail, head) in enumerate(edges, start=1):
        if head == 1:
            raise CycleDetected(f"edge {j} points into the root node 1")
        if parent[head]:
            raise MultipleParents(f"node {head} is the head of more than one edge")
        parent[head] = tail

    # With n-1 edges, no duplicate heads and none into the root, every
    # non-root node has exactly one parent; a node not reachable from the
    # root therefore sits on a directed cycle among its ancestors.
    reached = [False] * (node_count + 1)
    reached[1] = True
    stack = [1]
    kids: list[list[int]] = [[] for _ in range(node_count + 1)]
    for tail, head in edges:
        kids[tail].append(head)
    while stack:
        v = stack.pop()
        for c in kids[v]:
            if not reached[c]:
                reached[c] = True
                stack.append(c)
    missing = [v for v in range(1, node_count + 1) if not reached[v]]
    if missing:
        # Walk up from a missing node; revisiting one proves the cycle.
        seen = set()
        v = missing[0]
        while v not in seen:
            seen.add(v)
            v = parent[v]
            if v == 0:
                raise Disconnected(f"node {missing[0]} is unreachable from the root")
        raise CycleDetected(f"directed cycle through node {v}")

    return Arborescence(node_count=node_count, edges=edges)


def incidence_matrix(g: Arborescence) -> np.ndarray:
    """n x (n-1) integer incidence matrix: +1 at the head, -1 at the tail."""
    d = np.zeros((g.node_count, g.edge_count), dtype=np.int64)
    for j, (tail, head) in enumerate(g.edges):
        d[tail - 1, j] = -1
        d[head - 1, j] = 1
    return d


def head_component(g: Arborescence, j: int) -> frozenset[int]:
    """1-based node set of the sub-tree hanging below edge j (1-based)."""
    if not 1 <= j <= g.edge_count:
        raise IndexError(f"edge index {j} outside 1..{g.edge_count}")
    _, head = g.edges[j - 1]
    nodes = []
    stack = [head - 1]
    while stack:
        i = stack.pop()
        nodes.append(i + 1)
        stack.extend(g.children[i])
    return frozenset(nodes)


def tail_component(g: Arborescence, j: int) -> frozenset[int]:
    """Complement of head_component(g, j); always contains the root."""
    return frozenset(range(1, g.node_count + 1)) - head_component(g, j)


def left_inverse(g: Arborescence) -> np.ndarray:
    """(n-1) x n {0,1} matrix H of head-component memberships; H @ D = I."""
    h = np.zeros((g.edge_count, g.node_count), dtype=np.int64)
    for j in range(1, g.edge_count + 1):
        for v in head_component(g, j):
            h[j - 1, v - 1] = 1
    return h


def weighted_graph_laplacian(d: np.ndarray, edge_weights) -> np.ndarray:
    """L_w = D diag(w_e) D^T; symmetric with zero row sums."""
    w = np.asarray(edge_weights, dtype=float)
    if w.shape != (d.shape[1],):
        raise ValueError(f"expected {d.shape[1]} edge weights, got shape {w.shape}")
    df = d.astype(float)
    return df @ (w[:, None] * df.T)


def node_weighted_edge_laplacian(d: np.ndarray, node_weights) -> np.ndarray:
    """L_e = D^T diag(w_n) D; symmetric positive definite for positive weights."""
    w = np.asarray(node_weights, dtype=float)
    if w.shape != (d.shape[0],):
        raise ValueError(f"expected {d.shape[0]} node weights, got shape {w.shape}")
    if np.any(w <= 0):
        raise ValueError("node weights must be strictly positive")
    df = d.astype(float)
    return df.T @ (w[:, None] * df)


def random_arborescence(n: int, rng: np.random.Generator) -> Arborescence:
    """Random recursive tree: node i attaches to a uniform earlier node.

    Edge order is shuffled so tests exercise arbitrary edge numberings.
    """
    edges = [(int(rng.integers(1, i)), i) for i in range(2, n + 1)]
    rng.shuffle(edges)
    return validate_arborescence(n, edges)
