"""Causal DAGs and the graph-side queries the benchmark needs.

Everything here is purely graph-theoretic: random DAG sampling,
d-separation, skeletons, minimal separating sets, and the selection of
evaluation sets (balanced CI triples, direction-eval edges) that the
scoring pipeline consumes. All types are immutable and all operations are
deterministic given explicit seeds, so instances can be shared freely
across parallel workers.
"""

from __future__ import annotations

import csv
import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import DomainError, ParameterError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over named columns.

    Edges are (parent, child) index pairs. Construction validates
    acyclicity, name uniqueness, and absence of self-loops; instances are
    frozen afterwards.
    """

    n_nodes: int
    node_names: tuple[str, ...]
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ParameterError(f"n_nodes must be positive, got {self.n_nodes}")
        object.__setattr__(self, "node_names", tuple(self.node_names))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        if len(self.node_names) != self.n_nodes:
            raise ParameterError("node_names length must equal n_nodes")
        if len(set(self.node_names)) != self.n_nodes:
            raise ParameterError("node names must be unique")
        for u, v in self.edges:
            if u == v:
                raise ParameterError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ParameterError(f"edge ({u},{v}) out of range")
        # Raises on cycles.
        topological_order(self)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            ch[u].append(v)
        return tuple(tuple(sorted(c)) for c in ch)

    @cached_property
    def _parents(self) -> tuple[tuple[int, ...], ...]:
        pa: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for u, v in self.edges:
            pa[v].append(u)
        return tuple(tuple(sorted(p)) for p in pa)

    def parents_of(self, node: int) -> tuple[int, ...]:
        return self._parents[node]

    def children_of(self, node: int) -> tuple[int, ...]:
        return self._children[node]

    def is_adjacent(self, x: int, y: int) -> bool:
        return (x, y) in self.edges or (y, x) in self.edges

    def ancestors_of(self, node: int) -> frozenset[int]:
        """All nodes with a directed path into ``node`` (excluding itself)."""
        seen: set[int] = set()
        stack = list(self._parents[node])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._parents[u])
        return frozenset(seen)

    def descendants_of(self, node: int) -> frozenset[int]:
        seen: set[int] = set()
        stack = list(self._children[node])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._children[u])
        return frozenset(seen)

    def drop_edge(self, u: int, v: int) -> "Dag":
        if (u, v) not in self.edges:
            raise ParameterError(f"({u},{v}) is not an edge")
        return Dag(self.n_nodes, self.node_names, self.edges - {(u, v)})


@dataclass(frozen=True)
class Skeleton:
    """Undirected version of a DAG; edges stored as sorted index pairs."""

    n_nodes: int
    undirected_edges: frozenset[Edge]

    def __post_init__(self):
        canon = set()
        for u, v in self.undirected_edges:
            if u == v:
                raise ParameterError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ParameterError(f"edge ({u},{v}) out of range")
            canon.add((min(u, v), max(u, v)))
        object.__setattr__(self, "undirected_edges", frozenset(canon))

    def is_adjacent(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self.undirected_edges


@dataclass(frozen=True)
class CiTriple:
    """A (x, y, conditioning set) query with its ground-truth label.

    ``gt_independent`` is True when x and y are d-separated given
    ``cond_set`` in the generating DAG.
    """

    x: int
    y: int
    cond_set: frozenset[int]
    gt_independent: bool

    def __post_init__(self):
        object.__setattr__(self, "cond_set", frozenset(self.cond_set))
        if self.x == self.y:
            raise ParameterError("x and y must differ")
        if self.x in self.cond_set or self.y in self.cond_set:
            raise ParameterError("endpoints cannot appear in the conditioning set")


def default_node_names(n_nodes: int) -> tuple[str, ...]:
    return tuple(f"X{i}" for i in range(n_nodes))


def random_dag(n_nodes: int, expected_degree: float, seed: int) -> Dag:
    """Sample a random DAG with the given expected node degree.

    A uniform node permutation fixes an order; each forward pair is then
    included independently with probability expected_degree/(n_nodes-1)
    (capped at 1), which makes the expected edge count
    n_nodes * expected_degree / 2. Deterministic for fixed inputs.
    """
    if n_nodes < 2:
        raise ParameterError(f"need at least 2 nodes, got {n_nodes}")
    if expected_degree <= 0:
        raise ParameterError(f"expected_degree must be positive, got {expected_degree}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_nodes)
    p = min(1.0, expected_degree / (n_nodes - 1))
    edges = set()
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < p:
                edges.add((int(order[i]), int(order[j])))
    return Dag(n_nodes, default_node_names(n_nodes), frozenset(edges))


def topological_order(dag: Dag) -> list[int]:
    """Kahn's algorithm with smallest-index tie-breaking (deterministic)."""
    n = dag.n_nodes
    indeg = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    for u, v in dag.edges:
        indeg[v] += 1
        children[u].append(v)
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    out: list[int] = []
    while ready:
        u = ready.pop(0)
        out.append(u)
        newly = []
        for v in children[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                newly.append(v)
        if newly:
            ready = sorted(ready + newly)
    if len(out) != n:
        raise ParameterError("graph contains a directed cycle")
    return out


def _check_query(dag: Dag, x: int, y: int, cond: Iterable[int]) -> frozenset[int]:
    cond = frozenset(cond)
    for node in (x, y, *cond):
        if not (0 <= node < dag.n_nodes):
            raise ParameterError(f"node index {node} out of range")
    if x == y:
        raise ParameterError("x and y must differ")
    if x in cond or y in cond:
        raise ParameterError("endpoints cannot appear in the conditioning set")
    return cond


def d_separated(dag: Dag, x: int, y: int, cond: Iterable[int] = ()) -> bool:
    """Decide whether ``cond`` blocks every path between x and y.

    Uses the linear-time reachability formulation: a path is open through
    a chain or fork only when its middle node is unconditioned, and
    through a collider only when the collider or one of its descendants
    is conditioned on.
    """
    cond = _check_query(dag, x, y, cond)
    # Nodes whose conditioning opens colliders: cond plus its ancestors.
    opens = set(cond)
    stack = list(cond)
    while stack:
        for p in dag.parents_of(stack.pop()):
            if p not in opens:
                opens.add(p)
                stack.append(p)

    # States are (node, arrived-from-child?). Arrival from a child means we
    # are travelling against edge direction.
    UP, DOWN = True, False
    visited: set[tuple[int, bool]] = set()
    queue: deque[tuple[int, bool]] = deque([(x, UP)])
    while queue:
        node, direction = queue.popleft()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node == y:
            return False
        if direction == UP and node not in cond:
            for p in dag.parents_of(node):
                queue.append((p, UP))
            for c in dag.children_of(node):
                queue.append((c, DOWN))
        elif direction == DOWN:
            if node not in cond:
                for c in dag.children_of(node):
                    queue.append((c, DOWN))
            if node in opens:
                for p in dag.parents_of(node):
                    queue.append((p, UP))
    return True


def skeleton_of(dag: Dag) -> Skeleton:
    """Drop edge directions."""
    return Skeleton(dag.n_nodes, frozenset((min(u, v), max(u, v)) for u, v in dag.edges))


def minimal_separating_sets(dag: Dag, x: int, y: int) -> list[frozenset[int]]:
    """Every inclusion-minimal set that d-separates x and y.

    Search is exhaustive over subsets of the union of the two nodes'
    ancestors; minimal separators cannot contain other nodes. Raises
    DomainError for adjacent pairs, which no set can separate.
    """
    _check_query(dag, x, y, ())
    if dag.is_adjacent(x, y):
        raise DomainError(f"nodes {x} and {y} are adjacent; no separating set exists")
    candidates = sorted((dag.ancestors_of(x) | dag.ancestors_of(y)) - {x, y})
    found: list[frozenset[int]] = []
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            s = frozenset(combo)
            if any(m <= s for m in found):
                continue
            if d_separated(dag, x, y, s):
                found.append(s)
    return found


def ci_benchmark_triples(dag: Dag, seed: int) -> list[CiTriple]:
    """Balanced independent/dependent CI queries for MEC-level scoring.

    For every non-adjacent pair, one triple per minimal separating set
    (labelled independent). An equal number of d-connected triples is then
    drawn without replacement, stratified so the conditioning-set sizes
    match the independent side. Deterministic for a fixed seed.
    """
    nodes = range(dag.n_nodes)
    independent: list[CiTriple] = []
    for x, y in itertools.combinations(nodes, 2):
        if dag.is_adjacent(x, y):
            continue
        for s in minimal_separating_sets(dag, x, y):
            independent.append(CiTriple(x, y, s, True))
    if not independent:
        return []

    need_by_size = Counter(len(t.cond_set) for t in independent)
    rng = np.random.default_rng(seed)
    dependent: list[CiTriple] = []
    pool_by_size: dict[int, list[tuple[int, int, frozenset[int]]]] = {}

    def pool(size: int) -> list[tuple[int, int, frozenset[int]]]:
        if size not in pool_by_size:
            cands = []
            for x, y in itertools.combinations(nodes, 2):
                others = [n for n in nodes if n not in (x, y)]
                for combo in itertools.combinations(others, size):
                    s = frozenset(combo)
                    if not d_separated(dag, x, y, s):
                        cands.append((x, y, s))
            pool_by_size[size] = cands
        return pool_by_size[size]

    deficit = 0
    for size in sorted(need_by_size):
        cands = pool(size)
        take = min(need_by_size[size], len(cands))
        deficit += need_by_size[size] - take
        idx = rng.choice(len(cands), size=take, replace=False) if take else []
        for i in sorted(int(k) for k in idx):
            x, y, s = cands[i]
            dependent.append(CiTriple(x, y, s, False))
    if deficit:
        # Rare tiny-graph case: a size stratum ran dry. Top up from other
        # sizes, then trim the independent side so balance stays exact.
        used = {(t.x, t.y, t.cond_set) for t in dependent}
        spare = [c for size in sorted(need_by_size) for c in pool(size)
                 if c not in used]
        take = min(deficit, len(spare))
        idx = rng.choice(len(spare), size=take, replace=False) if take else []
        for i in sorted(int(k) for k in idx):
            x, y, s = spare[i]
            dependent.append(CiTriple(x, y, s, False))
        independent = independent[: len(dependent)]
    return independent + dependent


def direction_eval_edges(dag: Dag) -> list[Edge]:
    """Edges whose endpoints are marginally d-separated once the edge is removed.

    For such edges the pairwise marginal reflects only the edge itself, so
    bivariate direction methods (which see just the two columns) get a
    fair query. Edges on an open side path (e.g. inside a triangle) are
    excluded.
    """
    out = []
    for u, v in sorted(dag.edges):
        if d_separated(dag.drop_edge(u, v), u, v, ()):
            out.append((u, v))
    return out


# --- serialization ---------------------------------------------------------


def dag_to_json(dag: Dag) -> dict:
    """JSON-friendly dict: node names plus name-pair edges."""
    return {
        "nodes": list(dag.node_names),
        "edges": [[dag.node_names[u], dag.node_names[v]] for u, v in sorted(dag.edges)],
    }


def dag_from_json(obj: dict) -> Dag:
    names = list(obj["nodes"])
    index = {name: i for i, name in enumerate(names)}
    edges = frozenset((index[p], index[c]) for p, c in obj["edges"])
    return Dag(len(names), tuple(names), edges)


def save_dag(dag: Dag, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dag_to_json(dag), fh, indent=2)
        fh.write("\n")


def load_dag(path) -> Dag:
    with open(path, encoding="utf-8") as fh:
        return dag_from_json(json.load(fh))


def adjacency_matrix(dag: Dag) -> np.ndarray:
    adj = np.zeros((dag.n_nodes, dag.n_nodes), dtype=int)
    for u, v in dag.edges:
        adj[u, v] = 1
    return adj


def save_adjacency_csv(dag: Dag, path) -> None:
    """n x n 0/1 matrix, header row = node names."""
    adj = adjacency_matrix(dag)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dag.node_names)
        writer.writerows(adj.tolist())
