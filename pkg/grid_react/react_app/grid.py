"""
Grid data model and the DC power flow foundation.

A grid is an undirected multigraph of buses (nodes) and reactive lines (edges).
Phase angles theta satisfy A theta = p for the weighted Laplacian A (the
admittance matrix); line flows are (theta_u - theta_v) / x_uv along the stored
orientation, which always runs from the lower node id to the higher one.

Node sets are plain frozensets of node ids. Vectors over nodes are numpy arrays
in grid node order (``grid.node_ids``).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx
import numpy as np
import scipy.linalg
from networkx.algorithms import bipartite

from .conf import resolve
from .exceptions import Disconnected, InvalidGrid, SingularSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    id: int
    p: float = 0.0


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    x: float

    @property
    def endpoints(self):
        return self.u, self.v


@dataclass(frozen=True)
class Grid:
    """
    Immutable power grid.

    Build instances through `Grid.build` (or `Grid.from_dict`), which orients every
    edge from the lower to the higher node id and checks the structural invariants.
    """
    nodes: tuple
    edges: tuple
    reference: int

    @classmethod
    def build(cls, nodes, edges, reference=None, validate=True, tol_balance=None):
        node_tuple = tuple(n if isinstance(n, Node) else Node(int(n[0]), float(n[1])) for n in nodes)
        edge_list = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(int(e[0]), int(e[1]), int(e[2]), float(e[3]))
            if e.u > e.v:
                e = Edge(e.id, e.v, e.u, e.x)
            edge_list.append(e)
        if reference is None:
            if not node_tuple:
                raise InvalidGrid('A grid needs at least one node.')
            reference = node_tuple[0].id
        grid = cls(node_tuple, tuple(edge_list), int(reference))
        if validate:
            grid.validate(tol_balance=tol_balance)
        return grid

    @classmethod
    def from_dict(cls, data, validate=True):
        """Build a grid from the JSON schema {"nodes", "edges", "reference"}."""
        try:
            nodes = [Node(int(n['id']), float(n.get('p', 0.0))) for n in data['nodes']]
            edges = [Edge(int(e['id']), int(e['u']), int(e['v']), float(e['x'])) for e in data['edges']]
            reference = data.get('reference')
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGrid('Malformed grid document: %s' % exc) from exc
        return cls.build(nodes, edges, reference, validate=validate)

    def to_dict(self):
        return {
            'nodes': [{'id': n.id, 'p': n.p} for n in self.nodes],
            'edges': [{'id': e.id, 'u': e.u, 'v': e.v, 'x': e.x} for e in self.edges],
            'reference': self.reference,
        }

    def validate(self, tol_balance=None):
        ids = [n.id for n in self.nodes]
        if not ids:
            raise InvalidGrid('A grid needs at least one node.')
        if len(set(ids)) != len(ids):
            raise InvalidGrid('Node ids must be unique.')
        if any(i < 0 for i in ids):
            raise InvalidGrid('Node ids must be non-negative.')
        edge_ids = [e.id for e in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise InvalidGrid('Edge ids must be unique.')
        if any(i < 0 for i in edge_ids):
            raise InvalidGrid('Edge ids must be non-negative.')
        if self.reference not in self.index:
            raise InvalidGrid('Reference node %d is not a grid node.' % self.reference)
        for e in self.edges:
            if e.u not in self.index or e.v not in self.index:
                raise InvalidGrid('Edge %d references an unknown node.' % e.id)
            if e.u == e.v:
                raise InvalidGrid('Edge %d is a self-loop.' % e.id)
            if not np.isfinite(e.x) or e.x <= 0:
                raise InvalidGrid('Edge %d has non-positive reactance %r.' % (e.id, e.x))
        if not self.is_connected():
            raise InvalidGrid('Grid is not connected.')
        p = self.injections
        if not balanced(p, tol_balance):
            raise InvalidGrid('Injections sum to %.3e instead of zero.' % p.sum())

    @cached_property
    def node_ids(self):
        return tuple(n.id for n in self.nodes)

    @cached_property
    def index(self):
        return {node_id: pos for pos, node_id in enumerate(self.node_ids)}

    @cached_property
    def edge_index(self):
        return {e.id: pos for pos, e in enumerate(self.edges)}

    @cached_property
    def edge_ids(self):
        return tuple(e.id for e in self.edges)

    @cached_property
    def injections(self):
        return np.array([n.p for n in self.nodes], dtype=float)

    @cached_property
    def graph(self):
        g = nx.MultiGraph()
        g.add_nodes_from(self.node_ids)
        for e in self.edges:
            g.add_edge(e.u, e.v, key=e.id, x=e.x)
        return g

    @cached_property
    def adjacency(self):
        adj = {node_id: set() for node_id in self.node_ids}
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        return {node_id: frozenset(nbrs) for node_id, nbrs in adj.items()}

    @property
    def node_count(self):
        return len(self.nodes)

    @property
    def edge_count(self):
        return len(self.edges)

    def edge(self, edge_id):
        return self.edges[self.edge_index[edge_id]]

    def positions(self, node_ids):
        """Positions of `node_ids` in node order, as an index array (sorted ids in, same order out)."""
        return np.array([self.index[i] for i in node_ids], dtype=int)

    def sorted_nodes(self, node_set):
        return sorted(node_set, key=self.index.__getitem__)

    def is_connected(self, removed=()):
        removed = set(removed)
        if not removed:
            return nx.is_connected(self.graph)
        g = nx.MultiGraph()
        g.add_nodes_from(self.node_ids)
        g.add_edges_from((e.u, e.v) for e in self.edges if e.id not in removed)
        return nx.is_connected(g)

    def without_edges(self, edge_ids):
        removed = set(edge_ids)
        unknown = removed - set(self.edge_ids)
        if unknown:
            raise InvalidGrid('Unknown edge ids %s.' % sorted(unknown))
        return Grid(self.nodes, tuple(e for e in self.edges if e.id not in removed), self.reference)


@dataclass(frozen=True)
class PhaseState:
    """Phase angles in node order, pinned so that theta[reference] = 0."""
    theta: np.ndarray
    residual: float = 0.0
    reference: int = field(default=-1)

    def __array__(self, dtype=None, copy=None):
        return self.theta if dtype is None else self.theta.astype(dtype)

    def __len__(self):
        return len(self.theta)


def as_vector(value):
    if isinstance(value, PhaseState):
        return value.theta
    return np.asarray(value, dtype=float)


def balanced(p, tol_balance=None):
    tol = resolve(tol_balance, 'TOL_SOLVE')
    p = np.asarray(p, dtype=float)
    return abs(p.sum()) <= tol * max(1.0, np.abs(p).sum())


def build_admittance(grid):
    """Dense weighted Laplacian: a_uv = -sum 1/x over parallel lines, a_uu = -sum_w a_uw."""
    n = grid.node_count
    A = np.zeros((n, n))
    if not grid.edges:
        return A
    iu = np.array([grid.index[e.u] for e in grid.edges])
    iv = np.array([grid.index[e.v] for e in grid.edges])
    b = np.array([1.0 / e.x for e in grid.edges])
    np.add.at(A, (iu, iv), -b)
    np.add.at(A, (iv, iu), -b)
    np.add.at(A, (iu, iu), b)
    np.add.at(A, (iv, iv), b)
    return A


def incidence_matrix(grid, nodes=None, edges=None, orientation: Mapping | None = None):
    """
    Node-edge incidence matrix, +1 at the tail and -1 at the head of each edge.

    `nodes` / `edges` restrict rows and columns (in the order given, default: all, in
    grid order). `orientation` optionally maps edge id -> (tail, head).
    """
    row_ids = list(grid.node_ids if nodes is None else nodes)
    col_ids = list(grid.edge_ids if edges is None else edges)
    rows = {node_id: r for r, node_id in enumerate(row_ids)}
    D = np.zeros((len(row_ids), len(col_ids)))
    orientation = orientation or {}
    for c, edge_id in enumerate(col_ids):
        e = grid.edge(edge_id)
        tail, head = orientation.get(edge_id, (e.u, e.v))
        if {tail, head} != {e.u, e.v}:
            raise InvalidGrid('Orientation of edge %d does not match its endpoints.' % edge_id)
        if tail in rows:
            D[rows[tail], c] = 1.0
        if head in rows:
            D[rows[head], c] = -1.0
    return D


def solve_dc_power_flow(grid, p=None, tol_solve=None):
    """
    Solve A theta = p with theta[reference] pinned to zero.

    The reference row and column are dropped and the reduced (positive definite)
    system is solved densely.
    """
    tol = resolve(tol_solve, 'TOL_SOLVE')
    p = grid.injections if p is None else as_vector(p)
    if p.shape != (grid.node_count,):
        raise SingularSystem('Injection vector has %d entries for %d nodes.' % (p.size, grid.node_count))
    if not grid.is_connected():
        raise Disconnected()
    if not balanced(p, tol):
        raise SingularSystem('Injections sum to %.3e; no power flow solution exists.' % p.sum())

    A = build_admittance(grid)
    ref = grid.index[grid.reference]
    keep = np.arange(grid.node_count) != ref
    theta = np.zeros(grid.node_count)
    if keep.any():
        try:
            theta[keep] = scipy.linalg.solve(A[np.ix_(keep, keep)], p[keep], assume_a='pos')
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc

    residual = float(np.max(np.abs(A @ theta - p))) if p.size else 0.0
    if residual > tol:
        raise SingularSystem('DC power flow residual %.3e exceeds tolerance %.1e.' % (residual, tol))
    logger.debug('DC power flow on %d buses, residual %.2e', grid.node_count, residual)
    return PhaseState(theta, residual, grid.reference)


def line_flows(grid, theta):
    """Flow on every line along its stored orientation, in edge order."""
    theta = as_vector(theta)
    if not grid.edges:
        return np.zeros(0)
    iu = np.array([grid.index[e.u] for e in grid.edges])
    iv = np.array([grid.index[e.v] for e in grid.edges])
    x = np.array([e.x for e in grid.edges])
    return (theta[iu] - theta[iv]) / x


def neighbors(grid, S):
    S = frozenset(S)
    out = set()
    for i in S:
        out |= grid.adjacency[i]
    return frozenset(out - S)


def interior(grid, S):
    S = frozenset(S)
    return frozenset(i for i in S if grid.adjacency[i] <= S)


def boundary(grid, S):
    S = frozenset(S)
    return S - interior(grid, S)


def closure(grid, S):
    S = frozenset(S)
    return S | neighbors(grid, S)


def complement(grid, S):
    return frozenset(grid.node_ids) - frozenset(S)


def induced_edges(grid, S):
    """Edge ids with both endpoints in S, in grid edge order."""
    S = frozenset(S)
    return [e.id for e in grid.edges if e.u in S and e.v in S]


def connected_components(grid, S):
    """Maximal connected pieces of the subgraph induced by S, ordered by smallest member."""
    S = frozenset(S)
    if not S:
        return []
    pieces = [frozenset(c) for c in nx.connected_components(grid.graph.subgraph(S))]
    return sorted(pieces, key=min)


def support_threshold(v, tol_supp=None):
    tol = resolve(tol_supp, 'TOL_SUPP')
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    return tol * max(1.0, scale)


def support(v, tol_supp):
    """Indices i with |v_i| > tol_supp."""
    v = np.asarray(v, dtype=float)
    return frozenset(int(i) for i in np.flatnonzero(np.abs(v) > tol_supp))


def node_support(grid, v, nodes=None, tol_supp=None):
    """Node ids (from `nodes`, default all in grid order) whose entry of v is nonzero at the scaled threshold."""
    ids = list(grid.node_ids if nodes is None else nodes)
    idx = support(v, support_threshold(v, tol_supp))
    return frozenset(ids[i] for i in idx)


def has_covering_matching(left, right, adjacency: Iterable):
    """
    True iff a bipartite matching saturates every node of `right`.

    `adjacency` is an iterable of (left node, right node) pairs; pairs touching nodes
    outside the two sets are ignored.
    """
    left = frozenset(left)
    right = frozenset(right)
    if not right:
        return True
    g = nx.Graph()
    left_keys = [('L', i) for i in left]
    g.add_nodes_from(left_keys, bipartite=0)
    g.add_nodes_from((('R', j) for j in right), bipartite=1)
    g.add_edges_from((('L', i), ('R', j)) for i, j in adjacency if i in left and j in right)
    matching = bipartite.hopcroft_karp_matching(g, top_nodes=left_keys)
    return all(('R', j) in matching for j in right)


def cross_adjacency(grid, left, right):
    """Pairs (l, r) with l in `left`, r in `right` joined by at least one line."""
    left = frozenset(left)
    right = frozenset(right)
    pairs = set()
    for e in grid.edges:
        if e.u in left and e.v in right:
            pairs.add((e.u, e.v))
        if e.v in left and e.u in right:
            pairs.add((e.v, e.u))
    return sorted(pairs)
