"""
3-partition hardness gadgets and brute-force oracles.

A 3-partition instance (s_1..s_3k, B) becomes a complete bipartite grid between k
generator buses X (injection B each) and 3k load buses Y (injection -s_j). The
post-attack angles put every X bus at 0 and load bus j at -s_j, so a set of failed
lines consistent with the post-attack flow law exists exactly when every load
bus keeps one line to a generator whose kept loads sum to B.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .attacks import Observation
from .exceptions import MalformedInstance
from .grid import Edge, Grid, Node, build_admittance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Gadget:
    grid: Grid
    theta: np.ndarray
    theta_post: np.ndarray
    H: frozenset
    s: tuple
    B: int
    x_nodes: tuple
    y_nodes: tuple

    @property
    def k(self):
        return len(self.x_nodes)

    @cached_property
    def bipartite_edges(self):
        """(x, y) -> edge id for the lines of the complete bipartite core."""
        core = set(self.x_nodes) | set(self.y_nodes)
        return {(e.u, e.v): e.id for e in self.grid.edges if e.u in core and e.v in core}

    def failure_set_for(self, partition):
        """Lines to fail so that group g of `partition` (indices into s) hangs off generator g."""
        keep = set()
        for x, group in zip(self.x_nodes, partition):
            for j in group:
                keep.add(self.bipartite_edges[(x, self.y_nodes[j])])
        return frozenset(set(self.bipartite_edges.values()) - keep)


def _check_instance(s, B, require_bounds):
    try:
        s = tuple(int(v) for v in s)
        B = int(B)
    except (TypeError, ValueError) as exc:
        raise MalformedInstance('Instance values must be integers: %s' % exc) from exc
    if not s or len(s) % 3:
        raise MalformedInstance('Expected 3k values, got %d.' % len(s))
    k = len(s) // 3
    if any(v <= 0 for v in s) or B <= 0:
        raise MalformedInstance('Instance values must be positive.')
    if sum(s) != k * B:
        raise MalformedInstance('Values sum to %d, expected k*B = %d.' % (sum(s), k * B))
    if require_bounds and not all(B < 4 * v < 2 * B for v in s):
        raise MalformedInstance('Every value must lie strictly between B/4 and B/2.')
    return s, B, k


def gen_3partition_gadget(s, B, with_dummies=False, require_bounds=False):
    """
    Build the gadget grid with its pre- and post-attack angles.

    Without dummies the whole grid is the attacked area. With dummies every core bus
    gets a private pendant bus (X1 for generators, Y1 for loads) that carries the
    injection, and the attacked area is the core X2 + Y2 alone.
    """
    s, B, k = _check_instance(s, B, require_bounds)
    s_arr = np.array(s, dtype=float)
    edges = []

    if not with_dummies:
        x_nodes = tuple(range(1, k + 1))
        y_nodes = tuple(range(k + 1, 4 * k + 1))
        nodes = [Node(x, float(B)) for x in x_nodes] + [Node(y, -float(v)) for y, v in zip(y_nodes, s)]
        for x in x_nodes:
            for y in y_nodes:
                edges.append(Edge(len(edges), x, y, 1.0))
        theta = np.concatenate([np.zeros(k), -s_arr / k])
        theta_post = np.concatenate([np.zeros(k), -s_arr])
        H = frozenset(x_nodes) | frozenset(y_nodes)
        reference = x_nodes[0]
    else:
        x1 = tuple(range(1, k + 1))
        x_nodes = tuple(range(k + 1, 2 * k + 1))
        y_nodes = tuple(range(2 * k + 1, 5 * k + 1))
        y1 = tuple(range(5 * k + 1, 8 * k + 1))
        nodes = ([Node(i, float(B)) for i in x1] + [Node(i, 0.0) for i in x_nodes]
                 + [Node(i, 0.0) for i in y_nodes] + [Node(i, -float(v)) for i, v in zip(y1, s)])
        for a, b in zip(x1, x_nodes):
            edges.append(Edge(len(edges), a, b, 1.0))
        for x in x_nodes:
            for y in y_nodes:
                edges.append(Edge(len(edges), x, y, 1.0))
        for a, b in zip(y_nodes, y1):
            edges.append(Edge(len(edges), a, b, 1.0))
        theta = np.concatenate([np.full(k, float(B)), np.zeros(k), -s_arr / k, -s_arr / k - s_arr])
        theta_post = np.concatenate([np.full(k, float(B)), np.zeros(k), -s_arr, -2 * s_arr])
        H = frozenset(x_nodes) | frozenset(y_nodes)
        reference = x_nodes[0]

    grid = Grid.build(nodes, edges, reference=reference)
    return Gadget(grid, theta, theta_post, H, s, B, x_nodes, y_nodes)


def gadget_observation(gadget, rng, sigma=1.0):
    """Observation whose angles inside the gadget's area are fabricated Gaussian noise."""
    theta_obs = gadget.theta_post.copy()
    inside = gadget.grid.positions(gadget.grid.sorted_nodes(gadget.H))
    theta_obs[inside] = rng.normal(0.0, sigma, size=inside.size)
    p = build_admittance(gadget.grid) @ gadget.theta
    return Observation(gadget.theta.copy(), theta_obs, p)


def search_failure_sets(grid, theta_post, p, candidate_edges=None, limit=None, tol=1e-9):
    """
    All failure sets F (drawn from `candidate_edges`) for which the grid without F
    satisfies its flow law at `theta_post` with injections `p`.

    Lines are decided bus by bus, starting with buses that have the fewest candidate
    lines, and each bus equation is checked as soon as its last candidate line is
    decided. Stops after `limit` solutions when given.
    """
    theta_post = np.asarray(theta_post, dtype=float)
    p = np.asarray(p, dtype=float)
    candidates = set(grid.edge_ids if candidate_edges is None else candidate_edges)

    flow = {e.id: (theta_post[grid.index[e.u]] - theta_post[grid.index[e.v]]) / e.x for e in grid.edges}
    partial = np.zeros(grid.node_count)
    incident = {i: [] for i in grid.node_ids}
    for e in grid.edges:
        if e.id in candidates:
            incident[e.u].append(e.id)
            incident[e.v].append(e.id)
        else:
            partial[grid.index[e.u]] += flow[e.id]
            partial[grid.index[e.v]] -= flow[e.id]

    def balanced_at(i):
        r = grid.index[i]
        return abs(partial[r] - p[r]) <= tol * max(1.0, abs(p[r]))

    if not all(balanced_at(i) for i in grid.node_ids if not incident[i]):
        return []

    order = []
    placed = set()
    for i in sorted((i for i in grid.node_ids if incident[i]), key=lambda i: (len(incident[i]), grid.index[i])):
        for edge_id in incident[i]:
            if edge_id not in placed:
                placed.add(edge_id)
                order.append(edge_id)
    position = {edge_id: t for t, edge_id in enumerate(order)}
    checks = [[] for _ in order]
    for i, lines in incident.items():
        if lines:
            checks[max(position[e] for e in lines)].append(i)
    ends = [(grid.index[grid.edge(e).u], grid.index[grid.edge(e).v], flow[e]) for e in order]

    solutions = []
    failed = []

    def visit(t):
        if limit is not None and len(solutions) >= limit:
            return
        if t == len(order):
            solutions.append(frozenset(failed))
            return
        iu, iv, f = ends[t]
        partial[iu] += f
        partial[iv] -= f
        if all(balanced_at(i) for i in checks[t]):
            visit(t + 1)
        partial[iu] -= f
        partial[iv] += f
        failed.append(order[t])
        if all(balanced_at(i) for i in checks[t]):
            visit(t + 1)
        failed.pop()

    visit(0)
    logger.debug('Failure set search over %d lines found %d solutions', len(order), len(solutions))
    return solutions


def solve_three_partition(s, B):
    """Split the indices of s into len(s)/3 groups with sum B each, or return None."""
    s = [int(v) for v in s]
    if not s or len(s) % 3 or sum(s) != (len(s) // 3) * B:
        return None
    k = len(s) // 3
    order = sorted(range(len(s)), key=lambda i: -s[i])
    loads = [0] * k
    groups = [[] for _ in range(k)]

    def place(t):
        if t == len(order):
            return True
        i = order[t]
        tried = set()
        for g in range(k):
            if loads[g] in tried or loads[g] + s[i] > B:
                continue
            tried.add(loads[g])
            loads[g] += s[i]
            groups[g].append(i)
            if place(t + 1):
                return True
            loads[g] -= s[i]
            groups[g].pop()
        return False

    if not place(0):
        return None
    return [tuple(sorted(g)) for g in groups]
