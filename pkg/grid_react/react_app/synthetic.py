"""
Synthetic transmission-style test grids and attacked areas.
"""
from __future__ import annotations

import itertools
import logging

import networkx as nx
import numpy as np

from .exceptions import OutOfRange
from .grid import Edge, Grid, Node, induced_edges

logger = logging.getLogger(__name__)


def synthetic_grid(n_nodes, seed=0, mean_degree=2.6, generator_share=0.2):
    """
    Meshed planar-ish grid: a minimum spanning tree over random bus locations plus
    short chords up to the requested mean degree. Reactances grow with line length,
    about a fifth of the buses generate and the rest consume.
    """
    if n_nodes < 2:
        raise OutOfRange('A synthetic grid needs at least two buses.')
    rng = np.random.default_rng(seed)
    xy = rng.random((n_nodes, 2))
    distance = np.linalg.norm(xy[:, None, :] - xy[None, :, :], axis=-1)

    complete = nx.Graph()
    complete.add_weighted_edges_from(
        (i, j, distance[i, j]) for i, j in itertools.combinations(range(n_nodes), 2))
    tree = nx.minimum_spanning_tree(complete)
    lines = {tuple(sorted(e)) for e in tree.edges()}

    target = max(len(lines), int(round(mean_degree * n_nodes / 2)))
    nearest = np.argsort(distance, axis=1)[:, 1:5]
    chords = sorted({tuple(sorted((i, int(j)))) for i in range(n_nodes) for j in nearest[i]} - lines)
    rng.shuffle(chords)
    for chord in chords[:target - len(lines)]:
        lines.add(chord)

    edges = []
    span = float(distance.max()) or 1.0
    for u, v in sorted(lines):
        x = 0.02 + 0.28 * distance[u, v] / span * rng.uniform(0.5, 1.0)
        edges.append(Edge(len(edges), u, v, float(x)))

    n_gen = max(1, int(round(generator_share * n_nodes)))
    generators = rng.choice(n_nodes, size=n_gen, replace=False)
    p = -rng.uniform(0.1, 1.0, size=n_nodes)
    p[generators] = 0.0
    p[generators] = -p.sum() * rng.dirichlet(np.ones(n_gen))
    reference = int(generators[0])
    p[reference] -= p.sum()

    logger.debug('Synthetic grid: %d buses, %d lines, seed %d', n_nodes, len(edges), seed)
    return Grid.build([Node(i, float(v)) for i, v in enumerate(p)], edges, reference=reference)


def grow_area(grid, n_nodes, rng, n_edges=None, attempts=1000):
    """
    Random connected node set of size `n_nodes`; with `n_edges` it must induce exactly
    that many lines. Raises OutOfRange when no such set turns up.
    """
    if not 1 <= n_nodes <= grid.node_count:
        raise OutOfRange('Area size must be between 1 and %d.' % grid.node_count)
    for _ in range(attempts):
        start = grid.node_ids[int(rng.integers(grid.node_count))]
        area = {start}
        count = 0
        while len(area) < n_nodes:
            frontier = sorted(set().union(*(grid.adjacency[i] for i in area)) - area)
            if not frontier:
                break
            gains = [sum(1 for e in grid.edges if (e.u == j and e.v in area) or (e.v == j and e.u in area))
                     for j in frontier]
            remaining = n_nodes - len(area) - 1
            if n_edges is not None:
                options = [j for j, g in zip(frontier, gains) if count + g + remaining <= n_edges]
                if not options:
                    break
                # close cycles while lines beyond a spanning tree are still owed
                closing = [j for j in options if gains[frontier.index(j)] > 1]
                if closing and n_edges - count - 1 - remaining > 0:
                    options = closing
            else:
                options = frontier
            pick = options[int(rng.integers(len(options)))]
            count += gains[frontier.index(pick)]
            area.add(pick)
        if len(area) == n_nodes and (n_edges is None or len(induced_edges(grid, area)) == n_edges):
            return frozenset(area)
    raise OutOfRange('No connected area with %d nodes%s found.' % (
        n_nodes, '' if n_edges is None else ' and %d lines' % n_edges))


def synthetic_area(grid, n_nodes, n_edges, rng):
    return grow_area(grid, n_nodes, rng, n_edges=n_edges)
