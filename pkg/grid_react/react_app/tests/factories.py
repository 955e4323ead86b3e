from pathlib import Path

import numpy as np

from react_app.attacks import Observation
from react_app.grid import Edge, Grid, Node, build_admittance
from react_app.io import load_grid

FIXTURES = Path(__file__).resolve().parents[2] / 'fixtures'


def path_grid(p, x=1.0, reference=None):
    """Path 1-2-...-n with unit (or given) reactances; line i joins i+1 and i+2."""
    n = len(p)
    nodes = [Node(i + 1, float(v)) for i, v in enumerate(p)]
    edges = [Edge(i, i + 1, i + 2, x) for i in range(n - 1)]
    return Grid.build(nodes, edges, reference=reference)


def cycle_grid(p, x=1.0, reference=None):
    n = len(p)
    nodes = [Node(i + 1, float(v)) for i, v in enumerate(p)]
    edges = [Edge(i, i + 1, (i + 1) % n + 1, x) for i in range(n)]
    return Grid.build(nodes, edges, reference=reference)


def random_tree(n, rng):
    """Tree where node i > 0 hangs off a lower node; returns (grid, parent list)."""
    parent = [None] + [int(rng.integers(i)) for i in range(1, n)]
    p = rng.normal(size=n)
    p -= p.mean()
    nodes = [Node(i, float(p[i])) for i in range(n)]
    edges = [Edge(i - 1, parent[i], i, float(rng.uniform(0.5, 2.0))) for i in range(1, n)]
    return Grid.build(nodes, edges, reference=0), parent


def small_grid():
    return load_grid(FIXTURES / 'small_grid.json')


def balanced(n, rng):
    p = rng.normal(size=n)
    return p - p.mean()


def null_observation(grid, theta):
    theta = np.asarray(theta, dtype=float)
    return Observation(theta.copy(), theta.copy(), build_admittance(grid) @ theta)
