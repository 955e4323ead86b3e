"""
Attacked-area containment.

The nodes whose flow equations the observation violates (S0) either surround the
attacked area (distortion) or mark its border from both sides (replay). The
candidate list therefore starts with S0 itself, followed by one candidate per
group of untouched components, obtained by dropping that group from the grid.
Every candidate is then shrunk by solving the outside-consistency system

    A[out, in] y = A[out, out] (theta - theta*)[out] + A[out, in] theta[in]

over its interior; the nodes where the solution departs from the observation
form the refined area.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
import scipy.linalg

from .conf import resolve
from .exceptions import InfeasibleArea
from .grid import (
    as_vector, boundary, build_admittance, complement, connected_components, cross_adjacency,
    has_covering_matching, interior, neighbors, node_support, support_threshold,
)

logger = logging.getLogger(__name__)


class CandidateOrigin(str, enum.Enum):
    DISTORTION = 'distortion'
    REPLAY = 'replay'


@dataclass(frozen=True)
class CandidateArea:
    nodes: frozenset
    origin: CandidateOrigin
    rank: int
    excluded: frozenset = frozenset()
    excluded_component_index: int | None = None


@dataclass(frozen=True)
class RefinedArea:
    """S_b (``nodes``) inside S_a (``interior``) inside the candidate."""
    candidate: CandidateArea
    interior: frozenset
    nodes: frozenset
    y: np.ndarray
    residual: float = 0.0


def compute_s0(A, p, theta_star, tol_supp=None, node_ids=None):
    """Nodes where A theta* differs from p; positions unless `node_ids` maps them to ids."""
    mismatch = np.asarray(A) @ as_vector(theta_star) - as_vector(p)
    ids = list(range(mismatch.size)) if node_ids is None else list(node_ids)
    positions = np.flatnonzero(np.abs(mismatch) > support_threshold(mismatch, tol_supp))
    return frozenset(ids[i] for i in positions)


def merge_components(grid, components):
    """Join components that share a neighbor, to a fixpoint. Groups are sorted by size, largest first."""
    components = list(components)
    if not components:
        return []
    touching = nx.Graph()
    touching.add_nodes_from(range(len(components)))
    reach = [neighbors(grid, c) for c in components]
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            if reach[i] & reach[j]:
                touching.add_edge(i, j)
    groups = [frozenset().union(*(components[i] for i in g)) for g in nx.connected_components(touching)]
    return sorted(groups, key=lambda g: (-len(g), min(g)))


def candidate_areas(grid, s0):
    """S0 first, then the grid minus each merged component group of G - S0."""
    s0 = frozenset(s0)
    candidates = [CandidateArea(s0, CandidateOrigin.DISTORTION, 0)]
    if not s0:
        return candidates
    groups = merge_components(grid, connected_components(grid, complement(grid, s0)))
    for index, group in enumerate(groups):
        candidates.append(CandidateArea(
            complement(grid, group), CandidateOrigin.REPLAY, index + 1, group, index))
    logger.debug('Containment produced %d candidates from |S0| = %d', len(candidates), len(s0))
    return candidates


def refine_area(grid, theta, theta_star, candidate, tol_supp=None, tol_feas=None, A=None):
    """
    Shrink `candidate` to the nodes whose angles cannot be explained from outside.

    Raises InfeasibleArea when the outside-consistency system has no solution, which
    signals that the candidate does not contain the attacked area.
    """
    tol_feas = resolve(tol_feas, 'TOL_FEAS')
    nodes = candidate.nodes if isinstance(candidate, CandidateArea) else frozenset(candidate)
    if not isinstance(candidate, CandidateArea):
        candidate = CandidateArea(nodes, CandidateOrigin.DISTORTION, 0)
    theta = as_vector(theta)
    theta_star = as_vector(theta_star)

    S_a = interior(grid, nodes)
    inside_ids = grid.sorted_nodes(S_a)
    inside = grid.positions(inside_ids)
    if not S_a:
        return RefinedArea(candidate, S_a, frozenset(), np.zeros(0))

    outside_ids = grid.sorted_nodes(complement(grid, S_a))
    if not outside_ids:
        return RefinedArea(candidate, S_a, S_a, theta_star[inside].copy())

    A = build_admittance(grid) if A is None else A
    outside = grid.positions(outside_ids)
    M = A[np.ix_(outside, inside)]
    rhs = A[np.ix_(outside, outside)] @ (theta[outside] - theta_star[outside]) + M @ theta[inside]
    y = scipy.linalg.lstsq(M, rhs)[0]
    residual = float(np.linalg.norm(M @ y - rhs))
    limit = tol_feas * (1.0 + float(np.linalg.norm(rhs)))
    logger.debug('Candidate %d: |S_a| = %d, residual %.3e (limit %.3e)',
                 candidate.rank, len(S_a), residual, limit)
    if residual > limit:
        raise InfeasibleArea('Candidate %d cannot contain the attacked area (residual %.3e).'
                             % (candidate.rank, residual), residual=residual)

    S_b = node_support(grid, y - theta_star[inside], nodes=inside_ids, tol_supp=tol_supp)
    return RefinedArea(candidate, S_a, S_b, y, residual)


def approximation_levels(grid, theta, theta_star, candidate, tol_supp=None, tol_feas=None, A=None):
    """(candidate, S_a, S_b): the three nested approximations of the attacked area."""
    refined = refine_area(grid, theta, theta_star, candidate, tol_supp, tol_feas, A)
    return refined.candidate.nodes, refined.interior, refined.nodes


def check_exactness_conditions(grid, S, H):
    """
    True when refinement of S is guaranteed to return H exactly: every node of S
    outside H lies on the boundary of S, and the outside of S can be matched onto
    that boundary.
    """
    S = frozenset(S)
    H = frozenset(H)
    if not H <= S:
        return False
    edge = boundary(grid, S)
    if not (S - H) <= edge:
        return False
    outside = complement(grid, S)
    return has_covering_matching(outside, edge, cross_adjacency(grid, outside, edge))


def outside_consistency_residual(grid, theta, theta_post, S, A=None):
    """max over nodes outside S of |A_i (theta - theta')|."""
    outside = grid.positions(grid.sorted_nodes(complement(grid, S)))
    if outside.size == 0:
        return 0.0
    A = build_admittance(grid) if A is None else A
    return float(np.max(np.abs(A[outside] @ (as_vector(theta) - as_vector(theta_post)))))
