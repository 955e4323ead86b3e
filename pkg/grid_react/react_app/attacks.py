"""
Ground-truth attack scenarios.

An adversary disconnects lines F inside an area H and then fabricates the phase
angles reported from H, either by adding noise to the true post-attack angles
(distortion) or by replaying angles of a flow-consistent alternative operating
point that agrees with the real injections inside H (replay).
"""
from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .conf import grid_react_settings
from .exceptions import DisconnectsGrid, InvalidScenario
from .grid import PhaseState, as_vector, build_admittance, complement, induced_edges, solve_dc_power_flow

logger = logging.getLogger(__name__)


class AttackKind(str, enum.Enum):
    DISTORTION = 'distortion'
    REPLAY = 'replay'


@dataclass(frozen=True)
class AttackScenario:
    """
    Hidden attacked area `H`, failed lines `F` (subset of the lines inside H) and the
    data-attack type. `param` is the distortion sigma or the replay perturbation
    scale; None selects the configured default.
    """
    H: frozenset
    F: frozenset
    kind: AttackKind
    param: float | None = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data):
        try:
            kind = AttackKind(data['kind'])
            param = data.get('param')
            return cls(
                H=frozenset(int(i) for i in data['H']),
                F=frozenset(int(e) for e in data.get('F', [])),
                kind=kind,
                param=None if param is None else float(param),
                seed=int(data.get('seed', 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidScenario('Malformed scenario document: %s' % exc) from exc

    def to_dict(self):
        return {
            'H': sorted(self.H),
            'F': sorted(self.F),
            'kind': self.kind.value,
            'param': self.param,
            'seed': self.seed,
        }

    def validate(self, grid):
        unknown = self.H - set(grid.node_ids)
        if unknown:
            raise InvalidScenario('Attacked area contains unknown nodes %s.' % sorted(unknown))
        if self.param is not None and not self.param > 0:
            raise InvalidScenario('Attack parameter must be positive, got %r.' % self.param)
        inside = set(induced_edges(grid, self.H))
        outside = self.F - inside
        if outside:
            raise InvalidScenario('Failed lines %s are not inside the attacked area.' % sorted(outside))


@dataclass(frozen=True)
class Observation:
    """What the control center sees: pre-attack angles, observed post-attack angles, injections."""
    theta_pre: np.ndarray
    theta_obs: np.ndarray
    p: np.ndarray

    def to_dict(self, grid):
        return {
            'nodes': list(grid.node_ids),
            'theta': self.theta_pre.tolist(),
            'theta_obs': self.theta_obs.tolist(),
            'p': self.p.tolist(),
        }

    @classmethod
    def from_dict(cls, data, grid):
        try:
            order = [grid.index[int(i)] for i in data['nodes']]
            theta = np.empty(grid.node_count)
            theta_obs = np.empty(grid.node_count)
            theta[order] = np.asarray(data['theta'], dtype=float)
            theta_obs[order] = np.asarray(data['theta_obs'], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidScenario('Malformed observation document: %s' % exc) from exc
        if len(order) != grid.node_count or len(set(order)) != grid.node_count:
            raise InvalidScenario('Observation must list every grid node exactly once.')
        p = build_admittance(grid) @ theta
        return cls(theta, theta_obs, p)


@dataclass(frozen=True)
class GroundTruth:
    theta_post: PhaseState
    grid_post: object
    scenario: AttackScenario

    def to_dict(self, grid):
        return {
            'nodes': list(grid.node_ids),
            'theta_post': self.theta_post.theta.tolist(),
            'failed': sorted(self.scenario.F),
            'scenario': self.scenario.to_dict(),
        }


def apply_line_failures(grid, F):
    """Remove lines F; the remaining grid must stay connected."""
    F = frozenset(F)
    if not F:
        return grid
    if not grid.is_connected(removed=F):
        raise DisconnectsGrid('Removing lines %s disconnects the grid.' % sorted(F))
    return grid.without_edges(F)


def default_sigma(theta):
    scale = float(np.max(np.abs(theta))) if len(theta) else 0.0
    return grid_react_settings.SIGMA_FACTOR * (scale if scale > 0 else 1.0)


def default_perturbation(p_outside):
    scale = float(np.max(np.abs(p_outside))) if len(p_outside) else 0.0
    return grid_react_settings.PERTURBATION_FACTOR * (scale if scale > 0 else 1.0)


def simulate_attack(grid, theta, scenario, rng=None, tol_solve=None):
    """
    Apply `scenario` to the grid operating at `theta`.

    Returns (Observation, GroundTruth). The observation outside H always equals the
    true post-attack angles; inside H it is fabricated according to the attack kind.
    """
    scenario.validate(grid)
    rng = np.random.default_rng(scenario.seed) if rng is None else rng
    theta = as_vector(theta)
    A = build_admittance(grid)
    p = A @ theta

    grid_post = apply_line_failures(grid, scenario.F)
    theta_post = solve_dc_power_flow(grid_post, p, tol_solve=tol_solve)

    inside = grid.positions(grid.sorted_nodes(scenario.H))
    outside = grid.positions(grid.sorted_nodes(complement(grid, scenario.H)))
    theta_obs = theta_post.theta.copy()

    if scenario.kind is AttackKind.DISTORTION:
        sigma = scenario.param if scenario.param is not None else default_sigma(theta)
        theta_obs[inside] += rng.normal(0.0, sigma, size=inside.size)
    else:
        scale = scenario.param if scenario.param is not None else default_perturbation(p[outside])
        perturbation = rng.normal(0.0, scale, size=outside.size)
        if perturbation.size:
            perturbation -= perturbation.mean()
        p_replay = p.copy()
        p_replay[outside] += perturbation
        theta_replay = solve_dc_power_flow(grid, p_replay, tol_solve=tol_solve)
        # replayed angles are only known up to a common shift
        shift = rng.normal(0.0, max(float(np.ptp(theta)), 1.0))
        theta_obs[inside] = theta_replay.theta[inside] + shift

    logger.debug('Simulated %s attack on %d nodes with %d failed lines',
                 scenario.kind.value, len(scenario.H), len(scenario.F))
    return Observation(theta.copy(), theta_obs, p), GroundTruth(theta_post, grid_post, scenario)


def enumerate_failure_sets(grid, H, k, sample_n, rng):
    """
    Failure sets of size k inside H that keep the grid connected.

    All of them when there are at most `sample_n` k-subsets, otherwise up to
    `sample_n` distinct uniform samples.
    """
    if k < 1:
        raise InvalidScenario('Failure set size must be at least 1.')
    edges = induced_edges(grid, H)
    if k > len(edges):
        return []
    total = math.comb(len(edges), k)
    if total <= sample_n:
        return [frozenset(combo) for combo in itertools.combinations(edges, k)
                if grid.is_connected(removed=combo)]

    chosen = []
    seen = set()
    attempts = 0
    budget = 20 * sample_n
    while len(chosen) < sample_n and attempts < budget:
        attempts += 1
        combo = tuple(sorted(int(e) for e in rng.choice(edges, size=k, replace=False)))
        if combo in seen:
            continue
        seen.add(combo)
        if grid.is_connected(removed=combo):
            chosen.append(frozenset(combo))
    if len(chosen) < sample_n:
        logger.warning('Only %d of %d connected failure sets of size %d found', len(chosen), sample_n, k)
    return chosen


def failure_set_count(grid, H, k):
    return math.comb(len(induced_edges(grid, H)), k)


def resolve_attack_param(kind, param, theta, p, H, grid):
    """The attack parameter actually used for a scenario (explicit or default)."""
    if param is not None:
        return param
    if AttackKind(kind) is AttackKind.DISTORTION:
        return default_sigma(as_vector(theta))
    outside = grid.positions(grid.sorted_nodes(complement(grid, H)))
    return default_perturbation(as_vector(p)[outside])

