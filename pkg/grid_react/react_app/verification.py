"""
Randomized property suites behind the `verify` command.

Each suite draws its instances from a seeded generator, checks one structural
property of the toolkit on every instance, and reports the violations it saw.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .atac import (
    CandidateArea, CandidateOrigin, candidate_areas, check_exactness_conditions, compute_s0,
    outside_consistency_residual, refine_area,
)
from .attacks import AttackKind, AttackScenario, simulate_attack
from .detection import (
    expected_lifd_iterations, is_confident, lifd, react, weight_success_probability,
)
from .exceptions import InfeasibleArea, OutOfRange
from .gadgets import gen_3partition_gadget, search_failure_sets, solve_three_partition
from .grid import (
    Edge, Grid, Node, boundary, build_admittance, closure, complement, incidence_matrix,
    induced_edges, interior, line_flows, solve_dc_power_flow,
)
from .synthetic import grow_area, synthetic_grid

logger = logging.getLogger(__name__)

SUITES = ('flow', 'distortion', 'replay', 'exactness', 'lemma16', 'cycle', 'gadget')

# 3-partition instances with B = 30 and every value strictly between B/4 and B/2
# that admit no partition: a 14 needs two 8s, a 13 needs an 8 and a 9.
NO_INSTANCES = (
    ((14, 14, 8, 8, 8, 9, 9, 10, 10), 30),
    ((14, 8, 9, 9, 9, 10, 10, 10, 11), 30),
    ((13, 9, 10, 10, 10, 10, 10, 9, 9), 30),
)


@dataclass
class SuiteReport:
    name: str
    trials: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def fail(self, message):
        self.violations.append(message)
        logger.warning('%s: %s', self.name, message)

    def to_dict(self):
        return {'suite': self.name, 'trials': self.trials, 'skipped': self.skipped,
                'passed': self.passed, 'violations': list(self.violations)}


def random_connected_failures(grid, H, size, rng):
    """Up to `size` lines inside H whose joint removal keeps the grid connected."""
    lines = list(induced_edges(grid, H))
    rng.shuffle(lines)
    chosen = []
    for edge_id in lines:
        if len(chosen) == size:
            break
        if grid.is_connected(removed=chosen + [edge_id]):
            chosen.append(edge_id)
    return frozenset(chosen)


def _balanced_injections(n, rng):
    p = rng.normal(0.0, 1.0, size=n)
    return p - p.mean()


def planted_instance(n_area, rng, chords=1):
    """
    Grid where the refinement of closure(H) provably returns H: every area node
    has a private outside partner, each partner a private far node, and the far
    nodes form a ring.

    Returns (grid, H); H is the node range [0, n_area).
    """
    nodes = range(3 * n_area)
    edges = []
    for i in range(1, n_area):
        edges.append((int(rng.integers(i)), i))
    for _ in range(chords):
        u, v = sorted(rng.choice(n_area, size=2, replace=False).tolist())
        if (u, v) not in edges:
            edges.append((u, v))
    for i in range(n_area):
        edges.append((i, n_area + i))
        edges.append((n_area + i, 2 * n_area + i))
    for i in range(n_area):
        edges.append((2 * n_area + i, 2 * n_area + (i + 1) % n_area))
    edges = sorted({tuple(sorted(e)) for e in edges if e[0] != e[1]})
    p = _balanced_injections(len(nodes), rng)
    grid = Grid.build(
        [Node(i, float(p[i])) for i in nodes],
        [Edge(k, u, v, float(rng.uniform(0.5, 1.5))) for k, (u, v) in enumerate(edges)],
        reference=2 * n_area,
    )
    return grid, frozenset(range(n_area))


def cycle_instance(m, rng):
    """
    m-cycle area (nodes 0..m-1, lines 0..m-1) with one outside partner per node and
    the partners joined in a ring, so any set of cycle lines can fail without
    disconnecting the grid.
    """
    edges = [(i, (i + 1) % m) for i in range(m)]
    edges += [(i, m + i) for i in range(m)]
    edges += [(m + i, m + (i + 1) % m) for i in range(m)]
    p = _balanced_injections(2 * m, rng)
    grid = Grid.build(
        [Node(i, float(p[i])) for i in range(2 * m)],
        [Edge(k, u, v, float(rng.uniform(0.5, 1.5))) for k, (u, v) in enumerate(edges)],
        reference=m,
    )
    return grid, frozenset(range(m))


def verify_flow(trials, rng, tol=1e-8):
    report = SuiteReport('flow')
    for _ in range(trials):
        n = int(rng.integers(5, 61))
        grid = synthetic_grid(n, seed=int(rng.integers(2 ** 31)))
        state = solve_dc_power_flow(grid)
        report.trials += 1
        if state.residual >= tol:
            report.fail('residual %.3e on a %d-bus grid' % (state.residual, n))
        conservation = incidence_matrix(grid) @ line_flows(grid, state) - grid.injections
        if np.max(np.abs(conservation)) >= tol:
            report.fail('flow conservation off by %.3e on a %d-bus grid' % (np.max(np.abs(conservation)), n))
    return report


def _random_scenario(rng, kind, grid_nodes=36):
    grid = synthetic_grid(grid_nodes, seed=int(rng.integers(2 ** 31)))
    H = grow_area(grid, int(rng.integers(3, 9)), rng)
    F = random_connected_failures(grid, H, int(rng.integers(0, 3)), rng)
    scenario = AttackScenario(H, F, kind, None, int(rng.integers(2 ** 31)))
    theta = solve_dc_power_flow(grid)
    observation, truth = simulate_attack(grid, theta, scenario)
    return grid, H, observation, truth


def verify_distortion(trials, rng):
    report = SuiteReport('distortion')
    for _ in range(trials):
        grid, H, observation, _ = _random_scenario(rng, AttackKind.DISTORTION)
        A = build_admittance(grid)
        s0 = compute_s0(A, observation.p, observation.theta_obs, node_ids=grid.node_ids)
        report.trials += 1
        expected = complement(grid, interior(grid, complement(grid, H)))
        if s0 != expected:
            report.fail('S0 %s differs from the complement of int(outside) %s'
                        % (sorted(s0), sorted(expected)))
        elif not H <= candidate_areas(grid, s0)[0].nodes:
            report.fail('first candidate misses part of H %s' % sorted(H))
    return report


def verify_replay(trials, rng):
    report = SuiteReport('replay')
    for _ in range(trials):
        grid, H, observation, _ = _random_scenario(rng, AttackKind.REPLAY)
        outside = complement(grid, H)
        if not interior(grid, outside):
            report.skipped += 1
            continue
        A = build_admittance(grid)
        s0 = compute_s0(A, observation.p, observation.theta_obs, node_ids=grid.node_ids)
        report.trials += 1
        expected = boundary(grid, H) | boundary(grid, outside)
        if s0 != expected:
            report.fail('S0 %s differs from the two-sided border %s' % (sorted(s0), sorted(expected)))
        elif not any(H <= candidate.nodes for candidate in candidate_areas(grid, s0)):
            report.fail('no candidate contains H %s' % sorted(H))
    return report


def verify_exactness(trials, rng):
    report = SuiteReport('exactness')
    for _ in range(trials):
        grid, H = planted_instance(int(rng.integers(3, 9)), rng)
        F = random_connected_failures(grid, H, 1, rng)
        scenario = AttackScenario(H, F, AttackKind.DISTORTION, None, int(rng.integers(2 ** 31)))
        observation, truth = simulate_attack(grid, solve_dc_power_flow(grid), scenario)
        candidate = CandidateArea(closure(grid, H), CandidateOrigin.DISTORTION, 0)
        report.trials += 1
        if not check_exactness_conditions(grid, candidate.nodes, H):
            report.fail('planted area %s misses the exactness conditions' % sorted(H))
            continue
        residual = outside_consistency_residual(grid, observation.theta_pre, truth.theta_post, candidate.nodes)
        if residual > 1e-8 * max(1.0, float(np.max(np.abs(grid.injections)))):
            report.fail('outside residual %.3g on planted area %s' % (residual, sorted(H)))
        try:
            refined = refine_area(grid, observation.theta_pre, observation.theta_obs, candidate)
        except InfeasibleArea as exc:
            report.fail('planted area rejected: %s' % exc)
            continue
        if refined.nodes != H:
            report.fail('refined area %s differs from H %s' % (sorted(refined.nodes), sorted(H)))
    return report


def monte_carlo_weight_frequency(m, k, trials, rng):
    w = rng.exponential(size=(trials, m))
    head = w[:, :k].sum(axis=1)
    return float(np.mean(head < w.sum(axis=1) - head))


def verify_lemma16(trials, rng, m_values=range(2, 13), sigmas=3.0):
    """Monte-Carlo frequency of light failure weights against the closed form, every k < m."""
    report = SuiteReport('lemma16')
    for m in m_values:
        w = rng.exponential(size=(trials, m))
        prefix = np.cumsum(w, axis=1)
        total = prefix[:, -1]
        for k in range(1, m):
            expected = weight_success_probability(m, k)
            observed = float(np.mean(prefix[:, k - 1] < total - prefix[:, k - 1]))
            spread = sigmas * np.sqrt(expected * (1.0 - expected) / trials)
            report.trials += 1
            if abs(observed - expected) > spread:
                report.fail('m=%d k=%d: frequency %.5f vs closed form %.5f (allowed %.5f)'
                            % (m, k, observed, expected, spread))
    return report


def verify_cycle(trials, rng, m=8, T=100, randomized_trials=None):
    """
    `trials` failures of fewer than half the cycle lines solved with unit weights, then
    `randomized_trials` (default twice as many) heavier ones solved by LIFD.
    """
    report = SuiteReport('cycle')
    light = (m - 1) // 2
    heavy = m - 3
    randomized_trials = 2 * trials if randomized_trials is None else randomized_trials
    iterations = []
    for k in [light] * trials + [heavy] * randomized_trials:
        grid, H = cycle_instance(m, rng)
        F = frozenset(rng.choice(m, size=k, replace=False).tolist())
        scenario = AttackScenario(H, F, AttackKind.DISTORTION, None, int(rng.integers(2 ** 31)))
        observation, _ = simulate_attack(grid, solve_dc_power_flow(grid), scenario)
        report.trials += 1
        if k == light:
            result = lifd(grid, H, observation.theta_pre, observation.theta_obs, T=0, rng=rng)
            if result.failed != F:
                report.fail('unit weights found %s instead of %s' % (sorted(result.failed), sorted(F)))
        else:
            result = lifd(grid, H, observation.theta_pre, observation.theta_obs, T=T, rng=rng)
            if not is_confident(result.confidence) or result.failed != F:
                report.fail('random weights missed %s within %d iterations' % (sorted(F), T))
            iterations.append(result.iterations_used)
    if iterations:
        bound = 2.0 * expected_lifd_iterations(m, heavy)
        mean = float(np.mean(iterations))
        if mean > bound:
            report.fail('mean LIFD iterations %.2f above %.2f' % (mean, bound))
    return report


def random_yes_instance(rng, k=3, B=30):
    values = []
    while len(values) < 3 * k:
        a, b = (int(v) for v in rng.integers(B // 4 + 1, (B + 1) // 2, size=2))
        c = B - a - b
        if B < 4 * c < 2 * B:
            values.extend((a, b, c))
    rng.shuffle(values)
    return tuple(values), B


def random_no_instance(rng, k=3, B=30, attempts=20000):
    low, high = B // 4 + 1, (B + 1) // 2
    for _ in range(attempts):
        values = [int(v) for v in rng.integers(low, high, size=3 * k - 1)]
        last = k * B - sum(values)
        if low <= last < high and solve_three_partition(values + [last], B) is None:
            return tuple(values + [last]), B
    raise OutOfRange('No unpartitionable instance found.')


def verify_gadget(trials, rng):
    report = SuiteReport('gadget')
    yes = [random_yes_instance(rng) for _ in range(trials)]
    no = list(NO_INSTANCES[:trials])
    while len(no) < trials:
        no.append(random_no_instance(rng))

    for s, B in yes:
        gadget = gen_3partition_gadget(s, B, require_bounds=True)
        p = gadget.grid.injections
        report.trials += 1
        partition = solve_three_partition(s, B)
        if partition is None:
            report.fail('partitionable instance %s reported unsolvable' % (s,))
            continue
        planted = gadget.failure_set_for(partition)
        A_post = build_admittance(gadget.grid.without_edges(planted))
        if np.max(np.abs(A_post @ gadget.theta_post - p)) > 1e-9:
            report.fail('partition of %s does not give a consistent failure set' % (s,))
        if not search_failure_sets(gadget.grid, gadget.theta_post, p, limit=1):
            report.fail('search found no failure set for YES instance %s' % (s,))
        outcome = react(gadget.grid, gadget.theta, gadget.theta_post, T=0, rng=rng)
        if not is_confident(outcome.result.confidence):
            report.fail('REACT confidence %.4f on YES instance %s' % (outcome.result.confidence, s))

    for s, B in no:
        gadget = gen_3partition_gadget(s, B, require_bounds=True)
        report.trials += 1
        found = search_failure_sets(gadget.grid, gadget.theta_post, gadget.grid.injections, limit=1)
        if found:
            report.fail('NO instance %s admits failure set %s' % (s, sorted(found[0])))
    return report


def run_suites(names, trials=None, seed=0, m=None, sigmas=3.0):
    """Run the named suites with per-suite generators derived from `seed`."""
    defaults = {'flow': 50, 'distortion': 200, 'replay': 200, 'exactness': 100,
                'lemma16': 100000, 'cycle': 50, 'gadget': 10}
    randomized_cycle_trials = 100 if trials is None else trials
    reports = []
    for index, name in enumerate(names):
        rng = np.random.default_rng([seed, index])
        count = defaults[name] if trials is None else trials
        if name == 'lemma16':
            m_values = range(2, 13) if m is None else [m]
            report = verify_lemma16(count, rng, m_values=m_values, sigmas=sigmas)
        elif name == 'cycle':
            report = verify_cycle(count, rng, randomized_trials=randomized_cycle_trials)
        else:
            report = {
                'flow': verify_flow, 'distortion': verify_distortion, 'replay': verify_replay,
                'exactness': verify_exactness, 'gadget': verify_gadget,
            }[name](count, rng)
        logger.info('Suite %s: %d trials, %d skipped, %d violations',
                    name, report.trials, report.skipped, len(report.violations))
        reports.append(report)
    return reports
