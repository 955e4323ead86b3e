"""
Line-failure detection and the REACT driver.

`lifd` solves the weighted-L1 failure LP over an area, first with unit weights and
then with i.i.d. exponential weights until the reconstructed injections match the
real ones (the confidence metric) or the iteration budget runs out. `react` walks
the containment candidates in order, refines each, and stops at the first one
whose detection clears the confidence threshold.
"""
from __future__ import annotations

import logging
import math
import numbers
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .atac import candidate_areas, compute_s0, refine_area
from .conf import grid_react_settings, resolve
from .exceptions import EmptyArea, InfeasibleArea, LpFailure, MaxIterations, OutOfRange
from .grid import as_vector, build_admittance, node_support, support, support_threshold
from .lp import build_failure_lp, solve_lp

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightMatrix:
    """Diagonal of the LP weight matrix, one entry per line of the area."""
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise OutOfRange('Weights must be a vector of finite, strictly positive values.')
        object.__setattr__(self, 'w', w)

    @classmethod
    def identity(cls, m):
        return cls(np.ones(m))

    def __len__(self):
        return self.w.size


@dataclass(frozen=True)
class DetectionResult:
    failed: frozenset
    theta: np.ndarray
    confidence: float
    iterations_used: int
    area: frozenset
    area_nodes: tuple = ()
    iteration_log: tuple = ()

    def theta_by_node(self):
        return {int(i): float(v) for i, v in zip(self.area_nodes, self.theta)}

    def to_dict(self):
        return {
            'failed': sorted(self.failed),
            'theta': self.theta_by_node(),
            'confidence': self.confidence,
            'iterations_used': self.iterations_used,
            'area': sorted(self.area),
            'iteration_log': list(self.iteration_log),
        }


@dataclass(frozen=True)
class CandidateTrace:
    rank: int
    origin: str
    interior_size: int
    area_size: int
    feasible: bool
    confidence: float | None = None


@dataclass(frozen=True)
class ReactOutcome:
    detected_area: frozenset
    result: DetectionResult
    success: bool
    trace: tuple = field(default=())

    def to_dict(self):
        return {
            'success': self.success,
            'detected_H': sorted(self.detected_area),
            'result': self.result.to_dict(),
            'trace': [asdict(trace) for trace in self.trace],
        }


def is_confident(value, threshold=None, slack=None):
    threshold = resolve(threshold, 'CONFIDENCE_THRESHOLD')
    slack = resolve(slack, 'CONFIDENCE_SLACK')
    return value >= threshold - slack


def confidence(grid, S, F_dagger, theta_dagger, theta_star, p, A=None, tol_solve=None):
    """
    Percentage agreement between the injections implied by a detection and the real ones.

    The implied injections use the observed angles outside S, `theta_dagger` inside S
    (in grid order of S) and the grid without the lines F_dagger.
    """
    p = as_vector(p)
    A = build_admittance(grid) if A is None else A
    theta_full = as_vector(theta_star).copy()
    inside = grid.positions(grid.sorted_nodes(S))
    if inside.size:
        theta_full[inside] = as_vector(theta_dagger)
    p_dagger = A @ theta_full
    for edge_id in F_dagger:
        e = grid.edge(edge_id)
        iu, iv = grid.index[e.u], grid.index[e.v]
        flow = (theta_full[iu] - theta_full[iv]) / e.x
        p_dagger[iu] -= flow
        p_dagger[iv] += flow

    scale = float(np.linalg.norm(p))
    if scale == 0.0:
        return 100.0 if float(np.linalg.norm(p_dagger)) <= resolve(tol_solve, 'TOL_SOLVE') else 0.0
    return max(0.0, 1.0 - float(np.linalg.norm(p_dagger - p)) / scale) * 100.0


def sample_exp_weights(m, rng, rate=None):
    if m < 1:
        raise OutOfRange('Need at least one weight, got m = %d.' % m)
    rate = resolve(rate, 'WEIGHT_RATE')
    return WeightMatrix(rng.exponential(scale=1.0 / rate, size=m))


def weight_success_fraction(m, k):
    """Exact probability that the k first of m i.i.d. exponentials weigh less than the rest."""
    if not all(isinstance(v, numbers.Integral) for v in (m, k)) or not 1 <= k <= m - 1:
        raise OutOfRange('Need integers 1 <= k <= m - 1, got m = %r, k = %r.' % (m, k))
    m, k = int(m), int(k)
    favourable = sum(math.comb(m - 1, j) for j in range(k, m))
    return Fraction(favourable, 2 ** (m - 1))


def weight_success_probability(m, k):
    return float(weight_success_fraction(m, k))


def expected_lifd_iterations(m, k):
    return float(1 / weight_success_fraction(m, k))


def _solve_area(grid, S, theta, theta_star, p, A, weights, tol_x):
    problem = build_failure_lp(grid, S, theta, theta_star, W=weights, A=A)
    solution = solve_lp(problem.problem)
    if not solution.optimal:
        raise LpFailure('Failure LP is %s.' % solution.status.value, status=solution.status)
    x, y = problem.decode(solution)
    threshold = support_threshold(x, tol_x) if x.size else 0.0
    failed = frozenset(problem.area_edges[i] for i in support(x, threshold))
    value = confidence(grid, S, failed, y, theta_star, p, A=A)
    return failed, y, value, problem.area_nodes, len(problem.area_edges)


def lifd(grid, S, theta, theta_star, T=None, rng=None, p=None, A=None, tol_x=None):
    """
    Detect failed lines inside S.

    Returns the first solution that clears the confidence threshold, otherwise the
    best one seen. Raises LpFailure (with the best result so far as ``partial``)
    when an LP cannot be solved.
    """
    T = resolve(T, 'DEFAULT_T')
    if T < 0:
        raise OutOfRange('Iteration budget T must be non-negative.')
    S = frozenset(S)
    if not S:
        raise EmptyArea('Cannot run detection on an empty area.')
    rng = np.random.default_rng() if rng is None else rng
    A = build_admittance(grid) if A is None else A
    theta = as_vector(theta)
    p = A @ theta if p is None else as_vector(p)

    def attempt(weights, partial):
        try:
            return _solve_area(grid, S, theta, theta_star, p, A, weights, tol_x)
        except LpFailure as exc:
            exc.partial = partial
            raise
        except MaxIterations as exc:
            raise LpFailure(str(exc), partial=partial) from exc

    failed, y, value, nodes, m = attempt(None, None)
    log = [value]
    best = current = (failed, y, value)
    counter = 0
    while not is_confident(current[2]) and counter < T and m > 0:
        counter += 1
        partial = DetectionResult(best[0], best[1], best[2], counter - 1, S, nodes, tuple(log))
        failed, y, value, _, _ = attempt(sample_exp_weights(m, rng), partial)
        current = (failed, y, value)
        log.append(value)
        logger.debug('LIFD iteration %d: confidence %.6f with %d failed lines', counter, value, len(failed))
        if value > best[2]:
            best = current

    chosen = current if is_confident(current[2]) else best
    return DetectionResult(chosen[0], chosen[1], chosen[2], counter, S, nodes, tuple(log))


def react(grid, theta, theta_star, T=None, rng=None, A=None, tol_supp=None):
    """
    Contain, refine and detect.

    Candidates are tried in containment order; the first confident detection wins and
    reports the nodes whose recovered angles differ from the observation as the
    attacked area. Without a confident candidate the best detection is returned with
    its refined area.
    """
    rng = np.random.default_rng() if rng is None else rng
    A = build_admittance(grid) if A is None else A
    theta = as_vector(theta)
    theta_star = as_vector(theta_star)
    p = A @ theta

    s0 = compute_s0(A, p, theta_star, tol_supp, node_ids=grid.node_ids)
    if not s0:
        logger.info('Observation is consistent with the flow law; no attack detected')
        empty = DetectionResult(frozenset(), np.zeros(0), 100.0, 0, frozenset())
        return ReactOutcome(frozenset(), empty, True, ())

    trace = []
    best = None
    best_area = frozenset()
    for candidate in candidate_areas(grid, s0):
        try:
            refined = refine_area(grid, theta, theta_star, candidate, tol_supp=tol_supp, A=A)
        except InfeasibleArea:
            trace.append(CandidateTrace(candidate.rank, candidate.origin.value,
                                        len(candidate.nodes), 0, False))
            continue
        area = refined.nodes
        if not area:
            trace.append(CandidateTrace(candidate.rank, candidate.origin.value,
                                        len(refined.interior), 0, True))
            continue
        try:
            result = lifd(grid, area, theta, theta_star, T=T, rng=rng, p=p, A=A)
        except LpFailure as exc:
            logger.warning('Detection LP failed on candidate %d: %s', candidate.rank, exc)
            result = exc.partial
            if result is None:
                trace.append(CandidateTrace(candidate.rank, candidate.origin.value,
                                            len(refined.interior), len(area), True))
                continue
        trace.append(CandidateTrace(candidate.rank, candidate.origin.value,
                                    len(refined.interior), len(area), True, result.confidence))

        if is_confident(result.confidence):
            inside = grid.positions(result.area_nodes)
            detected = node_support(grid, result.theta - theta_star[inside],
                                    nodes=result.area_nodes, tol_supp=tol_supp)
            logger.info('Candidate %d detected %d failed lines in an area of %d nodes (confidence %.4f)',
                        candidate.rank, len(result.failed), len(detected), result.confidence)
            return ReactOutcome(detected, result, True, tuple(trace))
        if best is None or result.confidence > best.confidence:
            best, best_area = result, area

    if best is None:
        logger.info('No candidate area admitted a detection')
        return ReactOutcome(s0, DetectionResult(frozenset(), np.zeros(0), 0.0, 0, frozenset()),
                            False, tuple(trace))
    logger.info('Best detection reached confidence %.4f below the threshold %.4f',
                best.confidence, grid_react_settings.CONFIDENCE_THRESHOLD)
    return ReactOutcome(best_area, best, False, tuple(trace))
