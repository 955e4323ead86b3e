"""
Dense linear programming and the failure-detection LP.

`solve_lp` minimises c.x subject to E x = b with each variable either
non-negative or free. It runs a two-phase revised simplex: phase 1 over
artificial variables certifies feasibility, phase 2 optimises the real
objective. Pricing is Dantzig's rule until a run of degenerate pivots is
detected, after which Bland's rule takes over for the rest of the phase.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .conf import resolve
from .exceptions import EmptyArea, MaxIterations, OutOfRange
from .grid import as_vector, build_admittance, complement, incidence_matrix, induced_edges

logger = logging.getLogger(__name__)


class LpStatus(str, enum.Enum):
    OPTIMAL = 'optimal'
    INFEASIBLE = 'infeasible'
    UNBOUNDED = 'unbounded'


@dataclass(frozen=True)
class LpProblem:
    """min c.x  s.t.  E x = b,  x_j >= lower_j  with lower_j in {0, -inf}."""
    c: np.ndarray
    E: np.ndarray
    b: np.ndarray
    lower: np.ndarray

    def __post_init__(self):
        m, n = self.E.shape
        if self.c.shape != (n,) or self.b.shape != (m,) or self.lower.shape != (n,):
            raise OutOfRange('LP dimensions are inconsistent: c%s E%s b%s lower%s' % (
                self.c.shape, self.E.shape, self.b.shape, self.lower.shape))
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.E)) and np.all(np.isfinite(self.b))):
            raise OutOfRange('LP data must be finite.')
        if not np.all((self.lower == 0) | np.isneginf(self.lower)):
            raise OutOfRange('Variable lower bounds must be 0 or -inf.')

    @classmethod
    def nonnegative(cls, c, E, b):
        c = np.asarray(c, dtype=float)
        return cls(c, np.atleast_2d(np.asarray(E, dtype=float)), np.asarray(b, dtype=float), np.zeros(c.size))


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray | None
    objective: float
    status: LpStatus
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def solve_lp(problem, tol_lp=None, max_iterations=None, stall_iterations=None):
    """
    Solve `problem` to optimality or certify it infeasible or unbounded.

    Free variables are split into differences of non-negative ones. Raises
    MaxIterations when the pivot budget runs out.
    """
    tol = resolve(tol_lp, 'TOL_LP')
    max_iterations = resolve(max_iterations, 'LP_MAX_ITERATIONS')
    stall_iterations = resolve(stall_iterations, 'LP_STALL_ITERATIONS')

    free = np.isneginf(problem.lower)
    E = np.hstack([problem.E, -problem.E[:, free]])
    c = np.concatenate([problem.c, -problem.c[free]])
    n = problem.c.size

    status, z, iterations = _two_phase(c, E, problem.b, tol, max_iterations, stall_iterations)
    if status is not LpStatus.OPTIMAL:
        logger.debug('LP %s after %d pivots', status.value, iterations)
        return LpSolution(None, np.nan, status, iterations)

    x = z[:n].copy()
    x[free] -= z[n:]
    return LpSolution(x, float(problem.c @ x), status, iterations)


def _two_phase(c, E, b, tol, max_iterations, stall_iterations):
    m, n = E.shape
    if m == 0:
        if np.any(c < -tol):
            return LpStatus.UNBOUNDED, None, 0
        return LpStatus.OPTIMAL, np.zeros(n), 0

    sign = np.where(b < 0, -1.0, 1.0)
    E = E * sign[:, None]
    b = b * sign

    # Phase 1: artificial basis.
    E1 = np.hstack([E, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    status, basis, z1, it1 = _revised_simplex(c1, E1, b, basis, tol, max_iterations, stall_iterations)
    infeasibility = float(c1 @ z1)
    if infeasibility > tol * max(1.0, float(np.max(np.abs(b)))):
        return LpStatus.INFEASIBLE, None, it1

    basis, keep = _drive_out_artificials(E1, basis, n, tol)
    E2 = E[keep]
    b2 = b[keep]
    if not keep.any():
        if np.any(c < -tol):
            return LpStatus.UNBOUNDED, None, it1
        return LpStatus.OPTIMAL, np.zeros(n), it1

    # Phase 2 on the original columns.
    status, basis, z2, it2 = _revised_simplex(
        c, E2, b2, basis, tol, max_iterations - it1, stall_iterations)
    return status, z2, it1 + it2


def _drive_out_artificials(E1, basis, n, tol):
    """Pivot zero-level artificials out of the basis; rows where that is impossible are redundant."""
    m = E1.shape[0]
    basis = list(basis)
    redundant = []
    for r in range(m):
        if basis[r] < n:
            continue
        lu = scipy.linalg.lu_factor(E1[:, basis])
        row = scipy.linalg.lu_solve(lu, np.eye(m)[r], trans=1) @ E1[:, :n]
        row[[j for j in basis if j < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > tol:
            basis[r] = j
        else:
            redundant.append(r)
    keep = np.ones(m, dtype=bool)
    keep[redundant] = False
    return [basis[r] for r in range(m) if keep[r]], keep


def _revised_simplex(c, E, b, basis, tol, max_iterations, stall_iterations):
    m, n = E.shape
    basis = list(basis)
    bland = False
    degenerate_run = 0
    for iteration in range(max(0, max_iterations)):
        lu = scipy.linalg.lu_factor(E[:, basis])
        xB = np.maximum(scipy.linalg.lu_solve(lu, b), 0.0)
        y = scipy.linalg.lu_solve(lu, c[basis], trans=1)
        reduced = c - E.T @ y
        reduced[basis] = 0.0

        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            z = np.zeros(n)
            z[basis] = xB
            return LpStatus.OPTIMAL, basis, z, iteration
        j = int(entering[0]) if bland else int(entering[np.argmin(reduced[entering])])

        u = scipy.linalg.lu_solve(lu, E[:, j])
        eligible = u > tol
        if not eligible.any():
            return LpStatus.UNBOUNDED, basis, None, iteration

        ratios = np.full(m, np.inf)
        ratios[eligible] = xB[eligible] / u[eligible]
        step = ratios.min()
        ties = np.flatnonzero(ratios <= step + tol)
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        basis[r] = j

        if step <= tol:
            degenerate_run += 1
            if not bland and degenerate_run >= stall_iterations:
                logger.debug('Simplex stalled after %d degenerate pivots; switching to Bland', degenerate_run)
                bland = True
        else:
            degenerate_run = 0

    raise MaxIterations('Simplex did not terminate within %d pivots.' % max_iterations)


@dataclass(frozen=True)
class FailureLp:
    """
    The weighted-L1 detection LP for an area S together with its decoder.

    Variables are [x+ (|E_S|), x- (|E_S|), u (|V_S|, free)] with u = theta_S - y.
    """
    problem: LpProblem
    area_nodes: tuple
    area_edges: tuple
    theta_area: np.ndarray

    def decode(self, solution, tol_lp=None):
        """Return (x over area_edges, y over area_nodes) from an optimal LP solution."""
        tol = resolve(tol_lp, 'TOL_LP')
        m = len(self.area_edges)
        z = solution.x
        x_pos, x_neg, u = z[:m], z[m:2 * m], z[2 * m:]
        overlap = np.minimum(x_pos, x_neg)
        if overlap.size and overlap.max() > tol:
            logger.warning('Split failure variables both active (max %.3e)', overlap.max())
        return x_pos - x_neg, self.theta_area - u

    def objective(self, x):
        m = len(self.area_edges)
        return float(self.problem.c[:m] @ np.abs(x))


def build_failure_lp(grid, S, theta, theta_star, W=None, A=None, tol_lp=None):
    """
    Weighted-L1 failure detection over the area S.

        min ||W x||_1  s.t.  A_SS (theta_S - y) + A_S,S' (theta_S' - theta*_S') = D_S x
                             A_S',S (theta_S - y) + A_S',S' (theta_S' - theta*_S') = 0

    where S' is the complement of S. Only the entries of `theta_star` outside S are
    read. Rows of the second block that involve no unknown and hold (numerically)
    zero are dropped.
    """
    tol = resolve(tol_lp, 'TOL_LP')
    nodes = tuple(grid.sorted_nodes(S))
    edges = tuple(induced_edges(grid, S))
    if not nodes and not edges:
        raise EmptyArea()

    m = len(edges)
    if W is None:
        w = np.ones(m)
    else:
        w = as_vector(getattr(W, 'w', W))
        if w.shape != (m,):
            raise OutOfRange('Expected %d weights, got %d.' % (m, w.size))
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise OutOfRange('Weights must be finite and strictly positive.')

    A = build_admittance(grid) if A is None else A
    theta = as_vector(theta)
    theta_star = as_vector(theta_star)
    inside = grid.positions(nodes)
    outside_ids = grid.sorted_nodes(complement(grid, S))
    outside = grid.positions(outside_ids)

    delta_out = theta[outside] - theta_star[outside]
    A_SS = A[np.ix_(inside, inside)]
    A_SO = A[np.ix_(inside, outside)]
    A_OS = A[np.ix_(outside, inside)]
    A_OO = A[np.ix_(outside, outside)]
    D_S = incidence_matrix(grid, nodes, edges)

    rhs_inside = -A_SO @ delta_out
    rhs_outside = -A_OO @ delta_out
    scale = max(1.0, float(np.max(np.abs(rhs_outside))) if rhs_outside.size else 1.0)
    coupled = np.any(A_OS != 0, axis=1) | (np.abs(rhs_outside) > tol * scale)
    A_OS = A_OS[coupled]
    rhs_outside = rhs_outside[coupled]

    n_nodes = len(nodes)
    E = np.block([
        [-D_S, D_S, A_SS],
        [np.zeros((A_OS.shape[0], 2 * m)), A_OS],
    ])
    b = np.concatenate([rhs_inside, rhs_outside])
    c = np.concatenate([w, w, np.zeros(n_nodes)])
    lower = np.concatenate([np.zeros(2 * m), np.full(n_nodes, -np.inf)])
    return FailureLp(LpProblem(c, E, b, lower), nodes, edges, theta[inside].copy())
