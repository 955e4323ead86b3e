"""
Experiment orchestration and scoring.

An experiment enumerates failure sets of each requested size inside the attacked
area, simulates every (attack kind, failure set) pair with its own seed, runs
REACT on the fabricated observation and scores the outcome against the ground
truth. Rows come back in scenario order whatever the degree of parallelism.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .attacks import AttackKind, AttackScenario, enumerate_failure_sets, simulate_attack
from .conf import resolve
from .detection import react
from .exceptions import InputError, InvalidScenario
from .gadgets import gen_3partition_gadget
from .grid import complement, solve_dc_power_flow
from .io import error_summary, load_grid, read_json, write_text
from .serializers import ExperimentConfigSerializer
from .synthetic import synthetic_area, synthetic_grid

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ['kind', 'k', 'scenario_id', 'fn', 'fp', 'exact', 'extra_nodes',
                  'phase_err_pct', 'confidence', 'runtime_ms']
PHASE_ERROR_NOTE = ('# phase_err_pct = 100 * ||theta_dagger_H - theta_post_H||_2 / '
                    'max(||theta_post_H||_2, eps); attacked nodes outside the detection area '
                    'keep their observed angle')


@dataclass(frozen=True)
class ExperimentConfig:
    grid: object
    area: frozenset
    failure_sizes: tuple
    samples: int
    kinds: tuple
    sigma: float | None = None
    perturbation: float | None = None
    T: int | None = None
    seed: int = 0
    jobs: int | None = None

    @classmethod
    def from_dict(cls, data, base_dir=None):
        serializer = ExperimentConfigSerializer(data=data)
        if not serializer.is_valid():
            raise InvalidScenario('Invalid experiment config: %s' % error_summary(serializer.errors))
        attrs = serializer.validated_data
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

        area_spec = attrs['area']
        grid_spec = attrs['grid']
        if isinstance(area_spec, dict) and 'gadget' in area_spec:
            spec = area_spec['gadget']
            gadget = gen_3partition_gadget(spec['s'], spec['B'], with_dummies=spec['with_dummies'])
            grid, area = gadget.grid, gadget.H
        else:
            if isinstance(grid_spec, str):
                path = Path(grid_spec)
                grid = load_grid(path if path.is_absolute() else base_dir / path)
            else:
                spec = grid_spec['synthetic']
                grid = synthetic_grid(spec['nodes'], seed=spec['seed'], mean_degree=spec['mean_degree'])
            if isinstance(area_spec, dict):
                spec = area_spec['synthetic']
                area = synthetic_area(grid, spec['nodes'], spec['edges'], np.random.default_rng(spec['seed']))
            else:
                area = frozenset(area_spec)
                unknown = area - set(grid.node_ids)
                if unknown:
                    raise InvalidScenario('Area contains unknown nodes %s.' % sorted(unknown))

        return cls(
            grid=grid,
            area=area,
            failure_sizes=tuple(attrs['failure_sizes']),
            samples=attrs['samples'],
            kinds=tuple(AttackKind(kind) for kind in attrs['kinds']),
            sigma=attrs['sigma'],
            perturbation=attrs['perturbation'],
            T=attrs['T'],
            seed=attrs['seed'],
            jobs=attrs['jobs'],
        )

    @classmethod
    def load(cls, path):
        return cls.from_dict(read_json(path), base_dir=Path(path).resolve().parent)


@dataclass(frozen=True)
class ScenarioMetrics:
    false_negatives: int
    false_positives: int
    area_extra_nodes: int
    phase_error_pct: float
    confidence: float
    runtime_ms: float = 0.0

    @property
    def exact(self):
        return self.false_negatives == 0 and self.false_positives == 0


@dataclass(frozen=True)
class ExperimentReport:
    rows: pd.DataFrame
    summary: pd.DataFrame


def scenario_seed(master, counter):
    """64-bit seed of scenario `counter` under the master seed."""
    return int(np.random.SeedSequence([master, counter]).generate_state(1, np.uint64)[0])


def phase_error_pct(theta_recovered, theta_post, eps=None):
    eps = resolve(eps, 'PHASE_ERROR_EPS')
    theta_post = np.asarray(theta_post, dtype=float)
    if theta_post.size == 0:
        return 0.0
    diff = np.linalg.norm(np.asarray(theta_recovered, dtype=float) - theta_post)
    return float(100.0 * diff / max(float(np.linalg.norm(theta_post)), eps))


def score_scenario(truth, outcome, observation=None, runtime_ms=0.0):
    """Compare a REACT outcome with the ground truth of its scenario."""
    grid = truth.grid_post
    H = truth.scenario.H
    F = truth.scenario.F
    failed = outcome.result.failed

    nodes = grid.sorted_nodes(H)
    positions = grid.positions(nodes)
    theta_post = truth.theta_post.theta
    fallback = theta_post if observation is None else observation.theta_obs
    recovered = {i: float(fallback[grid.index[i]]) for i in nodes}
    recovered.update((i, v) for i, v in outcome.result.theta_by_node().items() if i in H)
    error = phase_error_pct([recovered[i] for i in nodes], theta_post[positions])

    return ScenarioMetrics(
        false_negatives=len(F - failed),
        false_positives=len(failed - F),
        area_extra_nodes=len(outcome.detected_area - H),
        phase_error_pct=error,
        confidence=float(outcome.result.confidence),
        runtime_ms=runtime_ms,
    )


@dataclass(frozen=True)
class _Task:
    scenario_id: int
    k: int
    scenario: AttackScenario


def _evaluate(grid, theta, T, task):
    observation, truth = simulate_attack(grid, theta, task.scenario)
    rng = np.random.default_rng([task.scenario.seed, 1])
    started = time.perf_counter()
    outcome = react(grid, observation.theta_pre, observation.theta_obs, T=T, rng=rng)
    runtime_ms = (time.perf_counter() - started) * 1000.0
    metrics = score_scenario(truth, outcome, observation, runtime_ms)
    return {
        'kind': task.scenario.kind.value,
        'k': task.k,
        'scenario_id': task.scenario_id,
        'fn': metrics.false_negatives,
        'fp': metrics.false_positives,
        'exact': int(metrics.exact),
        'extra_nodes': metrics.area_extra_nodes,
        'phase_err_pct': metrics.phase_error_pct,
        'confidence': metrics.confidence,
        'runtime_ms': metrics.runtime_ms,
    }


def build_tasks(config):
    tasks = []
    counter = 0
    for k in config.failure_sizes:
        failure_sets = enumerate_failure_sets(
            config.grid, config.area, k, config.samples, np.random.default_rng([config.seed, k]))
        if not failure_sets:
            logger.warning('No connected failure sets of size %d inside the area', k)
        for kind in config.kinds:
            param = config.sigma if kind is AttackKind.DISTORTION else config.perturbation
            for F in failure_sets:
                scenario = AttackScenario(config.area, F, kind, param, scenario_seed(config.seed, counter))
                tasks.append(_Task(counter, k, scenario))
                counter += 1
    return tasks


def summarize(rows):
    if rows.empty:
        return pd.DataFrame(columns=['kind', 'k', 'scenarios', 'fn_mean', 'fp_mean', 'exact_pct',
                                     'extra_nodes_mean', 'phase_err_pct_mean', 'confidence_mean',
                                     'runtime_ms_mean'])
    summary = rows.groupby(['kind', 'k'], sort=False).agg(
        scenarios=('scenario_id', 'count'),
        fn_mean=('fn', 'mean'),
        fp_mean=('fp', 'mean'),
        exact_pct=('exact', 'mean'),
        extra_nodes_mean=('extra_nodes', 'mean'),
        phase_err_pct_mean=('phase_err_pct', 'mean'),
        confidence_mean=('confidence', 'mean'),
        runtime_ms_mean=('runtime_ms', 'mean'),
    ).reset_index()
    summary['exact_pct'] *= 100.0
    return summary


def run_experiment(config):
    """Simulate, detect and score every scenario of `config`."""
    if not config.area:
        raise InputError('The attacked area is empty.')
    if not complement(config.grid, config.area):
        logger.warning('The attacked area covers the whole grid')
    theta = solve_dc_power_flow(config.grid)
    tasks = build_tasks(config)
    jobs = resolve(config.jobs, 'DEFAULT_JOBS')
    T = resolve(config.T, 'DEFAULT_T')
    logger.info('Running %d scenarios on %d worker(s), T = %d', len(tasks), jobs, T)

    def evaluate(task):
        return _evaluate(config.grid, theta.theta, T, task)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(evaluate, tasks))
    else:
        records = [evaluate(task) for task in tasks]

    rows = pd.DataFrame.from_records(records, columns=METRIC_COLUMNS)
    summary = summarize(rows)
    for cell in summary.itertuples(index=False):
        logger.info('%s k=%d: %d scenarios, exact %.1f%%, mean confidence %.4f',
                    cell.kind, cell.k, cell.scenarios, cell.exact_pct, cell.confidence_mean)
    return ExperimentReport(rows, summary)


def format_csv(frame, note=PHASE_ERROR_NOTE):
    body = frame.to_csv(index=False, float_format='%.6f', lineterminator='\n')
    return (note + '\n' if note else '') + body


def write_csv(frame, path, note=PHASE_ERROR_NOTE):
    write_text(format_csv(frame, note), path)
