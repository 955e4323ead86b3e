"""
MATPOWER case ingestion.

Only the DC-relevant columns are read: bus number, type and real demand; generator
bus, real output and status; branch endpoints, reactance, tap ratio and status.
"""
from __future__ import annotations

import logging
import re

from .exceptions import InputFileError
from .grid import Edge, Grid, Node

logger = logging.getLogger(__name__)

# bus columns
BUS_I, BUS_TYPE, PD = 0, 1, 2
REF, ISOLATED = 3, 4
# gen columns
GEN_BUS, PG, GEN_STATUS = 0, 1, 7
# branch columns
F_BUS, T_BUS, BR_X, TAP, BR_STATUS = 0, 1, 3, 8, 10

_BLOCK_START = re.compile(r'^\s*mpc\.(\w+)\s*=\s*\[(.*)$')
_SCALAR = re.compile(r'^\s*mpc\.baseMVA\s*=\s*([^;%]+)')


def _strip_comment(line):
    return line.split('%', 1)[0]


def parse_case(text, path=None):
    """Return (baseMVA, {block name: [(line number, row values)]}) for a case file."""
    base_mva = 100.0
    blocks = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if current is None:
            scalar = _SCALAR.match(line)
            if scalar:
                try:
                    base_mva = float(scalar.group(1))
                except ValueError as exc:
                    raise InputFileError('Invalid baseMVA %r' % scalar.group(1).strip(),
                                         path=path, line=lineno) from exc
                continue
            start = _BLOCK_START.match(line)
            if not start:
                continue
            current = start.group(1)
            blocks[current] = []
            line = start.group(2)
        body, closed = line, False
        if ']' in body:
            body, closed = body.split(']', 1)[0], True
        for chunk in body.split(';'):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                values = [float(v) for v in chunk.replace(',', ' ').split()]
            except ValueError as exc:
                raise InputFileError('Non-numeric entry in mpc.%s: %s' % (current, exc),
                                     path=path, line=lineno) from exc
            blocks[current].append((lineno, values))
        if closed:
            current = None
    if current is not None:
        raise InputFileError('Unterminated block mpc.%s' % current, path=path)
    for name in ('bus', 'branch'):
        if name not in blocks:
            raise InputFileError('Missing mpc.%s block' % name, path=path)
    return base_mva, blocks


def _column(row, index, lineno, block, path, default=None):
    if index < len(row):
        return row[index]
    if default is not None:
        return default
    raise InputFileError('mpc.%s row has %d columns, need at least %d' % (block, len(row), index + 1),
                         path=path, line=lineno)


def convert_matpower(text, path=None, drop_nonpositive=False):
    """
    Build a balanced DC grid from MATPOWER case text.

    Injections are generation minus demand in per unit. The reference bus absorbs
    the total mismatch. Out-of-service branches and generators and isolated buses
    are dropped; branches with non-positive reactance are rejected unless
    `drop_nonpositive` is set.
    """
    base_mva, blocks = parse_case(text, path)

    injections = {}
    reference = None
    for lineno, row in blocks['bus']:
        bus = int(_column(row, BUS_I, lineno, 'bus', path))
        bus_type = int(_column(row, BUS_TYPE, lineno, 'bus', path))
        if bus_type == ISOLATED:
            continue
        injections[bus] = -_column(row, PD, lineno, 'bus', path) / base_mva
        if bus_type == REF and reference is None:
            reference = bus

    for lineno, row in blocks.get('gen', []):
        bus = int(_column(row, GEN_BUS, lineno, 'gen', path))
        if _column(row, GEN_STATUS, lineno, 'gen', path, default=1.0) <= 0:
            continue
        if bus not in injections:
            raise InputFileError('Generator at unknown bus %d' % bus, path=path, line=lineno)
        injections[bus] += _column(row, PG, lineno, 'gen', path) / base_mva

    edges = []
    for lineno, row in blocks['branch']:
        u = int(_column(row, F_BUS, lineno, 'branch', path))
        v = int(_column(row, T_BUS, lineno, 'branch', path))
        if _column(row, BR_STATUS, lineno, 'branch', path, default=1.0) <= 0:
            continue
        if u not in injections or v not in injections:
            raise InputFileError('Branch %d-%d touches an unknown or isolated bus' % (u, v),
                                 path=path, line=lineno)
        tap = _column(row, TAP, lineno, 'branch', path, default=0.0) or 1.0
        x = _column(row, BR_X, lineno, 'branch', path) * tap
        if x <= 0:
            if drop_nonpositive:
                logger.warning('Dropping branch %d-%d with reactance %g (line %d)', u, v, x, lineno)
                continue
            raise InputFileError('Branch %d-%d has non-positive reactance %g' % (u, v, x),
                                 path=path, line=lineno)
        edges.append(Edge(len(edges), u, v, x))

    if not injections:
        raise InputFileError('Case has no in-service buses', path=path)
    if reference is None:
        reference = next(iter(injections))
    mismatch = sum(injections.values())
    injections[reference] -= mismatch
    logger.info('Converted case: %d buses, %d branches, reference bus %d absorbed %.4f pu',
                len(injections), len(edges), reference, mismatch)
    nodes = [Node(bus, p) for bus, p in injections.items()]
    return Grid.build(nodes, edges, reference=reference)
