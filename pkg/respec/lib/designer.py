"""
Respec - Copyright (C) 2026 the respec developers

    This program is free software: you can redistribute it and/or modify
    it under the terms of the GNU General Public License as published by
    the Free Software Foundation, either version 3 of the License, or
    (at your option) any later version.

    This program is distributed in the hope that it will be useful,
    but WITHOUT ANY WARRANTY; without even the implied warranty of
    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
    GNU General Public License for more details.

    You should have received a copy of the GNU General Public License
    along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import csv
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from respec.lib import geometry, numerics
from respec.lib.errors import (BadDimension, BracketFailure, GeometryError, InvariantViolation,
                               MonotonicityViolation, NoConvergence, OverlapError, ScaleError)
from respec.lib.types.design import BracketBox, DesignResult, TraceEntry
from respec.lib.types.resonator_spec import UNIT_VOLUME
from respec.lib.types.scaling_law import ScalingLaw
from respec.lib.types.solver_config import SolverConfig
from respec.lib.types.spectrum import Spectrum

logger = logging.getLogger(__name__)

# bisection steps per coordinate and sweep
MAX_STEPS = 60
CORNER_STEP = 0


def _check_shape(n, volume, cap):
    if n < 2:
        raise BadDimension('dimension must be at least 2', n=n)
    if not volume > 0:
        raise BadDimension('resonator volume must be positive', volume=volume)
    if n >= 3 and not (cap is not None and cap > 0):
        raise BadDimension('window capacity must be positive for n >= 3', cap=cap)


def F(t, n=2, volume=UNIT_VOLUME, cap=None):
    """ Scaling coefficient that puts the resonator value at t
    """
    _check_shape(n, volume, cap)
    if not t > 0:
        raise InvariantViolation('argument must be positive', t=t)
    if n == 2:
        return 2. * volume * t / math.pi
    return (4. * volume * t / cap) ** (1. / (n - 2))


def F_star(s, n=2, volume=UNIT_VOLUME, cap=None):
    """ Inverse of F: resonator value of scaling coefficient s
    """
    _check_shape(n, volume, cap)
    if not s > 0:
        raise InvariantViolation('argument must be positive', s=s)
    if n == 2:
        return math.pi * s / (2. * volume)
    return s ** (n - 2) * cap / (4. * volume)


def essential_threshold(waveguide):
    """ (Lambda', Lambda'') for the full and the narrowed cross-section
    """
    w, w2 = waveguide.full_width, waveguide.narrow_width
    if not (w > 0 and w2 > 0):
        raise GeometryError('waveguide widths must be positive', full_width=w, narrow_width=w2)
    if not w2 < w:
        raise GeometryError('narrow width must be below the full width',
                            full_width=w, narrow_width=w2)
    return math.pi ** 2 / w ** 2, math.pi ** 2 / w2 ** 2


def default_eta(targets, threshold):
    gaps = [b - a for a, b in zip(targets, targets[1:])]
    return 0.1 * min(gaps + [threshold - targets[-1]]) / 2.


def validate_problem(problem):
    """ Check the targets against the threshold, returns the bracket half-width
    """
    if not problem.waveguide.is_waveguide:
        raise GeometryError('design needs a waveguide, got %s' % problem.waveguide.kind)
    problem.waveguide.validate()
    targets = problem.targets
    if not targets:
        raise InvariantViolation('at least one target is required')
    if len(problem.resonators) != len(targets):
        raise InvariantViolation('one resonator per target required',
                                 resonators=len(problem.resonators), targets=len(targets))
    if any(not t > 0 for t in targets):
        raise InvariantViolation('targets must be positive', targets=targets)
    if any(b <= a for a, b in zip(targets, targets[1:])):
        raise InvariantViolation('targets must be strictly increasing', targets=targets)
    if not problem.tol > 0:
        raise InvariantViolation('tolerance must be positive', tol=problem.tol)

    threshold, _ = essential_threshold(problem.waveguide)
    if not targets[-1] < threshold:
        raise InvariantViolation('targets must lie below the essential threshold %g' % threshold,
                                 targets=targets, threshold=threshold)
    eta = default_eta(targets, threshold) if problem.eta is None else problem.eta

    if not eta > 0:
        raise InvariantViolation('eta must be positive', eta=eta)
    if not targets[-1] + 2. * eta < threshold:
        raise InvariantViolation('largest target interval reaches the essential threshold',
                                 eta=eta, threshold=threshold)
    if not targets[0] - 2. * eta > 0:
        raise InvariantViolation('smallest target interval reaches zero', eta=eta)
    for a, b in zip(targets, targets[1:]):
        if not b - a > 4. * eta:
            raise InvariantViolation('target intervals overlap', targets=[a, b], eta=eta)
    return eta


def bracket(problem):
    """ [F(target - eta), F(target + eta)] for every target
    """
    eta = validate_problem(problem)
    return [BracketBox(F(t - eta), F(t + eta)) for t in problem.targets]


def _unpack(result):
    if isinstance(result, Spectrum):
        return np.asarray(result.eigenvalues, dtype=np.float64), result.residual_max
    return np.sort(np.asarray(result, dtype=np.float64)), 0.


class PipelineOracle:
    """ Sorted eigenvalues of the waveguide with windows set from scaling coefficients

        results are cached per coefficient tuple
    """

    def __init__(self, problem, eps, config=None, count=None):
        self.problem = problem
        self.eps = float(eps)
        self.config = config or SolverConfig()
        self.count = problem.m + 2 if count is None else int(count)
        self._cache = {}
        self._lock = threading.Lock()

    def domain(self, d_coeffs):
        resonators = []
        for resonator, coefficient in zip(self.problem.resonators, d_coeffs):
            d = geometry.window_scale(ScalingLaw(2, coefficient), self.eps)
            resonators.append(resonator.replace(eps=self.eps, d=d))
        return geometry.build_domain(self.problem.waveguide, resonators)

    def __call__(self, d_coeffs):
        key = tuple(float(v) for v in d_coeffs)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        _, spectrum = numerics.solve_domain(self.domain(key), self.count, self.config)
        # vectors are not needed by the search
        spectrum.eigenvectors = None
        with self._lock:
            self._cache[key] = spectrum
        logger.debug('oracle %s -> %s', np.round(key, 6).tolist(),
                     np.round(spectrum.eigenvalues, 5).tolist())
        return spectrum

    def with_truncation(self, factor=2.):
        waveguide = self.problem.waveguide
        problem = type(self.problem)(
            waveguide.with_truncation(factor * waveguide.truncation_halflength),
            self.problem.resonators, self.problem.targets, self.problem.eta, self.problem.tol)
        return PipelineOracle(problem, self.eps, self.config, self.count)


class _Search:
    """ Cyclic monotone bisection state
    """

    def __init__(self, problem, oracle, boxes, config):
        self.problem = problem
        self.oracle = oracle
        self.boxes = boxes
        self.config = config
        self.trace = []
        self.upper_threshold = None

    def evaluate(self, d, sweep, k, step):
        values, residual = _unpack(self.oracle(list(d)))
        if len(values) < self.problem.m:
            raise InvariantViolation('oracle returned %d values for %d targets'
                                     % (len(values), self.problem.m))
        self.trace.append(TraceEntry(sweep, k, step, d, values, residual))
        return values, residual

    def check_monotone(self, k, evaluations):
        """ evaluations - (d_k, values, residual) along one coordinate
        """
        ordered = sorted(evaluations, key=lambda e: e[0])
        for (d0, v0, r0), (d1, v1, r1) in zip(ordered, ordered[1:]):
            if d1 <= d0:
                continue
            for j in range(self.problem.m):
                if self.upper_threshold is not None and v1[j] >= self.upper_threshold:
                    continue
                allowance = (self.config.monotone_rtol * abs(v0[j]) +
                             (r0 + r1) * max(1., abs(v0[j])))
                if v1[j] < v0[j] - allowance:
                    raise MonotonicityViolation(
                        'eigenvalue %d dropped from %.6g to %.6g while d_%d grew'
                        % (j, v0[j], v1[j], k), k=k, j=j, d=[d0, d1],
                        values=[float(v0[j]), float(v1[j])],
                        trace=[e.to_json() for e in self.trace[-len(evaluations):]])

    def coordinate(self, d, sweep, k):
        """ Bisect d_k inside its box until the k-th value is within tol / 2
        """
        target = self.problem.targets[k]
        inner = 0.5 * self.problem.tol * target
        box = self.boxes[k]
        lo, hi = box.lower, box.upper

        values, residual = self.evaluate(d, sweep, k, 0)
        evaluations = [(d[k], values, residual)]
        step = 0
        while abs(values[k] - target) > inner and step < MAX_STEPS:
            # a tie moves the upper bound
            if values[k] >= target:
                hi = d[k]
            else:
                lo = d[k]
            if hi - lo <= 1e-12 * box.width:
                break
            step += 1
            d[k] = 0.5 * (lo + hi)
            values, residual = self.evaluate(d, sweep, k, step)
            evaluations.append((d[k], values, residual))
            self.check_monotone(k, evaluations)
        logger.debug('sweep %d, d_%d = %.8g after %d steps: value %.6g for target %g',
                     sweep, k, d[k], step, values[k], target)
        return values, residual


def _corner_values(search, boxes, k):
    """ k-th values at the two mixed corners of the box product
    """
    m = len(boxes)
    low = [boxes[j].upper for j in range(m)]
    low[k] = boxes[k].lower
    high = [boxes[j].lower for j in range(m)]
    high[k] = boxes[k].upper
    return _unpack(search.oracle(low))[0], _unpack(search.oracle(high))[0], low, high


def _check_corners(search, boxes, eta, thresholds, threads):
    problem = search.problem
    m = problem.m
    with ThreadPoolExecutor(max_workers=threads) as executor:
        corners = list(executor.map(lambda k: _corner_values(search, boxes, k), range(m)))

    for k, (low_values, high_values, low, high) in enumerate(corners):
        search.trace.append(TraceEntry(0, k, CORNER_STEP, low, low_values))
        search.trace.append(TraceEntry(0, k, CORNER_STEP, high, high_values))
        target = problem.targets[k]
        if not low_values[k] < target < high_values[k]:
            raise BracketFailure(resonator=k, target=target,
                                 corner_values=[float(low_values[k]), float(high_values[k])])

    threshold, _ = thresholds
    upper_gap = 0.5 * (problem.targets[-1] + 2. * eta + threshold)
    for corner in ([b.lower for b in boxes], [b.upper for b in boxes]):
        values, _ = _unpack(search.oracle(corner))
        for k, target in enumerate(problem.targets):
            if abs(values[k] - target) > 1.5 * eta:
                logger.warning('corner value %.6g of resonator %d is farther than 3 eta / 2 '
                               'from its target %g', values[k], k, target)
        stray = values[(values > upper_gap) & (values < threshold)]
        if len(stray):
            logger.warning('eigenvalues %s between %.6g and the essential threshold',
                           np.round(stray, 6).tolist(), upper_gap)


def _relative_errors(values, targets):
    return [abs(values[k] - t) / t for k, t in enumerate(targets)]


def _is_simple(values, problem):
    for k, target in enumerate(problem.targets):
        for j in (k - 1, k + 1):
            if 0 <= j < len(values) and not abs(values[k] - values[j]) > 2. * problem.tol * target:
                return False
    return True


def _physical(d_tilde, eps):
    try:
        return [geometry.window_scale(ScalingLaw(2, c), eps) for c in d_tilde]
    except (InvariantViolation, ScaleError):
        return []


def design(problem, eps, config=None, oracle=None):
    """ Scaling coefficients that put the computed eigenvalues on the targets

        oracle - callable taking the coefficient list and returning the
                 sorted eigenvalues (array or Spectrum), the FEM pipeline by default
    """
    config = config or SolverConfig()
    eta = validate_problem(problem)
    boxes = [BracketBox(F(t - eta), F(t + eta)) for t in problem.targets]
    thresholds = essential_threshold(problem.waveguide)
    for k, resonator in enumerate(problem.resonators):
        if not problem.waveguide.contains_box(*resonator.replace(eps=eps).box):
            raise OverlapError('resonator %d leaves the narrowed section' % k,
                               pair=(k, 'boundary'))
    oracle = oracle or PipelineOracle(problem, eps, config)
    logger.info('design at eps=%g: eta=%.4g, boxes %s, thresholds (%.6g, %.6g)',
                eps, eta, boxes, thresholds[0], thresholds[1])

    search = _Search(problem, oracle, boxes, config)
    search.upper_threshold = thresholds[1]
    _check_corners(search, boxes, eta, thresholds, config.threads)

    d = [b.center for b in boxes]
    values = None
    converged = False
    sweep = 0
    while sweep < config.max_sweeps:
        sweep += 1
        for k in range(problem.m):
            search.coordinate(d, sweep, k)
        values, _ = _unpack(oracle(list(d)))
        errors = _relative_errors(values, problem.targets)
        logger.info('sweep %d: d=%s, relative errors %s', sweep, np.round(d, 8).tolist(),
                    np.round(errors, 6).tolist())
        if max(errors) <= problem.tol:
            converged = True
            break

    result = DesignResult(problem, eps, d, values[:problem.m], boxes, search.trace, thresholds,
                          d_physical=_physical(d, eps),
                          count_below=int(np.count_nonzero(values < thresholds[0])),
                          simple=_is_simple(values, problem), sweeps=sweep, converged=converged)
    if not converged:
        raise NoConvergence('no design within %g after %d sweeps' % (problem.tol, sweep),
                            partial=result, sweeps=sweep)

    if result.count_below != problem.m and len(values) > problem.m:
        logger.warning('%d eigenvalues below the essential threshold, expected %d',
                       result.count_below, problem.m)
    if not result.simple:
        logger.warning('achieved eigenvalues are not separated by 2 tol')

    if config.truncation_check and hasattr(oracle, 'with_truncation'):
        longer, _ = _unpack(oracle.with_truncation(2.)(list(d)))
        shift = max(abs(longer[k] - values[k]) / values[k] for k in range(problem.m))
        result.truncation_shift = float(shift)
        if shift > problem.tol / 10.:
            logger.warning('doubling the truncation moved the eigenvalues by %.3g', shift)
    logger.info('design converged after %d sweeps, %d oracle calls', sweep, len(search.trace))
    return result


def trace_fieldnames(result):
    m = result.problem.m
    count = max([len(e.eigenvalues) for e in result.trace] + [m])
    return (['sweep', 'k', 'step'] + ['d_%d' % (j + 1) for j in range(m)] +
            ['lambda_%d' % (j + 1) for j in range(count)] + ['residual'])


def write_trace_csv(result, path):
    fields = trace_fieldnames(result)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=fields, restval='', lineterminator='\n')
        writer.writeheader()
        for entry in result.trace:
            record = {'sweep': entry.sweep, 'k': entry.k, 'step': entry.step,
                      'residual': repr(entry.residual)}
            record.update({'d_%d' % (j + 1): repr(v) for j, v in enumerate(entry.d)})
            record.update({'lambda_%d' % (j + 1): repr(v)
                           for j, v in enumerate(entry.eigenvalues)})
            writer.writerow(record)
