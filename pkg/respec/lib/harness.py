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
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from respec.lib import capacity, designer, geometry, model, numerics
from respec.lib.errors import (BadDimension, GeometryError, InsufficientData, InvariantViolation,
                               MissingVectors, RespecError, SceneError)
from respec.lib.types.run import (ConvergenceRow, ConvergenceRun, LocalizationReport, RateFit,
                                  WindowScan)
from respec.lib.types.scaling_law import ScalingLaw
from respec.lib.types.slit_mesh import BULK_REGION, GradingSpec
from respec.lib.types.solver_config import SolverConfig
from respec.lib.types.spectrum import Label, SpectrumSet

logger = logging.getLogger(__name__)

RESONATOR_MAJORITY = 0.5


def _laws_for(domain, law):
    if isinstance(law, ScalingLaw):
        laws = [law] * len(domain.resonators)
    else:
        laws = list(law)
    if len(laws) != len(domain.resonators):
        raise SceneError('one scaling law per resonator required',
                         expected=len(domain.resonators), got=len(laws))
    for law in laws:
        if law.n != 2:
            raise BadDimension('convergence runs are two dimensional', n=law.n)
    return laws


def limit_for(domain, laws, cutoff):
    """ Limit spectrum below cutoff and the analytic resonator values
    """
    outer = domain.outer
    if outer.is_waveguide:
        raise GeometryError('convergence runs need a bounded rectangle')
    gammas = [designer.F_star(law.coefficient, law.n) for law in laws]
    count = 4
    bulk = model.rect_dirichlet_eigs(outer.width, outer.height, count)
    while bulk.values[-1] <= cutoff:
        count *= 2
        bulk = model.rect_dirichlet_eigs(outer.width, outer.height, count)
    limit = model.limit_spectrum(bulk, gammas)
    return limit.truncate(cutoff), gammas


def localization(spectrum, mesh, domain):
    """ L2 mass of every eigenvector split by region

        label is Resonator(k) when more than half of the mass sits in B_k
    """
    if spectrum.eigenvectors is None:
        raise MissingVectors('localization needs eigenvectors')
    vectors = np.asarray(spectrum.eigenvectors)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    if spectrum.dof_map is not None:
        vectors = numerics.expand(vectors, spectrum.dof_map, mesh.n_nodes)
    elif vectors.shape[0] != mesh.n_nodes:
        raise MissingVectors('eigenvectors do not match the mesh',
                             rows=vectors.shape[0], n_nodes=mesh.n_nodes)

    integrals, masses = numerics.element_integrals(mesh, vectors)
    total = masses.sum(axis=0)
    m = len(domain.resonators)
    fractions = np.zeros((vectors.shape[1], m + 1))
    fractions[:, 0] = masses[mesh.regions == BULK_REGION].sum(axis=0) / total
    for k in range(m):
        fractions[:, k + 1] = masses[mesh.regions == k].sum(axis=0) / total

    labels, defects = [], []
    for j in range(vectors.shape[1]):
        k = int(np.argmax(fractions[j, 1:])) if m else -1
        if m and fractions[j, k + 1] > RESONATOR_MAJORITY:
            labels.append(Label.resonator(k))
            inside = mesh.regions == k
            scale = 1. / math.sqrt(total[j])
            mean = integrals[inside, j].sum() * scale
            sign = 1. if mean >= 0. else -1.
            volume = domain.resonators[k].volume
            level = 1. / math.sqrt(volume)
            deviation = fractions[j, k + 1] - 2. * level * sign * mean + level * level * volume
            defects.append((1. - fractions[j, k + 1]) + max(deviation, 0.))
        else:
            labels.append(Label.bulk())
            defects.append(float(fractions[j, 1:].sum()))
    return LocalizationReport(fractions, labels, defects)


def _run_row(scene, laws, eps, count, cutoff, limit, gammas, config, capacity_method):
    try:
        d = [geometry.window_scale(law, eps) for law in laws]
        level = geometry.rescale(scene, eps, d)
        mesh, spectrum = numerics.solve_domain(level, count, config)
        gamma_eps = [capacity.gamma_eps_for(r, capacity_method, config)
                     for r in level.resonators]
        report = localization(spectrum, mesh, level)

        below = spectrum.eigenvalues[spectrum.eigenvalues <= cutoff]
        if len(below) == len(spectrum.eigenvalues):
            logger.warning('eps=%g: all %d eigenvalues below cutoff %g, higher ones are missing',
                           eps, len(below), cutoff)
        computed = SpectrumSet(below, cutoff)
        gamma_err = sum(abs(g_eps - g) for g_eps, g in zip(gamma_eps, gammas))
        row = ConvergenceRow(
            eps, d=d, gamma_eps=gamma_eps, eigenvalues=spectrum.eigenvalues,
            residual_max=spectrum.residual_max, h_min=mesh.h_min, h_max=mesh.h_max,
            n_nodes=mesh.n_nodes,
            dtilde=model.tilde_hausdorff(computed, limit),
            inside=model.tilde_directed(limit, computed),
            outside=model.tilde_directed(computed, limit),
            truncation_bound=model.truncation_bound(cutoff),
            rate_factor=model.rate_factor(model.RateFactor(2, eps, gamma_err)),
            localization=report)
        logger.info('eps=%g: %d nodes, lambda_1=%.6g, dtilde=%.4g', eps, mesh.n_nodes,
                    spectrum.eigenvalues[0], row.dtilde)
        return row
    except RespecError as e:
        logger.warning('eps=%g aborted: %s', eps, e)
        row = ConvergenceRow(eps, error=e.to_json())
        partial = getattr(e, 'partial', None)
        if partial is not None and hasattr(partial, 'eigenvalues'):
            row.eigenvalues = [float(v) for v in partial.eigenvalues]
            row.residual_max = partial.residual_max
        return row


def run_convergence(scene, law, eps_schedule, count, cutoff, config=None, capacity_method='fem'):
    """ Discrete spectra along an eps schedule against the limit spectrum

        rows run concurrently, failed rows carry their error and the run goes on
    """
    config = config or SolverConfig()
    schedule = [float(e) for e in eps_schedule]
    if not schedule:
        raise InvariantViolation('empty eps schedule')
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise InvariantViolation('eps schedule must be strictly decreasing', schedule=schedule)
    laws = _laws_for(scene, law)
    limit, gammas = limit_for(scene, laws, cutoff)
    logger.info('limit spectrum below %g: %s', cutoff, np.round(limit.values, 4).tolist())

    def work(eps):
        return _run_row(scene, laws, eps, count, cutoff, limit, gammas, config, capacity_method)

    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        rows = list(executor.map(work, schedule))
    return ConvergenceRun(scene, schedule, rows, limit, count, cutoff, gammas)


def fit_rate(run, n=2):
    """ Least squares slope of log dtilde against log rate_factor
    """
    if n < 2:
        raise BadDimension('dimension must be at least 2', n=n)
    rows = [r for r in run.rows
            if not r.failed and r.dtilde > 0. and r.rate_factor > 0.
            and math.isfinite(r.dtilde) and math.isfinite(r.rate_factor)]
    if len(rows) < 3:
        raise InsufficientData('rate fit needs 3 rows with positive dtilde, got %d' % len(rows))
    x = np.log([r.rate_factor for r in rows])
    y = np.log([r.dtilde for r in rows])
    (slope, intercept), residuals, _, _, _ = np.polyfit(x, y, 1, full=True)
    residual = math.sqrt(residuals[0] / len(rows)) if len(residuals) else 0.
    fit = RateFit(slope, intercept, residual, len(rows))
    logger.info('rate slope %.3f (rms residual %.3g over %d rows)', fit.slope, fit.residual,
                fit.points)
    return fit


def monotone_window_scan(scene, eps, k, d_grid, count, config=None, threshold=None):
    """ Eigenvalues for increasing windows of resonator k on one shared node set

        every grid window is a mesh line, so the discrete spaces are nested
        and the min-max ordering holds up to solver accuracy
    """
    config = config or SolverConfig()
    d_grid = [float(d) for d in d_grid]
    if any(b <= a for a, b in zip(d_grid, d_grid[1:])):
        raise InvariantViolation('window grid must be increasing', d_grid=d_grid)
    base = [r.d for r in scene.resonators]
    resonator = scene.resonators[k]

    sources = set()
    for d in d_grid:
        sources.update(resonator.replace(eps=eps, d=d).window)
    smallest = min([resonator.ell * d_grid[0]] +
                   [r.ell * r.d for j, r in enumerate(scene.resonators) if j != k])
    grading = GradingSpec(config.base_h, min(config.base_h, smallest / config.refinement),
                          config.ratio)

    def work(d):
        values = list(base)
        values[k] = d
        level = geometry.rescale(scene, eps, values)
        _, spectrum = numerics.solve_domain(level, count, config, grading, sorted(sources))
        return spectrum

    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        spectra = list(executor.map(work, d_grid))

    table = np.array([s.eigenvalues for s in spectra])
    residuals = np.array([s.residual_max for s in spectra])
    violations = []
    for j in range(table.shape[1]):
        if threshold is not None and table[:, j].max() >= threshold:
            continue
        for i in range(1, len(d_grid)):
            drop = table[i - 1, j] - table[i, j]
            allowance = 2. * max(residuals[i - 1], residuals[i]) * max(1., table[i, j])
            if drop > allowance:
                violations.append({'column': j, 'index': i, 'drop': float(drop)})
    scan = WindowScan(eps, k, d_grid, table, residuals, violations)
    if violations:
        logger.warning('window scan of resonator %d not monotone: %s', k, violations)
    return scan


def _format(value):
    if isinstance(value, float) and math.isnan(value):
        return ''
    return repr(value)


def run_fieldnames(run):
    m = len(run.gammas)
    fields = ['eps']
    fields += ['d_%d' % (k + 1) for k in range(m)]
    fields += ['gamma_eps_%d' % (k + 1) for k in range(m)]
    fields += ['lambda_%d' % (j + 1) for j in range(run.count)]
    fields += ['dtilde', 'inside', 'outside', 'truncation_bound', 'rate_factor', 'h_min',
               'h_max', 'n_nodes', 'residual_max', 'labels', 'error']
    return fields


def write_run_csv(run, path):
    m = len(run.gammas)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=run_fieldnames(run), lineterminator='\n')
        writer.writeheader()
        for row in run.rows:
            record = {'eps': _format(row.eps)}
            for k in range(m):
                record['d_%d' % (k + 1)] = _format(row.d[k]) if k < len(row.d) else ''
                record['gamma_eps_%d' % (k + 1)] = \
                    _format(row.gamma_eps[k]) if k < len(row.gamma_eps) else ''
            for j in range(run.count):
                record['lambda_%d' % (j + 1)] = \
                    _format(row.eigenvalues[j]) if j < len(row.eigenvalues) else ''
            for name in ('dtilde', 'inside', 'outside', 'truncation_bound', 'rate_factor',
                         'h_min', 'h_max', 'n_nodes', 'residual_max'):
                record[name] = _format(getattr(row, name))
            record['labels'] = ';'.join(row.labels())
            record['error'] = row.error['message'] if row.error else ''
            writer.writerow(record)


def _read_float(text):
    return float(text) if text != '' else float('nan')


def read_run_csv(path):
    """ Rows of a run csv, enough for plots and fits
    """
    with open(path, 'r', newline='') as f:
        reader = csv.DictReader(f)
        fields = reader.fieldnames or []
        records = list(reader)
    if 'eps' not in fields or 'dtilde' not in fields:
        raise SceneError('not a convergence run csv: %s' % path)
    m = sum(1 for name in fields if name.startswith('gamma_eps_'))
    count = sum(1 for name in fields if name.startswith('lambda_'))

    rows = []
    for record in records:
        eigenvalues = [_read_float(record['lambda_%d' % (j + 1)]) for j in range(count)]
        labels = [Label.parse(l) for l in record.get('labels', '').split(';') if l]
        row = ConvergenceRow(
            _read_float(record['eps']),
            d=[_read_float(record['d_%d' % (k + 1)]) for k in range(m)],
            gamma_eps=[_read_float(record['gamma_eps_%d' % (k + 1)]) for k in range(m)],
            eigenvalues=[v for v in eigenvalues if not math.isnan(v)],
            residual_max=_read_float(record['residual_max']),
            h_min=_read_float(record['h_min']),
            h_max=_read_float(record['h_max']),
            n_nodes=int(_read_float(record['n_nodes']) if record['n_nodes'] else 0),
            dtilde=_read_float(record['dtilde']),
            inside=_read_float(record['inside']),
            outside=_read_float(record['outside']),
            truncation_bound=_read_float(record['truncation_bound']),
            rate_factor=_read_float(record['rate_factor']),
            localization=LocalizationReport(np.zeros((len(labels), m + 1)), labels)
            if labels else None,
            error={'message': record['error']} if record.get('error') else None)
        rows.append(row)
    return ConvergenceRun(None, [r.eps for r in rows], rows, count=count,
                          gammas=[0.] * m)
