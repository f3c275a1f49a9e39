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
import numpy as np


class LocalizationReport:
    """ L2 mass fractions per eigenpair

        fractions - (count, m + 1), column 0 is the bulk, column k + 1 resonator k
        labels - Label per eigenpair
        defects - concentration defect per pair, resonator mass for bulk pairs
    """

    def __init__(self, fractions, labels, defects=None):
        self.fractions = np.asarray(fractions, dtype=np.float64)
        self.labels = list(labels)
        self.defects = np.zeros(len(self.labels)) if defects is None else np.asarray(defects)

    def bulk_fraction(self, j):
        return float(self.fractions[j, 0])

    def resonator_fraction(self, j, k):
        return float(self.fractions[j, k + 1])

    def resonator_mass(self, j):
        return float(np.sum(self.fractions[j, 1:]))

    def to_json(self):
        return {
            'fractions': self.fractions.tolist(),
            'labels': [str(l) for l in self.labels],
            'defects': np.asarray(self.defects).tolist(),
        }


class ConvergenceRow:
    """ One eps level of a convergence run
    """

    def __init__(self, eps, d=(), gamma_eps=(), eigenvalues=(), residual_max=0., h_min=0.,
                 h_max=0., n_nodes=0, dtilde=float('nan'), inside=float('nan'),
                 outside=float('nan'), truncation_bound=float('nan'), rate_factor=float('nan'),
                 localization=None, error=None):
        self.eps = float(eps)
        self.d = [float(v) for v in d]
        self.gamma_eps = [float(v) for v in gamma_eps]
        self.eigenvalues = [float(v) for v in eigenvalues]
        self.residual_max = float(residual_max)
        self.h_min = float(h_min)
        self.h_max = float(h_max)
        self.n_nodes = int(n_nodes)
        self.dtilde = float(dtilde)
        self.inside = float(inside)
        self.outside = float(outside)
        self.truncation_bound = float(truncation_bound)
        self.rate_factor = float(rate_factor)
        self.localization = localization
        # to_json() of the error that aborted the row
        self.error = error

    @property
    def failed(self):
        return self.error is not None

    def labels(self):
        if self.localization is None:
            return []
        return [str(l) for l in self.localization.labels]


class ConvergenceRun:

    def __init__(self, scene, schedule, rows, limit=None, count=0, cutoff=0., gammas=()):
        self.scene = scene
        self.schedule = [float(e) for e in schedule]
        self.rows = list(rows)
        # SpectrumSet of the limit operator
        self.limit = limit
        self.count = int(count)
        self.cutoff = float(cutoff)
        self.gammas = [float(g) for g in gammas]

    @property
    def failed(self):
        return any(r.failed for r in self.rows)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)


class RateFit:

    def __init__(self, slope, intercept, residual, points):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.residual = float(residual)
        self.points = int(points)

    def to_json(self):
        return {'slope': self.slope, 'intercept': self.intercept,
                'residual': self.residual, 'points': self.points}


class RunManifest:
    """ Everything needed to reproduce a cli invocation

        outputs maps file names to their sha256 digests
    """

    def __init__(self, subcommand, scene_path=None, parameters=None, seed=0, version='',
                 wall_clock=0., outputs=None):
        self.subcommand = subcommand
        self.scene_path = scene_path
        self.parameters = dict(parameters or {})
        self.seed = seed
        self.version = version
        self.wall_clock = float(wall_clock)
        self.outputs = dict(outputs or {})

    def to_json(self):
        return {
            'subcommand': self.subcommand,
            'scene': self.scene_path,
            'parameters': self.parameters,
            'seed': self.seed,
            'version': self.version,
            'wall_clock': self.wall_clock,
            'outputs': self.outputs,
        }


class WindowScan:
    """ Eigenvalues of one resonator's window sweep at fixed eps

        table - (len(d_grid), count) eigenvalues
        residuals - (len(d_grid),) largest residual per point
        violations - (column, grid index, drop) entries beyond the allowance
    """

    def __init__(self, eps, k, d_grid, table, residuals, violations=None):
        self.eps = float(eps)
        self.k = int(k)
        self.d_grid = [float(d) for d in d_grid]
        self.table = np.asarray(table, dtype=np.float64)
        self.residuals = np.asarray(residuals, dtype=np.float64)
        self.violations = list(violations or [])

    @property
    def monotone(self):
        return not self.violations

    def to_json(self):
        return {
            'eps': self.eps,
            'k': self.k,
            'd_grid': self.d_grid,
            'table': self.table.tolist(),
            'residuals': self.residuals.tolist(),
            'violations': self.violations,
        }
