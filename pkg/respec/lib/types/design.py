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


class DesignProblem:
    """ Targets below the essential threshold of a narrowed waveguide

        waveguide - OuterSpec of kind waveguide
        resonators - ResonatorSpec placements, their d is ignored
        targets - strictly increasing eigenvalues to reach
        eta - bracket half-width, None picks the default
        tol - relative eigenvalue tolerance
    """

    def __init__(self, waveguide, resonators, targets, eta=None, tol=0.02):
        self.waveguide = waveguide
        self.resonators = list(resonators)
        self.targets = [float(t) for t in targets]
        self.eta = None if eta is None else float(eta)
        self.tol = float(tol)

    @property
    def m(self):
        return len(self.targets)

    def to_json(self):
        return {
            'waveguide': self.waveguide.to_json(),
            'resonators': [{'center': list(r.center), 'eps': r.eps, 'ell': r.ell}
                           for r in self.resonators],
            'targets': self.targets,
            'eta': self.eta,
            'tol': self.tol,
        }


class BracketBox:

    def __init__(self, lower, upper):
        self.lower = float(lower)
        self.upper = float(upper)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    def __contains__(self, value):
        return self.lower <= value <= self.upper

    def to_json(self):
        return [self.lower, self.upper]

    def __repr__(self):
        return 'BracketBox(%g, %g)' % (self.lower, self.upper)


class TraceEntry:
    """ One oracle evaluation of the search
    """

    FIELDS = ('sweep', 'k', 'step', 'd', 'eigenvalues', 'residual')

    def __init__(self, sweep, k, step, d, eigenvalues, residual=0.):
        self.sweep = sweep
        self.k = k
        self.step = step
        self.d = [float(v) for v in d]
        self.eigenvalues = [float(v) for v in eigenvalues]
        self.residual = float(residual)

    def to_json(self):
        return {field: getattr(self, field) for field in self.FIELDS}


class DesignResult:

    def __init__(self, problem, eps, d_tilde, achieved, boxes, trace, thresholds,
                 d_physical=None, count_below=0, simple=True, sweeps=0, converged=True,
                 truncation_shift=None):
        self.problem = problem
        self.eps = float(eps)
        self.d_tilde = [float(v) for v in d_tilde]
        self.achieved = [float(v) for v in achieved]
        self.boxes = list(boxes)
        self.trace = list(trace)
        # (essential threshold, narrowed threshold)
        self.thresholds = tuple(thresholds)
        self.d_physical = [float(v) for v in (d_physical or [])]
        self.count_below = int(count_below)
        self.simple = bool(simple)
        self.sweeps = int(sweeps)
        self.converged = bool(converged)
        self.truncation_shift = truncation_shift

    @property
    def relative_errors(self):
        return [abs(a - t) / t for a, t in zip(self.achieved, self.problem.targets)]

    def to_json(self):
        return {
            'eps': self.eps,
            'targets': self.problem.targets,
            'eta': self.problem.eta,
            'tol': self.problem.tol,
            'd_tilde': self.d_tilde,
            'd_physical': self.d_physical,
            'achieved': self.achieved,
            'relative_errors': self.relative_errors,
            'boxes': [b.to_json() for b in self.boxes],
            'essential_threshold': self.thresholds[0],
            'narrow_threshold': self.thresholds[1],
            'count_below_threshold': self.count_below,
            'simple': self.simple,
            'sweeps': self.sweeps,
            'converged': self.converged,
            'truncation_shift': self.truncation_shift,
            'oracle_calls': len(self.trace),
        }
