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
from respec.lib.errors import InvariantViolation

DEFAULTS = {
    'base_h': 1. / 16.,
    'ratio': 1.5,
    'refinement': 8.,
    'eig_tol': 1e-6,
    'eig_maxiter': 400,
    'cg_rel_tol': 1e-10,
    'cg_maxiter': None,
    'precond_shift': 1.,
    'seed': 0,
    'threads': 1,
    'capacity_base_h': 1. / 32.,
    'max_sweeps': 12,
    'capacity_extrapolate': True,
    'monotone_rtol': 5e-3,
    'truncation_check': True,
}


class SolverConfig:
    """ Numeric knobs shared by every long running operation

        base_h - element size away from windows
        ratio - grading ratio
        refinement - min_h = smallest window half-width / refinement
        eig_tol - relative eigen residual
        cg_rel_tol - linear solve tolerance
        seed - start block seed
        threads - worker threads for rows, sweeps and corner checks
        monotone_rtol - relative allowance on oracle monotonicity
        capacity_extrapolate - Richardson step over one uniform refinement of the disk
    """

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(DEFAULTS)
        if unknown:
            raise TypeError('unknown solver options: %s' % ', '.join(sorted(unknown)))
        for key, value in DEFAULTS.items():
            setattr(self, key, kwargs.get(key, value))
        self.threads = max(1, int(self.threads))
        self.seed = int(self.seed)
        if self.max_sweeps < 1:
            raise InvariantViolation('max_sweeps must be at least 1', max_sweeps=self.max_sweeps)

    def replace(self, **kwargs):
        values = self.to_json()
        values.update(kwargs)
        return SolverConfig(**values)

    def to_json(self):
        return {key: getattr(self, key) for key in DEFAULTS}
