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
from respec.lib.errors import BadDimension, InvariantViolation


class ScalingLaw:
    """ d_eps as a function of eps

        n = 2:  exp(-1 / (coefficient * eps^2))
        n >= 3: coefficient * eps^(n / (n - 2))
    """

    def __init__(self, n, coefficient):
        self.n = int(n)
        self.coefficient = float(coefficient)
        if self.n < 2:
            raise BadDimension('dimension must be at least 2', n=self.n)
        if self.coefficient <= 0:
            raise InvariantViolation('scaling coefficient must be positive',
                                     coefficient=self.coefficient)

    def to_json(self):
        return {'n': self.n, 'coefficient': self.coefficient}

    def __repr__(self):
        return 'ScalingLaw(n=%d, coefficient=%g)' % (self.n, self.coefficient)
