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

from respec.lib.errors import InvariantViolation

LABEL_BULK = 'bulk'
LABEL_RESONATOR = 'resonator'


class Label:
    """ Bulk or Resonator(k)
    """

    __slots__ = ('kind', 'index')

    def __init__(self, kind, index=None):
        self.kind = kind
        self.index = index

    @staticmethod
    def bulk():
        return Label(LABEL_BULK)

    @staticmethod
    def resonator(k):
        return Label(LABEL_RESONATOR, int(k))

    @staticmethod
    def parse(text):
        if text == 'Bulk':
            return Label.bulk()
        if text.startswith('Resonator(') and text.endswith(')'):
            return Label.resonator(int(text[len('Resonator('):-1]))
        raise InvariantViolation('unknown label %r' % text)

    @property
    def is_resonator(self):
        return self.kind == LABEL_RESONATOR

    def __eq__(self, other):
        return isinstance(other, Label) and (self.kind, self.index) == (other.kind, other.index)

    def __hash__(self):
        return hash((self.kind, self.index))

    def __str__(self):
        if self.is_resonator:
            return 'Resonator(%d)' % self.index
        return 'Bulk'

    __repr__ = __str__


class Spectrum:
    """ Computed eigenpairs of K u = lambda M u

        eigenvalues - ascending
        residuals - relative residual per pair
        eigenvectors - (n_dof, count) M-orthonormal columns or None
        dof_map - reduced -> full node ids, set by the caller when known
    """

    def __init__(self, eigenvalues, residuals, eigenvectors=None, seed=None, method='',
                 iterations=0, dof_map=None, n_nodes=None):
        self.eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
        self.residuals = np.asarray(residuals, dtype=np.float64)
        self.eigenvectors = eigenvectors
        self.seed = seed
        self.method = method
        self.iterations = iterations
        self.dof_map = dof_map
        self.n_nodes = n_nodes

    @property
    def residual_max(self):
        if not len(self.residuals):
            return 0.
        return float(np.max(self.residuals))

    def __len__(self):
        return len(self.eigenvalues)

    def to_json(self):
        return {
            'eigenvalues': self.eigenvalues.tolist(),
            'residuals': self.residuals.tolist(),
            'seed': self.seed,
            'method': self.method,
            'iterations': self.iterations,
        }


class SpectrumSet:
    """ Truncated spectrum below a cutoff, with labels
    """

    def __init__(self, values, cutoff=None, labels=None):
        values = np.asarray(values, dtype=np.float64).ravel()
        if labels is None:
            labels = [Label.bulk()] * len(values)
        if len(labels) != len(values):
            raise InvariantViolation('one label per value required')
        order = np.argsort(values, kind='stable')
        self.values = values[order]
        self.labels = [labels[i] for i in order]
        if cutoff is None:
            cutoff = float(self.values[-1]) if len(self.values) else 0.
        self.cutoff = float(cutoff)
        if len(self.values) and (self.values[0] < 0 or self.values[-1] > self.cutoff):
            raise InvariantViolation('values must lie in [0, cutoff]', cutoff=self.cutoff)

    def truncate(self, cutoff):
        keep = self.values <= cutoff
        return SpectrumSet(self.values[keep], cutoff,
                           [l for l, k in zip(self.labels, keep) if k])

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def to_json(self):
        return {
            'values': self.values.tolist(),
            'cutoff': self.cutoff,
            'labels': [str(l) for l in self.labels]
        }
