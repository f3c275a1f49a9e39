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
import math

import numpy as np

from respec.lib.errors import (BadDimension, CutoffMismatch, EmptySet, InvariantViolation,
                               ScaleError)
from respec.lib.types.spectrum import Label, SpectrumSet


class RateFactor:

    def __init__(self, n, eps, gamma_err=0.):
        self.n = int(n)
        self.eps = float(eps)
        self.gamma_err = float(gamma_err)


def rect_dirichlet_eigs(a, b, count):
    """ First count values of pi^2 (p^2 / a^2 + q^2 / b^2), p, q >= 1
    """
    if count < 1:
        raise InvariantViolation('count must be at least 1', count=count)
    if not (a > 0 and b > 0):
        raise InvariantViolation('rectangle sides must be positive', a=a, b=b)
    index = np.arange(1, count + 1, dtype=np.float64)
    p, q = np.meshgrid(index, index)
    values = np.sort((math.pi ** 2 * (p ** 2 / a ** 2 + q ** 2 / b ** 2)).ravel())[:count]
    return SpectrumSet(values)


def limit_spectrum(dirichlet, gammas):
    """ Multiset union of the bulk spectrum and the resonator values
    """
    gammas = [float(g) for g in gammas]
    for g in gammas:
        if not (math.isfinite(g) and g >= 0.):
            raise InvariantViolation('resonator values must be finite and nonnegative', gamma=g)
    values = np.concatenate([dirichlet.values, gammas])
    labels = list(dirichlet.labels) + [Label.resonator(k) for k in range(len(gammas))]
    cutoff = max([dirichlet.cutoff] + gammas)
    return SpectrumSet(values, cutoff, labels)


def _values(X):
    values = X.values if isinstance(X, SpectrumSet) else np.asarray(X, dtype=np.float64).ravel()
    if not len(values):
        raise EmptySet('distance to an empty set is undefined')
    return values


def directed_hausdorff(X, Y):
    """ sup over x in X of the distance from x to Y
    """
    x, y = _values(X), _values(Y)
    return float(np.max(np.min(np.abs(x[:, None] - y[None, :]), axis=1)))


def hausdorff(X, Y):
    return max(directed_hausdorff(X, Y), directed_hausdorff(Y, X))


def _transform(X):
    return 1. / (1. + _values(X))


def tilde_hausdorff(X, Y):
    """ Hausdorff distance after x -> 1 / (1 + x)

        both sets must be truncated at the same cutoff
    """
    if isinstance(X, SpectrumSet) and isinstance(Y, SpectrumSet) and X.cutoff != Y.cutoff:
        raise CutoffMismatch('cutoffs differ', cutoffs=[X.cutoff, Y.cutoff])
    x, y = _values(X), _values(Y)
    if x.min() < 0. or y.min() < 0.:
        raise InvariantViolation('spectra must be nonnegative')
    return hausdorff(_transform(x), _transform(y))


def tilde_directed(X, Y):
    return directed_hausdorff(_transform(X), _transform(Y))


def truncation_bound(cutoff):
    """ Largest contribution of the spectrum above cutoff to the weighted distance
    """
    return 1. / (1. + cutoff)


def rate_factor(rf):
    """ gamma_err + eps |ln eps|^(3/2) for n = 2, gamma_err + eps for n >= 3
    """
    if rf.n < 2:
        raise BadDimension('dimension must be at least 2', n=rf.n)
    if not 0. < rf.eps < 1.:
        raise ScaleError('eps must lie in (0, 1)', eps=rf.eps)
    if rf.gamma_err < 0.:
        raise InvariantViolation('gamma error must be nonnegative', gamma_err=rf.gamma_err)
    if rf.n == 2:
        return rf.gamma_err + rf.eps * abs(math.log(rf.eps)) ** 1.5
    return rf.gamma_err + rf.eps


def eta_eps(n, eps):
    if n < 2:
        raise BadDimension('dimension must be at least 2', n=n)
    if n == 2:
        return eps * eps * abs(math.log(eps))
    return eps * eps


def multiplicity_in(spectrum, value, radius):
    """ Number of values in [value - radius, value + radius]
    """
    values = _values(spectrum) if len(spectrum) else np.empty(0)
    return int(np.count_nonzero(np.abs(values - value) <= radius))
