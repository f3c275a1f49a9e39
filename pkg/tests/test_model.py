import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from respec.lib import model
from respec.lib.errors import (BadDimension, CutoffMismatch, EmptySet, InvariantViolation,
                               ScaleError)
from respec.lib.types.spectrum import Label, SpectrumSet

PI2 = math.pi ** 2


def brute_force_hausdorff(X, Y):
    forward = max(min(abs(x - y) for y in Y) for x in X)
    backward = max(min(abs(x - y) for x in X) for y in Y)
    return max(forward, backward)


def test_rectangle_eigenvalues():
    assert_allclose(model.rect_dirichlet_eigs(1., 1., 4).values, PI2 * np.array([2., 5., 5., 8.]))
    assert_allclose(model.rect_dirichlet_eigs(2., 1., 1).values, [5. * PI2 / 4.])
    with pytest.raises(InvariantViolation):
        model.rect_dirichlet_eigs(1., 1., 0)


def test_limit_spectrum_union():
    dirichlet = SpectrumSet([2. * PI2, 5. * PI2])
    limit = model.limit_spectrum(dirichlet, [4.])
    assert_allclose(limit.values, [4., 2. * PI2, 5. * PI2])
    assert limit.labels[0] == Label.resonator(0)
    assert limit.labels[1] == Label.bulk()


def test_limit_spectrum_without_resonators():
    dirichlet = SpectrumSet([2. * PI2, 5. * PI2])
    limit = model.limit_spectrum(dirichlet, [])
    assert_allclose(limit.values, dirichlet.values)


def test_limit_spectrum_keeps_multiplicity():
    dirichlet = SpectrumSet([2. * PI2, 5. * PI2])
    limit = model.limit_spectrum(dirichlet, [2. * PI2])
    assert len(limit) == 3
    assert limit.labels.count(Label.bulk()) == 2
    assert limit.labels.count(Label.resonator(0)) == 1


def test_hausdorff_examples():
    assert model.hausdorff([1.], [1.]) == 0.
    assert model.hausdorff([0., 1.], [0.]) == 1.
    assert model.directed_hausdorff([0.], [0., 1.]) == 0.
    with pytest.raises(EmptySet):
        model.hausdorff([], [1.])


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        X = rng.uniform(0., 50., rng.integers(1, 11))
        Y = rng.uniform(0., 50., rng.integers(1, 11))
        assert model.hausdorff(X, Y) == brute_force_hausdorff(X, Y)
        tX, tY = 1. / (1. + X), 1. / (1. + Y)
        assert model.tilde_hausdorff(X, Y) == brute_force_hausdorff(tX, tY)


def test_metric_axioms():
    rng = np.random.default_rng(1)
    for _ in range(200):
        X, Y, Z = (rng.uniform(0., 30., rng.integers(1, 8)) for _ in range(3))
        assert model.tilde_hausdorff(X, X) == 0.
        assert model.tilde_hausdorff(X, Y) == model.tilde_hausdorff(Y, X)
        assert model.tilde_hausdorff(X, Z) <= \
            model.tilde_hausdorff(X, Y) + model.tilde_hausdorff(Y, Z) + 1e-15


def test_tilde_hausdorff_examples():
    assert model.tilde_hausdorff([0.], [1.]) == 0.5
    values = [3., 7., 11.]
    assert model.tilde_hausdorff(values, values) == 0.
    with pytest.raises(CutoffMismatch):
        model.tilde_hausdorff(SpectrumSet([1.], 10.), SpectrumSet([1.], 20.))
    with pytest.raises(InvariantViolation):
        model.tilde_hausdorff([-1.], [1.])


def test_directed_halves():
    limit, computed = [4., 20.], [4.1, 20., 30.]
    inside = model.tilde_directed(limit, computed)
    outside = model.tilde_directed(computed, limit)
    assert max(inside, outside) == model.tilde_hausdorff(limit, computed)
    assert outside > inside


def test_rate_factor_examples():
    assert_allclose(model.rate_factor(model.RateFactor(2, math.exp(-1.))), 0.3679, rtol=1e-4)
    assert_allclose(model.rate_factor(model.RateFactor(3, 0.1, 0.05)), 0.15)
    with pytest.raises(ScaleError):
        model.rate_factor(model.RateFactor(2, 1.))
    with pytest.raises(BadDimension):
        model.rate_factor(model.RateFactor(1, 0.1))


def test_truncation_bound_and_eta():
    assert model.truncation_bound(9.) == 0.1
    assert_allclose(model.eta_eps(2, 0.1), 0.01 * math.log(10.))
    assert_allclose(model.eta_eps(3, 0.1), 0.01)


def test_multiplicity_in():
    spectrum = SpectrumSet([1., 5., 5., 9.])
    assert model.multiplicity_in(spectrum, 5., 0.5) == 2
    assert model.multiplicity_in(spectrum, 3., 0.5) == 0
