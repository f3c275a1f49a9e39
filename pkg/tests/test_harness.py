import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from respec.lib import capacity, designer, geometry, harness, mesh as meshing
from respec.lib.errors import (BadDimension, InsufficientData, InvariantViolation,
                               MissingVectors)
from respec.lib.types.run import ConvergenceRow, ConvergenceRun
from respec.lib.types.scaling_law import ScalingLaw
from respec.lib.types.slit_mesh import GradingSpec
from respec.lib.types.solver_config import SolverConfig
from respec.lib.types.spectrum import Label, Spectrum

PI2 = math.pi ** 2


@pytest.fixture
def sealed(square_scene):
    grading = GradingSpec.for_domain(square_scene, 1. / 8.)
    return meshing.seal_window(meshing.triangulate(square_scene, grading), 0)


def _spectrum(vectors):
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    count = vectors.shape[1]
    return Spectrum(np.ones(count), np.zeros(count), vectors)


def _inside_only(mesh, k=0):
    inside = np.unique(mesh.triangles[mesh.regions == k])
    outside = np.unique(mesh.triangles[mesh.regions != k])
    u = np.zeros(mesh.n_nodes)
    u[np.setdiff1d(inside, outside)] = 1.
    return u


def _synthetic_run(dtildes, rate_factors):
    rows = [ConvergenceRow(0.5 / (i + 1), dtilde=d, rate_factor=r)
            for i, (d, r) in enumerate(zip(dtildes, rate_factors))]
    return ConvergenceRun(None, [r.eps for r in rows], rows)


def test_localization_on_resonator_support(square_scene):
    mesh = meshing.triangulate(square_scene, GradingSpec.for_domain(square_scene, 1. / 8.))
    report = harness.localization(_spectrum(_inside_only(mesh)), mesh, square_scene)
    assert_allclose(report.resonator_fraction(0, 0), 1.)
    assert_allclose(report.bulk_fraction(0), 0., atol=1e-15)
    assert report.labels == [Label.resonator(0)]


def test_constant_vector_on_sealed_mesh(sealed, square_scene):
    report = harness.localization(_spectrum(np.ones(sealed.n_nodes)), sealed, square_scene)
    assert_allclose(report.resonator_fraction(0, 0), 0.0625, rtol=1e-10)
    assert_allclose(report.fractions.sum(axis=1), 1., atol=1e-8)
    assert report.labels == [Label.bulk()]
    assert_allclose(report.defects[0], 0.0625, rtol=1e-10)


def test_concentration_defect_vanishes_for_box_constant(sealed, square_scene):
    u = np.zeros(sealed.n_nodes)
    u[np.unique(sealed.triangles[sealed.regions == 0])] = -3.
    report = harness.localization(_spectrum(u), sealed, square_scene)
    assert report.labels == [Label.resonator(0)]
    assert_allclose(report.defects[0], 0., atol=1e-10)


def test_localization_needs_vectors(sealed, square_scene):
    spectrum = Spectrum([1.], [0.])
    with pytest.raises(MissingVectors):
        harness.localization(spectrum, sealed, square_scene)


def test_fit_rate_self_consistent():
    factors = [0.3, 0.2, 0.1, 0.05]
    fit = harness.fit_rate(_synthetic_run(factors, factors))
    assert_allclose(fit.slope, 1.)
    assert_allclose(fit.intercept, 0., atol=1e-12)
    assert fit.points == 4


def test_fit_rate_constant():
    fit = harness.fit_rate(_synthetic_run([0.01] * 4, [0.3, 0.2, 0.1, 0.05]))
    assert_allclose(fit.slope, 0., atol=1e-12)


def test_fit_rate_needs_three_rows():
    with pytest.raises(InsufficientData):
        harness.fit_rate(_synthetic_run([0.1, 0.05], [0.3, 0.2]))
    run = _synthetic_run([0.1, 0.05, 0.], [0.3, 0.2, 0.1])
    with pytest.raises(InsufficientData):
        harness.fit_rate(run)


def test_schedule_must_decrease(square_scene):
    with pytest.raises(InvariantViolation):
        harness.run_convergence(square_scene, ScalingLaw(2, 2.5), [0.2, 0.3], 3, 30.)


def test_three_dimensional_law_rejected(square_scene):
    with pytest.raises(BadDimension):
        harness.run_convergence(square_scene, ScalingLaw(3, 1.), [0.3, 0.2], 3, 30.)


def test_run_without_resonators(unit_square, tmp_path):
    config = SolverConfig(base_h=1. / 16.)
    run = harness.run_convergence(unit_square, [], [0.4, 0.3], 4, 60., config)
    assert not run.failed
    assert_allclose(run.limit.values, PI2 * np.array([2., 5., 5.]))
    for row in run.rows:
        assert_allclose(row.eigenvalues, PI2 * np.array([2., 5., 5., 8.]), rtol=0.1)
        assert 0. < row.dtilde < 1e-3
        assert row.h_min > 0. and row.residual_max <= config.eig_tol
        assert row.labels() == ['Bulk'] * 4

    path = str(tmp_path / 'run.csv')
    harness.write_run_csv(run, path)
    again = harness.read_run_csv(path)
    assert [r.eps for r in again.rows] == [0.4, 0.3]
    assert_allclose(again.column('dtilde'), run.column('dtilde'), rtol=0)
    assert again.rows[0].labels() == run.rows[0].labels()


def test_single_row_run(unit_square):
    run = harness.run_convergence(unit_square, [], [0.3], 2, 30., SolverConfig(base_h=1. / 8.))
    assert len(run.rows) == 1
    with pytest.raises(InsufficientData):
        harness.fit_rate(run)


def test_failed_row_is_recorded(unit_square):
    config = SolverConfig(base_h=1. / 16., eig_tol=1e-300, eig_maxiter=2)
    run = harness.run_convergence(unit_square, [], [0.4, 0.3], 3, 60., config)
    assert run.failed
    assert all(r.error['error'] == 'NoConvergence' for r in run.rows)
    assert all(len(r.eigenvalues) == 3 for r in run.rows)


@pytest.mark.slow
def test_resonator_run_approaches_limit(square_scene):
    config = SolverConfig(base_h=1. / 16., threads=4)
    law = ScalingLaw(2, designer.F(4.))
    run = harness.run_convergence(square_scene, law, [0.4, 0.3, 0.2, 0.15], 4, 30., config)
    assert not run.failed, [r.error for r in run.rows]
    assert_allclose(run.gammas, [4.])

    for row in run.rows:
        assert row.labels().count('Resonator(0)') <= 1
    for row in run.rows[-2:]:
        assert row.labels().count('Resonator(0)') == 1

    dtilde = run.column('dtilde')
    assert dtilde[-1] <= 0.1
    assert np.count_nonzero(np.diff(dtilde) > 0.) <= 1, dtilde

    last = run.rows[-1]
    report = last.localization
    j = report.labels.index(Label.resonator(0))
    assert report.resonator_fraction(j, 0) >= 0.8
    assert abs(last.eigenvalues[j] - 4.) <= 0.15 * 4.
    for i, label in enumerate(report.labels):
        if label == Label.bulk() and last.eigenvalues[i] < 30.:
            assert report.resonator_mass(i) <= 0.2


@pytest.mark.slow
@pytest.mark.parametrize('gamma', [2., 4.])
def test_resonator_eigenvalue_tracks_gamma(square_scene, gamma):
    eps = 0.25
    law = ScalingLaw(2, designer.F(gamma))
    # the window of the law at eps and the one a schedule step further
    d_grid = [geometry.window_scale(law, 0.2), geometry.window_scale(law, eps)]
    scan = harness.monotone_window_scan(square_scene, eps, 0, d_grid, 2,
                                        SolverConfig(base_h=1. / 16.))
    errors = []
    for d, values in zip(d_grid, scan.table):
        resonator = square_scene.resonators[0].replace(eps=eps, d=d)
        gamma_eps = capacity.gamma_eps_for(resonator, 'asymptotic')
        errors.append(abs(values[0] - gamma_eps) / gamma_eps)
    assert_allclose(gamma_eps, gamma)
    assert errors[1] <= 0.15
    assert errors[0] < errors[1], errors


@pytest.mark.slow
def test_window_scan_is_monotone(square_scene):
    config = SolverConfig(base_h=1. / 16., threads=2)
    d_grid = [2e-4, 5e-4, 1e-3, 2e-3, 4e-3]
    scan = harness.monotone_window_scan(square_scene, 0.25, 0, d_grid, 3, config,
                                        threshold=2. * PI2)
    assert scan.table.shape == (5, 3)
    assert scan.monotone, scan.violations
    assert scan.table[-1, 0] > scan.table[0, 0]
