import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.io import mmread
from scipy.sparse import diags, identity

from respec.lib import designer, geometry, mesh as meshing, numerics
from respec.lib.errors import (CountTooLarge, DegenerateElement, EmptySystem, NoConvergence,
                               NotPositiveDefinite)
from respec.lib.types.scaling_law import ScalingLaw
from respec.lib.types.slit_mesh import GradingSpec, NodeTag, SlitMesh
from respec.lib.types.solver_config import SolverConfig

PI2 = math.pi ** 2


@pytest.fixture
def lattice(unit_square):
    return meshing.triangulate(unit_square, GradingSpec(0.25))


def test_reference_element():
    points = np.array([[[0., 0.], [1., 0.], [0., 1.]]])
    Ke, Me, area = numerics.element_matrices(points)
    assert_allclose(area, [0.5])
    assert_allclose(Ke[0], [[1., -0.5, -0.5], [-0.5, 0.5, 0.], [-0.5, 0., 0.5]])
    assert_allclose(Me[0], np.array([[2., 1., 1.], [1., 2., 1.], [1., 1., 2.]]) / 24.)


def test_stiffness_kernel(lattice):
    K, M = numerics.assemble(lattice)
    assert_allclose(np.asarray(K.sum(axis=1)).ravel(), 0., atol=1e-12)
    assert_allclose(M.sum(), 1.)
    assert abs(K - K.T).max() < 1e-14


def test_degenerate_element():
    mesh = SlitMesh([[0., 0.], [1., 0.], [2., 0.]], [0, 0, 0], [-1, -1, -1], [[0, 1, 2]])
    with pytest.raises(DegenerateElement) as e:
        numerics.assemble(mesh)
    assert e.value.details['element'] == 0


def test_dirichlet_elimination(lattice):
    K, M = numerics.assemble(lattice)
    K_r, M_r, dof_map = numerics.apply_dirichlet(K, M, lattice)
    assert K_r.shape == (25, 25)
    assert len(dof_map) == 25
    full = numerics.expand(np.ones(25), dof_map, lattice.n_nodes)
    assert full.sum() == 25.
    assert np.all(full[lattice.tags == NodeTag.DIRICHLET] == 0.)


def test_no_boundary_nodes_keeps_system(lattice):
    free = lattice.copy()
    free.tags[:] = NodeTag.INTERIOR
    K, M = numerics.assemble(free)
    K_r, M_r, dof_map = numerics.apply_dirichlet(K, M, free)
    assert_array_equal(dof_map, np.arange(free.n_nodes))
    assert abs(K_r - K).max() == 0.


def test_only_boundary_nodes():
    mesh = SlitMesh([[0., 0.], [1., 0.], [0., 1.]], [NodeTag.DIRICHLET] * 3, [-1, -1, -1],
                    [[0, 1, 2]])
    K, M = numerics.assemble(mesh)
    with pytest.raises(EmptySystem):
        numerics.apply_dirichlet(K, M, mesh)


def test_solve_spd_examples():
    b = np.array([3., -1., 2.])
    assert_allclose(numerics.solve_spd(identity(3), b), b)
    x = numerics.solve_spd(diags(np.arange(1., 6.)), np.ones(5))
    assert_allclose(x, 1. / np.arange(1., 6.), rtol=1e-9)
    assert_array_equal(numerics.solve_spd(identity(3), np.zeros(3)), np.zeros(3))


def test_solve_spd_indefinite():
    with pytest.raises(NotPositiveDefinite):
        numerics.solve_spd(diags([1., -1., 2.]), np.ones(3))


def test_solve_spd_iteration_cap(lattice):
    K, M = numerics.assemble(lattice)
    K_r, _, _ = numerics.apply_dirichlet(K, M, lattice)
    with pytest.raises(NoConvergence) as e:
        numerics.solve_spd(K_r, np.arange(1., 26.), rel_tol=1e-14, maxiter=1)
    assert e.value.partial is not None


def test_decoupled_pencil():
    spectrum = numerics.smallest_eigenpairs(diags([2., 6.]), diags([1., 2.]), 2)
    assert_allclose(spectrum.eigenvalues, [2., 3.])
    assert spectrum.method == 'dense'
    assert spectrum.residual_max < 1e-10


def test_count_too_large():
    with pytest.raises(CountTooLarge):
        numerics.smallest_eigenpairs(diags([2., 6.]), diags([1., 2.]), 3)


def test_unit_square_first_eigenvalue(unit_square):
    config = SolverConfig(base_h=1. / 32.)
    mesh, spectrum = numerics.solve_domain(unit_square, 4, config)
    assert spectrum.method == 'lobpcg'
    assert_allclose(spectrum.eigenvalues[0], 2. * PI2, rtol=5e-3)
    assert_allclose(spectrum.eigenvalues, PI2 * np.array([2., 5., 5., 8.]), rtol=3e-2)
    assert spectrum.residual_max <= config.eig_tol
    assert len(spectrum.dof_map) == spectrum.eigenvectors.shape[0]


def test_seeded_solve_is_reproducible(unit_square):
    config = SolverConfig(base_h=1. / 16., seed=7)
    runs = [numerics.solve_domain(unit_square, 3, config)[1] for _ in range(5)]
    assert runs[0].method == 'lobpcg'
    for spectrum in runs[1:]:
        assert spectrum.eigenvalues.tobytes() == runs[0].eigenvalues.tobytes()
        assert spectrum.eigenvectors.tobytes() == runs[0].eigenvectors.tobytes()


def test_eigenvectors_are_mass_orthonormal(unit_square):
    config = SolverConfig(base_h=1. / 16.)
    mesh, spectrum = numerics.solve_domain(unit_square, 4, config)
    K, M = numerics.assemble(mesh)
    _, M_r, _ = numerics.apply_dirichlet(K, M, mesh)
    V = spectrum.eigenvectors
    assert_allclose(V.T @ (M_r @ V), np.eye(4), atol=10. * config.eig_tol)


def test_dense_eigenvectors_are_mass_orthonormal():
    M = diags([1e-8, 1., 1e4])
    values, vectors = numerics.dense_eigenpairs(diags([3e-8, 1., 2e4]), M, 3)
    assert_allclose(values, [1., 2., 3.])
    assert_allclose(vectors.T @ (M @ vectors), np.eye(3), atol=1e-12)


def test_relative_residuals_scale_free():
    K, M = diags([2., 6., 9.]), diags([1., 2., 3.])
    vectors = np.array([[1., 0.1], [0., 1.], [0., 0.]])
    values = np.array([2., 3.])
    first = numerics.relative_residuals(K, M, values, vectors)
    second = numerics.relative_residuals(1e6 * K, 1e6 * M, values, 1e-3 * vectors)
    assert_allclose(first, second, rtol=1e-12)
    assert first[0] == 0.
    assert first[1] > 0.


def test_refined_mesh_lowers_eigenvalues(unit_square):
    mesh = meshing.triangulate(unit_square, GradingSpec(1. / 8.))
    refined = meshing.refine_uniform(mesh)
    assert refined.n_triangles == 4 * mesh.n_triangles
    assert meshing.validate(refined).ok
    tol = 1e-8
    values = []
    for m in (mesh, refined):
        K, M = numerics.assemble(m)
        K_r, M_r, _ = numerics.apply_dirichlet(K, M, m)
        values.append(numerics.smallest_eigenpairs(K_r, M_r, 4, tol=tol).eigenvalues)
    coarse, fine = values
    assert np.all(fine <= coarse * (1. + 10. * tol))
    assert np.all(fine >= 2. * PI2 * (1. - 1e-9))


def test_sealed_resonator_has_zero_mode(square_scene):
    grading = GradingSpec.for_domain(square_scene, 1. / 8.)
    sealed = meshing.seal_window(meshing.triangulate(square_scene, grading), 0)
    K, M = numerics.assemble(sealed)
    K_r, M_r, _ = numerics.apply_dirichlet(K, M, sealed)
    spectrum = numerics.smallest_eigenpairs(K_r, M_r, 2)
    assert abs(spectrum.eigenvalues[0]) < 1e-6
    assert spectrum.eigenvalues[1] > 1.


def test_energy_and_integrals(lattice):
    K, _ = numerics.assemble(lattice)
    u = lattice.nodes[:, 0] * (1. - lattice.nodes[:, 1])
    assert_allclose(numerics.dirichlet_energy(lattice, u), u @ (K @ u), rtol=1e-12)
    integrals, squares = numerics.element_integrals(lattice, np.ones(lattice.n_nodes))
    assert_allclose(integrals.sum(), 1.)
    assert_allclose(squares.sum(), 1.)


def test_richardson():
    assert_allclose(numerics.richardson([14.], [11.]), [10.])


def test_matrix_market(lattice, tmp_path):
    K, _ = numerics.assemble(lattice)
    path = str(tmp_path / 'K.mtx')
    numerics.write_matrix_market(path, K)
    assert_allclose(mmread(path).toarray(), K.toarray())


@pytest.mark.slow
def test_unit_square_benchmark(unit_square):
    exact = PI2 * np.array([2., 5., 5., 8., 10.])
    errors = []
    for h in (1. / 16., 1. / 32., 1. / 64.):
        _, spectrum = numerics.solve_domain(unit_square, 5, SolverConfig(base_h=h))
        errors.append(spectrum.eigenvalues[:3] - exact[:3])
        last = spectrum
    assert_allclose(last.eigenvalues, exact, rtol=1e-2)
    errors = np.array(errors)
    assert np.all(errors > 0.)
    orders = np.log2(errors[:-1] / errors[1:])
    assert np.all((orders >= 1.7) & (orders <= 2.3)), orders


@pytest.mark.slow
def test_dense_solve_on_graded_slit_mesh(square_scene):
    law = ScalingLaw(2, designer.F(4.))
    level = geometry.rescale(square_scene, 0.2, [geometry.window_scale(law, 0.2)])
    mesh = meshing.triangulate(level, GradingSpec.for_domain(level, 1. / 4., ratio=2.))
    assert mesh.h_min < 1e-5
    K, M = numerics.assemble(mesh)
    K_r, M_r, _ = numerics.apply_dirichlet(K, M, mesh)
    values, vectors = numerics.dense_eigenpairs(K_r, M_r, 4)
    residuals = numerics.relative_residuals(K_r, M_r, values, vectors)
    assert residuals.max() <= SolverConfig().eig_tol / 100., residuals
    assert 3. < values[0] < 5.
