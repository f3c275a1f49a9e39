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
import logging
import warnings

import numpy as np
import pyamg
from scipy.io import mmwrite
from scipy.linalg import eigh
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import LinearOperator, cg, lobpcg, norm as sparse_norm

from respec.lib import mesh as meshing
from respec.lib.errors import (CountTooLarge, DegenerateElement, EmptySystem, InvariantViolation,
                               NoConvergence, NotPositiveDefinite)
from respec.lib.types.slit_mesh import GradingSpec, NodeTag
from respec.lib.types.spectrum import Spectrum

logger = logging.getLogger(__name__)

BLOCK_PADDING = 5
# below block * DENSE_FACTOR unknowns the block method is not applicable
DENSE_FACTOR = 5
EIGEN_RESTARTS = 3
CG_RESTARTS = 3
ZERO_AREA = 1e-14

_REFERENCE_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.


def element_matrices(points):
    """ P1 stiffness and mass of every triangle

        points - (T, 3, 2) vertex coordinates
        returns (Ke, Me, signed areas)
    """
    p0, p1, p2 = points[:, 0], points[:, 1], points[:, 2]
    e1, e2 = p1 - p0, p2 - p0
    area = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    # edge opposite to each vertex
    opposite = np.stack([p2 - p1, p0 - p2, p1 - p0], axis=1)
    size = np.abs(area)
    Ke = np.einsum('tik,tjk->tij', opposite, opposite) / (4. * size)[:, None, None]
    Me = size[:, None, None] * _REFERENCE_MASS
    return Ke, Me, area


def _scatter(triangles, local, n):
    t = len(triangles)
    rows = np.broadcast_to(triangles[:, :, None], (t, 3, 3)).ravel()
    cols = np.broadcast_to(triangles[:, None, :], (t, 3, 3)).ravel()
    A = coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    return A


def assemble(mesh):
    """ Global P1 stiffness K and mass M

        duplicated slit nodes stay independent unknowns
    """
    points = mesh.nodes[mesh.triangles]
    Ke, Me, area = element_matrices(points)
    scale = mesh.diameters() ** 2
    degenerate = np.flatnonzero(np.abs(area) <= ZERO_AREA * scale)
    if len(degenerate):
        raise DegenerateElement('triangle %d has zero area' % degenerate[0],
                                element=degenerate[0], count=len(degenerate))
    K = _scatter(mesh.triangles, Ke, mesh.n_nodes)
    M = _scatter(mesh.triangles, Me, mesh.n_nodes)
    logger.debug('assembled %d x %d, nnz(K)=%d', K.shape[0], K.shape[1], K.nnz)
    return K, M


def apply_dirichlet(K, M, mesh):
    """ Drop Dirichlet rows and columns

        returns (K_r, M_r, dof_map) with dof_map[reduced] = full
    """
    dof_map = np.flatnonzero(mesh.tags != NodeTag.DIRICHLET)
    if not len(dof_map):
        raise EmptySystem('every node is on the Dirichlet boundary')
    K_r = K[dof_map][:, dof_map].tocsr()
    M_r = M[dof_map][:, dof_map].tocsr()
    return K_r, M_r, dof_map


def expand(vector, dof_map, n_full):
    """ Reduced -> full nodal values, zero on eliminated nodes
    """
    vector = np.asarray(vector)
    full = np.zeros((n_full,) + vector.shape[1:], dtype=vector.dtype)
    full[dof_map] = vector
    return full


def solve_spd(A, b, rel_tol=1e-10, maxiter=None, x0=None):
    """ Jacobi preconditioned conjugate gradients

        raises NotPositiveDefinite for a nonpositive diagonal,
        NoConvergence when the iteration cap is hit
    """
    A = csr_matrix(A)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    norm_b = np.linalg.norm(b)
    if norm_b == 0.:
        return np.zeros(n)

    diagonal = A.diagonal()
    if np.any(diagonal <= 0.):
        raise NotPositiveDefinite('matrix has nonpositive diagonal entries',
                                  rows=np.flatnonzero(diagonal <= 0.)[:10].tolist())
    inverse = 1. / diagonal
    jacobi = LinearOperator((n, n), matvec=lambda v: inverse * np.ravel(v), dtype=np.float64)

    budget = 20 * n if maxiter is None else int(maxiter)
    iterations = [0]

    def count(_):
        iterations[0] += 1

    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=np.float64)
    residual = np.inf
    for _ in range(CG_RESTARTS):
        remaining = budget - iterations[0]
        if remaining <= 0:
            break
        x, info = cg(A, b, x0=x, rtol=rel_tol, atol=0., maxiter=remaining, M=jacobi,
                     callback=count)
        residual = np.linalg.norm(A @ x - b) / norm_b
        if residual <= rel_tol:
            logger.debug('cg converged in %d iterations, residual %.3e', iterations[0], residual)
            return x
        if info < 0:
            break

    raise NoConvergence('cg stopped at relative residual %.3e after %d iterations'
                        % (residual, iterations[0]), partial=x, residual=float(residual),
                        iterations=iterations[0])


def relative_residuals(K, M, values, vectors):
    """ Normwise backward error ||K u - lambda M u|| / ((||K|| + |lambda| ||M||) ||u||)
        per column

        unchanged by rescaling K, M or u, and defined for lambda = 0
    """
    R = K @ vectors - (M @ vectors) * values[None, :]
    scale = (sparse_norm(csr_matrix(K), 1) + np.abs(values) * sparse_norm(csr_matrix(M), 1)) * \
        np.linalg.norm(vectors, axis=0)
    return np.linalg.norm(R, axis=0) / np.where(scale > 0., scale, 1.)


def dense_eigenpairs(K, M, count):
    """ Smallest pairs from a dense solve of the diagonally scaled pencil

        graded meshes spread the mass diagonal over many decades, the scaling
        keeps the Cholesky factor of M accurate
    """
    Kd = K.toarray() if hasattr(K, "toarray") else np.asarray(K, dtype=np.float64)
    Md = M.toarray() if hasattr(M, "toarray") else np.asarray(M, dtype=np.float64)
    scale = 1. / np.sqrt(np.diag(Md))
    values, vectors = eigh(Kd * scale[:, None] * scale[None, :],
                           Md * scale[:, None] * scale[None, :], subset_by_index=[0, count - 1])
    return values, vectors * scale[:, None]


def smallest_eigenpairs(K, M, count, tol=1e-6, seed=0, maxiter=400, shift=1.):
    """ Smallest generalized eigenpairs of K u = lambda M u

        block method with an algebraic multigrid preconditioner on K + shift M,
        dense fallback for small systems. The start block is seeded.
    """
    K = csr_matrix(K)
    M = csr_matrix(M)
    n = K.shape[0]
    if count < 1:
        raise InvariantViolation('at least one eigenpair must be requested', count=count)
    if count > n:
        raise CountTooLarge('%d eigenpairs requested from %d unknowns' % (count, n),
                            count=count, n_dof=n)

    block = min(count + BLOCK_PADDING, n)
    if n < DENSE_FACTOR * block:
        values, vectors = dense_eigenpairs(K, M, count)
        residuals = relative_residuals(K, M, values, vectors)
        spectrum = Spectrum(values, residuals, vectors, seed=seed, method='dense')
        if residuals.max() > tol:
            raise NoConvergence('dense solve residual %.3e above %.3e' % (residuals.max(), tol),
                                partial=spectrum)
        return spectrum

    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, block))
    ml = pyamg.smoothed_aggregation_solver(
        (K + shift * M).tocsr(), smooth=('jacobi', {'omega': 4. / 3., 'weighting': 'local'}))
    preconditioner = ml.aspreconditioner(cycle='V')

    lumped = np.asarray(M.sum(axis=1)).ravel()
    block_tol = tol * np.sqrt(np.median(lumped))
    iterations = 0
    values = residuals = None
    for attempt in range(EIGEN_RESTARTS):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', UserWarning)
            values, X, history = lobpcg(K, X, B=M, M=preconditioner, tol=block_tol,
                                        maxiter=maxiter, largest=False,
                                        retResidualNormsHistory=True)
        iterations += len(history)
        order = np.argsort(values)
        values, X = values[order], X[:, order]
        residuals = relative_residuals(K, M, values[:count], X[:, :count])
        logger.debug('block solve attempt %d: %d iterations, residual %.3e',
                     attempt, len(history), residuals.max())
        if residuals.max() <= tol:
            return Spectrum(values[:count], residuals, X[:, :count], seed=seed,
                            method='lobpcg', iterations=iterations)
        block_tol /= 100.

    partial = Spectrum(values[:count], residuals, X[:, :count], seed=seed, method='lobpcg',
                       iterations=iterations)
    raise NoConvergence('eigen residual %.3e above %.3e' % (residuals.max(), tol),
                        partial=partial, iterations=iterations)


def solve_domain(domain, count, config, grading=None, extra_sources=()):
    """ Mesh, assemble and solve the slit domain

        returns (mesh, spectrum) with spectrum.dof_map set
    """
    if grading is None:
        grading = GradingSpec.for_domain(domain, config.base_h, config.ratio, config.refinement)
    mesh = meshing.triangulate(domain, grading, extra_sources)
    K, M = assemble(mesh)
    K_r, M_r, dof_map = apply_dirichlet(K, M, mesh)
    try:
        spectrum = smallest_eigenpairs(K_r, M_r, count, tol=config.eig_tol, seed=config.seed,
                                       maxiter=config.eig_maxiter, shift=config.precond_shift)
    except NoConvergence as e:
        if e.partial is not None:
            e.partial.dof_map = dof_map
            e.partial.n_nodes = mesh.n_nodes
        raise
    spectrum.dof_map = dof_map
    spectrum.n_nodes = mesh.n_nodes
    return mesh, spectrum


def dirichlet_energy(mesh, u):
    """ sum over triangles of |grad u|^2 area, computed element by element
    """
    points = mesh.nodes[mesh.triangles]
    p0, p1, p2 = points[:, 0], points[:, 1], points[:, 2]
    opposite = np.stack([p2 - p1, p0 - p2, p1 - p0], axis=1)
    e1, e2 = p1 - p0, p2 - p0
    area = np.abs(0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]))
    weighted = np.einsum('ti,tik->tk', u[mesh.triangles], opposite)
    return float(np.sum(np.sum(weighted * weighted, axis=1) / (4. * area)))


def element_integrals(mesh, u):
    """ Per triangle integrals of u and u^2 for a P1 field

        u - (N,) or (N, count)
    """
    points = mesh.nodes[mesh.triangles]
    e1 = points[:, 1] - points[:, 0]
    e2 = points[:, 2] - points[:, 0]
    area = np.abs(0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]))
    values = np.asarray(u)[mesh.triangles]
    total = values.sum(axis=1)
    squares = (values * values).sum(axis=1)
    shape = (-1,) + (1,) * (values.ndim - 2)
    area = area.reshape(shape)
    return area * total / 3., area * (squares + total * total) / 12.


def richardson(coarse, fine, order=2, ratio=2.):
    """ Extrapolate eigenvalues from meshes with h and h / ratio
    """
    coarse = np.asarray(coarse, dtype=np.float64)
    fine = np.asarray(fine, dtype=np.float64)
    return fine + (fine - coarse) / (ratio ** order - 1.)


def write_matrix_market(path, A):
    mmwrite(path, coo_matrix(A), field='real', symmetry='general')
