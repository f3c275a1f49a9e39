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
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from respec.lib import geometry, mesh as meshing, numerics
from respec.lib.errors import BadDimension, GeometryError, ScaleError
from respec.lib.types.capacity_result import (METHOD_ASYMPTOTIC_2D, METHOD_ASYMPTOTIC_3D,
                                              METHOD_FEM, CapacityResult)
from respec.lib.types.slit_mesh import GradingSpec, NodeTag
from respec.lib.types.solver_config import SolverConfig

logger = logging.getLogger(__name__)

METHOD_NAMES = {'fem': METHOD_FEM, 'asymptotic': METHOD_ASYMPTOTIC_2D}


def disk_grading(a, config=None):
    config = config or SolverConfig()
    base_h = config.capacity_base_h
    return GradingSpec(base_h, min(base_h, a / config.refinement), config.ratio)


def _energy(disk, config):
    """ Dirichlet energy of the discrete potential, (energy, potential) """
    K, _ = numerics.assemble(disk)
    tags = disk.tags
    free = np.flatnonzero(tags == NodeTag.INTERIOR)
    conductor = np.flatnonzero(tags == NodeTag.CONDUCTOR)
    potential = np.zeros(disk.n_nodes)
    potential[conductor] = 1.

    rhs = -(K[free][:, conductor] @ np.ones(len(conductor)))
    potential[free] = numerics.solve_spd(K[free][:, free], rhs, rel_tol=config.cg_rel_tol,
                                         maxiter=config.cg_maxiter)
    return float(potential @ (K @ potential)), potential


def capacity_fem_2d(a, grading=None, config=None):
    """ Energy of the potential equal to 1 on [-a, a] x {0} and 0 on the unit circle

        with capacity_extrapolate the energy is also computed on the red
        refinement of the disk and the pair is Richardson extrapolated,
        the raw fine energy stays on the result
    """
    if not 0. < a < 1.:
        raise GeometryError('window half-width must lie in (0, 1)', half_width=a)
    config = config or SolverConfig()
    grading = grading or disk_grading(a, config)
    disk = meshing.triangulate_disk(a, grading)
    energy, potential = _energy(disk, config)
    value = energy
    if config.capacity_extrapolate:
        coarse = energy
        disk = meshing.refine_uniform(disk)
        energy, potential = _energy(disk, config)
        value = numerics.richardson(coarse, energy)
        logger.debug('capacity a=%g: coarse %.6g fine %.6g', a, coarse, energy)
    stats = meshing.mesh_stats(disk)
    logger.info('capacity a=%g: %.6g on %d nodes', a, value, disk.n_nodes)
    return CapacityResult(value, METHOD_FEM, mesh=stats, potential=potential, disk=disk,
                          energy=energy)


def capacity_asymptotic(n, d, shape_cap=None):
    """ 2 pi / |ln d| for n = 2, d^(n - 2) cap(D) for n >= 3
    """
    if n < 2:
        raise BadDimension('dimension must be at least 2', n=n)
    if not 0. < d < 1.:
        raise ScaleError('d must lie in (0, 1)', d=d)
    if n == 2:
        return CapacityResult(2. * math.pi / abs(math.log(d)), METHOD_ASYMPTOTIC_2D)
    if shape_cap is None or not shape_cap > 0:
        raise GeometryError('capacity of the unscaled window is required for n >= 3')
    return CapacityResult(d ** (n - 2) * shape_cap, METHOD_ASYMPTOTIC_3D)


def gamma_eps_for(resonator, method='fem', config=None):
    """ cap(D_eps) / (4 eps^2 |B|) with the capacity from the chosen method
    """
    if method not in METHOD_NAMES:
        raise GeometryError('unknown capacity method %r' % method)
    resonator.validate()
    if method == 'fem':
        cap = capacity_fem_2d(resonator.window_halfwidth, config=config).value
    else:
        cap = capacity_asymptotic(2, resonator.d, resonator.ell).value
    return geometry.gamma_of(cap, resonator.volume)


def capacity_sweep(half_widths, config=None):
    """ capacity_fem_2d over several half-widths, results in input order
    """
    config = config or SolverConfig()
    with ThreadPoolExecutor(max_workers=config.threads) as executor:
        return list(executor.map(lambda a: capacity_fem_2d(a, config=config), half_widths))
