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
import os

import matplotlib
matplotlib.use('Agg')
from matplotlib.figure import Figure  # noqa: E402

import numpy as np  # noqa: E402

from respec.lib import harness  # noqa: E402
from respec.lib.errors import InsufficientData  # noqa: E402
from respec.lib.types.slit_mesh import NodeTag  # noqa: E402

logger = logging.getLogger(__name__)

# svg element ids and metadata are fixed
matplotlib.rcParams['svg.hashsalt'] = 'respec'
SVG_METADATA = {'Date': None}

TRAJECTORIES_NAME = 'trajectories.svg'
RATE_NAME = 'rate.svg'


def _save(fig, path):
    fig.savefig(path, format='svg', bbox_inches='tight', facecolor='white', edgecolor='none',
                metadata=SVG_METADATA)
    return path


def render_mesh_svg(mesh, path):
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(111)
    ax.triplot(mesh.nodes[:, 0], mesh.nodes[:, 1], mesh.triangles, color='0.55', linewidth=0.2)
    slit = np.isin(mesh.tags, (NodeTag.SLIT_A, NodeTag.SLIT_B))
    ends = mesh.tags == NodeTag.WINDOW_ENDPOINT
    ax.plot(mesh.nodes[slit, 0], mesh.nodes[slit, 1], '.', color='tab:red', markersize=1.5,
            label='slit')
    ax.plot(mesh.nodes[ends, 0], mesh.nodes[ends, 1], 'o', color='tab:blue', markersize=3,
            label='window end')
    ax.set_aspect('equal')
    ax.set_title('%d nodes, %d triangles, h in [%.2g, %.2g]'
                 % (mesh.n_nodes, mesh.n_triangles, mesh.h_min, mesh.h_max))
    ax.legend(loc='upper right', fontsize=8)
    return _save(fig, path)


def render_trajectories_svg(run, path):
    """ Computed eigenvalues against eps, limit values dashed
    """
    rows = [r for r in run.rows if r.eigenvalues]
    fig = Figure(figsize=(7, 5))
    ax = fig.add_subplot(111)
    if rows:
        eps = np.array([r.eps for r in rows])
        count = max(len(r.eigenvalues) for r in rows)
        for j in range(count):
            values = np.array([r.eigenvalues[j] if j < len(r.eigenvalues) else np.nan
                               for r in rows])
            ax.plot(eps, values, 'o-', markersize=3, label='lambda_%d' % (j + 1))
    if run.limit is not None:
        for value in run.limit.values:
            ax.axhline(value, color='0.4', linestyle='--', linewidth=0.8)
    if run.cutoff:
        ax.set_ylim(0., run.cutoff * 1.05)
    ax.invert_xaxis()
    ax.set_xlabel('eps')
    ax.set_ylabel('eigenvalue')
    ax.set_title('eigenvalue trajectories')
    ax.legend(loc='best', fontsize=8)
    return _save(fig, path)


def render_rate_svg(run, path, fit=None):
    """ log-log dtilde against the rate factor
    """
    rows = [r for r in run.rows if not r.failed and r.dtilde > 0 and r.rate_factor > 0]
    fig = Figure(figsize=(6, 5))
    ax = fig.add_subplot(111)
    if rows:
        x = np.array([r.rate_factor for r in rows])
        y = np.array([r.dtilde for r in rows])
        ax.loglog(x, y, 'o', label='dtilde')
        if fit is not None:
            xs = np.linspace(x.min(), x.max(), 50)
            ax.loglog(xs, np.exp(fit.intercept) * xs ** fit.slope, '-',
                      label='slope %.2f' % fit.slope)
        ax.legend(loc='best', fontsize=8)
    ax.set_xlabel('rate factor')
    ax.set_ylabel('dtilde')
    ax.set_title('convergence rate')
    return _save(fig, path)


def render_report(csv_path, out_dir):
    """ Trajectory and rate plots of a run csv, returns the written file names
    """
    run = harness.read_run_csv(csv_path)
    try:
        fit = harness.fit_rate(run)
    except InsufficientData as e:
        logger.warning('no rate fit: %s', e)
        fit = None
    render_trajectories_svg(run, os.path.join(out_dir, TRAJECTORIES_NAME))
    render_rate_svg(run, os.path.join(out_dir, RATE_NAME), fit)
    return [TRAJECTORIES_NAME, RATE_NAME], fit
