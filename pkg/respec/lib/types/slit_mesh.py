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
from enum import IntEnum

import numpy as np

from respec.lib.errors import InvariantViolation

NO_OWNER = -1
BULK_REGION = -1


class NodeTag(IntEnum):
    INTERIOR = 0
    DIRICHLET = 1
    SLIT_A = 2
    SLIT_B = 3
    WINDOW_ENDPOINT = 4
    # prescribed potential on the capacity segment
    CONDUCTOR = 5


class GradingSpec:
    """ Element size control

        base_h - size away from the windows
        min_h - size at the window endpoints
        ratio - growth factor between neighbouring elements
    """

    def __init__(self, base_h, min_h=None, ratio=1.5):
        self.base_h = float(base_h)
        self.min_h = self.base_h if min_h is None else float(min_h)
        self.ratio = float(ratio)
        if not 0 < self.min_h <= self.base_h:
            raise InvariantViolation('grading needs 0 < min_h <= base_h',
                                     min_h=self.min_h, base_h=self.base_h)
        if not 1. < self.ratio <= 2.:
            raise InvariantViolation('grading ratio must lie in (1, 2]', ratio=self.ratio)

    @staticmethod
    def for_domain(domain, base_h, ratio=1.5, refinement=8.):
        """ min_h = smallest window half-width / refinement
        """
        min_h = base_h
        for resonator in domain.resonators:
            min_h = min(min_h, resonator.window_halfwidth / refinement)
        return GradingSpec(base_h, min_h, ratio)

    def to_json(self):
        return {'base_h': self.base_h, 'min_h': self.min_h, 'ratio': self.ratio}


class SlitMesh:
    """ Triangulation with duplicated nodes along each slit

        nodes - (N, 2) coordinates
        tags - (N,) NodeTag values
        owners - (N,) resonator index of slit and window nodes, -1 elsewhere
        triangles - (T, 3) counterclockwise node ids
        regions - (T,) resonator index of the element, -1 for the bulk
        slit_pairs - {k: (P, 2) array of (side A, side B) ids}
        windows - {k: ids of the nodes on the closed window segment}
    """

    def __init__(self, nodes, tags, owners, triangles, regions=None, slit_pairs=None,
                 windows=None):
        self.nodes = np.asarray(nodes, dtype=np.float64).reshape(-1, 2)
        self.tags = np.asarray(tags, dtype=np.int64)
        self.owners = np.asarray(owners, dtype=np.int64)
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if regions is None:
            regions = np.full(len(self.triangles), BULK_REGION, dtype=np.int64)
        self.regions = np.asarray(regions, dtype=np.int64)
        self.slit_pairs = {int(k): np.asarray(v, dtype=np.int64).reshape(-1, 2)
                           for k, v in (slit_pairs or {}).items()}
        self.windows = {int(k): np.asarray(v, dtype=np.int64)
                        for k, v in (windows or {}).items()}

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def signed_areas(self):
        p = self.nodes[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def diameters(self):
        """ Longest edge of every triangle """
        p = self.nodes[self.triangles]
        lengths = [np.linalg.norm(p[:, i] - p[:, j], axis=1) for i, j in ((0, 1), (1, 2), (2, 0))]
        return np.max(np.stack(lengths, axis=1), axis=1)

    @property
    def h_min(self):
        if not self.n_triangles:
            return 0.
        return float(self.diameters().min())

    @property
    def h_max(self):
        if not self.n_triangles:
            return 0.
        return float(self.diameters().max())

    def edges(self):
        """ Unique undirected edges (E, 2) and how many triangles use each
        """
        t = self.triangles
        all_edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        all_edges.sort(axis=1)
        return np.unique(all_edges, axis=0, return_counts=True)

    def copy(self):
        return SlitMesh(self.nodes.copy(), self.tags.copy(), self.owners.copy(),
                        self.triangles.copy(), self.regions.copy(),
                        {k: v.copy() for k, v in self.slit_pairs.items()},
                        {k: v.copy() for k, v in self.windows.items()})


class ValidationReport:
    """ Mesh invariant violations, empty when the mesh is valid
    """

    def __init__(self):
        self.violations = []

    def add(self, kind, detail, **extra):
        entry = {'kind': kind, 'detail': detail}
        entry.update(extra)
        self.violations.append(entry)

    def kinds(self):
        return sorted(set(v['kind'] for v in self.violations))

    @property
    def ok(self):
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def to_json(self):
        return {'ok': self.ok, 'violations': self.violations}
