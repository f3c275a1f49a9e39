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

METHOD_FEM = 'FEM_BVP'
METHOD_ASYMPTOTIC_2D = 'Asymptotic2D'
METHOD_ASYMPTOTIC_3D = 'Asymptotic3D'


class CapacityResult:

    def __init__(self, value, method, mesh=None, potential=None, disk=None, energy=None):
        self.value = float(value)
        # energy of the stored potential, differs from value after extrapolation
        self.energy = self.value if energy is None else float(energy)
        self.method = method
        # mesh_stats dict for FEM results
        self.mesh = mesh
        self.potential = potential
        # SlitMesh the potential lives on
        self.disk = disk

    def to_json(self):
        return {'value': self.value, 'method': self.method, 'energy': self.energy,
                'mesh': self.mesh or {}}

    def __repr__(self):
        return 'CapacityResult(%g, %s)' % (self.value, self.method)
