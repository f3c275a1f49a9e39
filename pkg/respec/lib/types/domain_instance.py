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


class DomainInstance:
    """ Outer domain minus the resonator slits

        built through geometry.build_domain, never mutated afterwards
    """

    def __init__(self, outer, resonators):
        self.outer = outer
        self.resonators = tuple(resonators)

    @property
    def slits(self):
        return [r.slit for r in self.resonators]

    @property
    def windows(self):
        return [r.window for r in self.resonators]

    @property
    def eps(self):
        if not self.resonators:
            return None
        return self.resonators[0].eps

    def __len__(self):
        return len(self.resonators)

    def to_json(self):
        return {
            'outer': self.outer.to_json(),
            'resonators': [r.to_json() for r in self.resonators]
        }
