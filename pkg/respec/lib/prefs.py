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
import json
import os
from pathlib import Path

PREFS_DIR = '.respec'
PREFS_FILE = 'preferences.json'
PREFS_KEYS = ('threads', 'seed', 'base_h', 'eig_tol', 'cg_rel_tol', 'out_dir', 'capacity_base_h')


class Prefs:
    """ Preferences

        json settings '.respec/preferences.json'
    """

    def __init__(self, prefs_file=None):
        if prefs_file is None:
            prefs_file = str(Path.home()) + os.sep + PREFS_DIR + os.sep + PREFS_FILE
        self._prefs = {}
        self._prefs_file = prefs_file

        if os.path.exists(self._prefs_file):
            with open(self._prefs_file, 'r') as f:
                try:
                    self._prefs = json.load(f)
                except ValueError:
                    self._prefs = {}
            if not isinstance(self._prefs, dict):
                self._prefs = {}

    @property
    def path(self):
        return self._prefs_file

    def get(self, key, default=None):
        """ Get Setting

            key - setting name
            default
        """
        if key in self._prefs:
            return self._prefs[key]
        return default

    def put(self, key, value):
        """ Set Setting

            key - setting name
            value
        """
        self._prefs[key] = value
        folder = os.path.dirname(self._prefs_file)
        if folder and not os.path.exists(folder):
            os.makedirs(folder, exist_ok=True)
        with open(self._prefs_file, 'w') as f:
            f.write(json.dumps(self._prefs, sort_keys=True))

    def solver_overrides(self):
        """ Numeric preferences that map onto SolverConfig fields
        """
        return {key: self._prefs[key] for key in PREFS_KEYS
                if key in self._prefs and key != 'out_dir'}
