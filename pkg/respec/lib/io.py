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
import logging
import os

import numpy as np

from respec.lib import utils

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def _plain(value):
    """ numpy scalars and arrays -> json types
    """
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dumps(payload):
    return json.dumps(_plain(payload), sort_keys=True)


class IO:
    """ Output directory of one invocation

        every file written through it is digested into the manifest
    """

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.outputs = []
        if not os.path.exists(self.out_dir):
            os.makedirs(self.out_dir, exist_ok=True)

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def track(self, name):
        """ Register a file some other writer produced in out_dir
        """
        if name not in self.outputs:
            self.outputs.append(name)
        logger.debug('wrote %s', self.path(name))
        return self.path(name)

    def write_text(self, name, text):
        with open(self.path(name), 'w') as f:
            f.write(text)
        return self.track(name)

    def write_json(self, name, payload):
        return self.write_text(name, json.dumps(_plain(payload), sort_keys=True, indent=2) + '\n')

    def write_with(self, name, writer, *args):
        """ writer(obj..., path) style helpers, e.g. write_run_csv
        """
        writer(*args, self.path(name))
        return self.track(name)

    def digests(self):
        return {name: utils.sha256_file(self.path(name)) for name in sorted(self.outputs)
                if os.path.exists(self.path(name))}

    def write_manifest(self, manifest):
        manifest.outputs = self.digests()
        path = self.path(MANIFEST_NAME)
        with open(path, 'w') as f:
            f.write(json.dumps(_plain(manifest.to_json()), sort_keys=True, indent=2) + '\n')
        return path
