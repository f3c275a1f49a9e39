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
import hashlib
import os

from respec.lib.errors import SceneError

THREADS_ENV = 'RESPEC_THREADS'


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def parse_float_list(text):
    """ '4.0,7.0' -> [4.0, 7.0]
    """
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    values = [part.strip() for part in str(text).split(',')]
    try:
        return [float(v) for v in values if v]
    except ValueError:
        raise SceneError('not a number list: %r' % text)


def resolve_threads(flag=None, prefs=None, default=1):
    """ --threads, then RESPEC_THREADS, then the preference file
    """
    if flag is not None:
        return max(1, int(flag))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    if prefs is not None:
        return max(1, int(prefs.get('threads', default)))
    return default
