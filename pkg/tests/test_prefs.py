import hashlib
import io as stdio
import json
import logging

import numpy as np
import pytest

from respec.color import Color, ColorFormatter, install_handler
from respec.lib import io, utils
from respec.lib.errors import InvariantViolation, SceneError
from respec.lib.prefs import Prefs
from respec.lib.types.run import RunManifest
from respec.lib.types.solver_config import SolverConfig


def test_prefs_round_trip(tmp_path):
    path = str(tmp_path / 'conf' / 'preferences.json')
    prefs = Prefs(path)
    assert prefs.get('threads') is None
    assert prefs.get('threads', 2) == 2
    prefs.put('threads', 4)
    prefs.put('base_h', 0.05)
    prefs.put('out_dir', 'runs')
    again = Prefs(path)
    assert again.get('threads') == 4
    assert again.solver_overrides() == {'threads': 4, 'base_h': 0.05}


def test_broken_prefs_file(tmp_path):
    path = tmp_path / 'preferences.json'
    path.write_text('{not json')
    assert Prefs(str(path)).get('seed', 0) == 0
    path.write_text('[1, 2]')
    assert Prefs(str(path)).solver_overrides() == {}


def test_parse_float_list():
    assert utils.parse_float_list('4.0, 7.0,') == [4.0, 7.0]
    assert utils.parse_float_list((1, 2)) == [1., 2.]
    with pytest.raises(SceneError):
        utils.parse_float_list('4,x')


def test_thread_resolution(tmp_path, monkeypatch):
    prefs = Prefs(str(tmp_path / 'p.json'))
    prefs.put('threads', 3)
    monkeypatch.delenv(utils.THREADS_ENV, raising=False)
    assert utils.resolve_threads(None, prefs) == 3
    monkeypatch.setenv(utils.THREADS_ENV, '5')
    assert utils.resolve_threads(None, prefs) == 5
    assert utils.resolve_threads(2, prefs) == 2
    assert utils.resolve_threads(0) == 1
    monkeypatch.setenv(utils.THREADS_ENV, 'many')
    assert utils.resolve_threads(None, None) == 1


def test_solver_config_checks_sweeps():
    assert SolverConfig().max_sweeps == 12
    assert SolverConfig(max_sweeps=1).replace(seed=3).max_sweeps == 1
    with pytest.raises(InvariantViolation):
        SolverConfig(max_sweeps=0)
    with pytest.raises(TypeError):
        SolverConfig(sweeps=2)


def test_io_digests_and_manifest(tmp_path):
    out = tmp_path / 'out'
    store = io.IO(str(out))
    store.write_json('a.json', {'value': np.float64(1.5), 'n': np.int64(3),
                                'v': np.arange(2)})
    store.write_text('b.txt', 'hello\n')
    store.write_text('b.txt', 'hello again\n')
    assert store.outputs == ['a.json', 'b.txt']
    assert json.loads((out / 'a.json').read_text()) == {'n': 3, 'v': [0, 1], 'value': 1.5}

    digests = store.digests()
    assert digests['b.txt'] == hashlib.sha256(b'hello again\n').hexdigest()
    store.write_manifest(RunManifest('mesh', 'scene.json', {'count': 4}, 7, '1.0.0', 0.5))
    manifest = json.loads((out / io.MANIFEST_NAME).read_text())
    assert manifest['outputs'] == digests
    assert manifest['seed'] == 7


def test_colorify():
    assert Color.colorify('x', '') == 'x'
    assert Color.colorify('x', 'red') == '\033[31mx\033[0m'
    assert Color.colorify('x', 'underline') == '\033[4mx\033[24m\033[0m'


def test_log_handler():
    stream = stdio.StringIO()
    handler = install_handler(verbose=False, stream=stream)
    handler.setFormatter(ColorFormatter(use_color=False))
    logger = logging.getLogger('respec.lib.harness')
    logger.debug('hidden')
    logger.warning('shown %d', 1)
    assert stream.getvalue() == 'WARNING respec.lib.harness: shown 1\n'
