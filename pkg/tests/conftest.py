import json

import pytest

from respec.lib import geometry
from respec.lib.types.outer_spec import OuterSpec
from respec.lib.types.resonator_spec import ResonatorSpec
from respec.lib.types.solver_config import SolverConfig


def square_scene_document(d=1e-3, eps=0.25, ell=0.45):
    return {
        'outer': {'kind': 'rectangle', 'width': 1.0, 'height': 1.0},
        'resonators': [{'center': [0.5, 0.75], 'eps': eps, 'ell': ell, 'd': d}],
    }


def waveguide_scene_document(eps=0.25, ell=0.45, truncation=6.0):
    return {
        'outer': {'kind': 'waveguide', 'full_width': 1.0, 'narrow_width': 0.7,
                  'narrow_halflength': 1.5, 'truncation_halflength': truncation},
        'resonators': [{'center': [0.0, 0.75], 'eps': eps, 'ell': ell}],
    }


@pytest.fixture
def unit_square():
    return geometry.build_domain(OuterSpec.rectangle(1., 1.), [])


@pytest.fixture
def square_scene():
    return geometry.load_scene(square_scene_document())


@pytest.fixture
def resonator():
    return ResonatorSpec((0.5, 0.75), 0.25, 0.45, 1e-3)


@pytest.fixture
def waveguide():
    return OuterSpec.waveguide(1., 0.7, 1.5, 6.)


@pytest.fixture
def small_config():
    return SolverConfig(base_h=1. / 8., ratio=1.5, refinement=4., eig_tol=1e-6,
                        capacity_base_h=1. / 16.)


@pytest.fixture
def out_dir(tmp_path):
    folder = tmp_path / 'out'
    folder.mkdir()
    return folder


@pytest.fixture
def scene_file(tmp_path):
    path = tmp_path / 'scene.json'
    path.write_text(json.dumps(square_scene_document()))
    return path
