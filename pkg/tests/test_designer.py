import csv
import math

import pytest
from numpy.testing import assert_allclose

from respec.lib import designer, geometry
from respec.lib.errors import (BracketFailure, GeometryError, InvariantViolation,
                               MonotonicityViolation, NoConvergence, OverlapError)
from respec.lib.types.design import DesignProblem
from respec.lib.types.outer_spec import OuterSpec
from respec.lib.types.solver_config import SolverConfig
from tests.conftest import waveguide_scene_document


def _problem(targets, eta=None, tol=0.02, centers=None):
    document = waveguide_scene_document()
    if centers is None:
        centers = [(-0.5 + k, 0.75) for k in range(len(targets))]
    document['resonators'] = [{'center': list(c), 'eps': 0.25, 'ell': 0.45} for c in centers]
    outer, resonators = geometry.parse_scene(document, require_d=False)
    return DesignProblem(outer, resonators, targets, eta, tol)


def _exact(d):
    return [designer.F_star(c) for c in d]


def _coupled(d):
    # each value leans on the other window, offset from the box centers
    t0, t1 = designer.F_star(d[0]), designer.F_star(d[1])
    return [t0 + 0.3 * (t1 - 6.) + 0.05, t1 + 0.3 * (t0 - 3.) + 0.05]


def test_scaling_function():
    assert_allclose(designer.F(4.), 8. / math.pi)
    assert_allclose(designer.F_star(8. / math.pi), 4.)
    assert_allclose(designer.F(3. / (2. * math.pi), n=3, volume=4. * math.pi / 3., cap=8.), 1.)
    for t in (0.1, 2.5, 40.):
        assert_allclose(designer.F_star(designer.F(t)), t)
        assert_allclose(designer.F_star(designer.F(t, 3, 2., 5.), 3, 2., 5.), t)
        assert_allclose(designer.F(t, 4, 1., 3.), math.sqrt(4. * t / 3.))


def test_scaling_function_domain():
    with pytest.raises(InvariantViolation):
        designer.F(0.)
    with pytest.raises(InvariantViolation):
        designer.F_star(-1.)


def test_essential_threshold(waveguide):
    full, narrow = designer.essential_threshold(waveguide)
    assert_allclose(full, math.pi ** 2)
    assert_allclose(narrow, 20.1421, rtol=1e-5)
    with pytest.raises(GeometryError):
        designer.essential_threshold(OuterSpec.waveguide(1., 1.2, 1.5, 6.))


def test_bracket_boxes():
    boxes = designer.bracket(_problem([4.], eta=0.2))
    assert len(boxes) == 1
    assert_allclose([boxes[0].lower, boxes[0].upper], [7.6 / math.pi, 8.4 / math.pi])


def test_default_eta():
    assert_allclose(designer.validate_problem(_problem([4.])), 0.1 * (math.pi ** 2 - 4.) / 2.)
    assert_allclose(designer.validate_problem(_problem([3., 4.])), 0.05)


def test_problem_validation():
    with pytest.raises(InvariantViolation):
        designer.validate_problem(_problem([4.], eta=3.))
    with pytest.raises(InvariantViolation):
        designer.validate_problem(_problem([5., 4.]))
    with pytest.raises(InvariantViolation):
        designer.validate_problem(_problem([3., 3.2], eta=0.1))
    with pytest.raises(InvariantViolation):
        designer.validate_problem(_problem([10.]))
    rectangle = DesignProblem(OuterSpec.rectangle(1., 1.), [], [4.])
    with pytest.raises(GeometryError):
        designer.validate_problem(rectangle)


def test_design_exact_oracle():
    problem = _problem([4.])
    result = designer.design(problem, 0.25, SolverConfig(), oracle=_exact)
    assert result.converged
    assert result.sweeps == 1
    assert abs(result.achieved[0] - 4.) <= 0.5 * problem.tol * 4.
    assert result.d_tilde[0] in result.boxes[0]
    assert_allclose(result.d_physical, [math.exp(-1. / (result.d_tilde[0] * 0.0625))])
    assert result.count_below == 1


def test_design_coupled_oracle():
    problem = _problem([3., 6.], eta=0.15, tol=1e-3)
    result = designer.design(problem, 0.25, SolverConfig(), oracle=_coupled)
    assert result.converged
    assert result.sweeps >= 2
    assert max(result.relative_errors) <= 1e-3
    for d, box in zip(result.d_tilde, result.boxes):
        assert d in box
    assert result.simple


def test_sweep_cap_returns_partial():
    problem = _problem([3., 6.], eta=0.15, tol=1e-3)
    with pytest.raises(NoConvergence) as info:
        designer.design(problem, 0.25, SolverConfig(max_sweeps=1), oracle=_coupled)
    partial = info.value.partial
    assert partial is not None and not partial.converged
    assert partial.sweeps == 1
    assert max(partial.relative_errors) > 1e-3


def test_bracket_failure():
    with pytest.raises(BracketFailure) as info:
        designer.design(_problem([4.]), 0.25, SolverConfig(), oracle=lambda d: [1.])
    assert info.value.details['resonator'] == 0
    assert info.value.details['corner_values'] == [1., 1.]


def test_monotonicity_violation():
    def dipping(d):
        t = designer.F_star(d[0])
        if abs(t - 4.) < 0.15:
            return [4.5 - 2. * (t - 4.)]
        return [t]

    with pytest.raises(MonotonicityViolation) as info:
        designer.design(_problem([4.], eta=0.2), 0.25, SolverConfig(), oracle=dipping)
    assert info.value.details['k'] == 0


def test_resonator_outside_narrow_section():
    with pytest.raises(OverlapError):
        designer.design(_problem([4.], centers=[(0., 0.3)]), 0.25, SolverConfig(), oracle=_exact)


def test_trace_csv(tmp_path):
    problem = _problem([3., 6.], eta=0.15, tol=1e-3)
    result = designer.design(problem, 0.25, SolverConfig(), oracle=_coupled)
    path = str(tmp_path / 'trace.csv')
    designer.write_trace_csv(result, path)
    with open(path, newline='') as f:
        reader = csv.DictReader(f)
        records = list(reader)
    assert reader.fieldnames == ['sweep', 'k', 'step', 'd_1', 'd_2', 'lambda_1', 'lambda_2',
                                 'residual']
    assert len(records) == len(result.trace)
    assert records[0]['sweep'] == '0' and records[0]['step'] == '0'
    assert float(records[-1]['d_1']) == result.trace[-1].d[0]


@pytest.mark.slow
def test_pipeline_design():
    # resonators away from the walls of the narrowed section
    problem = _problem([4., 7.], eta=0.7, centers=[(-0.5, 0.65), (0.5, 0.65)])
    config = SolverConfig(base_h=1. / 8., threads=2)
    result = designer.design(problem, 0.15, config)
    assert result.converged
    assert max(result.relative_errors) <= 0.02
    for d, box in zip(result.d_tilde, result.boxes):
        assert d in box
    assert result.count_below == 2
    assert result.truncation_shift < 2e-3
