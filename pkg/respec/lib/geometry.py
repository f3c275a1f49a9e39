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
import math
from itertools import combinations

from respec.lib.errors import (GeometryError, NonPositiveVolume, OverlapError, ScaleError,
                               SceneError, WindowError)
from respec.lib.types.domain_instance import DomainInstance
from respec.lib.types.outer_spec import OUTER_RECTANGLE, OUTER_WAVEGUIDE, OuterSpec
from respec.lib.types.resonator_spec import ResonatorSpec

logger = logging.getLogger(__name__)

SCENE_KEYS = ('outer', 'resonators')
RESONATOR_KEYS = ('center', 'eps', 'ell', 'd')
OUTER_KEYS = {
    OUTER_RECTANGLE: ('kind', 'width', 'height'),
    OUTER_WAVEGUIDE: ('kind', 'full_width', 'narrow_width', 'narrow_halflength',
                      'truncation_halflength'),
}


def build_domain(outer, resonators):
    """ Validate the outer shape and resonator placements

        raises GeometryError, WindowError, OverlapError
    """
    outer.validate()
    resonators = list(resonators)

    for k, resonator in enumerate(resonators):
        try:
            resonator.validate()
        except WindowError as e:
            e.details.setdefault('resonator', k)
            raise
        if not outer.contains_box(*resonator.box):
            raise OverlapError('resonator %d touches the outer boundary' % k,
                               pair=(k, 'boundary'))

    for i, j in combinations(range(len(resonators)), 2):
        ax0, ax1, ay0, ay1 = resonators[i].box
        bx0, bx1, by0, by1 = resonators[j].box
        if ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1:
            raise OverlapError('resonators %d and %d overlap' % (i, j), pair=(i, j))

    return DomainInstance(outer, resonators)


def parameter_chain_holds(domain):
    """ ell d < ell eps < rho eps for every resonator
    """
    for r in domain.resonators:
        if not (r.ell * r.d < r.ell * r.eps < r.rho * r.eps):
            return False
    return True


def window_scale(law, eps):
    """ Physical window scale d_eps for the given law

        raises ScaleError when the result is not below eps
    """
    eps = float(eps)
    if not 0. < eps < 1.:
        raise ScaleError('eps must lie in (0, 1)', eps=eps)
    if law.n == 2:
        d = math.exp(-1. / (law.coefficient * eps * eps))
    else:
        d = law.coefficient * eps ** (law.n / (law.n - 2.))
    if not d < eps:
        raise ScaleError('window scale %g is not below eps %g' % (d, eps), d=d, eps=eps,
                         coefficient=law.coefficient)
    return d


def gamma_of(cap_value, volume):
    if not volume > 0:
        raise NonPositiveVolume('resonator volume must be positive', volume=volume)
    if cap_value < 0:
        raise GeometryError('capacity must be nonnegative', cap=cap_value)
    return cap_value / (4. * volume)


def contains(domain, point):
    return domain.outer.contains(point[0], point[1])


def resonator_of(domain, point):
    """ Index of the resonator whose interior holds point, or None
    """
    for k, resonator in enumerate(domain.resonators):
        if resonator.contains(point[0], point[1]):
            return k
    return None


def rescale(domain, eps, d_values):
    """ Same centres and ell, new eps and window scales
    """
    d_values = list(d_values)
    if len(d_values) != len(domain.resonators):
        raise SceneError('one window scale per resonator required',
                         expected=len(domain.resonators), got=len(d_values))
    resonators = [r.replace(eps=eps, d=d) for r, d in zip(domain.resonators, d_values)]
    return build_domain(domain.outer, resonators)


def _reject_unknown(mapping, allowed, where):
    if not isinstance(mapping, dict):
        raise SceneError('%s must be an object' % where)
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise SceneError('unknown %s fields: %s' % (where, ', '.join(unknown)), fields=unknown)


def _number(mapping, key, where):
    if key not in mapping:
        raise SceneError('%s misses %r' % (where, key))
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError('%s.%s must be a number' % (where, key))
    return float(value)


def _parse_outer(document):
    if not isinstance(document, dict) or 'kind' not in document:
        raise SceneError('outer needs a kind')
    kind = document['kind']
    if kind not in OUTER_KEYS:
        raise SceneError('unknown outer kind %r' % kind)
    _reject_unknown(document, OUTER_KEYS[kind], 'outer')
    values = {key: _number(document, key, 'outer') for key in OUTER_KEYS[kind][1:]}
    return OuterSpec(kind, **values)


def _parse_resonator(document, k, require_d=True):
    where = 'resonators[%d]' % k
    _reject_unknown(document, RESONATOR_KEYS, where)
    center = document.get('center')
    if not isinstance(center, (list, tuple)) or len(center) != 2:
        raise SceneError('%s.center must be [x, y]' % where)
    d = float('nan')
    if require_d or 'd' in document:
        d = _number(document, 'd', where)
    return ResonatorSpec(center, _number(document, 'eps', where),
                         _number(document, 'ell', where), d)


def parse_scene(document, require_d=True):
    """ Scene document -> (OuterSpec, [ResonatorSpec]) without validation

        design scenes may omit d, the designer picks it
    """
    _reject_unknown(document, SCENE_KEYS, 'scene')
    if 'outer' not in document:
        raise SceneError('scene needs an outer shape')
    resonators = document.get('resonators', [])
    if not isinstance(resonators, list):
        raise SceneError('resonators must be a list')
    outer = _parse_outer(document['outer'])
    return outer, [_parse_resonator(r, k, require_d) for k, r in enumerate(resonators)]


def load_scene(source):
    """ Path or mapping -> validated DomainInstance
    """
    if isinstance(source, dict):
        document = source
    else:
        with open(source, 'r') as f:
            document = json.load(f)
    outer, resonators = parse_scene(document)
    domain = build_domain(outer, resonators)
    logger.debug('scene with %d resonators on a %s', len(domain.resonators), outer.kind)
    return domain


def dump_scene(domain):
    return domain.to_json()
