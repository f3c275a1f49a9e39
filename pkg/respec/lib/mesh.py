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
import logging
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from respec.lib.errors import GeometryError, ResolutionError, SceneError
from respec.lib.types.slit_mesh import (BULK_REGION, NO_OWNER, GradingSpec, NodeTag, SlitMesh,
                                        ValidationReport)

logger = logging.getLogger(__name__)

SNAP = 1e-12
MAX_DEPTH = 48
# cells inside a resonator are at most eps / RESONATOR_CELLS wide
RESONATOR_CELLS = 8.
# largest stretch of a root interval when a window endpoint is pinned on it
WARP_TOL = 1. / 64.
# largest relative height mismatch of the rows right above a window
SQUARE_TOL = 1. / 32.
HALO_SEARCH = 8
# capacity disk boundary: 4 sides * 64 cells >= 256 segments
DISK_MAX_H = 2. / 64.

MESH_HEADER = '# respec mesh'

_SIDES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def root_lines(lo, hi, mandatory, h0):
    """ Sorted root grid coordinates on [lo, hi] through every mandatory value,
        each interval split evenly into cells no wider than h0
    """
    fixed = sorted(set(float(v) for v in mandatory if lo <= v <= hi) | {float(lo), float(hi)})
    kept = [fixed[0]]
    for value in fixed[1:]:
        if value - kept[-1] > SNAP * max(1., abs(value)):
            kept.append(value)
    kept[-1] = float(hi)

    parts = []
    for a, b in zip(kept[:-1], kept[1:]):
        n = max(1, int(math.ceil((b - a) / h0 - 1e-9)))
        parts.append(a + (b - a) * np.arange(n) / n)
    parts.append(np.array([kept[-1]]))
    return np.concatenate(parts)


def _box_cell(eps, space, h0):
    """ Box cell size c = eps / n and the lines splitting the gap of the given
        height above the box

        when the next fixed line is inside the halo the gap is split into equal
        rows within SQUARE_TOL of c, searching n upward from eps / h0
    """
    first = max(1, int(math.ceil(eps / h0 - 1e-9)))
    best = None
    for n in range(first, HALO_SEARCH * first + 1):
        c = eps / n
        reach = max(1, int(math.ceil(0.5 * eps / c - 1e-9)))
        if space > (reach + 1) * c:
            return c, [c * m for m in range(1, reach + 1)]
        rows = max(1, int(round(space / c)))
        r = space / rows
        miss = abs(r / c - 1.)
        offsets = [r * m for m in range(1, rows)]
        if miss <= SQUARE_TOL and r <= h0 * (1. + 1e-9):
            return c, offsets
        if best is None or miss < best[0]:
            best = (miss, c, offsets)
    logger.debug('no square rows above a box of size %g under a gap of %g, off by %.3f',
                 eps, space, best[0])
    return best[1], best[2]


def _halo_lines(resonator, x_fixed, y_fixed, h0):
    """ Box lines one cell apart plus a halo of lines around the resonator, so
        the cells next to the window are squares of the same size as the ones inside
    """
    x0, x1, y0, y1 = resonator.box
    eps = resonator.eps
    above = [v - y1 for v in y_fixed if v - y1 > SNAP]
    c, offsets = _box_cell(eps, min(above) if above else eps + 2. * h0, h0)
    n = int(round(eps / c))
    xs = [x0 + c * m for m in range(1, n)]
    ys = [y0 + c * m for m in range(1, n)] + [y1 + offset for offset in offsets]
    reach = max(1, int(math.ceil(0.5 * eps / c - 1e-9)))
    for side, sign, fixed, out in ((x0, -1., x_fixed, xs), (x1, 1., x_fixed, xs),
                                   (y0, -1., y_fixed, ys)):
        gaps = [sign * (v - side) for v in fixed if sign * (v - side) > SNAP]
        if not gaps:
            continue
        space = min(gaps)
        count = min(reach, int(math.floor(space / c + 1e-9)))
        rest = space - count * c
        if count and 1e-9 * c < rest < 0.5 * c:
            count -= 1
        out += [side + sign * c * m for m in range(1, count + 1)]
    return xs, ys


class _Axis:
    """ Root lines of one direction

        a pinned value sits on a dyadic point of its root interval: the
        interval is mapped piecewise linearly so that the point lands on
        the value exactly
    """

    def __init__(self, lines):
        self.lines = np.asarray(lines, dtype=np.float64)
        self.warps = {}
        self.positions = {}

    @property
    def cells(self):
        return len(self.lines) - 1

    def line_index(self, value):
        i = int(np.searchsorted(self.lines, value))
        if i >= len(self.lines) or self.lines[i] != value:
            raise GeometryError('grid line %g missing' % value)
        return i

    def interval(self, value):
        i = int(np.searchsorted(self.lines, value, side='right')) - 1
        if not 0 <= i < self.cells:
            raise GeometryError('%g lies outside the grid' % value)
        return i

    def pin(self, values):
        by_interval = {}
        for value in sorted(set(float(v) for v in values)):
            i = self.interval(value)
            if value == self.lines[i]:
                self.positions[value] = (i, 0, 0)
                continue
            by_interval.setdefault(i, []).append(value)

        for i, inner in sorted(by_interval.items()):
            lo, hi = self.lines[i], self.lines[i + 1]
            f = (np.array(inner) - lo) / (hi - lo)
            for level in range(1, MAX_DEPTH + 1):
                scale = float(1 << level)
                m = np.round(f * scale)
                t = np.concatenate([[0.], m / scale, [1.]])
                if np.any(np.diff(t) <= 0.):
                    continue
                slopes = np.diff(np.concatenate([[0.], f, [1.]])) / np.diff(t)
                if np.all(np.abs(slopes - 1.) <= WARP_TOL):
                    break
            else:
                raise ResolutionError('cannot place %d points inside [%g, %g]'
                                      % (len(inner), lo, hi), interval=i)
            self.warps[i] = (t, np.concatenate([[lo], inner, [hi]]))
            for value, numerator in zip(inner, m):
                self.positions[value] = (i, int(numerator), level)

    def at(self, i, t):
        """ Coordinate of fraction t of root interval i """
        warp = self.warps.get(i)
        if warp is not None:
            return float(np.interp(t, warp[0], warp[1]))
        lo = self.lines[i]
        return float(lo + (self.lines[i + 1] - lo) * t)

    def coordinate(self, key, depth):
        i = key >> depth
        rest = key - (i << depth)
        if rest == 0:
            return float(self.lines[i])
        return self.at(i, rest / float(1 << depth))

    def key(self, value, depth):
        """ Integer position of a line or pinned value at the given depth """
        if value in self.positions:
            i, numerator, level = self.positions[value]
            return (i << depth) + ((numerator << depth) >> level)
        return self.line_index(value) << depth


class _Forest:
    """ 2:1 balanced quadtrees over a tensor grid of root cells

        a cell is (i, j, level, a, b): root (i, j), column a and row b
        among the 2^level x 2^level children of the root
    """

    def __init__(self, x_axis, y_axis):
        self.x = x_axis
        self.y = y_axis
        self.roots = set((i, j) for i in range(x_axis.cells) for j in range(y_axis.cells))
        self.leaves = set()
        self.pins = {}

    def cut_holes(self, holes):
        for i, j in sorted(self.roots):
            cx = 0.5 * (self.x.lines[i] + self.x.lines[i + 1])
            cy = 0.5 * (self.y.lines[j] + self.y.lines[j + 1])
            if any(hx0 < cx < hx1 and hy0 < cy < hy1 for hx0, hx1, hy0, hy1 in holes):
                self.roots.discard((i, j))

    def pin(self, points):
        """ Points on horizontal root lines that must end up as cell corners """
        self.x.pin([x for x, _ in points])
        for x, y in points:
            i, numerator, level = self.x.positions[float(x)]
            if level:
                self.pins.setdefault(i, []).append((numerator, level, self.y.line_index(y)))

    def rect(self, cell):
        i, j, l, a, b = cell
        n = float(1 << l)
        return (self.x.at(i, a / n), self.x.at(i, (a + 1) / n),
                self.y.at(j, b / n), self.y.at(j, (b + 1) / n))

    def _hides_pin(self, cell):
        """ True when a pinned point lies on the cell but is not one of its corners """
        i, j, l, a, b = cell
        top = (1 << l) - 1
        for numerator, level, line in self.pins.get(i, ()):
            if l >= level:
                continue
            if not ((j == line and b == 0) or (j == line - 1 and b == top)):
                continue
            shift = level - l
            if numerator >> shift == a and numerator & ((1 << shift) - 1):
                return True
        return False

    @staticmethod
    def _split(cell):
        i, j, l, a, b = cell
        if l >= MAX_DEPTH:
            raise ResolutionError('cell depth %d reached in root (%d, %d)' % (l, i, j),
                                  depth=l)
        return [(i, j, l + 1, 2 * a + da, 2 * b + db) for db in (0, 1) for da in (0, 1)]

    def refine(self, target):
        stack = [(i, j, 0, 0, 0) for i, j in sorted(self.roots, reverse=True)]
        while stack:
            cell = stack.pop()
            x0, x1, y0, y1 = self.rect(cell)
            if max(x1 - x0, y1 - y0) > target(x0, x1, y0, y1) or self._hides_pin(cell):
                stack.extend(self._split(cell))
            else:
                self.leaves.add(cell)

    def _neighbor(self, cell, di, dj):
        """ Leaf across one side at the same level or coarser, None if finer or outside """
        i, j, l, a, b = cell
        n = 1 << l
        a, b = a + di, b + dj
        if a < 0:
            i, a = i - 1, n - 1
        elif a >= n:
            i, a = i + 1, 0
        if b < 0:
            j, b = j - 1, n - 1
        elif b >= n:
            j, b = j + 1, 0
        if (i, j) not in self.roots:
            return None
        for k in range(l, -1, -1):
            key = (i, j, k, a >> (l - k), b >> (l - k))
            if key in self.leaves:
                return key
        return None

    def balance(self):
        queue = sorted(self.leaves)
        while queue:
            cell = queue.pop()
            if cell not in self.leaves:
                continue
            for di, dj in _SIDES:
                other = self._neighbor(cell, di, dj)
                if other is not None and other[2] < cell[2] - 1:
                    self.leaves.remove(other)
                    children = self._split(other)
                    self.leaves.update(children)
                    queue.extend(children)
                    queue.append(cell)

    def triangulate(self):
        """ Every leaf fanned from its center through its corners and hanging midpoints

            returns (leaves, depth, corner keys, node coordinates, triangles, leaf of
            every triangle); corner nodes come first in row major order
        """
        leaves = sorted(self.leaves)
        depth = max(cell[2] for cell in leaves) + 1

        def origin(cell):
            i, j, l, a, b = cell
            size = 1 << (depth - l)
            return (i << depth) + a * size, (j << depth) + b * size, size

        corners = set()
        for cell in leaves:
            X, Y, s = origin(cell)
            corners.update(((X, Y), (X + s, Y), (X, Y + s), (X + s, Y + s)))
        keys = sorted(corners, key=lambda key: (key[1], key[0]))
        ids = dict((key, n) for n, key in enumerate(keys))

        centers, triangles, owner = [], [], []
        for c, cell in enumerate(leaves):
            X, Y, s = origin(cell)
            h = s >> 1
            ring = [(X, Y), (X + h, Y), (X + s, Y), (X + s, Y + h), (X + s, Y + s),
                    (X + h, Y + s), (X, Y + s), (X, Y + h)]
            ring = [ids[key] for key in ring if key in ids]
            center = len(keys) + c
            centers.append((X + h, Y + h))
            for p, q in zip(ring, ring[1:] + ring[:1]):
                triangles.append((center, p, q))
                owner.append(c)

        nodes = np.array([(self.x.coordinate(X, depth), self.y.coordinate(Y, depth))
                          for X, Y in keys + centers], dtype=np.float64)
        corner_keys = np.array(keys, dtype=np.int64).reshape(-1, 2)
        return (leaves, depth, corner_keys, nodes, np.array(triangles, dtype=np.int64),
                np.array(owner, dtype=np.int64))


def _size_function(grading, points, boxes):
    """ Target cell size: min_h at every point, eps / RESONATOR_CELLS on every
        box, growing by ratio - 1 per unit distance, capped at base_h
    """
    slope = grading.ratio - 1.

    def target(x0, x1, y0, y1):
        size = grading.base_h
        for px, py in points:
            dx = max(x0 - px, 0., px - x1)
            dy = max(y0 - py, 0., py - y1)
            size = min(size, grading.min_h + slope * math.hypot(dx, dy))
        for bx0, bx1, by0, by1, h in boxes:
            dx = max(bx0 - x1, 0., x0 - bx1)
            dy = max(by0 - y1, 0., y0 - by1)
            size = min(size, h + slope * math.hypot(dx, dy))
        return size

    return target


def boundary_nodes(triangles):
    """ Nodes on edges used by exactly one triangle
    """
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    edges.sort(axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    return np.unique(unique[counts == 1])


def triangulate(domain, grading, extra_sources=()):
    """ Balanced quadtree refined toward the window endpoints, every cell fanned
        into triangles, slits opened by node duplication

        extra_sources - additional (x, y) points to refine toward; points on a
                        resonator top edge become mesh nodes, so meshes for
                        different windows share one node set
    """
    outer = domain.outer
    for k, resonator in enumerate(domain.resonators):
        if grading.min_h > resonator.window_halfwidth / 4.:
            raise ResolutionError('min_h %g does not resolve window %d of half-width %g'
                                  % (grading.min_h, k, resonator.window_halfwidth),
                                  resonator=k, min_h=grading.min_h)

    x_fixed, y_fixed = outer.mandatory_lines()
    for resonator in domain.resonators:
        x0, x1, y0, y1 = resonator.box
        x_fixed += [x0, x1]
        y_fixed += [y0, y1]
    x_lines, y_lines = list(x_fixed), list(y_fixed)
    for resonator in domain.resonators:
        hx, hy = _halo_lines(resonator, x_fixed, y_fixed, grading.base_h)
        x_lines += hx
        y_lines += hy

    xmin, xmax, ymin, ymax = outer.bounds()
    forest = _Forest(_Axis(root_lines(xmin, xmax, x_lines, grading.base_h)),
                     _Axis(root_lines(ymin, ymax, y_lines, grading.base_h)))
    forest.cut_holes(outer.holes())

    points = set((float(x), float(y)) for x, y in extra_sources)
    for resonator in domain.resonators:
        (wl, y), (wr, _) = resonator.window
        points.update(((wl, y), (wr, y)))
    points = sorted(points)
    pins = set()
    for resonator in domain.resonators:
        x0, x1, _, y1 = resonator.box
        pins.update(p for p in points if p[1] == y1 and x0 < p[0] < x1)
    forest.pin(sorted(pins))

    boxes = [resonator.box + (resonator.eps / RESONATOR_CELLS,)
             for resonator in domain.resonators]
    forest.refine(_size_function(grading, points, boxes))
    forest.balance()
    leaves, depth, keys, nodes, triangles, owner = forest.triangulate()

    centers = np.array([forest.rect(cell) for cell in leaves]).reshape(-1, 4)
    cx = 0.5 * (centers[:, 0] + centers[:, 1])
    cy = 0.5 * (centers[:, 2] + centers[:, 3])
    cell_regions = np.full(len(leaves), BULK_REGION, dtype=np.int64)
    for k, resonator in enumerate(domain.resonators):
        x0, x1, y0, y1 = resonator.box
        cell_regions[(cx > x0) & (cx < x1) & (cy > y0) & (cy < y1)] = k
    regions = cell_regions[owner]

    tags = np.full(len(nodes), NodeTag.INTERIOR, dtype=np.int64)
    tags[boundary_nodes(triangles)] = NodeTag.DIRICHLET
    owners = np.full(len(nodes), NO_OWNER, dtype=np.int64)

    KX, KY = keys[:, 0], keys[:, 1]
    copies = []
    slit_pairs, windows = {}, {}
    next_id = len(nodes)
    for k, resonator in enumerate(domain.resonators):
        x0, x1, y0, y1 = resonator.box
        (wl, _), (wr, _) = resonator.window
        X0, X1 = forest.x.key(x0, depth), forest.x.key(x1, depth)
        XL, XR = forest.x.key(wl, depth), forest.x.key(wr, depth)
        Y0, Y1 = forest.y.key(y0, depth), forest.y.key(y1, depth)

        upright = ((KX == X0) | (KX == X1)) & (KY >= Y0) & (KY <= Y1)
        flat = ((KY == Y0) | (KY == Y1)) & (KX >= X0) & (KX <= X1)
        in_window = (KY == Y1) & (KX >= XL) & (KX <= XR)
        side_a = np.flatnonzero((upright | flat) & ~in_window)
        side_b = np.arange(next_id, next_id + len(side_a), dtype=np.int64)
        next_id += len(side_a)

        remap = np.arange(next_id, dtype=np.int64)
        remap[side_a] = side_b
        inside = regions == k
        triangles[inside] = remap[triangles[inside]]

        tags[side_a] = NodeTag.SLIT_A
        owners[side_a] = k
        window = np.flatnonzero(in_window)
        window = window[np.argsort(KX[window], kind='stable')]
        owners[window] = k
        tags[window[[0, -1]]] = NodeTag.WINDOW_ENDPOINT

        copies.append((nodes[side_a], k))
        slit_pairs[k] = np.column_stack([side_a, side_b])
        windows[k] = window

    for coords, k in copies:
        nodes = np.concatenate([nodes, coords])
        tags = np.concatenate([tags, np.full(len(coords), NodeTag.SLIT_B, dtype=np.int64)])
        owners = np.concatenate([owners, np.full(len(coords), k, dtype=np.int64)])

    mesh = SlitMesh(nodes, tags, owners, triangles, regions, slit_pairs, windows)
    logger.debug('mesh %d x %d roots, %d leaves to depth %d, %d nodes, %d triangles, '
                 'h in [%g, %g]', forest.x.cells, forest.y.cells, len(leaves), depth - 1,
                 mesh.n_nodes, mesh.n_triangles, mesh.h_min, mesh.h_max)
    return mesh


def triangulate_disk(a, grading):
    """ Unit disk with the segment [-a, a] x {0} tagged as conductor

        quadtree mesh of [-1, 1]^2 mapped by (x sqrt(1 - y^2/2), y sqrt(1 - x^2/2)):
        the x axis is kept and the square boundary lands on the circle
    """
    if not 0. < a < 1.:
        raise GeometryError('segment half-width must lie in (0, 1)', half_width=a)
    if grading.min_h > a / 4.:
        raise ResolutionError('min_h %g does not resolve half-width %g' % (grading.min_h, a),
                              min_h=grading.min_h)
    base_h = min(grading.base_h, DISK_MAX_H)
    grading = GradingSpec(base_h, min(grading.min_h, base_h), grading.ratio)

    forest = _Forest(_Axis(root_lines(-1., 1., [0.], base_h)),
                     _Axis(root_lines(-1., 1., [0.], base_h)))
    tips = [(-a, 0.), (a, 0.)]
    forest.pin(tips)
    forest.refine(_size_function(grading, tips, []))
    forest.balance()
    leaves, depth, keys, square, triangles, _ = forest.triangulate()

    tags = np.full(len(square), NodeTag.INTERIOR, dtype=np.int64)
    tags[boundary_nodes(triangles)] = NodeTag.DIRICHLET
    KX, KY = keys[:, 0], keys[:, 1]
    on_segment = (KY == forest.y.key(0., depth)) & \
        (KX >= forest.x.key(-a, depth)) & (KX <= forest.x.key(a, depth))
    tags[np.flatnonzero(on_segment)] = NodeTag.CONDUCTOR

    X, Y = square[:, 0], square[:, 1]
    nodes = np.column_stack([X * np.sqrt(1. - Y * Y / 2.), Y * np.sqrt(1. - X * X / 2.)])
    owners = np.full(len(nodes), NO_OWNER, dtype=np.int64)
    mesh = SlitMesh(nodes, tags, owners, triangles)
    logger.debug('disk mesh for a=%g: %d leaves, %d nodes, %d conductor nodes',
                 a, len(leaves), mesh.n_nodes, int(on_segment.sum()))
    return mesh


def refine_uniform(mesh):
    """ Every triangle split in four through its edge midpoints

        for meshes without slits; a midpoint on a boundary edge between two
        Dirichlet nodes, or between two conductor nodes, takes their tag
    """
    if any(len(pairs) for pairs in mesh.slit_pairs.values()):
        raise GeometryError('uniform refinement needs a mesh without slits')
    edges, counts = mesh.edges()
    n = mesh.n_nodes
    codes = edges[:, 0] * n + edges[:, 1]

    def midpoint(p, q):
        return n + np.searchsorted(codes, np.minimum(p, q) * n + np.maximum(p, q))

    a, b, c = mesh.triangles.T
    ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
    triangles = np.stack([np.stack([a, ab, ca], axis=1), np.stack([ab, b, bc], axis=1),
                          np.stack([ca, bc, c], axis=1), np.stack([ab, bc, ca], axis=1)],
                         axis=1).reshape(-1, 3)

    ta, tb = mesh.tags[edges[:, 0]], mesh.tags[edges[:, 1]]
    tags = np.full(len(edges), NodeTag.INTERIOR, dtype=np.int64)
    tags[(ta == NodeTag.CONDUCTOR) & (tb == NodeTag.CONDUCTOR)] = NodeTag.CONDUCTOR
    tags[(ta == NodeTag.DIRICHLET) & (tb == NodeTag.DIRICHLET) & (counts == 1)] = \
        NodeTag.DIRICHLET
    nodes = np.concatenate([mesh.nodes, 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])])
    return SlitMesh(nodes, np.concatenate([mesh.tags, tags]),
                    np.concatenate([mesh.owners, np.full(len(edges), NO_OWNER, dtype=np.int64)]),
                    triangles, np.repeat(mesh.regions, 4))


def seal_window(mesh, k):
    """ Copy of mesh with window k closed: window nodes duplicated for the inside
    """
    window = mesh.windows.get(k)
    if window is None or not len(window):
        return mesh.copy()
    n = mesh.n_nodes
    copies = np.arange(n, n + len(window), dtype=np.int64)
    remap = np.arange(n + len(window), dtype=np.int64)
    remap[window] = copies

    triangles = mesh.triangles.copy()
    inside = mesh.regions == k
    triangles[inside] = remap[triangles[inside]]

    tags = mesh.tags.copy()
    tags[window] = NodeTag.SLIT_A
    slit_pairs = {key: value.copy() for key, value in mesh.slit_pairs.items()}
    slit_pairs[k] = np.concatenate([slit_pairs.get(k, np.empty((0, 2), dtype=np.int64)),
                                    np.column_stack([window, copies])])
    windows = {key: value.copy() for key, value in mesh.windows.items()}
    windows[k] = np.empty(0, dtype=np.int64)
    return SlitMesh(np.concatenate([mesh.nodes, mesh.nodes[window]]),
                    np.concatenate([tags, np.full(len(window), NodeTag.SLIT_B, dtype=np.int64)]),
                    np.concatenate([mesh.owners, np.full(len(window), k, dtype=np.int64)]),
                    triangles, mesh.regions.copy(), slit_pairs, windows)


def validate(mesh):
    """ Check every mesh invariant, never raises
    """
    report = ValidationReport()

    areas = mesh.signed_areas()
    for t in np.flatnonzero(areas <= 0.):
        report.add('nonpositive-area', 'triangle %d has signed area %g' % (t, areas[t]),
                   triangle=int(t))

    edges, counts = mesh.edges()
    for a, b in edges[counts > 2]:
        report.add('nonconforming', 'edge (%d, %d) shared by more than two triangles' % (a, b))

    slitish = np.isin(mesh.tags, (NodeTag.SLIT_A, NodeTag.SLIT_B, NodeTag.WINDOW_ENDPOINT))
    dirichlet = mesh.tags == NodeTag.DIRICHLET
    once = edges[counts == 1]
    on_slit = slitish[once[:, 0]] & slitish[once[:, 1]] & \
        (mesh.owners[once[:, 0]] == mesh.owners[once[:, 1]])
    open_edges = once[~on_slit]
    on_boundary = np.zeros(mesh.n_nodes, dtype=bool)
    for a, b in open_edges:
        if dirichlet[a] and dirichlet[b]:
            on_boundary[a] = on_boundary[b] = True
        elif dirichlet[a] or dirichlet[b]:
            report.add('dirichlet-coverage',
                       'boundary edge (%d, %d) has an untagged node' % (a, b))
        else:
            report.add('nonconforming', 'open edge (%d, %d) inside the domain' % (a, b))
    for node in np.flatnonzero(dirichlet & ~on_boundary):
        report.add('dirichlet-coverage', 'node %d tagged Dirichlet off the boundary' % node,
                   node=int(node))

    for k, pairs in mesh.slit_pairs.items():
        if not len(pairs):
            continue
        gap = np.abs(mesh.nodes[pairs[:, 0]] - mesh.nodes[pairs[:, 1]]).max()
        if gap > 0.:
            report.add('slit-pair', 'slit %d pairs do not share coordinates' % k, slit=k)
        _check_two_sided(mesh, k, pairs, report)

    return report


def _check_two_sided(mesh, k, pairs, report):
    """ Without window elements the two slit sides must lie in different components
    """
    t = mesh.n_triangles
    incidence = csr_matrix((np.ones(3 * t), (np.repeat(np.arange(t), 3), mesh.triangles.ravel())),
                           shape=(t, mesh.n_nodes))
    window = mesh.windows.get(k, np.empty(0, dtype=np.int64))
    near_window = np.asarray(incidence[:, window].sum(axis=1)).ravel() > 0
    sub = incidence[np.flatnonzero(~near_window)]
    _, labels = connected_components(sub @ sub.T, directed=False)

    touches_a = np.asarray(sub[:, pairs[:, 0]].sum(axis=1)).ravel() > 0
    touches_b = np.asarray(sub[:, pairs[:, 1]].sum(axis=1)).ravel() > 0
    shared = set(labels[touches_a]) & set(labels[touches_b])
    if shared or not touches_b.any():
        report.add('two-sidedness', 'slit %d sides connect outside the window' % k, slit=k)


def euler_characteristic(mesh):
    edges, _ = mesh.edges()
    return len(np.unique(mesh.triangles)) - len(edges) + mesh.n_triangles


def mesh_stats(mesh):
    return {
        'n_nodes': mesh.n_nodes,
        'n_triangles': mesh.n_triangles,
        'h_min': mesh.h_min,
        'h_max': mesh.h_max,
    }


def write_mesh_text(mesh, path):
    lines = [MESH_HEADER, 'nodes %d' % mesh.n_nodes]
    for (x, y), tag, owner in zip(mesh.nodes, mesh.tags, mesh.owners):
        lines.append('%.17g %.17g %d %d' % (x, y, tag, owner))
    lines.append('triangles %d' % mesh.n_triangles)
    for (a, b, c), region in zip(mesh.triangles, mesh.regions):
        lines.append('%d %d %d %d' % (a, b, c, region))
    pairs = [(k, a, b) for k in sorted(mesh.slit_pairs) for a, b in mesh.slit_pairs[k]]
    lines.append('slit_pairs %d' % len(pairs))
    lines += ['%d %d %d' % p for p in pairs]
    window_nodes = [(k, n) for k in sorted(mesh.windows) for n in mesh.windows[k]]
    lines.append('windows %d' % len(window_nodes))
    lines += ['%d %d' % w for w in window_nodes]
    with open(path, 'w') as f:
        f.write('\n'.join(lines) + '\n')


def _section(lines, position, name):
    head = lines[position].split()
    if len(head) != 2 or head[0] != name:
        raise SceneError('mesh file: expected %r section at line %d' % (name, position + 1))
    count = int(head[1])
    rows = [l.split() for l in lines[position + 1:position + 1 + count]]
    return rows, position + 1 + count


def read_mesh_text(path):
    with open(path, 'r') as f:
        lines = [l.strip() for l in f if l.strip()]
    if not lines or lines[0] != MESH_HEADER:
        raise SceneError('not a respec mesh file: %s' % path)

    rows, position = _section(lines, 1, 'nodes')
    nodes = [(float(r[0]), float(r[1])) for r in rows]
    tags = [int(r[2]) for r in rows]
    owners = [int(r[3]) for r in rows]
    rows, position = _section(lines, position, 'triangles')
    triangles = [[int(v) for v in r[:3]] for r in rows]
    regions = [int(r[3]) for r in rows]
    rows, position = _section(lines, position, 'slit_pairs')
    slit_pairs = {}
    for k, a, b in ((int(v) for v in r) for r in rows):
        slit_pairs.setdefault(k, []).append((a, b))
    rows, position = _section(lines, position, 'windows')
    windows = {}
    for k, n in ((int(v) for v in r) for r in rows):
        windows.setdefault(k, []).append(n)
    for k in slit_pairs:
        windows.setdefault(k, [])
    return SlitMesh(nodes, tags, owners, triangles, regions, slit_pairs, windows)
