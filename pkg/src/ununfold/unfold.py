"""Cut sets, pieces, planar development and the hat cut classifiers.

A cut set is any collection of EdgeIds.  Faces joined by an uncut interior
edge stay attached; the connected components of that adjacency are the
pieces.  Boundary edges of a disk have a single face and so behave as cut.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .errors import CurvatureSignatureMismatch, NonDevelopablePiece
from .mesh import SurfaceMesh, curvature_report
from .predicates import get_backend

#: Two developed images of the same corner must agree to this distance.
COINCIDENCE_TOL = 1e-9


class UnionFind:
    """Disjoint sets over hashable items, with path halving."""

    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> bool:
        """Merge the sets of ``a`` and ``b``; False if they were already one."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def groups(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def cut_set(mesh: SurfaceMesh, edges: Iterable = ()) -> frozenset:
    """Normalize a cut set given as EdgeIds and/or ``(u, v)`` vertex pairs."""
    out = set()
    for e in edges:
        if isinstance(e, (tuple, list)):
            out.add(mesh.edge_id(*e))
        else:
            e = int(e)
            if not 0 <= e < mesh.n_edges:
                raise ValueError(f"edge id {e} out of range")
            out.add(e)
    return frozenset(out)


def path_edges(mesh: SurfaceMesh, vertex_path) -> frozenset:
    """Cut set along a vertex path ``[v0, v1, ...]``."""
    return frozenset(mesh.edge_id(a, b) for a, b in zip(vertex_path, vertex_path[1:]))


def dual_arcs(mesh: SurfaceMesh, cuts=frozenset()) -> list:
    """Arcs ``(edge, f, g)`` of the dual graph: interior edges not cut."""
    cuts = frozenset(cuts)
    return [(e, *mesh.edge_faces[e]) for e in mesh.interior_edges if e not in cuts]


def pieces_of(mesh: SurfaceMesh, cuts=frozenset()) -> list:
    """Partition of the faces into pieces, each a sorted tuple, sorted by first face."""
    uf = UnionFind(range(mesh.n_faces))
    for _, f, g in dual_arcs(mesh, cuts):
        uf.union(f, g)
    return sorted(tuple(sorted(g)) for g in uf.groups())


# --------------------------------------------------------------------------
# development


@dataclass
class Piece:
    """One developed piece.

    ``coords[f]`` holds the planar images of ``mesh.faces[f]`` (same vertex
    order) as numbers of the development backend.  ``tree`` lists the dual
    spanning tree arcs ``(parent_face, child_face, edge)`` in placement order.
    """

    faces: tuple
    coords: dict
    tree: tuple
    mode: str
    mesh: SurfaceMesh = field(repr=False)
    cuts: frozenset = field(repr=False)

    def redevelop(self, mode):
        return _develop_piece(self.mesh, self.cuts, self.faces, mode)

    def float_coords(self) -> dict:
        bk = get_backend(self.mode)
        return {
            f: np.array([[bk.to_float(x), bk.to_float(y)] for x, y in tri])
            for f, tri in self.coords.items()
        }


@dataclass
class Unfolding:
    mesh: SurfaceMesh
    cuts: frozenset
    mode: str
    pieces: list

    def piece_of_face(self, f) -> Piece:
        for p in self.pieces:
            if f in p.coords:
                return p
        raise KeyError(f)


class _Lengths:
    def __init__(self, mesh, bk):
        self.mesh, self.bk, self.cache = mesh, bk, {}

    def __call__(self, u, v):
        key = (u, v) if u < v else (v, u)
        if key not in self.cache:
            bk = self.bk
            p, q = self.mesh.vertices[u], self.mesh.vertices[v]
            if bk.name == "float":
                self.cache[key] = math.dist(p, q)
            else:
                self.cache[key] = bk.sqrt(sum((bk.const(a) - bk.const(b)) * (bk.const(a) - bk.const(b)) for a, b in zip(p, q)))
        return self.cache[key]


def _third_point(bk, p, q, d, a, b):
    """Point r left of p -> q with |pr| = a and |qr| = b, given |pq| = d."""
    x = (d * d + a * a - b * b) / (2 * d)
    y = bk.sqrt(a * a - x * x)
    ux, uy = q[0] - p[0], q[1] - p[1]
    return (p[0] + (x * ux - y * uy) / d, p[1] + (x * uy + y * ux) / d)


def _rotate_to(face, u, v):
    """Rotate a face triple so that it starts with the directed edge u -> v."""
    for i in range(3):
        if face[i] == u and face[(i + 1) % 3] == v:
            return face[i], face[(i + 1) % 3], face[(i + 2) % 3]
    return None


def _develop_piece(mesh, cuts, faces, mode):
    bk = get_backend(mode)
    length = _Lengths(mesh, bk)
    in_piece = set(faces)
    uncut = [(e, f, g) for e, f, g in dual_arcs(mesh, cuts) if f in in_piece]

    corners = UnionFind((f, v) for f in faces for v in mesh.faces[f])
    neighbors = {f: [] for f in faces}
    for e, f, g in uncut:
        for v in mesh.edges[e]:
            corners.union((f, v), (g, v))
        neighbors[f].append((e, g))
        neighbors[g].append((e, f))
    image = {}

    def settle(f, v, point):
        key = corners.find((f, v))
        if key in image:
            old = image[key]
            gap = math.hypot(bk.to_float(old[0]) - bk.to_float(point[0]),
                             bk.to_float(old[1]) - bk.to_float(point[1]))
            if gap > COINCIDENCE_TOL:
                raise NonDevelopablePiece(
                    f"vertex {v} develops to two points {gap:.3g} apart in the piece of face {faces[0]}"
                )
            return old
        image[key] = point
        return point

    root = faces[0]
    e0 = min(mesh.face_edges[root])
    u, v = mesh.edges[e0]
    tri = _rotate_to(mesh.faces[root], u, v) or _rotate_to(mesh.faces[root], v, u)
    p, q, r = tri
    d = length(p, q)
    zero = bk.const(0.0)
    pp = settle(root, p, (zero, zero))
    qq = settle(root, q, (d, zero))
    settle(root, r, _third_point(bk, pp, qq, d, length(p, r), length(q, r)))

    placed = {root}
    tree = []
    queue = deque([root])
    while queue:
        f = queue.popleft()
        for e, g in sorted(neighbors[f]):
            if g in placed:
                continue
            a, b = mesh.edges[e]
            tri = _rotate_to(mesh.faces[g], a, b) or _rotate_to(mesh.faces[g], b, a)
            p, q, r = tri
            pp = image[corners.find((g, p))]
            qq = image[corners.find((g, q))]
            settle(g, r, _third_point(bk, pp, qq, length(p, q), length(p, r), length(q, r)))
            placed.add(g)
            tree.append((f, g, e))
            queue.append(g)

    coords = {f: tuple(image[corners.find((f, v))] for v in mesh.faces[f]) for f in faces}
    return Piece(tuple(faces), coords, tuple(tree), bk.name, mesh, frozenset(cuts))


def develop(mesh: SurfaceMesh, cuts=frozenset(), mode="float") -> Unfolding:
    """Lay every piece of ``mesh`` cut along ``cuts`` into the plane.

    Each piece is rooted at its smallest face, whose smallest edge goes on the
    positive x-axis from the origin; faces are then added breadth-first across
    uncut edges.  Every vertex corner shared through uncut edges gets one
    image, so faces that close up around a vertex must agree there, otherwise
    :class:`NonDevelopablePiece` is raised.
    """
    cuts = frozenset(cuts)
    pieces = [_develop_piece(mesh, cuts, faces, mode) for faces in pieces_of(mesh, cuts)]
    return Unfolding(mesh, cuts, get_backend(mode).name, pieces)


# --------------------------------------------------------------------------
# cut classification inside a disk


class CutKind(str, Enum):
    SEPARATING_CYCLE = "separating_cycle"
    BOUNDARY_TO_BOUNDARY_PATH = "boundary_to_boundary_path"
    FOREST_ONE_PER_TREE = "forest_one_per_tree"


@dataclass(frozen=True)
class CutClassification:
    kind: CutKind
    witness: tuple

    @property
    def separates(self) -> bool:
        return self.kind is not CutKind.FOREST_ONE_PER_TREE


def _adjacency(disk, edges):
    adj = {}
    for e in edges:
        a, b = disk.edges[e]
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v in adj:
        adj[v].sort()
    return adj


def _bfs_path(adj, src, dst):
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for y in adj.get(x, ()):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if dst not in prev:
        return None
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _interior_cuts(disk, cuts):
    interior = set(disk.interior_edges)
    return sorted(e for e in cuts if e in interior)


def classify_cuts_in_disk(disk: SurfaceMesh, cuts) -> CutClassification:
    """Separate cut structures inside a disk into the three possible cases.

    A cycle of cut edges, or a cut path joining two boundary vertices,
    splits the disk; otherwise the cuts form a forest touching the boundary at
    most once per tree.  Witnesses are vertex lists (cycle, path) or, for the
    forest, one sorted edge tuple per tree.
    """
    edges = _interior_cuts(disk, cuts)
    uf = UnionFind()
    seen = []
    for e in edges:
        a, b = disk.edges[e]
        uf.add(a)
        uf.add(b)
        if not uf.union(a, b):
            path = _bfs_path(_adjacency(disk, seen), a, b)
            return CutClassification(CutKind.SEPARATING_CYCLE, tuple(path + [a]))
        seen.append(e)

    boundary = disk.boundary_vertices
    adj = _adjacency(disk, edges)
    trees = {}
    for e in edges:
        trees.setdefault(uf.find(disk.edges[e][0]), []).append(e)
    for root in sorted(trees):
        verts = sorted({v for e in trees[root] for v in disk.edges[e]})
        on_boundary = [v for v in verts if v in boundary]
        if len(on_boundary) >= 2:
            path = _bfs_path(adj, on_boundary[0], on_boundary[1])
            return CutClassification(CutKind.BOUNDARY_TO_BOUNDARY_PATH, tuple(path))
    forest = tuple(sorted(tuple(sorted(t)) for t in trees.values()))
    return CutClassification(CutKind.FOREST_ONE_PER_TREE, forest)


@dataclass(frozen=True)
class HatSignature:
    boundary: tuple
    negative: tuple
    center: int


def hat_signature(disk: SurfaceMesh) -> HatSignature:
    """Boundary, negatively curved and center vertices of a hat-like disk."""
    curv = curvature_report(disk)
    neg, pos = curv.negative(), curv.positive()
    interior = curv.interior()
    if len(neg) != 3 or len(pos) != 1 or len(interior) != 4:
        raise CurvatureSignatureMismatch(
            f"expected 3 negative and 1 positive interior vertices, got {len(neg)} and {len(pos)}"
        )
    return HatSignature(tuple(sorted(disk.boundary_vertices)), tuple(neg), pos[0])


def lemma3_filter(disk: SurfaceMesh, cuts) -> bool:
    """Whether the interior cuts form one simple path from the boundary to the center.

    The path must visit exactly one boundary vertex (an endpoint), end at the
    positively curved center, and cut at least two edges at every negatively
    curved vertex.
    """
    sig = hat_signature(disk)
    edges = _interior_cuts(disk, cuts)
    if not edges:
        return False
    adj = _adjacency(disk, edges)
    degree = {v: len(ns) for v, ns in adj.items()}
    if any(d > 2 for d in degree.values()):
        return False
    if len(edges) != len(adj) - 1:
        return False
    ends = sorted(v for v, d in degree.items() if d == 1)
    if len(ends) != 2 or sig.center not in ends:
        return False
    start = ends[0] if ends[1] == sig.center else ends[1]
    if start not in sig.boundary:
        return False
    if sum(1 for v in adj if v in sig.boundary) != 1:
        return False
    if any(degree.get(v, 0) < 2 for v in sig.negative):
        return False
    walk = _bfs_path(adj, start, sig.center)
    return walk is not None and len(walk) == len(adj)
