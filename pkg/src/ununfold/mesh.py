"""Triangle surface meshes: validation, edge tables and discrete curvature.

A :class:`SurfaceMesh` is either a closed topological sphere or a bordered
topological disk.  Everything downstream (unfolding, verification, file
formats) is written against this one immutable type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    BadEulerCharacteristic,
    DegenerateFace,
    InconsistentOrientation,
    MeshError,
    NonManifoldEdge,
    NotADisk,
)

REGION_LABELS = ("brim", "band", "crown", "base", "other")

#: Faces with area below this (model units squared) are rejected.
MIN_FACE_AREA = 1e-10


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Immutable oriented triangle mesh with a derived edge table.

    Build instances with :func:`build_mesh`; the constructor itself does not
    validate anything.

    Attributes
    ----------
    vertices : ndarray, shape (V, 3)
        Read-only vertex coordinates.
    faces : tuple of (int, int, int)
        Counterclockwise vertex triples, viewed from outside.
    labels : tuple of str
        Region label per face, one of :data:`REGION_LABELS`.
    hat_ids : tuple of int or None
        Hat instance per face, ``None`` for faces that belong to no hat.
    edges : tuple of (int, int)
        Canonical ``(min, max)`` vertex pairs, sorted lexicographically.
        The position in this tuple is the EdgeId.
    edge_faces : tuple of tuple of int
        Incident face ids per edge (one for boundary edges, two otherwise).
    parent_vertices, parent_faces : tuple of int or None
        Map back to the mesh this one was extracted from, if any.
    """

    vertices: np.ndarray
    faces: tuple
    labels: tuple
    hat_ids: tuple
    edges: tuple
    edge_faces: tuple
    name: str = ""
    parent_vertices: Optional[tuple] = field(default=None, repr=False)
    parent_faces: Optional[tuple] = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @cached_property
    def edge_index(self) -> dict:
        return {e: i for i, e in enumerate(self.edges)}

    def edge_id(self, u: int, v: int) -> int:
        """EdgeId of the edge joining vertices ``u`` and ``v``."""
        key = (u, v) if u < v else (v, u)
        try:
            return self.edge_index[key]
        except KeyError:
            raise KeyError(f"no edge between vertices {u} and {v}") from None

    @cached_property
    def face_edges(self) -> tuple:
        """Per face, the EdgeIds of (v0 v1), (v1 v2), (v2 v0)."""
        return tuple(
            tuple(self.edge_id(f[i], f[(i + 1) % 3]) for i in range(3))
            for f in self.faces
        )

    @cached_property
    def boundary_edges(self) -> tuple:
        return tuple(i for i, fs in enumerate(self.edge_faces) if len(fs) == 1)

    @cached_property
    def interior_edges(self) -> tuple:
        return tuple(i for i, fs in enumerate(self.edge_faces) if len(fs) == 2)

    @cached_property
    def boundary_vertices(self) -> frozenset:
        return frozenset(v for e in self.boundary_edges for v in self.edges[e])

    @property
    def is_closed(self) -> bool:
        return not self.boundary_edges

    @property
    def kind(self) -> str:
        return "closed" if self.is_closed else "disk"

    @cached_property
    def vertex_faces(self) -> tuple:
        incident = [[] for _ in range(self.n_vertices)]
        for fi, f in enumerate(self.faces):
            for v in f:
                incident[v].append(fi)
        return tuple(tuple(fs) for fs in incident)

    @cached_property
    def parent_edges(self) -> Optional[tuple]:
        if self.parent_vertices is None:
            return None
        pv = self.parent_vertices
        return tuple(tuple(sorted((pv[a], pv[b]))) for a, b in self.edges)

    def hats(self) -> list:
        """Sorted list of distinct hat ids present on the mesh."""
        return sorted({h for h in self.hat_ids if h is not None})

    def edge_length(self, e: int) -> float:
        a, b = self.edges[e]
        return float(np.linalg.norm(self.vertices[a] - self.vertices[b]))

    def face_area(self, f: int) -> float:
        a, b, c = (self.vertices[i] for i in self.faces[f])
        return 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))

    def face_normal(self, f: int) -> np.ndarray:
        a, b, c = (self.vertices[i] for i in self.faces[f])
        n = np.cross(b - a, c - a)
        return n / np.linalg.norm(n)


def _derive_edges(faces):
    incident = {}
    for fi, f in enumerate(faces):
        for i in range(3):
            u, v = f[i], f[(i + 1) % 3]
            incident.setdefault((u, v) if u < v else (v, u), []).append(fi)
    edges = tuple(sorted(incident))
    for e in edges:
        if len(incident[e]) > 2:
            raise NonManifoldEdge(f"edge {e} has {len(incident[e])} incident faces")
    directed = {}
    for fi, f in enumerate(faces):
        for i in range(3):
            u, v = f[i], f[(i + 1) % 3]
            if (u, v) in directed:
                raise InconsistentOrientation(
                    f"faces {directed[(u, v)]} and {fi} traverse edge ({u}, {v}) in the same direction"
                )
            directed[(u, v)] = fi
    return edges, tuple(tuple(sorted(incident[e])) for e in edges)


def _check_vertex_links(n_vertices, faces, edges, edge_faces):
    # Each vertex star must be a single fan, otherwise two sheets are pinched.
    boundary = {e for e, fs in zip(edges, edge_faces) if len(fs) == 1}
    links = [{} for _ in range(n_vertices)]
    for f in faces:
        for i in range(3):
            link = links[f[i]]
            a, b = f[(i + 1) % 3], f[(i + 2) % 3]
            link.setdefault(a, []).append(b)
            link.setdefault(b, []).append(a)
    for v, link in enumerate(links):
        if not link:
            raise MeshError(f"vertex {v} is not used by any face")
        seen = set()
        stack = [next(iter(link))]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(link[x])
        if len(seen) != len(link):
            raise NonManifoldEdge(f"vertex {v} has a disconnected link (pinched vertex)")
        n_boundary = sum(1 for a in link if (min(a, v), max(a, v)) in boundary)
        if n_boundary not in (0, 2):
            raise NonManifoldEdge(f"vertex {v} has {n_boundary} incident boundary edges")


def _count_components(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in range(n)})


def build_mesh(
    vertices,
    faces: Iterable[Sequence[int]],
    labels: Optional[Sequence[str]] = None,
    hat_ids: Optional[Sequence[Optional[int]]] = None,
    name: str = "",
    parent_vertices=None,
    parent_faces=None,
) -> SurfaceMesh:
    """Validate raw geometry and return a :class:`SurfaceMesh`.

    Raises
    ------
    NonManifoldEdge, InconsistentOrientation, DegenerateFace, BadEulerCharacteristic
        When the input is not an oriented triangulated sphere or disk.
    """
    verts = np.array(vertices, dtype=float).reshape(-1, 3)
    if not np.all(np.isfinite(verts)):
        raise MeshError("vertex coordinates must be finite")
    verts.setflags(write=False)
    face_list = tuple(tuple(int(i) for i in f) for f in faces)
    n = len(verts)
    for fi, f in enumerate(face_list):
        if len(f) != 3:
            raise MeshError(f"face {fi} is not a triangle")
        if len(set(f)) != 3:
            raise MeshError(f"face {fi} repeats a vertex: {f}")
        if min(f) < 0 or max(f) >= n:
            raise MeshError(f"face {fi} references a vertex out of range: {f}")
    if not face_list:
        raise MeshError("mesh has no faces")

    if labels is None:
        labels = ("other",) * len(face_list)
    labels = tuple(labels)
    if hat_ids is None:
        hat_ids = (None,) * len(face_list)
    hat_ids = tuple(None if h is None else int(h) for h in hat_ids)
    if len(labels) != len(face_list) or len(hat_ids) != len(face_list):
        raise MeshError("labels and hat ids must have one entry per face")
    for lab in labels:
        if lab not in REGION_LABELS:
            raise MeshError(f"unknown region label {lab!r}")

    edges, edge_faces = _derive_edges(face_list)
    _check_vertex_links(n, face_list, edges, edge_faces)
    if _count_components(n, edges) != 1:
        raise MeshError("mesh is not connected")

    mesh = SurfaceMesh(
        vertices=verts,
        faces=face_list,
        labels=labels,
        hat_ids=hat_ids,
        edges=edges,
        edge_faces=edge_faces,
        name=name,
        parent_vertices=None if parent_vertices is None else tuple(parent_vertices),
        parent_faces=None if parent_faces is None else tuple(parent_faces),
    )
    for fi in range(mesh.n_faces):
        if mesh.face_area(fi) < MIN_FACE_AREA:
            raise DegenerateFace(f"face {fi} has area {mesh.face_area(fi):.3g}")

    chi = mesh.euler_characteristic
    expected = 2 if mesh.is_closed else 1
    if chi != expected:
        raise BadEulerCharacteristic(
            f"{mesh.kind} mesh has V - E + F = {chi}, expected {expected}"
        )
    if mesh.is_closed and 2 * mesh.n_edges != 3 * mesh.n_faces:
        raise BadEulerCharacteristic("closed mesh violates 2E = 3F")
    return mesh


def face_angles(mesh: SurfaceMesh) -> np.ndarray:
    """Interior angles in degrees, shape (F, 3), ordered like the face triples."""
    tri = mesh.vertices[np.array(mesh.faces)]
    out = np.empty((mesh.n_faces, 3))
    for i in range(3):
        p = tri[:, i]
        u = tri[:, (i + 1) % 3] - p
        w = tri[:, (i + 2) % 3] - p
        cross = np.linalg.norm(np.cross(u, w), axis=1)
        out[:, i] = np.degrees(np.arctan2(cross, np.einsum("ij,ij->i", u, w)))
    return out


@dataclass(frozen=True)
class CurvatureReport:
    """Per-vertex angle sums and angle deficits, in degrees."""

    angle_sum: np.ndarray
    deficit: np.ndarray
    boundary: np.ndarray

    @property
    def total_deficit(self) -> float:
        return float(self.deficit.sum())

    def interior(self) -> list:
        return [int(v) for v in np.flatnonzero(~self.boundary)]

    def negative(self, tol: float = 1e-6) -> list:
        """Interior vertices with angle sum above 360 degrees."""
        return [v for v in self.interior() if self.deficit[v] < -tol]

    def positive(self, tol: float = 1e-6) -> list:
        return [v for v in self.interior() if self.deficit[v] > tol]

    def to_records(self) -> list:
        return [
            {
                "vertex": v,
                "angle_sum": float(self.angle_sum[v]),
                "deficit": float(self.deficit[v]),
                "boundary": bool(self.boundary[v]),
            }
            for v in range(len(self.angle_sum))
        ]


def curvature_report(mesh: SurfaceMesh) -> CurvatureReport:
    angles = face_angles(mesh)
    sums = np.zeros(mesh.n_vertices)
    np.add.at(sums, np.array(mesh.faces).ravel(), angles.ravel())
    boundary = np.zeros(mesh.n_vertices, dtype=bool)
    boundary[list(mesh.boundary_vertices)] = True
    return CurvatureReport(angle_sum=sums, deficit=360.0 - sums, boundary=boundary)


def region_subcomplex(mesh: SurfaceMesh, hat_id=None, faces=None) -> SurfaceMesh:
    """Extract the faces of one hat (or an explicit face list) as a disk.

    With neither ``hat_id`` nor ``faces`` given, the whole mesh is taken, which
    only succeeds when the mesh already is a disk.  The result records
    ``parent_vertices`` and ``parent_faces`` for mapping ids back.
    """
    if faces is None:
        if hat_id is None:
            faces = range(mesh.n_faces)
        else:
            faces = [f for f, h in enumerate(mesh.hat_ids) if h == hat_id]
    faces = sorted(faces)
    if not faces:
        raise NotADisk(f"no faces selected (hat {hat_id})")
    used = sorted({v for f in faces for v in mesh.faces[f]})
    remap = {v: i for i, v in enumerate(used)}
    try:
        disk = build_mesh(
            mesh.vertices[used],
            [[remap[v] for v in mesh.faces[f]] for f in faces],
            labels=[mesh.labels[f] for f in faces],
            hat_ids=[mesh.hat_ids[f] for f in faces],
            name=f"{mesh.name}[hat {hat_id}]" if hat_id is not None else mesh.name,
            parent_vertices=used,
            parent_faces=faces,
        )
    except MeshError as exc:
        raise NotADisk(f"selected faces do not form a disk: {exc}") from exc
    if disk.is_closed:
        raise NotADisk("selected faces form a closed surface")
    # A single boundary cycle plus chi == 1 rules out annuli and disjoint unions.
    if len(disk.boundary_vertices) != len(disk.boundary_edges):
        raise NotADisk("boundary is not a simple cycle")
    return disk
