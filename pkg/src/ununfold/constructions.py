"""Generators for hats and the polyhedra built from them.

Two hats are provided.  The *acute hat* is made of acute isosceles triangles
(brim 85/47.5/47.5, band and crown 10/85/85) and has three-fold symmetry; its
3D embedding is solved numerically.  The *stacked hat* is obtained from its
base triangle by four successive tetrahedron stackings and comes with a
certificate listing them.

Hats are always attached pointing outward, inside the right prism over their
base triangle, so several hats on one polyhedron never meet in space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    BoundaryMismatch,
    CrownTooShort,
    CurvatureSignViolation,
    EmbeddingInvalid,
    EmbeddingSolveFailure,
    InvalidStacking,
)
from .mesh import SurfaceMesh, build_mesh, curvature_report, face_angles

HAT_LABELS = ("brim",) * 3 + ("band",) * 3 + ("crown",) * 3
RESIDUAL_TARGET = 1e-12


# --------------------------------------------------------------------------
# small vector helpers


def _unit(v):
    return v / np.linalg.norm(v)


def triangle_normal(a, b, c):
    return _unit(np.cross(b - a, c - a))


def incenter(a, b, c):
    la, lb, lc = np.linalg.norm(b - c), np.linalg.norm(c - a), np.linalg.norm(a - b)
    return (la * a + lb * b + lc * c) / (la + lb + lc)


def inradius(a, b, c):
    la, lb, lc = np.linalg.norm(b - c), np.linalg.norm(c - a), np.linalg.norm(a - b)
    area = 0.5 * np.linalg.norm(np.cross(b - a, c - a))
    return 2 * area / (la + lb + lc)


def _rotate(v, axis, deg):
    t = math.radians(deg)
    return v * math.cos(t) + np.cross(axis, v) * math.sin(t) + axis * np.dot(axis, v) * (1 - math.cos(t))


def regular_tetrahedron(edge=1.0):
    """Vertices and outward-oriented faces of a regular tetrahedron."""
    s = edge / (2 * math.sqrt(2))
    verts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) * s
    faces = []
    for tri in ((0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)):
        a, b, c = verts[list(tri)]
        if np.dot(np.cross(b - a, c - a), a + b + c) < 0:
            tri = (tri[0], tri[2], tri[1])
        faces.append(tri)
    return verts, faces


# --------------------------------------------------------------------------
# acute hat


@dataclass(frozen=True)
class AcuteHatSpec:
    """Face angles (degrees) of the acute hat and the side of its base."""

    brim_apex: float = 85.0
    brim_base: float = 47.5
    band_base: float = 85.0
    band_apex: float = 10.0
    boundary_side: float = 1.0

    def __post_init__(self):
        if abs(self.brim_apex + 2 * self.brim_base - 180) > 1e-12:
            raise ValueError("brim angles must sum to 180")
        if abs(2 * self.band_base + self.band_apex - 180) > 1e-12:
            raise ValueError("band angles must sum to 180")
        if max(self.brim_apex, self.brim_base, self.band_base, self.band_apex) >= 90:
            raise ValueError("all hat angles must be acute")

    @property
    def leg(self) -> float:
        """Length of every boundary-to-interior and interior-to-center edge."""
        return self.boundary_side / (2 * math.cos(math.radians(self.brim_base)))

    @property
    def short_edge(self) -> float:
        """Length of the edges between the three negatively curved vertices."""
        return 2 * self.leg * math.sin(math.radians(self.band_apex / 2))


@dataclass(frozen=True)
class EmbeddingDiagnostics:
    radius: float
    phase: float
    height: float
    center_height: float
    residual: float
    iterations: int


def _hat_base_local(side):
    r = side / math.sqrt(3)
    angles = [90.0 + 120.0 * i for i in range(3)]
    return np.array([[r * math.cos(math.radians(t)), r * math.sin(math.radians(t)), 0.0] for t in angles])


def _acute_positions(params, side):
    rho, phi, h, hc = params
    base = _hat_base_local(side)
    ns = np.array(
        [[rho * math.cos(phi + 2 * math.pi * i / 3), rho * math.sin(phi + 2 * math.pi * i / 3), h] for i in range(3)]
    )
    return base, ns, np.array([0.0, 0.0, hc])


def _acute_residual(params, spec):
    base, ns, c = _acute_positions(params, spec.boundary_side)
    return np.array(
        [
            np.linalg.norm(base[0] - ns[0]) - spec.leg,
            np.linalg.norm(base[1] - ns[0]) - spec.leg,
            np.linalg.norm(ns[0] - ns[1]) - spec.short_edge,
            np.linalg.norm(c - ns[0]) - spec.leg,
        ]
    )


def _acute_jacobian(params, spec):
    rho, phi, h, hc = params
    base, ns, c = _acute_positions(params, spec.boundary_side)

    def dn(i):
        t = phi + 2 * math.pi * i / 3
        # columns: d/drho, d/dphi, d/dh, d/dhc
        return np.array(
            [
                [math.cos(t), -rho * math.sin(t), 0.0, 0.0],
                [math.sin(t), rho * math.cos(t), 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        )

    dc = np.array([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1.0]])

    def ddist(x, y, dx, dy):
        d = x - y
        return d @ (dx - dy) / np.linalg.norm(d)

    zero = np.zeros((3, 4))
    return np.array(
        [
            ddist(base[0], ns[0], zero, dn(0)),
            ddist(base[1], ns[0], zero, dn(0)),
            ddist(ns[0], ns[1], dn(0), dn(1)),
            ddist(c, ns[0], dc, dn(0)),
        ]
    )


@lru_cache(maxsize=None)
def solve_acute_embedding(spec: AcuteHatSpec = AcuteHatSpec(), max_iter=100) -> EmbeddingDiagnostics:
    """Damped Newton solve for the symmetric acute-hat embedding.

    Unknowns are the cylindrical radius and phase of the three interior
    vertices, their common height, and the height of the center vertex.  The
    start is a flattened top view with the interior vertices at height
    ``0.1 * side``.
    """
    s = spec.boundary_side
    x = np.array([0.25 * s / math.sqrt(3), math.radians(150.0 + 15.0), 0.1 * s, 0.2 * s])
    f = _acute_residual(x, spec)
    it = 0
    while np.max(np.abs(f)) > RESIDUAL_TARGET * s and it < max_iter:
        it += 1
        try:
            step = np.linalg.solve(_acute_jacobian(x, spec), -f)
        except np.linalg.LinAlgError as exc:
            raise EmbeddingSolveFailure(f"singular Jacobian at iteration {it}") from exc
        lam = 1.0
        norm0 = np.linalg.norm(f)
        while lam > 1e-10:
            trial = x + lam * step
            ft = _acute_residual(trial, spec)
            if np.linalg.norm(ft) < norm0:
                break
            lam *= 0.5
        else:
            raise EmbeddingSolveFailure(f"line search stalled at iteration {it}")
        x, f = trial, ft
    res = float(np.max(np.abs(f)))
    if res > RESIDUAL_TARGET * s:
        raise EmbeddingSolveFailure(f"residual {res:.3g} after {it} iterations")
    rho, phi, h, hc = x
    if rho < 0:
        rho, phi = -rho, phi + math.pi
    phi = math.remainder(phi, 2 * math.pi)
    return EmbeddingDiagnostics(float(rho), float(phi), float(h), float(hc), res, it)


def _hat_faces():
    brim = [(i, (i + 1) % 3, 3 + i) for i in range(3)]
    band = [(i, 3 + i, 3 + (i - 1) % 3) for i in range(3)]
    crown = [(3 + i, 3 + (i + 1) % 3, 6) for i in range(3)]
    return brim + band + crown


def _local_frame(a, b, c):
    """Orthonormal frame (origin, ex, ey, n) with ``a`` on the local +y axis."""
    g = (a + b + c) / 3
    n = triangle_normal(a, b, c)
    ey = _unit(a - g)
    ex = np.cross(ey, n)
    return g, ex, ey, n


def _place(local, frame):
    g, ex, ey, n = frame
    return g + local[..., :1] * ex + local[..., 1:2] * ey + local[..., 2:3] * n


def _check_equilateral(base, side, tol=1e-9):
    for i in range(3):
        d = np.linalg.norm(base[i] - base[(i + 1) % 3])
        if abs(d - side) > tol * max(side, 1.0):
            raise BoundaryMismatch(f"base triangle side {d} differs from {side}")


def _acute_hat_vertices(base, spec):
    side = spec.boundary_side
    _check_equilateral(base, side)
    diag = solve_acute_embedding(spec)
    _, ns, c = _acute_positions((diag.radius, diag.phase, diag.height, diag.center_height), side)
    frame = _local_frame(*base)
    return np.vstack([base, _place(ns, frame), _place(c[None, :], frame)]), diag


def _validate_acute(verts):
    # top view of every face must stay counterclockwise, interior above base
    for f in _hat_faces():
        a, b, c = verts[list(f)]
        if np.cross(b - a, c - a)[2] <= 0:
            raise EmbeddingInvalid(f"face {f} is flipped in top view")
    if np.any(verts[3:, 2] <= 0):
        raise EmbeddingInvalid("interior vertex at or below the base plane")


def acute_hat(boundary_side: float = 1.0):
    """The acute hat as a 7-vertex, 9-face disk over an equilateral base in z=0.

    Returns ``(mesh, diagnostics)``.  Vertex order is B0 B1 B2 (boundary),
    N0 N1 N2 (negatively curved), C (center).  Faces are the three brim,
    three band and three crown triangles, in that order.
    """
    spec = AcuteHatSpec(boundary_side=boundary_side)
    base = _hat_base_local(boundary_side)
    verts, diag = _acute_hat_vertices(base, spec)
    # the local frame of a base already in z=0 is the identity up to rounding
    _, ns, c = _acute_positions((diag.radius, diag.phase, diag.height, diag.center_height), boundary_side)
    verts = np.vstack([base, ns, c])
    _validate_acute(verts)
    mesh = build_mesh(verts, _hat_faces(), labels=HAT_LABELS, hat_ids=[0] * 9, name="acute-hat")
    return mesh, diag


def flat_hat(boundary_side: float = 1.0, radius: float = 0.25):
    """Control fixture: the hat combinatorics laid flat in the base plane.

    Every interior vertex has angle sum exactly 360 degrees, so any spanning
    tree develops back onto the flat layout without overlap.
    """
    base = _hat_base_local(boundary_side)
    r = radius * boundary_side / math.sqrt(3)
    ns = np.array([[r * math.cos(math.radians(150.0 + 120 * i)), r * math.sin(math.radians(150.0 + 120 * i)), 0.0]
                   for i in range(3)])
    verts = np.vstack([base, ns, [[0.0, 0.0, 0.0]]])
    return build_mesh(verts, _hat_faces(), labels=HAT_LABELS, hat_ids=[0] * 9, name="flat-hat")


def prism_containment_check(hat: SurfaceMesh, base, tol=1e-12) -> bool:
    """True iff every hat vertex lies in the outward right prism over ``base``.

    The hat's boundary must be a triangle congruent to ``base`` (otherwise
    :class:`BoundaryMismatch`); whether it sits *on* the base is part of the
    containment test itself.
    """
    base = np.asarray(base, dtype=float)
    bverts = sorted(hat.boundary_vertices)
    if len(bverts) != 3:
        raise BoundaryMismatch(f"hat boundary has {len(bverts)} vertices, expected 3")
    hb = sorted(np.linalg.norm(hat.vertices[bverts[i]] - hat.vertices[bverts[(i + 1) % 3]]) for i in range(3))
    bb = sorted(np.linalg.norm(base[i] - base[(i + 1) % 3]) for i in range(3))
    if not np.allclose(hb, bb, rtol=1e-9, atol=1e-12):
        raise BoundaryMismatch("hat boundary is not congruent to the base triangle")
    a, b, c = base
    n = triangle_normal(a, b, c)
    scale = max(bb)
    for p in hat.vertices:
        if np.dot(p - a, n) < -tol * scale:
            return False
        q = p - np.dot(p - a, n) * n
        for u, v in ((a, b), (b, c), (c, a)):
            if np.dot(np.cross(v - u, q - u), n) < -tol * scale * scale:
                return False
    return True


def hat_base_triangle(disk: SurfaceMesh):
    """Boundary vertices of a hat disk in counterclockwise (face) order."""
    nxt = {}
    for e in disk.boundary_edges:
        (f,) = disk.edge_faces[e]
        tri = disk.faces[f]
        for i in range(3):
            u, v = tri[i], tri[(i + 1) % 3]
            if {u, v} == set(disk.edges[e]):
                nxt[u] = v
    start = min(nxt)
    cycle = [start]
    while nxt[cycle[-1]] != start:
        cycle.append(nxt[cycle[-1]])
    return cycle


# --------------------------------------------------------------------------
# stacked hat


@dataclass(frozen=True)
class Stacking:
    """One tetrahedron glued onto ``face`` with new vertex ``apex``."""

    apex: int
    face: tuple
    height: float


@dataclass(frozen=True)
class StackingCertificate:
    """Sequence of gluings that builds a mesh from an initial set of faces."""

    initial_faces: tuple
    steps: tuple

    def validate(self, mesh: SurfaceMesh, tol=1e-12) -> bool:
        """Replay the gluings; raise :class:`InvalidStacking` on any failure."""

        def canon(f):
            i = f.index(min(f))
            return f[i:] + f[:i]

        surface = {canon(tuple(f)) for f in self.initial_faces}
        present = {v for f in self.initial_faces for v in f}
        for k, st in enumerate(self.steps):
            face = canon(tuple(st.face))
            if face not in surface:
                raise InvalidStacking(f"step {k}: face {st.face} is not on the current surface")
            if st.apex in present:
                raise InvalidStacking(f"step {k}: apex {st.apex} already exists")
            a, b, c = (mesh.vertices[i] for i in face)
            height = float(np.dot(mesh.vertices[st.apex] - a, triangle_normal(a, b, c)))
            if height <= tol * max(np.linalg.norm(b - a), 1e-300):
                raise InvalidStacking(f"step {k}: apex {st.apex} is not strictly outside face {st.face}")
            surface.remove(face)
            i, j, m = face
            surface |= {canon((i, j, st.apex)), canon((j, m, st.apex)), canon((m, i, st.apex))}
            present.add(st.apex)
        final = {canon(tuple(f)) for f in mesh.faces}
        if surface != final:
            raise InvalidStacking("replayed surface does not match the mesh faces")
        return True

    def to_dict(self):
        return {
            "initial_faces": [list(f) for f in self.initial_faces],
            "steps": [{"apex": s.apex, "face": list(s.face), "height": s.height} for s in self.steps],
        }


_UNIT_INRADIUS = 1 / (2 * math.sqrt(3))


@dataclass(frozen=True)
class StackedHatSpec:
    """Parameters of the stacked hat.

    Lengths are given for a unit equilateral base and are scaled by the ratio
    of the actual base inradius to that of the unit triangle.

    Attributes
    ----------
    boundary : array (3, 3) or None
        Base triangle, counterclockwise seen from outside; defaults to the
        unit equilateral triangle in z=0.
    interface_side : float
        Side of the band-crown interface triangle (equilateral in top view,
        centered at the in-center).
    heights : (float, float, float)
        Heights of the three interface vertices above the base plane.
    crown_height : float or None
        Altitude of the isosceles crown triangles; default gives a 20 degree
        apex angle.
    """

    boundary: Optional[tuple] = None
    interface_side: float = 0.25
    heights: tuple = (0.01, 0.012, 0.014)
    crown_height: Optional[float] = None

    def base(self):
        if self.boundary is None:
            return _hat_base_local(1.0)
        return np.array(self.boundary, dtype=float).reshape(3, 3)

    @property
    def crown_altitude(self) -> float:
        if self.crown_height is not None:
            return float(self.crown_height)
        return self.interface_side / (2 * math.tan(math.radians(10.0)))

    @property
    def crown_apex_angle(self) -> float:
        return 2 * math.degrees(math.atan(self.interface_side / (2 * self.crown_altitude)))


STACKED_FACES = (
    (0, 1, 3), (1, 2, 3), (2, 0, 4),   # brim
    (3, 2, 4), (0, 3, 5), (4, 0, 5),   # band
    (3, 4, 6), (4, 5, 6), (5, 3, 6),   # crown
)
STACKED_SPLITS = ((3, (0, 1, 2)), (4, (2, 0, 3)), (5, (0, 3, 4)), (6, (3, 4, 5)))


def _stacked_hat_vertices(spec: StackedHatSpec):
    base = spec.base()
    b1, b2, b3 = base
    n = triangle_normal(b1, b2, b3)
    sigma = inradius(b1, b2, b3) / _UNIT_INRADIUS
    iota = spec.interface_side * sigma
    center = incenter(b1, b2, b3)
    toward = b2 - center
    toward = _unit(toward - np.dot(toward, n) * n)
    r = iota / math.sqrt(3)
    top = [center + r * _rotate(toward, n, 120.0 * i) for i in range(3)]
    ring = [top[i] + spec.heights[i] * sigma * n for i in range(3)]
    if spec.crown_apex_angle >= 36.0:
        raise CrownTooShort(f"crown apex angle {spec.crown_apex_angle:.3f} is not below 36 degrees")
    # apex equidistant from the ring, above its circumcenter
    v1, v2, v3 = ring
    m = triangle_normal(v1, v2, v3)
    a, b = v2 - v1, v3 - v1
    axb = np.cross(a, b)
    circ = v1 + (np.dot(b, b) * np.cross(axb, a) + np.dot(a, a) * np.cross(b, axb)) / (2 * np.dot(axb, axb))
    rc = np.linalg.norm(v1 - circ)
    leg = math.hypot(spec.crown_altitude * sigma, iota / 2)
    apex = circ + math.sqrt(leg * leg - rc * rc) * m
    return np.vstack([base, ring, apex])


def stacked_hat(spec: StackedHatSpec = StackedHatSpec(), name="stacked-hat"):
    """Build the stacked hat; returns ``(mesh, certificate)``.

    Vertex order is B1 B2 B3, v1 v2 v3 (band-crown interface), v4 (center).
    """
    verts = _stacked_hat_vertices(spec)
    mesh = build_mesh(verts, STACKED_FACES, labels=HAT_LABELS, hat_ids=[0] * 9, name=name)
    steps = []
    for apex, face in STACKED_SPLITS:
        a, b, c = (verts[i] for i in face)
        steps.append(Stacking(apex, face, float(np.dot(verts[apex] - a, triangle_normal(a, b, c)))))
    cert = StackingCertificate(initial_faces=((0, 1, 2),), steps=tuple(steps))
    cert.validate(mesh)
    curv = curvature_report(mesh)
    if sorted(curv.negative()) != [3, 4, 5] or curv.positive() != [6]:
        raise CurvatureSignViolation(
            f"expected v1..v3 negative and v4 positive, got deficits {curv.deficit[3:].round(6).tolist()}"
        )
    angles = face_angles(mesh)
    apex_angles = [angles[f][2] for f in (6, 7, 8)]
    if max(apex_angles) >= 36.0:
        raise CrownTooShort(f"crown apex angles {apex_angles}")
    return mesh, cert


# --------------------------------------------------------------------------
# polyhedra


@dataclass(frozen=True)
class CaltropFamilyParams:
    k: int
    variant: str = "acute-subdivided"

    def __post_init__(self):
        if self.variant not in ("acute-subdivided", "stacked-family"):
            raise ValueError(f"unknown variant {self.variant!r}")
        lo = 1 if self.variant == "acute-subdivided" else 0
        if int(self.k) != self.k or self.k < lo:
            raise ValueError(f"k must be an integer >= {lo} for {self.variant}")


def _attach_hats(base_verts, base_faces, hat_builder, name):
    verts = [np.asarray(v, dtype=float) for v in base_verts]
    faces, labels, hat_ids = [], [], []
    extra = []
    for hid, tri in enumerate(base_faces):
        local_verts, local_faces, info = hat_builder(np.array([verts[i] for i in tri]), hid)
        ids = list(tri)
        for p in local_verts[3:]:
            ids.append(len(verts))
            verts.append(p)
        for f in local_faces:
            faces.append(tuple(ids[i] for i in f))
        labels.extend(HAT_LABELS)
        hat_ids.extend([hid] * 9)
        extra.append((ids, info))
    mesh = build_mesh(np.array(verts), faces, labels=labels, hat_ids=hat_ids, name=name)
    return mesh, extra


def _acute_builder(base, hid):
    side = float(np.linalg.norm(base[1] - base[0]))
    verts, _ = _acute_hat_vertices(base, AcuteHatSpec(boundary_side=side))
    return verts, _hat_faces(), None


def caltrop() -> SurfaceMesh:
    """Regular unit tetrahedron with every face replaced by an outward acute hat."""
    verts, faces = regular_tetrahedron()
    mesh, _ = _attach_hats(verts, faces, _acute_builder, "caltrop")
    return mesh


def subdivided_tetrahedron(k: int):
    """Regular tetrahedron with each face cut into a k-by-k triangular grid.

    Returns ``(vertices, faces)`` with 4k^2 faces and 2k^2 + 2 vertices.
    """
    CaltropFamilyParams(k, "acute-subdivided")
    tv, tfaces = regular_tetrahedron()
    index, verts, faces = {}, [], []

    def vid(weights):
        key = frozenset((v, w) for v, w in weights if w)
        if key not in index:
            index[key] = len(verts)
            verts.append(sum(tv[v] * (w / k) for v, w in weights))
        return index[key]

    for a, b, c in tfaces:
        def p(i, j):
            return vid(((a, k - i - j), (b, i), (c, j)))

        for i in range(k):
            for j in range(k - i):
                faces.append((p(i, j), p(i + 1, j), p(i, j + 1)))
                if i + j < k - 1:
                    faces.append((p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)))
    return np.array(verts), faces


def subdivided_caltrop(k: int) -> SurfaceMesh:
    """Subdivided tetrahedron with an outward acute hat on every grid triangle."""
    verts, faces = subdivided_tetrahedron(k)
    mesh, _ = _attach_hats(verts, faces, _acute_builder, f"subdivided-caltrop-k{k}")
    return mesh


#: Height of the refining stackings, as a fraction of the face inradius.
REFINE_HEIGHT = 0.02


def stacked_tetrahedron(k: int):
    """Regular tetrahedron refined by k shallow in-center stackings.

    The face at position 0 of the face list is always the one refined; it is
    removed and its three children are appended.  Returns
    ``(vertices, faces, certificate)``.
    """
    CaltropFamilyParams(k, "stacked-family")
    tv, tfaces = regular_tetrahedron()
    verts = [v for v in tv]
    faces = [tuple(f) for f in tfaces]
    steps = []
    for _ in range(k):
        a, b, c = faces.pop(0)
        pa, pb, pc = verts[a], verts[b], verts[c]
        n = triangle_normal(pa, pb, pc)
        height = REFINE_HEIGHT * inradius(pa, pb, pc)
        p = len(verts)
        verts.append(incenter(pa, pb, pc) + height * n)
        steps.append(Stacking(p, (a, b, c), float(height)))
        faces.extend([(a, b, p), (b, c, p), (c, a, p)])
    cert = StackingCertificate(initial_faces=tuple(tuple(f) for f in tfaces), steps=tuple(steps))
    return np.array(verts), faces, cert


def stacked_family(k: int, spec: StackedHatSpec = StackedHatSpec()):
    """Refined tetrahedron with a stacked hat on every face.

    Returns ``(mesh, certificate)``; the certificate chains the base
    tetrahedron, the k refining stackings and four stackings per hat, so it
    witnesses that the result is a stacked polyhedron.
    """
    verts, faces, base_cert = stacked_tetrahedron(k)

    def builder(base, hid):
        hv = _stacked_hat_vertices(StackedHatSpec(
            boundary=tuple(map(tuple, base)),
            interface_side=spec.interface_side,
            heights=spec.heights,
            crown_height=spec.crown_height,
        ))
        return hv, STACKED_FACES, None

    mesh, extra = _attach_hats(verts, faces, builder, f"stacked-family-k{k}")
    steps = list(base_cert.steps)
    for ids, _ in extra:
        for apex, face in STACKED_SPLITS:
            g = tuple(ids[i] for i in face)
            a, b, c = (mesh.vertices[i] for i in g)
            h = float(np.dot(mesh.vertices[ids[apex]] - a, triangle_normal(a, b, c)))
            steps.append(Stacking(ids[apex], g, h))
    cert = StackingCertificate(initial_faces=base_cert.initial_faces, steps=tuple(steps))
    cert.validate(mesh)
    return mesh, cert


def hat_regions(mesh: SurfaceMesh) -> dict:
    """Map hat id -> sorted face ids."""
    out = {}
    for f, h in enumerate(mesh.hat_ids):
        if h is not None:
            out.setdefault(h, []).append(f)
    return out


def base_vertices(mesh: SurfaceMesh) -> list:
    """Vertices that are not interior to any hat."""
    hats_at = [set() for _ in range(mesh.n_vertices)]
    for f, h in enumerate(mesh.hat_ids):
        for v in mesh.faces[f]:
            hats_at[v].add(h)
    return [v for v, hs in enumerate(hats_at) if None in hs or len(hs) != 1]
