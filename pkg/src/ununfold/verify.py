"""Exhaustive hat certificates and the piece-counting lower bounds.

A hat has a single-piece edge unfolding iff some spanning tree of its dual
graph develops without overlap (the hat's boundary is cut when it is looked
at in isolation).  Hats have at most a few hundred such trees, so every one
of them is developed and checked; the count is cross-checked against the
matrix-tree theorem.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .constructions import base_vertices, hat_regions
from .errors import CurvatureSignatureMismatch, NonDevelopablePiece, TooLarge
from .mesh import SurfaceMesh, region_subcomplex
from .predicates import Contact, get_backend, overlap_margin, piece_contacts
from .unfold import (
    UnionFind,
    _develop_piece,
    classify_cuts_in_disk,
    dual_arcs,
    hat_signature,
    lemma3_filter,
    path_edges,
    pieces_of,
)

MAX_TREE_FACES = 16
#: Float-mode overlaps must penetrate at least this far to count.
FLOAT_MARGIN = 1e-6
SCHEMA_VERSION = "1"


# --------------------------------------------------------------------------
# spanning trees


def matrix_tree_count(n_nodes: int, arcs) -> int:
    """Number of spanning trees via an exact integer (Bareiss) determinant."""
    if n_nodes == 1:
        return 1
    lap = [[0] * n_nodes for _ in range(n_nodes)]
    for _, f, g in arcs:
        lap[f][f] += 1
        lap[g][g] += 1
        lap[f][g] -= 1
        lap[g][f] -= 1
    m = [row[1:] for row in lap[1:]]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def enumerate_dual_spanning_trees(disk: SurfaceMesh):
    """Yield every spanning tree of the disk's dual graph as a sorted edge tuple.

    Arcs are the interior edges; trees come out in a fixed order.
    """
    n = disk.n_faces
    if n > MAX_TREE_FACES:
        raise TooLarge(f"{n} faces exceeds the enumeration limit of {MAX_TREE_FACES}")
    arcs = dual_arcs(disk)
    if n == 1:
        yield ()
        return

    def connectable(chosen, start):
        uf = UnionFind(range(n))
        for _, f, g in chosen:
            uf.union(f, g)
        for _, f, g in arcs[start:]:
            uf.union(f, g)
        return len({uf.find(x) for x in range(n)}) == 1

    def rec(i, chosen, uf_parent):
        if len(chosen) == n - 1:
            yield tuple(sorted(e for e, _, _ in chosen))
            return
        if len(chosen) + len(arcs) - i < n - 1:
            return
        e, f, g = arcs[i]

        def find(x):
            while uf_parent[x] != x:
                x = uf_parent[x]
            return x

        rf, rg = find(f), find(g)
        if rf != rg:
            parent = list(uf_parent)
            parent[max(rf, rg)] = min(rf, rg)
            yield from rec(i + 1, chosen + [arcs[i]], parent)
        if connectable(chosen, i + 1):
            yield from rec(i + 1, chosen, uf_parent)

    yield from rec(0, [], list(range(n)))


# --------------------------------------------------------------------------
# automorphisms and boundary-to-center cut paths


def combinatorial_automorphisms(disk: SurfaceMesh) -> list:
    """All vertex permutations mapping the face set onto itself."""
    faces = {frozenset(f) for f in disk.faces}
    n = disk.n_vertices
    nbrs = [set() for _ in range(n)]
    for a, b in disk.edges:
        nbrs[a].add(b)
        nbrs[b].add(a)
    deg = [len(disk.vertex_faces[v]) for v in range(n)]
    out = []

    def rec(v, perm, used):
        if v == n:
            if all(frozenset(perm[x] for x in f) in faces for f in faces):
                out.append(tuple(perm))
            return
        for w in range(n):
            if w in used or deg[w] != deg[v] or len(nbrs[w]) != len(nbrs[v]):
                continue
            ok = all((perm[u] in nbrs[w]) == (u in nbrs[v]) for u in range(v))
            if ok:
                perm.append(w)
                used.add(w)
                rec(v + 1, perm, used)
                perm.pop()
                used.discard(w)

    rec(0, [], set())
    return out


@dataclass
class Lemma3Census:
    paths: list
    classes: list
    group_order: int

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_of(self, path_index: int) -> int:
        for c, members in enumerate(self.classes):
            if path_index in members:
                return c
        raise KeyError(path_index)


def _canonical(edge_pairs, group):
    return min(
        tuple(sorted(tuple(sorted((sigma[a], sigma[b]))) for a, b in edge_pairs))
        for sigma in group
    )


def enumerate_lemma3_paths(hat: SurfaceMesh) -> Lemma3Census:
    """All cut paths accepted by :func:`lemma3_filter`, grouped up to symmetry.

    Paths are vertex tuples from a boundary vertex to the center; classes are
    orbits under the hat's combinatorial automorphisms (reflections included).
    """
    sig = hat_signature(hat)
    interior = set(hat.interior_edges)
    adj = {v: [] for v in range(hat.n_vertices)}
    for e in interior:
        a, b = hat.edges[e]
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort()
    boundary = set(sig.boundary)
    found = []

    def dfs(path):
        v = path[-1]
        if v == sig.center:
            if lemma3_filter(hat, path_edges(hat, path)):
                found.append(tuple(path))
            return
        for w in adj[v]:
            if w not in path and w not in boundary:
                dfs(path + [w])

    for b in sorted(boundary):
        dfs([b])
    group = combinatorial_automorphisms(hat)
    keys = {}
    classes = []
    for i, p in enumerate(found):
        key = _canonical(list(zip(p, p[1:])), group)
        if key not in keys:
            keys[key] = len(classes)
            classes.append([])
        classes[keys[key]].append(i)
    return Lemma3Census(found, classes, len(group))


# --------------------------------------------------------------------------
# hat verification


@dataclass
class TreeOutcome:
    tree_id: int
    tree_edges: list
    cut_edges: list
    overlap_pairs: list
    certified_overlaps: int
    crown_overlap: bool
    max_margin: Optional[float]
    undecided_pairs: int
    lemma3_class: Optional[int]


@dataclass
class VerificationReport:
    mesh_id: str
    mode: str
    certified: bool
    enumeration_size: int
    matrix_tree_count: int
    outcomes: list
    lemma3_paths: Optional[int]
    lemma3_classes: Optional[int]
    conclusion: bool
    witness: Optional[dict] = None
    wall_time: float = 0.0

    def to_dict(self, include_timing=False) -> dict:
        d = asdict(self)
        d["schema_version"] = SCHEMA_VERSION
        d["kind"] = "hat-verification"
        if not include_timing:
            d.pop("wall_time")
        return d


def _cuts_for_tree(hat, tree_edges):
    keep = set(tree_edges)
    return frozenset(e for e in range(hat.n_edges) if e not in keep)


def _check_tree(args):
    hat, tree_id, tree_edges, mode, path_class = args
    cuts = _cuts_for_tree(hat, tree_edges)
    faces = tuple(range(hat.n_faces))
    piece = _develop_piece(hat, cuts, faces, mode)
    contacts = piece_contacts(piece, strict=False)
    overlaps = sorted(p for p, c in contacts.items() if c is Contact.OVERLAP)
    undecided = sum(1 for c in contacts.values() if c is Contact.INDETERMINATE)
    fc = piece.float_coords()
    margins = {p: overlap_margin(fc[p[0]], fc[p[1]]) for p in overlaps}
    if mode == "float":
        certified = [p for p in overlaps if margins[p] > FLOAT_MARGIN]
    else:
        certified = overlaps
    crown = any(hat.labels[f] == "crown" or hat.labels[g] == "crown" for f, g in certified)
    interior_cuts = sorted(e for e in cuts if e in set(hat.interior_edges))
    return TreeOutcome(
        tree_id=tree_id,
        tree_edges=list(tree_edges),
        cut_edges=interior_cuts,
        overlap_pairs=[list(p) for p in overlaps],
        certified_overlaps=len(certified),
        crown_overlap=crown,
        max_margin=max(margins.values()) if margins else None,
        undecided_pairs=undecided,
        lemma3_class=path_class,
    )


def verify_hat_no_single_piece(hat: SurfaceMesh, mode="interval", jobs=1, mesh_id=None) -> VerificationReport:
    """Develop every dual spanning tree of ``hat`` and look for overlaps.

    The conclusion "no single-piece unfolding" holds when every tree has at
    least one certified overlapping face pair: interval-certified in
    ``interval`` mode, or with penetration above :data:`FLOAT_MARGIN` in
    ``float`` mode (which is then reported as not certified).  Otherwise the
    first tree without overlap is attached as a witness.
    """
    t0 = time.perf_counter()
    trees = list(enumerate_dual_spanning_trees(hat))
    kirchhoff = matrix_tree_count(hat.n_faces, dual_arcs(hat))

    try:
        census = enumerate_lemma3_paths(hat)
        path_keys = {
            frozenset(path_edges(hat, p)): census.class_of(i) for i, p in enumerate(census.paths)
        }
    except CurvatureSignatureMismatch:
        census, path_keys = None, {}

    interior = set(hat.interior_edges)
    tasks = []
    for tid, tree in enumerate(trees):
        cuts = frozenset(e for e in _cuts_for_tree(hat, tree) if e in interior)
        tasks.append((hat, tid, tree, mode, path_keys.get(cuts)))
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_check_tree, tasks, chunksize=8))
    else:
        outcomes = [_check_tree(t) for t in tasks]
    outcomes.sort(key=lambda o: o.tree_id)

    conclusion = len(trees) == kirchhoff and all(o.certified_overlaps > 0 for o in outcomes)
    witness = None
    for o in outcomes:
        if not o.overlap_pairs and not o.undecided_pairs:
            piece = _develop_piece(hat, _cuts_for_tree(hat, o.tree_edges), tuple(range(hat.n_faces)), "float")
            witness = {
                "tree_id": o.tree_id,
                "cut_edges": o.cut_edges,
                "coords": {str(f): xy.tolist() for f, xy in sorted(piece.float_coords().items())},
            }
            break
    return VerificationReport(
        mesh_id=mesh_id or hat.name or "hat",
        mode=mode,
        certified=(mode != "float"),
        enumeration_size=len(trees),
        matrix_tree_count=kirchhoff,
        outcomes=outcomes,
        lemma3_paths=None if census is None else len(census.paths),
        lemma3_classes=None if census is None else census.n_classes,
        conclusion=conclusion,
        witness=witness,
        wall_time=time.perf_counter() - t0,
    )


# --------------------------------------------------------------------------
# counting argument


@dataclass(frozen=True)
class PathSystem:
    """Cut paths through hats, reduced to their base-vertex terminals.

    ``terminals`` lists one vertex pair per hat path, in cutting order;
    ``cycles`` is the number of hats cut along a closed cycle instead.
    """

    terminals: tuple
    cycles: int = 0
    n_vertices: int = 0

    def __post_init__(self):
        if self.cycles < 0:
            raise ValueError("cycle count must be non-negative")
        for u, v in self.terminals:
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"terminal pair {(u, v)} out of range")


def min_pieces_of_path_system(ps: PathSystem) -> int:
    """Pieces forced by cutting the paths one by one.

    A path joining two base vertices that are already connected through
    earlier cuts closes a Jordan curve and splits off a piece.
    """
    uf = UnionFind(range(ps.n_vertices))
    separations = sum(1 for u, v in ps.terminals if not uf.union(u, v))
    return 1 + separations + ps.cycles


def brute_force_min_pieces(base_faces, n_vertices, cycles=0) -> int:
    """Minimum of :func:`min_pieces_of_path_system` over every path choice and order.

    Each base face contributes one path joining two of its three corners.
    """
    best = None
    for choice in itertools.product(range(3), repeat=len(base_faces)):
        pairs = [(f[i], f[(i + 1) % 3]) for f, i in zip(base_faces, choice)]
        for order in itertools.permutations(pairs):
            k = min_pieces_of_path_system(PathSystem(tuple(order), cycles, n_vertices))
            best = k if best is None else min(best, k)
    return best


_VARIANTS = {"acute-subdivided": "acute-subdivided", "subdivided": "acute-subdivided",
             "stacked-family": "stacked-family", "stacked": "stacked-family"}


def theorem_lower_bound(variant: str, k: int) -> int:
    """Closed-form minimum piece count: 2k^2 (acute, subdivided) or k + 2 (stacked)."""
    try:
        v = _VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    if int(k) != k:
        raise ValueError("k must be an integer")
    if v == "acute-subdivided":
        if k < 1:
            raise ValueError("k must be >= 1 for the subdivided family")
        return 2 * k * k
    if k < 0:
        raise ValueError("k must be >= 0 for the stacked family")
    return k + 2


def hat_count_lower_bound(mesh: SurfaceMesh) -> int:
    """Counting bound for a sphere with every base face replaced by a hat.

    With H hat paths between B base vertices at most B - 1 can join new
    components, so at least H - B + 1 separations occur.
    """
    return len(hat_regions(mesh)) - len(base_vertices(mesh)) + 2


# --------------------------------------------------------------------------
# auditing cut sets on whole polyhedra


def _local_cuts(mesh, disk, cuts):
    return frozenset(
        e for e, (a, b) in enumerate(disk.parent_edges) if mesh.edge_id(a, b) in cuts
    )


def audit_cut_set(mesh: SurfaceMesh, cuts, mode="float") -> dict:
    """Per-hat classification, pieces, development and overlaps for one cut set."""
    cuts = frozenset(cuts)
    hats = []
    for hid in mesh.hats():
        disk = region_subcomplex(mesh, hid)
        local = _local_cuts(mesh, disk, cuts)
        cls = classify_cuts_in_disk(disk, local)
        try:
            l3 = lemma3_filter(disk, local)
        except CurvatureSignatureMismatch:
            l3 = None
        hats.append({
            "hat": hid,
            "interior_cuts": len([e for e in local if e in set(disk.interior_edges)]),
            "classification": cls.kind.value,
            "lemma3_path": l3,
        })

    pieces = []
    for faces in pieces_of(mesh, cuts):
        entry = {"faces": list(faces), "developable": True, "overlap_pairs": [], "error": None}
        try:
            piece = _develop_piece(mesh, cuts, faces, mode)
            entry["overlap_pairs"] = [
                list(p) for p, c in piece_contacts(piece, strict=False).items() if c is Contact.OVERLAP
            ]
            entry["overlap_pairs"].sort()
        except NonDevelopablePiece as exc:
            entry["developable"] = False
            entry["error"] = str(exc)
        pieces.append(entry)

    valid = all(p["developable"] and not p["overlap_pairs"] for p in pieces)
    bound = hat_count_lower_bound(mesh) if hats else None
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cut-audit",
        "mesh_id": mesh.name,
        "mode": mode,
        "n_cut_edges": len(cuts),
        "hats": hats,
        "n_pieces": len(pieces),
        "pieces": pieces,
        "valid_unfolding": valid,
        "lower_bound": bound,
        "respects_bound": None if bound is None else (not valid or len(pieces) >= bound),
    }


def _piece_lies_flat(mesh, cuts, faces):
    try:
        piece = _develop_piece(mesh, cuts, faces, "float")
    except NonDevelopablePiece:
        return False
    return not any(c is Contact.OVERLAP for c in piece_contacts(piece, strict=False).values())


@dataclass
class SearchResult:
    cuts: frozenset
    n_pieces: int
    trials: int
    accepted: int
    restarts: int
    history: list = field(default_factory=list)


def search_unfolding(mesh: SurfaceMesh, seed=0, restarts=4) -> SearchResult:
    """Randomized greedy search for a non-overlapping multi-piece unfolding.

    Starts from every edge cut (each face its own piece) and glues edges back
    in random order whenever the merged piece still develops flat without
    overlap.  The best of ``restarts`` runs is returned.
    """
    rng = random.Random(seed)
    best = None
    trials = accepted = 0
    history = []
    for _ in range(restarts):
        cuts = set(range(mesh.n_edges))
        order = list(mesh.interior_edges)
        rng.shuffle(order)
        uf = UnionFind(range(mesh.n_faces))
        members = {f: [f] for f in range(mesh.n_faces)}
        for e in order:
            f, g = mesh.edge_faces[e]
            rf, rg = uf.find(f), uf.find(g)
            trials += 1
            trial = frozenset(cuts - {e})
            faces = tuple(sorted(members[rf] + members[rg])) if rf != rg else tuple(sorted(members[rf]))
            if _piece_lies_flat(mesh, trial, faces):
                accepted += 1
                cuts.discard(e)
                if rf != rg:
                    uf.union(rf, rg)
                    root = uf.find(rf)
                    merged = members.pop(rf) + members.pop(rg)
                    members[root] = merged
        n = len(pieces_of(mesh, cuts))
        history.append(n)
        if best is None or n < best[1]:
            best = (frozenset(cuts), n)
    return SearchResult(best[0], best[1], trials, accepted, restarts, history)


# --------------------------------------------------------------------------
# band chain


def band_chain_angles(hat: SurfaceMesh, path, mode="mp") -> list:
    """Joint angles (degrees) of the band base chain after cutting along ``path``.

    The hat is developed in one piece along the vertex path (with its
    boundary cut).  Each band triangle has one edge between two interior
    vertices; after the cut these edges form a chain of three segments, and
    the angle between consecutive segments at each joint is returned in chain
    order.
    """
    cuts = frozenset(path_edges(hat, path)) | frozenset(hat.boundary_edges)
    piece = _develop_piece(hat, cuts, tuple(range(hat.n_faces)), mode)
    bk = get_backend(mode)
    boundary = set(hat.boundary_vertices)
    segs = []
    for f in range(hat.n_faces):
        if hat.labels[f] != "band":
            continue
        face = hat.faces[f]
        idx = [i for i, v in enumerate(face) if v not in boundary]
        segs.append([piece.coords[f][i] for i in idx])

    def same(p, q):
        return all(abs(bk.to_float(a) - bk.to_float(b)) < 1e-9 for a, b in zip(p, q))

    # order the three segments into a chain
    joints = []
    for i, s in enumerate(segs):
        for j, t in enumerate(segs):
            if i < j:
                for a in range(2):
                    for b in range(2):
                        if same(s[a], t[b]):
                            joints.append((s[a], s[1 - a], t[1 - b]))
    if len(joints) != 2:
        raise ValueError(f"band edges do not form a chain of three ({len(joints)} joints)")
    angles = []
    for p, q, r in joints:
        ux, uy = q[0] - p[0], q[1] - p[1]
        vx, vy = r[0] - p[0], r[1] - p[1]
        dot = bk.to_float(ux * vx + uy * vy)
        crs = bk.to_float(ux * vy - uy * vx)
        angles.append(math.degrees(math.atan2(abs(crs), dot)))
    return angles
