"""Mesh, cut-set, report and SVG files.

Meshes use the plain-text OBJ subset (``v`` and triangular ``f`` lines,
1-indexed).  Region labels travel in comment lines::

    # region <faceIdx> <label> <hatId>

where ``faceIdx`` is the 0-based position of the face among the ``f`` lines
and ``hatId`` is ``-`` for faces outside every hat.  Coordinates are written
with ``repr`` so a round trip is bit-identical.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema

from .errors import IoError, MeshError, ParseError
from .mesh import REGION_LABELS, SurfaceMesh, build_mesh
from .predicates import Contact, piece_contacts

#: Directives of the OBJ format that carry nothing for triangle surfaces.
_IGNORED = {"vn", "vt", "vp", "o", "g", "s", "usemtl", "mtllib", "l", "p"}


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# meshes


def dumps_mesh(mesh: SurfaceMesh) -> str:
    lines = []
    if mesh.name:
        lines.append(f"# name {mesh.name}")
    for x, y, z in mesh.vertices:
        lines.append(f"v {float(x)!r} {float(y)!r} {float(z)!r}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    for i, (lab, hid) in enumerate(zip(mesh.labels, mesh.hat_ids)):
        if lab != "other" or hid is not None:
            lines.append(f"# region {i} {lab} {'-' if hid is None else hid}")
    return "\n".join(lines) + "\n"


def export_mesh(mesh: SurfaceMesh, path) -> None:
    _write(path, dumps_mesh(mesh))


def _column(raw: str, token_index: int) -> int:
    """1-based column of the ``token_index``-th whitespace token of ``raw``."""
    pos, seen = 0, -1
    while pos < len(raw):
        while pos < len(raw) and raw[pos].isspace():
            pos += 1
        if pos >= len(raw):
            break
        seen += 1
        if seen == token_index:
            return pos + 1
        while pos < len(raw) and not raw[pos].isspace():
            pos += 1
    return len(raw) + 1


def loads_mesh(text: str, default_name: str = "") -> SurfaceMesh:
    """Parse OBJ text into a validated mesh.

    The mesh name comes from a ``# name`` comment, else ``default_name``.

    Raises
    ------
    ParseError
        On malformed lines (with line and column) or when the geometry fails
        mesh validation (no position).
    """
    verts, faces, regions = [], [], {}
    name = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        head = tokens[0]
        if head.startswith("#"):
            if len(tokens) >= 3 and head == "#" and tokens[1] == "name":
                name = raw.split("name", 1)[1].strip()
            elif len(tokens) >= 2 and head == "#" and tokens[1] == "region":
                if len(tokens) != 5:
                    raise ParseError("region comment needs <faceIdx> <label> <hatId>", lineno, _column(raw, 0))
                try:
                    fi = int(tokens[2])
                except ValueError:
                    raise ParseError(f"bad face index {tokens[2]!r}", lineno, _column(raw, 2)) from None
                if tokens[3] not in REGION_LABELS:
                    raise ParseError(f"unknown region label {tokens[3]!r}", lineno, _column(raw, 3))
                hid = None
                if tokens[4] != "-":
                    try:
                        hid = int(tokens[4])
                    except ValueError:
                        raise ParseError(f"bad hat id {tokens[4]!r}", lineno, _column(raw, 4)) from None
                regions[fi] = (tokens[3], hid, lineno)
            continue
        if head == "v":
            if len(tokens) not in (4, 5):
                raise ParseError("vertex line needs 3 coordinates", lineno, _column(raw, 0))
            xyz = []
            for k in (1, 2, 3):
                try:
                    val = float(tokens[k])
                except ValueError:
                    raise ParseError(f"bad coordinate {tokens[k]!r}", lineno, _column(raw, k)) from None
                if not math.isfinite(val):
                    raise ParseError(f"non-finite coordinate {tokens[k]!r}", lineno, _column(raw, k))
                xyz.append(val)
            verts.append(xyz)
        elif head == "f":
            if len(tokens) != 4:
                raise ParseError(
                    f"face must have exactly 3 vertices, got {len(tokens) - 1}", lineno, _column(raw, 0)
                )
            idx = []
            for k in (1, 2, 3):
                ref = tokens[k].split("/")[0]
                try:
                    i = int(ref)
                except ValueError:
                    raise ParseError(f"bad vertex index {tokens[k]!r}", lineno, _column(raw, k)) from None
                if i < 0:
                    i = len(verts) + 1 + i
                if not 1 <= i <= len(verts):
                    raise ParseError(f"vertex index {ref} out of range", lineno, _column(raw, k))
                idx.append(i - 1)
            faces.append(tuple(idx))
        elif head not in _IGNORED:
            raise ParseError(f"unknown directive {head!r}", lineno, 1)

    labels, hat_ids = ["other"] * len(faces), [None] * len(faces)
    for fi, (lab, hid, lineno) in regions.items():
        if not 0 <= fi < len(faces):
            raise ParseError(f"region comment refers to missing face {fi}", lineno)
        labels[fi], hat_ids[fi] = lab, hid
    try:
        return build_mesh(verts, faces, labels, hat_ids, name=default_name if name is None else name)
    except MeshError as exc:
        raise ParseError(f"invalid mesh: {exc}") from exc


def import_mesh(path) -> SurfaceMesh:
    return loads_mesh(_read(path), default_name=Path(path).stem)


# --------------------------------------------------------------------------
# cut sets


def loads_cuts(text: str, mesh: SurfaceMesh) -> frozenset:
    """Parse ``u v`` lines (1-indexed vertices, ``#`` comments) into edge ids."""
    cuts = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise ParseError("cut line needs two vertex indices", lineno, _column(raw, 0))
        pair = []
        for k, tok in enumerate(tokens):
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"bad vertex index {tok!r}", lineno, _column(raw, k)) from None
            if not 1 <= v <= mesh.n_vertices:
                raise ParseError(f"vertex {v} out of range", lineno, _column(raw, k))
            pair.append(v - 1)
        try:
            cuts.add(mesh.edge_id(*pair))
        except KeyError:
            raise ParseError(f"{tokens[0]} {tokens[1]} is not an edge", lineno, _column(raw, 0)) from None
    return frozenset(cuts)


def read_cuts(path, mesh: SurfaceMesh) -> frozenset:
    return loads_cuts(_read(path), mesh)


def dumps_cuts(mesh: SurfaceMesh, cuts) -> str:
    return "".join(f"{mesh.edges[e][0] + 1} {mesh.edges[e][1] + 1}\n" for e in sorted(cuts))


def write_cuts(path, mesh: SurfaceMesh, cuts) -> None:
    _write(path, dumps_cuts(mesh, cuts))


# --------------------------------------------------------------------------
# JSON reports

_TREE = {
    "type": "object",
    "required": ["tree_id", "tree_edges", "cut_edges", "overlap_pairs", "certified_overlaps"],
    "properties": {
        "tree_id": {"type": "integer", "minimum": 0},
        "tree_edges": {"type": "array", "items": {"type": "integer"}},
        "cut_edges": {"type": "array", "items": {"type": "integer"}},
        "overlap_pairs": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
        "certified_overlaps": {"type": "integer", "minimum": 0},
        "crown_overlap": {"type": "boolean"},
        "max_margin": {"type": ["number", "null"]},
        "undecided_pairs": {"type": "integer", "minimum": 0},
        "lemma3_class": {"type": ["integer", "null"]},
    },
}

SCHEMAS = {
    "hat-verification": {
        "type": "object",
        "required": ["schema_version", "kind", "mesh_id", "mode", "enumeration_size",
                     "matrix_tree_count", "outcomes", "conclusion"],
        "properties": {
            "schema_version": {"const": "1"},
            "kind": {"const": "hat-verification"},
            "mesh_id": {"type": "string"},
            "mode": {"enum": ["float", "interval", "mp"]},
            "certified": {"type": "boolean"},
            "enumeration_size": {"type": "integer", "minimum": 1},
            "matrix_tree_count": {"type": "integer", "minimum": 1},
            "outcomes": {"type": "array", "items": _TREE},
            "lemma3_paths": {"type": ["integer", "null"]},
            "lemma3_classes": {"type": ["integer", "null"]},
            "conclusion": {"type": "boolean"},
            "witness": {"type": ["object", "null"]},
            "wall_time": {"type": "number"},
        },
    },
    "cut-audit": {
        "type": "object",
        "required": ["schema_version", "kind", "n_pieces", "pieces", "valid_unfolding"],
        "properties": {
            "schema_version": {"const": "1"},
            "kind": {"const": "cut-audit"},
            "n_pieces": {"type": "integer", "minimum": 1},
            "pieces": {"type": "array"},
            "hats": {"type": "array"},
            "valid_unfolding": {"type": "boolean"},
            "lower_bound": {"type": ["integer", "null"]},
            "respects_bound": {"type": ["boolean", "null"]},
        },
    },
}


def validate_report(doc: dict) -> None:
    """Check ``doc`` against the schema named by its ``kind`` field."""
    try:
        schema = SCHEMAS[doc["kind"]]
    except (KeyError, TypeError):
        raise jsonschema.ValidationError("report has no known 'kind'") from None
    jsonschema.validate(doc, schema)


def dumps_report(doc: dict) -> str:
    """Validated, key-sorted JSON text; identical input gives identical bytes."""
    validate_report(doc)
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(doc: dict, path) -> None:
    _write(path, dumps_report(doc))


# --------------------------------------------------------------------------
# SVG nets

REGION_COLORS = {
    "brim": "#7fb2e5",
    "band": "#f7e07a",
    "crown": "#f2a7c3",
    "base": "#d9d9d9",
    "other": "#eeeeee",
}
OVERLAP_STROKE = "#d62728"


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


def layout_pieces(unfolding, gap=0.25, columns=None) -> list:
    """Translation ``(dx, dy)`` per piece, packing pieces on a grid.

    Grid cells are as large as the largest piece bounding box plus ``gap``.
    """
    boxes = []
    for piece in unfolding.pieces:
        pts = [xy for tri in piece.float_coords().values() for xy in tri]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        boxes.append((min(xs), min(ys), max(xs), max(ys)))
    n = len(boxes)
    cols = columns or max(1, math.ceil(math.sqrt(n)))
    cw = max(b[2] - b[0] for b in boxes) + gap
    ch = max(b[3] - b[1] for b in boxes) + gap
    out = []
    for i, (x0, y0, _, _) in enumerate(boxes):
        r, c = divmod(i, cols)
        out.append((c * cw - x0, r * ch - y0))
    return out


def render_svg(unfolding, scale=100.0, gap=0.25, margin=0.1, columns=None, overlaps=None) -> str:
    """SVG text of a developed unfolding.

    A point ``(x, y)`` of piece ``i`` is drawn at
    ``scale * (x + dx_i + margin), scale * (y + dy_i + margin)`` with the
    offsets of :func:`layout_pieces`; no rotation or reflection is applied,
    so the picture is the development seen with SVG's downward y axis.
    Faces are filled by region label, faces in an overlapping pair get a red
    outline and cut edges are dashed.
    """
    mesh = unfolding.mesh
    if overlaps is None:
        overlaps = set()
        for piece in unfolding.pieces:
            overlaps |= {p for p, c in piece_contacts(piece, strict=False).items() if c is Contact.OVERLAP}
    bad = {f for pair in overlaps for f in pair}
    offsets = layout_pieces(unfolding, gap, columns)

    all_pts = []
    placed = []
    for piece, (dx, dy) in zip(unfolding.pieces, offsets):
        fc = piece.float_coords()
        for f in piece.faces:
            tri = [((x + dx + margin) * scale, (y + dy + margin) * scale) for x, y in fc[f]]
            placed.append((f, tri))
            all_pts.extend(tri)
    width = max(p[0] for p in all_pts) + margin * scale
    height = max(p[1] for p in all_pts) + margin * scale

    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": _fmt(width), "height": _fmt(height),
        "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
    })
    faces_g = ET.SubElement(svg, "g", {"id": "faces"})
    edges_g = ET.SubElement(svg, "g", {"id": "cuts", "fill": "none", "stroke": "#333333"})
    marks_g = ET.SubElement(svg, "g", {"id": "overlaps", "fill": "none", "stroke": OVERLAP_STROKE})
    cuts = unfolding.cuts
    for f, tri in placed:
        label = mesh.labels[f]
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in tri)
        ET.SubElement(faces_g, "polygon", {
            "points": pts, "fill": REGION_COLORS[label], "stroke": "#555555",
            "stroke-width": "0.5", "fill-opacity": "0.85",
            "data-face": str(f), "data-region": label,
        })
        face = mesh.faces[f]
        for i in range(3):
            if mesh.edge_id(face[i], face[(i + 1) % 3]) in cuts:
                (x1, y1), (x2, y2) = tri[i], tri[(i + 1) % 3]
                ET.SubElement(edges_g, "line", {
                    "x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2),
                    "stroke-dasharray": "4 3", "stroke-width": "1",
                })
        if f in bad:
            ET.SubElement(marks_g, "polygon", {"points": pts, "stroke-width": "2", "data-face": str(f)})
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def export_svg(unfolding, path, **options) -> None:
    _write(path, render_svg(unfolding, **options))
