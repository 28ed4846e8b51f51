import re
import xml.etree.ElementTree as ET

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ununfold.constructions import regular_tetrahedron
from ununfold.errors import IoError, MeshError, ParseError
from ununfold.io import (
    dumps_cuts,
    dumps_mesh,
    dumps_report,
    export_mesh,
    import_mesh,
    layout_pieces,
    loads_cuts,
    loads_mesh,
    read_cuts,
    render_svg,
)
from ununfold.mesh import build_mesh
from ununfold.unfold import develop, path_edges
from ununfold.verify import search_unfolding

SVG = "{http://www.w3.org/2000/svg}"


def test_tetrahedron_round_trip(tmp_path):
    v, f = regular_tetrahedron()
    m = build_mesh(v, f, name="tetra")
    path = tmp_path / "t.obj"
    export_mesh(m, path)
    back = import_mesh(path)
    assert back.faces == m.faces
    assert back.name == "tetra"


def test_name_defaults_to_file_stem(tmp_path):
    path = tmp_path / "plain.obj"
    path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
    assert import_mesh(path).name == "plain"


def test_caltrop_export_line_counts(caltrop_mesh):
    text = dumps_mesh(caltrop_mesh)
    lines = text.splitlines()
    assert sum(1 for s in lines if s.startswith("v ")) == 20
    assert sum(1 for s in lines if s.startswith("f ")) == 36
    assert sum(1 for s in lines if s.startswith("# region ")) == 36


def test_obj_extras_are_accepted():
    text = "o thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 -1//1\n# region 0 crown 7\n"
    m = loads_mesh(text)
    assert m.faces == ((0, 1, 2),)
    assert m.labels == ("crown",) and m.hat_ids == (7,)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("v 0 0 0\nv 1 0 0\nf 1 2\n", 3, 1),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 x\n", 4, 7),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", 4, 7),
        ("v 0 0 0\nv 1 zero 0\n", 2, 5),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n# region 0 hat 0\n", 5, 12),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nq 1\n", 5, 1),
        ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n# region 4 brim 0\n", 5, None),
    ],
)
def test_parse_errors_report_position(text, line, column):
    with pytest.raises(ParseError) as info:
        loads_mesh(text)
    assert info.value.line == line
    assert info.value.column == column


def test_invalid_geometry_is_a_parse_error():
    with pytest.raises(ParseError):
        loads_mesh("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")


def test_missing_file():
    with pytest.raises(IoError):
        import_mesh("/nonexistent/dir/x.obj")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_subnormal=True), min_size=12, max_size=12))
def test_round_trip_is_bit_identical(coords):
    v = np.array(coords).reshape(4, 3) * 1e-3 + regular_tetrahedron()[0]
    _, f = regular_tetrahedron()
    try:
        m = build_mesh(v, f)
    except MeshError:
        return
    back = loads_mesh(dumps_mesh(m))
    assert back.vertices.tobytes() == m.vertices.tobytes()


def test_cut_file_round_trip(acute, tmp_path):
    cuts = path_edges(acute, [0, 3, 4, 5, 6])
    text = dumps_cuts(acute, cuts)
    assert loads_cuts(text, acute) == cuts
    path = tmp_path / "c.cut"
    path.write_text("# a comment\n\n" + text.replace("\n", "  # trailing\n", 1))
    assert read_cuts(path, acute) == cuts


@pytest.mark.parametrize("text, line", [("1 2 3\n", 1), ("1 x\n", 1), ("1 99\n", 1), ("\n1 7\n", 2)])
def test_cut_file_errors(acute, text, line):
    with pytest.raises(ParseError) as info:
        loads_cuts(text, acute)
    assert info.value.line == line


def test_report_json_is_sorted_and_validated(acute_report):
    text = dumps_report(acute_report.to_dict())
    assert text == dumps_report(acute_report.to_dict())
    keys = re.findall(r'^  "([a-z_0-9]+)":', text, flags=re.M)
    assert keys == sorted(keys)
    with pytest.raises(jsonschema.ValidationError):
        dumps_report({"kind": "hat-verification"})
    with pytest.raises(jsonschema.ValidationError):
        dumps_report({"no": "kind"})


def _polygons(svg_text):
    root = ET.fromstring(svg_text)
    faces = root.find(f"{SVG}g[@id='faces']")
    out = []
    for p in faces.findall(f"{SVG}polygon"):
        pts = [tuple(map(float, xy.split(","))) for xy in p.get("points").split()]
        out.append((int(p.get("data-face")), p.get("data-region"), p.get("fill"), np.array(pts)))
    return root, out


def test_svg_acute_path(acute):
    cuts = path_edges(acute, [0, 3, 4, 5, 6]) | frozenset(acute.boundary_edges)
    unf = develop(acute, cuts)
    text = render_svg(unf, scale=100.0, margin=0.1)
    root, polys = _polygons(text)
    assert len(polys) == 9
    fills = {r: fill for _, r, fill, _ in polys}
    assert len(set(fills.values())) == 3
    marks = root.find(f"{SVG}g[@id='overlaps']").findall(f"{SVG}polygon")
    assert {int(m.get("data-face")) for m in marks} == {0, 4, 6, 7, 8}
    dashed = root.find(f"{SVG}g[@id='cuts']").findall(f"{SVG}line")
    assert dashed and all(d.get("stroke-dasharray") for d in dashed)
    # coordinates are the development up to scale and translation
    (dx, dy), = layout_pieces(unf)
    fc = unf.pieces[0].float_coords()
    for f, _, _, pts in polys:
        assert np.allclose(pts, (fc[f] + [dx + 0.1, dy + 0.1]) * 100.0, atol=1e-5)


def test_svg_single_triangle():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [(0, 1, 2)])
    _, polys = _polygons(render_svg(develop(m)))
    assert len(polys) == 1


def test_svg_two_piece_layout(caltrop_mesh):
    found = search_unfolding(caltrop_mesh, seed=0)
    unf = develop(caltrop_mesh, found.cuts)
    assert len(unf.pieces) == 2
    gap = 0.5
    offs = layout_pieces(unf, gap=gap)
    boxes = []
    for piece, (dx, dy) in zip(unf.pieces, offs):
        pts = np.vstack(list(piece.float_coords().values())) + [dx, dy]
        boxes.append((pts[:, 0].min(), pts[:, 0].max()))
    (a0, a1), (b0, b1) = sorted(boxes)
    assert b0 - a1 >= gap - 1e-12
    _, polys = _polygons(render_svg(unf, gap=gap))
    assert len(polys) == 36
