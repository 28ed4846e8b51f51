"""One test per acceptance criterion; the PASS/FAIL lines are printed in the
terminal summary by conftest."""

import itertools
import math
import time

import pytest

from ununfold.cli import main
from ununfold.constructions import (
    StackedHatSpec,
    acute_hat,
    caltrop,
    flat_hat,
    hat_base_triangle,
    prism_containment_check,
    solve_acute_embedding,
    stacked_family,
    stacked_hat,
    subdivided_caltrop,
    subdivided_tetrahedron,
    stacked_tetrahedron,
)
from ununfold.io import dumps_mesh, export_mesh, loads_mesh
from ununfold.mesh import curvature_report
from ununfold.predicates import Contact, chain_witness, piece_contacts
from ununfold.unfold import _develop_piece, lemma3_filter, path_edges, pieces_of
from ununfold.verify import (
    band_chain_angles,
    brute_force_min_pieces,
    enumerate_lemma3_paths,
    theorem_lower_bound,
)


@pytest.mark.criterion(1, "curvature reproduction (425 / 30 degrees, < 1 s)")
def test_curvature_reproduction():
    solve_acute_embedding.cache_clear()
    t0 = time.perf_counter()
    mesh, _ = acute_hat()
    rep = curvature_report(mesh)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    assert rep.interior() == [3, 4, 5, 6]
    for v in (3, 4, 5):
        assert abs(rep.angle_sum[v] - 425.0) < 1e-6
    assert abs(rep.angle_sum[6] - 30.0) < 1e-6


@pytest.mark.criterion(2, "embedding fidelity (closed-form edge lengths, prism containment)")
def test_embedding_fidelity():
    mesh, _ = acute_hat()
    leg = 1 / (2 * math.cos(math.radians(47.5)))
    short = 2 * leg * math.sin(math.radians(5.0))
    boundary = {0, 1, 2}
    center = 6
    for e, (u, v) in enumerate(mesh.edges):
        if u in boundary and v in boundary:
            want = 1.0
        elif center in (u, v) or (u in boundary) != (v in boundary):
            want = leg
        else:
            want = short
        got = mesh.edge_length(e)
        assert abs(got - want) / want < 1e-9, (u, v, got, want)
    assert mesh.n_edges == 15
    base = mesh.vertices[hat_base_triangle(mesh)]
    assert prism_containment_check(mesh, base)


@pytest.mark.criterion(3, "band chain joint angles are 105 degrees on both path classes")
def test_chain_angle():
    mesh, _ = acute_hat()
    census = enumerate_lemma3_paths(mesh)
    assert census.n_classes == 2
    for members in census.classes:
        for i in members:
            angles = band_chain_angles(mesh, census.paths[i], mode="mp")
            assert len(angles) == 2
            for a in angles:
                assert abs(a - 105.0) < 1e-6


def _single_piece_compatible(mesh, cut, sig):
    """Independent structural test: complement is a dual spanning tree and the
    cut degree is at least 1 at every curved vertex and 2 at negative ones."""
    cuts = set(cut) | set(mesh.boundary_edges)
    if len(pieces_of(mesh, cuts)) != 1 or len(mesh.interior_edges) - len(cut) != mesh.n_faces - 1:
        return False
    deg = {v: 0 for v in range(mesh.n_vertices)}
    for e in cut:
        for v in mesh.edges[e]:
            deg[v] += 1
    return all(deg[v] >= 2 for v in sig["negative"]) and deg[sig["center"]] >= 1


@pytest.mark.criterion(4, "boundary-to-center path census: 2 classes, 4096-subset exhaustive check, < 10 s")
def test_path_census():
    t0 = time.perf_counter()
    mesh, _ = acute_hat()
    census = enumerate_lemma3_paths(mesh)
    assert census.n_classes == 2
    assert all(len(p) == 5 for p in census.paths)  # four edges
    path_sets = {frozenset(path_edges(mesh, p)) for p in census.paths}
    interior = mesh.interior_edges
    assert len(interior) == 12
    sig = {"negative": [3, 4, 5], "center": 6}
    n_subsets = 0
    for r in range(len(interior) + 1):
        for subset in itertools.combinations(interior, r):
            n_subsets += 1
            s = frozenset(subset)
            accepted = lemma3_filter(mesh, s)
            assert accepted == (s in path_sets)
            assert _single_piece_compatible(mesh, s, sig) == (s in path_sets)
    assert n_subsets == 4096
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.criterion(5, "impossibility certificates for the acute and stacked hats (< 60 s each)")
def test_impossibility_certificates(acute_report, stacked_report):
    for rep in (acute_report, stacked_report):
        assert rep.mode == "interval" and rep.certified
        assert rep.enumeration_size == rep.matrix_tree_count
        assert all(o.certified_overlaps >= 1 for o in rep.outcomes)
        assert rep.conclusion is True
        assert rep.wall_time < 60.0


@pytest.mark.criterion(6, "flat control disk yields conclusion false with a clean witness")
def test_control_soundness(flat, flat_report):
    rep = flat_report
    assert rep.conclusion is False
    assert rep.witness is not None
    cuts = frozenset(rep.witness["cut_edges"]) | frozenset(flat.boundary_edges)
    piece = _develop_piece(flat, cuts, tuple(range(flat.n_faces)), "interval")
    contacts = piece_contacts(piece)
    assert not any(c is Contact.OVERLAP for c in contacts.values())


@pytest.mark.criterion(7, "counting lower bounds: 2k^2, k+2 and the brute-force minimum of 2")
def test_counting_lower_bounds():
    for k in (1, 2, 3, 4):
        assert theorem_lower_bound("acute-subdivided", k) == 2 * k * k
    for k in (0, 1, 2, 3):
        assert theorem_lower_bound("stacked-family", k) == k + 2
    _, faces = subdivided_tetrahedron(1)
    assert brute_force_min_pieces([tuple(f) for f in faces], 4) == 2


@pytest.mark.criterion(8, "family generators: base counts and stacking certificates")
def test_family_generators():
    for k in (1, 2, 3, 4):
        verts, faces = subdivided_tetrahedron(k)
        assert len(faces) == 4 * k * k
        assert len(verts) == 2 * k * k + 2
    assert subdivided_caltrop(2).n_faces == 9 * 16
    for k in range(6):
        verts, faces, _ = stacked_tetrahedron(k)
        assert len(faces) == 4 + 2 * k
        assert len(verts) == 4 + k
        mesh, cert = stacked_family(k)
        assert cert.validate(mesh)
        assert len(cert.steps) == k + 4 * len(faces)


@pytest.mark.criterion(9, "pentagon margin: passes at 105, fails at 111, coincident at 108")
def test_pentagon_margin():
    assert chain_witness(105)["crosses"] == 1
    assert chain_witness(111)["crosses"] == -1
    assert chain_witness(108)["crosses"] == 0


@pytest.mark.criterion(10, "bit-identical mesh round trips and byte-identical verify-hat reports")
def test_round_trip_and_determinism(tmp_path, capsys):
    fixtures = [acute_hat()[0], stacked_hat(StackedHatSpec())[0], flat_hat(), caltrop()]
    fixtures += [subdivided_caltrop(k) for k in (1, 2)]
    fixtures += [stacked_family(k)[0] for k in (0, 1, 2)]
    for m in fixtures:
        back = loads_mesh(dumps_mesh(m))
        assert back.vertices.tobytes() == m.vertices.tobytes()
        assert back.faces == m.faces
        assert back.labels == m.labels
        assert back.hat_ids == m.hat_ids
        assert back.name == m.name
        assert dumps_mesh(back) == dumps_mesh(m)

    obj = tmp_path / "acute.obj"
    export_mesh(acute_hat()[0], obj)
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert main(["verify-hat", str(obj), "--mode", "interval", "--report", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
