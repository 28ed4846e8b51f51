import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ununfold.constructions import caltrop, stacked_family, subdivided_caltrop
from ununfold.errors import TooLarge
from ununfold.io import validate_report
from ununfold.mesh import build_mesh, region_subcomplex
from ununfold.unfold import dual_arcs, lemma3_filter, path_edges
from ununfold.verify import (
    PathSystem,
    audit_cut_set,
    combinatorial_automorphisms,
    enumerate_dual_spanning_trees,
    enumerate_lemma3_paths,
    hat_count_lower_bound,
    matrix_tree_count,
    min_pieces_of_path_system,
    search_unfolding,
    theorem_lower_bound,
    verify_hat_no_single_piece,
)


def _float_kirchhoff(n, arcs):
    lap = np.zeros((n, n))
    for _, f, g in arcs:
        lap[f, f] += 1
        lap[g, g] += 1
        lap[f, g] -= 1
        lap[g, f] -= 1
    return round(np.linalg.det(lap[1:, 1:])) if n > 1 else 1


def test_matrix_tree_small_graphs():
    cycle = [(i, i, (i + 1) % 5) for i in range(5)]
    assert matrix_tree_count(5, cycle) == 5
    k4 = [(i, a, b) for i, (a, b) in enumerate(itertools.combinations(range(4), 2))]
    assert matrix_tree_count(4, k4) == 16
    assert matrix_tree_count(1, []) == 1
    assert matrix_tree_count(3, [(0, 0, 1)]) == 0


def test_single_triangle_has_one_empty_tree():
    m = build_mesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [(0, 1, 2)])
    assert list(enumerate_dual_spanning_trees(m)) == [()]


def test_enumeration_guard(caltrop_mesh):
    with pytest.raises(TooLarge):
        next(enumerate_dual_spanning_trees(caltrop_mesh))


@pytest.mark.parametrize("name", ["acute", "stacked", "flat"])
def test_tree_enumeration_complete(name, request):
    disk = request.getfixturevalue(name)
    arcs = dual_arcs(disk)
    assert len(arcs) == 12
    trees = list(enumerate_dual_spanning_trees(disk))
    assert len(set(trees)) == len(trees)
    assert len(trees) == matrix_tree_count(disk.n_faces, arcs) == _float_kirchhoff(disk.n_faces, arcs)
    by_edge = {e: (f, g) for e, f, g in arcs}
    for t in trees:
        assert len(t) == disk.n_faces - 1
        seen = {0}
        changed = True
        while changed:
            changed = False
            for e in t:
                f, g = by_edge[e]
                if (f in seen) != (g in seen):
                    seen |= {f, g}
                    changed = True
        assert len(seen) == disk.n_faces


def test_acute_dual_graph_shape(acute):
    # brim/band 6-cycle, crown 3-cycle and three band-crown bridges
    arcs = dual_arcs(acute)
    kinds = sorted(tuple(sorted((acute.labels[f], acute.labels[g]))) for _, f, g in arcs)
    assert kinds.count(("band", "brim")) == 6
    assert kinds.count(("crown", "crown")) == 3
    assert kinds.count(("band", "crown")) == 3


def test_acute_cut_paths(acute):
    census = enumerate_lemma3_paths(acute)
    assert len(census.paths) == 12
    assert census.group_order == 6
    assert sorted(map(len, census.classes)) == [6, 6]
    for p in census.paths:
        assert p[0] in (0, 1, 2) and set(p[1:4]) == {3, 4, 5} and p[4] == 6


def test_stacked_paths_recorded(stacked):
    census = enumerate_lemma3_paths(stacked)
    assert census.group_order == 1
    assert census.n_classes == len(census.paths) >= 2


def test_flat_hat_automorphisms(flat):
    assert len(combinatorial_automorphisms(flat)) == 6


def test_acute_report_details(acute, acute_report):
    rep = acute_report
    assert rep.enumeration_size == 216
    assert rep.lemma3_paths == 12 and rep.lemma3_classes == 2
    path_trees = [o for o in rep.outcomes if o.lemma3_class is not None]
    assert len(path_trees) == 12
    # along the boundary-to-center paths a crown triangle always runs into the band
    for o in path_trees:
        assert o.crown_overlap
    for o in rep.outcomes:
        interior_cuts = frozenset(o.cut_edges)
        assert (o.lemma3_class is not None) == lemma3_filter(acute, interior_cuts)
        assert o.undecided_pairs == 0


def test_stacked_report_details(stacked_report):
    assert stacked_report.conclusion
    path_trees = [o for o in stacked_report.outcomes if o.lemma3_class is not None]
    assert len(path_trees) == stacked_report.lemma3_paths
    assert all(o.crown_overlap for o in path_trees)


def test_float_mode_agrees_but_is_not_certified(acute, acute_report):
    rep = verify_hat_no_single_piece(acute, mode="float")
    assert rep.conclusion and not rep.certified
    assert [o.overlap_pairs for o in rep.outcomes] == [o.overlap_pairs for o in acute_report.outcomes]
    assert all(o.max_margin > 1e-6 for o in rep.outcomes)


def test_parallel_matches_serial(stacked):
    a = verify_hat_no_single_piece(stacked, mode="float", jobs=1).to_dict()
    b = verify_hat_no_single_piece(stacked, mode="float", jobs=2).to_dict()
    assert a == b


def test_report_serialization(acute_report, flat_report):
    d = acute_report.to_dict()
    assert "wall_time" not in d
    assert "wall_time" in acute_report.to_dict(include_timing=True)
    validate_report(d)
    f = flat_report.to_dict()
    validate_report(f)
    assert f["witness"]["tree_id"] == 0 and len(f["witness"]["coords"]) == 9


def test_path_system_examples():
    cycle = PathSystem(((0, 1), (1, 2), (2, 3), (3, 0)), 0, 4)
    assert min_pieces_of_path_system(cycle) == 2
    assert min_pieces_of_path_system(PathSystem((), 0, 4)) == 1
    with pytest.raises(ValueError):
        PathSystem(((0, 9),), 0, 4)
    with pytest.raises(ValueError):
        PathSystem((), -1, 4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=12), st.integers(0, 4))
def test_counting_monotone_in_cycles(pairs, c):
    a = min_pieces_of_path_system(PathSystem(tuple(pairs), c, 6))
    b = min_pieces_of_path_system(PathSystem(tuple(pairs), c + 1, 6))
    assert b == a + 1
    # separations are order independent: paths minus a spanning forest
    assert a == min_pieces_of_path_system(PathSystem(tuple(reversed(pairs)), c, 6))


def test_family_lower_bounds():
    assert theorem_lower_bound("acute-subdivided", 1) == 2
    assert theorem_lower_bound("acute-subdivided", 3) == 18
    assert theorem_lower_bound("stacked-family", 0) == 2
    assert theorem_lower_bound("subdivided", 2) == 8
    for bad in (("acute-subdivided", 0), ("stacked-family", -1), ("nope", 1)):
        with pytest.raises(ValueError):
            theorem_lower_bound(*bad)


def test_counting_bound_matches_closed_forms():
    for k in (1, 2):
        assert hat_count_lower_bound(subdivided_caltrop(k)) == theorem_lower_bound("subdivided", k)
    for k in range(4):
        assert hat_count_lower_bound(stacked_family(k)[0]) == theorem_lower_bound("stacked", k)


def test_audit_empty_cut(caltrop_mesh):
    rep = audit_cut_set(caltrop_mesh, frozenset())
    assert rep["n_pieces"] == 1
    assert rep["pieces"][0]["developable"] is False
    assert rep["valid_unfolding"] is False
    assert all(h["classification"] == "forest_one_per_tree" for h in rep["hats"])
    validate_report(rep)


def test_audit_base_edges_plus_paths(caltrop_mesh):
    m = caltrop_mesh
    cuts = {m.edge_id(a, b) for a, b in itertools.combinations(range(4), 2)}
    for hid in range(4):
        disk = region_subcomplex(m, hat_id=hid)
        census = enumerate_lemma3_paths(disk)
        for e in path_edges(disk, census.paths[0]):
            a, b = disk.edges[e]
            cuts.add(m.edge_id(disk.parent_vertices[a], disk.parent_vertices[b]))
    rep = audit_cut_set(m, cuts)
    assert rep["n_pieces"] == 4
    assert [h["lemma3_path"] for h in rep["hats"]] == [True] * 4
    assert rep["valid_unfolding"] is False


def test_search_respects_bound_on_caltrop():
    m = subdivided_caltrop(1)
    found = search_unfolding(m, seed=0)
    assert found == search_unfolding(m, seed=0)
    rep = audit_cut_set(m, found.cuts)
    if rep["valid_unfolding"]:
        assert rep["n_pieces"] >= theorem_lower_bound("subdivided", 1)
        assert rep["respects_bound"]
    assert found.trials == found.restarts * len(m.interior_edges)


def test_search_result_certifies_in_interval_mode():
    m = caltrop()
    found = search_unfolding(m, seed=0)
    rep = audit_cut_set(m, found.cuts, mode="interval")
    assert rep["valid_unfolding"] and rep["n_pieces"] == 2


def test_search_on_subdivided_k2_respects_bound():
    m = subdivided_caltrop(2)
    found = search_unfolding(m, seed=1, restarts=2)
    rep = audit_cut_set(m, found.cuts)
    assert rep["valid_unfolding"]
    assert rep["n_pieces"] >= 8
