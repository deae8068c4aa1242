import json
import math

import numpy as np
import pytest

from conncluster import (
    CENTER,
    DIAMETER,
    DISJOINT,
    NON_DISJOINT,
    InstanceFormatError,
    binary_search_min_feasible,
    candidate_radii,
    check_triangle_inequality,
    clustering,
    clustering_cost,
    exact_disjoint,
    gen_random,
    load_instance,
    make_instance,
    solve_disjoint,
    solve_nondisjoint,
    to_dot,
    tree_dp_solve,
    validate_clustering,
)
from conncluster.model import dist_eq, dist_leq, instance_to_doc


# ---------------------------------------------------------------------------
# loading


def test_load_line6_doc(line6):
    assert line6.n == 6
    assert line6.k == 2
    assert line6.d(0, 3) == 1.0
    assert line6.d(0, 5) == 2.0
    assert line6.label(3) == "d"


def test_load_single_point():
    inst = load_instance(
        {"n": 1, "k": 1, "metric": {"type": "explicit", "matrix": [[0.0]]}, "edges": []}
    )
    assert inst.n == 1 and inst.adj == ((),)


def test_load_graph_metric_expands(trap5):
    assert trap5.d(1, 2) == 3.0  # u-z goes through x
    assert trap5.d(0, 4) == 3.0  # x-e goes through z
    assert trap5.metric_kind == "graph"


def test_load_rejects_asymmetric():
    doc = {
        "n": 2,
        "k": 1,
        "metric": {"type": "explicit", "matrix": [[0, 1], [2, 0]]},
        "edges": [[0, 1]],
    }
    with pytest.raises(InstanceFormatError, match="symmetric"):
        load_instance(doc)


def test_load_rejects_disconnected_graph_metric():
    doc = {
        "n": 3,
        "k": 1,
        "metric": {"type": "graph", "edges": [[0, 1, 1.0]]},
        "edges": [[0, 1], [1, 2]],
    }
    with pytest.raises(InstanceFormatError, match="disconnected"):
        load_instance(doc)


def test_load_rejects_bad_k():
    doc = {
        "n": 2,
        "k": 3,
        "metric": {"type": "explicit", "matrix": [[0, 1], [1, 0]]},
        "edges": [[0, 1]],
    }
    with pytest.raises(InstanceFormatError, match="k"):
        load_instance(doc)


def test_make_instance_rejects_duplicate_edge():
    with pytest.raises(InstanceFormatError, match="duplicate"):
        make_instance(np.zeros((2, 2)), [(0, 1), (1, 0)], 1)


def test_instance_doc_round_trip(line6):
    doc = instance_to_doc(line6)
    again = load_instance(json.dumps(doc))
    assert np.allclose(again.dist, line6.dist)
    assert again.edges == line6.edges


def test_lp_metric_inf_norm():
    doc = {
        "n": 2,
        "k": 1,
        "metric": {"type": "lp", "coords": [[0, 0], [3, 4]], "p": "inf"},
        "edges": [[0, 1]],
    }
    inst = load_instance(doc)
    assert inst.d(0, 1) == 4.0
    assert inst.p == math.inf


# ---------------------------------------------------------------------------
# validation and cost


def test_validate_disconnected_cluster(line6):
    c = clustering([{0, 1, 3}, {2, 4, 5}], None, DISJOINT)
    verdict = validate_clustering(line6, c)
    assert not verdict.feasible
    assert any("not connected" in v for v in verdict.violations)


def test_validate_single_cluster_feasible(line6):
    inst = make_instance(line6.dist, line6.edges, 6)
    assert validate_clustering(inst, clustering([range(6)], None, DISJOINT)).feasible


def test_validate_overlap_modes(line6):
    overlapping = [{0, 1, 2, 3}, {2, 3, 4, 5}]
    assert validate_clustering(
        line6, clustering(overlapping, None, NON_DISJOINT)
    ).feasible
    verdict = validate_clustering(line6, clustering(overlapping, None, DISJOINT))
    assert not verdict.feasible
    assert any("overlap" in v for v in verdict.violations)


def test_validate_rejects_out_of_range(line6):
    with pytest.raises(ValueError, match="out of range"):
        validate_clustering(line6, clustering([{0, 99}], None, DISJOINT))


def test_cost_center_and_diameter(line6):
    c = clustering([{0, 1, 2, 3}, {2, 3, 4, 5}], [3, 2], NON_DISJOINT)
    assert clustering_cost(line6, c, CENTER) == 1.0
    singletons = clustering([{i} for i in range(6)], list(range(6)), DISJOINT)
    assert clustering_cost(line6, singletons, CENTER) == 0.0
    assert clustering_cost(line6, singletons, DIAMETER) == 0.0


def test_cost_requires_centers(line6):
    c = clustering([range(6)], None, DISJOINT)
    with pytest.raises(ValueError, match="centers"):
        clustering_cost(line6, c, CENTER)
    assert clustering_cost(line6, c, DIAMETER) == 2.0


def test_optimal_disjoint_cost_is_two(line6):
    value, best = exact_disjoint(line6, CENTER)
    assert value == 2.0
    assert clustering_cost(line6, best, CENTER) == 2.0


# ---------------------------------------------------------------------------
# candidate radii and the search driver


def test_candidate_radii_line6(line6):
    assert candidate_radii(line6) == [0.0, 1.0, 2.0]


def test_candidate_radii_single_point():
    inst = make_instance([[0.0]], [], 1)
    assert candidate_radii(inst) == [0.0]


def test_candidate_radii_collinear():
    doc = {
        "n": 3,
        "k": 1,
        "metric": {"type": "lp", "coords": [[0.0], [1.0], [3.0]], "p": 2},
        "edges": [[0, 1], [1, 2]],
    }
    assert candidate_radii(load_instance(doc)) == [0.0, 1.0, 2.0, 3.0]


def test_binary_search_boundary():
    calls = []

    def probe(r):
        calls.append(r)
        return "ok" if r >= 1 else None

    assert binary_search_min_feasible([0, 1, 2], probe) == (1, "ok")


def test_binary_search_all_true():
    assert binary_search_min_feasible([0, 1, 2], lambda r: "x")[0] == 0


def test_binary_search_suffix():
    res = binary_search_min_feasible([0, 1, 2, 5], lambda r: "x" if r >= 2 else None)
    assert res[0] == 2


def test_binary_search_infeasible():
    assert binary_search_min_feasible([0, 1], lambda r: None) is None


def test_binary_search_linear_scan_agrees():
    probe = lambda r: "x" if r >= 3 else None
    fast = binary_search_min_feasible([0, 1, 3, 4], probe)
    slow = binary_search_min_feasible([0, 1, 3, 4], probe, linear_scan=True)
    assert fast == slow


# ---------------------------------------------------------------------------
# tolerance helpers


def test_distance_tolerance():
    assert dist_eq(1.0, 1.0 + 1e-12)
    assert not dist_eq(1.0, 1.0 + 1e-6)
    assert dist_leq(1.0 + 1e-12, 1.0)
    assert not dist_leq(1.1, 1.0)


# ---------------------------------------------------------------------------
# triangle checker


def test_triangle_checker_flags_violations():
    m = np.array([[0.0, 1.0, 9.0], [1.0, 0.0, 1.0], [9.0, 1.0, 0.0]])
    inst = make_instance(m, [(0, 1), (1, 2)], 1)
    assert check_triangle_inequality(inst)
    lp = gen_random("lp", 9, 3, seed=5)
    assert check_triangle_inequality(lp) == []


# ---------------------------------------------------------------------------
# properties


def test_solver_costs_are_candidate_values():
    for seed in range(8):
        inst = gen_random("general", 7, 2, seed=seed)
        cands = candidate_radii(inst)
        for objective in (CENTER, DIAMETER):
            report, result = solve_nondisjoint(inst, objective)
            assert any(dist_eq(report.objective, c) for c in cands)
            report2, result2 = solve_disjoint(inst, objective, "general")
            assert any(dist_eq(report2.objective, c) for c in cands)


def test_solver_outputs_validate():
    for seed in range(8):
        inst = gen_random("general", 7, 3, seed=seed)
        for objective in (CENTER, DIAMETER):
            _, result = solve_nondisjoint(inst, objective)
            assert validate_clustering(inst, result).feasible
            _, result2 = solve_disjoint(inst, objective, "general")
            assert validate_clustering(inst, result2).feasible
        tree = gen_random("tree", 7, 3, seed=seed)
        _, result3 = tree_dp_solve(tree)
        assert validate_clustering(tree, result3).feasible


def test_to_dot_marks_centers(line6):
    c = clustering([{0, 1, 2, 3}, {2, 3, 4, 5}], [3, 2], NON_DISJOINT)
    dot = to_dot(line6, c)
    assert "peripheries=2" in dot
    assert 'label="a"' in dot
    assert dot.count(" -- ") == 5
