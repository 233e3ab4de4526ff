import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import matrix_instance, rel_close
from inspectroute import (
    close_with_dummy,
    evaluate_route,
    expand_route,
    metric_completion,
    strip_dummy,
    validate_route,
)
from inspectroute.core import canonical, closed_tour_cost
from inspectroute.errors import (
    Disconnected,
    DummyMissing,
    DuplicateNode,
    InconsistentVia,
    IndexOutOfRange,
    InvalidRoute,
    MissingEdge,
    NotComplete,
    WrongLength,
)
from inspectroute.ingest import KINDS, generate_instance
from oracles import apsp_by_relaxation, best_closed_tour, best_open_path, path_cost

INF = math.inf


def test_evaluate_single_node():
    assert evaluate_route(matrix_instance([[0.0]]), [0]) == 0.0


def test_evaluate_single_edge():
    assert evaluate_route(matrix_instance([[0, 5.0], [5.0, 0]]), [0, 1]) == 5.0


def test_evaluate_matches_direct_lookup():
    inst = generate_instance("sphere", 5, knn=4, seed=0)
    assert inst.is_complete
    C = inst.costs
    expected = C[0, 1] + C[1, 2] + C[2, 3] + C[3, 4]
    assert rel_close(evaluate_route(inst, [0, 1, 2, 3, 4]), expected)


def test_evaluate_rejects_missing_edge(path_graph):
    with pytest.raises(MissingEdge):
        evaluate_route(path_graph, [0, 2, 1])


def test_evaluate_rejects_non_permutation(path_graph):
    with pytest.raises(InvalidRoute):
        evaluate_route(path_graph, [0, 1, 1])


def test_validate_ok_on_complete_graph():
    inst, _ = metric_completion(generate_instance("torus", 7, seed=2))
    assert validate_route(inst, [3, 1, 4, 0, 6, 5, 2]) is None


def test_validate_reports_first_violation(path_graph):
    assert validate_route(path_graph, [0, 0, 1]) == DuplicateNode(0)
    assert isinstance(validate_route(path_graph, [0, 1]), WrongLength)
    assert isinstance(validate_route(path_graph, [0, 1, 3]), IndexOutOfRange)
    assert validate_route(path_graph, [1, 0, 2]) == MissingEdge(0, 2)
    assert validate_route(path_graph, [1, 0, 2], require_edges=False) is None


def test_validate_missing_edge_in_longer_route():
    C = np.ones((5, 5)) - np.eye(5)
    C[0, 2] = C[2, 0] = INF
    inst = matrix_instance(C)
    assert validate_route(inst, [4, 3, 0, 2, 1]) == MissingEdge(0, 2)


def test_completion_of_metric_graph_is_unchanged():
    pts = np.random.default_rng(5).random((8, 3))
    C = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    inst = matrix_instance(C, points=pts)
    completed, via = metric_completion(inst)
    assert np.array_equal(completed.costs, inst.costs)
    off = ~np.eye(8, dtype=bool)
    rows = np.broadcast_to(np.arange(8)[:, None], (8, 8))
    assert np.array_equal(via[off], rows[off])


def test_completion_path_graph(path_graph):
    completed, via = metric_completion(path_graph)
    assert completed.costs[0, 2] == 3.0
    assert via[0, 2] == 1


def test_completion_matches_relaxation_oracle():
    inst = generate_instance("uniform-cloud", 12, knn=3, seed=3)
    assert not inst.is_complete
    completed, _ = metric_completion(inst)
    ref = apsp_by_relaxation(inst.costs.tolist())
    for i in range(12):
        for j in range(12):
            assert rel_close(completed.costs[i, j], ref[i][j])


def test_completion_disconnected():
    C = [[0, 1, INF, INF], [1, 0, INF, INF], [INF, INF, 0, 2], [INF, INF, 2, 0]]
    with pytest.raises(Disconnected) as e:
        metric_completion(matrix_instance(C))
    assert sorted(map(sorted, e.value.components)) == [[0, 1], [2, 3]]


def test_expand_direct_legs_unchanged():
    inst = generate_instance("sphere", 6, knn=5, seed=1)
    completed, via = metric_completion(inst)
    ex = expand_route([2, 0, 5, 1, 3, 4], via, inst)
    assert ex.waypoints == (2, 0, 5, 1, 3, 4)


def test_expand_path_graph(path_graph):
    completed, via = metric_completion(path_graph)
    ex = expand_route([0, 2, 1], via, path_graph)
    assert ex.waypoints == (0, 1, 2, 1)
    assert ex.cost == 5.0


def test_expand_matches_completed_cost_on_random_permutations():
    inst = generate_instance("uniform-cloud", 12, knn=3, seed=3)
    completed, via = metric_completion(inst)
    rng = np.random.default_rng(0)
    for _ in range(100):
        r = rng.permutation(12).tolist()
        ex = expand_route(r, via, inst)
        assert rel_close(ex.cost, evaluate_route(completed, r))
        for a, b in zip(ex.waypoints, ex.waypoints[1:]):
            assert inst.has_edge(a, b)


def test_expand_rejects_looping_via(path_graph):
    _, via = metric_completion(path_graph)
    bad = via.copy()
    bad[0, 2] = 2
    with pytest.raises(InconsistentVia):
        expand_route([0, 2, 1], bad, path_graph)


def test_close_with_dummy_three_nodes():
    inst, _ = metric_completion(generate_instance("sphere", 3, seed=0))
    aug = close_with_dummy(inst)
    assert aug.n == 4
    assert np.all(aug.costs[3, :3] == 0) and np.all(aug.costs[:3, 3] == 0)
    assert np.array_equal(aug.costs[:3, :3], inst.costs)


def test_close_with_dummy_single_node():
    aug = close_with_dummy(matrix_instance([[0.0]]))
    assert aug.n == 2
    assert best_closed_tour(aug.costs.tolist()) == 0.0


def test_close_requires_complete(path_graph):
    with pytest.raises(NotComplete):
        close_with_dummy(path_graph)


def test_close_with_restricted_endpoints():
    inst, _ = metric_completion(generate_instance("torus", 5, seed=4))
    aug = close_with_dummy(inst, endpoints=[0, 3])
    assert aug.costs[5, 0] == 0 and aug.costs[5, 3] == 0
    assert math.isinf(aug.costs[5, 1])


def test_strip_dummy_examples():
    assert strip_dummy([3, 0, 1, 2], 3) == (0, 1, 2)
    assert strip_dummy([1, 3, 2, 0], 3) == (2, 0, 1)
    with pytest.raises(DummyMissing):
        strip_dummy([0, 1, 2], 3)


@pytest.mark.parametrize("n", range(1, 9))
def test_closure_equivalence_and_reinsertion(n):
    for seed in range(0, 20, 5):
        inst, _ = metric_completion(generate_instance(KINDS[seed % 4], n, knn=3, seed=seed))
        C = inst.costs.tolist()
        aug = close_with_dummy(inst)
        assert rel_close(best_closed_tour(aug.costs.tolist()), best_open_path(C))
        rng = np.random.default_rng(seed)
        r = rng.permutation(n).tolist()
        for pos in range(n + 1):
            tour = r[:pos] + [n] + r[pos:]
            stripped = strip_dummy(tour, n)
            assert rel_close(evaluate_route(inst, stripped), closed_tour_cost(aug, tour))


def test_canonical_orientation():
    assert canonical([3, 1, 0]) == (0, 1, 3)
    assert canonical([0, 2, 1]) == (0, 2, 1)


def test_instance_equality_and_immutability():
    a = generate_instance("sphere", 10, seed=1)
    b = generate_instance("sphere", 10, seed=1)
    assert a == b
    with pytest.raises(ValueError):
        a.costs[0, 1] = 1.0


def test_instance_rejects_asymmetric():
    with pytest.raises(ValueError):
        matrix_instance([[0, 1], [2, 0]])


# property tests

sparse_instances = st.builds(
    lambda kind, n, k, seed: generate_instance(kind, n, knn=k, seed=seed),
    st.sampled_from(KINDS), st.integers(2, 18), st.integers(1, 4), st.integers(0, 2**32),
)


@settings(max_examples=40, deadline=None)
@given(sparse_instances, st.randoms(use_true_random=False))
def test_reverse_route_same_cost(inst, rnd):
    completed, _ = metric_completion(inst)
    r = list(range(inst.n))
    rnd.shuffle(r)
    assert evaluate_route(completed, r) == evaluate_route(completed, r[::-1])


@settings(max_examples=40, deadline=None)
@given(sparse_instances)
def test_completion_idempotent_and_triangle(inst):
    c1, _ = metric_completion(inst)
    c2, _ = metric_completion(c1)
    assert np.array_equal(c1.costs, c2.costs)
    D = c1.costs
    assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + 1e-9)


@settings(max_examples=40, deadline=None)
@given(sparse_instances, st.randoms(use_true_random=False))
def test_expansion_consistency(inst, rnd):
    completed, via = metric_completion(inst)
    r = list(range(inst.n))
    rnd.shuffle(r)
    ex = expand_route(r, via, inst)
    assert rel_close(ex.cost, evaluate_route(completed, r))
    assert rel_close(ex.cost, path_cost(inst.costs.tolist(), list(ex.waypoints)))
