import json
import math
import struct
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inspectroute.errors import DegenerateFace, ParseError, SchemaError
from inspectroute.ingest import (
    KINDS,
    Mesh,
    SegmentationConfig,
    build_graph,
    check_patches,
    detect_format,
    generate_instance,
    icosphere,
    inspection_points,
    load_mesh,
    mesh_to_instance,
    read_header,
    read_instance,
    segment_mesh,
    to_obj,
    to_stl_ascii,
    to_stl_binary,
    unit_cube,
    unit_square,
    write_instance,
)
from oracles import check_segmentation, knn_edges, triangle_area_sum

GOLDEN = Path(__file__).parent / "golden"

TRIANGLE_STL = b"""solid tri
facet normal 0 0 0
  outer loop
    vertex 0 0 0
    vertex 1 0 0
    vertex 0 1 0
  endloop
endfacet
endsolid tri
"""


def test_ascii_stl_single_triangle():
    m = load_mesh(TRIANGLE_STL)
    assert m.vertices.shape == (3, 3) and m.n_faces == 1
    assert m.areas[0] == 0.5
    assert np.allclose(m.normals[0], [0, 0, 1])


def test_stored_normals_are_ignored():
    m = load_mesh(TRIANGLE_STL.replace(b"normal 0 0 0", b"normal 0 0 -1"))
    assert np.allclose(m.normals[0], [0, 0, 1])


def test_empty_stream():
    with pytest.raises(ParseError):
        load_mesh(b"")


def test_ascii_parse_error_has_line():
    bad = TRIANGLE_STL.replace(b"vertex 1 0 0", b"vertex 1 zero 0")
    with pytest.raises(ParseError) as e:
        load_mesh(bad)
    assert e.value.line == 5


def test_degenerate_face_dropped_with_warning():
    stl = TRIANGLE_STL.replace(b"endsolid tri", b"""facet normal 0 0 0
  outer loop
    vertex 0 0 0
    vertex 1 0 0
    vertex 2 0 0
  endloop
endfacet
endsolid tri""")
    with pytest.warns(DegenerateFace):
        m = load_mesh(stl)
    assert m.n_faces == 1


def _cube_area_oracle(m):
    return triangle_area_sum(m.vertices.tolist(), m.faces.tolist())


@pytest.mark.parametrize("writer", [to_stl_ascii, to_stl_binary, to_obj])
def test_cube_round_trip_area(writer):
    m = load_mesh(writer(unit_cube()))
    assert m.n_faces == 12 and len(m.vertices) == 8
    assert abs(m.total_area - 6.0) <= 1e-9
    assert abs(_cube_area_oracle(m) - 6.0) <= 1e-9


def test_binary_stl_length_checked():
    data = to_stl_binary(unit_cube())
    with pytest.raises(ParseError):
        load_mesh(data[:-3], "stl-binary")


def test_binary_stl_layout():
    data = to_stl_binary(unit_square())
    assert len(data) == 84 + 50 * 2
    assert struct.unpack_from("<I", data, 80)[0] == 2
    assert detect_format(data) == "stl-binary"


def test_obj_subset():
    text = b"""# square
o sq
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
vn 0 0 1
f 1//1 2//1 3//1
f 1/1 3/1 4/1
"""
    m = load_mesh(text)
    assert detect_format(text) == "obj"
    assert m.n_faces == 2 and math.isclose(m.total_area, 1.0)


def test_obj_rejects_quads():
    with pytest.raises(ParseError):
        load_mesh(b"v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n", "obj")


def test_mesh_normals_unit_length():
    m = icosphere(2)
    assert np.all(np.abs(np.linalg.norm(m.normals, axis=1) - 1) <= 1e-6)


def test_single_triangle_segmentation():
    m = load_mesh(TRIANGLE_STL)
    patches = segment_mesh(m, SegmentationConfig())
    assert len(patches) == 1 and patches[0].face_ids == (0,)


def test_cube_six_patches():
    m = unit_cube()
    cfg = SegmentationConfig(max_patch_area=10.0, max_normal_deviation=0.5)
    patches = segment_mesh(m, cfg)
    assert len(patches) == 6
    assert all(len(p.face_ids) == 2 for p in patches)
    groups = [p.face_ids for p in patches]
    assert check_segmentation(m.vertices.tolist(), m.faces.tolist(), groups, 10.0, 0.5) == []


def test_icosphere_segmentation_independent_check():
    m = icosphere(2)
    assert m.n_faces == 320
    cfg = SegmentationConfig(max_patch_area=0.2 * m.total_area, max_normal_deviation=0.3)
    patches = segment_mesh(m, cfg)
    groups = [p.face_ids for p in patches]
    assert check_segmentation(m.vertices.tolist(), m.faces.tolist(), groups, 0.2 * m.total_area, 0.3) == []
    assert check_patches(m, patches, cfg) == []
    assert math.isclose(math.fsum(p.area for p in patches), m.total_area, rel_tol=1e-9)


def test_oversized_single_face_is_flagged():
    m = load_mesh(TRIANGLE_STL)
    patches = segment_mesh(m, SegmentationConfig(max_patch_area=0.1))
    assert patches[0].oversized
    assert check_patches(m, patches, SegmentationConfig(max_patch_area=0.1)) == []


def test_segmentation_deterministic():
    m = icosphere(2)
    a = segment_mesh(m, SegmentationConfig())
    b = segment_mesh(m, SegmentationConfig())
    assert [p.face_ids for p in a] == [p.face_ids for p in b]


def test_unit_square_inspection_point():
    m = unit_square()
    cfg = SegmentationConfig(max_patch_area=5.0, standoff=0.1)
    patches = segment_mesh(m, cfg)
    assert len(patches) == 1
    assert np.allclose(inspection_points(patches, cfg)[0], [0.5, 0.5, 0.1], atol=1e-12)


def test_zero_standoff_points_on_surface():
    m = unit_square()
    cfg = SegmentationConfig(max_patch_area=5.0, standoff=0.0)
    assert np.allclose(inspection_points(segment_mesh(m, cfg), cfg)[0], [0.5, 0.5, 0.0], atol=1e-12)


def test_cube_inspection_points():
    cfg = SegmentationConfig(max_patch_area=10.0, max_normal_deviation=0.5, standoff=0.2)
    pts = inspection_points(segment_mesh(unit_cube(), cfg), cfg)
    expected = {(-0.2, 0.5, 0.5), (1.2, 0.5, 0.5), (0.5, -0.2, 0.5),
                (0.5, 1.2, 0.5), (0.5, 0.5, -0.2), (0.5, 0.5, 1.2)}
    got = {tuple(np.round(p, 12) + 0.0) for p in pts}
    assert got == expected


def test_graph_complete_when_k_large():
    pts = np.random.default_rng(1).random((7, 3))
    g = build_graph(pts, knn=6)
    assert g.is_complete
    d = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    assert np.allclose(g.costs, d, rtol=0, atol=1e-15)


def test_graph_collinear_k1():
    g = build_graph([[0, 0, 0], [1, 0, 0], [2, 0, 0]], knn=1)
    assert {(i, j) for i, j, _ in g.edges()} == {(0, 1), (1, 2)}


def test_graph_matches_knn_oracle():
    pts = np.random.default_rng(7).random((100, 3))
    g = build_graph(pts, knn=4)
    expected = knn_edges(pts.tolist(), 4) | {tuple(e) for e in g.metadata["repair_edges"]}
    assert {(i, j) for i, j, _ in g.edges()} == expected
    assert g.is_connected()


def test_graph_repair_joins_clusters():
    pts = np.vstack([np.zeros((3, 3)) + [0, 0, i] for i in range(3)] + [np.array([[10, 0, 0], [10, 0, 1], [10, 0, 2]])])
    g = build_graph(pts, knn=2)
    assert g.is_connected()
    assert len(g.metadata["repair_edges"]) >= 1


def test_instance_round_trip_identity():
    inst = generate_instance("torus", 40, knn=4, seed=9)
    data = write_instance(inst)
    back = read_instance(data)
    assert back == inst
    assert write_instance(back) == data


def test_car_door_header():
    header = read_header((GOLDEN / "car-door.instance").read_bytes())
    assert header == {"name": "Car-Door", "n": 106, "edge_count": 184}


def _doc(inst):
    return json.loads(write_instance(inst))


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d["edges"][0].__setitem__(2, -1.0), "edges[0][2]"),
    (lambda d: d.__setitem__("extra", 1), "extra"),
    (lambda d: d.pop("metadata"), "metadata"),
    (lambda d: d.__setitem__("edge_count", 0), "edge_count"),
    (lambda d: d["edges"].append(list(d["edges"][0])), "edges[2]"),
    (lambda d: d["edges"][0].__setitem__(1, d["edges"][0][0]), "edges[0]"),
    (lambda d: d["points"][1].__setitem__(0, "x"), "points[1][0]"),
])
def test_schema_errors(mutate, path):
    d = _doc(generate_instance("sphere", 3, knn=1, seed=0))
    mutate(d)
    with pytest.raises(SchemaError) as e:
        read_instance(json.dumps(d).encode())
    assert e.value.path == path


def test_schema_rejects_nan():
    text = write_instance(generate_instance("sphere", 2, seed=0)).decode()
    with pytest.raises(SchemaError):
        read_instance(text.replace('"edges": [\n  [0, 1, ', '"edges": [\n  [0, 1, NaN, '))


def test_generate_deterministic_bytes():
    a = write_instance(generate_instance("box-panel", 30, knn=4, seed=5))
    b = write_instance(generate_instance("box-panel", 30, knn=4, seed=5))
    assert a == b


def test_generate_single_node():
    g = generate_instance("sphere", 1, seed=0)
    assert g.n == 1 and g.edge_count == 0


def test_generate_sphere_golden():
    ref = json.loads((GOLDEN / "sphere-n150-k4-s11.json").read_text())
    g = generate_instance(ref["kind"], ref["n"], knn=ref["knn"], seed=ref["seed"])
    assert (g.n, g.edge_count) == (ref["nodes"], ref["edges"])
    assert g.metadata["repair_edges"] == ref["repair_edges"]
    assert np.allclose(np.linalg.norm(g.points, axis=1), 0.5)


def test_generate_records_seed():
    g = generate_instance("uniform-cloud", 10, seed=2**63 + 5)
    assert g.metadata["seed"] == 2**63 + 5 and g.metadata["rng"] == "PCG64"


def test_mesh_to_instance_pipeline():
    inst = mesh_to_instance(icosphere(2), name="ball")
    assert inst.is_connected()
    assert inst.n == inst.metadata["patches"]
    assert read_instance(write_instance(inst)) == inst


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(KINDS), st.integers(1, 60), st.integers(1, 6), st.integers(0, 2**64 - 1))
def test_generated_graphs_symmetric_connected(kind, n, k, seed):
    g = generate_instance(kind, n, knn=k, seed=seed)
    assert np.array_equal(g.costs, g.costs.T)
    assert g.is_connected()
    assert g.edge_count >= n - 1
    assert read_instance(write_instance(g)) == g


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.1, 1.2), st.integers(0, 2))
def test_segmentation_properties(area_frac, theta, subdiv):
    m = icosphere(subdiv)
    cfg = SegmentationConfig(max_patch_area=area_frac * m.total_area, max_normal_deviation=theta)
    patches = segment_mesh(m, cfg)
    groups = [p.face_ids for p in patches]
    assert check_segmentation(m.vertices.tolist(), m.faces.tolist(), groups, cfg.max_patch_area, theta) == []
    assert math.isclose(math.fsum(p.area for p in patches), m.total_area, rel_tol=1e-9)


def test_from_arrays_rejects_degenerate():
    with pytest.raises(ValueError):
        Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])


def test_warnings_clean_for_good_mesh():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        load_mesh(to_stl_ascii(icosphere(1)))
