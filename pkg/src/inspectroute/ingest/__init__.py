"""Instance acquisition: meshes, segmentation, graphs, files and generators."""
from ..core import Instance
from .generate import KINDS, generate_instance, make_rng, sample_points
from .graph import build_graph, euclidean_costs, knn_mask
from .instance_io import read_header, read_instance, write_instance
from .mesh import Mesh, detect_format, load_mesh, to_obj, to_stl_ascii, to_stl_binary
from .segment import Patch, SegmentationConfig, check_patches, inspection_points, segment_mesh
from .shapes import icosphere, unit_cube, unit_square


def mesh_to_instance(mesh: Mesh, config: SegmentationConfig | None = None, name: str = "mesh") -> Instance:
    """Segment ``mesh``, place one inspection point per patch and build the cost graph."""
    config = config or SegmentationConfig()
    patches = segment_mesh(mesh, config)
    pts = inspection_points(patches, config)
    meta = {
        "source": "mesh",
        "faces": int(mesh.n_faces),
        "patches": len(patches),
        "oversized_patches": int(sum(bool(p.oversized) for p in patches)),
        "max_patch_area": config.area_limit(mesh),
        "max_normal_deviation": float(config.max_normal_deviation),
        "standoff": float(config.standoff),
    }
    return build_graph(pts, config, name=name, metadata=meta)


__all__ = [
    "KINDS", "Mesh", "Patch", "SegmentationConfig", "build_graph", "check_patches",
    "detect_format", "euclidean_costs", "generate_instance", "icosphere",
    "inspection_points", "knn_mask", "load_mesh", "make_rng", "mesh_to_instance",
    "read_header", "read_instance", "sample_points", "segment_mesh", "to_obj", "to_stl_ascii",
    "to_stl_binary", "unit_cube", "unit_square", "write_instance",
]
