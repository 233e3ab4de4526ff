"""Patch segmentation by region growing and inspection-point placement."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh


@dataclass(frozen=True)
class SegmentationConfig:
    """Thresholds for patch growth and graph construction.

    ``max_patch_area`` of ``None`` means 5% of the mesh's total area.
    """

    max_patch_area: float | None = None
    max_normal_deviation: float = 0.35
    standoff: float = 0.15
    knn: int = 4

    DEFAULT_AREA_FRACTION = 0.05

    def __post_init__(self):
        if self.max_patch_area is not None and not self.max_patch_area > 0:
            raise ValueError("max_patch_area must be positive")
        if not 0 < self.max_normal_deviation < math.pi:
            raise ValueError("max_normal_deviation must lie in (0, pi)")
        if not self.standoff >= 0:
            raise ValueError("standoff must be non-negative")
        if int(self.knn) != self.knn or self.knn < 1:
            raise ValueError("knn must be a positive integer")

    def area_limit(self, mesh: Mesh) -> float:
        if self.max_patch_area is not None:
            return float(self.max_patch_area)
        return self.DEFAULT_AREA_FRACTION * mesh.total_area


@dataclass(frozen=True)
class Patch:
    face_ids: tuple
    area: float
    mean_normal: np.ndarray
    max_normal_deviation: float
    representative_point: np.ndarray
    oversized: bool = False


def angles_to(normals: np.ndarray, axis: np.ndarray) -> np.ndarray:
    """Angle between each row of ``normals`` and ``axis`` (atan2 form, accurate near 0)."""
    cross = np.linalg.norm(np.cross(normals, axis), axis=-1)
    dot = normals @ axis
    return np.arctan2(cross, dot)


def _mean_normal(normals, areas):
    s = (areas[:, None] * normals).sum(axis=0)
    norm = np.linalg.norm(s)
    if norm == 0:
        return None
    return s / norm


def _make_patch(mesh: Mesh, faces: list[int], oversized: bool) -> Patch:
    ids = np.array(sorted(faces))
    areas = mesh.areas[ids]
    mean = _mean_normal(mesh.normals[ids], areas)
    dev = float(angles_to(mesh.normals[ids], mean).max())
    centroid = (areas[:, None] * mesh.face_centroids()[ids]).sum(axis=0) / areas.sum()
    return Patch(
        face_ids=tuple(int(f) for f in ids),
        area=math.fsum(areas.tolist()),
        mean_normal=mean,
        max_normal_deviation=dev,
        representative_point=centroid,
        oversized=oversized,
    )


def segment_mesh(mesh: Mesh, config: SegmentationConfig) -> list[Patch]:
    """Partition the faces into edge-connected patches under both thresholds.

    Region growing: seed at the lowest unassigned face, breadth-first across
    shared edges, admit a face only if the grown patch keeps its area within
    the limit and every member within the angle limit of the new area-weighted
    mean normal. A face refused once is not retried for the same patch.
    """
    if mesh.n_faces == 0:
        raise ValueError("mesh has no faces")
    a_max = config.area_limit(mesh)
    theta = config.max_normal_deviation
    adj = mesh.face_adjacency()
    normals, areas = mesh.normals, mesh.areas
    owner = np.full(mesh.n_faces, -1, dtype=np.int64)
    patches = []
    for seed in range(mesh.n_faces):
        if owner[seed] >= 0:
            continue
        pid = len(patches)
        owner[seed] = pid
        members = [seed]
        area = float(areas[seed])
        nsum = areas[seed] * normals[seed]
        seen = {seed}
        queue = deque(adj[seed])
        seen.update(adj[seed])
        while queue:
            f = queue.popleft()
            if owner[f] >= 0:
                continue
            grown = area + areas[f]
            if grown > a_max:
                continue
            s = nsum + areas[f] * normals[f]
            norm = np.linalg.norm(s)
            if norm == 0:
                continue
            mean = s / norm
            cand = members + [f]
            if angles_to(normals[cand], mean).max() > theta:
                continue
            owner[f] = pid
            members.append(f)
            area = grown
            nsum = s
            for g in adj[f]:
                if g not in seen and owner[g] < 0:
                    seen.add(g)
                    queue.append(g)
        patches.append(_make_patch(mesh, members, oversized=len(members) == 1 and areas[seed] > a_max))
    return patches


def check_patches(mesh: Mesh, patches: list[Patch], config: SegmentationConfig) -> list[str]:
    """Independent post-hoc verifier; returns human-readable problems (empty if clean).

    Recomputes every quantity from the raw mesh rather than trusting the
    fields stored on each patch.
    """
    problems = []
    a_max = config.area_limit(mesh)
    counts = np.zeros(mesh.n_faces, dtype=int)
    adj = mesh.face_adjacency()
    for k, p in enumerate(patches):
        ids = list(p.face_ids)
        if not ids:
            problems.append(f"patch {k} is empty")
            continue
        counts[ids] += 1
        area = math.fsum(mesh.areas[ids].tolist())
        if area > a_max + 1e-12 and not (len(ids) == 1 and p.oversized):
            problems.append(f"patch {k}: area {area} exceeds {a_max}")
        s = np.zeros(3)
        for f in ids:
            s = s + mesh.areas[f] * mesh.normals[f]
        mean = s / np.linalg.norm(s)
        worst = 0.0
        for f in ids:
            c = float(np.clip(np.dot(mesh.normals[f], mean), -1.0, 1.0))
            worst = max(worst, math.acos(c))
        if worst > config.max_normal_deviation + 1e-9:
            problems.append(f"patch {k}: normal deviation {worst} exceeds {config.max_normal_deviation}")
        # edge-connectivity of the member set
        members = set(ids)
        stack, reached = [ids[0]], {ids[0]}
        while stack:
            f = stack.pop()
            for g in adj[f]:
                if g in members and g not in reached:
                    reached.add(g)
                    stack.append(g)
        if reached != members:
            problems.append(f"patch {k} is not edge-connected")
    if np.any(counts != 1):
        problems.append(f"{int(np.sum(counts != 1))} faces not covered exactly once")
    return problems


def inspection_points(patches: list[Patch], config: SegmentationConfig) -> np.ndarray:
    """One sensor position per patch: area-weighted centroid pushed out along the mean normal."""
    if not patches:
        raise ValueError("no patches")
    return np.array([p.representative_point + config.standoff * p.mean_normal for p in patches])
