"""Synthetic instances standing in for proprietary CAD references.

Every random draw in the package comes from numpy's PCG64 bit generator,
seeded explicitly; generated instances record their seed in ``metadata``.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import Instance
from .graph import build_graph

KINDS = ("sphere", "torus", "box-panel", "uniform-cloud")


def make_rng(seed: int) -> np.random.Generator:
    if int(seed) != seed or seed < 0 or seed >= 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(int(seed)))


def _sphere(rng, n, radius=0.5):
    u = rng.random((n, 2))
    z = 1.0 - 2.0 * u[:, 0]
    phi = 2.0 * math.pi * u[:, 1]
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return radius * np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _torus(rng, n, R=0.6, r=0.2):
    # rejection on the tube angle gives area-uniform samples
    out = np.empty((0, 2))
    while out.shape[0] < n:
        u = rng.random((2 * n, 3))
        theta = 2.0 * math.pi * u[:, 0]
        keep = u[:, 2] * (R + r) <= R + r * np.cos(theta)
        out = np.vstack([out, np.column_stack([theta, 2.0 * math.pi * u[:, 1]])[keep]])
    theta, phi = out[:n, 0], out[:n, 1]
    w = R + r * np.cos(theta)
    return np.column_stack([w * np.cos(phi), w * np.sin(phi), r * np.sin(theta)])


def _box_panel(rng, n, size=(1.0, 0.6, 0.05)):
    sx, sy, sz = size
    # faces: +-z (sx*sy), +-y (sx*sz), +-x (sy*sz)
    areas = np.array([sx * sy, sx * sy, sx * sz, sx * sz, sy * sz, sy * sz])
    cum = np.cumsum(areas) / areas.sum()
    u = rng.random((n, 3))
    face = np.minimum(np.searchsorted(cum, u[:, 0], side="right"), 5)
    a, b = u[:, 1], u[:, 2]
    pts = np.empty((n, 3))
    for f in range(6):
        m = face == f
        side = float(f % 2)
        if f < 2:
            pts[m] = np.column_stack([a[m] * sx, b[m] * sy, np.full(m.sum(), side * sz)])
        elif f < 4:
            pts[m] = np.column_stack([a[m] * sx, np.full(m.sum(), side * sy), b[m] * sz])
        else:
            pts[m] = np.column_stack([np.full(m.sum(), side * sx), a[m] * sy, b[m] * sz])
    return pts


def _cloud(rng, n):
    return rng.random((n, 3))


_SAMPLERS = {"sphere": _sphere, "torus": _torus, "box-panel": _box_panel, "uniform-cloud": _cloud}


def sample_points(kind: str, n: int, seed: int) -> np.ndarray:
    if kind not in _SAMPLERS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if n < 1:
        raise ValueError("n must be at least 1")
    return _SAMPLERS[kind](make_rng(seed), int(n))


def generate_instance(kind: str, n: int, knn: int = 4, seed: int = 0, name: str | None = None) -> Instance:
    """Deterministic synthetic instance: points on the named surface, union k-NN graph."""
    pts = sample_points(kind, n, seed)
    meta = {"generator": kind, "knn": int(knn), "seed": int(seed), "rng": "PCG64"}
    return build_graph(pts, knn=knn, name=name or f"{kind}-n{n}-k{knn}-s{seed}", metadata=meta)
