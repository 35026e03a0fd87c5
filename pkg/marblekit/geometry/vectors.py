"Some vector and point cloud related tools"
from itertools import tee
from typing import Tuple

import numpy as np
from scipy.spatial import cKDTree


def pairwise(iterable):
    "s -> (s0,s1), (s1,s2), (s2, s3), ..."
    first, second = tee(iterable)
    next(second, None)
    return zip(first, second)


def normalize(vectors: np.ndarray) -> np.ndarray:
    "Scales every row of `vectors` to unit length. Zero rows stay zero."
    vectors = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(vectors, axis=-1, keepdims=True)
    return np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)


def any_perpendicular(vector: np.ndarray) -> np.ndarray:
    "Returns a unit vector perpendicular to `vector`"
    vector = np.asarray(vector, dtype=float)
    axis = np.zeros_like(vector)
    axis[np.argmin(np.abs(vector))] = 1.0
    perp = axis - np.dot(axis, vector) / np.dot(vector, vector) * vector
    return perp / np.linalg.norm(perp)


def rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    "Rotation matrix in R^3 about the unit vector `axis` (Rodrigues)"
    axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    cross = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0],
    ])
    return np.eye(3) + np.sin(angle) * cross + (1 - np.cos(angle)) * cross @ cross


def rotation_between(source: np.ndarray, target: np.ndarray) -> np.ndarray:
    "Rotation matrix taking the unit vector `source` to the unit vector `target`"
    source = np.asarray(source, dtype=float) / np.linalg.norm(source)
    target = np.asarray(target, dtype=float) / np.linalg.norm(target)
    axis = np.cross(source, target)
    sin = np.linalg.norm(axis)
    cos = float(np.dot(source, target))
    if sin < 1e-12:
        if cos > 0:
            return np.eye(3)
        return rotation_about(any_perpendicular(source), np.pi)
    return rotation_about(axis / sin, np.arctan2(sin, cos))


def hausdorff_distance(points_a: np.ndarray, points_b: np.ndarray) -> float:
    "Symmetric Hausdorff distance of two point samples"
    dist_ab, _ = cKDTree(points_b).query(points_a)
    dist_ba, _ = cKDTree(points_a).query(points_b)
    return float(max(dist_ab.max(), dist_ba.max()))


def nearest(points: np.ndarray, queries: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    "Distances and indices of the nearest sample in `points` for every query point"
    return cKDTree(points).query(queries)
