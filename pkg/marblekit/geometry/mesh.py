"""Triangle meshes: the derived carrier used for embeddedness and topology checks.

The mesh itself is a :py:class:`trimesh.Trimesh`; this module adds the manifold checks, the
quadric-fit curvature estimator and an edge/triangle intersection test."""
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
import trimesh
from scipy.spatial import cKDTree

from ..error import InputError, NumericalError
from .abstract import SurfaceSamples
from .curvature import CurvatureData, curvature_data


class TriMesh:
    """An oriented triangle mesh

    Args:
        vertices: (V, 3) points
        faces: (F, 3) vertex indices, oriented so that normals point outward
        allow_boundary: accept meshes with boundary edges (test fixtures, open profiles)
    """

    def __init__(self, vertices: np.ndarray, faces: np.ndarray, allow_boundary: bool = False):
        self.mesh = trimesh.Trimesh(np.asarray(vertices, dtype=float), np.asarray(faces, dtype=np.int64),
                                    process=False, validate=False)
        counts = self.edge_face_counts()
        if np.any(counts > 2):
            raise InputError("Mesh is not a manifold: an edge has more than two faces",
                             witness=self.mesh.edges_unique[np.argmax(counts)].tolist())
        if not allow_boundary and np.any(counts < 2):
            raise InputError("Mesh is not closed: an edge has a single face",
                             witness=self.mesh.edges_unique[np.argmin(counts)].tolist())
        self.allow_boundary = allow_boundary

    @classmethod
    def from_trimesh(cls, mesh: trimesh.Trimesh, allow_boundary: bool = False) -> "TriMesh":
        return cls(mesh.vertices, mesh.faces, allow_boundary)

    def __repr__(self) -> str:
        return f"TriMesh({len(self.vertices)} vertices, {len(self.faces)} faces)"

    @property
    def vertices(self) -> np.ndarray:
        return self.mesh.vertices

    @property
    def faces(self) -> np.ndarray:
        return self.mesh.faces

    def edge_face_counts(self) -> np.ndarray:
        "Number of faces at every unique edge"
        return np.bincount(self.mesh.edges_unique_inverse, minlength=len(self.mesh.edges_unique))

    @property
    def is_watertight(self) -> bool:
        return bool(np.all(self.edge_face_counts() == 2))

    @property
    def is_oriented(self) -> bool:
        "Consistent winding: every interior edge is traversed in both directions"
        return bool(self.mesh.is_winding_consistent)

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        edges = self.mesh.edges_unique[self.edge_face_counts() == 1]
        return np.unique(edges)

    @cached_property
    def vertex_normals(self) -> np.ndarray:
        return self.mesh.vertex_normals

    def ring(self, vertex: int, depth: int = 2) -> np.ndarray:
        "Vertices within `depth` edges of `vertex`, excluding it"
        neighbors = self.mesh.vertex_neighbors
        seen = {vertex}
        frontier = {vertex}
        for _ in range(depth):
            frontier = {other for current in frontier for other in neighbors[current]} - seen
            seen |= frontier
        seen.discard(vertex)
        return np.array(sorted(seen), dtype=int)

    def components(self) -> int:
        return len(trimesh.graph.connected_components(self.mesh.edges, nodes=np.arange(len(self.vertices))))

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "TriMesh":
        return TriMesh(self.vertices @ np.asarray(rotation).T + translation, self.faces, self.allow_boundary)

    def sample(self, spacing: Optional[float] = None, angular: int = 32) -> SurfaceSamples:
        "Vertices with normals and estimated curvatures; boundary vertices are skipped"
        interior = np.setdiff1d(np.arange(len(self.vertices)), self.boundary_vertices)
        rows = np.array([estimate_curvatures_mesh(self, int(v)).principal for v in interior])
        return SurfaceSamples(self.vertices[interior], self.vertex_normals[interior], rows,
                              np.zeros(len(interior), dtype=int))

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.mesh.contains(np.atleast_2d(points))

    def nearest(self, points: np.ndarray):
        closest, distance, triangles = trimesh.proximity.closest_point(self.mesh, np.atleast_2d(points))
        return distance, self.mesh.face_normals[triangles], closest

    def euler_characteristic(self) -> int:
        return euler_characteristic(self)

    def feature_scale(self) -> float:
        return float(self.mesh.edges_unique_length.mean() * 8)

    @property
    def n(self) -> int:
        return 2

    def self_intersections(self, tol: float = 0.0) -> List[Tuple[int, int]]:
        "Pairs of faces that share no vertex and intersect; see :py:func:`face_intersections`"
        return face_intersections(self.vertices, self.faces, tol)


def euler_characteristic(mesh: TriMesh) -> int:
    """V - E + F of a manifold mesh

    Raises:
        InputError: the mesh is not a manifold
    """
    counts = mesh.edge_face_counts()
    if np.any(counts > 2):
        raise InputError("Euler characteristic needs a manifold mesh")
    used = np.unique(mesh.faces)
    return int(len(used) - len(mesh.mesh.edges_unique) + len(mesh.faces))


def estimate_curvatures_mesh(mesh: TriMesh, vertex: int) -> CurvatureData:
    """Principal curvatures at a vertex from a quadric fitted over its two-ring

    In the tangent frame of the vertex normal the surface is fitted as a graph
    z = a x^2 + b x y + c y^2 + d x + e y; the shape operator of that graph at the origin gives
    the curvatures, positive where the surface bends away from the outward normal.

    Raises:
        InputError: the vertex lies on the boundary
        NumericalError: the two-ring is too small or degenerate
    """
    if vertex in set(mesh.boundary_vertices.tolist()):
        raise InputError("Curvature estimates need an interior vertex", witness=vertex)
    ring = mesh.ring(vertex, 2)
    if len(ring) < 5:
        raise NumericalError("Two-ring has fewer than five vertices", witness=vertex)
    normal = mesh.vertex_normals[vertex]
    origin = mesh.vertices[vertex]
    seed = np.eye(3)[np.argmin(np.abs(normal))]
    e1 = seed - np.dot(seed, normal) * normal
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    local = mesh.vertices[ring] - origin
    x, y, z = local @ e1, local @ e2, local @ normal
    design = np.column_stack([x * x, x * y, y * y, x, y])
    coefficients, _, rank, singular = np.linalg.lstsq(design, z, rcond=None)
    if rank < 5 or singular[-1] < 1e-12 * singular[0]:
        raise NumericalError("Degenerate two-ring for the quadric fit", witness=vertex)
    a, b, c, d, e = coefficients
    first = np.array([[1 + d * d, d * e], [d * e, 1 + e * e]])
    second = np.array([[2 * a, b], [b, 2 * c]]) / np.sqrt(1 + d * d + e * e)
    shape = -np.linalg.solve(first, second)
    return curvature_data(np.real(np.linalg.eigvals(shape)))


def _edge_triangle_hits(origins, directions, v0, v1, v2, tol) -> np.ndarray:
    "Moller-Trumbore test of segments origin + t direction, t in [0, 1], against triangles"
    edge1, edge2 = v1 - v0, v2 - v0
    p = np.cross(directions, edge2)
    det = np.sum(edge1 * p, axis=1)
    valid = np.abs(det) > 1e-14
    inv = np.where(valid, 1.0 / np.where(valid, det, 1.0), 0.0)
    t_vec = origins - v0
    u = np.sum(t_vec * p, axis=1) * inv
    q = np.cross(t_vec, edge1)
    v = np.sum(directions * q, axis=1) * inv
    t = np.sum(edge2 * q, axis=1) * inv
    eps = tol
    return valid & (u >= -eps) & (v >= -eps) & (u + v <= 1 + eps) & (t >= -eps) & (t <= 1 + eps)


def face_intersections(vertices: np.ndarray, faces: np.ndarray, tol: float = 0.0) -> List[Tuple[int, int]]:
    """Pairs of vertex-disjoint faces that intersect

    Candidate pairs are faces whose centroids are closer than twice the largest circumradius;
    every edge of one face is tested against the other face and vice versa. `tol` is a
    relative slack in barycentric coordinates; negative values shrink the triangles."""
    triangles = vertices[faces]
    centroids = triangles.mean(axis=1)
    radius = np.linalg.norm(triangles - centroids[:, None, :], axis=2).max()
    pairs = cKDTree(centroids).query_pairs(2 * radius * 1.0001, output_type="ndarray")
    if len(pairs) == 0:
        return []
    shared = (faces[pairs[:, 0]][:, :, None] == faces[pairs[:, 1]][:, None, :]).any(axis=(1, 2))
    pairs = pairs[~shared]
    hits = np.zeros(len(pairs), dtype=bool)
    for first, second in ((0, 1), (1, 0)):
        tri = triangles[pairs[:, second]]
        for start, end in ((0, 1), (1, 2), (2, 0)):
            origin = triangles[pairs[:, first], start]
            direction = triangles[pairs[:, first], end] - origin
            hits |= _edge_triangle_hits(origin, direction, tri[:, 0], tri[:, 1], tri[:, 2], tol)
    return [tuple(pair) for pair in pairs[hits].tolist()]
