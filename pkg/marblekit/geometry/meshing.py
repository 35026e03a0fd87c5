"""Triangulation of the exact carriers.

Surfaces are swept as rings of vertices. A ring is either a closed loop of vertex indices or a
single pole vertex; consecutive rings are joined by quads split into two triangles, poles by
fans. Rings are oriented counterclockwise around the sweep direction, which makes the face
normals point outward."""
from logging import debug
from typing import List, Optional, Sequence

import numpy as np
from scipy.spatial import ConvexHull

from ..error import EmbeddingError, InputError
from .mesh import TriMesh
from .profiles import ProfileSurface
from .tubes import TubeSurface


class MeshBuilder:
    "Collects vertices and faces of a mesh assembled from several pieces"

    def __init__(self):
        self._vertices: List[np.ndarray] = []
        self._faces: List[np.ndarray] = []
        self._count = 0

    def add_vertices(self, points: np.ndarray) -> np.ndarray:
        "Adds vertices and returns their indices"
        points = np.atleast_2d(points)
        indices = np.arange(self._count, self._count + len(points))
        self._vertices.append(points)
        self._count += len(points)
        return indices

    def add_faces(self, faces: np.ndarray):
        if len(faces):
            self._faces.append(np.asarray(faces, dtype=np.int64))

    def sweep(self, rings: Sequence[np.ndarray], loop: bool = False):
        """Joins consecutive rings. A ring is an index array; length one marks a pole.
        With `loop` the last ring is joined to the first one."""
        pairs = list(zip(rings, rings[1:]))
        if loop:
            pairs.append((rings[-1], rings[0]))
        for lower, upper in pairs:
            self.add_faces(_join_rings(lower, upper))

    def build(self, allow_boundary: bool = False) -> TriMesh:
        vertices = np.vstack(self._vertices)
        faces = np.vstack(self._faces)
        return TriMesh(vertices, faces, allow_boundary)


def _join_rings(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    if len(lower) == 1 and len(upper) == 1:
        raise InputError("Two consecutive poles")
    if len(lower) == 1:
        nxt = np.roll(upper, -1)
        return np.column_stack([np.full(len(upper), lower[0]), nxt, upper])
    if len(upper) == 1:
        nxt = np.roll(lower, -1)
        return np.column_stack([lower, nxt, np.full(len(lower), upper[0])])
    if len(lower) != len(upper):
        raise InputError("Rings of different sizes cannot be joined")
    lower_next, upper_next = np.roll(lower, -1), np.roll(upper, -1)
    return np.vstack([np.column_stack([lower, lower_next, upper]),
                      np.column_stack([lower_next, upper_next, upper])])


def angular_count(radius: float, resolution: float, minimum: int = 12) -> int:
    "Number of vertices on a circle of the given radius"
    return max(minimum, int(np.ceil(2 * np.pi * radius / resolution)))


def profile_rings(builder: MeshBuilder, surface: ProfileSurface, resolution: float,
                  angles: Optional[np.ndarray] = None) -> List[np.ndarray]:
    "Adds the revolved meridian of a profile surface and returns its rings"
    local, _ = surface.resampled_meridian(resolution)
    if angles is None:
        angles = np.linspace(0.0, 2 * np.pi, angular_count(local[:, 1].max(), resolution), endpoint=False)
    rings = []
    for point in local:
        if point[1] <= 1e-12:
            rings.append(builder.add_vertices(surface.to_world(point[None, :])))
        else:
            repeated = np.repeat(point[None, :], len(angles), axis=0)
            rings.append(builder.add_vertices(surface.to_world(repeated, angles)))
    return rings


def tube_rings(builder: MeshBuilder, tube: TubeSurface, resolution: float, count: Optional[int] = None,
               reuse_start: Optional[np.ndarray] = None, reuse_end: Optional[np.ndarray] = None) -> List[np.ndarray]:
    """Adds the rings of a tube and returns them

    `reuse_start` and `reuse_end` are index arrays of already added rings that coincide with
    the first and last ring of the tube (junction circles shared with a marble)."""
    geometry = tube.geometry
    start, end = geometry.params[0], geometry.params[-1]
    if tube.closed:
        end += np.linalg.norm(tube.radial[0] + [tube.skeleton.total_length, 0.0] - tube.radial[-1])
    steps = max(8, int(np.ceil((end - start) / resolution)))
    params = np.linspace(start, end, steps + 1)
    if tube.closed:
        params = params[:-1]
    count = count or angular_count(tube.max_radius(), resolution)
    angles = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
    rho = geometry.spline(params)[:, 1]
    rings = []
    for position, (param, radius) in enumerate(zip(params, rho)):
        if position == 0 and reuse_start is not None:
            rings.append(reuse_start)
            continue
        if position == len(params) - 1 and reuse_end is not None:
            rings.append(reuse_end)
            continue
        if radius <= 1e-9 * (end - start) and not tube.closed:
            points, _, _ = tube.evaluate(np.array([param]), np.array([0.0]))
        else:
            points, _, _ = tube.evaluate(np.full(count, param), angles)
        rings.append(builder.add_vertices(points))
    return rings


def sphere_with_holes(builder: MeshBuilder, center: np.ndarray, radius: float,
                      holes: Sequence[np.ndarray], resolution: float, hole_axes: Sequence[np.ndarray],
                      hole_angles: Sequence[float]):
    """Adds a sphere whose polar caps around `hole_axes` are cut away

    `holes` are index arrays of vertices already added to the builder that lie on the cap
    boundaries. The remaining sphere is triangulated as a convex hull."""
    count = max(32, int(np.ceil(4 * np.pi * radius ** 2 / (0.8 * resolution ** 2))))
    golden = np.pi * (3 - np.sqrt(5))
    index = np.arange(count)
    z = 1 - 2 * (index + 0.5) / count
    ring_radius = np.sqrt(1 - z * z)
    directions = np.column_stack([ring_radius * np.cos(golden * index), ring_radius * np.sin(golden * index), z])
    keep = np.ones(count, dtype=bool)
    gap = 0.5 * resolution / radius
    for axis, angle in zip(hole_axes, hole_angles):
        keep &= np.arccos(np.clip(directions @ axis, -1, 1)) > angle + gap
    free = builder.add_vertices(center + radius * directions[keep])
    hole_vertices = [np.asarray(hole) for hole in holes]
    indices = np.concatenate([free] + hole_vertices)
    points = np.vstack(builder._vertices)[indices]
    hull = ConvexHull(points)
    simplices = hull.simplices
    # outward orientation
    tri = points[simplices]
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flip = np.sum(normals * (tri.mean(axis=1) - center), axis=1) < 0
    simplices[flip] = simplices[flip][:, ::-1]
    global_faces = indices[simplices]
    for hole in hole_vertices:
        members = np.isin(global_faces, hole).all(axis=1)
        global_faces = global_faces[~members]
    builder.add_faces(global_faces)


def mesh_from(geom, resolution: float, check: bool = True) -> TriMesh:
    """Triangulates a profile surface, a tube surface or a marble complex

    Args:
        geom: the surface; only two-dimensional surfaces can be meshed
        resolution: target edge length
        check: run the triangle intersection test on the result
    Raises:
        EmbeddingError: the mesh intersects itself at this resolution
        InputError: unsupported input
    """
    if geom.n != 2:
        raise InputError("Only surfaces in space can be triangulated", witness=geom.n)
    builder = MeshBuilder()
    if isinstance(geom, ProfileSurface):
        rings = profile_rings(builder, geom, resolution)
        builder.sweep(rings, loop=False)
        mesh = builder.build(allow_boundary=geom.end_caps != "capped")
    elif isinstance(geom, TubeSurface):
        rings = tube_rings(builder, geom, resolution)
        builder.sweep(rings, loop=geom.closed)
        mesh = builder.build(allow_boundary=not (geom.closed or all(geom.capped)))
    elif hasattr(geom, "mesh_into"):
        geom.mesh_into(builder, resolution)
        mesh = builder.build()
    else:
        raise InputError(f"Cannot mesh {type(geom).__name__}")
    if check:
        tol_emb = resolution / 10
        hits = mesh.self_intersections(-tol_emb / max(resolution, 1e-300))
        if hits:
            raise EmbeddingError("Mesh intersects itself at the requested resolution", witness=hits[0])
    debug(f"Meshed {geom!r} into {mesh!r}")
    return mesh
