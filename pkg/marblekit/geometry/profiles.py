"""Surfaces of revolution around an axis, given by their meridian curve.

The meridian is a polyline in the (x, y) half plane, x along the axis and y >= 0 the distance
from it. It runs from left to right, so that the outward normal is the tangent turned
counterclockwise. Three kinds of ends are supported:

* ``capped``: both ends lie on the axis; the surface is a sphere.
* ``open``: the meridian is a graph y = u(x) over an interval and the surface has two
  boundary circles.
* ``periodic``: a graph over a period, the ends are identified.
"""
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import shapely
from scipy.interpolate import CubicSpline
from shapely.geometry import Polygon

from ..error import InputError
from .abstract import Hypersurface, SurfaceSamples
from .curvature import CurvatureData, curvature_data
from .vectors import normalize

END_CAPS = ("capped", "open", "periodic")

#: Number of mirrored ghost samples used to evaluate derivatives at the ends
GHOST = 4


class MeridianGeometry:
    """Arclength spline of a meridian with the curvature quantities of the surface of revolution

    Derivatives at axis points come from the meridian mirrored at the axis, derivatives at the
    ends of a periodic graph from its periodic continuation."""

    def __init__(self, points: np.ndarray, ends: Tuple[str, str], period: Optional[float] = None):
        self.points = points
        self.ends = ends
        extended, self.offset = self._extend(points, ends, period)
        chord = np.linalg.norm(np.diff(extended, axis=0), axis=1)
        params = np.concatenate([[0.0], np.cumsum(chord)])
        self.params = params[self.offset:self.offset + len(points)]
        self.spline = CubicSpline(params, extended)

    @staticmethod
    def _extend(points: np.ndarray, ends: Tuple[str, str], period: Optional[float]):
        "Extends the meridian by ghost samples; ends are each one of axis, free and periodic"
        ghost = min(GHOST, len(points) - 2)
        if ends[0] == "periodic":
            shift = np.array([period, 0.0])
            return np.vstack([points[-ghost:] - shift, points, points[:ghost] + shift]), ghost
        mirror = np.array([1.0, -1.0])
        pieces = [points]
        offset = 0
        if ends[0] == "axis":
            pieces.insert(0, (points[1:ghost + 1] * mirror)[::-1])
            offset = ghost
        if ends[1] == "axis":
            pieces.append((points[-ghost - 1:-1] * mirror)[::-1])
        return np.vstack(pieces), offset

    def derivatives(self, params: np.ndarray):
        "First and second derivatives of the meridian spline"
        return self.spline(params, 1), self.spline(params, 2)

    def quantities(self, params: np.ndarray, radii: np.ndarray):
        """Returns (meridian curvature, rotational curvature, outward normal) at spline parameters

        `radii` are the distances from the axis at these parameters."""
        first, second = self.derivatives(params)
        speed = np.linalg.norm(first, axis=1)
        k_meridian = -(first[:, 0] * second[:, 1] - first[:, 1] * second[:, 0]) / speed ** 3
        normals = np.column_stack([-first[:, 1], first[:, 0]]) / speed[:, None]
        on_axis = radii <= 1e-12
        k_rotation = np.where(on_axis, k_meridian, normals[:, 1] / np.where(on_axis, 1.0, radii))
        return k_meridian, k_rotation, normals

    def sample_quantities(self):
        return self.quantities(self.params, self.points[:, 1])


class ProfileSurface(Hypersurface):
    """A hypersurface of revolution in R^{n+1}, for n = 2 embedded in space by a rigid motion

    Args:
        meridian:
            (M, 2) array of meridian points, ordered left to right
        n:
            Dimension of the hypersurface
        end_caps:
            One of ``capped``, ``open`` and ``periodic``
        period:
            Length of the period of a ``periodic`` profile
        rotation, translation:
            Rigid motion placing the local x axis in space
    """

    def __init__(self, meridian: np.ndarray, n: int = 2, end_caps: str = "capped",
                 period: Optional[float] = None, rotation: Optional[np.ndarray] = None,
                 translation: Optional[np.ndarray] = None):
        meridian = np.array(meridian, dtype=float)
        if end_caps not in END_CAPS:
            raise InputError(f"Unknown end cap kind {end_caps}", witness=end_caps)
        if meridian.ndim != 2 or meridian.shape[1] != 2 or len(meridian) < 5:
            raise InputError("A meridian needs at least five (x, y) points")
        if end_caps == "periodic" and not (period and period > 0):
            raise InputError("Periodic profiles need a positive period")
        if end_caps == "capped":
            meridian[0, 1] = meridian[-1, 1] = 0.0
            interior = meridian[1:-1, 1]
        else:
            interior = meridian[:, 1]
            if np.any(np.diff(meridian[:, 0]) <= 0):
                raise InputError("Open and periodic profiles have to be graphs over the axis")
        if np.any(interior <= 0):
            raise InputError("The profile has to stay away from the axis in the interior",
                             witness=int(np.argmin(interior)))
        meridian.setflags(write=False)
        self.meridian = meridian
        self._n = int(n)
        self.end_caps = end_caps
        self.period = period
        self.rotation = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        self.translation = np.zeros(3) if translation is None else np.asarray(translation, dtype=float)

    def __repr__(self) -> str:
        return (f"ProfileSurface(n={self.n}, {self.end_caps}, {len(self.meridian)} samples, "
                f"x in [{self.meridian[0, 0]:.4g}, {self.meridian[-1, 0]:.4g}])")

    @property
    def n(self) -> int:
        return self._n

    @property
    def axis(self) -> Tuple[np.ndarray, np.ndarray]:
        "Start and end point of the axis segment in space"
        return (self.to_world(np.array([[self.meridian[0, 0], 0.0]]))[0],
                self.to_world(np.array([[self.meridian[-1, 0], 0.0]]))[0])

    @cached_property
    def geometry(self) -> MeridianGeometry:
        ends = {"capped": ("axis", "axis"), "open": ("free", "free"),
                "periodic": ("periodic", "periodic")}[self.end_caps]
        return MeridianGeometry(self.meridian, ends, self.period)

    def with_meridian(self, meridian: np.ndarray, end_caps: Optional[str] = None) -> "ProfileSurface":
        "A profile with the same placement and a new meridian"
        return ProfileSurface(meridian, self.n, end_caps or self.end_caps, self.period,
                              self.rotation, self.translation)

    # --- coordinates ----------------------------------------------------------------------

    def to_world(self, local: np.ndarray, angles: Optional[np.ndarray] = None) -> np.ndarray:
        "Maps meridian points (x, y), revolved by the given angles, into space"
        local = np.atleast_2d(local)
        if angles is None:
            angles = np.zeros(len(local))
        xyz = np.column_stack([local[:, 0], local[:, 1] * np.cos(angles), local[:, 1] * np.sin(angles)])
        return xyz @ self.rotation.T + self.translation

    def to_local(self, points: np.ndarray) -> np.ndarray:
        "Maps points in space to (axial coordinate, distance from the axis)"
        xyz = (np.atleast_2d(points) - self.translation) @ self.rotation
        return np.column_stack([xyz[:, 0], np.linalg.norm(xyz[:, 1:], axis=1)])

    # --- curvature ------------------------------------------------------------------------

    def curvature_rows(self) -> np.ndarray:
        "(M, n) sorted principal curvatures at the meridian samples"
        k_meridian, k_rotation, _ = self.geometry.sample_quantities()
        return _rows(k_meridian, k_rotation, self.n)

    def mean_curvature(self) -> np.ndarray:
        "(M,) mean curvature at the meridian samples"
        k_meridian, k_rotation, _ = self.geometry.sample_quantities()
        return k_meridian + (self.n - 1) * k_rotation

    def outward_normals(self) -> np.ndarray:
        "(M, 2) outward normals of the meridian samples"
        return self.geometry.sample_quantities()[2]

    def feature_scale(self) -> float:
        rows = self.curvature_rows()
        largest = np.abs(rows).max()
        scale = 1 / largest if largest > 0 else np.inf
        extent = np.ptp(self.meridian[:, 0]) if self.end_caps != "periodic" else self.period
        return float(min(scale, extent, self.meridian[:, 1].max()))

    def arclength_of_x(self, x: float) -> float:
        "Spline parameter of the meridian point with axial coordinate x (the highest one)"
        xs = self.meridian[:, 0]
        if not xs.min() - 1e-12 <= x <= xs.max() + 1e-12:
            raise InputError(f"x={x} outside the profile domain [{xs.min()}, {xs.max()}]",
                             witness=x)
        geometry = self.geometry
        fine = np.linspace(geometry.params[0], geometry.params[-1], 8 * len(xs))
        values = geometry.spline(fine)
        crossings = np.nonzero(np.diff(np.sign(values[:, 0] - x)) != 0)[0]
        candidates = [fine[int(np.argmin(np.abs(values[:, 0] - x)))]]
        for index in crossings:
            low, high = fine[index], fine[index + 1]
            for _ in range(60):
                middle = (low + high) / 2
                if (geometry.spline(low)[0] - x) * (geometry.spline(middle)[0] - x) <= 0:
                    high = middle
                else:
                    low = middle
            candidates.append((low + high) / 2)
        return float(max(candidates, key=lambda param: geometry.spline(param)[1]))

    def radius_at(self, x: float) -> float:
        "Distance u(x) of the surface from the axis"
        return float(self.geometry.spline(self.arclength_of_x(x))[1])

    # --- Hypersurface ---------------------------------------------------------------------

    def resampled_meridian(self, spacing: float) -> Tuple[np.ndarray, np.ndarray]:
        "Meridian points at roughly uniform arclength spacing and their spline parameters"
        geometry = self.geometry
        start, end = geometry.params[0], geometry.params[-1]
        count = max(8, int(np.ceil((end - start) / spacing)) + 1)
        params = np.linspace(start, end, count)
        if self.end_caps == "periodic":
            params = params[:-1]
        points = geometry.spline(params)
        if self.end_caps == "capped":
            points[0, 1] = points[-1, 1] = 0.0
        return points, params

    def sample(self, spacing: Optional[float] = None, angular: int = 32) -> SurfaceSamples:
        spacing = spacing or self.default_spacing()
        local, params = self.resampled_meridian(spacing)
        k_meridian, k_rotation, normals2 = self.geometry.quantities(params, local[:, 1])
        rows = _rows(k_meridian, k_rotation, self.n)
        angles = np.linspace(0.0, 2 * np.pi, angular, endpoint=False)
        on_axis = local[:, 1] <= 1e-12
        repeat = np.where(on_axis, 1, angular)
        index = np.repeat(np.arange(len(local)), repeat)
        phi = np.concatenate([angles[:count] for count in repeat])
        points = self.to_world(local[index], phi)
        normal_local = np.column_stack([normals2[index, 0], normals2[index, 1] * np.cos(phi),
                                        normals2[index, 1] * np.sin(phi)])
        normals = normalize(normal_local @ self.rotation.T)
        return SurfaceSamples(points, normals, rows[index], np.zeros(len(index), dtype=int))

    @cached_property
    def _polygon(self) -> Polygon:
        meridian = self.meridian
        if self.end_caps == "capped":
            outline = meridian
        else:
            outline = np.vstack([[meridian[0, 0], 0.0], meridian, [meridian[-1, 0], 0.0]])
        return shapely.make_valid(Polygon(outline))

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        local = self.to_local(points)
        if self.end_caps == "periodic":
            start = self.meridian[0, 0]
            local[:, 0] = start + np.mod(local[:, 0] - start, self.period)
        polygon = self._polygon.buffer(tol) if tol > 0 else self._polygon
        return shapely.contains_xy(polygon, local[:, 0], local[:, 1]) | \
            shapely.intersects_xy(polygon.boundary, local[:, 0], local[:, 1])

    def nearest(self, points: np.ndarray):
        xyz = (np.atleast_2d(points) - self.translation) @ self.rotation
        local = np.column_stack([xyz[:, 0], np.linalg.norm(xyz[:, 1:], axis=1)])
        if self.end_caps == "periodic":
            start = self.meridian[0, 0]
            local[:, 0] = start + np.mod(local[:, 0] - start, self.period)
        line = shapely.LineString(self.meridian)
        queries = shapely.points(local)
        positions = shapely.line_locate_point(line, queries)
        feet = shapely.get_coordinates(shapely.line_interpolate_point(line, positions))
        distance = np.linalg.norm(local - feet, axis=1)
        geometry = self.geometry
        params = geometry.params[0] + positions
        _, _, normals2 = geometry.quantities(params, feet[:, 1])
        angles = np.arctan2(xyz[:, 2], xyz[:, 1])
        normal_local = np.column_stack([normals2[:, 0], normals2[:, 1] * np.cos(angles),
                                        normals2[:, 1] * np.sin(angles)])
        return distance, normal_local @ self.rotation.T, self.to_world(feet, angles)

    def euler_characteristic(self) -> int:
        return 2 if self.end_caps == "capped" else 0

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "ProfileSurface":
        rotation = np.asarray(rotation, dtype=float)
        return ProfileSurface(self.meridian, self.n, self.end_caps, self.period,
                              rotation @ self.rotation, rotation @ self.translation + translation)

    def volume_profile(self) -> float:
        "Area enclosed by the meridian and the axis"
        return float(self._polygon.area)

    def to_dict(self) -> dict:
        return {
            "kind": "profile", "n": self.n, "end_caps": self.end_caps, "period": self.period,
            "meridian": self.meridian.tolist(), "rotation": self.rotation.tolist(),
            "translation": self.translation.tolist(),
        }


def _rows(k_meridian: np.ndarray, k_rotation: np.ndarray, n: int) -> np.ndarray:
    rows = np.column_stack([k_meridian] + [k_rotation] * (n - 1))
    return np.sort(rows, axis=1)


def principal_curvatures_profile(surface: ProfileSurface, x: float) -> CurvatureData:
    """Principal curvatures of a surface of revolution at axial coordinate x

    For a graph y = u(x) the axial curvature is -u''/(1+u'^2)^(3/2) and the rotational one,
    with multiplicity n-1, is 1/(u (1+u'^2)^(1/2)). The same quantities are evaluated on the
    arclength parameterized meridian, which also covers the points on the axis.

    Raises:
        InputError: x lies outside the profile
    """
    param = surface.arclength_of_x(x)
    radius = surface.geometry.spline(param)[1]
    k_meridian, k_rotation, _ = surface.geometry.quantities(np.array([param]), np.array([radius]))
    return curvature_data([k_meridian[0]] + [k_rotation[0]] * (surface.n - 1))


# --- fixtures -------------------------------------------------------------------------------

def _uniform_angles(count: int) -> np.ndarray:
    return np.linspace(np.pi, 0.0, count)


def sphere_profile(radius: float = 1.0, n: int = 2, center: float = 0.0,
                   spacing: Optional[float] = None) -> ProfileSurface:
    "Round sphere of the given radius centered on the axis"
    count = max(17, int(np.ceil(np.pi * radius / (spacing or radius / 64))) + 1)
    angles = _uniform_angles(count)
    return ProfileSurface(np.column_stack([center + radius * np.cos(angles), radius * np.sin(angles)]),
                          n, "capped")


def ellipsoid_profile(axial: float, radial: float, n: int = 2, count: int = 257) -> ProfileSurface:
    "Ellipsoid of revolution with the given semi-axes"
    angles = np.linspace(np.pi, 0.0, 16 * count)
    dense = np.column_stack([axial * np.cos(angles), radial * np.sin(angles)])
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])
    targets = np.linspace(0.0, arc[-1], count)
    meridian = np.column_stack([np.interp(targets, arc, dense[:, 0]),
                                np.interp(targets, arc, dense[:, 1])])
    return ProfileSurface(meridian, n, "capped")


def cylinder_profile(radius: float, length: float, n: int = 2,
                     spacing: Optional[float] = None) -> ProfileSurface:
    "Round cylinder over one period of the given length"
    count = max(16, int(np.ceil(length / (spacing or radius / 16))))
    xs = np.linspace(0.0, length, count, endpoint=False)
    return ProfileSurface(np.column_stack([xs, np.full(count, radius)]), n, "periodic", length)


def cosine_profile(mean: float = 0.6, amplitude: float = 0.4, n: int = 2,
                   half_width: float = np.pi, count: int = 401) -> ProfileSurface:
    "Open profile u(x) = mean + amplitude cos(x)"
    xs = np.linspace(-half_width, half_width, count)
    return ProfileSurface(np.column_stack([xs, mean + amplitude * np.cos(xs)]), n, "open")


def meridian_from_pieces(pieces, spacing: float) -> np.ndarray:
    "Joins meridian polylines and resamples the result at uniform arclength"
    joined = [pieces[0]]
    for piece in pieces[1:]:
        if np.allclose(joined[-1][-1], piece[0]):
            piece = piece[1:]
        joined.append(piece)
    dense = np.vstack(joined)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense, axis=0), axis=1))])
    count = max(17, int(np.ceil(arc[-1] / spacing)) + 1)
    targets = np.linspace(0.0, arc[-1], count)
    return np.column_stack([np.interp(targets, arc, dense[:, 0]), np.interp(targets, arc, dense[:, 1])])
