"""Tubes around skeleton curves.

A tube is the union of the normal disks of radius rho(s) around a skeleton curve gamma. The
radius is given by a radial meridian: a polyline of (s, rho) pairs running with increasing s.
An end where rho drops to zero is capped, an end with positive radius is a free boundary
circle, and on closed skeletons the radial meridian is periodic.

With nu(s, theta) = cos(theta) u1 + sin(theta) u2 in the rotation minimizing frame, the surface
is X(s, theta) = gamma(s) + rho(s) nu(s, theta). Its second fundamental form is evaluated in
closed form from the skeleton curvature vector, its derivative and the radial meridian.
"""
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..error import InputError, SingularityError
from .abstract import Hypersurface, SurfaceSamples
from .curvature import CurvatureData, curvature_data
from .curves import SkeletonCurve, circle_curve
from .profiles import MeridianGeometry


class TubeSurface(Hypersurface):
    """A tube of varying radius around a skeleton curve

    Args:
        skeleton:
            The core curve
        radial:
            (M, 2) array of (arclength, radius) pairs, increasing in arclength. A constant
            radius may be passed as a float instead.
        n:
            Dimension; the cross section curvature is repeated n-1 times
    """

    def __init__(self, skeleton: SkeletonCurve, radial, n: int = 2):
        self.skeleton = skeleton
        self._n = int(n)
        if np.isscalar(radial):
            radial = constant_radial(skeleton, float(radial))
        radial = np.array(radial, dtype=float)
        if radial.ndim != 2 or radial.shape[1] != 2 or len(radial) < 5:
            raise InputError("A radial profile needs at least five (s, radius) pairs")
        if skeleton.closed:
            self.ends = ("periodic", "periodic")
        else:
            self.ends = tuple("axis" if radial[index, 1] <= 1e-12 else "free" for index in (0, -1))
            if radial[0, 0] < -1e-9 or radial[-1, 0] > skeleton.total_length * (1 + 1e-9):
                raise InputError("Radial profile exceeds the skeleton", witness=radial[[0, -1], 0].tolist())
        interior = radial[1:-1, 1] if not skeleton.closed else radial[:, 1]
        if np.any(interior <= 0):
            raise InputError("Tube radius has to be positive", witness=int(np.argmin(interior)))
        radial.setflags(write=False)
        self.radial = radial

    def __repr__(self) -> str:
        return (f"TubeSurface({self.skeleton!r}, radius in [{self.radial[:, 1].min():.4g}, "
                f"{self.radial[:, 1].max():.4g}], ends {self.ends})")

    @property
    def n(self) -> int:
        return self._n

    @property
    def closed(self) -> bool:
        return self.skeleton.closed

    @property
    def capped(self) -> Tuple[bool, bool]:
        return tuple(end == "axis" for end in self.ends)

    @cached_property
    def geometry(self) -> MeridianGeometry:
        period = self.skeleton.total_length if self.closed else None
        return MeridianGeometry(self.radial, self.ends, period)

    def radius_at(self, s) -> np.ndarray:
        "Radius at skeleton arclength s; zero beyond capped ends"
        s = np.asarray(s, dtype=float)
        if self.closed:
            s = np.mod(s, self.skeleton.total_length)
            knots = np.vstack([self.radial, self.radial[:1] + [self.skeleton.total_length, 0.0]])
            return np.interp(s, knots[:, 0], knots[:, 1])
        return np.interp(s, self.radial[:, 0], self.radial[:, 1], left=0.0, right=0.0)

    def max_radius(self) -> float:
        return float(self.radial[:, 1].max())

    # --- curvature ------------------------------------------------------------------------

    def _skeleton_terms(self, s: np.ndarray):
        "Tangent, curvature vector, its derivative and frame at arclength values"
        curve = self.skeleton
        step = 1e-3 * curve.h_s
        if not self.closed:
            s = np.clip(s, step, curve.total_length - step)
        tangents = curve.tangent_at(s)
        kappa = curve.curvature_vector_at(s)
        kappa_prime = (curve.curvature_vector_at(s + step) - curve.curvature_vector_at(s - step)) / (2 * step)
        unique, inverse = np.unique(np.atleast_1d(s), return_inverse=True)
        frames = curve.frames_at(unique)[inverse]
        return tangents, kappa, kappa_prime, frames

    def evaluate(self, params: np.ndarray, angles: np.ndarray):
        """Points, outward normals and sorted principal curvature rows at radial meridian
        parameters and angles (arrays of equal length)"""
        geometry = self.geometry
        span = geometry.params[-1] - geometry.params[0]
        radial_point = geometry.spline(params)
        s, rho = radial_point[:, 0], np.maximum(radial_point[:, 1], 0.0)
        on_axis = rho <= 1e-9 * span
        # curvature at a pole is the limit from the inside
        inward = np.where(params < geometry.params[0] + span / 2, 1.0, -1.0)
        curvature_params = np.where(on_axis, params + inward * 1e-6 * span, params)
        first = geometry.spline(curvature_params, 1)
        second = geometry.spline(curvature_params, 2)
        speed = np.linalg.norm(first, axis=1)
        direction = first / speed[:, None]
        bend = (second - np.sum(second * direction, axis=1)[:, None] * direction) / speed[:, None] ** 2
        a, c = direction[:, 0], direction[:, 1]
        a_prime, c_prime = bend[:, 0], bend[:, 1]
        rho_c = np.maximum(geometry.spline(curvature_params)[:, 1], 1e-300)

        tangents, kappa, kappa_prime, frames = self._skeleton_terms(s)
        cos, sin = np.cos(angles)[:, None], np.sin(angles)[:, None]
        nu = cos * frames[:, 0] + sin * frames[:, 1]
        w = -sin * frames[:, 0] + cos * frames[:, 1]
        k_nu = np.sum(kappa * nu, axis=1)
        k_w = np.sum(kappa * w, axis=1)
        k_nu_prime = np.sum(kappa_prime * nu, axis=1)

        stretch = 1 - rho_c * k_nu
        if np.any(stretch <= 0):
            index = int(np.argmin(stretch))
            raise SingularityError("Tube radius reaches the curvature radius of the skeleton",
                                   witness=float(s[index]))
        norm = np.sqrt(a ** 2 * stretch ** 2 + c ** 2)
        t_coefficient = a_prime * stretch - 2 * a * c * k_nu - rho_c * a ** 2 * k_nu_prime
        second_ss = (-c * t_coefficient + a ** 3 * stretch ** 2 * k_nu + a * c_prime * stretch) / norm
        second_st = a * rho_c * c * k_w / norm
        w11 = second_ss / norm ** 2
        w12 = second_st / (norm * rho_c)
        w22 = -a * stretch / (rho_c * norm)
        mean = (w11 + w22) / 2
        spread = np.sqrt(((w11 - w22) / 2) ** 2 + w12 ** 2)
        columns = [-(mean + spread), -(mean - spread)] + [-w22] * (self.n - 2)
        rows = np.sort(np.column_stack(columns), axis=1)

        points = self.skeleton.point_at(s) + rho[:, None] * nu
        exact_stretch = 1 - rho * k_nu
        normals = (a[:, None] * exact_stretch[:, None] * nu - c[:, None] * tangents)
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        return points, normals, rows

    def curvature_at(self, s: float, angle: float) -> CurvatureData:
        "Principal curvatures at skeleton arclength s and angle theta"
        param = self._param_of_s(s)
        _, _, rows = self.evaluate(np.array([param]), np.array([angle]))
        return curvature_data(rows[0])

    def _param_of_s(self, s: float) -> float:
        geometry = self.geometry
        if self.closed:
            s = float(np.mod(s, self.skeleton.total_length))
        return float(np.interp(s, self.radial[:, 0], geometry.params))

    # --- Hypersurface ---------------------------------------------------------------------

    def sample(self, spacing: Optional[float] = None, angular: int = 32) -> SurfaceSamples:
        spacing = spacing or self.default_spacing()
        geometry = self.geometry
        start, end = geometry.params[0], geometry.params[-1]
        if self.closed:
            end += np.linalg.norm(self.radial[0] + [self.skeleton.total_length, 0.0] - self.radial[-1])
        count = max(8, int(np.ceil((end - start) / spacing)) + 1)
        params = np.linspace(start, end, count)
        if self.closed:
            params = params[:-1]
        rho = geometry.spline(params)[:, 1]
        on_axis = (rho <= 1e-9 * (end - start)) & (not self.closed)
        angles = np.linspace(0.0, 2 * np.pi, angular, endpoint=False)
        repeat = np.where(on_axis, 1, angular)
        flat_params = np.repeat(params, repeat)
        flat_angles = np.concatenate([angles[:number] for number in repeat])
        points, normals, rows = self.evaluate(flat_params, flat_angles)
        return SurfaceSamples(points, normals, rows, np.zeros(len(points), dtype=int))

    def nearest(self, points: np.ndarray):
        points = np.atleast_2d(points)
        s = self._foot_arclength(points)
        centers = self.skeleton.point_at(s)
        offset = points - centers
        length = np.linalg.norm(offset, axis=1)
        directions = np.where(length[:, None] > 0, offset / np.maximum(length, 1e-300)[:, None],
                              self.skeleton.frame_at(0.0)[0])
        radius = self.radius_at(s)
        return np.abs(length - radius), directions, centers + radius[:, None] * directions

    def _foot_arclength(self, points: np.ndarray) -> np.ndarray:
        "Arclength of the skeleton point closest to every point, by two Newton steps"
        curve = self.skeleton
        _, index = cKDTree(curve.samples).query(points)
        offset = points - curve.samples[index]
        s = curve.arclength[index] + np.sum(offset * curve.tangents[index], axis=1)
        for _ in range(2):
            if not self.closed:
                s = np.clip(s, 0.0, curve.total_length)
            offset = points - curve.point_at(s)
            bend = 1 - np.sum(offset * curve.curvature_vector_at(s), axis=1)
            s = s + np.sum(offset * curve.tangent_at(s), axis=1) / np.maximum(bend, 0.1)
        if not self.closed:
            s = np.clip(s, 0.0, curve.total_length)
        return s

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        curve = self.skeleton
        s = self._foot_arclength(points)
        centers = curve.point_at(s)
        along = np.abs(np.sum((points - centers) * curve.tangent_at(s), axis=1))
        distance = np.linalg.norm(points - centers, axis=1)
        return (distance <= self.radius_at(s) + tol) & (along <= tol + 1e-3 * curve.h_s)

    def euler_characteristic(self) -> int:
        if self.closed:
            return 0
        return sum(end == "axis" for end in self.ends)

    def feature_scale(self) -> float:
        rho = self.radial[:, 1]
        thickness = rho[rho > 0].min()
        curvature = self.skeleton.curvatures().max()
        return float(min(thickness, 1 / curvature if curvature > 0 else np.inf))

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "TubeSurface":
        return TubeSurface(self.skeleton.transformed(rotation, translation), self.radial, self.n)

    def with_radial(self, radial) -> "TubeSurface":
        return TubeSurface(self.skeleton, radial, self.n)

    def clearance(self) -> Tuple[float, object]:
        """Smallest gap between cross sections that are far apart along the skeleton,
        together with the pair of skeleton samples attaining it"""
        curve = self.skeleton
        rho = self.radius_at(curve.arclength)
        largest = float(rho.max())
        pairs = cKDTree(curve.samples).query_pairs(2 * largest + 2 * curve.h_s, output_type="ndarray")
        if len(pairs):
            separation = curve.index_distance(pairs[:, 0], pairs[:, 1]) * curve.h_s
            pairs = pairs[separation > np.pi * max(largest, curve.h_s) + 2 * largest]
        if len(pairs) == 0:
            return np.inf, None
        gaps = (np.linalg.norm(curve.samples[pairs[:, 0]] - curve.samples[pairs[:, 1]], axis=1)
                - rho[pairs[:, 0]] - rho[pairs[:, 1]])
        worst = int(np.argmin(gaps))
        return float(gaps[worst]), pairs[worst].tolist()

    def to_dict(self) -> dict:
        return {"kind": "tube", "n": self.n, "skeleton": self.skeleton.to_dict(),
                "radial": self.radial.tolist()}


def constant_radial(skeleton: SkeletonCurve, radius: float) -> np.ndarray:
    "Radial profile of constant radius over the whole skeleton"
    s = np.array(skeleton.arclength)
    return np.column_stack([s, np.full(len(s), radius)])


def principal_curvatures_tube(tube: TubeSurface, s: float, angle: float) -> CurvatureData:
    """Principal curvatures of a constant radius section of a tube

    One principal curvature is 1/r. With k = <kappa(s), nu(theta)> the other one is
    -k/(1 - r k); theta = 0 is the outward direction, where it equals
    |kappa| cos(theta)/(1 + r |kappa| cos(theta)) on planar skeletons.

    Raises:
        SingularityError: r |kappa| >= 1
        InputError: the radius is not constant around s
    """
    curve = tube.skeleton
    radius = float(tube.radius_at(s))
    window = np.linspace(s - 2 * curve.h_s, s + 2 * curve.h_s, 5)
    if not tube.closed:
        window = np.clip(window, 0.0, curve.total_length)
    if radius <= 0 or np.ptp(tube.radius_at(window)) > 1e-9 * radius:
        raise InputError("The tube radius is not constant around the queried section", witness=s)
    kappa = curve.curvature_vector_at(s)
    if radius * np.linalg.norm(kappa) >= 1:
        raise SingularityError("Tube radius reaches the curvature radius of the skeleton", witness=s)
    u1, u2 = curve.frame_at(s)
    k_nu = float(np.dot(kappa, np.cos(angle) * u1 + np.sin(angle) * u2))
    return curvature_data([-k_nu / (1 - radius * k_nu)] + [1 / radius] * (tube.n - 1))


def round_torus(big_radius: float, small_radius: float, n: int = 2,
                h_s: Optional[float] = None) -> TubeSurface:
    "Tube of constant radius around a round circle in the xy plane"
    if small_radius >= big_radius:
        raise SingularityError("Tube radius reaches the curvature radius of the skeleton",
                               witness=small_radius)
    curve = circle_curve(big_radius, count=128, h_s=h_s or min(big_radius / 64, small_radius / 2))
    return TubeSurface(curve, small_radius, n)
