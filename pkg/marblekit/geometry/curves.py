"""Skeleton curves: arclength sampled curves in space with rotation minimizing frames.

Curves are resampled at uniform arclength with a cubic spline, which also provides the
curvature vector. The normal frame is rotation minimizing; its first vector starts out as the
outward direction -kappa/|kappa| at s = 0. On closed curves the holonomy of the frame is
distributed evenly along the curve, so that the frame closes up.
"""
from logging import debug
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from ..error import InputError, EmbeddingError, NumericalError
from .vectors import normalize, any_perpendicular

#: Upper bound of the number of samples a default resampling produces
MAX_SAMPLES = 1024


class SkeletonCurve:
    """A curve sampled at uniform arclength spacing `h_s`, with tangents and normal frames

    Instances are immutable. Use :py:func:`curve_from_points` to build one."""

    def __init__(self, samples: np.ndarray, closed: bool):
        samples = np.array(samples, dtype=float)
        samples.setflags(write=False)
        self.samples = samples
        self.closed = bool(closed)
        count = len(samples)
        segments = count if closed else count - 1
        knots = np.vstack([samples, samples[:1]]) if closed else samples
        self._spacing = np.linalg.norm(np.diff(knots, axis=0), axis=1)
        self.total_length = float(self._spacing.sum())
        self.h_s = self.total_length / segments
        self.arclength = np.concatenate([[0.0], np.cumsum(self._spacing)])[:count]
        if closed:
            self._spline = CubicSpline(np.append(self.arclength, self.total_length), knots,
                                       bc_type="periodic")
        else:
            self._spline = CubicSpline(self.arclength, samples, bc_type="natural")
        first = self._spline(self.arclength, 1)
        second = self._spline(self.arclength, 2)
        self.tangents = normalize(first)
        speed = np.linalg.norm(first, axis=1, keepdims=True)
        along = np.sum(second * self.tangents, axis=1, keepdims=True) * self.tangents
        self._kappa = (second - along) / speed ** 2
        self._frames = self._rotation_minimizing_frames()

    def __len__(self) -> int:
        return len(self.samples)

    def __repr__(self) -> str:
        kind = "closed" if self.closed else "open"
        return f"SkeletonCurve({kind}, {len(self)} samples, length {self.total_length:.4g})"

    # --- frames -------------------------------------------------------------------------

    def _rotation_minimizing_frames(self) -> np.ndarray:
        "Double reflection frames; returns an (N, 2, 3) array of (u1, u2)"
        count = len(self.samples)
        frames = np.zeros((count, 2, 3))
        norm0 = np.linalg.norm(self._kappa[0])
        start = -self._kappa[0] / norm0 if norm0 > 1e-9 else any_perpendicular(self.tangents[0])
        start -= np.dot(start, self.tangents[0]) * self.tangents[0]
        frames[0, 0] = start / np.linalg.norm(start)
        frames[0, 1] = np.cross(self.tangents[0], frames[0, 0])
        indices = list(range(count)) + ([0] if self.closed else [])
        closing = None
        for previous, current in zip(indices, indices[1:]):
            u1 = self._reflect_frame(previous, current, frames[previous, 0])
            if current == 0:
                closing = u1
                break
            frames[current, 0] = u1
            frames[current, 1] = np.cross(self.tangents[current], u1)
        if closing is not None:
            # angle from the start frame to the transported frame
            holonomy = np.arctan2(np.dot(closing, frames[0, 1]), np.dot(closing, frames[0, 0]))
            angles = -holonomy * self.arclength[1:] / self.total_length
            frames[1:] = _rotate_about(frames[1:], self.tangents[1:], angles)
        frames.setflags(write=False)
        return frames

    def _reflect_frame(self, previous: int, current: int, u1: np.ndarray) -> np.ndarray:
        step = self.samples[current] - self.samples[previous]
        c1 = np.dot(step, step)
        if c1 < 1e-30:
            return u1
        u1_l = u1 - 2 / c1 * np.dot(step, u1) * step
        t_l = self.tangents[previous] - 2 / c1 * np.dot(step, self.tangents[previous]) * step
        v2 = self.tangents[current] - t_l
        c2 = np.dot(v2, v2)
        if c2 < 1e-30:
            result = u1_l
        else:
            result = u1_l - 2 / c2 * np.dot(v2, u1_l) * v2
        result -= np.dot(result, self.tangents[current]) * self.tangents[current]
        return result / np.linalg.norm(result)

    @property
    def frames(self) -> np.ndarray:
        "(N, 2, 3) array of normal frames (u1, u2); (tangent, u1, u2) is positively oriented"
        return self._frames

    # --- evaluation -----------------------------------------------------------------------

    def _wrap(self, s):
        s = np.asarray(s, dtype=float)
        if self.closed:
            return np.mod(s, self.total_length)
        if np.any(s < -1e-9 * self.total_length) or np.any(s > self.total_length * (1 + 1e-9)):
            raise InputError(f"Arclength outside [0, {self.total_length}]", witness=s.tolist())
        return np.clip(s, 0.0, self.total_length)

    def point_at(self, s) -> np.ndarray:
        "Position at arclength s"
        return self._spline(self._wrap(s))

    def tangent_at(self, s) -> np.ndarray:
        return normalize(self._spline(self._wrap(s), 1))

    def curvature_vector_at(self, s) -> np.ndarray:
        s = self._wrap(s)
        first = self._spline(s, 1)
        second = self._spline(s, 2)
        tangent = normalize(first)
        speed2 = np.sum(first * first, axis=-1)[..., None]
        return (second - np.sum(second * tangent, axis=-1)[..., None] * tangent) / speed2

    def frames_at(self, s) -> np.ndarray:
        "(M, 2, 3) normal frames at arclength values, interpolated from the sample frames"
        s = np.atleast_1d(self._wrap(s))
        count = len(self)
        index = np.clip(np.searchsorted(self.arclength, s, side="right") - 1, 0, count - 1)
        following = (index + 1) % count if self.closed else np.minimum(index + 1, count - 1)
        weight = np.where(following == index, 0.0, (s - self.arclength[index]) / self.h_s)[:, None]
        tangent = self.tangent_at(s)
        u1 = (1 - weight) * self._frames[index, 0] + weight * self._frames[following, 0]
        u1 -= np.sum(u1 * tangent, axis=1)[:, None] * tangent
        u1 /= np.linalg.norm(u1, axis=1)[:, None]
        return np.stack([u1, np.cross(tangent, u1)], axis=1)

    def frame_at(self, s: float) -> np.ndarray:
        "Normal frame at arclength s"
        return self.frames_at(float(s))[0]

    def curvature_vectors(self) -> np.ndarray:
        "(N, 3) curvature vectors at the samples"
        return self._kappa

    def curvatures(self) -> np.ndarray:
        "(N,) curvature norms at the samples"
        return np.linalg.norm(self._kappa, axis=1)

    def curvature_derivative(self) -> np.ndarray:
        "(N,) norms of the arclength derivative of the curvature vector, by central differences"
        if self.closed:
            diff = (np.roll(self._kappa, -1, axis=0) - np.roll(self._kappa, 1, axis=0)) / (2 * self.h_s)
        else:
            diff = np.gradient(self._kappa, self.arclength, axis=0)
        return np.linalg.norm(diff, axis=1)

    def index_distance(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        "Number of samples between indices along the curve (cyclic for closed curves)"
        delta = np.abs(np.asarray(i) - np.asarray(j))
        if self.closed:
            delta = np.minimum(delta, len(self) - delta)
        return delta

    def normal_injectivity_radius(self) -> float:
        """Largest radius up to which the normal exponential map is injective

        The local bound is the smallest curvature radius; the global bound is half the
        smallest distance between two samples that are farther apart along the curve than
        half a turn of that radius."""
        kappa_max = float(self.curvatures().max())
        local = 1 / kappa_max if kappa_max > 1e-12 else np.inf
        reach = min(2 * local, self.total_length) if np.isfinite(local) else self.total_length
        tree = cKDTree(self.samples)
        pairs = tree.query_pairs(reach, output_type="ndarray")
        if len(pairs) == 0:
            return local
        separation = self.index_distance(pairs[:, 0], pairs[:, 1]) * self.h_s
        limit = np.pi * local if np.isfinite(local) else 0.0
        far = pairs[separation > max(limit, 4 * self.h_s)]
        if len(far) == 0:
            return local
        gaps = np.linalg.norm(self.samples[far[:, 0]] - self.samples[far[:, 1]], axis=1)
        return float(min(local, gaps.min() / 2))

    # --- derived curves -------------------------------------------------------------------

    def resample(self, h_s: float) -> "SkeletonCurve":
        "Resamples at a new spacing"
        return curve_from_points(self.samples, self.closed, h_s)

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "SkeletonCurve":
        return SkeletonCurve(self.samples @ np.asarray(rotation).T + translation, self.closed)

    def reversed(self) -> "SkeletonCurve":
        return SkeletonCurve(self.samples[::-1], self.closed)

    def sub_curve(self, s_from: float, s_to: float, h_s: Optional[float] = None) -> "SkeletonCurve":
        "The open piece between two arclength values (wrapping around on closed curves)"
        if self.closed and s_to < s_from:
            s_to += self.total_length
        h_s = h_s or self.h_s
        count = max(4, int(round((s_to - s_from) / h_s)) + 1)
        return SkeletonCurve(self.point_at(np.linspace(s_from, s_to, count)), False)

    def to_dict(self) -> dict:
        return {"closed": self.closed, "points": self.samples.tolist()}


def _rotate_about(vectors: np.ndarray, axes: np.ndarray, angles: np.ndarray) -> np.ndarray:
    "Rotates the (N, K, 3) vectors about the (N, 3) unit axes by the (N,) angles (Rodrigues)"
    axes = axes[:, None, :]
    cos, sin = np.cos(angles)[:, None, None], np.sin(angles)[:, None, None]
    along = np.sum(axes * vectors, axis=2, keepdims=True)
    return vectors * cos + np.cross(axes, vectors) * sin + axes * along * (1 - cos)


def _segment_distances(
a0, a1, b0, b1) -> np.ndarray:
    "Vectorized distance between segments [a0, a1] and [b0, b1], sampled at 9 parameters"
    params = np.linspace(0.0, 1.0, 9)
    points_a = a0[:, None, :] + params[None, :, None] * (a1 - a0)[:, None, :]
    points_b = b0[:, None, :] + params[None, :, None] * (b1 - b0)[:, None, :]
    diff = points_a[:, :, None, :] - points_b[:, None, :, :]
    return np.linalg.norm(diff, axis=3).reshape(len(a0), -1).min(axis=1)


def check_polyline_embedded(points: np.ndarray, closed: bool):
    "Raises EmbeddingError if two non-adjacent segments of the polyline touch"
    knots = np.vstack([points, points[:1]]) if closed else points
    starts, ends = knots[:-1], knots[1:]
    lengths = np.linalg.norm(ends - starts, axis=1)
    if np.any(lengths <= 0):
        raise EmbeddingError("Polyline has repeated points", witness=int(np.argmin(lengths)))
    mids = (starts + ends) / 2
    pairs = cKDTree(mids).query_pairs(lengths.max() * 1.01, output_type="ndarray")
    if len(pairs) == 0:
        return
    count = len(starts)
    gap = np.abs(pairs[:, 0] - pairs[:, 1])
    if closed:
        gap = np.minimum(gap, count - gap)
    pairs = pairs[gap > 1]
    if len(pairs) == 0:
        return
    dist = _segment_distances(starts[pairs[:, 0]], ends[pairs[:, 0]],
                              starts[pairs[:, 1]], ends[pairs[:, 1]])
    bad = dist < 1e-3 * np.minimum(lengths[pairs[:, 0]], lengths[pairs[:, 1]])
    if np.any(bad):
        pair = pairs[np.argmax(bad)]
        raise EmbeddingError("Polyline intersects itself", witness=pair.tolist())


def curve_from_points(points: Sequence[Sequence[float]], closed: bool,
                      h_s: Optional[float] = None) -> SkeletonCurve:
    """Builds an arclength resampled curve with frames from a polyline

    Args:
        points:
            At least four points in R^3
        closed:
            Whether the last point connects back to the first one
        h_s:
            Target spacing. Defaults to 1/64 of the smallest curvature radius or of the length.
    Raises:
        InputError: too few points
        EmbeddingError: the polyline or the resampled curve is not embedded
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) < 4:
        raise InputError("At least four points are needed for a curve", witness=len(points))
    if points.shape[1] == 2:
        points = np.hstack([points, np.zeros((len(points), 1))])
    if closed and np.allclose(points[0], points[-1]):
        points = points[:-1]
    check_polyline_embedded(points, closed)
    knots = np.vstack([points, points[:1]]) if closed else points
    chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(knots, axis=0), axis=1))])
    spline = CubicSpline(chord, knots, bc_type="periodic" if closed else "natural")
    dense = np.linspace(0.0, chord[-1], 16 * len(knots) + 1)
    dense_points = spline(dense)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(dense_points, axis=0), axis=1))])
    length = arc[-1]
    if h_s is None:
        first = spline(dense, 1)
        second = spline(dense, 2)
        cross = np.linalg.norm(np.cross(first, second), axis=1)
        kappa = cross / np.maximum(np.linalg.norm(first, axis=1) ** 3, 1e-300)
        radius = 1 / kappa.max() if kappa.max() > 1e-12 else np.inf
        h_s = max(min(length / 64, radius / 64), length / MAX_SAMPLES)
    segments = max(3, int(round(length / h_s)))
    targets = np.linspace(0.0, length, segments + 1)
    if closed:
        targets = targets[:-1]
    params = np.interp(targets, arc, dense)
    curve = SkeletonCurve(spline(params), closed)
    _check_curve_invariants(curve)
    debug(f"Built {curve!r} with spacing {curve.h_s:.4g}")
    return curve


def _check_curve_invariants(curve: SkeletonCurve):
    spacing = curve._spacing
    if np.any(np.abs(spacing - curve.h_s) > 0.01 * curve.h_s):
        raise NumericalError("Resampled spacing deviates by more than 1%",
                             witness=int(np.argmax(np.abs(spacing - curve.h_s))))
    turn = np.sum(curve.tangents[1:] * curve.tangents[:-1], axis=1)
    if np.any(turn < np.cos(np.pi / 4)):
        raise NumericalError("Curvature not resolved at this spacing",
                             witness=int(np.argmin(turn)))
    pairs = cKDTree(curve.samples).query_pairs(2 * curve.h_s * 0.999, output_type="ndarray")
    if len(pairs):
        far = pairs[curve.index_distance(pairs[:, 0], pairs[:, 1]) > 2]
        if len(far):
            raise EmbeddingError("Curve samples come closer than twice the spacing",
                                 witness=far[0].tolist())


def curve_from_function(function, t_from: float, t_to: float, closed: bool,
                        count: int = 256, h_s: Optional[float] = None) -> SkeletonCurve:
    "Samples a parameterized curve t -> (x, y, z) and builds a SkeletonCurve from it"
    params = np.linspace(t_from, t_to, count, endpoint=not closed)
    return curve_from_points(np.array([function(t) for t in params]), closed, h_s)


def circle_curve(radius: float = 1.0, center=(0.0, 0.0, 0.0), count: int = 64,
                 h_s: Optional[float] = None) -> SkeletonCurve:
    "A circle in the plane z = center_z"
    center = np.asarray(center, dtype=float)
    return curve_from_function(
        lambda t: center + radius * np.array([np.cos(t), np.sin(t), 0.0]),
        0.0, 2 * np.pi, True, count, h_s)


def ellipse_curve(a: float, b: float, count: int = 128, h_s: Optional[float] = None) -> SkeletonCurve:
    return curve_from_function(lambda t: np.array([a * np.cos(t), b * np.sin(t), 0.0]),
                               0.0, 2 * np.pi, True, count, h_s)


def segment_curve(start, end, count: int = 32, h_s: Optional[float] = None) -> SkeletonCurve:
    "A straight open curve"
    start, end = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    return curve_from_function(lambda t: start + t * (end - start), 0.0, 1.0, False, count, h_s)


def arc_curve(radius: float, angle: float, count: int = 64, h_s: Optional[float] = None) -> SkeletonCurve:
    "An open circular arc starting at (radius, 0, 0)"
    return curve_from_function(lambda t: radius * np.array([np.cos(t), np.sin(t), 0.0]),
                               0.0, angle, False, count, h_s)


def torus_knot_curve(p: int = 2, q: int = 3, big_radius: float = 2.0, small_radius: float = 0.5,
                     count: int = 256, h_s: Optional[float] = None) -> SkeletonCurve:
    "The (p, q) torus knot winding p times around the z axis and q times around the core circle"
    def knot(t):
        radius = big_radius + small_radius * np.cos(q * t)
        return np.array([radius * np.cos(p * t), radius * np.sin(p * t), small_radius * np.sin(q * t)])
    return curve_from_function(knot, 0.0, 2 * np.pi, True, count, h_s)


def figure_eight_curve(count: int = 256, h_s: Optional[float] = None) -> SkeletonCurve:
    "A figure-eight knot whose projection to the xy plane has four crossings"
    def knot(t):
        radius = 2 + np.cos(2 * t)
        return np.array([radius * np.cos(3 * t), radius * np.sin(3 * t), np.sin(4 * t)])
    return curve_from_function(knot, 0.0, 2 * np.pi, True, count, h_s)


def _open_at_extreme(points: np.ndarray, sign: float, cut: int) -> np.ndarray:
    "Removes the samples around the point extreme in direction sign*x, starting right after it"
    index = int(np.argmax(sign * points[:, 0]))
    rolled = np.roll(points, -index, axis=0)
    return rolled[cut:len(rolled) - cut + 1]


def connected_sum_curve(first: SkeletonCurve, second: SkeletonCurve, gap: float = 0.6,
                        cut_length: float = 0.3, h_s: Optional[float] = None) -> SkeletonCurve:
    """Connected sum of two closed curves

    The first curve is moved into the half space x < -gap/2, the second one into x > gap/2.
    Both are opened around their point closest to the plane x = 0 and the loose ends are
    joined by two bridges across the gap."""
    left = np.array(first.samples)
    left[:, 0] -= left[:, 0].max() + gap / 2
    right = np.array(second.samples)
    right[:, 0] -= right[:, 0].min() - gap / 2
    left_piece = _open_at_extreme(left, 1.0, max(2, int(round(cut_length / first.h_s))))
    right_piece = _open_at_extreme(right, -1.0, max(2, int(round(cut_length / second.h_s))))
    return curve_from_points(np.vstack([left_piece, right_piece]), True,
                             h_s or min(first.h_s, second.h_s))


def mirror_curve(curve: SkeletonCurve) -> SkeletonCurve:
    "Reflection in the plane z = 0"
    points = np.array(curve.samples)
    points[:, 2] *= -1
    return SkeletonCurve(points, curve.closed)
