"""Contains the abstract `Hypersurface` base class implemented by every carrier of a domain
boundary, and the `SurfaceSamples` record the verifiers consume.

The carriers
------------
Profile surfaces
================
Surfaces of revolution around the x axis, given by a meridian curve in the upper half plane.
Their curvature is known exactly.

Tube surfaces
=============
Tubes of a (possibly varying) radius around a skeleton curve in space, optionally closed off by
standard caps. Their curvature is known exactly as well.

Triangle meshes
===============
Derived carriers, used for embeddedness and topology checks and for file export.

Marble complexes
================
Unions of balls joined by thin strings through rotationally symmetric junctions.
"""
from abc import ABC, abstractmethod
from typing import NamedTuple, Optional, Tuple

import numpy as np


class SurfaceSamples(NamedTuple):
    "Points on a hypersurface together with their outward normals and principal curvatures"

    #: (N, 3) sample points
    points: np.ndarray
    #: (N, 3) outward unit normals
    normals: np.ndarray
    #: (N, n) principal curvatures, every row sorted ascending
    curvatures: np.ndarray
    #: (N,) integer label of the piece each sample belongs to (component, marble, string...)
    labels: Optional[np.ndarray] = None

    @property
    def mean_curvature(self) -> np.ndarray:
        return self.curvatures.sum(axis=1)

    @property
    def two_convex_margin(self) -> np.ndarray:
        return self.curvatures[:, 0] + self.curvatures[:, 1]

    def concatenate(self, other: "SurfaceSamples") -> "SurfaceSamples":
        "Joins two sample sets; labels of `other` are shifted past the labels of `self`"
        own = self.labels if self.labels is not None else np.zeros(len(self.points), dtype=int)
        theirs = other.labels if other.labels is not None else np.zeros(len(other.points), dtype=int)
        offset = int(own.max()) + 1 if len(own) else 0
        width = max(self.curvatures.shape[1], other.curvatures.shape[1])
        return SurfaceSamples(
            np.vstack([self.points, other.points]),
            np.vstack([self.normals, other.normals]),
            np.vstack([_pad(self.curvatures, width), _pad(other.curvatures, width)]),
            np.concatenate([own, theirs + offset]),
        )


def _pad(rows: np.ndarray, width: int) -> np.ndarray:
    if rows.shape[1] == width:
        return rows
    return np.hstack([rows, np.repeat(rows[:, -1:], width - rows.shape[1], axis=1)])


class Hypersurface(ABC):
    "Abstract boundary of a compact domain"

    @property
    @abstractmethod
    def n(self) -> int:
        "Dimension of the hypersurface"

    @abstractmethod
    def sample(self, spacing: Optional[float] = None, angular: int = 32) -> SurfaceSamples:
        """Samples the surface with roughly the given spacing (defaults to 1/64 of the
        feature scale) and the given number of samples around every circle of revolution"""

    @abstractmethod
    def contains(self, points: np.ndarray) -> np.ndarray:
        "Boolean array telling for every point whether it lies in the closed domain"

    @abstractmethod
    def nearest(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """For every point: the distance to the surface, the outward normal at the closest
        surface point and that closest point"""

    @abstractmethod
    def euler_characteristic(self) -> int:
        "Euler characteristic of the boundary, computed from the topology of the carrier"

    @abstractmethod
    def feature_scale(self) -> float:
        "The smallest curvature radius or thickness that discretizations have to resolve"

    @abstractmethod
    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "Hypersurface":
        "Returns the image of this surface under the rigid motion x -> R x + v"

    def translated(self, translation) -> "Hypersurface":
        "Returns a translated copy"
        return self.transformed(np.eye(3), np.asarray(translation, dtype=float))

    def default_spacing(self) -> float:
        return self.feature_scale() / 64
