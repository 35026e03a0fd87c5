"""Marble complexes: round balls joined by strings.

Every string is a tube around a skeleton that is extended straight to the centers of the
marbles it connects. Its radial profile starts at the hole it cuts into the first marble, runs
through a junction onto the string radius and through a second junction into the other marble.
A string end that touches no marble is closed off by the standard cap."""
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..configuration import Tolerances
from ..error import InputError
from ..geometry.abstract import Hypersurface, SurfaceSamples
from ..geometry.curves import curve_from_points
from ..geometry.meshing import MeshBuilder, sphere_with_holes, tube_rings
from ..geometry.tubes import TubeSurface
from ..geometry.vectors import normalize
from ..verify.certificate import CertificateReport, make_report, merge_reports
from ..verify.placement import check_embedded
from .graph import Edge, MarbleGraph
from .junction import Junction

#: Marble samples per unit of squared radius
MARBLE_DENSITY = 4096


class Marble(NamedTuple):
    "A round ball"
    center: np.ndarray
    radius: float

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "Marble":
        return Marble(rotation @ self.center + translation, self.radius)

    def distance(self, points: np.ndarray) -> np.ndarray:
        "Signed distance from the sphere, negative inside"
        return np.linalg.norm(np.atleast_2d(points) - self.center, axis=1) - self.radius


class GluedString(NamedTuple):
    "A string of a marble complex"

    #: The tube; its skeleton runs from marble center to marble center
    tube: TubeSurface
    #: Marble indices at the start and at the end of the skeleton; None marks a capped end
    ends: Tuple[Optional[int], Optional[int]]
    #: String radius
    radius: float
    #: Junctions at the start and at the end of the skeleton
    junctions: Tuple[Optional[Junction], Optional[Junction]]

    @property
    def skeleton(self):
        return self.tube.skeleton

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "GluedString":
        junctions = tuple(None if junction is None else junction._replace(
            center=rotation @ junction.center + translation, axis=rotation @ junction.axis)
            for junction in self.junctions)
        return GluedString(self.tube.transformed(rotation, translation), self.ends, self.radius,
                           junctions)


class MarbleComplex(Hypersurface):
    """The boundary of a union of marbles and strings

    Args:
        marbles: the balls
        strings: the strings with their junctions
        n: dimension of the boundary
    """

    def __init__(self, marbles: Sequence[Marble], strings: Sequence[GluedString], n: int = 2):
        self.marbles = list(marbles)
        self.strings = list(strings)
        self._n = n
        for string in self.strings:
            for end in string.ends:
                if end is not None and not 0 <= end < len(self.marbles):
                    raise InputError("String attached to an unknown marble", witness=end)

    def __repr__(self) -> str:
        return f"MarbleComplex({len(self.marbles)} marbles, {len(self.strings)} strings)"

    @property
    def n(self) -> int:
        return self._n

    # --- combinatorics --------------------------------------------------------------------

    def graph(self) -> MarbleGraph:
        """The marble-string multigraph; loose string ends are additional vertices numbered
        after the marbles"""
        edges = []
        count = len(self.marbles)
        for string in self.strings:
            ends = []
            for end in string.ends:
                if end is None:
                    end, count = count, count + 1
                ends.append(end)
            edges.append(Edge(ends[0], ends[1], string.skeleton.total_length))
        return MarbleGraph(count, edges)

    def holes(self, marble: int) -> List[Tuple[Junction, int, int]]:
        "Junctions cutting holes into a marble, with their string index and end (0 or 1)"
        return [(string.junctions[end], index, end)
                for index, string in enumerate(self.strings)
                for end in (0, 1) if string.ends[end] == marble]

    def cycle(self) -> Optional[List[Tuple[int, int, bool]]]:
        """A shortest marble/string cycle as list of (marble, string, forward) triples, where
        `forward` tells whether the string skeleton leaves the marble at its start"""
        cycle = self.graph().shortest_cycle()
        if cycle is None:
            return None
        return [(vertex, index, self.strings[index].ends[0] == vertex) for vertex, index in cycle]

    # --- Hypersurface ---------------------------------------------------------------------

    def _marble_samples(self, index: int, spacing: Optional[float]) -> SurfaceSamples:
        marble = self.marbles[index]
        if spacing:
            count = int(np.ceil(4 * np.pi * marble.radius ** 2 / spacing ** 2))
        else:
            count = MARBLE_DENSITY
        count = max(count, 64)
        golden = np.pi * (3 - np.sqrt(5))
        k = np.arange(count)
        z = 1 - 2 * (k + 0.5) / count
        ring = np.sqrt(1 - z * z)
        directions = np.column_stack([ring * np.cos(golden * k), ring * np.sin(golden * k), z])
        keep = np.ones(count, dtype=bool)
        for junction, _, _ in self.holes(index):
            keep &= directions @ junction.axis < np.cos(junction.start_angle)
        directions = directions[keep]
        rows = np.full((len(directions), self.n), 1 / marble.radius)
        return SurfaceSamples(marble.center + marble.radius * directions, directions, rows,
                              np.full(len(directions), index))

    def sample(self, spacing: Optional[float] = None, angular: int = 32) -> SurfaceSamples:
        """Samples the marbles and strings; without `spacing`, every string is sampled at half
        its radius and every marble with a fixed number of points"""
        samples = None
        for index in range(len(self.marbles)):
            piece = self._marble_samples(index, spacing)
            samples = piece if samples is None else _append(samples, piece, index)
        for number, string in enumerate(self.strings):
            piece = string.tube.sample(spacing or string.radius / 2, angular)
            label = len(self.marbles) + number
            samples = piece._replace(labels=np.full(len(piece.points), label)) if samples is None \
                else _append(samples, piece, label)
        return samples

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(points)
        inside = np.zeros(len(points), dtype=bool)
        for marble in self.marbles:
            inside |= marble.distance(points) <= tol
        for string in self.strings:
            inside |= string.tube.contains(points, tol)
        return inside

    def nearest(self, points: np.ndarray):
        points = np.atleast_2d(points)
        best = None
        for marble in self.marbles:
            offset = points - marble.center
            directions = normalize(offset)
            candidate = (np.abs(marble.distance(points)), directions,
                         marble.center + marble.radius * directions)
            best = candidate if best is None else _closer(best, candidate)
        for string in self.strings:
            candidate = string.tube.nearest(points)
            best = candidate if best is None else _closer(best, candidate)
        return best

    def euler_characteristic(self) -> int:
        graph = self.graph()
        return 2 * (len(graph.components()) - graph.cycle_rank())

    def feature_scale(self) -> float:
        scales = [marble.radius for marble in self.marbles]
        scales += [string.tube.feature_scale() for string in self.strings]
        return float(min(scales))

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "MarbleComplex":
        rotation = np.asarray(rotation, dtype=float)
        translation = np.asarray(translation, dtype=float)
        return MarbleComplex([marble.transformed(rotation, translation) for marble in self.marbles],
                             [string.transformed(rotation, translation) for string in self.strings],
                             self.n)

    # --- meshing and embeddedness ---------------------------------------------------------

    def mesh_into(self, builder: MeshBuilder, resolution: float):
        "Adds the triangulation of the complex to a mesh builder"
        holes = {index: [] for index in range(len(self.marbles))}
        for string in self.strings:
            rings = tube_rings(builder, string.tube, resolution)
            builder.sweep(rings)
            for end, ring in ((0, rings[0]), (1, rings[-1])):
                if string.ends[end] is not None:
                    holes[string.ends[end]].append((ring, string.junctions[end]))
        for index, marble in enumerate(self.marbles):
            members = holes[index]
            sphere_with_holes(builder, marble.center, marble.radius,
                              [ring for ring, _ in members], resolution,
                              [junction.axis for _, junction in members],
                              [junction.start_angle for _, junction in members])

    def embedding_report(self, tolerances: Tolerances = Tolerances()) -> CertificateReport:
        """Embeddedness of the complex: the strings are embedded tubes, marbles are disjoint,
        and the string cylinders keep clear of each other and of the marbles they do not end on"""
        reports = [check_embedded(string.tube, tolerances) for string in self.strings]
        for first in range(len(self.marbles)):
            for second in range(first + 1, len(self.marbles)):
                a, b = self.marbles[first], self.marbles[second]
                gap = np.linalg.norm(a.center - b.center) - a.radius - b.radius
                reports.append(make_report(f"marbles[{first},{second}]", gap, [first, second]))
        cores = [self._string_core(string) for string in self.strings]
        for index, (string, core) in enumerate(zip(self.strings, cores)):
            for number, marble in enumerate(self.marbles):
                if number in string.ends or not len(core):
                    continue
                distance = marble.distance(core) - string.radius
                worst = int(np.argmin(distance))
                reports.append(make_report(f"string-marble[{index},{number}]", distance[worst],
                                           core[worst].tolist()))
            for other in range(index + 1, len(self.strings)):
                if not len(core) or not len(cores[other]):
                    continue
                distance, nearest = cKDTree(cores[other]).query(core)
                worst = int(np.argmin(distance))
                gap = distance[worst] - string.radius - self.strings[other].radius
                reports.append(make_report(f"strings[{index},{other}]", gap,
                                           [core[worst].tolist(), cores[other][nearest[worst]].tolist()]))
        return merge_reports("embedded", reports)

    def _string_core(self, string: GluedString) -> np.ndarray:
        "Skeleton samples outside both junctions"
        curve = string.skeleton
        low = string.junctions[0].end_height if string.junctions[0] is not None else 0.0
        high = curve.total_length - (string.junctions[1].end_height if string.junctions[1] is not None else 0.0)
        mask = (curve.arclength >= low) & (curve.arclength <= high)
        return curve.samples[mask]

    # --- circuits -------------------------------------------------------------------------

    def as_tube(self, tol: float = 1e-6) -> TubeSurface:
        """The canal form of a circuit whose marbles each meet exactly two strings at
        antipodal points: one tube around a closed skeleton through the marble centers, whose
        radius follows the marble spheres and the junctions

        Raises:
            InputError: the complex is not such a circuit
        """
        cycle = self.cycle()
        graph = self.graph()
        if cycle is None or graph.cycle_rank() != 1 or len(graph.components()) != 1 \
                or len(cycle) != len(self.strings) or len(cycle) != len(self.marbles):
            raise InputError("Only circuits covering every marble and string have a canal form")
        lengths, radials, points = [], [], []
        for marble_index, string_index, forward in cycle:
            holes = self.holes(marble_index)
            if len(holes) != 2 or np.dot(holes[0][0].axis, holes[1][0].axis) > -1 + tol:
                raise InputError("Marble strings of a canal form have to be antipodal",
                                 witness=marble_index)
            string = self.strings[string_index]
            curve = string.skeleton if forward else string.skeleton.reversed()
            radial = string.tube.radial
            if not forward:
                radial = np.column_stack([curve.total_length - radial[::-1, 0], radial[::-1, 1]])
            lengths.append(curve.total_length)
            radials.append(radial)
            points.append(curve.samples[:-1])
        offsets = np.concatenate([[0.0], np.cumsum(lengths)])
        total = offsets[-1]
        pieces = []
        for position, (marble_index, _, _) in enumerate(cycle):
            radius = self.marbles[marble_index].radius
            leaving = radials[position][0, 0]
            entering = lengths[position - 1] - radials[position - 1][-1, 0]
            arc = np.linspace(-entering, leaving, 65)[1:-1]
            pieces.append(np.column_stack([offsets[position] + arc, np.sqrt(radius ** 2 - arc ** 2)]))
            pieces.append(radials[position] + [offsets[position], 0.0])
        radial = np.vstack(pieces)
        radial[:, 0] = np.mod(radial[:, 0], total)
        radial = radial[np.argsort(radial[:, 0], kind="stable")]
        skeleton = curve_from_points(np.vstack(points), closed=True,
                                     h_s=min(string.skeleton.h_s for string in self.strings))
        radial[:, 0] *= skeleton.total_length / total
        return TubeSurface(skeleton, radial, self.n)


def _append(samples: SurfaceSamples, piece: SurfaceSamples, label: int) -> SurfaceSamples:
    return SurfaceSamples(np.vstack([samples.points, piece.points]),
                          np.vstack([samples.normals, piece.normals]),
                          np.vstack([samples.curvatures, piece.curvatures]),
                          np.concatenate([samples.labels, np.full(len(piece.points), label)]))


def _closer(best, candidate):
    distance = candidate[0] < best[0]
    return (np.where(distance, candidate[0], best[0]),
            np.where(distance[:, None], candidate[1], best[1]),
            np.where(distance[:, None], candidate[2], best[2]))
