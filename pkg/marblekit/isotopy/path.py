"""Discrete isotopies: ordered frames of domains together with the claim they are certified
against."""
from json import dumps
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..error import InputError
from ..geometry.vectors import hausdorff_distance
from ..verify.certificate import plain

#: Frames a construction is sampled with before refinement
FRAMES = 64
#: Largest number of interval bisections of an adaptively sampled family
MAX_REFINE = 6

MONOTONE = "monotone-outside"
TRIVIAL = "trivial-outside"
#: Only the frames are certified
UNCLAIMED = "none"
CLAIM_KINDS = (MONOTONE, TRIVIAL, UNCLAIMED)

# (center, radius)
Ball = Tuple[np.ndarray, float]


class Frame(NamedTuple):
    "The domain at one parameter value; its boundary is the union of the surfaces"
    t: float
    domain: Tuple[object, ...]


class Claim(NamedTuple):
    """What is claimed about the family outside the exceptional set

    `monotone-outside`: every frame lies inside its predecessor outside the balls.
    `trivial-outside`: consecutive frames coincide outside the balls."""
    kind: str
    balls: Tuple[Ball, ...] = ()


class Segment(NamedTuple):
    "The construction that produced the frames start..stop (inclusive)"
    start: int
    stop: int
    source: str
    flags: Tuple[str, ...] = ()


def as_domain(geometry) -> Tuple[object, ...]:
    if isinstance(geometry, (tuple, list)):
        return tuple(geometry)
    return (geometry,)


#: Default frame sample spacing, in units of frame_tol
SPACING_FACTOR = 10.0


def frame_spacing(domain: Sequence, frame_tol: float) -> float:
    "Sample spacing of frames compared at Hausdorff tolerance frame_tol"
    feature = min(surface.feature_scale() for surface in domain)
    return min(SPACING_FACTOR * frame_tol, feature / 8)


def domain_points(domain: Sequence, spacing: Optional[float] = None) -> np.ndarray:
    return np.vstack([surface.sample(spacing).points for surface in domain])


class IsotopyPath:
    """A discrete 2-convex isotopy

    Args:
        frames: the frames in increasing t
        claim: the claim that certification checks
        segments: provenance of the frames
    """

    def __init__(self, frames: Sequence[Frame], claim: Claim = Claim(MONOTONE),
                 segments: Sequence[Segment] = ()):
        if not frames:
            raise InputError("An isotopy needs at least one frame")
        if claim.kind not in CLAIM_KINDS:
            raise InputError(f"Unknown claim {claim.kind}", witness=claim.kind)
        self.frames = list(frames)
        self.claim = claim
        self.segments = list(segments) or [Segment(0, len(self.frames) - 1, "path")]
        #: Core curve of a thin torus at the end of the path, if any
        self.core = None
        #: The marble graphs the last frame stands for, if any
        self.result = None

    def __repr__(self) -> str:
        sources = ", ".join(sorted({segment.source for segment in self.segments}))
        return f"IsotopyPath({len(self.frames)} frames, {self.claim.kind}, {sources})"

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def first(self) -> Tuple[object, ...]:
        return self.frames[0].domain

    @property
    def last(self) -> Tuple[object, ...]:
        return self.frames[-1].domain

    @property
    def flags(self) -> Tuple[str, ...]:
        return tuple(sorted({flag for segment in self.segments for flag in segment.flags}))

    def concatenate(self, other: "IsotopyPath") -> "IsotopyPath":
        """This path followed by another; the parameters are rescaled to [0, 1] and the
        claims merged. A trivial claim only survives if both paths make it.

        The last frame of this path is replaced by the first frame of the other one."""
        count = len(self.frames)
        frames = [frame.domain for frame in self.frames[:-1]] + [frame.domain for frame in other.frames]
        times = np.linspace(0.0, 1.0, len(frames)) if len(frames) > 1 else [0.0]
        kinds = {self.claim.kind, other.claim.kind}
        kind = UNCLAIMED if UNCLAIMED in kinds else TRIVIAL if kinds == {TRIVIAL} else MONOTONE
        claim = Claim(kind, tuple(self.claim.balls) + tuple(other.claim.balls))
        segments = list(self.segments) + [segment._replace(start=segment.start + count - 1,
                                                           stop=segment.stop + count - 1)
                                          for segment in other.segments]
        result = IsotopyPath([Frame(float(t), domain) for t, domain in zip(times, frames)], claim,
                             segments)
        result.core = other.core
        result.result = other.result
        return result

    def reversed(self) -> "IsotopyPath":
        "The path run backwards; a monotone claim does not survive reversal"
        last = len(self.frames) - 1
        frames = [Frame(1.0 - frame.t, frame.domain) for frame in reversed(self.frames)]
        segments = [segment._replace(start=last - segment.stop, stop=last - segment.start)
                    for segment in reversed(self.segments)]
        claim = self.claim if self.claim.kind != MONOTONE else Claim(UNCLAIMED, self.claim.balls)
        return IsotopyPath(frames, claim, segments)

    def to_records(self, frame_files: Optional[Sequence[str]] = None) -> List[dict]:
        records = [{"type": "claim", "kind": self.claim.kind,
                    "balls": [{"center": plain(center), "radius": float(radius)}
                              for center, radius in self.claim.balls]}]
        records.extend({"type": "segment", "start": segment.start, "stop": segment.stop,
                        "source": segment.source, "flags": list(segment.flags)}
                       for segment in self.segments)
        for index, frame in enumerate(self.frames):
            record = {"type": "frame", "index": index, "t": frame.t,
                      "components": [type(surface).__name__ for surface in frame.domain]}
            if frame_files is not None:
                record["file"] = frame_files[index]
            records.append(record)
        return records

    def to_jsonl(self, dest=None, frame_files: Optional[Sequence[str]] = None) -> Optional[str]:
        "Writes one JSON object per claim, segment and frame; returns the text without destination"
        text = "\n".join(dumps(record) for record in self.to_records(frame_files)) + "\n"
        if dest is None:
            return text
        if isinstance(dest, str):
            with open(dest, "w") as filepointer:
                filepointer.write(text)
        else:
            dest.write(text)
        return None


def constant_path(geometry, source: str = "constant", frames: int = 2) -> IsotopyPath:
    "A path that stays at one domain"
    domain = as_domain(geometry)
    return IsotopyPath([Frame(float(t), domain) for t in np.linspace(0.0, 1.0, frames)],
                       Claim(TRIVIAL), [Segment(0, frames - 1, source)])


def sample_family(family: Callable[[float], object], frames: int = FRAMES,
                  frame_tol: Optional[float] = None, margin: Optional[Callable[[object], float]] = None,
                  tol: float = 1e-9) -> List[Frame]:
    """Samples a one parameter family of domains at `frames` uniform parameters and bisects
    intervals whose ends are farther apart than frame_tol, or whose end frames have a
    two-convexity margin below three times tol

    Args:
        family: maps t in [0, 1] to a surface or a tuple of surfaces
        margin: computes the two-convexity margin of a domain; no margin refinement without
    """
    times = list(np.linspace(0.0, 1.0, max(2, frames)))
    domains = [as_domain(family(t)) for t in times]
    if frame_tol is None and margin is None:
        return [Frame(float(t), domain) for t, domain in zip(times, domains)]
    spacing = None if frame_tol is None else frame_spacing(domains[0], frame_tol)
    points = [None if spacing is None else domain_points(domain, spacing) for domain in domains]
    for _ in range(MAX_REFINE):
        inserted = False
        new_times, new_domains, new_points = [times[0]], [domains[0]], [points[0]]
        for index in range(1, len(times)):
            previous, current = domains[index - 1], domains[index]
            split = spacing is not None and \
                hausdorff_distance(points[index - 1], points[index]) > frame_tol
            if not split and margin is not None:
                split = min(margin(previous), margin(current)) < 3 * tol
            if split:
                middle = (times[index - 1] + times[index]) / 2
                domain = as_domain(family(middle))
                new_times.append(middle)
                new_domains.append(domain)
                new_points.append(None if spacing is None else domain_points(domain, spacing))
                inserted = True
            new_times.append(times[index])
            new_domains.append(current)
            new_points.append(points[index])
        times, domains, points = new_times, new_domains, new_points
        if not inserted:
            break
    return [Frame(float(t), domain) for t, domain in zip(times, domains)]


def smoothstep(t: float) -> float:
    "Reparametrization with vanishing speed at both ends"
    t = min(max(float(t), 0.0), 1.0)
    return t * t * (3 - 2 * t)
