"""Certification of discrete isotopies.

A path is certified if every frame is embedded and two-convex, consecutive frames are within
Hausdorff distance frame_tol, and the claim holds samplewise outside the exceptional balls."""
from concurrent.futures import ThreadPoolExecutor
from logging import debug, info
from typing import Optional, Sequence

import numpy as np

from ..configuration import Tolerances
from ..geometry.vectors import hausdorff_distance
from ..verify.certificate import CertificateReport, make_report, merge_reports
from ..verify.convexity import check_two_convex
from ..verify.placement import check_embedded
from .path import MONOTONE, TRIVIAL, Ball, IsotopyPath, frame_spacing


def outside_balls(points: np.ndarray, balls: Sequence[Ball]) -> np.ndarray:
    "Mask of the points outside every ball"
    mask = np.ones(len(points), dtype=bool)
    for center, radius in balls:
        mask &= np.linalg.norm(points - np.asarray(center), axis=1) > radius
    return mask


def domain_contains(domain, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    inside = np.zeros(len(points), dtype=bool)
    for surface in domain:
        inside |= surface.contains(points, tol)
    return inside


def domain_distance(domain, points: np.ndarray) -> np.ndarray:
    "Distance of the points from the boundary of a domain"
    return np.min([surface.nearest(points)[0] for surface in domain], axis=0)


def _frame_report(index: int, domain, samples: Sequence, tolerances: Tolerances) -> CertificateReport:
    reports = []
    for number, surface in enumerate(domain):
        reports.append(check_embedded(surface, tolerances)._replace(name=f"embedded[{number}]"))
        convex = check_two_convex(samples[number], tolerances.tol)
        reports.append(convex._replace(name=f"two-convex[{number}]"))
        points = samples[number].points
        for other_number, other in enumerate(domain):
            if other_number == number:
                continue
            inside = other.contains(points)
            worst = int(np.argmax(inside)) if inside.any() else None
            margin = -float(inside.sum()) if inside.any() else 1.0
            reports.append(make_report(f"disjoint[{number},{other_number}]", margin,
                                       None if worst is None else points[worst].tolist()))
    return merge_reports(f"frame[{index}]", reports)


def _step_report(index: int, previous, current, before: np.ndarray, after: np.ndarray, kind: str,
                 balls: Sequence[Ball], frame_tol: float, tol_claim: float) -> CertificateReport:
    distance = hausdorff_distance(before, after)
    reports = [make_report("hausdorff", frame_tol - distance, distance)]
    outside = after[outside_balls(after, balls)]
    if kind == MONOTONE and len(outside):
        inside = domain_contains(previous, outside, tol_claim)
        worst = None if inside.all() else outside[int(np.argmin(inside))].tolist()
        reports.append(make_report("monotone", 1.0 if inside.all() else -float((~inside).sum()), worst))
    elif kind == TRIVIAL:
        gaps = []
        if len(outside):
            gaps.append((domain_distance(previous, outside), outside))
        earlier = before[outside_balls(before, balls)]
        if len(earlier):
            gaps.append((domain_distance(current, earlier), earlier))
        for gap, points in gaps:
            worst = int(np.argmax(gap))
            reports.append(make_report("trivial", tol_claim - gap[worst], points[worst].tolist()))
    return merge_reports(f"step[{index}]", reports)


def certify_isotopy(path: IsotopyPath, tolerances: Tolerances = Tolerances(),
                    spacing: Optional[float] = None, workers: int = 1) -> CertificateReport:
    """Certifies a discrete isotopy frame by frame and step by step

    Args:
        path: a nonempty path
        tolerances: `tol` for two-convexity, `frame_tol` for the Hausdorff distance of
            consecutive frames (default: a hundredth of the smallest feature scale of the first
            frame) and `tol_emb` for the claim checks (default: a tenth of frame_tol)
        spacing: sample spacing of the frames; `frame_spacing` of the first frame if unset.
            Every frame is sampled once for all its checks.
        workers: number of threads certifying frames
    Returns:
        A report with one detail per frame and per step; it never raises on failures
    """
    frame_tol = tolerances.frame_tol
    if frame_tol is None:
        frame_tol = min(surface.feature_scale() for surface in path.first) / 100
    if spacing is None:
        spacing = frame_spacing(path.first, frame_tol)
    tol_claim = tolerances.tol_emb if tolerances.tol_emb is not None else frame_tol / 10
    frames = path.frames
    balls = tuple(path.claim.balls)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        samples = list(executor.map(
            lambda frame: [surface.sample(spacing) for surface in frame.domain], frames))
        points = [np.vstack([part.points for part in parts]) for parts in samples]
        frame_reports = list(executor.map(
            lambda index: _frame_report(index, frames[index].domain, samples[index], tolerances),
            range(len(frames))))
        step_reports = list(executor.map(
            lambda index: _step_report(index, frames[index - 1].domain, frames[index].domain,
                                       points[index - 1], points[index], path.claim.kind, balls,
                                       frame_tol, tol_claim),
            range(1, len(frames))))
    report = merge_reports("isotopy", frame_reports + step_reports)
    if report.passed:
        info(f"Certified {path!r}")
    else:
        failed = [detail.name for detail in report.failed_details()]
        info(f"Certification of {path!r} failed at {failed[:5]}")
    debug(f"Isotopy margin {report.margin}")
    return report
