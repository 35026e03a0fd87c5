"""The end-to-end run: verification, flow with surgery, the isotopy to a marble graph, the
reduction of a marble circuit to a thin torus and the path component verdict of two tori.

Every artifact written by a run embeds the run configuration."""
import json
import os
from logging import info, warning
from typing import Dict, List, NamedTuple, Optional, Sequence

from ..configuration import RunConfig, config_to_dict
from ..error import InputError
from ..flow.run import run_flow_with_surgery
from ..flow.state import FlowLog
from ..geometry.io import export_mesh
from ..geometry.mesh import TriMesh
from ..geometry.meshing import mesh_from
from ..geometry.profiles import ProfileSurface
from ..geometry.tubes import TubeSurface
from ..glue.complex import MarbleComplex
from ..glue.marbles import classify_marble_graph
from ..isotopy.assembly import assemble_backwards, build_piece_isotopies
from ..isotopy.certify import certify_isotopy
from ..isotopy.circuits import circuit_to_thin_torus
from ..isotopy.path import IsotopyPath, constant_path
from ..knots.invariants import KnotInvariants
from ..knots.verdict import ComponentVerdict, core_curve, knot_invariants, path_component_verdict
from ..verify.certificate import CertificateReport, merge_reports
from ..verify.convexity import check_two_convex
from ..verify.placement import check_embedded
from .scene import SceneFile, SceneObject

#: Edge length of exported meshes relative to the feature scale, unless configured
MESH_EDGE_FRACTION = 1 / 16


class Artifacts:
    "Writes the files of a run into one directory; without directory nothing is written"

    def __init__(self, directory: Optional[str], config: RunConfig):
        self.directory = directory
        self.config = config_to_dict(config)
        if directory is not None:
            os.makedirs(directory, exist_ok=True)

    def path(self, name: str) -> Optional[str]:
        return None if self.directory is None else os.path.join(self.directory, name)

    def write_json(self, name: str, payload: dict):
        if self.directory is None:
            return
        with open(self.path(name), "w") as filepointer:
            json.dump({"config": self.config, **payload}, filepointer, indent=2)

    def write_jsonl(self, name: str, text: str):
        "Writes JSONL text behind a first line holding the configuration"
        if self.directory is None:
            return
        with open(self.path(name), "w") as filepointer:
            filepointer.write(json.dumps({"type": "config", **self.config}) + "\n")
            filepointer.write(text)

    def write_meshes(self, stem: str, domain: Sequence, resolution: Optional[float],
                     file_format: str = "obj") -> List[str]:
        "Exports every surface of a domain; returns the file names"
        if self.directory is None:
            return []
        names = []
        for index, surface in enumerate(domain):
            name = f"{stem}_{index}.{file_format}"
            export_geometry(surface, self.path(name), file_format, resolution)
            names.append(name)
        return names


def export_geometry(geometry, path: str, file_format: str = "obj",
                    resolution: Optional[float] = None) -> TriMesh:
    """Triangulates a surface (meshes are taken as they are) and writes it

    Raises:
        InputError: the surface cannot be triangulated or the format is unknown
        OSError: the file cannot be written
    """
    if isinstance(geometry, TriMesh):
        mesh = geometry
    else:
        mesh = mesh_from(geometry, resolution or geometry.feature_scale() * MESH_EDGE_FRACTION)
    export_mesh(mesh, path, file_format)
    return mesh


def verify_object(geometry, config: RunConfig) -> CertificateReport:
    "Two-convexity and embeddedness of one scene object"
    return merge_reports("input", [check_two_convex(geometry, config.tolerances.tol),
                                   check_embedded(geometry, config.tolerances)])


def flow_object(geometry, config: RunConfig, observer=None) -> FlowLog:
    """Runs the flow with surgery on a surface of revolution or a tube

    Raises:
        InputError: the object cannot flow
    """
    if not isinstance(geometry, (ProfileSurface, TubeSurface)):
        raise InputError(f"Only surfaces of revolution and tubes flow, got {type(geometry).__name__}")
    return run_flow_with_surgery(geometry, config.surgery, config.tolerances, observer,
                                 config.worker_count())


def string_radius(log: FlowLog, config: RunConfig) -> float:
    """Radius of the strings that undo surgeries: string_ratio times the smallest radius of a
    cut or discarded neck, or of the inscribed ball of a discarded convex component"""
    radii = [neck.radius for event in log.surgeries for neck in event.necks]
    for event in log.discards:
        scale = getattr(event.classification, "radius", None) or getattr(event.classification, "inradius")
        radii.append(scale)
    if not radii:
        raise InputError("The log has neither surgeries nor discards")
    return config.string_ratio * min(radii)


def isotopy_frame_tol(log: FlowLog, config: RunConfig) -> float:
    "The configured frame_tol, or a hundredth of the smallest feature scale of the initial domain"
    if config.tolerances.frame_tol is not None:
        return config.tolerances.frame_tol
    initial = [snapshot.surface for snapshot in log.snapshots
               if snapshot.parent is None and snapshot.time == 0.0]
    return min(surface.feature_scale() for surface in initial) / 100


def isotopy_to_marbles(log: FlowLog, config: RunConfig) -> IsotopyPath:
    """The assembled isotopy from the initial domain of a run to its marble graph, with
    consecutive frames refined to frame_tol"""
    frames = config.resolution.frames
    frame_tol = isotopy_frame_tol(log, config)
    pieces = build_piece_isotopies(log, config.surgery, config.marble_ratio, None, frames,
                                   config.worker_count(), frame_tol)
    return assemble_backwards(log, pieces, string_radius(log, config), config.surgery,
                              config.junction_sigma, frames, frame_tol)


def single_circuit(path: IsotopyPath) -> Optional[MarbleComplex]:
    "The marble circuit at the end of a path, if the path ends in exactly one"
    results = [item for item in (path.result or []) if item is not None]
    if len(results) != 1 or not isinstance(results[0], MarbleComplex):
        return None
    return results[0] if classify_marble_graph(results[0]).kind == "circuit" else None


class ObjectRun(NamedTuple):
    "Everything the pipeline produced for one scene object"
    name: str
    input_report: CertificateReport
    log: Optional[FlowLog] = None
    path: Optional[IsotopyPath] = None
    path_report: Optional[CertificateReport] = None
    torus_path: Optional[IsotopyPath] = None
    torus_report: Optional[CertificateReport] = None
    #: The solid torus the object ends in, if it is one
    torus: Optional[object] = None
    invariants: Optional[KnotInvariants] = None

    @property
    def reports(self) -> List[CertificateReport]:
        return [report for report in (self.input_report, self.path_report, self.torus_report)
                if report is not None]

    @property
    def certified(self) -> bool:
        return all(report.passed for report in self.reports)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "certified": self.certified,
            "input": self.input_report.to_dict(),
            "extinction_time": None if self.log is None else self.log.extinction_time,
            "surgeries": None if self.log is None else len(self.log.surgeries),
            "isotopy": None if self.path_report is None else self.path_report.to_dict(),
            "thin_torus": None if self.torus_report is None else self.torus_report.to_dict(),
            "flags": [] if self.path is None else list(self.path.flags),
            "invariants": None if self.invariants is None else self.invariants.to_dict(),
        }


class PipelineResult(NamedTuple):
    runs: Dict[str, ObjectRun]
    verdict: Optional[ComponentVerdict] = None

    @property
    def certified(self) -> bool:
        return all(run.certified for run in self.runs.values())

    def to_dict(self) -> dict:
        return {"certified": self.certified,
                "objects": [run.to_dict() for run in self.runs.values()],
                "verdict": None if self.verdict is None else self.verdict.to_dict()}


def _torus_of(geometry, path: Optional[IsotopyPath]):
    "The solid torus an object stands for: its thin torus, or the object itself"
    if path is not None:
        last = path.last
        return last[0] if len(last) == 1 and isinstance(last[0], TubeSurface) and last[0].closed else None
    if isinstance(geometry, TriMesh) and geometry.euler_characteristic() == 0:
        return geometry
    if isinstance(geometry, TubeSurface) and geometry.closed:
        return geometry
    if isinstance(geometry, MarbleComplex) and classify_marble_graph(geometry).kind == "circuit":
        return geometry
    return None


def run_object(item: SceneObject, config: RunConfig, artifacts: Artifacts, observer=None,
               snapshots: bool = False, frames: bool = False) -> ObjectRun:
    "Runs the pipeline on one scene object"
    stem = item.name
    report = verify_object(item.geometry, config)
    artifacts.write_json(f"{stem}.verify.json", {"certificate": report.to_dict()})
    if not report.passed:
        warning(f"{stem}: the input is not certified, skipping the flow")
        return ObjectRun(stem, report)
    resolution = config.resolution.mesh_edge
    workers = config.worker_count()
    log, path, path_report = None, None, None
    if isinstance(item.geometry, (ProfileSurface, TubeSurface)):
        log = flow_object(item.geometry, config, observer)
        artifacts.write_jsonl(f"{stem}.flow.jsonl", log.to_jsonl())
        if snapshots:
            for index, snapshot in enumerate(log.snapshots):
                artifacts.write_meshes(f"{stem}.snapshot_{index:04d}", (snapshot.surface,), resolution)
        path = isotopy_to_marbles(log, config)
    elif isinstance(item.geometry, MarbleComplex):
        path = constant_path(item.geometry, "marble-graph")
        path.result = [item.geometry]
    if path is not None:
        path_report = certify_isotopy(path, config.tolerances, workers=workers)
        files = [artifacts.write_meshes(f"{stem}.frame_{index:04d}", frame.domain, resolution)
                 for index, frame in enumerate(path.frames)] if frames else None
        artifacts.write_jsonl(f"{stem}.isotopy.jsonl", path.to_jsonl(frame_files=files))
    torus_path, torus_report = None, None
    circuit = None if path is None else single_circuit(path)
    if circuit is not None:
        r_target = min(string.radius for string in circuit.strings)
        torus_path = circuit_to_thin_torus(circuit, r_target, config.resolution.frames,
                                           config.tolerances.frame_tol)
        torus_report = certify_isotopy(torus_path, config.tolerances, workers=workers)
        artifacts.write_jsonl(f"{stem}.torus.jsonl", torus_path.to_jsonl())
    elif path is not None and path.core is not None:
        torus_path = path
    torus = _torus_of(item.geometry, torus_path)
    invariants = None
    if torus is not None and item.geometry.n == 2:
        invariants = knot_invariants(core_curve(torus), seed=config.seed)
    run = ObjectRun(stem, report, log, path, path_report, torus_path, torus_report, torus, invariants)
    artifacts.write_json(f"{stem}.certificate.json", run.to_dict())
    info(f"{stem}: certified={run.certified}")
    return run


def run_pipeline(scene: SceneFile, config: RunConfig, out: Optional[str] = None, observer=None,
                 snapshots: bool = False, frames: bool = False) -> PipelineResult:
    """Runs every scene object through the pipeline; if the scene holds exactly two objects that
    end as solid tori, their path components are compared

    Args:
        out: directory receiving the artifacts
        snapshots: export meshes of the flow snapshots
        frames: export meshes of the isotopy frames
    """
    config.validate()
    artifacts = Artifacts(out, config)
    runs = {}
    for item in scene.objects:
        runs[item.name] = run_object(item, config, artifacts, observer, snapshots, frames)
    tori = [run.torus for run in runs.values() if run.torus is not None]
    verdict = None
    if len(tori) == 2 and len(runs) == 2:
        verdict = path_component_verdict(tori[0], tori[1], scene.n, config.tolerances, config.seed)
        info(f"Path component verdict: {verdict.verdict}")
    result = PipelineResult(runs, verdict)
    artifacts.write_json("verdict.json", result.to_dict())
    return result
