"The marblekit command line"
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from .._version import __version__
from ..configuration import DEFAULT_CONFIG, RunConfig, load_config
from ..error import (ClassificationError, ConfigurationError, EmbeddingError, InputError,
                     MarbleKitError, NumericalError, ParameterError, PreconditionError,
                     ProjectionError, ReroutingError, SingularityError, SurgeryError)
from ..geometry.io import MESH_FORMATS, import_mesh
from ..glue.complex import MarbleComplex
from ..glue.marbles import classify_marble_graph
from ..isotopy.certify import certify_isotopy
from ..knots.torus import TorusMatrix, torus_matrix_extends
from ..knots.verdict import core_curve, knot_invariants, same_knot_class
from ..verify.certificate import plain
from .pipeline import (Artifacts, export_geometry, flow_object, isotopy_to_marbles, run_pipeline,
                       verify_object)
from .scene import SceneFile, load_scene

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CERTIFICATION = 3
EXIT_IO = 4
EXIT_CLASSIFICATION = 5

#: Exit code of every error class; subclasses not listed fall back to EXIT_INPUT
EXIT_CODES = {
    InputError: EXIT_INPUT,
    ConfigurationError: EXIT_INPUT,
    ParameterError: EXIT_INPUT,
    PreconditionError: EXIT_INPUT,
    EmbeddingError: EXIT_INPUT,
    SingularityError: EXIT_INPUT,
    NumericalError: EXIT_INPUT,
    ClassificationError: EXIT_CLASSIFICATION,
    ReroutingError: EXIT_CLASSIFICATION,
    ProjectionError: EXIT_CLASSIFICATION,
    SurgeryError: EXIT_CERTIFICATION,
}


def _emit(payload: dict):
    print(json.dumps(plain(payload), indent=2))


def error_payload(error: Exception) -> dict:
    "The machine-readable description of an error"
    payload = {"error": type(error).__name__, "message": str(error),
               "witness": plain(getattr(error, "witness", None))}
    dump = getattr(error, "dump", None)
    if dump is not None:
        payload["dump"] = plain(dump)
    return payload


def exit_code(error: Exception) -> int:
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_CODES.get(type(error), EXIT_INPUT)


# --- configuration ----------------------------------------------------------------------------

def run_config(args: argparse.Namespace) -> RunConfig:
    "The configuration file given by --params with the command line overrides applied"
    config = load_config(args.params) if args.params else DEFAULT_CONFIG
    if args.seed is not None:
        config = config._replace(seed=args.seed)
    if args.threads is not None:
        config = config._replace(threads=args.threads)
    if args.resolution is not None:
        config = config._replace(resolution=config.resolution._replace(mesh_edge=args.resolution))
    config.validate()
    return config


def _scene(args: argparse.Namespace, config: RunConfig) -> SceneFile:
    return load_scene(args.scene, config.control, config.tolerances, config.junction_sigma,
                      config.resolution.h_s)


# --- subcommands ------------------------------------------------------------------------------

def command_verify(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    reports = {item.name: verify_object(item.geometry, config) for item in scene.objects}
    Artifacts(args.out, config).write_json("verify.json", {
        "objects": {name: report.to_dict() for name, report in reports.items()}})
    _emit({name: report.to_dict() for name, report in reports.items()})
    return EXIT_OK if all(report.passed for report in reports.values()) else EXIT_CERTIFICATION


def command_build(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    artifacts = Artifacts(args.out, config)
    summary = {}
    for item in scene.objects:
        entry = {"type": item.kind, "euler_characteristic": item.geometry.euler_characteristic()}
        if isinstance(item.geometry, MarbleComplex):
            entry["graph"] = classify_marble_graph(item.geometry)._asdict()
            entry["embedded"] = item.geometry.embedding_report(config.tolerances).to_dict()
        entry["files"] = artifacts.write_meshes(item.name, (item.geometry,), config.resolution.mesh_edge)
        summary[item.name] = entry
    _emit(summary)
    return EXIT_OK


def _write_event_log(args: argparse.Namespace, config: RunConfig, name: str, count: int,
                     suffix: str, text: str):
    "--log names the event log of a single object; otherwise the logs go to --out"
    if args.log and count == 1:
        directory, filename = os.path.split(os.path.abspath(args.log))
        Artifacts(directory, config).write_jsonl(filename, text)
    else:
        Artifacts(args.out, config).write_jsonl(f"{name}.{suffix}.jsonl", text)


def command_flow(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    artifacts = Artifacts(args.out, config)
    summary = {}
    for item in scene.objects:
        log = flow_object(item.geometry, config)
        _write_event_log(args, config, item.name, len(scene.objects), "flow", log.to_jsonl())
        if args.snapshots:
            for index, snapshot in enumerate(log.snapshots):
                artifacts.write_meshes(f"{item.name}.snapshot_{index:04d}", (snapshot.surface,),
                                       config.resolution.mesh_edge)
        summary[item.name] = {"extinction_time": log.extinction_time,
                              "surgeries": len(log.surgeries), "discards": len(log.discards)}
    _emit(summary)
    return EXIT_OK


def command_isotopy(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    artifacts = Artifacts(args.out, config)
    summary, certified = {}, True
    for item in scene.objects:
        path = isotopy_to_marbles(flow_object(item.geometry, config), config)
        report = certify_isotopy(path, config.tolerances, workers=config.worker_count())
        files = None
        if args.frames:
            files = [artifacts.write_meshes(f"{item.name}.frame_{index:04d}", frame.domain,
                                            config.resolution.mesh_edge)
                     for index, frame in enumerate(path.frames)]
        _write_event_log(args, config, item.name, len(scene.objects), "isotopy",
                         path.to_jsonl(frame_files=files))
        certified &= report.passed
        summary[item.name] = {"frames": len(path), "claim": path.claim.kind,
                              "flags": list(path.flags), "certificate": report.to_dict()}
    _emit(summary)
    return EXIT_OK if certified else EXIT_CERTIFICATION


def _torus_input(path: str, config: RunConfig, name: Optional[str]):
    "A mesh file, or the named (or only) object of a scene"
    extension = os.path.splitext(path)[1].lstrip(".").lower()
    if extension in MESH_FORMATS:
        return import_mesh(path)
    scene = load_scene(path, config.control, config.tolerances, config.junction_sigma,
                       config.resolution.h_s)
    if name is not None:
        return scene.get(name).geometry
    if len(scene.objects) != 1:
        raise InputError("The scene holds several objects; choose one with --object")
    return scene.objects[0].geometry


def command_knot(args: argparse.Namespace, config: RunConfig) -> int:
    seed = config.seed
    first = core_curve(_torus_input(args.input, config, args.object), seed=seed)
    if args.compare is None:
        _emit({"verdict": None, "invariants": [knot_invariants(first, seed=seed).to_dict()]})
        return EXIT_OK
    second = core_curve(_torus_input(args.compare, config, args.object), seed=seed)
    verdict = same_knot_class(first, second, seed=seed)
    _emit({"verdict": verdict.verdict, "invariants": verdict.evidence["invariants"],
           "evidence": verdict.evidence})
    return EXIT_OK


def command_matrix_extends(args: argparse.Namespace, config: RunConfig) -> int:
    matrix = TorusMatrix(args.a, args.b, args.c, args.d)
    extension = torus_matrix_extends(matrix)
    _emit({"matrix": list(matrix), "degree": matrix.c, **extension.to_dict()})
    return EXIT_OK


def command_pipeline(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    result = run_pipeline(scene, config, args.out, snapshots=args.snapshots, frames=args.frames)
    _emit(result.to_dict())
    return EXIT_OK if result.certified else EXIT_CERTIFICATION


def command_export(args: argparse.Namespace, config: RunConfig) -> int:
    scene = _scene(args, config)
    directory = args.out or "."
    written = {}
    for item in scene.objects:
        path = os.path.join(directory, f"{item.name}.{args.format}")
        mesh = export_geometry(item.geometry, path, args.format, config.resolution.mesh_edge)
        written[item.name] = {"file": path, "euler_characteristic": mesh.euler_characteristic(),
                              "watertight": mesh.is_watertight}
    _emit(written)
    return EXIT_OK


# --- parser -----------------------------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON run configuration")
    common.add_argument("--out", help="directory receiving the artifacts")
    common.add_argument("--log", help="JSONL event log of a single object run")
    common.add_argument("--snapshots", action="store_true", help="export meshes of the flow snapshots")
    common.add_argument("--frames", action="store_true", help="export meshes of the isotopy frames")
    common.add_argument("--seed", type=int, help="seed of all random perturbations")
    common.add_argument("--resolution", type=float, help="edge length of exported meshes")
    common.add_argument("--threads", type=int, help="worker threads (overrides MARBLEKIT_THREADS)")
    common.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="marblekit",
        description="Two-convex domains, flow with surgery, marble graphs and knotted tori.")
    parser.add_argument("--version", action="version", version=f"marblekit {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, handler, text in (
            ("verify", command_verify, "certify two-convexity and embeddedness of a scene"),
            ("build", command_build, "build the scene objects and report their topology"),
            ("flow", command_flow, "run the flow with surgery on every scene object"),
            ("isotopy", command_isotopy, "assemble and certify the isotopy to a marble graph"),
            ("pipeline", command_pipeline, "run everything and compare two tori")):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("scene", help="scene JSON file")
        sub.set_defaults(handler=handler)
    knot = commands.add_parser("knot", parents=[common], help="knot invariants of solid tori")
    knot.add_argument("input", help="torus mesh (.obj, .off) or scene JSON file")
    knot.add_argument("--compare", help="second torus to compare with")
    knot.add_argument("--object", help="name of the scene object to use")
    knot.set_defaults(handler=command_knot)
    matrix = commands.add_parser("matrix-extends", parents=[common],
                                 help="does the torus map of (a b; c d) extend over the solid torus")
    for entry in "abcd":
        matrix.add_argument(entry, type=int)
    matrix.set_defaults(handler=command_matrix_extends)
    export = commands.add_parser("export", parents=[common], help="write the scene objects as meshes")
    export.add_argument("scene", help="scene JSON file")
    export.add_argument("--format", choices=MESH_FORMATS, default="obj")
    export.set_defaults(handler=command_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(module)s: %(message)s")
    try:
        return args.handler(args, run_config(args))
    except (MarbleKitError, OSError) as error:
        print(json.dumps(error_payload(error)), file=sys.stderr)
        return exit_code(error)
