"Contains unit tests for the scene format and the command line"
import io
import json
import os
import unittest
from contextlib import redirect_stderr, redirect_stdout
from tempfile import TemporaryDirectory

from marblekit.cli.main import EXIT_CLASSIFICATION, EXIT_INPUT, EXIT_IO, error_payload, exit_code, main
from marblekit.cli.pipeline import run_pipeline
from marblekit.cli.scene import load_scene
from marblekit.configuration import DEFAULT_CONFIG, Resolution
from marblekit.error import InputError, ParameterError, ReroutingError
from marblekit.glue.complex import MarbleComplex
from marblekit.isotopy.path import MONOTONE
from marblekit.knots.verdict import DISTINCT, SAME

from .example_scenes import (BAD_THRESHOLDS, DUMBBELL_MARBLES_SCENE, DUMBBELL_SCENE, SPHERE_SCENE,
                             TWO_TORI_SCENE, UNKNOT_TREFOIL_SCENE, UNKNOT_TUBES_SCENE, write_json)


def run(argv):
    "Runs the command line; returns the exit code, the parsed stdout and the stderr text"
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    text = out.getvalue()
    return code, json.loads(text) if text.strip() else None, err.getvalue()


class SceneTests(unittest.TestCase):
    "Unit tests for reading scenes"

    def test_sphere_scene(self):
        scene = load_scene(SPHERE_SCENE)
        self.assertEqual(scene.n, 2)
        self.assertEqual([item.name for item in scene.objects], ["ball"])
        self.assertEqual(scene.get("ball").geometry.euler_characteristic(), 2)

    def test_unknown_object(self):
        with self.assertRaises(InputError):
            load_scene(SPHERE_SCENE).get("cube")

    def test_marbles(self):
        "Marble objects are glued into marble complexes"
        geometry = load_scene(DUMBBELL_MARBLES_SCENE).objects[0].geometry
        self.assertIsInstance(geometry, MarbleComplex)
        self.assertEqual(len(geometry.marbles), 2)

    def test_bad_version(self):
        with self.assertRaises(InputError):
            load_scene({**SPHERE_SCENE, "version": 7})

    def test_unknown_type(self):
        with self.assertRaises(InputError):
            load_scene({"version": 1, "objects": [{"type": "cube", "radius": 1.0}]})

    def test_negative_radius(self):
        with self.assertRaises(InputError):
            load_scene({"version": 1, "objects": [{"type": "sphere", "radius": -1.0}]})

    def test_duplicate_names(self):
        entry = {"name": "ball", "type": "sphere", "radius": 1.0}
        with self.assertRaises(InputError):
            load_scene({"version": 1, "objects": [entry, entry]})

    def test_invalid_json(self):
        with TemporaryDirectory() as directory:
            path = os.path.join(directory, "scene.json")
            with open(path, "w") as filepointer:
                filepointer.write("{\"version\": 1,")
            with self.assertRaises(InputError):
                load_scene(path)


class ErrorTests(unittest.TestCase):
    "Unit tests for exit codes and error output"

    def test_exit_codes(self):
        self.assertEqual(exit_code(ParameterError("x")), EXIT_INPUT)
        self.assertEqual(exit_code(ReroutingError("x")), EXIT_CLASSIFICATION)
        self.assertEqual(exit_code(FileNotFoundError("x")), EXIT_IO)

    def test_payload(self):
        "Errors are reported with their class, message and witness"
        payload = error_payload(InputError("bad radius", witness=-1.0, dump={"radius": -1.0}))
        self.assertEqual(payload, {"error": "InputError", "message": "bad radius", "witness": -1.0,
                                   "dump": {"radius": -1.0}})


class CommandTests(unittest.TestCase):
    "Unit tests for the subcommands"

    def setUp(self):
        self.directory = TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.sphere = write_json(self.directory.name, "sphere.json", SPHERE_SCENE)
        self.out = os.path.join(self.directory.name, "out")

    def test_verify(self):
        "A sphere is certified and the report is written with the configuration"
        code, result, _ = run(["verify", self.sphere, "--out", self.out])
        self.assertEqual(code, 0)
        self.assertTrue(result["ball"]["passed"])
        with open(os.path.join(self.out, "verify.json")) as filepointer:
            written = json.load(filepointer)
        self.assertIn("config", written)
        self.assertIn("ball", written["objects"])

    def test_build_marbles(self):
        "Building a marble scene reports the graph and writes its mesh"
        scene = write_json(self.directory.name, "marbles.json", DUMBBELL_MARBLES_SCENE)
        code, result, _ = run(["build", scene, "--out", self.out, "--resolution", "0.3"])
        self.assertEqual(code, 0)
        self.assertEqual(result["pair"]["graph"]["kind"], "tree")
        self.assertEqual(result["pair"]["euler_characteristic"], 2)
        self.assertEqual(result["pair"]["files"], ["pair_0.obj"])

    def test_export(self):
        "Exported OFF meshes are watertight spheres"
        code, result, _ = run(["export", self.sphere, "--format", "off", "--out", self.directory.name,
                               "--resolution", "0.25"])
        self.assertEqual(code, 0)
        self.assertEqual(result["ball"]["euler_characteristic"], 2)
        self.assertTrue(result["ball"]["watertight"])
        self.assertTrue(os.path.exists(os.path.join(self.directory.name, "ball.off")))

    def test_flow_log(self):
        "The event log of a single object starts with the configuration"
        scene = write_json(self.directory.name, "small.json",
                           {"version": 1, "objects": [{"name": "drop", "type": "sphere", "radius": 0.24}]})
        log = os.path.join(self.directory.name, "drop.jsonl")
        code, result, _ = run(["flow", scene, "--log", log])
        self.assertEqual(code, 0)
        self.assertEqual(result["drop"]["discards"], 1)
        with open(log) as filepointer:
            first = json.loads(filepointer.readline())
        self.assertEqual(first["type"], "config")

    def test_knot(self):
        "The core of a round torus is the unknot"
        tori = write_json(self.directory.name, "tori.json", TWO_TORI_SCENE)
        code, result, _ = run(["knot", tori, "--object", "small"])
        self.assertEqual(code, 0)
        self.assertEqual(result["invariants"][0]["determinant"], 1)

    def test_several_tori_need_a_choice(self):
        tori = write_json(self.directory.name, "tori.json", TWO_TORI_SCENE)
        code, _, errors = run(["knot", tori])
        self.assertEqual(code, EXIT_INPUT)
        self.assertEqual(json.loads(errors)["error"], "InputError")

    def test_matrix_extends(self):
        code, result, _ = run(["matrix-extends", "1", "0", "0", "1"])
        self.assertEqual(code, 0)
        self.assertTrue(result["extends"])
        self.assertEqual(result["model"], [1, 0, 1])
        code, result, _ = run(["matrix-extends", "0", "1", "1", "0"])
        self.assertEqual(code, 0)
        self.assertFalse(result["extends"])

    def test_singular_matrix(self):
        code, _, _ = run(["matrix-extends", "1", "1", "1", "1"])
        self.assertEqual(code, EXIT_INPUT)

    def test_missing_scene(self):
        "Unreadable files are I/O errors"
        code, _, errors = run(["verify", os.path.join(self.directory.name, "missing.json")])
        self.assertEqual(code, EXIT_IO)
        self.assertEqual(json.loads(errors)["error"], "FileNotFoundError")

    def test_bad_parameters(self):
        "Thresholds out of order are rejected before anything runs"
        params = write_json(self.directory.name, "params.json", BAD_THRESHOLDS)
        code, result, errors = run(["verify", self.sphere, "--params", params])
        self.assertEqual(code, EXIT_INPUT)
        self.assertIsNone(result)
        self.assertEqual(json.loads(errors)["error"], "ParameterError")

    def test_bad_scene_version(self):
        scene = write_json(self.directory.name, "old.json", {**SPHERE_SCENE, "version": 0})
        code, _, _ = run(["verify", scene])
        self.assertEqual(code, EXIT_INPUT)


class PipelineTests(unittest.TestCase):
    "Whole scenes through flow, isotopy, thin tori and the knot verdict"

    config = DEFAULT_CONFIG._replace(resolution=Resolution(frames=8))

    def test_two_unknots(self):
        "Two unknotted thin tori lie in the same path component"
        result = run_pipeline(load_scene(UNKNOT_TUBES_SCENE), self.config)
        self.assertEqual(set(result.runs), {"small", "large"})
        self.assertTrue(all(run.torus is not None for run in result.runs.values()))
        self.assertEqual(result.verdict.verdict, SAME)

    def test_unknot_and_trefoil(self):
        "An unknotted and a knotted torus are told apart by the determinant"
        result = run_pipeline(load_scene(UNKNOT_TREFOIL_SCENE), self.config)
        self.assertEqual(result.runs["unknot"].invariants.determinant, 1)
        self.assertEqual(result.runs["trefoil"].invariants.determinant, 3)
        self.assertEqual(result.verdict.verdict, DISTINCT)

    def test_dumbbell_command(self):
        "The dumbbell scene runs through the command line to a certified marble tree"
        with TemporaryDirectory() as directory:
            scene = write_json(directory, "dumbbell.json", DUMBBELL_SCENE)
            params = write_json(directory, "params.json", {"resolution": {"frames": 8}})
            code, result, _ = run(["isotopy", scene, "--params", params])
        self.assertEqual(code, 0)
        self.assertEqual(result["dumbbell"]["claim"], MONOTONE)
        self.assertTrue(result["dumbbell"]["certificate"]["passed"])
