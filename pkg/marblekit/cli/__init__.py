"""Command line entry point, scene files and the end-to-end pipeline."""

from .scene import SceneFile, SceneObject, load_scene
from .pipeline import (Artifacts, ObjectRun, PipelineResult, export_geometry, run_pipeline,
                       run_object, verify_object, flow_object, isotopy_to_marbles, string_radius)
from .main import main, build_parser, exit_code, error_payload
