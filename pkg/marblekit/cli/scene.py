"""Scene files: JSON descriptions of the domains a run starts from.

A scene looks like this::

    {
        "version": 1,
        "n": 2,
        "units": "lengths in multiples of b",
        "objects": [
            {"name": "ball", "type": "sphere", "radius": 1.0},
            {"name": "ring", "type": "torus", "big_radius": 3.0, "small_radius": 0.5},
            {"name": "trefoil", "type": "tube", "knot": "trefoil", "radius": 0.1},
            {"name": "graph", "type": "marbles", "centers": [[0, 0, 0], [4, 0, 0]],
             "marble_radius": 1.0, "string_radius": 0.05, "strings": [[[1, 0, 0], [3, 0, 0]]]},
            {"name": "scan", "type": "mesh", "path": "scan.obj"}
        ]
    }

Mesh paths are resolved relative to the scene file."""
import os
from io import TextIOBase
from json import JSONDecodeError, loads
from typing import Any, Dict, NamedTuple, Optional, Tuple, Union

import numpy as np

from ..configuration import ControlParams, DEFAULT_CONTROL, Tolerances
from ..error import InputError
from ..geometry.curves import (SkeletonCurve, circle_curve, curve_from_points, figure_eight_curve,
                               torus_knot_curve)
from ..geometry.io import import_mesh, load_curve
from ..geometry.profiles import ProfileSurface, ellipsoid_profile, sphere_profile
from ..geometry.tubes import TubeSurface, round_torus
from ..glue.caps import capped_cylinder_profile
from ..glue.junction import dumbbell_profile
from ..glue.marbles import build_marble_graph

SCENE_VERSION = 1

#: Keys holding lengths that have to be positive, per object type
RADIUS_KEYS = {
    "sphere": ("radius",),
    "ellipsoid": ("axial", "radial"),
    "capped-cylinder": ("radius", "length"),
    "dumbbell": ("bulb_radius", "waist"),
    "torus": ("big_radius", "small_radius"),
    "tube": ("radius",),
    "marbles": ("marble_radius", "string_radius"),
    "profile": (),
    "mesh": (),
}


class SceneObject(NamedTuple):
    "One named domain of a scene"
    name: str
    kind: str
    #: ProfileSurface, TubeSurface, MarbleComplex or TriMesh
    geometry: Any


class SceneFile(NamedTuple):
    "A validated scene"
    version: int
    n: int
    objects: Tuple[SceneObject, ...]
    units: str = ""
    #: Directory mesh paths are resolved against
    base: str = "."

    def get(self, name: str) -> SceneObject:
        for item in self.objects:
            if item.name == name:
                return item
        raise InputError(f"The scene has no object named {name}", witness=name)


def _knot_curve(entry: dict, h_s: Optional[float]) -> SkeletonCurve:
    knot = entry["knot"]
    if knot == "unknot":
        return circle_curve(entry.get("big_radius", 2.0), count=128, h_s=h_s)
    if knot == "trefoil":
        return torus_knot_curve(2, 3, entry.get("big_radius", 2.0), entry.get("small_radius", 0.5),
                                h_s=h_s)
    if knot == "torus-knot":
        return torus_knot_curve(entry["p"], entry["q"], entry.get("big_radius", 2.0),
                                entry.get("small_radius", 0.5), h_s=h_s)
    if knot == "figure-eight":
        return figure_eight_curve(h_s=h_s)
    raise InputError(f"Unknown knot fixture {knot}", witness=knot)


def _tube(entry: dict, n: int, h_s: Optional[float]) -> TubeSurface:
    if "knot" in entry:
        curve = _knot_curve(entry, h_s)
    elif "curve" in entry:
        curve = load_curve(entry["curve"], h_s)
    else:
        raise InputError("A tube needs a 'curve' or a 'knot'", witness=entry.get("name"))
    return TubeSurface(curve, float(entry["radius"]), n)


def _marbles(entry: dict, params: ControlParams, tolerances: Tolerances, sigma: float):
    strings = [curve_from_points(points, closed=False) for points in entry.get("strings", [])]
    return build_marble_graph(entry["centers"], strings, float(entry["marble_radius"]),
                              float(entry["string_radius"]), params, tolerances, sigma)


def _geometry(entry: dict, n: int, base: str, params: ControlParams, tolerances: Tolerances,
              sigma: float, h_s: Optional[float]):
    kind = entry["type"]
    if kind == "sphere":
        return sphere_profile(float(entry["radius"]), n, float(entry.get("center", 0.0)))
    if kind == "ellipsoid":
        return ellipsoid_profile(float(entry["axial"]), float(entry["radial"]), n)
    if kind == "capped-cylinder":
        return capped_cylinder_profile(float(entry["radius"]), float(entry["length"]), n)
    if kind == "dumbbell":
        return dumbbell_profile(float(entry["bulb_radius"]), float(entry["waist"]),
                                float(entry.get("neck_length", 0.0)), n, sigma)
    if kind == "profile":
        return ProfileSurface(np.asarray(entry["meridian"], dtype=float), n,
                              entry.get("end_caps", "capped"), entry.get("period"))
    if kind == "torus":
        return round_torus(float(entry["big_radius"]), float(entry["small_radius"]), n, h_s)
    if kind == "tube":
        return _tube(entry, n, h_s)
    if kind == "marbles":
        return _marbles(entry, params, tolerances, sigma)
    path = os.path.join(base, entry["path"])
    if not os.path.isfile(path):
        raise InputError(f"Mesh file {path} does not exist", witness=path)
    return import_mesh(path)


def _check_entry(index: int, entry: Any):
    if not isinstance(entry, dict) or "type" not in entry:
        raise InputError(f"Scene object {index} needs a 'type'", witness=index)
    kind = entry["type"]
    if kind not in RADIUS_KEYS:
        raise InputError(f"Unknown scene object type {kind}", witness=index)
    for key in RADIUS_KEYS[kind]:
        if key not in entry:
            raise InputError(f"Scene object {index} ({kind}) needs '{key}'", witness=index)
        try:
            value = float(entry[key])
        except (TypeError, ValueError) as err:
            raise InputError(f"Scene object {index}: '{key}' is not a number", witness=index) from err
        if not value > 0:
            raise InputError(f"Scene object {index}: '{key}' has to be positive, got {entry[key]}",
                             witness={"object": index, "key": key})
    if kind == "mesh" and "path" not in entry:
        raise InputError(f"Scene object {index} needs a mesh 'path'", witness=index)


def load_scene(source: Union[str, TextIOBase, dict], params: ControlParams = DEFAULT_CONTROL,
               tolerances: Tolerances = Tolerances(), sigma: float = 0.5,
               h_s: Optional[float] = None) -> SceneFile:
    """Reads and validates a scene

    Args:
        source: a path, an open text file or an already parsed dict
        params: control parameters marble graphs are built with
        h_s: arclength spacing of generated curves
    Raises:
        InputError: the scene does not follow the format, a radius is not positive or a mesh
            file is missing
    """
    base = "."
    try:
        if isinstance(source, str):
            base = os.path.dirname(os.path.abspath(source))
            with open(source) as filepointer:
                data = loads(filepointer.read())
        elif isinstance(source, TextIOBase):
            data = loads(source.read())
        else:
            data = source
    except JSONDecodeError as err:
        raise InputError(f"The scene is no valid JSON: {err}", witness=err.lineno) from err
    if not isinstance(data, dict):
        raise InputError("A scene is a JSON object")
    version = data.get("version")
    if version != SCENE_VERSION:
        raise InputError(f"Unsupported scene version {version}", witness=version)
    n = data.get("n", 2)
    if not isinstance(n, int) or n < 2:
        raise InputError(f"The dimension has to be an integer >= 2, got {n}", witness=n)
    entries = data.get("objects")
    if not isinstance(entries, list) or not entries:
        raise InputError("A scene needs a nonempty list of objects")
    for index, entry in enumerate(entries):
        _check_entry(index, entry)
    names: Dict[str, int] = {}
    objects = []
    for index, entry in enumerate(entries):
        name = str(entry.get("name", f"object{index}"))
        if name in names:
            raise InputError(f"Duplicate object name {name}", witness=name)
        names[name] = index
        try:
            geometry = _geometry(entry, n, base, params, tolerances, sigma, h_s)
        except KeyError as err:
            raise InputError(f"Scene object {name} misses the key {err}", witness=name) from err
        objects.append(SceneObject(name, entry["type"], geometry))
    return SceneFile(version, n, tuple(objects), str(data.get("units", "")), base)
