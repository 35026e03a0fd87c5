"Reading and writing meshes (OBJ, OFF) and curves (JSON)"
import json
from typing import Union
from io import TextIOBase

import numpy as np
import trimesh

from ..error import InputError
from .curves import SkeletonCurve, curve_from_points
from .mesh import TriMesh

MESH_FORMATS = ("obj", "off")


def export_mesh(mesh: TriMesh, path: str, file_format: str = "obj"):
    """Writes an ASCII mesh file

    Raises:
        InputError: unknown format
        OSError: the file cannot be written
    """
    if file_format not in MESH_FORMATS:
        raise InputError(f"Unknown mesh format {file_format}", witness=file_format)
    data = trimesh.exchange.export.export_mesh(mesh.mesh, None, file_type=file_format)
    if isinstance(data, bytes):
        data = data.decode()
    with open(path, "w") as filepointer:
        filepointer.write(data)


def import_mesh(path: str, allow_boundary: bool = False) -> TriMesh:
    "Reads an OBJ or OFF file without merging or reordering vertices"
    loaded = trimesh.load(path, force="mesh", process=False)
    return TriMesh(loaded.vertices, loaded.faces, allow_boundary)


def save_curve(curve: SkeletonCurve, dest: Union[str, TextIOBase]):
    "Writes a curve as JSON object with the sample points and the closed flag"
    if isinstance(dest, str):
        with open(dest, "w") as filepointer:
            save_curve(curve, filepointer)
        return
    dest.write(json.dumps(curve.to_dict()))


def load_curve(source: Union[str, TextIOBase, dict], h_s=None) -> SkeletonCurve:
    "Reads a curve written by :py:func:`save_curve`; a bare list of points is read as closed curve"
    if isinstance(source, str):
        with open(source) as filepointer:
            return load_curve(filepointer, h_s)
    data = json.loads(source.read()) if isinstance(source, TextIOBase) else source
    if isinstance(data, list):
        data = {"points": data, "closed": True}
    if not isinstance(data, dict) or "points" not in data:
        raise InputError("A curve needs a list of points")
    return curve_from_points(np.asarray(data["points"], dtype=float), bool(data.get("closed", True)), h_s)
