"Contains the parameter records used throughout marblekit, their default values and JSON (de)serialization"
import os
from io import TextIOBase
from json import JSONDecodeError, loads, dumps
from typing import NamedTuple, Optional, Union, Type, TypeVar

from .error import ParameterError


class ControlParams(NamedTuple):
    """The quantitative control of a domain and of the curves attached to it

    Customize the values where the defaults won't fit you:

        >>> params = ControlParams(n=3, beta=0.2)
    """

    #: Dimension of the hypersurface; domains live in n+1 dimensional space
    n: int = 2
    #: Noncollapsing constant. Interior and exterior balls of radius alpha/H must fit.
    #: Dimensionless, in the open interval (0, n-1). The round cylinder attains n-1 exactly,
    #: so a domain with a cylindrical neck is never controlled for alpha >= n-1.
    alpha: float = 0.5
    #: Required ratio between the two-convexity margin and the mean curvature
    beta: float = 0.1
    #: Lower bound of the mean curvature (1/length)
    c_H: float = 0.5
    #: Upper bound of |A| + |grad A|. The two terms have different units, the sum is taken as is.
    C_A: float = 1.0e4
    #: Curve control scale (length). Curvature, its derivative, injectivity radius and
    #: separation of strings are measured against it.
    b: float = 0.3

    def validate(self):
        "Raises ParameterError naming the first field outside its admissible range"
        if self.n < 2:
            raise ParameterError("n must be at least 2", witness="n")
        for field in ("alpha", "beta", "c_H", "C_A", "b"):
            if not getattr(self, field) > 0:
                raise ParameterError(f"{field} must be positive", witness=field)
        if self.alpha >= self.n - 1:
            raise ParameterError("alpha must lie below n-1", witness="alpha")


class SurgeryParams(NamedTuple):
    """Parameters of the flow with surgery

    The three curvature thresholds decide when surgery is triggered (`H_trig`), where necks
    are cut (`H_neck`) and which components are thrown away (`H_thick`)."""

    #: Neck precision: allowed C0 plus C1 deviation from the round cylinder after rescaling,
    #: measured over the surgery window
    delta: float = 0.3
    #: Canonical neighborhood precision used by the classifier
    epsilon: float = 0.1
    #: Cap separation, in units of the neck radius
    Gamma: float = 4.0
    #: Size of compact caps, in units of 1/H
    C: float = 6.0
    #: Neck radius at which surgery is performed (length). Derived from `H_neck` if unset.
    r_neck: Optional[float] = None
    #: Components with H >= H_thick everywhere are discarded (1/length)
    H_thick: float = 8.0
    #: Only regions with H >= H_neck qualify as surgery necks (1/length)
    H_neck: float = 16.0
    #: Surgery is triggered once the maximal mean curvature reaches this value (1/length)
    H_trig: float = 32.0
    #: Half-length of the window that classified necks must be cylindrical in, in neck radii
    neck_window: float = 5.0
    #: Half-length of the window that surgery necks must be delta-cylindrical in, in neck radii
    surgery_window: float = 1.0
    #: Minimal admissible ratios H_neck/H_thick and H_trig/H_neck
    min_ratio: float = 1.5
    #: Upper caps for delta and epsilon
    max_precision: float = 0.3
    #: Spacing factor of neck point sets on tubes and loops
    neck_spacing: float = 100.0
    #: Time after which a run is aborted
    T_max: float = 10.0

    def neck_radius(self, n: int) -> float:
        "Returns the neck radius, which is (n-1)/H_neck unless set explicitly"
        if self.r_neck is not None:
            return self.r_neck
        return (n - 1) / self.H_neck

    def validate(self):
        "Raises ParameterError naming the first field outside its admissible range"
        for field in ("delta", "epsilon"):
            value = getattr(self, field)
            if not 0 < value <= self.max_precision:
                raise ParameterError(f"{field} must lie in (0, {self.max_precision}]",
                                     witness=field)
        if not 0 < self.H_thick < self.H_neck < self.H_trig:
            raise ParameterError("thresholds must satisfy 0 < H_thick < H_neck < H_trig",
                                 witness="H_thick")
        if self.H_neck / self.H_thick < self.min_ratio:
            raise ParameterError("H_neck/H_thick below the minimal ratio", witness="H_neck")
        if self.H_trig / self.H_neck < self.min_ratio:
            raise ParameterError("H_trig/H_neck below the minimal ratio", witness="H_trig")
        if self.Gamma <= 1 or self.C <= 0 or self.T_max <= 0:
            raise ParameterError("Gamma, C and T_max out of range", witness="Gamma")
        if not 0 < self.surgery_window <= self.neck_window:
            raise ParameterError("surgery_window must lie in (0, neck_window]",
                                 witness="surgery_window")


class Resolution(NamedTuple):
    "Discretization settings. Unset lengths default to 1/64 of the smallest feature radius."

    #: Meridian sample spacing of profile surfaces
    h_x: Optional[float] = None
    #: Arclength spacing of skeleton curves
    h_s: Optional[float] = None
    #: Target edge length of triangle meshes
    mesh_edge: Optional[float] = None
    #: Number of samples around a tube cross section or a surface of revolution
    angular: int = 32
    #: Minimal number of frames per isotopy segment
    frames: int = 64


class Tolerances(NamedTuple):
    "Tolerances of the verifiers"

    #: A two-convexity margin has to exceed this value (1/length)
    tol: float = 1.0e-9
    #: Embeddedness tolerance; defaults to a tenth of the mesh resolution
    tol_emb: Optional[float] = None
    #: Maximal Hausdorff distance of consecutive isotopy frames; defaults to feature scale/100
    frame_tol: Optional[float] = None
    #: Allowed deviation from orthogonal contact, in degrees
    orthogonality_deg: float = 1.0
    #: Distance tolerances are this factor times b
    distance_factor: float = 1.0e-3


class RunConfig(NamedTuple):
    "Everything that influences a run. It is written into every artifact of the run."

    control: ControlParams = ControlParams()
    surgery: SurgeryParams = SurgeryParams()
    resolution: Resolution = Resolution()
    tolerances: Tolerances = Tolerances()
    #: Seed of every random perturbation (projection directions, general position nudges)
    seed: int = 0
    #: Worker count; falls back to MARBLEKIT_THREADS, then to the CPU count
    threads: Optional[int] = None
    #: String radius used when gluing strings or undoing necks, in units of the neck radius
    string_ratio: float = 0.25
    #: Marble radius in units of the tube radius of a discarded tube or loop, or of the
    #: inradius of a discarded convex component; in (0, 1)
    marble_ratio: float = 0.5
    #: Shape exponent of the rotationally symmetric junction, in (0, 1)
    junction_sigma: float = 0.5

    def validate(self):
        "Validates all nested records"
        self.control.validate()
        self.surgery.validate()
        if not 0 < self.junction_sigma < 1:
            raise ParameterError("junction_sigma must lie in (0, 1)", witness="junction_sigma")
        if self.string_ratio <= 0:
            raise ParameterError("string_ratio must be positive", witness="string_ratio")
        if not 0 < self.marble_ratio < 1:
            raise ParameterError("marble_ratio must lie in (0, 1)", witness="marble_ratio")
        if self.resolution.angular < 8:
            raise ParameterError("at least 8 angular samples are required", witness="angular")

    def worker_count(self) -> int:
        "Number of worker threads to use"
        if self.threads is not None:
            return max(1, self.threads)
        env = os.environ.get("MARBLEKIT_THREADS")
        if env:
            try:
                return max(1, int(env))
            except ValueError as err:
                raise ParameterError("MARBLEKIT_THREADS must be an integer",
                                     witness="MARBLEKIT_THREADS") from err
        return os.cpu_count() or 1


DEFAULT_CONTROL = ControlParams()
DEFAULT_SURGERY = SurgeryParams()
DEFAULT_CONFIG = RunConfig()

Record = TypeVar("Record", ControlParams, SurgeryParams, Resolution, Tolerances)


def record_from_dict(record_type: Type[Record], values: dict) -> Record:
    "Builds a parameter record from a dict, filling in defaults and rejecting unknown keys"
    unknown = set(values) - set(record_type._fields)
    if unknown:
        raise ParameterError(f"Unknown {record_type.__name__} fields: {sorted(unknown)}",
                             witness=sorted(unknown))
    record = record_type(**values)
    if hasattr(record, "validate"):
        record.validate()
    return record


def _read_source(source: Union[str, TextIOBase, dict]) -> dict:
    file_open = None
    opened_source = source
    if isinstance(opened_source, str):
        opened_source = open(source, "r")
        file_open = opened_source
    try:
        if isinstance(opened_source, TextIOBase):
            opened_source = loads(opened_source.read())
    except JSONDecodeError as err:
        raise ParameterError(f"Parameters are not valid JSON: {err}") from err
    finally:
        if file_open is not None:
            file_open.close()
    if not isinstance(opened_source, dict):
        raise ParameterError("Parameters have to be a JSON object")
    return opened_source


def load_config(source: Union[str, TextIOBase, dict]) -> RunConfig:
    """Load a run configuration from a source

    Args:
        source:
            Either an open text file containing a JSON dict, or the path to it, or a dictionary.
            Missing keys take their default values.
    Returns:
        The validated RunConfig object
    """
    values = dict(_read_source(source))
    nested = {
        "control": ControlParams,
        "surgery": SurgeryParams,
        "resolution": Resolution,
        "tolerances": Tolerances,
    }
    for key, record_type in nested.items():
        if key in values:
            values[key] = record_from_dict(record_type, values[key])
    unknown = set(values) - set(RunConfig._fields)
    if unknown:
        raise ParameterError(f"Unknown RunConfig fields: {sorted(unknown)}", witness=sorted(unknown))
    config = RunConfig(**values)
    config.validate()
    return config


def load_params(source: Union[str, TextIOBase, dict], record_type: Type[Record]) -> Record:
    "Loads a single parameter record, e.g. the surgery parameters given on the command line"
    return record_from_dict(record_type, _read_source(source))


def config_to_dict(config: NamedTuple) -> dict:
    "Converts nested parameter records into plain dicts"
    return {
        key: config_to_dict(value) if hasattr(value, "_asdict") else value
        for key, value in config._asdict().items()
    }


NoneType: object = type(None)


def save_config(config: RunConfig, dest: Union[str, TextIOBase, NoneType] = None) -> Optional[dict]:
    """Saves a config to a file or a dictionary

    Args:
        config:
            The config.
        dest:
            Either a path, or an already write-opened text file, or nothing.
    Returns:
        If no destination was given, returns the config as dictionary"""
    if dest is None:
        return config_to_dict(config)
    if isinstance(dest, str):
        with open(dest, "w") as filepointer:
            save_config(config, filepointer)
    elif isinstance(dest, TextIOBase):
        dest.write(dumps(save_config(config)))
    else:
        raise TypeError("`dest` has to be a valid destination")
