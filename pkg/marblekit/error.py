"The exceptions raised by marblekit"
from typing import Any, Optional


class MarbleKitError(Exception):
    "Base class of every error raised by this package"

    def __init__(self, message: str, witness: Any = None, dump: Optional[dict] = None):
        super().__init__(message)
        #: A location (point, sample index or pair) where the problem was detected
        self.witness = witness
        #: A JSON-serializable description of the state that led to the error
        self.dump = dump


class InputError(MarbleKitError):
    "The input is malformed or does not satisfy the documented shape"


class EmbeddingError(MarbleKitError):
    "A curve or surface is not embedded"


class SingularityError(MarbleKitError):
    "A tube degenerates because its radius reaches the curvature radius of the core"


class NumericalError(MarbleKitError):
    "A numerical procedure failed to produce a usable result"


class PreconditionError(MarbleKitError):
    "A precondition of a verification routine does not hold"


class ConfigurationError(MarbleKitError):
    "Domains and curves do not form a controlled configuration"


class ParameterError(MarbleKitError):
    "A construction parameter lies outside its admissible range"


class ClassificationError(MarbleKitError):
    "A discarded component matches no canonical neighborhood pattern"


class ReroutingError(MarbleKitError):
    "A transported string could not be routed around an exceptional ball"


class ProjectionError(MarbleKitError):
    "No regular projection direction was found for a knot diagram"


class SurgeryError(MarbleKitError):
    "A surgery would leave a piece that is not two-convex"
