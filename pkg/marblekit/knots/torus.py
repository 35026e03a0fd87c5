"""Linear self-maps of the torus and the question whether they extend over the solid torus.

A matrix A = (a b; c d) in GL2(Z) acts on S^1 x S^1 by

    phi_A(e^{2 pi i x}, e^{2 pi i y}) = (e^{2 pi i (a x + b y)}, e^{2 pi i (c x + d y)}).

It extends to a diffeomorphism of D^2 x S^1 exactly if the meridian circle x -> phi_A(x, 1)
has degree zero in the second factor, which is the entry c."""
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from ..error import InputError, NumericalError

#: Sample count of the winding number quadrature
WINDING_SAMPLES = 1024


class TorusMatrix(NamedTuple):
    "An integer 2x2 matrix (a b; c d)"
    a: int
    b: int
    c: int
    d: int

    @property
    def determinant(self) -> int:
        return self.a * self.d - self.b * self.c

    def validate(self):
        "Raises InputError unless the matrix is integral and invertible over the integers"
        if any(int(entry) != entry for entry in self):
            raise InputError(f"Torus matrix {tuple(self)} has non-integer entries", witness=list(self))
        if abs(self.determinant) != 1:
            raise InputError(f"Torus matrix {tuple(self)} has determinant {self.determinant}",
                             witness=self.determinant)

    def torus_map(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        "The map phi_A on angle coordinates x, y in [0, 1), as a pair of unit complex numbers"
        return (np.exp(2j * np.pi * (self.a * x + self.b * y)),
                np.exp(2j * np.pi * (self.c * x + self.d * y)))


class TorusExtension(NamedTuple):
    "Outcome of the extension criterion"
    extends: bool
    #: (a, b, d) of the model extension, if it extends
    model: Optional[Tuple[int, int, int]] = None

    def to_dict(self) -> dict:
        return {"extends": self.extends, "model": None if self.model is None else list(self.model)}


def winding_number(values: np.ndarray) -> float:
    "Winding number around 0 of the closed loop through the complex `values`"
    steps = np.angle(np.roll(values, -1) / values)
    return float(steps.sum() / (2 * np.pi))


def degree_p2(matrix: TorusMatrix) -> int:
    """Degree of the second component of x -> phi_A(x, 1), which is the entry c

    The degree is confirmed by the winding number of the sampled map.

    Raises:
        InputError: A is not in GL2(Z)
        NumericalError: the quadrature disagrees with c
    """
    matrix.validate()
    x = np.arange(WINDING_SAMPLES) / WINDING_SAMPLES
    _, second = matrix.torus_map(x, np.zeros_like(x))
    winding = winding_number(second)
    if abs(winding - matrix.c) > 1e-6:
        raise NumericalError(f"Winding number {winding} of the meridian image differs from c = {matrix.c}",
                             witness=winding)
    return int(matrix.c)


def torus_matrix_extends(matrix: TorusMatrix) -> TorusExtension:
    "Whether phi_A extends over the solid torus, with the model parameters (a, b, d) if it does"
    if degree_p2(matrix) != 0:
        return TorusExtension(False)
    return TorusExtension(True, (int(matrix.a), int(matrix.b), int(matrix.d)))


def model_extension(extension: TorusExtension) -> Callable[[np.ndarray, np.ndarray, np.ndarray],
                                                            Tuple[np.ndarray, np.ndarray]]:
    """The map (r e^{2 pi i x}, e^{2 pi i y}) -> (r e^{2 pi i (a x + b y)}, e^{2 pi i d y}) of the
    solid torus, as a function of (r, x, y)

    Raises:
        InputError: the matrix does not extend
    """
    if not extension.extends:
        raise InputError("The torus map does not extend over the solid torus")
    a, b, d = extension.model

    def extended(r, x, y):
        r, x, y = (np.asarray(value, dtype=float) for value in (r, x, y))
        return r * np.exp(2j * np.pi * (a * x + b * y)), np.exp(2j * np.pi * d * y)
    return extended
