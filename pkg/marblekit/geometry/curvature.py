"Contains the CurvatureData record of pointwise principal curvatures"
from typing import NamedTuple, Sequence, Tuple

import numpy as np


class CurvatureData(NamedTuple):
    """Principal curvatures at one point, sorted ascending, with derived quantities

    Build instances with :py:func:`curvature_data`, which takes care of sorting."""

    principal: Tuple[float, ...]
    #: Mean curvature, the sum of the principal curvatures
    H: float
    #: Norm of the second fundamental form
    A: float

    @property
    def two_convex_margin(self) -> float:
        "lambda_1 + lambda_2"
        return self.principal[0] + self.principal[1]

    @property
    def lambda_min(self) -> float:
        return self.principal[0]


def curvature_data(principal: Sequence[float]) -> CurvatureData:
    "Sorts the given principal curvatures and derives H and |A|"
    values = tuple(sorted(float(value) for value in principal))
    return CurvatureData(values, float(sum(values)), float(np.sqrt(sum(v * v for v in values))))


def curvature_rows(principal: np.ndarray) -> np.ndarray:
    "Sorts every row of an (N, n) array of principal curvatures"
    return np.sort(np.asarray(principal, dtype=float), axis=1)


def margins(rows: np.ndarray) -> np.ndarray:
    "lambda_1 + lambda_2 of every sorted row"
    return rows[:, 0] + rows[:, 1]
