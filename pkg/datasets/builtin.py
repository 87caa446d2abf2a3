"""
Built-in Datasets
=================
The two worked examples shipped with the package:

    eight-schools   SAT coaching effects, k=8, p=1, m=1 (intercept only)
    hospital-27     two outcomes of 27 hospitals, k=27, p=2, m=2 (intercept
                    and one covariate), V_j = Sigma / n_j
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from numpy.typing import NDArray

from model.errors import DatasetError
from model.types import Dataset, GroupObservation

EIGHT_SCHOOLS = "eight-schools"
HOSPITAL_27 = "hospital-27"

# ==================== EIGHT SCHOOLS ====================

# Estimated coaching effects and their standard errors, schools A-H
EIGHT_SCHOOLS_Y = (28.0, 8.0, -3.0, 7.0, -1.0, 1.0, 18.0, 12.0)
EIGHT_SCHOOLS_SD = (15.0, 10.0, 16.0, 11.0, 9.0, 11.0, 10.0, 18.0)

# ==================== HOSPITALS ====================

# (Y1, Y2, x2, n) per hospital: two non-surgical problem rates (percent),
# one covariate, and the number of cases
HOSPITAL_ROWS = (
    (10.18, 15.06, 0.75, 24),
    (11.55, 17.97, 0.62, 32),
    (16.21, 12.50, 0.66, 32),
    (12.31, 14.88, 0.26, 43),
    (12.88, 15.21, 0.96, 44),
    (11.84, 17.69, 0.44, 45),
    (14.82, 16.91, 0.44, 48),
    (13.05, 15.07, 0.55, 49),
    (12.43, 12.01, 0.33, 51),
    (8.35, 9.43, 0.47, 53),
    (17.97, 26.82, 0.48, 56),
    (11.84, 15.64, 0.34, 58),
    (12.43, 13.94, 0.28, 58),
    (14.73, 15.40, 0.63, 60),
    (15.80, 11.50, 0.26, 61),
    (14.81, 20.56, 0.56, 62),
    (11.14, 13.02, 0.02, 62),
    (17.12, 14.60, 0.41, 66),
    (16.93, 16.28, 0.56, 68),
    (11.02, 13.52, 0.34, 68),
    (14.69, 16.49, 0.56, 72),
    (10.48, 14.24, 0.79, 77),
    (15.82, 15.13, 0.47, 87),
    (12.66, 14.99, 0.71, 122),
    (10.41, 17.25, 0.45, 124),
    (10.32, 10.13, 0.05, 149),
    (13.72, 18.18, 0.77, 198),
)

HOSPITAL_SIGMA = ((148.87, 140.43), (140.43, 490.60))


@dataclass(frozen=True, eq=False)
class BuiltinDataset:
    """A named dataset plus auxiliary matrices (Sigma for the hospital data)"""

    name: str
    dataset: Dataset
    description: str = ""
    aux: Dict[str, NDArray[np.float64]] = field(default_factory=dict, repr=False)


def eight_schools() -> BuiltinDataset:
    groups = [
        GroupObservation(y=[y], V=[[sd * sd]], x=[1.0])
        for y, sd in zip(EIGHT_SCHOOLS_Y, EIGHT_SCHOOLS_SD)
    ]
    return BuiltinDataset(
        name=EIGHT_SCHOOLS,
        dataset=Dataset(groups=groups, label=EIGHT_SCHOOLS),
        description="SAT coaching effects in 8 schools (k=8, p=1, m=1)",
    )


def hospital_27() -> BuiltinDataset:
    sigma = np.array(HOSPITAL_SIGMA)
    groups = [
        GroupObservation(y=[y1, y2], V=sigma / n, x=[1.0, x2])
        for y1, y2, x2, n in HOSPITAL_ROWS
    ]
    return BuiltinDataset(
        name=HOSPITAL_27,
        dataset=Dataset(groups=groups, label=HOSPITAL_27),
        description="Non-surgical problem rates of 27 hospitals (k=27, p=2, m=2)",
        aux={
            'Sigma': sigma,
            'n': np.array([row[3] for row in HOSPITAL_ROWS], dtype=float),
        },
    )


BUILTINS: Dict[str, Callable[[], BuiltinDataset]] = {
    EIGHT_SCHOOLS: eight_schools,
    HOSPITAL_27: hospital_27,
}


def get_builtin(name: str) -> BuiltinDataset:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise DatasetError(f"unknown builtin dataset '{name}' (known: {', '.join(BUILTINS)})") from None


def list_builtins() -> List[BuiltinDataset]:
    return [factory() for factory in BUILTINS.values()]


def is_builtin(name: Optional[str]) -> bool:
    return name in BUILTINS
