from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()


class BoxSide(StrEnum):
    XMIN = "xmin"
    XMAX = "xmax"
    YMIN = "ymin"
    YMAX = "ymax"
    ZMIN = "zmin"
    ZMAX = "zmax"


class SizeMeasure(StrEnum):
    """Element diameter statistic a convergence study fits against."""

    MAX = "max"
    MEAN = "mean"


class MomentMode(StrEnum):
    NODAL = "nodal"
    MOMENT = "moment"


# Strain/stress 6-vector ordering; shear entries are tensor components.
VOIGT_PAIRS: tuple[tuple[int, int], ...] = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 0))
VOIGT_LABELS: tuple[str, ...] = ("11", "22", "33", "12", "23", "31")

PLANARITY_TOL = 1e-8
AREA_TOL = 1e-12
CLOSURE_TOL = 1e-10
MERGE_TOL = 1e-9

PATCH_DISPLACEMENT_TOL = 1e-10
PATCH_STRESS_TOL = 1e-9

WORKERS_ENV_VAR = "POLYVEM_WORKERS"


__all__ = [
    "AREA_TOL",
    "BoxSide",
    "CLOSURE_TOL",
    "MERGE_TOL",
    "MomentMode",
    "PATCH_DISPLACEMENT_TOL",
    "PATCH_STRESS_TOL",
    "PLANARITY_TOL",
    "SizeMeasure",
    "VOIGT_LABELS",
    "VOIGT_PAIRS",
    "WORKERS_ENV_VAR",
]
