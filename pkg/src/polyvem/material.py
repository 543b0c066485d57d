"""Linear elastic material models and their 6x6 matrix forms.

Strain and stress 6-vectors use the ordering (11, 22, 33, 12, 23, 31) with
tensor shear components. ``components`` stores C_(ijkl) for those index
pairs; ``D`` carries the factors 2 and 4 that the consistency term needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .constants import VOIGT_PAIRS
from .exceptions import MaterialError

# 1 for normal entries, 2 for shear entries
_SHEAR_FACTORS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])


@dataclass(frozen=True, eq=False)
class MaterialModel:
    components: np.ndarray
    youngs_modulus: float | None = None
    poisson_ratio: float | None = None

    def __post_init__(self) -> None:
        table = np.array(self.components, dtype=float)
        if table.shape != (6, 6):
            raise MaterialError(f"elasticity table must be 6x6, got {table.shape}")
        if not np.isfinite(table).all():
            raise MaterialError("elasticity constants must be finite")
        if not np.allclose(table, table.T, rtol=1e-12, atol=1e-14 * np.abs(table).max()):
            raise MaterialError("elasticity tensor must have major symmetry")
        table = 0.5 * (table + table.T)
        try:
            np.linalg.cholesky(_SHEAR_FACTORS[:, None] * table * _SHEAR_FACTORS[None, :])
        except np.linalg.LinAlgError:
            raise MaterialError("material matrix D is not positive definite") from None
        table.setflags(write=False)
        object.__setattr__(self, "components", table)

    @classmethod
    def isotropic(cls, youngs_modulus: float, poisson_ratio: float) -> MaterialModel:
        if not youngs_modulus > 0.0:
            raise MaterialError(f"Young's modulus must be positive, got {youngs_modulus}")
        if not -1.0 < poisson_ratio < 0.5:
            raise MaterialError(
                f"Poisson's ratio must lie in (-1, 0.5), got {poisson_ratio}"
            )
        lam, mu = _lame(youngs_modulus, poisson_ratio)
        table = np.zeros((6, 6))
        table[:3, :3] = lam
        table[:3, :3] += 2.0 * mu * np.eye(3)
        table[3:, 3:] = mu * np.eye(3)
        return cls(table, youngs_modulus=float(youngs_modulus), poisson_ratio=float(poisson_ratio))

    @classmethod
    def anisotropic(cls, components: np.ndarray) -> MaterialModel:
        """Full material from the 6x6 table of C_(ijkl) in (11,22,33,12,23,31) order."""

        return cls(np.asarray(components, dtype=float))

    @property
    def is_isotropic(self) -> bool:
        return self.youngs_modulus is not None

    @property
    def lame(self) -> tuple[float, float]:
        if self.youngs_modulus is None or self.poisson_ratio is None:
            raise MaterialError("Lame constants are only defined for isotropic materials")
        return _lame(self.youngs_modulus, self.poisson_ratio)

    @cached_property
    def D(self) -> np.ndarray:
        matrix = _SHEAR_FACTORS[:, None] * self.components * _SHEAR_FACTORS[None, :]
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def tensor(self) -> np.ndarray:
        """Full 3x3x3x3 tensor with major and minor symmetries."""

        full = np.zeros((3, 3, 3, 3))
        for a, (i, j) in enumerate(VOIGT_PAIRS):
            for b, (k, l) in enumerate(VOIGT_PAIRS):
                value = self.components[a, b]
                full[i, j, k, l] = full[j, i, k, l] = value
                full[i, j, l, k] = full[j, i, l, k] = value
        full.setflags(write=False)
        return full

    def stress(self, strain: np.ndarray) -> np.ndarray:
        """Hooke's law on tensor-component strain 6-vectors, shape (..., 6)."""

        strain = np.asarray(strain, dtype=float)
        if strain.shape[-1] != 6:
            raise MaterialError(f"strain must have 6 components, got shape {strain.shape}")
        return (strain * _SHEAR_FACTORS) @ self.components.T


def _lame(youngs_modulus: float, poisson_ratio: float) -> tuple[float, float]:
    lam = youngs_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio))
    mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio))
    return lam, mu


def material_D(material: MaterialModel) -> np.ndarray:
    return material.D


def strain_from_gradient(gradient: np.ndarray) -> np.ndarray:
    """Symmetric part of displacement gradients (..., 3, 3) as 6-vectors."""

    gradient = np.asarray(gradient, dtype=float)
    sym = 0.5 * (gradient + np.swapaxes(gradient, -1, -2))
    return np.stack([sym[..., i, j] for i, j in VOIGT_PAIRS], axis=-1)


def voigt_to_tensor(values: np.ndarray) -> np.ndarray:
    """Expand 6-vectors (..., 6) to symmetric 3x3 tensors (..., 3, 3)."""

    values = np.asarray(values, dtype=float)
    out = np.empty(values.shape[:-1] + (3, 3))
    for a, (i, j) in enumerate(VOIGT_PAIRS):
        out[..., i, j] = values[..., a]
        out[..., j, i] = values[..., a]
    return out


def frobenius_squared(values: np.ndarray) -> np.ndarray:
    """Squared Frobenius norm of symmetric tensors given as 6-vectors."""

    values = np.asarray(values, dtype=float)
    return (values[..., :3] ** 2).sum(axis=-1) + 2.0 * (values[..., 3:] ** 2).sum(axis=-1)


__all__ = [
    "MaterialModel",
    "frobenius_squared",
    "material_D",
    "strain_from_gradient",
    "voigt_to_tensor",
]
