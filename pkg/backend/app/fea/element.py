from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import ParameterError


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not (0.0 < nu < 0.5):
        raise ParameterError(f"Poisson ratio must lie in (0, 0.5), got {nu}")
    return nu


def element_stiffness(nu: float) -> np.ndarray:
    """Bilinear plane-stress stiffness of a unit square with unit modulus.

    Closed-form integration in the 88-line convention (node order
    lower-left, lower-right, upper-right, upper-left).
    """
    return _element_stiffness(_check_nu(nu)).copy()


@lru_cache(maxsize=8)
def _element_stiffness(nu: float) -> np.ndarray:
    a11 = np.array([[12, 3, -6, -3], [3, 12, 3, 0], [-6, 3, 12, -3], [-3, 0, -3, 12]], dtype=float)
    a12 = np.array([[-6, -3, 0, 3], [-3, -6, -3, -6], [0, -3, -6, 3], [3, -6, 3, -6]], dtype=float)
    b11 = np.array([[-4, 3, -2, 9], [3, -4, -9, 4], [-2, -9, -4, -3], [9, 4, -3, -4]], dtype=float)
    b12 = np.array([[2, -3, 4, -9], [-3, 2, 9, -2], [4, 9, 2, 3], [-9, -2, 3, 2]], dtype=float)
    ke = (
        np.block([[a11, a12], [a12.T, a11]]) + nu * np.block([[b11, b12], [b12.T, b11]])
    ) / (24.0 * (1.0 - nu**2))
    # enforce exact symmetry
    ke = 0.5 * (ke + ke.T)
    ke.setflags(write=False)
    return ke


def constitutive_matrix(nu: float) -> np.ndarray:
    """Plane-stress D for unit modulus, engineering shear strain."""
    nu = _check_nu(nu)
    return np.array([[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, (1.0 - nu) / 2.0]]) / (1.0 - nu**2)


def centroid_strain_matrix() -> np.ndarray:
    """B at xi = eta = 0 for a unit square; rows eps_x, eps_y, gamma_xy."""
    dndx = np.array([-0.5, 0.5, 0.5, -0.5])
    dndy = np.array([-0.5, -0.5, 0.5, 0.5])
    b = np.zeros((3, 8))
    b[0, 0::2] = dndx
    b[1, 1::2] = dndy
    b[2, 0::2] = dndy
    b[2, 1::2] = dndx
    return b


def _scalar_or_array(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value


def von_mises(sx, sy, sxy):
    """Plane-stress von Mises stress."""
    sx, sy, sxy = np.asarray(sx, dtype=float), np.asarray(sy, dtype=float), np.asarray(sxy, dtype=float)
    # clip tiny negative rounding of a non-negative quadratic form
    return _scalar_or_array(np.sqrt(np.maximum(sx**2 + sy**2 - sx * sy + 3.0 * sxy**2, 0.0)))


def strain_energy_density(sx, sy, sxy, ex, ey, exy):
    """W = (sx*ex + sy*ey + 2*sxy*exy) / 2 with tensor shear strain exy."""
    sx, sy, sxy = np.asarray(sx, dtype=float), np.asarray(sy, dtype=float), np.asarray(sxy, dtype=float)
    return _scalar_or_array((sx * ex + sy * ey + 2.0 * sxy * exy) / 2.0)
