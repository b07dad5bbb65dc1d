from __future__ import annotations

from typing import Tuple

import numpy as np

from ..errors import ParameterError

BCE_EPS = 1e-7


def check_pair(pred, truth) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ParameterError(f"prediction shape {p.shape} does not match truth shape {t.shape}")
    if p.size == 0:
        raise ParameterError("empty density fields")
    return p, t


def round_half_up(values) -> np.ndarray:
    """Round to the nearest integer with ties at 0.5 going up."""
    return np.floor(np.asarray(values, dtype=float) + 0.5)


def mse(pred, truth) -> float:
    p, t = check_pair(pred, truth)
    return float(np.mean((p - t) ** 2))


def binary_accuracy(pred, truth) -> float:
    """Fraction of elements whose rounded densities agree."""
    p, t = check_pair(pred, truth)
    return float(np.mean(round_half_up(p) == round_half_up(t)))


def binary_cross_entropy(pred, truth) -> float:
    p, t = check_pair(pred, truth)
    p = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    return float(np.mean(-(t * np.log(p) + (1.0 - t) * np.log1p(-p))))
