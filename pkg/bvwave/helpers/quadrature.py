"""
Trapezoidal time quadrature on uniform grids.

All time integrals of the discrete problem go through these helpers, so that the
control-side operators are exact transposes of each other in the weighted products.
"""

import numpy as np


def trapezoid_weights(nt: int, tau: float) -> np.ndarray:
    """
    Trapezoidal weights ``tau * (1/2, 1, ..., 1, 1/2)``

    :param nt: number of time nodes
    :param tau: time step
    :return: weights of shape (nt,)
    """
    weights = np.full(nt, tau, dtype=np.float64)
    weights[0] = weights[-1] = 0.5 * tau
    return weights


def cumulative_trapezoid(values: np.ndarray, tau: float) -> np.ndarray:
    """
    Left-closed cumulative trapezoid along the last axis, starting from 0

    >>> cumulative_trapezoid(np.ones(3), 0.5).tolist()
    [0.0, 0.5, 1.0]
    """
    values = np.asarray(values, dtype=np.float64)
    out = np.zeros_like(values)
    out[..., 1:] = np.cumsum(0.5 * tau * (values[..., 1:] + values[..., :-1]), axis=-1)
    return out


def cumulative_trapezoid_adjoint(values: np.ndarray, tau: float) -> np.ndarray:
    """
    Transpose of :func:`cumulative_trapezoid` in the trapezoid-weighted product.

    Interior samples equal the reverse cumulative integral over ``[t_k, T]``; the two
    end samples carry the one-cell quadrature correction of the weighted transpose.
    """
    values = np.asarray(values, dtype=np.float64)
    nt = values.shape[-1]
    weights = trapezoid_weights(nt, tau)
    weighted = values * weights
    # tails[k] = sum_{i >= k} w_i z_i, with tails[nt] = 0
    tails = np.zeros(values.shape[:-1] + (nt + 1,))
    tails[..., :nt] = np.cumsum(weighted[..., ::-1], axis=-1)[..., ::-1]
    out = np.zeros_like(values)
    out[..., :-1] += 0.5 * tau * tails[..., 1:nt]
    out[..., 1:] += 0.5 * tau * tails[..., 1:nt]
    return out / weights


def integrate(values: np.ndarray, tau: float) -> np.ndarray:
    """Trapezoid integral over the whole horizon along the last axis."""
    values = np.asarray(values, dtype=np.float64)
    return values @ trapezoid_weights(values.shape[-1], tau)


def l2_norm(values: np.ndarray, tau: float) -> float:
    """L2(I)^m norm of per-component time samples."""
    return float(np.sqrt(np.sum(integrate(np.square(values), tau))))
