"""
Cantor function, the smooth bump and the mollified plateau profiles used by the
analytically solvable problems.
"""

import logging
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad

from bvwave.core._errors import ValidationError


logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

_CANTOR_DEPTH = 64
_QUAD_TOL = 1e-10


def cantor_function(t: ArrayLike) -> Union[float, np.ndarray]:
    """
    Cantor function on [0, 1] by ternary digit expansion

    Digits are scanned until the first 1; leading 0/2 digits contribute (digit/2)/2^k and
    a first 1 at position k contributes 1/2^k. Depth is capped at 64 digits.

    :param t: point(s) in [0, 1]
    :raise ValidationError: if a point lies outside [0, 1]
    :return: C(t)

    >>> float(cantor_function(0.25))
    0.3333333333333333
    """
    scalar = np.isscalar(t)
    x = np.atleast_1d(np.asarray(t, dtype=np.float64)).copy()
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        error_message = "cantor_function is defined on [0, 1] only"
        logger.error(error_message)
        raise ValidationError(error_message)

    value = np.zeros_like(x)
    done = x >= 1.0
    value[done] = 1.0
    scale = 0.5
    for _ in range(_CANTOR_DEPTH):
        if np.all(done):
            break
        x = np.where(done, 0.0, 3.0 * x)
        digit = np.minimum(np.floor(x), 2.0)
        x = x - digit
        hit_one = (~done) & (digit == 1.0)
        value[hit_one] += scale
        two = (~done) & (digit == 2.0)
        value[two] += scale
        done = done | hit_one
        scale *= 0.5
    return float(value[0]) if scalar else value


def bump(x: ArrayLike) -> np.ndarray:
    """exp(-1/(1-x^2)) on (-1, 1), zero elsewhere"""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def bump_dx(x: ArrayLike) -> np.ndarray:
    """First derivative of :func:`bump`"""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi ** 2)) * (-2.0 * xi / (1.0 - xi ** 2) ** 2)
    return out


def bump_dxx(x: ArrayLike) -> np.ndarray:
    """Second derivative of :func:`bump`: bump(x) (6x^4 - 2) / (1 - x^2)^4"""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi ** 2)) * (6.0 * xi ** 4 - 2.0) / (1.0 - xi ** 2) ** 4
    return out


def smooth_step(x: ArrayLike) -> np.ndarray:
    """
    C-infinity step: 0 for x <= 0, 1 for x >= 1, all derivatives vanish at both ends

    >>> smooth_step([-1.0, 0.5, 2.0]).tolist()
    [0.0, 0.5, 1.0]
    """
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    rising = np.zeros_like(x)
    falling = np.zeros_like(x)
    rising[x > 0.0] = np.exp(-1.0 / x[x > 0.0])
    falling[x < 1.0] = np.exp(-1.0 / (1.0 - x[x < 1.0]))
    return rising / (rising + falling)


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    mass, _ = quad(lambda s: float(bump(s)), -1.0, 1.0, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL)
    return mass


def mollifier(x: ArrayLike, eps: float, derivative: int = 0) -> np.ndarray:
    """
    Normalized mollifier phi_eps(x) = bump(x/eps) / (eps * int bump) and its derivatives

    :param x: evaluation points
    :param eps: support radius
    :param derivative: 0, 1 or 2
    """
    profile = (bump, bump_dx, bump_dxx)[derivative]
    s = np.asarray(x, dtype=np.float64) / eps
    return profile(s) / (eps ** (derivative + 1) * _bump_mass())


def _mollifier_cdf(x: float, eps: float) -> float:
    if x <= -eps:
        return 0.0
    if x >= eps:
        return 1.0
    mass, _ = quad(lambda s: float(mollifier(s, eps)), -eps, x, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL)
    return mass


Plateau = Tuple[float, float, float]


def check_plateaus(plateaus: Sequence[Plateau], eps: float, T: float) -> None:
    """
    Validate signed plateau intervals against the mollifier radius

    :param plateaus: (start, end, sign) triples
    :param eps: mollifier radius
    :param T: horizon
    :raise ValidationError: if eps is not positive, an interval is degenerate, a
        mollified support leaves (0, T) or two mollified supports overlap
    """
    if eps <= 0.0:
        error_message = f"Mollifier radius must be positive, got {eps}"
        logger.error(error_message)
        raise ValidationError(error_message)
    ordered = sorted(plateaus, key=lambda item: item[0])
    previous_end = 0.0
    for start, end, _sign in ordered:
        if not end > start:
            error_message = f"Degenerate plateau [{start}, {end}]"
            logger.error(error_message)
            raise ValidationError(error_message)
        if start - eps <= previous_end:
            error_message = (
                f"Mollifier support of plateau [{start}, {end}] with eps={eps} "
                f"overlaps the boundary or the previous plateau"
            )
            logger.error(error_message)
            raise ValidationError(error_message)
        previous_end = end + eps
    if previous_end >= T:
        error_message = f"Mollified plateaus must end before T={T}"
        logger.error(error_message)
        raise ValidationError(error_message)


def mollified_plateau(t: ArrayLike, eps: float, plateaus: Sequence[Plateau], T: float) -> np.ndarray:
    """
    Signed sum of mollified indicators: sum_k sign_k * (phi_eps * 1_[a_k, b_k])(t)

    Each convolution is the mollifier mass on [t - b_k, t - a_k], integrated adaptively.
    The result lies in [-1, 1] and equals the sign exactly on [a_k + eps, b_k - eps].

    :param t: evaluation times
    :param eps: mollifier radius
    :param plateaus: (start, end, sign) triples
    :param T: horizon, used for validation
    """
    check_plateaus(plateaus, eps, T)
    times = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros_like(times)
    for idx, time in enumerate(times):
        for start, end, sign in plateaus:
            out[idx] += sign * (_mollifier_cdf(time - start, eps) - _mollifier_cdf(time - end, eps))
    return out


def mollified_plateau_dt(t: ArrayLike, eps: float, plateaus: Sequence[Plateau], derivative: int = 1) -> np.ndarray:
    """
    Time derivatives of :func:`mollified_plateau` in closed form

    d/dt (phi_eps * 1_[a,b]) = phi_eps(t - a) - phi_eps(t - b); higher derivatives move
    onto the mollifier.

    :param derivative: 1, 2 or 3
    """
    times = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(times)
    for start, end, sign in plateaus:
        out += sign * (mollifier(times - start, eps, derivative - 1) - mollifier(times - end, eps, derivative - 1))
    return out
