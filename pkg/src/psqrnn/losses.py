"""Scalar kernels for quantile losses and their Huber-smoothed relatives.

All kernels are pure, broadcast over numpy arrays, and propagate NaN inputs
unchanged; validation of the panel-level objective happens one layer up.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TauGrid",
    "pinball",
    "huber",
    "huber_deriv",
    "smoothed_pinball",
    "smoothed_pinball_deriv",
]

#: Smallest acceptable deviation of quantile weights from summing to one.
_WEIGHT_SUM_TOL = 1e-9


def _check_tau(tau):
    arr = np.asarray(tau, dtype=float)
    if arr.size == 0 or not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError(f"quantile level must lie strictly inside (0, 1), got {tau!r}")


def _check_epsilon(epsilon):
    if not (isinstance(epsilon, (int, float)) and math.isfinite(epsilon) and epsilon > 0.0):
        raise ValueError(f"smoothing threshold must be a positive finite real, got {epsilon!r}")


def _as_result(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def pinball(u, tau):
    """Check loss u * (tau - 1{u < 0}).

    Parameters
    ----------
    u : float or ndarray
        Residual(s).
    tau : float or ndarray
        Quantile level(s) in (0, 1); broadcast against ``u``.

    Returns
    -------
    float or ndarray
        Nonnegative loss, ``tau * u`` for u >= 0 and ``(tau - 1) * u`` otherwise.
    """
    _check_tau(tau)
    u = np.asarray(u, dtype=float)
    return _as_result(u * (tau - (u < 0.0)))


def huber(u, epsilon):
    """Huber norm: quadratic within ``epsilon`` of zero, absolute beyond.

    Returns ``u**2 / (2 * epsilon)`` for ``|u| <= epsilon`` and
    ``|u| - epsilon / 2`` otherwise; continuously differentiable at the join.
    """
    _check_epsilon(epsilon)
    u = np.asarray(u, dtype=float)
    a = np.abs(u)
    return _as_result(np.where(a <= epsilon, u * u / (2.0 * epsilon), a - 0.5 * epsilon))


def huber_deriv(u, epsilon):
    """Derivative of :func:`huber` with respect to ``u``."""
    _check_epsilon(epsilon)
    u = np.asarray(u, dtype=float)
    return _as_result(np.where(np.abs(u) <= epsilon, u / epsilon, np.sign(u)))


def smoothed_pinball(u, tau, epsilon):
    """Huber-smoothed check loss.

    Applies the asymmetric weight ``tau`` on nonnegative residuals and
    ``1 - tau`` on negative ones to the Huber norm, which keeps the loss
    nonnegative and within ``max(tau, 1 - tau) * epsilon / 2`` of the exact
    check loss everywhere.
    """
    _check_tau(tau)
    _check_epsilon(epsilon)
    u = np.asarray(u, dtype=float)
    tau = np.asarray(tau, dtype=float)
    a = np.abs(u)
    hub = np.where(a <= epsilon, u * u / (2.0 * epsilon), a - 0.5 * epsilon)
    return _as_result(np.where(u >= 0.0, tau, 1.0 - tau) * hub)


def smoothed_pinball_deriv(u, tau, epsilon):
    """Derivative of :func:`smoothed_pinball` with respect to the residual.

    Piecewise: ``tau * u / epsilon`` on [0, epsilon], ``(1 - tau) * u / epsilon``
    on [-epsilon, 0], and the constants ``tau`` / ``-(1 - tau)`` beyond.
    """
    _check_tau(tau)
    _check_epsilon(epsilon)
    u = np.asarray(u, dtype=float)
    tau = np.asarray(tau, dtype=float)
    side = np.where(u >= 0.0, tau, 1.0 - tau)
    inside = side * u / epsilon
    outside = np.sign(u) * side
    return _as_result(np.where(np.abs(u) <= epsilon, inside, outside))


@dataclass(frozen=True)
class TauGrid:
    """Ordered quantile levels with positive mixture weights summing to one."""

    taus: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "weights", weights)
        if len(taus) < 1 or len(taus) != len(weights):
            raise ValueError("taus and weights must be equal-length and nonempty")
        if any(not 0.0 < t < 1.0 for t in taus):
            raise ValueError(f"every quantile level must lie in (0, 1), got {taus}")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError(f"quantile levels must be strictly increasing, got {taus}")
        if any(w <= 0.0 for w in weights):
            raise ValueError(f"weights must all be positive, got {weights}")
        if abs(math.fsum(weights) - 1.0) > _WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got sum {math.fsum(weights)!r}")

    @property
    def k(self) -> int:
        return len(self.taus)

    def tau_array(self) -> np.ndarray:
        return np.array(self.taus, dtype=float)

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)

    @classmethod
    def single(cls, tau: float) -> "TauGrid":
        """One quantile level with unit weight."""
        return cls((float(tau),), (1.0,))

    @classmethod
    def equally_spaced(cls, k: int) -> "TauGrid":
        """Levels j / (k + 1) for j = 1..k with uniform weights 1/k."""
        if k < 1:
            raise ValueError("grid size must be at least 1")
        taus = tuple(j / (k + 1) for j in range(1, k + 1))
        return cls(taus, (1.0 / k,) * k)

    @classmethod
    def dense_grid(cls) -> "TauGrid":
        """The 50-level grid 0.01, 0.03, ..., 0.99 with uniform weights."""
        taus = tuple(0.01 + 0.02 * j for j in range(50))
        return cls(taus, (1.0 / 50,) * 50)
