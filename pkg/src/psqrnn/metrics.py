"""Forecast accuracy measures: MAPE and relative RMSE, sliced several ways."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = ["ForecastReport", "mape", "rrmse", "report"]


def mape(actual, predicted) -> float:
    """Mean absolute percentage error, (1/n) sum |(y - yhat) / y|.

    Raises ValueError on any zero actual, since the formula divides by it.
    """
    actual = np.asarray(actual, dtype=float).ravel()
    predicted = np.asarray(predicted, dtype=float).ravel()
    if actual.size != predicted.size or actual.size == 0:
        raise ValueError(
            f"need equal nonzero lengths, got {actual.size} and {predicted.size}"
        )
    if np.any(actual == 0.0):
        raise ValueError("actual values contain zero; MAPE is undefined")
    return float(np.mean(np.abs((actual - predicted) / actual)))


def rrmse(actual, predicted) -> float:
    """Relative root mean square error, sqrt(sum (y-yhat)^2) / sqrt(sum y^2)."""
    actual = np.asarray(actual, dtype=float).ravel()
    predicted = np.asarray(predicted, dtype=float).ravel()
    if actual.size != predicted.size or actual.size == 0:
        raise ValueError(
            f"need equal nonzero lengths, got {actual.size} and {predicted.size}"
        )
    denom = float(np.sum(actual * actual))
    if denom == 0.0:
        raise ValueError("actual values are all zero; RRMSE is undefined")
    resid = actual - predicted
    return float(np.sqrt(np.sum(resid * resid)) / np.sqrt(denom))


@dataclass
class ForecastReport:
    """Per-individual, per-period, and total accuracy of an (N, H) forecast.

    Mean and standard deviation summarize the per-individual vectors; the
    standard deviation uses the population denominator N.
    """

    predictions: np.ndarray
    actuals: Optional[np.ndarray]
    mape_by_individual: Optional[np.ndarray] = None
    rrmse_by_individual: Optional[np.ndarray] = None
    mape_by_period: Optional[np.ndarray] = None
    rrmse_by_period: Optional[np.ndarray] = None
    total_mape: Optional[float] = None
    total_rrmse: Optional[float] = None
    mape_mean: Optional[float] = None
    mape_std: Optional[float] = None
    rrmse_mean: Optional[float] = None
    rrmse_std: Optional[float] = None

    def to_dict(self) -> dict:
        def listify(v):
            return v.tolist() if isinstance(v, np.ndarray) else v

        return {name: listify(getattr(self, name)) for name in (
            "predictions", "actuals", "mape_by_individual", "rrmse_by_individual",
            "mape_by_period", "rrmse_by_period", "total_mape", "total_rrmse",
            "mape_mean", "mape_std", "rrmse_mean", "rrmse_std",
        )}


def report(actuals, predictions) -> ForecastReport:
    """Score an (N, H) prediction matrix against actuals of the same shape."""
    actuals = np.asarray(actuals, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if actuals.shape != predictions.shape or actuals.ndim != 2:
        raise ValueError(
            f"need matching 2-d shapes, got {actuals.shape} and {predictions.shape}"
        )
    by_ind_mape = np.array([mape(a, p) for a, p in zip(actuals, predictions)])
    by_ind_rrmse = np.array([rrmse(a, p) for a, p in zip(actuals, predictions)])
    by_per_mape = np.array([mape(a, p) for a, p in zip(actuals.T, predictions.T)])
    by_per_rrmse = np.array([rrmse(a, p) for a, p in zip(actuals.T, predictions.T)])
    return ForecastReport(
        predictions=predictions,
        actuals=actuals,
        mape_by_individual=by_ind_mape,
        rrmse_by_individual=by_ind_rrmse,
        mape_by_period=by_per_mape,
        rrmse_by_period=by_per_rrmse,
        total_mape=mape(actuals.ravel(), predictions.ravel()),
        total_rrmse=rrmse(actuals.ravel(), predictions.ravel()),
        mape_mean=float(np.mean(by_ind_mape)),
        mape_std=float(np.std(by_ind_mape)),
        rrmse_mean=float(np.mean(by_ind_rrmse)),
        rrmse_std=float(np.std(by_ind_rrmse)),
    )
