"""Smoothing-annealed training loop with multi-restart initialization.

The non-differentiable composite check objective is replaced by its
Huber-smoothed version; an outer loop shrinks the smoothing threshold
geometrically while the inner quasi-Newton optimizer warm-starts each stage
from the previous one. Several random network initializations are fitted and
the lowest final objective wins.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import model, network
from .errors import ConfigError, TrainingError
from .losses import TauGrid
from .model import ModelKind, ModelParameters, PanelDesign, PenaltyConfig
from .network import NetworkSpec

__all__ = [
    "AnnealSchedule",
    "TrainConfig",
    "StageRecord",
    "FitResult",
    "epsilon_sequence",
    "fit",
    "fit_per_tau",
]

_OPTIMIZERS = ("lbfgs", "gd")


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric smoothing-threshold decay from eps_start down to eps_end."""

    eps_start: float = 2.0 ** -8
    eps_end: float = 2.0 ** -32
    factor: float = 2.0 ** -4

    def __post_init__(self):
        if not (math.isfinite(self.eps_start) and self.eps_start > 0.0):
            raise ConfigError(f"eps_start must be positive, got {self.eps_start!r}")
        if not (math.isfinite(self.eps_end) and self.eps_end > 0.0):
            raise ConfigError(f"eps_end must be positive, got {self.eps_end!r}")
        if self.eps_end > self.eps_start:
            raise ConfigError(
                f"eps_end ({self.eps_end}) must not exceed eps_start ({self.eps_start})"
            )
        if not 0.0 < self.factor < 1.0:
            raise ConfigError(f"factor must lie in (0, 1), got {self.factor!r}")


def epsilon_sequence(schedule: AnnealSchedule) -> list[float]:
    """Strictly decreasing thresholds from eps_start, ending exactly at eps_end."""
    values = []
    eps = schedule.eps_start
    while eps > schedule.eps_end:
        values.append(eps)
        eps *= schedule.factor
    values.append(schedule.eps_end)
    return values


@dataclass(frozen=True)
class TrainConfig:
    """Everything the training loop needs besides data and model structure."""

    schedule: AnnealSchedule = AnnealSchedule()
    restarts: int = 5
    max_iters_per_stage: int = 500
    grad_tol: float = 1e-6
    seed: int = 0
    optimizer: str = "lbfgs"
    gd_step: float = 1e-3

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters_per_stage < 1:
            raise ConfigError(f"max_iters_per_stage must be >= 1, got {self.max_iters_per_stage}")
        if not self.grad_tol > 0.0:
            raise ConfigError(f"grad_tol must be positive, got {self.grad_tol!r}")
        if self.optimizer not in _OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {_OPTIMIZERS}, got {self.optimizer!r}")
        if not self.gd_step > 0.0:
            raise ConfigError(f"gd_step must be positive, got {self.gd_step!r}")


@dataclass
class StageRecord:
    """One annealing stage: threshold, iterations used, objective path."""

    epsilon: float
    iterations: int
    objective: float
    objective_path: list[float] = field(default_factory=list, repr=False)


@dataclass
class FitResult:
    """Winning restart of a training run."""

    params: ModelParameters
    final_objective: float
    restart_index: int
    stage_trace: list[StageRecord]
    converged: bool
    restart_objectives: list[float] = field(default_factory=list)


class _Guard:
    """Wrap an objective closure so numeric failures carry stage context."""

    def __init__(self, fn, epsilon):
        self.fn = fn
        self.epsilon = epsilon
        self.evaluations = 0

    def __call__(self, x):
        self.evaluations += 1
        try:
            return self.fn(x)
        except ArithmeticError as exc:
            raise TrainingError(
                f"non-finite objective at stage epsilon={self.epsilon!r}, "
                f"evaluation {self.evaluations}: {exc}",
                epsilon=self.epsilon,
                evaluations=self.evaluations,
            ) from exc


def _minimize_stage(value_and_grad, value_only, x0, config: TrainConfig):
    """Run one inner optimization; returns (x, iterations, objective path)."""
    if config.optimizer == "lbfgs":
        path = [value_only(x0)]

        def track(xk):
            path.append(value_only(xk))

        result = minimize(
            value_and_grad,
            x0,
            jac=True,
            method="L-BFGS-B",
            callback=track,
            options={
                "maxiter": config.max_iters_per_stage,
                "gtol": config.grad_tol,
                "ftol": 1e-12,
            },
        )
        return np.asarray(result.x, dtype=float), int(result.nit), path

    x = np.asarray(x0, dtype=float).copy()
    path = [value_only(x)]
    iterations = 0
    for _ in range(config.max_iters_per_stage):
        _, grad = value_and_grad(x)
        if np.max(np.abs(grad)) <= config.grad_tol:
            break
        x = x - config.gd_step * grad
        iterations += 1
        path.append(value_only(x))
    return x, iterations, path


def fit(dataset, kind: ModelKind, grid: TauGrid, penalties: PenaltyConfig,
        spec: Optional[NetworkSpec], config: TrainConfig) -> FitResult:
    """Train one model by annealed quasi-Newton descent with restarts.

    Parameters
    ----------
    dataset : PanelDataset
        Balanced, fully observed panel (standardize beforehand if desired).
    kind : ModelKind
    grid : TauGrid
        Quantile levels and weights of the composite objective.
    penalties : PenaltyConfig
    spec : NetworkSpec or None
        Required for network kinds; ignored for the linear model.
    config : TrainConfig

    Returns
    -------
    FitResult
        Parameters of the best restart, its final objective at eps_end, the
        per-stage trace, and the final objectives of every restart.

    Notes
    -----
    The linear coefficients and intercepts start at zero in every restart;
    only the network initialization is randomized (seed + restart index),
    so the run is fully deterministic given (dataset, config).
    """
    design = PanelDesign.from_dataset(dataset)
    if kind.uses_network:
        if spec is None:
            raise ConfigError(f"kind {kind.value!r} requires a network spec")
        if spec.input_dim != design.x.shape[1]:
            raise ConfigError(
                f"network spec expects {spec.input_dim} inputs, panel has "
                f"{design.x.shape[1]} network covariates"
            )
    net_spec = spec if kind.uses_network else None
    q = design.z.shape[1] if kind.uses_linear_term else 0
    n = design.n_individuals
    eps_values = epsilon_sequence(config.schedule)

    def closures(epsilon):
        def value_and_grad(x):
            params = model.unpack_parameters(x, kind, q, n, net_spec)
            ev = model._evaluate(design, params, kind, grid, penalties, epsilon,
                                 want_grad=True)
            return ev.value, model.pack_parameters(ev.gradient, kind)

        def value_only(x):
            params = model.unpack_parameters(x, kind, q, n, net_spec)
            return model._evaluate(design, params, kind, grid, penalties, epsilon,
                                   want_grad=False).value

        return _Guard(value_and_grad, epsilon), _Guard(value_only, epsilon)

    best: Optional[FitResult] = None
    restart_objectives = []
    for restart in range(config.restarts):
        if kind.uses_network:
            start = ModelParameters(
                np.zeros(q), np.zeros(n), network.init_parameters(net_spec, config.seed + restart)
            )
        else:
            start = ModelParameters(np.zeros(q), np.zeros(n), None)
        x = model.pack_parameters(start, kind)
        trace = []
        for epsilon in eps_values:
            value_and_grad, value_only = closures(epsilon)
            x, iterations, path = _minimize_stage(value_and_grad, value_only, x, config)
            trace.append(StageRecord(epsilon, iterations, path[-1], path))
        final_vg, _ = closures(eps_values[-1])
        final_value, final_grad = final_vg(x)
        converged = bool(
            final_grad.size == 0 or np.max(np.abs(final_grad)) <= config.grad_tol
        )
        restart_objectives.append(final_value)
        if best is None or final_value < best.final_objective:
            best = FitResult(
                params=model.unpack_parameters(x, kind, q, n, net_spec),
                final_objective=final_value,
                restart_index=restart,
                stage_trace=trace,
                converged=converged,
            )
    best.restart_objectives = restart_objectives
    return best


def fit_per_tau(dataset, kind: ModelKind, taus, penalties: PenaltyConfig,
                spec: Optional[NetworkSpec], config: TrainConfig) -> list[FitResult]:
    """Independent single-level fits, one per requested quantile level."""
    return [
        fit(dataset, kind, TauGrid.single(tau), penalties, spec, config) for tau in taus
    ]
