"""Panel quantile predictor and its penalized, smoothed composite objective.

The predictor is z'beta + ANN(x) + alpha_i with an identity output transfer.
Two restricted variants are supported: a purely linear panel model (no
network) and a pure network model (no linear term, intercepts frozen at
zero). The objective averages the Huber-smoothed check loss over quantile
levels, individuals, and periods, adds a smoothed-L1 penalty on the
per-individual intercepts, and an L2 penalty on hidden-layer weights.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import losses, network
from .errors import ConfigError, DataError
from .losses import TauGrid
from .network import NetworkParameters, NetworkSpec

__all__ = [
    "ModelKind",
    "ModelParameters",
    "PenaltyConfig",
    "PanelDesign",
    "ShrinkageSummary",
    "predict",
    "predict_panel",
    "objective",
    "objective_gradient",
    "average_check_loss",
    "shrink_report",
    "pack_parameters",
    "unpack_parameters",
]


class ModelKind(enum.Enum):
    """Predictor variants: full model, linear-only, and network-only."""

    PSQRNN = "psqrnn"
    LINEAR = "linear"
    QRNN = "qrnn"

    @property
    def uses_network(self) -> bool:
        return self is not ModelKind.LINEAR

    @property
    def uses_linear_term(self) -> bool:
        """Whether z'beta and the per-individual intercepts enter the predictor."""
        return self is not ModelKind.QRNN


@dataclass(frozen=True)
class PenaltyConfig:
    """Strengths of the intercept L1 penalty and the hidden-weight L2 penalty."""

    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"{name} must be a finite nonnegative real, got {v!r}")


@dataclass
class ModelParameters:
    """Full parameter set: linear coefficients, per-individual intercepts, network."""

    beta: np.ndarray
    alpha: np.ndarray
    net: Optional[NetworkParameters] = None

    def __post_init__(self):
        self.beta = np.asarray(self.beta, dtype=float).ravel()
        self.alpha = np.asarray(self.alpha, dtype=float).ravel()

    def copy(self) -> "ModelParameters":
        return ModelParameters(
            self.beta.copy(), self.alpha.copy(), None if self.net is None else self.net.copy()
        )


@dataclass
class PanelDesign:
    """Flattened, individual-major view of a balanced, fully observed panel."""

    z: np.ndarray
    x: np.ndarray
    y: np.ndarray
    individual: np.ndarray
    n_individuals: int
    n_periods: int

    @classmethod
    def from_dataset(cls, dataset) -> "PanelDesign":
        n, t = dataset.n_individuals, dataset.n_periods
        if n < 1 or t < 1:
            raise DataError(f"degenerate panel: N={n}, T={t}")
        if dataset.missing_mask.any():
            raise DataError("panel contains missing cells; impute before fitting")
        rows = n * t
        return cls(
            z=dataset.z.reshape(rows, dataset.q),
            x=dataset.x.reshape(rows, dataset.p),
            y=dataset.y.reshape(rows),
            individual=np.repeat(np.arange(n), t),
            n_individuals=n,
            n_periods=t,
        )


def predict(params: ModelParameters, kind: ModelKind, z, x, individual: int) -> float:
    """Predicted conditional quantile for one observation of one individual."""
    n = params.alpha.size
    if not 0 <= individual < n:
        raise IndexError(f"individual index {individual} outside [0, {n})")
    value = 0.0
    if kind.uses_linear_term:
        z = np.asarray(z, dtype=float).ravel()
        if z.size != params.beta.size:
            raise ValueError(f"z has length {z.size}, beta has length {params.beta.size}")
        value += float(z @ params.beta) + float(params.alpha[individual])
    if kind.uses_network:
        if params.net is None:
            raise ValueError(f"kind {kind.value!r} requires network parameters")
        value += network.forward(params.net, np.asarray(x, dtype=float).ravel())
    return value


def _linear_part(design: PanelDesign, params: ModelParameters, kind: ModelKind) -> np.ndarray:
    pred = np.zeros(design.y.size)
    if kind.uses_linear_term:
        if params.beta.size != design.z.shape[1]:
            raise ValueError(
                f"beta has length {params.beta.size}, panel has {design.z.shape[1]} "
                "parametric covariates"
            )
        if params.alpha.size != design.n_individuals:
            raise ValueError(
                f"alpha has length {params.alpha.size}, panel has "
                f"{design.n_individuals} individuals"
            )
        pred += design.z @ params.beta + params.alpha[design.individual]
    return pred


class _Evaluation(NamedTuple):
    value: float
    data_term: float
    gradient: Optional[ModelParameters]


def _evaluate(design: PanelDesign, params: ModelParameters, kind: ModelKind,
              grid: TauGrid, penalties: PenaltyConfig, epsilon: float,
              want_grad: bool) -> _Evaluation:
    taus = grid.tau_array()
    weights = grid.weight_array()
    k = grid.k
    n, t = design.n_individuals, design.n_periods
    scale = 1.0 / (k * n * t)

    pred = _linear_part(design, params, kind)
    if kind.uses_network:
        if params.net is None:
            raise ValueError(f"kind {kind.value!r} requires network parameters")
        ann, _ = network.forward_batch(params.net, design.x)
        pred += ann

    resid = design.y - pred
    if not np.all(np.isfinite(resid)):
        raise ArithmeticError("non-finite residuals in objective evaluation")

    # (rows, K) smoothed check losses; reduce per individual first so the
    # final compensated sum is invariant to individual ordering.
    loss = weights * losses.smoothed_pinball(resid[:, None], taus, epsilon)
    per_individual = loss.reshape(n, t, k).sum(axis=(1, 2))
    data_term = math.fsum(per_individual.tolist()) * scale

    value = data_term
    if kind.uses_linear_term and penalties.lambda1 > 0.0:
        value += penalties.lambda1 * math.fsum(
            np.asarray(losses.huber(params.alpha, epsilon), dtype=float).tolist()
        ) / n
    hidden_count = 0
    if kind.uses_network:
        hidden_count = params.net.spec.hidden_weight_count
        if penalties.lambda2 > 0.0:
            sq = sum(
                float(np.sum(w * w))
                for w in params.net.weights[: params.net.spec.n_hidden_layers]
            )
            value += penalties.lambda2 * sq / hidden_count
    if not math.isfinite(value):
        raise ArithmeticError("objective evaluated to a non-finite value")

    if not want_grad:
        return _Evaluation(value, data_term, None)

    dloss = weights * losses.smoothed_pinball_deriv(resid[:, None], taus, epsilon)
    s = dloss.sum(axis=1) * scale
    grad_beta = np.zeros(params.beta.size)
    grad_alpha = np.zeros(params.alpha.size)
    grad_net = None
    if kind.uses_linear_term:
        grad_beta = -(design.z.T @ s)
        grad_alpha = -s.reshape(n, t).sum(axis=1)
        if penalties.lambda1 > 0.0:
            grad_alpha = grad_alpha + penalties.lambda1 * np.asarray(
                losses.huber_deriv(params.alpha, epsilon), dtype=float
            ) / n
    if kind.uses_network:
        _, grad_net, _ = network.backward_batch(params.net, design.x, -s)
        if penalties.lambda2 > 0.0:
            for l in range(params.net.spec.n_hidden_layers):
                grad_net.weights[l] += (
                    2.0 * penalties.lambda2 / hidden_count
                ) * params.net.weights[l]
    return _Evaluation(value, data_term, ModelParameters(grad_beta, grad_alpha, grad_net))


def _design_for(dataset) -> PanelDesign:
    return dataset if isinstance(dataset, PanelDesign) else PanelDesign.from_dataset(dataset)


def objective(params: ModelParameters, kind: ModelKind, dataset, grid: TauGrid,
              penalties: PenaltyConfig, epsilon: float) -> float:
    """Penalized, smoothed composite quantile objective over a panel.

    Returns the weighted average smoothed check loss over all (level,
    individual, period) triples plus the two penalty terms; always >= 0.
    """
    losses._check_epsilon(epsilon)
    return _evaluate(_design_for(dataset), params, kind, grid, penalties, epsilon,
                     want_grad=False).value


def objective_gradient(params: ModelParameters, kind: ModelKind, dataset, grid: TauGrid,
                       penalties: PenaltyConfig, epsilon: float) -> ModelParameters:
    """Exact analytic gradient of :func:`objective` in ModelParameters shape.

    Components the kind freezes (beta/alpha for the network-only model, the
    network for the linear model) come back as zeros / None.
    """
    losses._check_epsilon(epsilon)
    return _evaluate(_design_for(dataset), params, kind, grid, penalties, epsilon,
                     want_grad=True).gradient


def average_check_loss(params: ModelParameters, kind: ModelKind, dataset, grid: TauGrid,
                       epsilon: float) -> float:
    """The objective's data term alone (no penalties); the BIC loss input."""
    losses._check_epsilon(epsilon)
    return _evaluate(_design_for(dataset), params, kind, grid, PenaltyConfig(), epsilon,
                     want_grad=False).data_term


def predict_panel(params: ModelParameters, kind: ModelKind, dataset) -> np.ndarray:
    """Predicted values for every (individual, period) cell, shape (N, T)."""
    design = _design_for(dataset)
    pred = _linear_part(design, params, kind)
    if kind.uses_network:
        if params.net is None:
            raise ValueError(f"kind {kind.value!r} requires network parameters")
        ann, _ = network.forward_batch(params.net, design.x)
        pred += ann
    return pred.reshape(design.n_individuals, design.n_periods)


@dataclass(frozen=True)
class ShrinkageSummary:
    """How far the penalized parameter groups sit from zero."""

    alpha_abs_sum: float
    alpha_abs_max: float
    hidden_weight_sq_sum: float


def shrink_report(params: ModelParameters) -> ShrinkageSummary:
    """Exact aggregates of the penalized parameter groups."""
    alpha_abs = np.abs(params.alpha)
    sq = 0.0
    if params.net is not None:
        sq = math.fsum(
            float(np.sum(w * w))
            for w in params.net.weights[: params.net.spec.n_hidden_layers]
        )
    return ShrinkageSummary(
        alpha_abs_sum=math.fsum(alpha_abs.tolist()),
        alpha_abs_max=float(alpha_abs.max()) if alpha_abs.size else 0.0,
        hidden_weight_sq_sum=sq,
    )


def pack_parameters(params: ModelParameters, kind: ModelKind) -> np.ndarray:
    """Concatenate the kind's free parameters into one optimizer vector."""
    parts = []
    if kind.uses_linear_term:
        parts.append(params.beta)
        parts.append(params.alpha)
    if kind.uses_network:
        if params.net is None:
            raise ValueError(f"kind {kind.value!r} requires network parameters")
        parts.append(network.flatten(params.net))
    return np.concatenate(parts) if parts else np.zeros(0)


def unpack_parameters(vector: np.ndarray, kind: ModelKind, q: int, n_individuals: int,
                      spec: Optional[NetworkSpec]) -> ModelParameters:
    """Inverse of :func:`pack_parameters`; frozen components are restored as zeros."""
    vector = np.asarray(vector, dtype=float).ravel()
    pos = 0
    if kind.uses_linear_term:
        beta = vector[pos:pos + q].copy()
        pos += q
        alpha = vector[pos:pos + n_individuals].copy()
        pos += n_individuals
    else:
        beta = np.zeros(0)
        alpha = np.zeros(n_individuals)
    net = None
    if kind.uses_network:
        if spec is None:
            raise ValueError(f"kind {kind.value!r} requires a network spec")
        net = network.unflatten(vector[pos:pos + spec.parameter_count], spec)
        pos += spec.parameter_count
    if pos != vector.size:
        raise ValueError(f"vector has length {vector.size}, expected {pos}")
    return ModelParameters(beta, alpha, net)
