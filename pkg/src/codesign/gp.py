"""Exact Gaussian-process regression with Matern kernels.

Used as the fast estimator for network loss, latency and power: inputs are
the 16- or 19-dim encodings from :mod:`codesign.space`, targets are oracle
(or measured) values. The model is a standard exact GP with a constant mean,
ARD Matern 3/2 or 5/2 covariance and Gaussian noise, trained by Adam ascent
on the log marginal likelihood in log-hyperparameter space.

Inputs are z-scored per dimension before kernel evaluation (the encodings
mix ratios <= 1 with parallelism values up to 128); the statistics live in
the fitted model, so callers always pass raw encodings.

Kernel forms, with r the ARD-scaled Euclidean distance:
    matern32: s2 * (1 + sqrt(3) r) * exp(-sqrt(3) r)
    matern52: s2 * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.spatial.distance import cdist

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)

KERNEL_FAMILIES = ("matern32", "matern52")

# jitter escalation ladder, relative to the mean diagonal of K + noise I
_JITTERS = (0.0, 1e-8, 1e-6, 1e-4)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class GpError(ValueError):
    """Raised on invalid specs, shapes, or degenerate requests."""


class FactorizationError(GpError):
    """Raised when K + noise*I stays non-positive-definite after jitter escalation."""


@dataclass
class KernelSpec:
    """ARD Matern kernel hyperparameters."""

    family: str
    lengthscales: np.ndarray
    signal_variance: float

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise GpError(f"unknown kernel family {self.family!r}")
        self.lengthscales = np.asarray(self.lengthscales, dtype=float)
        if self.lengthscales.ndim != 1 or self.lengthscales.size == 0:
            raise GpError("lengthscales must be a non-empty 1-d array")
        if np.any(self.lengthscales <= 0) or self.signal_variance <= 0:
            raise GpError("kernel hyperparameters must be strictly positive")


@dataclass
class Dataset:
    """Training or evaluation split: inputs (n, d), targets (n,)."""

    inputs: np.ndarray
    targets: np.ndarray
    target_name: str = ""

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float).ravel()
        if self.inputs.ndim != 2:
            raise GpError("inputs must be 2-d (n, d)")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise GpError("inputs and targets disagree on sample count")
        if not (np.isfinite(self.inputs).all() and np.isfinite(self.targets).all()):
            raise GpError("dataset contains non-finite values")

    def check_consistent(self) -> None:
        """Reject duplicate input rows carrying different targets."""
        order = np.lexsort(self.inputs.T)
        x, y = self.inputs[order], self.targets[order]
        same = np.all(x[1:] == x[:-1], axis=1)
        if np.any(same & (y[1:] != y[:-1])):
            raise GpError("duplicate input rows with conflicting targets")


def _corr(family: str, r: np.ndarray, r2: np.ndarray | None = None):
    if r2 is None:
        r2 = r * r
    if family == "matern32":
        return (1.0 + SQRT3 * r) * np.exp(-SQRT3 * r)
    return (1.0 + SQRT5 * r + (5.0 / 3.0) * r2) * np.exp(-SQRT5 * r)


def kernel_eval(spec: KernelSpec, x, x2) -> float:
    """Covariance between two points under ``spec``."""
    x = np.asarray(x, dtype=float).ravel()
    x2 = np.asarray(x2, dtype=float).ravel()
    if x.shape != x2.shape or x.shape != spec.lengthscales.shape:
        raise GpError(
            f"dimension mismatch: x {x.shape}, x2 {x2.shape}, lengthscales {spec.lengthscales.shape}"
        )
    u = (x - x2) / spec.lengthscales
    r2 = float(u @ u)
    r = math.sqrt(r2)
    return spec.signal_variance * float(_corr(spec.family, np.asarray(r), np.asarray(r2)))


@dataclass
class GpModel:
    """A fitted exact GP: hyperparameters plus the cached factorization.

    ``train_inputs`` are raw (unstandardized); ``chol`` is the lower factor
    of K + noise*I over the standardized inputs, and ``alpha`` solves
    (K + noise*I)^-1 (y - mean). Immutable in practice: prediction never
    mutates state, so one model can serve many threads.
    """

    kernel: KernelSpec
    noise_variance: float
    constant_mean: float
    train_inputs: np.ndarray
    train_targets: np.ndarray
    x_mean: np.ndarray
    x_scale: np.ndarray
    chol: np.ndarray
    alpha: np.ndarray
    target_name: str = ""
    degenerate: bool = False
    fit_log_likelihood: float = math.nan

    @property
    def dim(self) -> int:
        return self.train_inputs.shape[1]

    def standardized(self) -> np.ndarray:
        return (self.train_inputs - self.x_mean) / self.x_scale


def _pairwise_sq(z: np.ndarray) -> np.ndarray:
    """Stacked per-dimension squared differences, shape (d, n*n)."""
    n, d = z.shape
    out = np.empty((d, n * n))
    for j in range(d):
        diff = z[:, j : j + 1] - z[:, j]
        out[j] = (diff * diff).ravel()
    return out


def _factorize(kn: np.ndarray):
    """Lower Cholesky factor with jitter escalation; returns (L, jitter used)."""
    scale = float(np.mean(np.diag(kn)))
    for jitter in _JITTERS:
        try:
            bumped = kn if jitter == 0.0 else kn + (jitter * scale) * np.eye(kn.shape[0])
            return cholesky(bumped, lower=True), jitter
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError(
        f"kernel matrix not positive definite after jitter escalation up to {_JITTERS[-1]}"
    )


def _lml_and_grad(family, d2, n, log_ls, log_sv, log_nv, mean, y):
    """Log marginal likelihood and its gradient in (log ls, log sv, log nv, mean)."""
    inv_l2 = np.exp(-2.0 * log_ls)
    r2 = (inv_l2 @ d2).reshape(n, n)
    np.maximum(r2, 0.0, out=r2)
    r = np.sqrt(r2)
    sv = math.exp(log_sv)
    nv = math.exp(log_nv)
    if family == "matern32":
        decay = np.exp(-SQRT3 * r)
        corr = (1.0 + SQRT3 * r) * decay
        scale_mat = 3.0 * sv * decay
    else:
        decay = np.exp(-SQRT5 * r)
        corr = (1.0 + SQRT5 * r + (5.0 / 3.0) * r2) * decay
        scale_mat = (5.0 / 3.0) * sv * (1.0 + SQRT5 * r) * decay
    k = sv * corr
    kn = k + nv * np.eye(n)
    chol_l, _ = _factorize(kn)
    resid = y - mean
    alpha = cho_solve((chol_l, True), resid)
    value = (
        -0.5 * float(resid @ alpha)
        - float(np.sum(np.log(np.diag(chol_l))))
        - 0.5 * n * math.log(2.0 * math.pi)
    )
    kinv = cho_solve((chol_l, True), np.eye(n))
    w = np.outer(alpha, alpha) - kinv
    grad_ls = 0.5 * inv_l2 * (d2 @ (w * scale_mat).ravel())
    grad_sv = 0.5 * float(np.sum(w * k))
    grad_nv = 0.5 * nv * (float(alpha @ alpha) - float(np.trace(kinv)))
    grad_mean = float(np.sum(alpha))
    return value, np.concatenate([grad_ls, [grad_sv, grad_nv, grad_mean]])


def build_model(
    inputs,
    targets,
    spec: KernelSpec,
    noise_variance: float,
    constant_mean: float,
    x_mean=None,
    x_scale=None,
    target_name: str = "",
    degenerate: bool = False,
    fit_log_likelihood: float = math.nan,
) -> GpModel:
    """Assemble a GpModel, computing standardization and the factorization."""
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float).ravel()
    if inputs.ndim != 2 or inputs.shape[0] != targets.shape[0] or inputs.shape[0] < 1:
        raise GpError("need a non-empty (n, d) input matrix with matching targets")
    if inputs.shape[1] != spec.lengthscales.size:
        raise GpError("lengthscale count must equal input dimensionality")
    if noise_variance <= 0:
        raise GpError("noise variance must be strictly positive")
    if x_mean is None:
        x_mean = inputs.mean(axis=0)
        x_scale = inputs.std(axis=0)
        x_scale = np.where(x_scale > 0, x_scale, 1.0)
    else:
        x_mean = np.asarray(x_mean, dtype=float)
        x_scale = np.asarray(x_scale, dtype=float)
    z = (inputs - x_mean) / x_scale
    a = z / spec.lengthscales
    r = cdist(a, a)
    k = spec.signal_variance * _corr(spec.family, r)
    kn = k + noise_variance * np.eye(len(z))
    chol_l, _ = _factorize(kn)
    alpha = cho_solve((chol_l, True), targets - constant_mean)
    return GpModel(
        kernel=spec,
        noise_variance=noise_variance,
        constant_mean=constant_mean,
        train_inputs=inputs,
        train_targets=targets,
        x_mean=x_mean,
        x_scale=x_scale,
        chol=chol_l,
        alpha=alpha,
        target_name=target_name,
        degenerate=degenerate,
        fit_log_likelihood=fit_log_likelihood,
    )


def log_marginal_likelihood(model: GpModel) -> tuple[float, np.ndarray]:
    """Exact-GP training objective and its gradient at the model's parameters.

    Gradient layout: one entry per log-lengthscale, then log signal
    variance, log noise variance, constant mean.
    """
    z = model.standardized()
    d2 = _pairwise_sq(z)
    return _lml_and_grad(
        model.kernel.family,
        d2,
        z.shape[0],
        np.log(model.kernel.lengthscales),
        math.log(model.kernel.signal_variance),
        math.log(model.noise_variance),
        model.constant_mean,
        model.train_targets,
    )


def fit(
    data: Dataset,
    family: str = "matern32",
    iters: int = 50,
    step_size: float = 0.05,
    rng_seed: int = 0,
) -> GpModel:
    """Fit kernel hyperparameters, noise and mean by Adam ascent on the LML.

    Deterministic: initialization is data-derived and the ascent is a fixed
    sequence of numpy operations, so equal data and seed give bit-identical
    hyperparameters. The returned model carries the best parameters seen
    (ascent on a non-concave objective is not monotone).
    """
    if family not in KERNEL_FAMILIES:
        raise GpError(f"unknown kernel family {family!r}")
    if iters < 1:
        raise GpError("iters must be >= 1")
    inputs, targets = data.inputs, data.targets
    n, d = inputs.shape
    if n < 2:
        raise GpError("need at least two samples to fit")
    data.check_consistent()

    y_var = float(targets.var())
    if y_var <= 1e-15 * max(1.0, float(targets.mean()) ** 2):
        # nothing to learn: constant mean explains everything
        spec = KernelSpec(family, np.ones(d), 1.0)
        return build_model(
            inputs,
            targets,
            spec,
            noise_variance=1e-6,
            constant_mean=float(targets.mean()),
            target_name=data.target_name,
            degenerate=True,
        )

    x_mean = inputs.mean(axis=0)
    x_scale = inputs.std(axis=0)
    x_scale = np.where(x_scale > 0, x_scale, 1.0)
    z = (inputs - x_mean) / x_scale
    d2 = _pairwise_sq(z)

    # theta = [log lengthscales, log signal var, log noise var, mean]
    theta = np.concatenate([np.zeros(d), [math.log(y_var), math.log(1e-2 * y_var), float(targets.mean())]])
    m_adam = np.zeros_like(theta)
    v_adam = np.zeros_like(theta)
    best_theta = theta.copy()
    best_value = -math.inf
    for t in range(1, iters + 1):
        value, grad = _lml_and_grad(
            family, d2, n, theta[:d], theta[d], theta[d + 1], theta[d + 2], targets
        )
        if value > best_value:
            best_value = value
            best_theta = theta.copy()
        m_adam = ADAM_BETA1 * m_adam + (1.0 - ADAM_BETA1) * grad
        v_adam = ADAM_BETA2 * v_adam + (1.0 - ADAM_BETA2) * grad * grad
        m_hat = m_adam / (1.0 - ADAM_BETA1**t)
        v_hat = v_adam / (1.0 - ADAM_BETA2**t)
        theta = theta + step_size * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    value, _ = _lml_and_grad(
        family, d2, n, theta[:d], theta[d], theta[d + 1], theta[d + 2], targets
    )
    if value > best_value:
        best_value = value
        best_theta = theta.copy()

    spec = KernelSpec(family, np.exp(best_theta[:d]), math.exp(best_theta[d]))
    return build_model(
        inputs,
        targets,
        spec,
        noise_variance=math.exp(best_theta[d + 1]),
        constant_mean=float(best_theta[d + 2]),
        x_mean=x_mean,
        x_scale=x_scale,
        target_name=data.target_name,
        fit_log_likelihood=best_value,
    )


def predict_mean(model: GpModel, x):
    """Posterior mean and (latent) variance at ``x``; accepts (d,) or (m, d)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != model.dim:
        raise GpError(f"query dimension {pts.shape[1]} != model dimension {model.dim}")
    ls = model.kernel.lengthscales
    a = model.standardized() / ls
    b = ((pts - model.x_mean) / model.x_scale) / ls
    r = cdist(a, b)
    kstar = model.kernel.signal_variance * _corr(model.kernel.family, r)
    mean = model.constant_mean + kstar.T @ model.alpha
    v = np.linalg.solve(model.chol, kstar)
    var = np.maximum(model.kernel.signal_variance - np.sum(v * v, axis=0), 0.0)
    if single:
        return float(mean[0]), float(var[0])
    return mean, var


def evaluate_mae(model: GpModel, test: Dataset) -> float:
    """Mean absolute prediction error over a test split."""
    if test.inputs.shape[0] == 0:
        raise GpError("empty test set")
    pred, _ = predict_mean(model, test.inputs)
    return float(np.mean(np.abs(pred - test.targets)))
