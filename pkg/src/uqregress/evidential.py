"""Evidential-regression primitives: head constraints, loss terms, gradients.

A 4-wide network head emits raw outputs (o0..o3) that are mapped to the
evidence distribution parameters

    gamma = o0
    nu    = softplus(o1) + 1e-6          (> 0)
    alpha = softplus(o2) + 1 + 1e-6      (> 1)
    beta  = softplus(o3) + 1e-6          (> 0)

so the negative log-likelihood and the uncertainty channels below are always
well-defined. All array functions are elementwise over samples; analytic
parameter gradients are provided for backpropagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DomainError
from .numerics import digamma, log_gamma

NU_FLOOR = 1e-6
ALPHA_FLOOR = 1.0 + 1e-6
BETA_FLOOR = 1e-6


@dataclass(frozen=True)
class EvidentialParams:
    """Per-sample evidence parameters (gamma, nu, alpha, beta)."""

    gamma: float
    nu: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.gamma, self.nu, self.alpha, self.beta)):
            raise DomainError("evidential parameters must be finite")
        if self.nu <= 0.0:
            raise DomainError(f"nu must be > 0, got {self.nu}")
        if self.alpha <= 1.0:
            raise DomainError(f"alpha must be > 1, got {self.alpha}")
        if self.beta <= 0.0:
            raise DomainError(f"beta must be > 0, got {self.beta}")

    @property
    def omega(self) -> float:
        return 2.0 * self.beta * (1.0 + self.nu)


def softplus(x):
    return np.logaddexp(0.0, x)


def head_transform(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Map raw head outputs (n, 4) to constrained (gamma, nu, alpha, beta)."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2 or raw.shape[1] != 4:
        raise DomainError(f"expected raw head outputs of shape (n, 4), got {raw.shape}")
    gamma = raw[:, 0]
    nu = softplus(raw[:, 1]) + NU_FLOOR
    alpha = softplus(raw[:, 2]) + ALPHA_FLOOR
    beta = softplus(raw[:, 3]) + BETA_FLOOR
    return gamma, nu, alpha, beta


def head_transform_derivatives(raw: np.ndarray) -> np.ndarray:
    """d(param)/d(raw output) for each of the 4 head channels, shape (n, 4)."""
    raw = np.asarray(raw, dtype=np.float64)
    d = np.empty_like(raw)
    d[:, 0] = 1.0
    d[:, 1:] = expit(raw[:, 1:])  # d softplus(x)/dx
    return d


def nll_array(gamma, nu, alpha, beta, y) -> np.ndarray:
    """Per-sample negative log-likelihood of the evidence distribution."""
    gamma, nu, alpha, beta, y = np.broadcast_arrays(gamma, nu, alpha, beta, y)
    omega = 2.0 * beta * (1.0 + nu)
    a_term = (y - gamma) ** 2 * nu + omega
    return (
        0.5 * np.log(np.pi / nu)
        - alpha * np.log(omega)
        + (alpha + 0.5) * np.log(a_term)
        + log_gamma(alpha)
        - log_gamma(alpha + 0.5)
    )


def nll_gradients(gamma, nu, alpha, beta, y) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(d/dgamma, d/dnu, d/dalpha, d/dbeta) of the per-sample NLL."""
    gamma, nu, alpha, beta, y = np.broadcast_arrays(gamma, nu, alpha, beta, y)
    r = y - gamma
    omega = 2.0 * beta * (1.0 + nu)
    a_term = r * r * nu + omega
    d_gamma = -2.0 * nu * r * (alpha + 0.5) / a_term
    d_nu = -0.5 / nu - 2.0 * alpha * beta / omega + (alpha + 0.5) * (r * r + 2.0 * beta) / a_term
    d_alpha = np.log(a_term) - np.log(omega) + digamma(alpha) - digamma(alpha + 0.5)
    d_beta = 2.0 * (1.0 + nu) * ((alpha + 0.5) / a_term - alpha / omega)
    return d_gamma, d_nu, d_alpha, d_beta


def regularizer_array(gamma, nu, alpha, y) -> np.ndarray:
    """Per-sample evidence regularizer |y - gamma| * (2*nu + alpha)."""
    gamma, nu, alpha, y = np.broadcast_arrays(gamma, nu, alpha, y)
    return np.abs(y - gamma) * (2.0 * nu + alpha)


def regularizer_gradients(gamma, nu, alpha, y) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(d/dgamma, d/dnu, d/dalpha, d/dbeta) of the regularizer."""
    gamma, nu, alpha, y = np.broadcast_arrays(gamma, nu, alpha, y)
    r = y - gamma
    d_gamma = -np.sign(r) * (2.0 * nu + alpha)
    d_nu = 2.0 * np.abs(r)
    d_alpha = np.abs(r)
    return d_gamma, d_nu, d_alpha, np.zeros_like(d_nu)


def uncertainty_channels(nu, alpha, beta, apply_sqrt: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Aleatoric beta/(alpha-1) and epistemic beta/(nu*(alpha-1)) channels.

    The expressions are used verbatim as standard deviations by default;
    ``apply_sqrt=True`` treats them as variances and returns their roots.
    """
    nu, alpha, beta = np.broadcast_arrays(nu, alpha, beta)
    aleatoric = beta / (alpha - 1.0)
    epistemic = beta / (nu * (alpha - 1.0))
    if apply_sqrt:
        aleatoric = np.sqrt(aleatoric)
        epistemic = np.sqrt(epistemic)
    return aleatoric, epistemic
