"""Kernel smoother fitting, prediction, and capacity estimation.

The smoother is linear in the training targets:

    f(t*) = k(t*)^T (K + sigma_n^2 I)^{-1} y

where K is the Gram matrix over the training inputs and k(t*) the vector of
kernel evaluations against them. Fitting solves the system once by Cholesky
factorisation, escalating a small diagonal jitter if the factorisation
fails, and stores the eigenvalues of K (clamped at zero) so the capacity of
the fitted smoother is available as its effective degrees of freedom:

    edf = sum_i lambda_i / (lambda_i + sigma_n^2)

The edf counts the prevalent spectral components of K and serves as a
real-valued capacity estimate downstream; it is never rounded.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, SingularSystemError
from .kernels import KernelSpec, cross_vector, gram, kernel_eval
from .oscillator import TrainingSet

__all__ = ["FittedSmoother", "fit", "predict", "effective_dof"]

# jitter escalation on factorisation failure: start at 1e-12 * trace(K)/n,
# multiply by 10 per retry, at most 3 retries after the clean attempt
_JITTER_SCALE = 1e-12
_MAX_RETRIES = 3


@dataclass(frozen=True)
class FittedSmoother:
    """Immutable result of :func:`fit`; safe to share across threads."""

    kernel: KernelSpec
    t_train: np.ndarray
    sigma_n: float
    weights: np.ndarray
    eigenvalues: np.ndarray  # descending, clamped at zero
    edf: float


def _edf_from_spectrum(eigenvalues: np.ndarray, sigma_n: float) -> float:
    """Effective degrees of freedom from a nonnegative spectrum.

    A zero eigenvalue contributes nothing, also when sigma_n == 0 (the
    component does not exist), which keeps edf == n exactly for full-rank K
    with zero noise.
    """
    denom = eigenvalues + sigma_n**2
    terms = np.divide(
        eigenvalues, denom, out=np.zeros_like(eigenvalues), where=denom > 0
    )
    return float(np.sum(terms))


def fit(spec: KernelSpec, data: TrainingSet, sigma_n: float) -> FittedSmoother:
    """Fit the kernel smoother to `data` with noise level `sigma_n`.

    Raises SingularSystemError if (K + sigma_n^2 I) cannot be factorised
    even after jitter escalation, and InvalidInputError for empty data or a
    negative noise level.
    """
    if not sigma_n >= 0:
        raise InvalidInputError("sigma_n must be nonnegative")
    n = data.n
    if n == 0:
        raise InvalidInputError("cannot fit a smoother to empty data")

    K = gram(spec, data.t).values
    A = K + sigma_n**2 * np.eye(n)

    jitter_base = _JITTER_SCALE * float(np.trace(K)) / n
    weights = None
    for attempt in range(_MAX_RETRIES + 1):
        jitter = 0.0 if attempt == 0 else jitter_base * 10.0 ** (attempt - 1)
        try:
            factor = scipy.linalg.cho_factor(A + jitter * np.eye(n), lower=True)
            candidate = scipy.linalg.cho_solve(factor, data.y)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(candidate)):
            weights = candidate
            break
    if weights is None:
        raise SingularSystemError(
            f"factorisation of the {n}x{n} smoother system failed after "
            f"{_MAX_RETRIES} jitter retries"
        )

    lam = scipy.linalg.eigh(K, eigvals_only=True)[::-1]
    lam = np.maximum(lam, 0.0)
    edf = _edf_from_spectrum(lam, sigma_n)

    return FittedSmoother(
        kernel=spec,
        t_train=data.t,
        sigma_n=sigma_n,
        weights=weights,
        eigenvalues=lam,
        edf=edf,
    )


def predict(model: FittedSmoother, t_star):
    """Evaluate the fitted smoother at `t_star` (scalar or array).

    Defined for any real input, including extrapolation beyond the training
    span.
    """
    arr = np.asarray(t_star, dtype=float)
    if arr.ndim == 0:
        return float(cross_vector(model.kernel, model.t_train, float(arr)) @ model.weights)
    # one row of kernel evaluations per query point
    cross = kernel_eval(model.kernel, arr[:, None], model.t_train[None, :])
    return cross @ model.weights


def effective_dof(model: FittedSmoother) -> float:
    """Capacity of the fitted smoother (equals trace(K (K + sigma_n^2 I)^-1))."""
    return model.edf
