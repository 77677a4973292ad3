"""Kernel functions and Gram-matrix construction.

Two stationary kernel families are implemented:

* squared exponential (SE):
      k(t, t') = sigma_f^2 * exp(-(t - t')^2 / (2 l^2))
  The exponent uses the squared distance; this is the standard definition
  of the squared-exponential covariance.

* oscillator (SDOF) kernel, the stationary covariance of an underdamped
  linear oscillator driven by white noise. With tau = |t - t'|:
      k(t, t') = sigma_f^2 / (4 m^2 zeta omega_n^3)
                 * exp(-zeta omega_n tau)
                 * [cos(omega_d tau) + (zeta omega_n / omega_d) sin(omega_d tau)]

Both are symmetric and depend on the inputs only through t - t'. Gram
matrices are filled on the upper triangle and mirrored, so symmetry is
exact regardless of floating-point evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .ioutil import json_float, json_to_float
from .oscillator import OscillatorParams

__all__ = [
    "SEKernel",
    "SDOFKernel",
    "KernelSpec",
    "GramMatrix",
    "kernel_eval",
    "gram",
    "cross_vector",
    "kernel_to_json_dict",
    "kernel_from_json_dict",
]


@dataclass(frozen=True)
class SEKernel:
    """Squared-exponential kernel with signal scale sigma_f and length-scale (s)."""

    sigma_f: float
    length_scale: float

    family = "se"

    def __post_init__(self):
        if not (math.isfinite(self.sigma_f) and self.sigma_f > 0):
            raise InvalidInputError("sigma_f must be positive and finite")
        if not (math.isfinite(self.length_scale) and self.length_scale > 0):
            raise InvalidInputError("length_scale must be positive and finite")


@dataclass(frozen=True)
class SDOFKernel:
    """Oscillator kernel: sigma_f plus the physical coefficients of the system."""

    sigma_f: float
    params: OscillatorParams

    family = "sdof"

    def __post_init__(self):
        if not (math.isfinite(self.sigma_f) and self.sigma_f > 0):
            raise InvalidInputError("sigma_f must be positive and finite")
        # params validates the underdamped requirement at construction

    @property
    def diagonal(self) -> float:
        """Kernel value at tau = 0: sigma_f^2 / (4 m^2 zeta omega_n^3)."""
        p = self.params
        return self.sigma_f**2 / (4.0 * p.m**2 * p.zeta * p.omega_n**3)


KernelSpec = Union[SEKernel, SDOFKernel]


def kernel_eval(spec: KernelSpec, t, t_prime):
    """Evaluate the kernel at (t, t'). Broadcasts over array inputs."""
    tau = np.subtract(t, t_prime)
    if isinstance(spec, SEKernel):
        return spec.sigma_f**2 * np.exp(-(tau**2) / (2.0 * spec.length_scale**2))
    if isinstance(spec, SDOFKernel):
        p = spec.params
        zw = p.zeta * p.omega_n
        wd = p.omega_d
        atau = np.abs(tau)
        envelope = np.exp(-zw * atau)
        oscillation = np.cos(wd * atau) + (zw / wd) * np.sin(wd * atau)
        return spec.diagonal * envelope * oscillation
    raise InvalidInputError(f"unknown kernel spec {spec!r}")


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric matrix of pairwise kernel evaluations over a set of inputs."""

    values: np.ndarray
    kernel: KernelSpec
    inputs: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


def gram(spec: KernelSpec, t) -> GramMatrix:
    """Build the Gram matrix for inputs `t`.

    Each unordered pair is evaluated once (upper triangle) and mirrored,
    so values[i, j] == values[j, i] holds exactly.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("inputs must be a nonempty 1-d array")
    n = t.size
    iu, ju = np.triu_indices(n)
    vals = kernel_eval(spec, t[iu], t[ju])
    K = np.zeros((n, n), dtype=float)
    K[iu, ju] = vals
    K[ju, iu] = vals
    return GramMatrix(values=K, kernel=spec, inputs=t)


def cross_vector(spec: KernelSpec, t_train, t_star) -> np.ndarray:
    """Vector with element i equal to kernel_eval(spec, t_train[i], t_star)."""
    t_train = np.asarray(t_train, dtype=float)
    if t_train.ndim != 1 or t_train.size == 0:
        raise InvalidInputError("t_train must be a nonempty 1-d array")
    return np.asarray(kernel_eval(spec, t_train, t_star), dtype=float)


def kernel_to_json_dict(spec: KernelSpec) -> dict:
    if isinstance(spec, SEKernel):
        return {
            "family": "se",
            "sigma_f": json_float(spec.sigma_f),
            "length_scale": json_float(spec.length_scale),
        }
    if isinstance(spec, SDOFKernel):
        return {
            "family": "sdof",
            "sigma_f": json_float(spec.sigma_f),
            "m": json_float(spec.params.m),
            "c": json_float(spec.params.c),
            "k": json_float(spec.params.k),
        }
    raise InvalidInputError(f"unknown kernel spec {spec!r}")


def kernel_from_json_dict(d: dict) -> KernelSpec:
    family = d.get("family")
    if family == "se":
        return SEKernel(
            sigma_f=json_to_float(d["sigma_f"]),
            length_scale=json_to_float(d["length_scale"]),
        )
    if family == "sdof":
        params = OscillatorParams(
            m=json_to_float(d["m"]), c=json_to_float(d["c"]), k=json_to_float(d["k"])
        )
        return SDOFKernel(sigma_f=json_to_float(d["sigma_f"]), params=params)
    raise InvalidInputError(f"unknown kernel family {family!r}")
