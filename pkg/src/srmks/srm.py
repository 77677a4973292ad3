"""Structural risk minimisation over nested kernel-smoother families.

A structure is an ordered list of kernel candidates whose capacity grows
along the list. For the SE family the nesting parameter is the
length-scale: candidates are ordered by descending l, because admitting
smaller length-scales produces wigglier smoothers with slower eigenvalue
decay and hence a higher effective-degrees-of-freedom capacity. For the
oscillator family the physical coefficients are fixed (assumed known) and
only the signal scale sigma_f varies.

Selection is an exhaustive search: each candidate is fitted, its training
MSE and capacity are computed, and the guaranteed-risk bound scores it.
The winner minimises the bound; ties go to the smaller capacity (the
simplest adequate element), then to grid order. If every candidate clips
to +infinity the selection still returns the smallest-capacity candidate,
flagged degenerate, so batch runs never abort.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .ioutil import fmt_float
from .kernels import (
    KernelSpec,
    SDOFKernel,
    SEKernel,
    kernel_to_json_dict,
)
from .oscillator import OscillatorParams, TrainingSet
from .risk import (
    RISK_CSV_HEADER,
    BoundConfig,
    RiskReport,
    empirical_risk,
    risk_csv_row,
    vc_bound_general,
    vc_bound_reduced,
)
from .smoother import fit, predict

__all__ = [
    "StructureGrid",
    "SelectionResult",
    "build_se_grid",
    "build_sdof_grid",
    "default_se_grid",
    "default_sdof_grid",
    "srm_select",
    "compare_structures",
    "selection_to_json",
    "trace_to_csv",
]


@dataclass(frozen=True)
class StructureGrid:
    """Ordered kernel candidates forming one nested structure."""

    family: str
    candidates: tuple[KernelSpec, ...]
    ordering_note: str

    def __post_init__(self):
        if not self.candidates:
            raise InvalidInputError("a structure needs at least one candidate")
        if any(c.family != self.family for c in self.candidates):
            raise InvalidInputError("all candidates must share the structure's family")

    @property
    def size(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class SelectionResult:
    """Winner of an exhaustive search plus the full per-candidate trace."""

    family: str
    best_spec: KernelSpec
    best_report: RiskReport
    trace: tuple[tuple[KernelSpec, RiskReport], ...]
    degenerate: bool = False


def _log_spaced(lo: float, hi: float, count: int) -> np.ndarray:
    if not (np.isfinite(lo) and np.isfinite(hi) and 0 < lo < hi):
        raise InvalidInputError(f"range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if count < 1:
        raise InvalidInputError("count must be at least 1")
    return np.geomspace(lo, hi, count)


def build_se_grid(
    data_span: tuple[float, float],
    sigma_f_range: tuple[float, float],
    l_range: tuple[float, float],
    n_sigma: int,
    n_l: int,
) -> StructureGrid:
    """SE structure: Cartesian grid over sigma_f (ascending) and l (descending).

    The primary ordering key is the descending length-scale, so capacity is
    nondecreasing along the candidate list.
    """
    sigmas = _log_spaced(*sigma_f_range, n_sigma)
    lengths = _log_spaced(*l_range, n_l)[::-1]
    candidates = tuple(
        SEKernel(sigma_f=float(sf), length_scale=float(l))
        for l in lengths
        for sf in sigmas
    )
    note = (
        f"length-scale descending from {lengths[0]:.6g} to {lengths[-1]:.6g} over "
        f"data span [{data_span[0]:.6g}, {data_span[1]:.6g}]; each step widens the "
        "admissible set of smoothers toward higher capacity"
    )
    return StructureGrid(family="se", candidates=candidates, ordering_note=note)


def build_sdof_grid(
    params: OscillatorParams,
    sigma_f_range: tuple[float, float],
    n_sigma: int,
) -> StructureGrid:
    """Oscillator structure: sigma_f grid with the coefficients held fixed."""
    sigmas = _log_spaced(*sigma_f_range, n_sigma)
    candidates = tuple(SDOFKernel(sigma_f=float(sf), params=params) for sf in sigmas)
    note = (
        "signal scale ascending; m, c, k fixed to the supplied coefficients "
        "in every candidate"
    )
    return StructureGrid(family="sdof", candidates=candidates, ordering_note=note)


def _amplitude_range(data: TrainingSet, lo_factor: float, hi_factor: float) -> tuple[float, float]:
    rms = float(np.sqrt(np.mean(data.y**2)))
    return lo_factor * rms, hi_factor * rms


def default_se_grid(
    data: TrainingSet, n_sigma: int = 10, n_l: int = 30,
    amplitude_factors: tuple[float, float] = (0.1, 10.0),
) -> StructureGrid:
    """Data-driven SE grid: sigma_f brackets the target RMS, l the resolvable scales.

    sigma_f (which equals the kernel's output amplitude sqrt(k(0))) spans
    [0.1, 10] times RMS(y); the length-scale spans the smallest training-point
    gap up to the full span.
    """
    sf_range = _amplitude_range(data, *amplitude_factors)
    gaps = np.diff(data.t)
    l_range = (float(np.min(gaps)), float(data.t[-1] - data.t[0]))
    span = (float(data.t[0]), float(data.t[-1]))
    return build_se_grid(span, sf_range, l_range, n_sigma, n_l)


def default_sdof_grid(
    data: TrainingSet, params: OscillatorParams, n_sigma: int = 30,
    amplitude_factors: tuple[float, float] = (0.1, 10.0),
) -> StructureGrid:
    """Data-driven oscillator grid bracketing the kernel's output amplitude.

    For this family sqrt(k(0)) = sigma_f / sqrt(4 m^2 zeta omega_n^3), so the
    sigma_f range is the amplitude bracket [0.1, 10] * RMS(y) rescaled by
    sqrt(4 m^2 zeta omega_n^3). Both families then sweep the same output
    amplitudes, which keeps their treatment symmetric.
    """
    lo, hi = _amplitude_range(data, *amplitude_factors)
    scale = np.sqrt(4.0 * params.m**2 * params.zeta * params.omega_n**3)
    return build_sdof_grid(params, (lo * scale, hi * scale), n_sigma)


def _selection_key(entry: tuple[int, tuple[KernelSpec, RiskReport]]):
    index, (_, report) = entry
    return (report.bound, report.h, index)


def srm_select(
    grid: StructureGrid,
    data: TrainingSet,
    bound_config: BoundConfig | None = None,
) -> SelectionResult:
    """Exhaustively fit every candidate and return the minimum-bound one.

    Every fit uses the training set's own noise level. With the default
    ``bound_config=None`` candidates are scored by the reduced bound; a
    config scores them by the general bound instead.
    """
    n = data.n
    trace = []
    for spec in grid.candidates:
        model = fit(spec, data, data.sigma_n)
        mse = empirical_risk(data.y, predict(model, data.t))
        if bound_config is None:
            report = vc_bound_reduced(mse, model.edf, n)
        else:
            report = vc_bound_general(mse, model.edf, n, bound_config)
        trace.append((spec, report))

    best_index, (best_spec, best_report) = min(enumerate(trace), key=_selection_key)
    degenerate = all(report.clipped for _, report in trace)
    return SelectionResult(
        family=grid.family,
        best_spec=best_spec,
        best_report=best_report,
        trace=tuple(trace),
        degenerate=degenerate,
    )


def compare_structures(results: list[SelectionResult]) -> SelectionResult:
    """Pick the structure whose winner has the smallest guaranteed risk.

    Ties break toward the smaller capacity, then toward list order.
    """
    if not results:
        raise InvalidInputError("no structures to compare")
    indexed = [(i, (r.best_spec, r.best_report)) for i, r in enumerate(results)]
    winner_index = min(indexed, key=_selection_key)[0]
    return results[winner_index]


def selection_to_json(result: SelectionResult) -> str:
    """Winner plus full trace as a JSON document."""
    doc = {
        "family": result.family,
        "degenerate": result.degenerate,
        "best_spec": kernel_to_json_dict(result.best_spec),
        "best_report": result.best_report.to_json_dict(),
        "trace": [
            {"spec": kernel_to_json_dict(spec), "report": report.to_json_dict()}
            for spec, report in result.trace
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def trace_to_csv(result: SelectionResult) -> str:
    """Trace rows in the risk-report CSV format plus candidate hyperparameters."""
    lines = [RISK_CSV_HEADER + ",sigma_f,length_scale"]
    for spec, report in result.trace:
        length = fmt_float(spec.length_scale) if isinstance(spec, SEKernel) else ""
        lines.append(
            risk_csv_row(result.family, report)
            + f",{fmt_float(spec.sigma_f)},{length}"
        )
    return "\n".join(lines) + "\n"
