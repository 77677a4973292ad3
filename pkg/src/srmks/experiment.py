"""Monte-Carlo study: repeated SRM selection across sample sizes and kernels.

For every sampling plan and iteration, a fresh noise realisation of the
training set is drawn, both kernel structures are searched exhaustively,
and each structure's winner is scored by its guaranteed-risk bound and by
the MSE between its prediction and the noise-free signal on the dense base
grid. The per-iteration seed is base_seed + iteration index, so any single
(plan, iteration) cell can be recomputed in isolation and reproduces its
record exactly.

Outputs serialize to records.csv (one row per record), summary.json
(five-number boxplot statistics per sample size, family and metric) and
config.json (echo of the configuration). Floats carry 17 significant
digits; infinite bounds are written as "inf".
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, SrmksError
from .ioutil import fmt_float, json_float, json_to_float
from .kernels import KernelSpec, SEKernel, kernel_from_json_dict, kernel_to_json_dict
from .oscillator import (
    OscillatorParams,
    SamplingPlan,
    generate_training_set,
    impulse_response,
)
from .risk import BoundConfig, empirical_risk
from .smoother import fit, predict
from .srm import default_sdof_grid, default_se_grid, srm_select

__all__ = [
    "GridSettings",
    "ExperimentConfig",
    "IterationRecord",
    "BoxStats",
    "BoxplotSummary",
    "CapacitySpread",
    "ExperimentError",
    "default_config",
    "run_iteration",
    "run_experiment",
    "records_to_csv",
    "records_from_csv",
    "summarize",
    "capacity_spread",
    "sdof_edf_stability",
]

FAMILIES = ("se", "sdof")
METRICS = ("bound", "true_mse", "h")

RECORDS_CSV_HEADER = "n,iteration,family,sigma_f,length_scale,emp_risk,h,bound,true_mse"


class ExperimentError(SrmksError):
    """A unit of the study failed; the message names the failing cell."""


@dataclass(frozen=True)
class GridSettings:
    """Grid resolutions and the shared output-amplitude bracket."""

    se_sigma_count: int = 10
    se_length_count: int = 30
    sdof_sigma_count: int = 30
    amplitude_factors: tuple[float, float] = (0.1, 10.0)

    def to_json_dict(self) -> dict:
        return {
            "se_sigma_count": self.se_sigma_count,
            "se_length_count": self.se_length_count,
            "sdof_sigma_count": self.sdof_sigma_count,
            "amplitude_factors": [json_float(f) for f in self.amplitude_factors],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GridSettings":
        factors = d.get("amplitude_factors", [0.1, 10.0])
        return cls(
            se_sigma_count=int(d.get("se_sigma_count", 10)),
            se_length_count=int(d.get("se_length_count", 30)),
            sdof_sigma_count=int(d.get("sdof_sigma_count", 30)),
            amplitude_factors=(json_to_float(factors[0]), json_to_float(factors[1])),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    params: OscillatorParams
    plans: tuple[SamplingPlan, ...]
    repetitions: int
    base_seed: int
    grids: GridSettings = field(default_factory=GridSettings)
    bound_config: BoundConfig = field(default_factory=BoundConfig)

    def __post_init__(self):
        if self.repetitions < 1:
            raise InvalidInputError("repetitions must be at least 1")
        if not self.plans:
            raise InvalidInputError("at least one sampling plan is required")

    def iteration_seed(self, iteration: int) -> int:
        return self.base_seed + iteration

    def to_json_dict(self) -> dict:
        return {
            "oscillator": {
                "m": json_float(self.params.m),
                "c": json_float(self.params.c),
                "k": json_float(self.params.k),
            },
            "plans": [p.to_json_dict() for p in self.plans],
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "grids": self.grids.to_json_dict(),
            "bound": self.bound_config.to_json_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        osc = d["oscillator"]
        params = OscillatorParams(
            m=json_to_float(osc["m"]), c=json_to_float(osc["c"]), k=json_to_float(osc["k"])
        )
        plans = tuple(SamplingPlan.from_json_dict(p) for p in d["plans"])
        return cls(
            params=params,
            plans=plans,
            repetitions=int(d["repetitions"]),
            base_seed=int(d["base_seed"]),
            grids=GridSettings.from_json_dict(d.get("grids", {})),
            bound_config=BoundConfig.from_json_dict(d.get("bound", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_json_dict(json.loads(text))


def default_config(repetitions: int = 100, base_seed: int = 1234) -> ExperimentConfig:
    """Reference study: 100 noise realisations over n = 63, 126, 251 at SNR 10."""
    params = OscillatorParams(m=1.0, c=20.0, k=1e6)
    plans = tuple(
        SamplingPlan(
            t_start=0.0, t_end=0.3, base_points=1001,
            decimation=dec, snr=10.0, seed=base_seed,
        )
        for dec in (16, 8, 4)
    )
    return ExperimentConfig(
        params=params, plans=plans, repetitions=repetitions, base_seed=base_seed
    )


@dataclass(frozen=True)
class IterationRecord:
    """One structure's winner for one (sample size, iteration) cell."""

    sample_size: int
    iteration: int
    family: str
    chosen_spec: KernelSpec
    emp_risk: float
    bound: float
    h: float
    true_mse: float


def run_iteration(cfg: ExperimentConfig, plan: SamplingPlan, iteration: int) -> list[IterationRecord]:
    """Run both structures for one plan and iteration; deterministic given cfg.

    The plan's own seed field is replaced by the derived per-iteration seed.
    """
    seeded = replace(plan, seed=cfg.iteration_seed(iteration))
    data = generate_training_set(cfg.params, seeded)
    dense_t = plan.base_grid()
    dense_h = impulse_response(cfg.params, dense_t)

    grids = {
        "se": default_se_grid(
            data,
            n_sigma=cfg.grids.se_sigma_count,
            n_l=cfg.grids.se_length_count,
            amplitude_factors=cfg.grids.amplitude_factors,
        ),
        "sdof": default_sdof_grid(
            data,
            cfg.params,
            n_sigma=cfg.grids.sdof_sigma_count,
            amplitude_factors=cfg.grids.amplitude_factors,
        ),
    }

    records = []
    for family in FAMILIES:
        try:
            selection = srm_select(grids[family], data, cfg.bound_config)
            winner = fit(selection.best_spec, data, data.sigma_n)
            true_mse = empirical_risk(dense_h, predict(winner, dense_t))
        except SrmksError as exc:
            raise ExperimentError(
                f"n={data.n}, iteration={iteration}, family={family}: {exc}"
            ) from exc
        records.append(
            IterationRecord(
                sample_size=data.n,
                iteration=iteration,
                family=family,
                chosen_spec=selection.best_spec,
                emp_risk=selection.best_report.empirical_risk,
                bound=selection.best_report.bound,
                h=selection.best_report.h,
                true_mse=true_mse,
            )
        )
    return records


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("SRMKS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[IterationRecord]:
    """Run the full study; records come back sorted by (plan order, iteration, family).

    Work units are independent (plan, iteration) cells, distributed over a
    thread pool. Results are assembled in deterministic order regardless of
    scheduling, so output bytes do not depend on the worker count. The
    default count comes from SRMKS_THREADS or the machine's CPU count.
    """
    units = [
        (plan_index, plan, iteration)
        for plan_index, plan in enumerate(cfg.plans)
        for iteration in range(cfg.repetitions)
    ]
    count = _worker_count(workers)
    if count == 1:
        results = [run_iteration(cfg, plan, it) for _, plan, it in units]
    else:
        with ThreadPoolExecutor(max_workers=count) as pool:
            futures = [pool.submit(run_iteration, cfg, plan, it) for _, plan, it in units]
            results = [f.result() for f in futures]
    records: list[IterationRecord] = []
    for unit_records in results:
        records.extend(unit_records)
    return records


def records_to_csv(records: list[IterationRecord]) -> str:
    """CSV text, one record per row; the length-scale column is empty for sdof."""
    lines = [RECORDS_CSV_HEADER]
    for r in records:
        spec = r.chosen_spec
        length = fmt_float(spec.length_scale) if isinstance(spec, SEKernel) else ""
        lines.append(
            ",".join(
                [
                    str(r.sample_size),
                    str(r.iteration),
                    r.family,
                    fmt_float(spec.sigma_f),
                    length,
                    fmt_float(r.emp_risk),
                    fmt_float(r.h),
                    fmt_float(r.bound),
                    fmt_float(r.true_mse),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def records_from_csv(text: str, params: OscillatorParams | None = None) -> list[IterationRecord]:
    """Parse records.csv; `params` rebuilds sdof specs (defaults to the reference system)."""
    if params is None:
        params = OscillatorParams(m=1.0, c=20.0, k=1e6)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != RECORDS_CSV_HEADER:
        raise InvalidInputError(
            f"records CSV must start with header '{RECORDS_CSV_HEADER}'"
        )
    records = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 9:
            raise InvalidInputError(f"malformed records row: {ln!r}")
        n, iteration, family, sigma_f, length, emp, h, bound, tmse = parts
        if family == "se":
            spec: KernelSpec = kernel_from_json_dict(
                {"family": "se", "sigma_f": float(sigma_f), "length_scale": float(length)}
            )
        elif family == "sdof":
            spec = kernel_from_json_dict(
                {
                    "family": "sdof",
                    "sigma_f": float(sigma_f),
                    "m": params.m,
                    "c": params.c,
                    "k": params.k,
                }
            )
        else:
            raise InvalidInputError(f"unknown family {family!r} in records row")
        records.append(
            IterationRecord(
                sample_size=int(n),
                iteration=int(iteration),
                family=family,
                chosen_spec=spec,
                emp_risk=float(emp),
                h=float(h),
                bound=float(bound),
                true_mse=float(tmse),
            )
        )
    return records


@dataclass(frozen=True)
class BoxStats:
    """Five-number summary plus mean; None when no finite values exist.

    Quantiles use linear interpolation between order statistics (the median
    of an even count is the midpoint of the two central values). Infinite
    values are excluded and counted separately.
    """

    minimum: float | None
    q1: float | None
    median: float | None
    q3: float | None
    maximum: float | None
    mean: float | None
    count: int
    infinite_count: int

    def to_json_dict(self) -> dict:
        def opt(v):
            return None if v is None else json_float(v)

        return {
            "min": opt(self.minimum),
            "q1": opt(self.q1),
            "median": opt(self.median),
            "q3": opt(self.q3),
            "max": opt(self.maximum),
            "mean": opt(self.mean),
            "count": self.count,
            "infinite_count": self.infinite_count,
        }


def _box_stats(values: np.ndarray) -> BoxStats:
    total = values.size
    finite = values[np.isfinite(values)]
    infinite = total - finite.size
    if finite.size == 0:
        return BoxStats(None, None, None, None, None, None, total, infinite)
    lo, q1, med, q3, hi = np.percentile(finite, [0, 25, 50, 75, 100], method="linear")
    return BoxStats(
        minimum=float(lo),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=float(hi),
        mean=float(np.mean(finite)),
        count=total,
        infinite_count=infinite,
    )


@dataclass(frozen=True)
class BoxplotSummary:
    """BoxStats per (sample size, family, metric) cell."""

    cells: dict[tuple[int, str, str], BoxStats]

    def get(self, n: int, family: str, metric: str) -> BoxStats:
        return self.cells[(n, family, metric)]

    @property
    def sample_sizes(self) -> list[int]:
        return sorted({n for n, _, _ in self.cells})

    def to_json(self) -> str:
        doc: dict = {}
        for (n, family, metric), stats in sorted(self.cells.items()):
            doc.setdefault(str(n), {}).setdefault(family, {})[metric] = stats.to_json_dict()
        return json.dumps(doc, indent=2) + "\n"


def summarize(records: list[IterationRecord]) -> BoxplotSummary:
    """Boxplot statistics per (n, family, metric in {bound, true_mse, h})."""
    if not records:
        raise InvalidInputError("no records to summarize")
    cells = {}
    sizes = sorted({r.sample_size for r in records})
    for n in sizes:
        for family in FAMILIES:
            group = [r for r in records if r.sample_size == n and r.family == family]
            if not group:
                continue
            for metric in METRICS:
                values = np.array([getattr(r, _METRIC_FIELD[metric]) for r in group])
                cells[(n, family, metric)] = _box_stats(values)
    return BoxplotSummary(cells=cells)


_METRIC_FIELD = {"bound": "bound", "true_mse": "true_mse", "h": "h"}


@dataclass(frozen=True)
class CapacitySpread:
    """Median capacity per sample size and their maximum relative spread."""

    family: str
    medians: dict[int, float]
    max_relative_spread: float


def capacity_spread(records: list[IterationRecord], family: str) -> CapacitySpread:
    """Median h per sample size for one family; spread = (max - min) / min."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        if r.family == family:
            by_n.setdefault(r.sample_size, []).append(r.h)
    if len(by_n) < 2:
        raise InvalidInputError(
            f"capacity spread needs records for >= 2 sample sizes, got {len(by_n)}"
        )
    medians = {n: float(np.median(vals)) for n, vals in sorted(by_n.items())}
    lo = min(medians.values())
    hi = max(medians.values())
    if hi == lo:
        spread = 0.0
    elif lo == 0.0:
        spread = float("inf")
    else:
        spread = (hi - lo) / lo
    return CapacitySpread(family=family, medians=medians, max_relative_spread=spread)


def sdof_edf_stability(records: list[IterationRecord]) -> CapacitySpread:
    """Capacity stability report for the oscillator-kernel structure."""
    return capacity_spread(records, "sdof")
