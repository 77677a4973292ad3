#!/usr/bin/env python3
"""Regenerate the golden reference files under tests/golden/.

Development tool: run it only after validating a build, then review the
diff. Tests compare against these files at value level (numeric fields,
polyline coordinates), not raw bytes, so BLAS-level noise on another
machine does not produce spurious failures.
"""
import sys
from pathlib import Path

from srmks.experiment import default_config, records_to_csv, run_experiment, summarize
from srmks.figures import predictions_svg

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


def main() -> int:
    cfg = default_config(repetitions=2, base_seed=1234)
    records = run_experiment(cfg)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    (GOLDEN / "config_ref.json").write_text(cfg.to_json(), encoding="utf-8")
    (GOLDEN / "records_ref.csv").write_text(records_to_csv(records), encoding="utf-8")
    (GOLDEN / "summary_ref.json").write_text(summarize(records).to_json(), encoding="utf-8")
    svg = predictions_svg(cfg, records, sample_size=251, iteration=0)
    (GOLDEN / "predictions_ref.svg").write_text(svg, encoding="utf-8")
    print(f"wrote golden files to {GOLDEN}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
