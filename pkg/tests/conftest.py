import sys
from pathlib import Path

# make the sibling oracles module importable regardless of invocation dir
sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest

from srmks.experiment import ExperimentConfig, run_experiment
from srmks.oscillator import OscillatorParams

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR


@pytest.fixture(scope="session")
def paper_params() -> OscillatorParams:
    return OscillatorParams(m=1.0, c=20.0, k=1e6)


@pytest.fixture(scope="session")
def small_cfg(golden_dir) -> ExperimentConfig:
    """The golden reference configuration (2 repetitions, base seed 1234)."""
    return ExperimentConfig.from_json((golden_dir / "config_ref.json").read_text())


@pytest.fixture(scope="session")
def small_records(small_cfg):
    """One shared run of the golden reference study."""
    return run_experiment(small_cfg)
