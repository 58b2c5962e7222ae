"""
For pytest provide the bundled AQI tables, small synthetic datasets and configurations
"""
import pytest

from drlssv.utils.config import build_config
from drlssv.utils.ingestion import AqiBreakpoints
from drlssv.utils.synth import SynthSpec, generate


@pytest.fixture(scope='session')
def breakpoints():
    return AqiBreakpoints.bundled()


@pytest.fixture(scope='session')
def small_dataset(breakpoints):  # pylint: disable=redefined-outer-name
    """Three stations over twenty days of planted synthetic data."""
    return generate(SynthSpec(n_stations=3, days=20, seed=7), breakpoints)


@pytest.fixture(scope='function')
def quick_config():
    """Factory of ``quick`` protocol configurations with extra ``--set`` style overrides."""

    def _build(*overrides, **kwargs):
        return build_config(protocol='quick', overrides=overrides, **kwargs)

    return _build
