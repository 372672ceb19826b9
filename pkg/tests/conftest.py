import os
import sys, pathlib
import tempfile
sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
os.environ.setdefault("CI", "true")
# keep logs and per-user config out of the real home directory
os.environ.setdefault("TS_HOME", tempfile.mkdtemp(prefix="tstoolkit-tests-"))

import pytest

from engine.measure import Ray, RosinskiMeasure, TSParams, atom_measure
from engine.profiles import ParetoProfile


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo checks with 10^5 or more draws")


@pytest.fixture(autouse=True)
def _single_thread(monkeypatch):
    monkeypatch.setenv("TS_NUM_THREADS", "1")


@pytest.fixture
def delta_one():
    """TS^1_0.5 with R = atom at 1 of weight 1 on +1."""
    return TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0)]))


@pytest.fixture
def symmetric_delta():
    return TSParams(0.5, 1.0, (0.0,), atom_measure([((1.0,), 1.0, 1.0), ((-1.0,), 1.0, 1.0)]))


@pytest.fixture
def pareto_three():
    """Pareto tail of index 3 from r0 = 1, alpha = 0.5, p = 1."""
    return TSParams(0.5, 1.0, (0.0,), RosinskiMeasure(1, (Ray((1.0,), ParetoProfile(1.0, 3.0, 1.0)),)))


@pytest.fixture
def zero_params():
    return TSParams(0.5, 1.0, (1.0,), RosinskiMeasure.zero(1))
