from datetime import datetime, timedelta

import numpy as np
import pytest

from buildsim import envelope, weather
from buildsim.config import load_config, resolve


@pytest.fixture(scope="session")
def default_config():
    return load_config()


@pytest.fixture(scope="session")
def resolved(default_config):
    return resolve(default_config)


@pytest.fixture
def small_fabric():
    return envelope.BuildingFabric(
        a_f=100.0, u_op=1.0, a_op=200.0, u_win=2.0,
        windows=(envelope.Window(10.0, 0.0), envelope.Window(5.0, 180.0)),
        volume=250.0,
    )


def make_series(temps_k, start=datetime(2023, 1, 1), step_h=1.0, ghi=0.0, location=None):
    """Uniform test series with constant irradiance and humidity."""
    n = len(temps_k)
    stamps = [start + timedelta(hours=step_h * i) for i in range(n)]
    ghi = np.broadcast_to(np.asarray(ghi, dtype=float), (n,))
    return weather.build_series(stamps, temps_k, ghi, np.zeros(n), ghi, np.full(n, 0.8),
                                np.full(n, 101325.0), location or weather.Location())


@pytest.fixture
def series_factory():
    return make_series
