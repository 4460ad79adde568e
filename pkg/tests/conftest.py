import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from origin import FixtureOrigin  # noqa: E402

from clearlens.fetcher import FetchOptions  # noqa: E402
from clearlens.pipeline import TransformConfig  # noqa: E402
from clearlens.style_engine import load_presets  # noqa: E402

SERVICE_BASE = "http://127.0.0.1:8710"


@pytest.fixture(scope="session")
def origin():
    server = FixtureOrigin().start()
    yield server
    server.stop()


@pytest.fixture(scope="session")
def presets():
    return load_presets()


@pytest.fixture(scope="session")
def default_cfg(presets):
    return TransformConfig(
        preset=presets["default"],
        service_base=SERVICE_BASE,
        fetch=FetchOptions(timeout=10_000),
    )
