import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
sys.path.insert(0, str(SRC))

from numerics.quadrature import QuadratureSpec  # noqa: E402
from runtime.config import RunConfig  # noqa: E402


@pytest.fixture
def spec():
    return QuadratureSpec()


@pytest.fixture
def config(tmp_path):
    return RunConfig(output_dir=str(tmp_path / "out"))


@pytest.fixture
def output_dir(tmp_path):
    out = tmp_path / "results"
    out.mkdir()
    return out
