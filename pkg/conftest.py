import json

import pytest

from src.models.entities import Carriers, MaterialParams, MicrowaveDrive
from src.simulators import physics

# 30 GHz drive, 1555 nm light, LiNbO3 slot waveguide, 50 V/m received field
REFERENCE_DELTA_THETA = -0.19342
REFERENCE_W_O = 2.8815e-3


@pytest.fixture
def material():
    return MaterialParams.from_index(1.734)


@pytest.fixture
def carriers():
    return Carriers(f_w=30e9, lambda_op=1555e-9)


@pytest.fixture
def drive():
    return MicrowaveDrive(E_w=50.0)


@pytest.fixture
def optimum(material, carriers, drive):
    """Factory for optimum-geometry designs with N elements."""

    def build(N=1):
        return physics.optimum_design(material, carriers, drive, N=N)

    return build


@pytest.fixture
def single(optimum):
    return optimum(1)


@pytest.fixture
def write_config(tmp_path):
    """Write a scenario document and return its path."""

    def write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
