import random

import pytest

from reglab.exactfield import FieldSpec
from reglab.families import Setup1Params, Setup2Params
from reglab.graded_core import RingSpec


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def qq():
    return FieldSpec(0)


@pytest.fixture
def gf2():
    return FieldSpec(2)


@pytest.fixture
def uvw(gf2):
    return RingSpec.polynomial(gf2, ("U", "V", "W"))


@pytest.fixture
def vw(qq):
    return RingSpec.polynomial(qq, ("V", "W"))


@pytest.fixture
def setup1():
    return Setup1Params()


@pytest.fixture
def setup2():
    return Setup2Params()


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch, tmp_path):
    # keep a developer's .env and REGLAB_* variables out of the tests
    for key in ("REGLAB_JOBS", "REGLAB_LOG_LEVEL", "REGLAB_LOG_DIR", "REGLAB_CONFIG"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
