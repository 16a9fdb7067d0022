"""
Shared fixtures.
"""
from pathlib import Path
from unittest.mock import patch

import pytest

from dunklsb.core.quadrature import gauss_rule_1d, tensor_rule
from dunklsb.models import MultiplicitySetup, set_cache_dir


@pytest.fixture(autouse=True)
def mock_app_dir(tmp_path):
    """Keep the application directory and the rule cache inside tmp_path."""
    app_dir = tmp_path / "app"
    app_dir.mkdir()
    set_cache_dir(None)
    with patch("dunklsb.models.storage.get_app_dir", return_value=Path(app_dir)):
        yield app_dir
    set_cache_dir(None)


@pytest.fixture
def setup_k1() -> MultiplicitySetup:
    return MultiplicitySetup.of(1.0, 1.0)


@pytest.fixture
def setup_k0() -> MultiplicitySetup:
    return MultiplicitySetup.of(0.0, 1.0)


@pytest.fixture
def setup_2d() -> MultiplicitySetup:
    return MultiplicitySetup.of((0.5, 1.5), 1.0)


@pytest.fixture(scope="session")
def rule_k1():
    return gauss_rule_1d(1.0, 1.0, 60)


@pytest.fixture(scope="session")
def rule_k1_2t():
    return gauss_rule_1d(1.0, 2.0, 60)


@pytest.fixture(scope="session")
def rule_k0():
    return gauss_rule_1d(0.0, 1.0, 60)


@pytest.fixture(scope="session")
def rule_2d():
    return tensor_rule(MultiplicitySetup.of((0.5, 1.5), 1.0), 30)
