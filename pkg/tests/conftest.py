import os
import sys

import pytest

# Add project root to path to ensure imports work
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from app.core.config import EngineConfig


@pytest.fixture
def models_dir():
    return os.path.join(ROOT, "models")


@pytest.fixture
def sequential():
    """Single-threaded config; results are identical to the threaded one"""
    return EngineConfig(workers=1)
