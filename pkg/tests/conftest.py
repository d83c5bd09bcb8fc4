"""Shared fixtures for the test suite"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path so imports work
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.frames import frame_from_columns, mercedes_frame, orthonormal_basis


@pytest.fixture
def rng():
    """Seeded generator so every randomized test is reproducible"""
    return np.random.default_rng(20240607)


@pytest.fixture
def onb():
    """Weight-1 orthonormal basis of C^2"""
    return orthonormal_basis(2)


@pytest.fixture
def mercedes():
    """Three unit vectors at 90, 210 and 330 degrees"""
    return mercedes_frame()


@pytest.fixture
def repeated_frame():
    """The redundant frame {e1, e2, e1} of C^2 with unit weights"""
    return frame_from_columns([[1, 0], [0, 1], [1, 0]])


@pytest.fixture
def catalogue_path():
    """Path to the experiment catalogue"""
    return Path(__file__).parent.parent / "src" / "catalogue.json"


@pytest.fixture
def catalogue(catalogue_path):
    """Raw experiment entries of catalogue.json"""
    if not catalogue_path.exists():
        pytest.fail(f"Catalogue not found at: {catalogue_path}")

    with open(catalogue_path, "r", encoding="utf-8") as f:
        return json.load(f)["experiments"]
