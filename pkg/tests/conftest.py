# tests/conftest.py
# Shared pytest fixtures and configuration

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


# ============================================================================
# ENVIRONMENT SETUP
# ============================================================================

@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    # Quiet progress logging and keep stray outputs out of the repository
    os.environ["TESTING"] = "1"
    os.environ.setdefault("OCL_LOG_EVERY_TURNS", "1000000")

    yield

    if os.getenv("TESTING"):
        del os.environ["TESTING"]


# ============================================================================
# MODEL FIXTURES
# ============================================================================

@pytest.fixture
def tiny_pi_config():
    # Small double-precision pi-transformer
    from app.model import ModelConfig
    return ModelConfig(
        variant="pi",
        width=8,
        depth=2,
        num_query_heads=2,
        key_size=4,
        window=64,
        num_classes=4,
        feature_dim=3,
        ffw_multiplier=2,
        dtype="float64",
    )


@pytest.fixture
def tiny_two_token_config(tiny_pi_config):
    return tiny_pi_config.model_copy(update={"variant": "two_token"})


@pytest.fixture
def random_head():
    # Replace the zero-initialised head so logits depend on the inputs
    def _randomize(model, seed: int = 123):
        rng = np.random.default_rng(seed)
        params = model.params
        params.head.data = rng.standard_normal(params.head.shape).astype(params.head.dtype)
        params.head_bias.data = 0.1 * rng.standard_normal(params.head_bias.shape).astype(params.head.dtype)
        return model
    return _randomize


# ============================================================================
# DATA FIXTURES
# ============================================================================

def make_examples(num_examples: int, feature_dim: int, num_classes: int, seed: int = 0):
    # Random examples with labels in [0, num_classes)
    from app.model import Example
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((num_examples, feature_dim))
    labels = rng.integers(0, num_classes, size=num_examples)
    return [Example(features=f, label=int(y)) for f, y in zip(features, labels)]


@pytest.fixture
def examples_factory():
    return make_examples


@pytest.fixture
def random_source():
    # ArraySource of random features/labels
    def _create(num_examples: int, feature_dim: int, num_classes: int, seed: int = 0):
        from app.data import ArraySource
        rng = np.random.default_rng(seed)
        return ArraySource(
            rng.standard_normal((num_examples, feature_dim)),
            rng.integers(0, num_classes, size=num_examples),
            num_classes=num_classes,
        )
    return _create


@pytest.fixture
def blob_base():
    from app.data import gaussian_blob_dataset
    return gaussian_blob_dataset(num_classes=12, feature_dim=3, cluster_spread=0.3, seed=0, examples_per_class=20)


# ============================================================================
# FILE SYSTEM FIXTURES
# ============================================================================

@pytest.fixture
def temp_directory(tmp_path):
    # Temporary directory that's cleaned up automatically
    return tmp_path


# ============================================================================
# PYTEST MARKERS
# ============================================================================

def pytest_configure(config):
    config.addinivalue_line("markers", "unit: mark test as unit test")
    config.addinivalue_line("markers", "integration: mark test as integration test")
    config.addinivalue_line("markers", "slow: mark test as slow")


# ============================================================================
# TEST COLLECTION HOOKS
# ============================================================================

def pytest_collection_modifyitems(config, items):
    # Unit by default; CLI and training-loop modules are integration tests
    for item in items:
        path = str(item.fspath)
        if "slow" in item.keywords:
            continue
        if os.sep + "cli" + os.sep in path or "test_trainer" in path or "test_ablations" in path:
            item.add_marker(pytest.mark.integration)
        else:
            item.add_marker(pytest.mark.unit)
