import numpy as np
import pytest


@pytest.fixture
def gen():
    """Fresh deterministic generator per test."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(0xC0EA)))


def pytest_addoption(parser):
    parser.addoption(
        "--acceptance-only",
        action="store_true",
        default=False,
        help="run only the acceptance criteria module",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--acceptance-only"):
        keep = [it for it in items if "test_acceptance" in it.nodeid]
        items[:] = keep
