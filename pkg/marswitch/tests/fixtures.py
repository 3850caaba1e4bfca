import os
import stat
import tempfile
from pathlib import Path

import pytest
import numpy as np

os.environ['MARSWITCH_DEBUG'] = '0'
os.environ['MARSWITCH_WARN_NONUNIQUE_FILES'] = '0'

_CONFIG_DIR = None


def pytest_report_header(config):
    return "marswitch test suite: slow statistical checks need --run-slow"


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true",
                     help="Run the long statistical acceptance checks "
                     "(size simulations, Monte Carlo comparisons).")


def pytest_configure(config):
    """Setup pytest for marswitch testing"""
    global _CONFIG_DIR

    config.addinivalue_line(
        "markers", "slow: long statistical check, run with --run-slow"
    )

    # Isolate the tests from the global config file of the user.
    _CONFIG_DIR = tempfile.TemporaryDirectory()
    config_file = Path(_CONFIG_DIR.name) / 'marswitch.yml'
    config_file.touch(mode=stat.S_IRUSR | stat.S_IWUSR)
    os.environ['MARSWITCH_CONFIG'] = str(config_file)


def pytest_unconfigure(config):
    if _CONFIG_DIR is not None:
        _CONFIG_DIR.cleanup()


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="need --run-slow option to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    "Output directory of the CLI commands, through MARSWITCH_OUTPUT_DIR."
    out = tmp_path / 'outputs'
    monkeypatch.setenv('MARSWITCH_OUTPUT_DIR', str(out))
    return out


@pytest.fixture
def debug_mode(monkeypatch):
    monkeypatch.setenv('MARSWITCH_DEBUG', '1')


@pytest.fixture
def rng():
    return np.random.default_rng(0)
