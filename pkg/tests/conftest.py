"""Shared pytest configuration."""

import os

import pytest


SLOW_ENV_VAR = "RSKYLINE_RUN_SLOW"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: default-scale workload, set RSKYLINE_RUN_SLOW=1 to run")


def pytest_collection_modifyitems(config, items):
    if os.environ.get(SLOW_ENV_VAR) == "1":
        return
    skip_slow = pytest.mark.skip(reason=f"set {SLOW_ENV_VAR}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
