import importlib

import numpy as np
import pytest

_CRITERIA: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA.append((marker.args[0], "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _CRITERIA:
        terminalreporter.write_line(f"[{status}] {label}")


def _available_backends():
    mods = [importlib.import_module("siegelfx._kernels_py")]
    try:
        mods.append(importlib.import_module("siegelfx._kernels"))
    except ImportError:
        pass
    return mods


@pytest.fixture(params=_available_backends(), ids=lambda m: m.NAME)
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20181004)
