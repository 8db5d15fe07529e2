"""Shared fixtures: scenario results are computed once per session.

The fig4-full trajectory dominates the suite's runtime (about five
minutes of exponential-propagator stepping); the acceptance checks that
need scenario output share these session-scoped results instead of
re-running it.  acceptance_log collects one verdict line per check and
the terminal hook prints them as a closing section of the run.
"""

from __future__ import annotations

import numpy as np
import pytest

from ghzsim import run_scenario, scenario_defaults


def _run(name, tmp_path_factory, **updates):
    out = tmp_path_factory.mktemp(name.replace("-", "_"))
    config = scenario_defaults(name).with_updates(out_dir=str(out), **updates)
    return run_scenario(config)


@pytest.fixture(scope="session")
def fig3_result(tmp_path_factory):
    return _run("fig3", tmp_path_factory)


@pytest.fixture(scope="session")
def inset_result(tmp_path_factory):
    return _run("fig3-inset", tmp_path_factory)


@pytest.fixture(scope="session")
def fig4_full_result(tmp_path_factory):
    return _run("fig4-full", tmp_path_factory)


@pytest.fixture(scope="session")
def fig4_eff_result(tmp_path_factory):
    return _run("fig4-eff", tmp_path_factory)


@pytest.fixture(scope="session")
def table_result(tmp_path_factory):
    return _run("table", tmp_path_factory)


@pytest.fixture(scope="session")
def gfluct_result(tmp_path_factory):
    return _run("gfluct", tmp_path_factory)


@pytest.fixture(scope="session")
def appendix_result(tmp_path_factory):
    return _run("appendix", tmp_path_factory)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log(request):
    lines = request.config._acceptance_lines

    def log(line: str) -> None:
        lines.append(line)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
