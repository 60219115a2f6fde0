"""Shared fixtures: corpora produced through the sprintcat command line.

The exporter runs as a real subprocess; the packed feature files and the
scenario bundles it writes are the only interface between the two
packages.
"""

from __future__ import annotations

import shutil
import subprocess
from pathlib import Path

import pytest

SPRINTCAT = shutil.which("sprintcat")


def run_sprintcat(*args: str) -> subprocess.CompletedProcess:
    if SPRINTCAT is None:
        pytest.fail("the sprintcat command line tool is not on PATH")
    proc = subprocess.run([SPRINTCAT, *args], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def sprintcat_cli():
    """The exporter tool, invoked as a subprocess."""
    return run_sprintcat


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> Path:
    """One scenario per category: 15 labeled sprints."""
    out = tmp_path_factory.mktemp("corpus") / "small"
    run_sprintcat("synth", "--per-category", "1", "--seed", "0", "--out", str(out))
    return out


@pytest.fixture(scope="session")
def small_samples(small_corpus):
    from sprintnet import read_feature_file

    return read_feature_file(small_corpus / "features.bin")
