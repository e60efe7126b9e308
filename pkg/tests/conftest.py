"""Shared pipeline fixtures.

The demo run is expensive (18000 model evaluations), so acceptance and
CLI tests share one session-scoped copy of its artifacts.
"""

import pytest

from paretotrace.cli import PipelineConfig, run_pipeline


@pytest.fixture(scope="session")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo") / "out"
    manifest = run_pipeline(PipelineConfig(objectives="demo-coex", out=out))
    return out, manifest


@pytest.fixture(scope="session")
def quadratic_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("quad") / "out"
    manifest = run_pipeline(
        PipelineConfig(objectives="synthetic:quadratic", out=out, n=300)
    )
    return out, manifest
