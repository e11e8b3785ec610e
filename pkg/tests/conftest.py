import pytest

from stolinv.defect import build_defect_series
from stolinv.engine import PipelineConfig, run_full_pipeline


@pytest.fixture(scope="session")
def F13():
    return build_defect_series(13, "reparam")


@pytest.fixture(scope="session")
def report():
    return run_full_pipeline(PipelineConfig())
