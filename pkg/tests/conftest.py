import numpy as np
import pytest

from tripsense.core import RawRecord

_acceptance_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_results.append((report.nodeid.split("::")[-1], report.passed))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, passed in _acceptance_results:
            terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}")


def make_record(**overrides) -> RawRecord:
    base = dict(
        trip_id="trip-1",
        driver_id="driver-1",
        driver_type_raw="public",
        tick_timestamp=1_700_000_000,
        latitude=9.0,
        longitude=7.5,
        speed=40.0,
        mid_speed=39.0,
        acc_x=0.1,
        acc_y=-0.2,
        acc_z=9.8,
        course=180.0,
        height=300.0,
        total_meters=100.0,
        influence_raw=None,
        point_date=None,
    )
    base.update(overrides)
    return RawRecord(**base)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_corpus_dir(tmp_path_factory):
    """A small generated corpus shared by CLI-level tests."""
    from tripsense.ingest import write_sensor_csv
    from tripsense.synthgen import GenConfig, generate_corpus, write_truth_csv

    out = tmp_path_factory.mktemp("corpus")
    config = GenConfig(
        n_trips=40, n_positive=8, min_points=80, max_points=160, seed=7
    )
    records, truth = generate_corpus(config)
    write_sensor_csv(records, out / "corpus.csv")
    write_truth_csv(truth, out / "truth.csv")
    return out


@pytest.fixture(scope="session")
def default_corpus(tmp_path_factory):
    """The full default corpus (seed 42, signature strength 1.0)."""
    from tripsense.ingest import write_sensor_csv
    from tripsense.synthgen import GenConfig, generate_corpus, write_truth_csv

    out = tmp_path_factory.mktemp("default_corpus")
    config = GenConfig()
    records, truth = generate_corpus(config)
    write_sensor_csv(records, out / "corpus.csv")
    write_truth_csv(truth, out / "truth.csv")
    return {"dir": out, "records": records, "truth": truth, "config": config}
