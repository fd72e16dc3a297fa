import json
from math import prod

import pytest

from hybridnfs.pipeline import GaveUp, RunConfig, RunReport, factor, report_emit
from hybridnfs.qubosolve import SolverConfig

SHOWCASE = dict(
    n=448383577,
    degree=4,
    smooth_bound=224,
    b_max=2,
    width_limit=13,
    num_characters=1,
    solver=SolverConfig(backend="exhaustive"),
)


@pytest.fixture(scope="module")
def showcase_run():
    return factor(RunConfig(**SHOWCASE))


def test_showcase_instance_factors(showcase_run):
    assert showcase_run.outcome == "factored"
    assert showcase_run.factors == (20771, 21587)
    assert showcase_run.factors[0] * showcase_run.factors[1] == 448383577


def test_showcase_instance_setup(showcase_run):
    assert showcase_run.degree == 4
    assert showcase_run.m == 145
    assert showcase_run.poly_coeffs == (77, 30, 11, 2, 1)


def test_showcase_instance_counts(showcase_run):
    assert showcase_run.relations == 14
    assert showcase_run.matrix_rows == 14
    assert showcase_run.matrix_cols == 84
    assert showcase_run.a_final == 8
    assert showcase_run.dependencies_tried >= 1
    assert showcase_run.solver_calls > 0
    assert 0 < showcase_run.variables_peak["integer"] <= 120
    assert 0 < showcase_run.variables_peak["algebraic"] <= 120


def test_prime_guard():
    report = factor(RunConfig(n=104729))
    assert report.outcome == "prime"
    assert report.factors == (104729,)
    assert report.relations == 0


def test_perfect_power_guard():
    report = factor(RunConfig(n=81))
    assert report.outcome == "perfect_power"
    assert report.factors.count(report.factors[0]) == len(report.factors)
    assert prod(report.factors) == 81


def test_even_guard():
    report = factor(RunConfig(n=6))
    assert report.outcome == "factored"
    assert report.factors == (2, 3)


def test_small_semiprime_end_to_end():
    report = factor(RunConfig(n=15, degree=2, smooth_bound=7))
    assert report.outcome == "factored"
    assert report.factors == (3, 5)


def test_random_semiprime_with_auto_settings():
    # 21-bit product of two primes far above the smooth bound
    n = 1039 * 1567
    report = factor(
        RunConfig(n=n, smooth_bound=64, b_max=4, solver=SolverConfig(backend="exhaustive"))
    )
    assert report.outcome == "factored"
    assert report.factors == (1039, 1567)


def test_reproducible_runs(tmp_path):
    paths = [tmp_path / "one.rels", tmp_path / "two.rels"]
    reports = []
    for path in paths:
        config = RunConfig(relations_out=str(path), **SHOWCASE)
        reports.append(factor(config))
    assert paths[0].read_text() == paths[1].read_text()
    one, two = (r.as_dict() for r in reports)
    one.pop("wall_times"), two.pop("wall_times")
    assert one == two


def test_report_files_written(tmp_path):
    report_path = tmp_path / "report.json"
    config = RunConfig(n=15, degree=2, smooth_bound=7, report_out=str(report_path))
    factor(config)
    doc = json.loads(report_path.read_text())
    assert doc["outcome"] == "factored"
    assert doc["factors"] == [3, 5]


def test_gave_up_carries_partial_report():
    # bound too small for any relation; tiny region so this exits fast
    config = RunConfig(
        n=1039 * 1567, degree=2, smooth_bound=5, b_max=1,
        a_initial=4, a_ceiling=8, retries=1,
    )
    with pytest.raises(GaveUp) as exc_info:
        factor(config)
    report = exc_info.value.report
    assert report.outcome == "gave_up"
    assert report.rounds >= 1
    assert report.factors == ()


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(n=1)
    with pytest.raises(ValueError):
        RunConfig(n=15, retries=0)
    with pytest.raises(ValueError):
        RunConfig(n=15, width_limit=3, smooth_bound=224)  # 224 needs 8 bits
    with pytest.raises(ValueError):
        RunConfig(n=15, b_max=0)


def test_report_emit_formats(showcase_run):
    doc = json.loads(report_emit(showcase_run, "json"))
    assert doc["factors"] == [20771, 21587]
    assert doc["variables_peak"]["algebraic"] == showcase_run.variables_peak["algebraic"]
    text = report_emit(showcase_run, "text")
    assert "factored" in text and "20771" in text
    with pytest.raises(ValueError):
        report_emit(showcase_run, "yaml")


def test_report_emit_empty_run():
    doc = json.loads(report_emit(RunReport(n=5), "json"))
    assert doc["outcome"] == "unstarted"
    assert doc["relations"] == 0
    assert doc["factors"] == []
