import json

import pytest
import yaml

import main
from src.app import ExperimentBootstrapper, ExperimentRunner
from src.app.reports import report_payload
from src.core.config import ExecutionMode, ExperimentSettings
from src.core.exceptions import ExperimentBootstrapError, ResourceCapError
from src.experiments.check.suites import SUITES

EXPERIMENTS_DIR = "src/experiments/"


def _bootstrap(app_config, experiment_type, config=None, name=None):
    bootstrapper = ExperimentBootstrapper(EXPERIMENTS_DIR, app_config)
    return bootstrapper.bootstrap_experiment(ExperimentSettings(type=experiment_type, name=name, config=config))


def _run(app_config, experiment_type, config=None):
    experiment = _bootstrap(app_config, experiment_type, config)
    return ExperimentRunner(app_config).run_experiment(experiment)


def _column(table, name):
    index = table.columns.index(name)
    return [row[index] for row in table.rows]


@pytest.mark.parametrize("experiment_type", ["norm", "group", "uhf", "metric", "check"])
def test_bootstrap_every_experiment_type(app_config, experiment_type):
    experiment = _bootstrap(app_config, experiment_type, name="defaults")

    assert str(experiment) == f"{experiment_type}.defaults"
    assert experiment.logger.name == f"experiments.{experiment_type}.defaults"
    assert experiment.p_values == [2.0]


def test_bootstrap_skips_disabled_and_rejects_unknown(app_config):
    bootstrapper = ExperimentBootstrapper(EXPERIMENTS_DIR, app_config)

    assert bootstrapper.bootstrap_experiments([ExperimentSettings(type="uhf", enabled=False)]) == []
    with pytest.raises(ExperimentBootstrapError):
        bootstrapper.bootstrap_experiment(ExperimentSettings(type="spectrum"))


def test_bootstrap_enforces_the_tower_cap(app_config):
    capped = app_config.model_copy(update={"caps": app_config.caps.model_copy(update={"tower_dimension": 2})})
    with pytest.raises(ResourceCapError):
        _bootstrap(capped, "uhf", {"dims": [1, 2, 2]})


def test_bootstrap_enforces_the_algebra_cap(app_config):
    capped = app_config.model_copy(update={"caps": app_config.caps.model_copy(update={"algebra_dimension": 3})})
    with pytest.raises(ResourceCapError):
        _bootstrap(capped, "metric", {"dims": [1, 2], "alpha": [0, 1]})


def test_experiment_p_values_override_the_application_grid(app_config):
    assert _bootstrap(app_config, "norm", {"p_values": [1, 3]}).p_values == [1.0, 3.0]


def test_norm_experiment(app_config):
    report = _run(app_config, "norm", {"random_sizes": [2, 3], "oracle": True, "p_values": [1, 1.5, 2]})
    table = report.tables["norms"]

    assert len(table.rows) == 6
    for lower, upper, oracle in zip(_column(table, "lower"), _column(table, "upper"), _column(table, "oracle")):
        assert lower <= upper * (1 + 1e-12)
        assert oracle <= upper * (1 + 1e-9)
    assert _column(table, "methods")[:3] == ["exact-p1", "interpolation+power-iteration", "exact-p2"]


def test_group_experiment(app_config):
    report = _run(app_config, "group", {"group": "z", "radii": [4, 2, 3], "terms": ["1 1"], "shift": "0.5+1j"})
    commutators = report.tables["commutators"]

    assert _column(commutators, "radius") == [2.0, 3.0, 4.0]
    assert all(_column(commutators, "lower_le_bound"))
    lowers = _column(commutators, "lower")
    assert lowers == sorted(lowers)

    residuals = [residual for _, residual in report.series["resolvent_residual"]]
    assert residuals == pytest.approx([1 / 10, 1 / 17, 1 / 26])
    assert _column(report.tables["resolvents"], "mode") == ["squared", "shifted"] * 3


def test_uhf_experiment(app_config):
    report = _run(app_config, "uhf", {"dims": [1, 2, 2], "alpha": [0, 1, 2]})

    assert _column(report.tables["spectrum"], "eigenvalue") == pytest.approx([0.0, 1.0, 2.0, 2.0])
    assert _column(report.tables["levels"], "q_rank") == [1, 1, 2]
    assert report.suites["uhftriple"][1] == 0
    assert not report.failures
    lhs, rhs = _column(report.tables["key_estimates"], "lhs"), _column(report.tables["key_estimates"], "rhs")
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert report.series["strong_convergence_p2"][-1][1] == pytest.approx(0.0, abs=1e-12)


def test_metric_experiment_with_oracle(app_config):
    report = _run(app_config, "metric", {"dims": [1, 2], "alpha": [0, 1], "states": ["point:0", "point:1", "trace"],
                                         "oracle": True})
    rows = {(row[2], row[3]): row for row in report.tables["metric"].rows}
    columns = report.tables["metric"].columns
    lower, oracle = columns.index("lower"), columns.index("oracle")

    assert set(rows) == {("point:0", "point:1"), ("point:0", "trace"), ("point:1", "trace")}
    assert rows["point:0", "point:1"][oracle] == pytest.approx(2.0)
    assert rows["point:0", "point:1"][lower] == pytest.approx(2.0, abs=5e-3)
    assert rows["point:0", "trace"][lower] == pytest.approx(1.0, abs=5e-3)
    assert _column(report.tables["constants"], "kernel_flag") == [False]
    assert _column(report.tables["degeneracy"], "dimension") == [2]
    assert len(report.matrices) == 3
    assert report.diagnostics["cells"][0]["degeneracy"]["dimension"] == 2


def test_metric_sweep_levels(app_config):
    experiment = _bootstrap(app_config, "metric", {"dims": [1, 2, 2], "alpha": [0, 1, 2], "sweep_levels": True})
    assert experiment.cells() == [(1, 2.0), (2, 2.0)]


def test_reports_do_not_depend_on_the_execution_mode(app_config):
    config = {"dims": [1, 2, 2], "alpha": [0, 1, 2], "p_values": [1, 2, 3]}
    threaded_config = app_config.model_copy(update={"execution_mode": ExecutionMode.MULTITHREADED, "max_workers": 3})

    sequential = _run(app_config, "uhf", config)
    threaded = _run(threaded_config, "uhf", config)
    assert json.dumps(report_payload("uhf", sequential)) == json.dumps(report_payload("uhf", threaded))


def test_runner_writes_metrics(app_config):
    runner = ExperimentRunner(app_config)
    runner.run([_bootstrap(app_config, "uhf", {"dims": [1, 2]})])

    path = runner.write_metrics()
    content = open(path).read()
    assert 'spectral_cells_completed_total{experiment="uhf"} 1.0' in content
    assert 'spectral_invariant_failures{experiment="uhf",suite="uhftriple"} 0.0' in content

    assert ExperimentRunner(app_config.model_copy(update={"metrics_file": None})).write_metrics() is None


@pytest.mark.parametrize("suite, prefixes", [
    ("pspace", ["op norm scales with |c|", "oracle ||ab|| <= ||a|| ||b||", "p = 2 norm agrees with the oracle"]),
    ("tensor", ["mixed product", "||xi (x) eta|| = ||xi|| ||eta||"]),
    ("grouptriple", ["Dirac spectrum is the set of lengths", "(D - lambda I) J_F = I"]),
    ("uhftriple", ["strong convergence profile", "nested ranges increase", "level-1 embedding preserves",
                   "[D, a] = sum_k alpha_k [Q_k, a]", "Q_2 Q_1 = 0"]),
    ("qmetric", ["mk lower <= mk upper", "quotient distance of the identity", "quotient distance of diag(1, -1)",
                 "quotient distance of c I + b"]),
])
def test_quick_suites_cover_every_invariant(app_config, suite, prefixes):
    result = SUITES[suite](app_config.seed, app_config.budget, True)

    assert result.failures == []
    for prefix in prefixes:
        assert any(name.startswith(prefix) for name in result.checks), prefix
    assert result.passed == len(result.checks)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text(yaml.safe_dump({
        "app": {"output_dir": str(tmp_path / "out"), "p_values": [2], "budget": {"starts": 4, "iterations": 60}},
        "logging": {"version": 1, "disable_existing_loggers": False},
        "experiments": [{"type": "uhf", "name": "small", "config": {"dims": [1, 2], "alpha": [0, 1]}}],
    }))
    return str(path)


def _diagnostic(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_main_runs_configured_experiments(tmp_path, config_file):
    assert main.run(["--config", config_file]) == main.EXIT_OK

    directory = tmp_path / "out" / "uhf.small"
    assert (directory / "spectrum.csv").exists()
    assert json.loads((directory / "report.json").read_text())["suites"]["uhftriple"]["failed"] == 0
    assert (tmp_path / "out" / "metrics.prom").exists()


def test_main_check_quick_passes(tmp_path, config_file):
    out = tmp_path / "check"
    assert main.run(["--config", config_file, "--out", str(out), "check", "--quick"]) == main.EXIT_OK

    report = json.loads((out / "check" / "report.json").read_text())
    assert report["failures"] == []
    assert set(report["suites"]) == {"pspace", "tensor", "grouptriple", "uhftriple", "qmetric"}

    threaded = tmp_path / "check_threaded"
    assert main.run(["--config", config_file, "--out", str(threaded), "--workers", "3", "check", "--quick"]) == 0
    for name in ["report.json", "suites.csv", "failures.csv"]:
        assert (out / "check" / name).read_bytes() == (threaded / "check" / name).read_bytes()


def test_main_validation_error(tmp_path, capsys):
    path = tmp_path / "bad.yml"
    path.write_text(yaml.safe_dump({"app": {"p_values": [0.5]}}))

    assert main.run(["--config", str(path)]) == main.EXIT_VALIDATION
    assert _diagnostic(capsys)["error"] == "ValidationError"


def test_main_missing_config(tmp_path, capsys):
    assert main.run(["--config", str(tmp_path / "missing.yml")]) == main.EXIT_VALIDATION
    assert _diagnostic(capsys)["error"] == "ConfigFileNotFoundError"


def test_main_resource_cap(config_file, capsys):
    argv = ["--config", config_file, "uhf", "--dims", "1,2,2", "--cap-override", "tower_dimension=2"]

    assert main.run(argv) == main.EXIT_RESOURCE_CAP
    assert _diagnostic(capsys) == {"error": "ResourceCapError", "exit_code": 3,
                                   "message": "Tower dimension 4 exceeds the cap of 2"}


def test_main_auto_alpha_on_the_spatial_representation(config_file, capsys):
    argv = ["--config", config_file, "metric", "--dims", "1,2", "--alpha", "auto"]

    assert main.run(argv) == main.EXIT_VALIDATION
    diagnostic = _diagnostic(capsys)
    assert diagnostic["error"] == "DegeneracyError"
    assert diagnostic["level"] == 1
