import json
from pathlib import Path
from unittest.mock import MagicMock

import numpy as np
import pytest

from src.domain_model import ConfigError, OutputFormat
from src.experiment_model import (
    CheckRecord,
    ExperimentConfig,
    ExperimentOutcome,
    ExperimentRunner,
    Report,
    check_at_most,
    check_close,
    check_true,
    load_catalogue,
    matches_type,
    serialize_value,
)
from src.experiments import EXPERIMENTS


def passing_outcome(*names):
    return ExperimentOutcome(records=[check_true(name, True) for name in names])


@pytest.fixture
def registry(catalogue):
    """One mock per catalogued experiment, each returning a single passing check."""
    return {
        name: MagicMock(side_effect=lambda params, rng: passing_outcome("ok"))
        for name in catalogue
        if name != "full-suite"
    }


@pytest.fixture
def runner(catalogue, registry):
    return ExperimentRunner(catalogue, registry)


# ─────────────────────────────────────────────
# CATALOGUE
# ─────────────────────────────────────────────


def test_catalogue_loads(catalogue_path):
    catalogue = load_catalogue(catalogue_path)
    assert "full-suite" in catalogue
    assert set(EXPERIMENTS) == set(catalogue) - {"full-suite"}


def test_every_experiment_documents_parameters_and_claims(catalogue):
    for name, entry in catalogue.items():
        assert entry["summary"], name
        assert entry["claims"], name
        for spec in entry["parameters"].values():
            assert {"type", "default", "description"} <= set(spec)


# ─────────────────────────────────────────────
# CONFIGURATION
# ─────────────────────────────────────────────


class TestExperimentConfig:
    def test_minimal(self):
        config = ExperimentConfig.from_dict({"experiment": "gabor", "seed": 1})
        assert config.parameters == {}
        assert config.output.format is OutputFormat.JSON
        assert config.output.path is None

    def test_output_section(self):
        config = ExperimentConfig.from_dict(
            {"experiment": "gabor", "seed": 1, "output": {"path": "out/r.csv", "format": "csv"}}
        )
        assert config.output.path == Path("out/r.csv")
        assert config.output.format is OutputFormat.CSV

    @pytest.mark.parametrize(
        "data",
        [
            {"seed": 1},
            {"experiment": "gabor", "colour": "red"},
            {"experiment": "gabor", "seed": "7"},
            {"experiment": "gabor", "seed": True},
            {"experiment": "gabor", "parameters": [1, 2]},
            {"experiment": "gabor", "output": {"format": "xml"}},
            {"experiment": "gabor", "output": {"dir": "x"}},
        ],
    )
    def test_rejects_malformed(self, data):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data)

    def test_roundtrip(self):
        data = {"experiment": "duals", "parameters": {"max_dim": 2}, "seed": 3, "output": {"path": None, "format": "json"}}
        assert ExperimentConfig.from_dict(data).to_dict() == data


# ─────────────────────────────────────────────
# RECORDS AND REPORTS
# ─────────────────────────────────────────────


def test_serialize_value_handles_numpy_and_complex():
    assert serialize_value(np.float64(1.5)) == 1.5
    assert serialize_value(np.int64(3)) == 3
    assert serialize_value(np.bool_(True)) is True
    assert serialize_value(1 + 2j) == [1.0, 2.0]
    assert serialize_value(float("inf")) == "inf"
    assert serialize_value(np.array([1j, 2])) == [[0.0, 1.0], [2.0, 0.0]]
    assert serialize_value({"a": (np.float32(0.5),)}) == {"a": [0.5]}


def test_check_close_absolute_and_relative():
    assert check_close("a", 1.0 + 1e-13, 1.0, 1e-12).passed
    assert not check_close("b", 1.1, 1.0, 1e-3).passed
    assert check_close("c", 1000.5, 1000.0, 1e-3, relative=True).passed
    assert check_close("d", [1, 2j], [1, 2j], 0.0).passed


def test_check_at_most_and_true():
    assert check_at_most("x", 0.04, 0.05).passed
    assert not check_at_most("y", 1, 0).passed
    record = check_true("z", False, computed=3)
    assert record.computed == 3 and not record.passed


def test_matches_type():
    assert matches_type(3, "int")
    assert not matches_type(3.5, "int")
    assert not matches_type(True, "int")
    assert matches_type(2, "float")
    assert matches_type(None, "list[int] | null")
    assert matches_type([2, 3], "list[int] | null")
    assert not matches_type([2, 3.5], "list[int]")
    assert matches_type([[8, 64], [16, 128]], "list[list[int]]")
    assert not matches_type("abc", "list[str]")


def test_record_uses_pass_key():
    data = CheckRecord("n", 1.0, 1.0, 0.0, True).to_dict()
    assert data["pass"] is True
    assert CheckRecord.from_dict(data).passed


def test_report_pass_and_schema():
    records = [check_true("a", True), check_true("b", False)]
    report = Report(experiment="gabor", parameters={}, seed=1, records=records)
    assert not report.passed
    assert [r.name for r in report.failures] == ["b"]
    data = json.loads(report.to_json())
    assert data["schema"] == 1
    assert data["pass"] is False
    assert [c["name"] for c in data["checks"]] == ["a", "b"]


def test_outcome_extend_prefixes_names():
    suite = ExperimentOutcome()
    part = passing_outcome("x")
    part.payloads["rho"] = np.eye(2)
    part.details = {"k": 1}
    suite.extend("density", part)
    assert suite.records[0].name == "density/x"
    assert "density-rho" in suite.payloads
    assert suite.details == {"density": {"k": 1}}


# ─────────────────────────────────────────────
# RUNNER
# ─────────────────────────────────────────────


class TestRunner:
    def test_defaults_are_merged(self, runner, catalogue):
        params = runner.specify(ExperimentConfig("duals", {"max_dim": 2}, seed=1))
        assert params["max_dim"] == 2
        assert params["max_atoms"] == catalogue["duals"]["parameters"]["max_atoms"]["default"]

    def test_unknown_experiment(self, runner):
        with pytest.raises(ConfigError):
            runner.run(ExperimentConfig("bogus", seed=1))

    def test_unknown_parameter(self, runner):
        with pytest.raises(ConfigError):
            runner.specify(ExperimentConfig("gabor", {"sizez": [2]}, seed=1))

    def test_randomized_needs_seed(self, runner):
        with pytest.raises(ConfigError):
            runner.specify(ExperimentConfig("gabor"))

    @pytest.mark.parametrize(
        "name, parameters",
        [
            ("frame-bounds", {"instances": "ten"}),
            ("frame-bounds", {"instances": True}),
            ("gabor", {"sizes": 4}),
            ("gabor", {"sizes": [2, "4"]}),
            ("wavelet", {"dt": "0.5"}),
            ("tensor-check", {"dims": 3}),
        ],
    )
    def test_wrong_parameter_type(self, runner, registry, name, parameters):
        with pytest.raises(ConfigError):
            runner.run(ExperimentConfig(name, parameters, seed=1))
        registry[name].assert_not_called()

    def test_declared_types_accept_valid_values(self, runner):
        params = runner.specify(ExperimentConfig("tensor-check", {"dims": None, "instances": 3}, seed=1))
        assert params["dims"] is None
        params = runner.specify(ExperimentConfig("wavelet", {"dt": 1, "refinement_levels": [[8, 64]]}, seed=1))
        assert params["dt"] == 1

    def test_run_calls_registered_function(self, runner, registry):
        report = runner.run(ExperimentConfig("gabor", {"sizes": [2]}, seed=5))
        assert report.passed
        registry["gabor"].assert_called_once()
        params, rng = registry["gabor"].call_args.args
        assert params["sizes"] == [2]
        assert isinstance(rng, np.random.Generator)

    def test_failing_check_fails_report(self, runner, registry):
        registry["wavelet"].side_effect = lambda params, rng: ExperimentOutcome(
            records=[check_at_most("deviation", 0.2, 0.05)]
        )
        report = runner.run(ExperimentConfig("wavelet", seed=1))
        assert not report.passed
        assert report.failures[0].name == "deviation"

    def test_generator_depends_on_seed_and_experiment(self, runner):
        first = runner.generator("gabor", 7).random(3)
        np.testing.assert_array_equal(first, runner.generator("gabor", 7).random(3))
        assert not np.array_equal(first, runner.generator("gabor", 8).random(3))
        assert not np.array_equal(first, runner.generator("duals", 7).random(3))

    def test_full_suite_prefixes_every_part(self, runner, registry):
        report = runner.run(ExperimentConfig("full-suite", seed=11))
        assert report.passed
        assert sorted(r.name for r in report.records) == sorted(f"{name}/ok" for name in registry)
        for mock in registry.values():
            mock.assert_called_once()

    def test_full_suite_parallel_matches_sequential(self, catalogue):
        def draw(params, rng):
            return ExperimentOutcome(records=[check_true("draw", True, computed=float(rng.random()))])

        registry = {name: draw for name in catalogue if name != "full-suite"}
        config = ExperimentConfig("full-suite", seed=2)
        sequential = ExperimentRunner(catalogue, registry).run(config)
        parallel = ExperimentRunner(catalogue, registry, parallel=True).run(config)
        assert [r.to_dict() for r in sequential.records] == [r.to_dict() for r in parallel.records]

    def test_suite_part_matches_standalone_run(self, catalogue):
        def draw(params, rng):
            return ExperimentOutcome(records=[check_true("draw", True, computed=float(rng.random()))])

        registry = {name: draw for name in catalogue if name != "full-suite"}
        runner = ExperimentRunner(catalogue, registry)
        standalone = runner.run(ExperimentConfig("multiplier", seed=4)).records[0].computed
        suite = runner.run(ExperimentConfig("full-suite", seed=4))
        assert next(r.computed for r in suite.records if r.name == "multiplier/draw") == standalone

    def test_describe(self, runner):
        text = runner.describe("gabor")
        assert "N||g||^2" in text
        assert "sizes" in text
        assert "seed required: yes" in text
        assert "classification" in runner.describe("duals")
        assert "full-suite" in runner.describe()

    def test_describe_unknown(self, runner):
        with pytest.raises(ConfigError):
            runner.describe("bogus")


# ─────────────────────────────────────────────
# REAL EXPERIMENTS ON SMALL PARAMETERS
# ─────────────────────────────────────────────


@pytest.fixture
def real_runner(catalogue):
    return ExperimentRunner(catalogue, EXPERIMENTS)


@pytest.mark.parametrize(
    "name, parameters",
    [
        ("frame-bounds", {"instances": 5, "vectors_per_instance": 3}),
        ("tensor-check", {"instances": 5, "dims": [2, 3], "atoms": [4, 5]}),
        ("duals", {"max_dim": 2, "max_atoms": 4, "bessel_samples": 2}),
        ("multiplier", {"instances": 10, "adjoint_instances": 5, "trace_instances": 5, "tensor_instances": 2}),
        ("gabor", {"sizes": [2, 4], "windows_per_size": 2, "signal_pairs": 5, "spectrogram_size": 8}),
        ("density", {"sizes": [2], "instances": 3, "trace_instances": 10, "max_trace_size": 4}),
    ],
)
def test_small_experiments_pass(real_runner, name, parameters):
    report = real_runner.run(ExperimentConfig(name, parameters, seed=42))
    assert report.records
    assert report.passed, [r.to_dict() for r in report.failures]


def test_runs_are_deterministic(real_runner):
    config = ExperimentConfig("duals", {"max_dim": 2, "max_atoms": 3, "bessel_samples": 1}, seed=42)
    first = real_runner.run(config).to_dict()
    second = real_runner.run(config).to_dict()
    first.pop("wall_time")
    second.pop("wall_time")
    assert first == second


@pytest.mark.parametrize("name", ["tensor-check", "duals"])
def test_default_parameters_pass(real_runner, name):
    report = real_runner.run(ExperimentConfig(name, seed=42))
    assert report.passed, [r.to_dict() for r in report.failures]


def test_full_suite_passes(real_runner):
    report = real_runner.run(ExperimentConfig("full-suite", seed=42))
    assert report.passed, [r.to_dict() for r in report.failures]
    assert {r.name.split("/")[0] for r in report.records} == set(EXPERIMENTS)
