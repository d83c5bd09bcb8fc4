"""
Experiment configuration, check records, reports and the runner.

The runner follows a fixed sequence of phases:

1. SPECIFY  – validate the configuration against the catalogue and merge
   parameter defaults.
2. EXECUTE  – call the experiment function with a seeded generator.
3. EVALUATE – collect the check records into a report.

Each experiment receives its own generator derived from the seed and
its position in the catalogue, so a standalone run and the same
experiment inside full-suite produce identical records.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from src import __version__
from src.domain_model import ConfigError, OutputFormat, encode_complex

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1
FULL_SUITE = "full-suite"
CONFIG_KEYS = {"experiment", "parameters", "seed", "output"}
OUTPUT_KEYS = {"path", "format"}


def serialize_value(value):
    """Convert numpy scalars, arrays and complex numbers to JSON-ready values."""
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return encode_complex(value)
        return [serialize_value(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (list, tuple)):
        return [serialize_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): serialize_value(v) for k, v in value.items()}
    return value


def matches_type(value, declared: str) -> bool:
    """
    Check a configuration value against a catalogue type string.

    Supported forms are ``int``, ``float``, ``str``, ``null``, ``list[T]``
    and alternatives joined by ``|``. Booleans are not numbers here.

    :param value: Value read from a JSON or YAML configuration.
    :param declared: Type string from the catalogue, e.g. ``list[int] | null``.
    """
    alternatives = [part.strip() for part in declared.split("|")]
    if len(alternatives) > 1:
        return any(matches_type(value, part) for part in alternatives)
    declared = alternatives[0]
    if declared.startswith("list[") and declared.endswith("]"):
        inner = declared[5:-1]
        return isinstance(value, (list, tuple)) and all(matches_type(v, inner) for v in value)
    if isinstance(value, bool):
        return False
    if declared == "int":
        return isinstance(value, int)
    if declared == "float":
        return isinstance(value, (int, float))
    if declared == "str":
        return isinstance(value, str)
    if declared == "null":
        return value is None
    raise ConfigError(f"unsupported catalogue type '{declared}'")


# ─────────────────────────────────────────────
# CONFIGURATION
# ─────────────────────────────────────────────
@dataclass
class OutputSpec:
    path: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSON

    def to_dict(self) -> dict:
        return {"path": str(self.path) if self.path else None, "format": self.format.value}

    @classmethod
    def from_dict(cls, data: dict) -> "OutputSpec":
        unknown = set(data) - OUTPUT_KEYS
        if unknown:
            raise ConfigError(f"unknown output keys: {sorted(unknown)}")
        try:
            fmt = OutputFormat(data.get("format", "json"))
        except ValueError as exc:
            raise ConfigError(f"unknown output format '{data.get('format')}'") from exc
        path = data.get("path")
        return cls(path=Path(path) if path else None, format=fmt)


@dataclass
class ExperimentConfig:
    """
    One requested experiment with its parameters and seed.
    """

    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: Optional[int] = None
    output: OutputSpec = field(default_factory=OutputSpec)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "parameters": serialize_value(self.parameters),
            "seed": self.seed,
            "output": self.output.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("configuration needs an 'experiment' name")
        parameters = data.get("parameters") or {}
        if not isinstance(parameters, dict):
            raise ConfigError("'parameters' must be a mapping")
        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        return cls(
            experiment=str(data["experiment"]),
            parameters=dict(parameters),
            seed=seed,
            output=OutputSpec.from_dict(data.get("output") or {}),
        )


# ─────────────────────────────────────────────
# RESULTS
# ─────────────────────────────────────────────
@dataclass
class CheckRecord:
    name: str
    computed: Any
    expected: Any
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": serialize_value(self.computed),
            "expected": serialize_value(self.expected),
            "tolerance": serialize_value(self.tolerance),
            "pass": bool(self.passed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckRecord":
        return cls(data["name"], data["computed"], data["expected"], data["tolerance"], data["pass"])


def check_close(name: str, computed, expected, tolerance: float, relative: bool = False) -> CheckRecord:
    """Record |computed - expected| <= tolerance (scaled by |expected| when relative)."""
    computed_arr = np.asarray(computed, dtype=complex)
    expected_arr = np.asarray(expected, dtype=complex)
    gap = float(np.max(np.abs(computed_arr - expected_arr))) if computed_arr.size else 0.0
    scale = max(float(np.max(np.abs(expected_arr))), 1e-300) if relative and expected_arr.size else 1.0
    return CheckRecord(name, computed, expected, tolerance, gap <= tolerance * scale)


def check_at_most(name: str, computed: float, limit: float) -> CheckRecord:
    return CheckRecord(name, computed, limit, 0.0, bool(computed <= limit))


def check_true(name: str, condition: bool, computed=None) -> CheckRecord:
    return CheckRecord(name, bool(condition) if computed is None else computed, True, 0.0, bool(condition))


@dataclass
class ExperimentOutcome:
    records: list[CheckRecord] = field(default_factory=list)
    payloads: dict[str, np.ndarray] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def extend(self, prefix: str, other: "ExperimentOutcome") -> None:
        for record in other.records:
            record.name = f"{prefix}/{record.name}"
            self.records.append(record)
        for key, value in other.payloads.items():
            self.payloads[f"{prefix}-{key}"] = value
        if other.details:
            self.details[prefix] = other.details


@dataclass
class Report:
    """
    Outcome of one run; passes iff every record passes.
    """

    experiment: str
    parameters: dict
    seed: Optional[int]
    records: list[CheckRecord]
    wall_time: float = 0.0
    version: str = __version__
    details: dict = field(default_factory=dict)
    payloads: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        data = {
            "schema": REPORT_SCHEMA,
            "experiment": self.experiment,
            "parameters": serialize_value(self.parameters),
            "seed": self.seed,
            "version": self.version,
            "wall_time": self.wall_time,
            "pass": self.passed,
            "checks": [r.to_dict() for r in self.records],
        }
        if self.details:
            data["details"] = serialize_value(self.details)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ─────────────────────────────────────────────
# CATALOGUE
# ─────────────────────────────────────────────


def default_catalogue_path() -> Path:
    return Path(__file__).resolve().parent / "catalogue.json"


def load_catalogue(path: Optional[Path] = None) -> dict:
    path = path or default_catalogue_path()
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)["experiments"]


# ─────────────────────────────────────────────
# RUNNER
# ─────────────────────────────────────────────

ExperimentFn = Callable[[dict, np.random.Generator], ExperimentOutcome]


class ExperimentRunner:
    """
    Resolves configurations and runs registered experiment functions.
    """

    def __init__(
        self,
        catalogue: dict,
        registry: dict[str, ExperimentFn],
        parallel: bool = False,
    ):
        """
        :param catalogue: Experiment name to schema and claims.
        :param registry: Experiment name to function.
        :param parallel: Run the parts of full-suite on a thread pool.
        """
        self.catalogue = catalogue
        self.registry = registry
        self.parallel = parallel

    @property
    def names(self) -> list[str]:
        return list(self.catalogue)

    # ─────────────────────────────────────────────
    # PHASE 1: SPECIFY
    # ─────────────────────────────────────────────

    def specify(self, config: ExperimentConfig) -> dict:
        """
        Validate the configuration and return parameters with defaults filled in.
        """
        entry = self.catalogue.get(config.experiment)
        if entry is None:
            raise ConfigError(f"unknown experiment '{config.experiment}'")
        schema = entry.get("parameters", {})
        unknown = set(config.parameters) - set(schema)
        if unknown:
            raise ConfigError(f"unknown parameters for {config.experiment}: {sorted(unknown)}")
        if entry.get("randomized", False) and config.seed is None:
            raise ConfigError(f"experiment '{config.experiment}' is randomized and needs a seed")
        resolved = {name: spec.get("default") for name, spec in schema.items()}
        resolved.update(config.parameters)
        for name, value in config.parameters.items():
            declared = schema[name].get("type", "")
            if declared and not matches_type(value, declared):
                raise ConfigError(
                    f"parameter '{name}' of {config.experiment} must be {declared}, got {value!r}"
                )
        return resolved

    # ─────────────────────────────────────────────
    # PHASE 2: EXECUTE
    # ─────────────────────────────────────────────

    def generator(self, name: str, seed: Optional[int]) -> np.random.Generator:
        return np.random.default_rng([seed or 0, self.names.index(name)])

    def execute(self, name: str, parameters: dict, seed: Optional[int]) -> ExperimentOutcome:
        if name == FULL_SUITE:
            return self._execute_suite(seed)
        logger.info("running %s", name)
        return self.registry[name](parameters, self.generator(name, seed))

    def _execute_suite(self, seed: Optional[int]) -> ExperimentOutcome:
        parts = [name for name in self.names if name != FULL_SUITE]

        def _run(name: str) -> ExperimentOutcome:
            return self.execute(name, self.specify(ExperimentConfig(name, seed=seed)), seed)

        if self.parallel:
            with ThreadPoolExecutor() as pool:
                outcomes = list(pool.map(_run, parts))
        else:
            outcomes = [_run(name) for name in parts]

        suite = ExperimentOutcome()
        for name, outcome in zip(parts, outcomes):
            suite.extend(name, outcome)
        return suite

    # ─────────────────────────────────────────────
    # PHASE 3: EVALUATE
    # ─────────────────────────────────────────────

    def evaluate(
        self, config: ExperimentConfig, parameters: dict, outcome: ExperimentOutcome, wall_time: float
    ) -> Report:
        report = Report(
            experiment=config.experiment,
            parameters=parameters,
            seed=config.seed,
            records=outcome.records,
            wall_time=wall_time,
            details=outcome.details,
            payloads=outcome.payloads,
        )
        for record in report.failures:
            logger.warning("check failed: %s (computed %s, expected %s)", record.name, record.computed, record.expected)
        return report

    def run(self, config: ExperimentConfig) -> Report:
        """
        Run an experiment through all phases.

        :param config: The experiment configuration.
        :return: The evaluated report.
        """
        parameters = self.specify(config)
        start = time.perf_counter()
        outcome = self.execute(config.experiment, parameters, config.seed)
        return self.evaluate(config, parameters, outcome, time.perf_counter() - start)

    def describe(self, name: Optional[str] = None) -> str:
        """
        Parameter schema and verified claims of one experiment, or a list of all.
        """
        if name is None:
            return "\n".join(f"{n}: {e['summary']}" for n, e in self.catalogue.items())
        entry = self.catalogue.get(name)
        if entry is None:
            raise ConfigError(f"unknown experiment '{name}'")
        lines = [f"{name}: {entry['summary']}", "", "parameters:"]
        params = entry.get("parameters", {})
        if not params:
            lines.append("  (none)")
        for pname, spec in params.items():
            lines.append(f"  {pname} ({spec['type']}, default {json.dumps(spec.get('default'))}): {spec['description']}")
        lines += ["", f"seed required: {'yes' if entry.get('randomized') else 'no'}", "", "verifies:"]
        for claim in entry.get("claims", []):
            lines.append(f"  [{claim['label']}] {claim['statement']}")
        return "\n".join(lines)
