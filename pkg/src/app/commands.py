import csv
import io
import json
import logging
import sys
import uuid
from datetime import datetime
from pathlib import Path
from typing import Optional, TextIO

import numpy as np
import yaml

from src.app import Application
from src.domain_model import ConfigError, OutputFormat
from src.experiment_model import ExperimentConfig, Report, serialize_value

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3


# ─────────────────────────────────────────────
# INPUT
# ─────────────────────────────────────────────


def load_config(path: Path) -> dict:
    """
    Read a JSON or YAML experiment configuration.

    :param path: Config file; ``.yaml`` / ``.yml`` are parsed as YAML.
    :return: The raw configuration mapping.
    """
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not contain a mapping")
    return data


# ─────────────────────────────────────────────
# OUTPUT
# ─────────────────────────────────────────────


def generate_run_id() -> str:
    """Generate a short date-time based UUID for this run."""
    dt = datetime.now()
    return f"{dt.strftime('%Y%m%d_%H%M%S')}_{uuid.uuid4().hex[:6]}"


def save_debug_state(report: Report, config: ExperimentConfig, run_id: str, debug_dir: Path) -> str:
    debug_data = {
        "timestamp": datetime.now().isoformat(),
        "config": config.to_dict(),
        "pass": report.passed,
        "failed_checks": [r.name for r in report.failures],
        "wall_time": report.wall_time,
        "checks": [r.to_dict() for r in report.records],
    }
    debug_dir.mkdir(parents=True, exist_ok=True)
    filename = debug_dir / f"debug_state_{run_id}.yaml"
    with open(filename, "w") as f:
        yaml.dump(debug_data, f, sort_keys=False)
    return str(filename)


def matrix_to_csv(matrix: np.ndarray) -> str:
    """Row-major CSV with header 'rows,cols,complex-interleaved' and re,im pairs."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow([matrix.shape[0], matrix.shape[1], "complex-interleaved"])
    for row in matrix:
        writer.writerow([repr(float(v)) for z in row for v in (z.real, z.imag)])
    return buffer.getvalue()


def checks_to_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["name", "computed", "expected", "tolerance", "pass"])
    for record in report.records:
        data = record.to_dict()
        writer.writerow(
            [
                data["name"],
                json.dumps(data["computed"]),
                json.dumps(data["expected"]),
                json.dumps(serialize_value(record.tolerance)),
                "true" if record.passed else "false",
            ]
        )
    return buffer.getvalue()


def write_report(report: Report, path: Optional[Path], fmt: OutputFormat, stream: TextIO) -> list[Path]:
    """
    Write the report and, for CSV output, one file per matrix payload.

    :return: The files written.
    """
    text = report.to_json() + "\n" if fmt is OutputFormat.JSON else checks_to_csv(report)
    if path is None:
        stream.write(text)
        return []
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    written = [path]
    if fmt is OutputFormat.CSV:
        for key, matrix in report.payloads.items():
            target = path.with_name(f"{path.stem}-{key}.csv")
            target.write_text(matrix_to_csv(matrix), encoding="utf-8")
            written.append(target)
    return written


# ─────────────────────────────────────────────
# COMMANDS
# ─────────────────────────────────────────────


def run_command(
    app: Application,
    config_path: Path,
    out: Optional[Path] = None,
    fmt: Optional[str] = None,
    seed: Optional[int] = None,
    quiet: bool = False,
    stream: Optional[TextIO] = None,
) -> int:
    """
    Load a configuration, run it and write the report.

    :return: Process exit code.
    """
    try:
        config = ExperimentConfig.from_dict(load_config(config_path))
        if seed is not None:
            config.seed = seed
        if out is not None:
            config.output.path = out
        if fmt is not None:
            config.output.format = OutputFormat(fmt)
        elif config.output.path is None and app.settings.OUTPUT_FORMAT:
            config.output.format = OutputFormat(app.settings.OUTPUT_FORMAT)
        report = app.runner.run(config)
    except ValueError as exc:
        logger.error("configuration error: %s", exc)
        return EXIT_CONFIG_ERROR
    except OSError as exc:
        logger.error("cannot read configuration: %s", exc)
        return EXIT_IO_ERROR

    try:
        written = write_report(report, config.output.path, config.output.format, stream or sys.stdout)
        if app.settings.DEBUG_DIR:
            save_debug_state(report, config, generate_run_id(), Path(app.settings.DEBUG_DIR))
    except OSError as exc:
        logger.error("cannot write report: %s", exc)
        return EXIT_IO_ERROR

    if not quiet:
        status = "PASS" if report.passed else "FAIL"
        logger.info(
            "%s: %s (%d checks, %d failed, %.2fs)%s",
            config.experiment,
            status,
            len(report.records),
            len(report.failures),
            report.wall_time,
            f", wrote {', '.join(map(str, written))}" if written else "",
        )
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def describe_command(app: Application, name: Optional[str] = None, stream: Optional[TextIO] = None) -> int:
    try:
        (stream or sys.stdout).write(app.runner.describe(name) + "\n")
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG_ERROR
    return EXIT_OK
