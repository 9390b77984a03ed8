from __future__ import annotations

from pathlib import Path

import yaml
from pydantic import ValidationError

from app.application.dto import (
    ChannelDTO,
    ExperimentInputDTO,
    ModelDTO,
    PipelineDTO,
    StatisticsDTO,
)
from app.application.exceptions import ConfigFileError, ExperimentSpecError
from app.domain.exceptions import DomainError
from app.domain.value_objects import DetectorModel, Scheme, SchemeConfig
from app.infrastructure.files.schemas import ExperimentEntry, ExperimentFile, ModelFile
from app.infrastructure.files.tables import read_table


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigFileError(f"Cannot read {path}: {e.strerror or e}.") from e


def _yaml(text: str, source: str) -> object:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigFileError(f"{source} is not valid YAML: {e}.") from e


def model_from_schema(spec: ModelFile, default_label: str = "") -> ModelDTO:
    """Expand a validated model config into a ModelDTO.

    Raises:
        ConfigFileError: If the table does not fit the scheme.
    """
    try:
        config = SchemeConfig(Scheme(spec.scheme), spec.spatial_modes)
        if spec.eta is not None:
            model = DetectorModel.symmetric(config, spec.eta)
        else:
            model = DetectorModel.from_array(config, spec.efficiencies)
    except DomainError as e:
        raise ConfigFileError(f"Invalid detector model: {e}") from e
    return ModelDTO(spec.scheme, model.efficiencies, spec.label or default_label)


def parse_model(text: str, source: str = "<model>") -> ModelDTO:
    """Parse a YAML detector-model config.

    Raises:
        ConfigFileError: On YAML or schema errors.
    """
    data = _yaml(text, source)
    try:
        spec = ModelFile.model_validate(data)
    except ValidationError as e:
        raise ConfigFileError(f"{source}: {e.error_count()} invalid field(s): {e}") from e
    return model_from_schema(spec, Path(source).stem if source != "<model>" else "")


def load_model(path: Path) -> ModelDTO:
    return parse_model(_read_text(path), str(path))


def parse_statistics(text: str, scheme: str | None = None) -> StatisticsDTO:
    """Parse an observed-statistics CSV with columns ``x, y, probability``.

    ``# scheme:`` and ``# squashed:`` metadata lines override the defaults.

    Raises:
        ConfigFileError: On a malformed file or a missing scheme.
    """
    table = read_table(text)
    if table.columns != ("x", "y", "probability"):
        raise ConfigFileError(
            f"Statistics columns must be x,y,probability, got {','.join(table.columns)}."
        )
    scheme = table.metadata.get("scheme", scheme)
    if scheme is None:
        raise ConfigFileError("Statistics file names no scheme; pass --scheme or a model.")
    rows = []
    for k, (x, y, p) in enumerate(table.rows, start=1):
        try:
            rows.append((x, y, float(p)))
        except ValueError as e:
            raise ConfigFileError(f"Row {k}: probability {p!r} is not a number.") from e
    squashed = table.metadata.get("squashed", "false").lower() == "true"
    return StatisticsDTO(scheme, tuple(rows), squashed)


def load_statistics(path: Path, scheme: str | None = None) -> StatisticsDTO:
    return parse_statistics(_read_text(path), scheme)


def _experiment(entry: ExperimentEntry, base: Path) -> tuple[ExperimentInputDTO, Path | None]:
    if entry.model is not None:
        model = model_from_schema(entry.model)
    else:
        assert entry.model_file is not None
        path = entry.model_file if entry.model_file.is_absolute() else base / entry.model_file
        model = load_model(path)
    pipeline = PipelineDTO(**entry.pipeline.model_dump(exclude_none=True))
    dto = ExperimentInputDTO(
        kind=entry.kind,
        name=entry.name,
        model=model,
        channel=ChannelDTO(**entry.channel.model_dump()),
        omegas=tuple(entry.omegas),
        multi_photons=tuple(entry.multi_photons),
        etas=tuple(entry.etas),
        eta_range=entry.eta_range,
        max_grade=entry.max_grade,
        baseline=entry.baseline,
        pipeline=pipeline,
    )
    out = None
    if entry.out is not None:
        out = entry.out if entry.out.is_absolute() else base / entry.out
    return dto, out


def parse_experiments(
    text: str, base: Path = Path("."), source: str = "<experiments>"
) -> list[tuple[ExperimentInputDTO, Path | None]]:
    """Parse a batch spec into experiment inputs and their output paths.

    Relative model files and outputs resolve against ``base``.

    Raises:
        ConfigFileError: On YAML errors or unreadable model files.
        ExperimentSpecError: On schema or grid violations.
    """
    data = _yaml(text, source)
    try:
        spec = ExperimentFile.model_validate(data)
    except ValidationError as e:
        raise ExperimentSpecError(f"{source}: {e}") from e
    names = [entry.name for entry in spec.experiments]
    if len(set(names)) != len(names):
        raise ExperimentSpecError(f"{source}: experiment names must be unique.")
    return [_experiment(entry, base) for entry in spec.experiments]


def load_experiments(path: Path) -> list[tuple[ExperimentInputDTO, Path | None]]:
    return parse_experiments(_read_text(path), path.parent, str(path))
