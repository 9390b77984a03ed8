from pathlib import Path

import pytest

from app.application.dto import StatisticsDTO
from app.application.exceptions import ConfigFileError, ExperimentSpecError
from app.infrastructure.files import (
    load_experiments,
    load_model,
    parse_experiments,
    parse_model,
    parse_statistics,
    write_statistics,
)

CONFIGS = Path(__file__).resolve().parents[3] / "configs"


def test_parse_model_expands_eta_shortcut():
    """Test the scalar shortcut puts 1 on the diagonal and eta elsewhere."""
    model = parse_model("scheme: passive\nspatial_modes: 4\neta: 0.5\n", "passive.yaml")

    assert model.scheme == "passive"
    assert model.label == "passive"
    assert len(model.efficiencies) == 4
    assert model.efficiencies[1] == (0.5, 1.0, 0.5, 0.5)


def test_parse_model_keeps_table():
    model = parse_model("scheme: active\nefficiencies: [[1.0, 0.8]]\nlabel: weak-v\n")

    assert model.efficiencies == ((1.0, 0.8),)
    assert model.label == "weak-v"


@pytest.mark.parametrize(
    "text",
    [
        "scheme: active\n",
        "scheme: active\neta: 0.5\nefficiencies: [[1.0, 0.5]]\n",
        "scheme: active\nefficiencies: [[1.0, 1.5]]\n",
        "scheme: active\nspatial_modes: 2\nefficiencies: [[1.0, 0.5]]\n",
        "scheme: hybrid\neta: 0.5\n",
        "scheme: active\neta: 0.5\ncolour: blue\n",
        "scheme: [active\n",
    ],
)
def test_parse_model_rejects_bad_configs(text):
    with pytest.raises(ConfigFileError):
        parse_model(text)


def test_parse_model_rejects_width_mismatch():
    """Test a passive row of two detectors fails the domain check."""
    with pytest.raises(ConfigFileError, match="Invalid detector model"):
        parse_model("scheme: passive\nefficiencies: [[1.0, 0.5]]\n")


def test_missing_model_file_is_config_error(tmp_path):
    with pytest.raises(ConfigFileError, match="Cannot read"):
        load_model(tmp_path / "absent.yaml")


def test_shipped_model_configs_load():
    for path in sorted(CONFIGS.glob("*.yaml")):
        model = load_model(path)
        assert model.label
        assert model.efficiencies


def test_statistics_round_trip_keeps_metadata():
    """Test written statistics parse back with their scheme and flags."""
    dto = StatisticsDTO("active", (("H", "H", 0.25), ("H", "V", 0.0)), squashed=True)

    parsed = parse_statistics(write_statistics(dto))

    assert parsed.scheme == "active"
    assert parsed.squashed is True
    assert parsed.rows == dto.rows


def test_statistics_scheme_argument_is_a_fallback():
    text = "x,y,probability\nH,H,0.5\n"

    assert parse_statistics(text, "passive").scheme == "passive"
    assert parse_statistics("# scheme: active\n" + text, "passive").scheme == "active"


@pytest.mark.parametrize(
    "text, scheme, message",
    [
        ("x,y,probability\nH,H,0.5\n", None, "no scheme"),
        ("x,y,p\nH,H,0.5\n", "active", "columns"),
        ("x,y,probability\nH,H,half\n", "active", "not a number"),
        ("x,y,probability\nH,H\n", "active", "fields"),
        ("# scheme active\nx,y,probability\n", None, "Malformed metadata"),
        ("# scheme: active\n", None, "no column row"),
    ],
)
def test_statistics_errors(text, scheme, message):
    with pytest.raises(ConfigFileError, match=message):
        parse_statistics(text, scheme)


EXPERIMENT = """
experiments:
  - name: grid
    kind: squash-compare
    model: {scheme: active, efficiencies: [[1.0, 0.8]]}
    channel: {loss: 0.5, n_resend: 2}
    omegas: [0.0, 0.02]
    multi_photons: [0.0, 0.01]
    pipeline: {cutoff: 3, renormalize: false}
    out: out/grid.csv
"""


def test_parse_experiments_resolves_paths(tmp_path):
    ((dto, out),) = parse_experiments(EXPERIMENT, tmp_path)

    assert dto.kind == "squash-compare"
    assert dto.omegas == (0.0, 0.02)
    assert dto.channel.n_resend == 2
    assert dto.pipeline.cutoff == 3
    assert dto.pipeline.renormalize is False
    assert dto.pipeline.max_ideal_grade is None
    assert out == tmp_path / "out" / "grid.csv"


def test_model_file_resolves_against_spec_directory(tmp_path):
    (tmp_path / "m.yaml").write_text("scheme: active\neta: 0.7\n")
    spec = "experiments:\n  - {name: b, kind: bounds-table, model_file: m.yaml}\n"

    ((dto, out),) = parse_experiments(spec, tmp_path)

    assert dto.model.efficiencies == ((1.0, 0.7),)
    assert dto.model.label == "m"
    assert out is None


@pytest.mark.parametrize(
    "spec",
    [
        "experiments: []\n",
        "experiments:\n  - {name: a, kind: eta-min-curve, model: {scheme: active, eta: 1.0}}\n",
        "experiments:\n  - {name: a, kind: bounds-table}\n",
        "experiments:\n  - {name: a, kind: fit, model: {scheme: active, eta: 1.0}}\n",
        "experiments:\n  - name: a\n    kind: verify-single\n"
        "    model: {scheme: active, eta: 1.0}\n    eta_range: [0.5, 0.5]\n",
        "experiments:\n  - {name: a, kind: bounds-table, model: {scheme: active, eta: 1.0}}\n"
        "  - {name: a, kind: bounds-table, model: {scheme: active, eta: 0.5}}\n",
    ],
)
def test_parse_experiments_rejects_bad_specs(spec, tmp_path):
    with pytest.raises(ExperimentSpecError):
        parse_experiments(spec, tmp_path)


def test_shipped_experiment_specs_load():
    for path in sorted((CONFIGS / "experiments").glob("*.yaml")):
        experiments = load_experiments(path)
        assert experiments
        assert all(out is not None for _, out in experiments)
