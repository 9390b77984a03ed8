"""Text renderings of use-case results; every table is a CSV artifact."""

from __future__ import annotations

from app.application.dto import (
    BoundsTableDTO,
    CurveDTO,
    ExperimentDTO,
    GridDTO,
    PovmDumpDTO,
    StatisticsDTO,
    VerdictDTO,
)
from app.application.use_cases.run_experiment import NOT_VERIFIABLE
from app.infrastructure.files import (
    PLOT_COLUMNS_KEY,
    format_povm_dump,
    write_statistics,
    write_table,
)


def render_statistics(dto: StatisticsDTO) -> str:
    return write_statistics(dto)


def render_bounds(dto: BoundsTableDTO) -> str:
    metadata: dict[str, str] = {}
    for key, monotone in dto.monotone.items():
        metadata[f"monotone {key.replace(':', ' ')}"] = str(monotone).lower()
    for key, plateau in dto.plateau.items():
        metadata[f"plateau {key.replace(':', ' ')}"] = "none" if plateau is None else str(plateau)
    rows = [(r.n, r.kind, r.model, r.value, r.status) for r in dto.rows]
    return write_table(metadata, ("n", "kind", "model", "value", "status"), rows)


def render_verdict(dto: VerdictDTO) -> str:
    metadata = {
        "common_transmittance": repr(dto.common_transmittance),
        "operators": str(len(dto.operators)),
    }
    metadata |= {f"ledger {group}": str(n) for group, n in dto.ledger.items()}
    if dto.dropped_blocks:
        metadata["dropped_blocks"] = " ".join(dto.dropped_blocks)
    columns = ("verdict", "margin", "certificate", "status", "stage", "seconds", "diagnostics")
    row = (
        dto.verdict,
        dto.margin,
        dto.certificate,
        dto.status,
        dto.stage,
        sum(dto.timings.values()),
        dto.diagnostics,
    )
    return write_table(metadata, columns, [row])


def render_curve(dto: CurveDTO) -> str:
    metadata = dict(dto.metadata) | {
        "kind": dto.kind,
        PLOT_COLUMNS_KEY: f"{dto.abscissa} {dto.ordinate} margin_above",
    }
    columns = (
        dto.abscissa,
        dto.ordinate,
        "margin_above",
        "margin_below",
        "verdict_above",
        "verdict_below",
        "note",
    )
    rows = [
        (
            p.abscissa,
            NOT_VERIFIABLE if p.ordinate is None else p.ordinate,
            p.margin_above,
            p.margin_below,
            p.verdict_above,
            p.verdict_below,
            p.note,
        )
        for p in dto.points
    ]
    return write_table(metadata, columns, rows)


def render_grid(dto: GridDTO) -> str:
    columns = ("omega", "p", "ours", dto.baseline, "margin_ours", "margin_baseline")
    rows = [
        (p.omega, p.multi_photon, p.ours, p.baseline, p.margin_ours, p.margin_baseline)
        for p in dto.points
    ]
    return write_table(dto.metadata, columns, rows)


def render_povm(dto: PovmDumpDTO) -> str:
    return format_povm_dump(dto)


def render_experiment(dto: ExperimentDTO) -> str:
    metadata = dict(dto.metadata)
    if dto.kind.endswith("curve"):
        metadata[PLOT_COLUMNS_KEY] = f"{dto.columns[0]} {dto.columns[1]} margin_above"
    metadata["inconclusive"] = str(dto.inconclusive)
    return write_table(metadata, dto.columns, dto.rows)
