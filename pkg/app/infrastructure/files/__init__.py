from app.infrastructure.files.dumps import format_matrix, format_povm_dump, format_problem_dump
from app.infrastructure.files.loaders import (
    load_experiments,
    load_model,
    load_statistics,
    model_from_schema,
    parse_experiments,
    parse_model,
    parse_statistics,
)
from app.infrastructure.files.tables import (
    PLOT_COLUMNS_KEY,
    Table,
    cell,
    emit_plot_data,
    read_table,
    write_statistics,
    write_table,
)

__all__ = [
    "PLOT_COLUMNS_KEY",
    "Table",
    "cell",
    "emit_plot_data",
    "format_matrix",
    "format_povm_dump",
    "format_problem_dump",
    "load_experiments",
    "load_model",
    "load_statistics",
    "model_from_schema",
    "parse_experiments",
    "parse_model",
    "parse_statistics",
    "read_table",
    "write_statistics",
    "write_table",
]
