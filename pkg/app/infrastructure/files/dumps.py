from __future__ import annotations

import numpy as np
import numpy.typing as npt

from app.application.dto import PovmDumpDTO, VerdictDTO


def _entry(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def format_matrix(name: str, matrix: npt.ArrayLike) -> list[str]:
    """Row-major plain text: a ``[name] rows x cols`` line, then one line per row."""
    m = np.asarray(matrix, dtype=np.complex128)
    lines = [f"[{name}] {m.shape[0]} x {m.shape[1]}"]
    lines += [" ".join(_entry(complex(z)) for z in row) for row in m]
    return lines


def format_povm_dump(dto: PovmDumpDTO) -> str:
    lines = [f"# scheme: {dto.scheme}", f"# relations_ok: {str(dto.relations_ok).lower()}"]
    lines.append("# basis: " + " ".join("|" + ",".join(map(str, s)) + ">" for s in dto.basis))
    for name, value in dto.relations.items():
        lines.append(f"# relation {name}: {value:.3e}")
    for label, matrix in dto.elements.items():
        lines += format_matrix(label, matrix)
    return "\n".join(lines) + "\n"


def format_problem_dump(dto: VerdictDTO) -> str:
    """Operator list, constraint rows and the returned witness of one verification."""
    lines = [f"# verdict: {dto.verdict}", f"# margin: {dto.margin!r}"]
    lines += [f"# operator {k}: {name}" for k, name in enumerate(dto.operators)]
    for row in dto.constraints:
        terms = " ".join(f"{c:+.12g}*{part}[{r},{col}]" for r, col, part, c in row.terms)
        lines.append(f"{row.group} {row.label} : {terms} {row.relation} {row.rhs:.12g}")
    if dto.witness is not None:
        lines += format_matrix("chi", dto.witness)
    return "\n".join(lines) + "\n"
