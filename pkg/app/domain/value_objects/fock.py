from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import override

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import FockSpaceError, ValueObjectError
from app.domain.value_objects.base import ValueObject
from app.domain.value_objects.constants import HERMITICITY_TOL, ZERO_SNAP
from app.domain.value_objects.modes import FockBasisState, ModeSet

type ComplexMatrix = npt.NDArray[np.complex128]


@dataclass(frozen=True, repr=False)
class FockSpace(ValueObject):
    """Truncated multimode Fock space: all occupations with total <= cutoff.

    Args:
        mode_set: Modes the occupations refer to.
        cutoff: Maximum total photon number.
        basis: Canonically ordered basis states.

    Raises:
        ValueObjectError: If the basis does not enumerate the truncated space.
    """

    mode_set: ModeSet
    cutoff: int
    basis: tuple[FockBasisState, ...] = field(compare=False)

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.cutoff < 0:
            raise ValueObjectError("Cutoff must be non-negative.")
        expected = comb(self.cutoff + self.mode_set.mode_count, self.mode_set.mode_count)
        if len(self.basis) != expected:
            raise ValueObjectError(
                f"Basis has {len(self.basis)} states, expected {expected}."
            )
        if any(s.total_photons > self.cutoff for s in self.basis):
            raise ValueObjectError("Basis state exceeds the cutoff.")

    @override
    def _repr_value(self) -> str:
        return f"mode_set={self.mode_set!r}, cutoff={self.cutoff}, dim={self.dim}"

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {state.occupations: i for i, state in enumerate(self.basis)}

    @cached_property
    def grades(self) -> npt.NDArray[np.int64]:
        """Total photon number of every basis state."""
        return np.array([s.total_photons for s in self.basis], dtype=np.int64)

    def index_of(self, occupations: tuple[int, ...]) -> int:
        try:
            return self._index[occupations]
        except KeyError as e:
            raise FockSpaceError(f"{occupations} is not in the truncated space") from e

    def grade_indices(self, n: int) -> npt.NDArray[np.int64]:
        if not 0 <= n <= self.cutoff:
            raise FockSpaceError(f"Grade {n} outside [0, {self.cutoff}]; raise the cutoff.")
        return np.flatnonzero(self.grades == n)

    def vacuum_index(self) -> int:
        return 0


@dataclass(frozen=True, eq=False, repr=False)
class FockOperator:
    """Dense Hermitian operator on a truncated Fock space.

    Build instances through ``FockOperator.from_matrix`` which snaps numerical
    dust, checks Hermiticity and derives the structural flags.
    """

    space: FockSpace
    matrix: ComplexMatrix
    block_diagonal: bool
    real: bool

    @classmethod
    def from_matrix(
        cls, space: FockSpace, matrix: npt.ArrayLike, *, check_hermitian: bool = True
    ) -> FockOperator:
        """Wrap a matrix as an operator on ``space``.

        Args:
            space: Space the matrix acts on.
            matrix: Square array of dimension ``space.dim``.
            check_hermitian: Reject non-Hermitian input when true.

        Raises:
            FockSpaceError: On dimension mismatch or broken Hermiticity.
        """
        m = np.array(matrix, dtype=np.complex128)
        if m.shape != (space.dim, space.dim):
            raise FockSpaceError(
                f"Matrix of shape {m.shape} does not act on a space of dimension {space.dim}."
            )
        if check_hermitian:
            skew = np.max(np.abs(m - m.conj().T), initial=0.0)
            if skew >= HERMITICITY_TOL:
                raise FockSpaceError(f"Operator is not Hermitian (deviation {skew:.2e}).")
            m = (m + m.conj().T) / 2
        m.real[np.abs(m.real) < ZERO_SNAP] = 0.0
        m.imag[np.abs(m.imag) < ZERO_SNAP] = 0.0
        m.setflags(write=False)

        grades = space.grades
        cross = grades[:, None] != grades[None, :]
        block_diagonal = not np.any(m[cross])
        real = not np.any(m.imag)
        return cls(space=space, matrix=m, block_diagonal=block_diagonal, real=real)

    def __repr__(self) -> str:
        return (
            f"FockOperator(dim={self.space.dim}, block_diagonal={self.block_diagonal}, "
            f"real={self.real})"
        )

    def __add__(self, other: FockOperator) -> FockOperator:
        self._same_space(other)
        return FockOperator.from_matrix(self.space, self.matrix + other.matrix)

    def __sub__(self, other: FockOperator) -> FockOperator:
        self._same_space(other)
        return FockOperator.from_matrix(self.space, self.matrix - other.matrix)

    def scaled(self, factor: float) -> FockOperator:
        return FockOperator.from_matrix(self.space, factor * self.matrix)

    def expectation(self, state: npt.ArrayLike) -> float:
        """Return Tr(state @ self) for a density matrix on the same space."""
        rho = np.asarray(state)
        return float(np.real(np.trace(rho @ self.matrix)))

    def eigenvalues(self) -> npt.NDArray[np.float64]:
        return np.linalg.eigvalsh(self.matrix)

    def _same_space(self, other: FockOperator) -> None:
        if other.space != self.space:
            raise FockSpaceError("Operators act on different spaces.")
