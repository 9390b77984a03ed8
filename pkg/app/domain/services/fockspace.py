from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from functools import lru_cache
from math import comb, factorial, prod, sqrt

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import FockSpaceError
from app.domain.value_objects import (
    ComplexMatrix,
    FockBasisState,
    FockOperator,
    FockSpace,
    ModeSet,
    Polarization,
)

type Occupation = tuple[int, ...]
# Creation operator of every input mode written over output creation operators.
type ModeTransform = Sequence[Mapping[int, complex]]

_INV_SQRT2 = 1 / sqrt(2)


def compositions(total: int, parts: int) -> Iterator[Occupation]:
    """Yield occupations of ``parts`` modes summing to ``total``, descending lex."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first, *rest)


@lru_cache(maxsize=64)
def occupation_basis(mode_count: int, cutoff: int) -> tuple[Occupation, ...]:
    """Return all occupations with total <= cutoff, graded then descending lex."""
    if mode_count < 1:
        raise FockSpaceError("A Fock space needs at least one mode.")
    if cutoff < 0:
        raise FockSpaceError(f"Cutoff must be non-negative, got {cutoff}.")
    return tuple(occ for n in range(cutoff + 1) for occ in compositions(n, mode_count))


@lru_cache(maxsize=64)
def enumerate_basis(mode_set: ModeSet, cutoff: int) -> FockSpace:
    """Build the truncated Fock space of ``mode_set`` up to ``cutoff`` photons.

    Args:
        mode_set: Modes, ordered spatial-major and polarization-minor.
        cutoff: Maximum total photon number.

    Returns:
        FockSpace: Space with C(cutoff + M, M) basis states.

    Raises:
        FockSpaceError: If the cutoff is negative.
    """
    occupations = occupation_basis(mode_set.mode_count, cutoff)
    return FockSpace(mode_set, cutoff, tuple(FockBasisState(o) for o in occupations))


def rotated_space(space: FockSpace) -> FockSpace:
    """Return the same truncation seen in the other polarization basis."""
    return enumerate_basis(space.mode_set.rotated(), space.cutoff)


def lift_mode_transform(
    in_basis: Sequence[Occupation],
    out_basis: Sequence[Occupation],
    transform: ModeTransform,
) -> ComplexMatrix:
    """Lift a linear-optics mode map to the photon-number basis.

    Column ``a`` of the result holds the expansion of input basis state ``a``
    over the output basis states. Photon number is conserved, so every input
    state must fit into the output truncation.

    Args:
        in_basis: Input occupations.
        out_basis: Output occupations.
        transform: ``transform[i][o]`` is the amplitude of output creation
            operator ``o`` in input creation operator ``i``.

    Raises:
        FockSpaceError: If an expanded term falls outside ``out_basis``.
    """
    out_index = {occ: i for i, occ in enumerate(out_basis)}
    out_modes = len(out_basis[0])
    lift = np.zeros((len(out_basis), len(in_basis)), dtype=np.complex128)
    for col, occ in enumerate(in_basis):
        poly: dict[Occupation, complex] = {(0,) * out_modes: 1.0}
        for mode, count in enumerate(occ):
            for _ in range(count):
                expanded: dict[Occupation, complex] = {}
                for term, coeff in poly.items():
                    for out_mode, amp in transform[mode].items():
                        key = term[:out_mode] + (term[out_mode] + 1,) + term[out_mode + 1 :]
                        expanded[key] = expanded.get(key, 0.0) + coeff * amp
                poly = expanded
        norm = sqrt(prod(factorial(n) for n in occ))
        for term, coeff in poly.items():
            if coeff == 0:
                continue
            try:
                row = out_index[term]
            except KeyError as e:
                raise FockSpaceError(f"Output state {term} outside the truncation.") from e
            lift[row, col] = coeff * sqrt(prod(factorial(n) for n in term)) / norm
    return lift


def hadamard_transform(spatial_mode_count: int) -> list[dict[int, complex]]:
    """Per-spatial-mode polarization rotation between the HV and DA pairs."""
    transform: list[dict[int, complex]] = []
    for s in range(spatial_mode_count):
        first, second = 2 * s, 2 * s + 1
        transform.append({first: _INV_SQRT2, second: _INV_SQRT2})
        transform.append({first: _INV_SQRT2, second: -_INV_SQRT2})
    return transform


@lru_cache(maxsize=32)
def hadamard_lift(space: FockSpace) -> npt.NDArray[np.float64]:
    """Lifted polarization rotation from ``space`` to its rotated view.

    The lift is real, symmetric and involutive.
    """
    occupations = [s.occupations for s in space.basis]
    lift = lift_mode_transform(
        occupations, occupations, hadamard_transform(space.mode_set.spatial_mode_count)
    )
    out = np.ascontiguousarray(lift.real)
    out.setflags(write=False)
    return out


def basis_rotate(op: FockOperator, target: Polarization) -> FockOperator:
    """Re-express ``op`` in the ``target`` polarization coordinates.

    Args:
        op: Operator defined on a space whose polarization is not ``target``.
        target: Polarization pair of the result.

    Raises:
        FockSpaceError: If ``op`` already uses ``target`` coordinates.
    """
    if op.space.mode_set.polarization is target:
        raise FockSpaceError(f"Operator is already expressed in {target} coordinates.")
    u = hadamard_lift(op.space)
    return FockOperator.from_matrix(rotated_space(op.space), u.T @ op.matrix @ u)


def grade_project(op: FockOperator, n: int) -> FockOperator:
    """Keep only the total-photon-number-``n`` block of ``op``."""
    idx = op.space.grade_indices(n)
    out = np.zeros_like(op.matrix)
    out[np.ix_(idx, idx)] = op.matrix[np.ix_(idx, idx)]
    return FockOperator.from_matrix(op.space, out)


@lru_cache(maxsize=128)
def spatial_patterns(space: FockSpace, n: int) -> tuple[Occupation, ...]:
    """Return photons-per-spatial-mode patterns of grade ``n`` in basis order."""
    seen: dict[Occupation, None] = {}
    for i in space.grade_indices(n):
        seen.setdefault(space.basis[i].spatial_pattern(), None)
    return tuple(seen)


@lru_cache(maxsize=512)
def pattern_indices(space: FockSpace, pattern: Occupation) -> npt.NDArray[np.int64]:
    """Indices of basis states with the given spatial pattern.

    Within a pattern the order is descending in each spatial mode's first
    polarization, spatial mode 1 outermost, so blocks are Kronecker products
    of the per-mode number bases.
    """
    if len(pattern) != space.mode_set.spatial_mode_count:
        raise FockSpaceError(f"Pattern {pattern} does not match the spatial modes.")
    if sum(pattern) > space.cutoff:
        raise FockSpaceError(f"Pattern {pattern} exceeds cutoff {space.cutoff}.")
    idx = [i for i, s in enumerate(space.basis) if s.spatial_pattern() == pattern]
    firsts = [space.basis[i].occupations[0::2] for i in idx]
    order = sorted(range(len(idx)), key=lambda k: tuple(-h for h in firsts[k]))
    out = np.array([idx[k] for k in order], dtype=np.int64)
    out.setflags(write=False)
    return out


def block_of(op: FockOperator, indices: npt.NDArray[np.int64]) -> ComplexMatrix:
    return op.matrix[np.ix_(indices, indices)]


def embed_block(
    space: FockSpace, indices: npt.NDArray[np.int64], block: npt.ArrayLike
) -> FockOperator:
    """Place ``block`` on ``indices`` of an otherwise zero operator."""
    out = np.zeros((space.dim, space.dim), dtype=np.complex128)
    out[np.ix_(indices, indices)] = np.asarray(block)
    return FockOperator.from_matrix(space, out)


def identity(space: FockSpace) -> FockOperator:
    return FockOperator.from_matrix(space, np.eye(space.dim))


def _loss_kraus(space: FockSpace, lost: Occupation, eta: float) -> npt.NDArray[np.float64]:
    kraus = np.zeros((space.dim, space.dim))
    for col, state in enumerate(space.basis):
        occ = state.occupations
        if any(n < k for n, k in zip(occ, lost, strict=True)):
            continue
        amp = prod(
            sqrt(comb(n, k) * eta ** (n - k) * (1 - eta) ** k)
            for n, k in zip(occ, lost, strict=True)
        )
        if amp:
            row = space.index_of(tuple(n - k for n, k in zip(occ, lost, strict=True)))
            kraus[row, col] = amp
    return kraus


def loss_adjoint(op: FockOperator, eta: float) -> FockOperator:
    """Heisenberg-picture pure-loss channel with transmittance ``eta`` on every mode.

    Kraus operators remove ``l`` photons from a mode with amplitude
    sqrt(C(n, l) eta^(n-l) (1-eta)^l); the adjoint is sum_l K_l^T M K_l.

    Raises:
        FockSpaceError: If ``eta`` leaves [0, 1].
    """
    if not 0.0 <= eta <= 1.0:
        raise FockSpaceError(f"Transmittance {eta} outside [0, 1].")
    space = op.space
    modes = space.mode_set.mode_count
    out = np.zeros_like(op.matrix)
    for lost in occupation_basis(modes, space.cutoff):
        k = _loss_kraus(space, lost, eta)
        if np.any(k):
            out += k.T @ op.matrix @ k
    return FockOperator.from_matrix(space, out)
