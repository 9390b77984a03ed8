from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations
from math import sqrt

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import PovmConstructionError
from app.domain.services.fockspace import (
    Occupation,
    compositions,
    basis_rotate,
    hadamard_transform,
    identity,
    lift_mode_transform,
    occupation_basis,
    pattern_indices,
    rotated_space,
    spatial_patterns,
)
from app.domain.value_objects import (
    DetectorModel,
    FockOperator,
    FockSpace,
    Outcome,
    Polarization,
    Scheme,
    SchemeConfig,
)
from app.domain.value_objects.constants import POVM_TOL

# Outcome -> (detectors that click, detectors that stay idle), indices into the
# detector columns of the efficiency table.
_ACTIVE_CLICKS: dict[Outcome, tuple[frozenset[int], frozenset[int]]] = {
    Outcome.H: (frozenset({0}), frozenset({1})),
    Outcome.V: (frozenset({1}), frozenset({0})),
    Outcome.HV: (frozenset({0, 1}), frozenset()),
    Outcome.NONE_HV: (frozenset(), frozenset({0, 1})),
    Outcome.D: (frozenset({0}), frozenset({1})),
    Outcome.A: (frozenset({1}), frozenset({0})),
    Outcome.DA: (frozenset({0, 1}), frozenset()),
    Outcome.NONE_DA: (frozenset(), frozenset({0, 1})),
}
_PASSIVE_CLICKS: dict[Outcome, tuple[frozenset[int], frozenset[int]]] = {
    Outcome.NONE: (frozenset(), frozenset({0, 1, 2, 3})),
    Outcome.H: (frozenset({0}), frozenset({1, 2, 3})),
    Outcome.V: (frozenset({1}), frozenset({0, 2, 3})),
    Outcome.D: (frozenset({2}), frozenset({0, 1, 3})),
    Outcome.A: (frozenset({3}), frozenset({0, 1, 2})),
    Outcome.HV: (frozenset({0, 1}), frozenset({2, 3})),
    Outcome.DA: (frozenset({2, 3}), frozenset({0, 1})),
}

_INV_SQRT2 = 1 / sqrt(2)


@dataclass(frozen=True, eq=False, repr=False)
class PovmSet:
    """Threshold-detector POVM of one scheme on a truncated Fock space.

    Elements are expressed in the HV number basis of ``space``.
    """

    scheme: SchemeConfig
    model: DetectorModel
    space: FockSpace
    elements: Mapping[Outcome, FockOperator] = field(default_factory=dict)

    def __repr__(self) -> str:
        return (
            f"PovmSet(scheme={self.scheme.scheme!s}, dim={self.space.dim}, "
            f"labels={[str(k) for k in self.elements]})"
        )

    def __getitem__(self, label: Outcome) -> FockOperator:
        return self.elements[label]

    @property
    def labels(self) -> tuple[Outcome, ...]:
        return tuple(self.elements)

    def groups(self) -> list[tuple[Outcome, ...]]:
        """Outcome groups that each resolve the identity."""
        if self.scheme.scheme is Scheme.ACTIVE:
            return [
                tuple(y for y in self.labels if y.basis is basis)
                for basis in (Polarization.HV, Polarization.DA)
            ]
        return [self.labels]


@dataclass(frozen=True)
class PovmRelationReport:
    """Minimum eigenvalue of every operator-ordering check."""

    checks: Mapping[str, float]

    @property
    def violations(self) -> dict[str, float]:
        return {name: v for name, v in self.checks.items() if v < -POVM_TOL}

    @property
    def ok(self) -> bool:
        return not self.violations


def _no_click(eta: Sequence[float], counts: Sequence[int], detectors: frozenset[int]) -> float:
    return float(np.prod([(1.0 - eta[k]) ** counts[k] for k in detectors]))


def _outcome_probability(
    clicks: frozenset[int], idle: frozenset[int], q: Mapping[int, float]
) -> float:
    """Product of (1 - q_k) over clicking detectors and q_k over idle ones."""
    out = 1.0
    for k in clicks:
        out *= 1.0 - q[k]
    for k in idle:
        out *= q[k]
    return out


def _validate(povm: PovmSet) -> PovmSet:
    eye = np.eye(povm.space.dim)
    for group in povm.groups():
        total = sum(povm[y].matrix for y in group)
        dev = float(np.max(np.abs(total - eye)))
        if dev > POVM_TOL:
            raise PovmConstructionError(f"Elements {list(map(str, group))} miss I by {dev:.2e}.")
    for label, op in povm.elements.items():
        ev = op.eigenvalues()
        if ev[0] < -POVM_TOL or ev[-1] > 1 + POVM_TOL:
            raise PovmConstructionError(
                f"Element {label} has eigenvalues in [{ev[0]:.3e}, {ev[-1]:.3e}]."
            )
        if not op.block_diagonal:
            raise PovmConstructionError(f"Element {label} mixes photon-number grades.")
    return povm


def _check_fit(scheme: Scheme, model: DetectorModel, space: FockSpace) -> None:
    if model.scheme.scheme is not scheme:
        raise PovmConstructionError(f"Model describes the {model.scheme.scheme} scheme.")
    if model.scheme.spatial_mode_count != space.mode_set.spatial_mode_count:
        raise PovmConstructionError("Model and space disagree on the spatial modes.")
    if space.mode_set.polarization is not Polarization.HV:
        raise PovmConstructionError("POVMs are built in HV coordinates.")
    if space.cutoff < 1:
        raise PovmConstructionError("POVM construction needs cutoff >= 1.")


def _active_diagonal(model: DetectorModel, space: FockSpace, label: Outcome) -> FockOperator:
    """Element of one active basis, diagonal in that basis's number states."""
    eta = model.efficiencies
    clicks, idle = _ACTIVE_CLICKS[label]
    diag = np.empty(space.dim)
    for i, state in enumerate(space.basis):
        occ = state.occupations
        q = {
            k: float(np.prod([(1.0 - row[k]) ** occ[2 * s + k] for s, row in enumerate(eta)]))
            for k in (0, 1)
        }
        diag[i] = _outcome_probability(clicks, idle, q)
    return FockOperator.from_matrix(space, np.diag(diag))


def build_active_povm(model: DetectorModel, space: FockSpace) -> PovmSet:
    """Build the eight active-scheme elements.

    HV elements are diagonal in the HV number basis. DA elements are built
    diagonally in the DA number basis and rotated into HV coordinates.

    Raises:
        PovmConstructionError: On scheme or space mismatch, or failed checks.
    """
    _check_fit(Scheme.ACTIVE, model, space)
    da_space = rotated_space(space)
    elements: dict[Outcome, FockOperator] = {}
    for label in model.scheme.outcomes:
        if label.basis is Polarization.HV:
            elements[label] = _active_diagonal(model, space, label)
        else:
            elements[label] = basis_rotate(
                _active_diagonal(model, da_space, label), Polarization.HV
            )
    return _validate(PovmSet(model.scheme, model, space, elements))


def passive_transform(spatial_mode_count: int) -> list[dict[int, complex]]:
    """50/50 splitter followed by an HV and a DA polarizing splitter, per spatial mode.

    Output mode ``4 s + k`` feeds detector ``k`` in {H, V, D, A}.
    """
    transform: list[dict[int, complex]] = []
    for s in range(spatial_mode_count):
        h, v, d, a = (4 * s + k for k in range(4))
        transform.append({h: _INV_SQRT2, d: 0.5, a: 0.5})
        transform.append({v: _INV_SQRT2, d: 0.5, a: -0.5})
    return transform


@lru_cache(maxsize=16)
def _passive_lift(space: FockSpace) -> tuple[npt.NDArray[np.float64], tuple[Occupation, ...]]:
    spatial = space.mode_set.spatial_mode_count
    out_basis = occupation_basis(4 * spatial, space.cutoff)
    lift = lift_mode_transform(
        [s.occupations for s in space.basis], out_basis, passive_transform(spatial)
    )
    return np.ascontiguousarray(lift.real), out_basis


def build_passive_povm(model: DetectorModel, space: FockSpace) -> PovmSet:
    """Build the eight passive-scheme elements.

    Every input state is expanded over the detector output modes; each element
    is the pullback of the click-pattern probabilities. M_CC completes the
    identity.

    Raises:
        PovmConstructionError: On scheme or space mismatch, or failed checks.
    """
    _check_fit(Scheme.PASSIVE, model, space)
    lift, out_basis = _passive_lift(space)
    eta = model.efficiencies
    q_table = [
        {
            k: float(np.prod([(1.0 - row[k]) ** occ[4 * s + k] for s, row in enumerate(eta)]))
            for k in range(4)
        }
        for occ in out_basis
    ]
    elements: dict[Outcome, FockOperator] = {}
    for label, (clicks, idle) in _PASSIVE_CLICKS.items():
        probs = np.array([_outcome_probability(clicks, idle, q) for q in q_table])
        elements[label] = FockOperator.from_matrix(space, lift.T @ (probs[:, None] * lift))
    rest = reduce(lambda acc, op: acc - op, elements.values(), identity(space))
    elements[Outcome.CC] = rest
    return _validate(PovmSet(model.scheme, model, space, elements))


def build_povm(model: DetectorModel, space: FockSpace) -> PovmSet:
    if model.scheme.scheme is Scheme.ACTIVE:
        return build_active_povm(model, space)
    return build_passive_povm(model, space)


def verify_povm_relations(povm: PovmSet) -> PovmRelationReport:
    """Check the operator orderings used as relation inequalities.

    Active scheme: M_i >= M_i M_j >= 0 for every pair in one basis. Passive
    scheme: M_i >= M_i^2 for every element.
    """
    checks: dict[str, float] = {}

    def lowest(matrix: npt.NDArray[np.complex128]) -> float:
        return float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0])

    if povm.scheme.scheme is Scheme.ACTIVE:
        for group in povm.groups():
            for i in group:
                for j in group:
                    prod_ij = povm[i].matrix @ povm[j].matrix
                    checks[f"M_{i}-M_{i}M_{j}"] = lowest(povm[i].matrix - prod_ij)
                    checks[f"M_{i}M_{j}"] = lowest(prod_ij)
    else:
        for label in povm.labels:
            m = povm[label].matrix
            checks[f"M_{label}-M_{label}^2"] = lowest(m - m @ m)
    return PovmRelationReport(checks)


@lru_cache(maxsize=256)
def _single_mode_lift(
    scheme: Scheme, basis: Polarization, n: int
) -> tuple[npt.NDArray[np.float64], tuple[Occupation, ...]]:
    """Lift of one spatial mode's n-photon states (HV, descending n_H) to detector modes."""
    in_basis = [(h, n - h) for h in range(n, -1, -1)]
    if scheme is Scheme.PASSIVE:
        out_basis = tuple(compositions(n, 4))
        lift = lift_mode_transform(in_basis, out_basis, passive_transform(1))
    elif basis is Polarization.HV:
        return np.eye(n + 1), tuple(in_basis)
    else:
        out_basis = tuple(in_basis)
        lift = lift_mode_transform(in_basis, out_basis, hadamard_transform(1))
    return np.ascontiguousarray(lift.real), out_basis


def _monomial_block(
    model: DetectorModel, basis: Polarization, spatial: int, n: int, idle: frozenset[int]
) -> npt.NDArray[np.float64]:
    lift, out_basis = _single_mode_lift(model.scheme.scheme, basis, n)
    eta = model.efficiencies[spatial]
    diag = np.array([_no_click(eta, occ, idle) for occ in out_basis])
    return lift.T @ (diag[:, None] * lift)


def pattern_block(
    model: DetectorModel, label: Outcome, pattern: Occupation
) -> npt.NDArray[np.float64]:
    """Block of element ``label`` on one spatial occupation pattern.

    No-click probabilities factorize over spatial modes, so the block is an
    inclusion-exclusion sum of Kronecker products of per-mode blocks. The row
    order matches ``pattern_indices``. Used where the full truncated space is
    too large.
    """
    scheme = model.scheme.scheme
    if scheme is Scheme.PASSIVE and label is Outcome.CC:
        dim = int(np.prod([n + 1 for n in pattern]))
        others = sum(pattern_block(model, y, pattern) for y in _PASSIVE_CLICKS)
        return np.eye(dim) - others
    table = _ACTIVE_CLICKS if scheme is Scheme.ACTIVE else _PASSIVE_CLICKS
    clicks, idle = table[label]
    basis = label.basis or Polarization.HV
    block: npt.NDArray[np.float64] | float = 0.0
    for size in range(len(clicks) + 1):
        for subset in combinations(sorted(clicks), size):
            factors = [
                _monomial_block(model, basis, s, n, idle | frozenset(subset))
                for s, n in enumerate(pattern)
            ]
            block = block + (-1) ** size * reduce(np.kron, factors)
    return np.asarray(block)


def element_from_blocks(model: DetectorModel, space: FockSpace, label: Outcome) -> FockOperator:
    """Assemble an element pattern by pattern; cross-check path for the builders."""
    out = np.zeros((space.dim, space.dim))
    for n in range(space.cutoff + 1):
        for pattern in spatial_patterns(space, n):
            idx = pattern_indices(space, pattern)
            out[np.ix_(idx, idx)] = pattern_block(model, label, pattern)
    return FockOperator.from_matrix(space, out)


def outcomes_for_clicks(scheme: Scheme, clicks: frozenset[int]) -> tuple[Outcome, ...]:
    """Outcomes recorded when exactly the detectors in ``clicks`` fire.

    Active: one outcome per basis. Passive: one outcome, the cross click for
    any pattern spanning both arms.
    """
    table = _ACTIVE_CLICKS if scheme is Scheme.ACTIVE else _PASSIVE_CLICKS
    found = tuple(y for y, (fired, _) in table.items() if fired == clicks)
    return found or (Outcome.CC,)
