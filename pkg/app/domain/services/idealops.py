from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import sqrt
from typing import Literal

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import DecompositionError, FockSpaceError
from app.domain.services.fockspace import (
    Occupation,
    block_of,
    embed_block,
    identity,
    pattern_indices,
    spatial_patterns,
)
from app.domain.services.povm import PovmSet, build_povm
from app.domain.value_objects import (
    ComplexMatrix,
    DetectorModel,
    FockOperator,
    FockSpace,
    Outcome,
    Polarization,
    Scheme,
    SchemeConfig,
)
from app.domain.value_objects.constants import DECOMPOSITION_TOL, ZERO_SNAP

_S = 1 / sqrt(2)

# One photon in one spatial mode, basis (|1,0>, |0,1>).
QUBIT_OPERATORS: dict[str, ComplexMatrix] = {
    "I2": np.eye(2, dtype=np.complex128),
    "~MH1": np.array([[1, 0], [0, 0]], dtype=np.complex128),
    "~MD1": 0.5 * np.ones((2, 2), dtype=np.complex128),
    "sy": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
}
_TWO_D = np.array([0.5, _S, 0.5])
_TWO_A = np.array([0.5, -_S, 0.5])
# Two photons in one spatial mode, basis (|2,0>, |1,1>, |0,2>).
QUTRIT_OPERATORS: dict[str, ComplexMatrix] = {
    "I3": np.eye(3, dtype=np.complex128),
    "~MH2": np.diag([1, 0, 0]).astype(np.complex128),
    "~MV2": np.diag([0, 0, 1]).astype(np.complex128),
    "~MD2": np.outer(_TWO_D, _TWO_D).astype(np.complex128),
    "~MA2": np.outer(_TWO_A, _TWO_A).astype(np.complex128),
    "Sy": _S * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128),
}
_IMAGINARY = frozenset({"sy", "Sy"})
PAIR_SET: tuple[tuple[str, str], ...] = (
    ("I2", "I2"),
    ("~MH1", "I2"),
    ("~MD1", "I2"),
    ("sy", "I2"),
    ("I2", "~MH1"),
    ("I2", "~MD1"),
    ("I2", "sy"),
)
EXTENDED_PAIRS: tuple[tuple[str, str], ...] = tuple(
    (a, b) for a in ("~MH1", "~MD1", "sy") for b in ("~MH1", "~MD1", "sy")
)
ALICE_LABELS: tuple[str, ...] = ("H", "V")
IDENTITY_NAME = "I"


@dataclass(frozen=True, eq=False)
class MeasurementOperator:
    """Full-space Bob operator: the identity or a POVM element."""

    name: str
    operator: FockOperator
    outcome: Outcome | None = None
    imaginary: bool = False


@dataclass(frozen=True, eq=False)
class IdealOperator:
    """Perfect-efficiency projection confined to one spatial occupation pattern."""

    name: str
    operator: FockOperator
    grade: int
    pattern: Occupation
    local: ComplexMatrix = field(repr=False)
    imaginary: bool = False


type BobOperator = MeasurementOperator | IdealOperator


@dataclass(frozen=True)
class ProjectionDecomposition:
    """Expansion of a grade projection over dictionary members.

    ``undecomposable`` lists patterns whose block lies outside the span; their
    contribution is absent from ``coefficients``.
    """

    label: str
    grade: int
    coefficients: Mapping[str, float]
    undecomposable: tuple[Occupation, ...] = ()


@dataclass(frozen=True)
class ProductIdentity:
    """sum a_jl B_j B_l = sum b_m B_m inside one pattern block."""

    pattern: Occupation
    products: Mapping[tuple[int, int], complex]
    span: Mapping[int, complex]


@dataclass(frozen=True)
class RelationTables:
    commuting: frozenset[tuple[int, int]]
    orthogonal: frozenset[tuple[int, int]]
    product_identities: tuple[ProductIdentity, ...]
    imaginary: tuple[bool, ...]

    def is_orthogonal(self, j: int, l: int) -> bool:
        return (min(j, l), max(j, l)) in self.orthogonal


@dataclass(frozen=True, eq=False)
class OperatorDictionary:
    """Alice and Bob operator lists of the EVM.

    Alice's operators are |H><i| for i in {H, V}; only the products |i><k|
    enter the EVM. ``bob_ops[0]`` is the full-space identity, followed by the
    POVM elements and the ideal operators block by block.
    """

    scheme: SchemeConfig
    povm: PovmSet
    bob_ops: tuple[BobOperator, ...]
    max_ideal_grade: int
    extended_pair_set: bool = False
    alice_labels: tuple[str, ...] = ALICE_LABELS

    def __repr__(self) -> str:
        return (
            f"OperatorDictionary(scheme={self.scheme.scheme!s}, "
            f"spatial_modes={self.scheme.spatial_mode_count}, "
            f"alice={self.n_alice}, bob={self.n_bob})"
        )

    @property
    def space(self) -> FockSpace:
        return self.povm.space

    @property
    def model(self) -> DetectorModel:
        return self.povm.model

    @property
    def n_alice(self) -> int:
        return len(self.alice_labels)

    @property
    def n_bob(self) -> int:
        return len(self.bob_ops)

    @property
    def dim(self) -> int:
        return self.n_alice * self.n_bob

    @cached_property
    def _names(self) -> dict[str, int]:
        return {op.name: j for j, op in enumerate(self.bob_ops)}

    def index(self, name: str) -> int:
        return self._names[name]

    @cached_property
    def measurement_indices(self) -> tuple[int, ...]:
        """Non-identity measurement operators."""
        return tuple(
            j for j, op in enumerate(self.bob_ops)
            if isinstance(op, MeasurementOperator) and op.outcome is not None
        )

    @cached_property
    def ideal_indices(self) -> tuple[int, ...]:
        return tuple(j for j, op in enumerate(self.bob_ops) if isinstance(op, IdealOperator))

    @cached_property
    def blocks(self) -> dict[Occupation, tuple[int, ...]]:
        """Ideal-operator indices per spatial pattern, in dictionary order."""
        out: dict[Occupation, list[int]] = {}
        for j in self.ideal_indices:
            op = self.bob_ops[j]
            assert isinstance(op, IdealOperator)
            out.setdefault(op.pattern, []).append(j)
        return {p: tuple(v) for p, v in out.items()}

    def block_identity(self, pattern: Occupation) -> int:
        """Index of the ideal operator acting as identity on ``pattern``."""
        return self.blocks[pattern][0]


def default_max_ideal_grade(scheme: SchemeConfig) -> int:
    return 2 if scheme.spatial_mode_count <= 2 else 1


def _measurement_ops(povm: PovmSet) -> list[MeasurementOperator]:
    ops = [MeasurementOperator(IDENTITY_NAME, identity(povm.space))]
    for label in povm.labels:
        if label.is_no_click:
            continue
        ops.append(MeasurementOperator(f"M_{label}", povm[label], label))
    return ops


def _ideal(
    space: FockSpace, name: str, pattern: Occupation, local: ComplexMatrix, imaginary: bool
) -> IdealOperator:
    op = embed_block(space, pattern_indices(space, pattern), local)
    return IdealOperator(name, op, sum(pattern), pattern, local, imaginary)


def _unit(spatial: int, s: int, n: int = 1) -> Occupation:
    return tuple(n if k == s else 0 for k in range(spatial))


def build_dictionary(
    scheme: SchemeConfig,
    model: DetectorModel,
    space: FockSpace,
    *,
    max_ideal_grade: int | None = None,
    extended_pair_set: bool = False,
) -> OperatorDictionary:
    """Build the Bob operator list and its POVM.

    Args:
        scheme: Detection scheme.
        model: Efficiencies; its scheme must be ``scheme``.
        space: Truncated space in HV coordinates.
        max_ideal_grade: Highest photon number with ideal operators; ``-1``
            keeps the measurement set only. Defaults to 2 up to two spatial
            modes and 1 above.
        extended_pair_set: Add the nine products of non-identity one-photon
            operators to each two-mode one-photon-per-mode block.

    Raises:
        FockSpaceError: If the cutoff is below the requested ideal grade.
        DecompositionError: If the requested grade is above two.
    """
    grade = default_max_ideal_grade(scheme) if max_ideal_grade is None else max_ideal_grade
    if grade > 2:
        raise DecompositionError("Ideal operator sets stop at two photons.")
    if grade > space.cutoff:
        raise FockSpaceError(f"Ideal grade {grade} needs cutoff >= {grade}, got {space.cutoff}.")
    povm = build_povm(model, space)
    bob: list[BobOperator] = list(_measurement_ops(povm))
    spatial = scheme.spatial_mode_count
    if grade >= 0:
        bob.append(_ideal(space, "Vac", (0,) * spatial, np.ones((1, 1)), False))
    if grade >= 1:
        for s in range(spatial):
            for name, local in QUBIT_OPERATORS.items():
                imaginary = name in _IMAGINARY
                bob.append(_ideal(space, f"{name}@{s + 1}", _unit(spatial, s), local, imaginary))
    if grade >= 2:
        for s in range(spatial):
            for name, local in QUTRIT_OPERATORS.items():
                imaginary = name in _IMAGINARY
                pattern = _unit(spatial, s, 2)
                bob.append(_ideal(space, f"{name}@{s + 1}", pattern, local, imaginary))
        pairs = PAIR_SET + (EXTENDED_PAIRS if extended_pair_set else ())
        for s, t in combinations(range(spatial), 2):
            pattern = tuple(1 if k in (s, t) else 0 for k in range(spatial))
            for a, b in pairs:
                local = np.kron(QUBIT_OPERATORS[a], QUBIT_OPERATORS[b])
                imaginary = (a in _IMAGINARY) != (b in _IMAGINARY)
                bob.append(_ideal(space, f"{a}x{b}@{s + 1}+{t + 1}", pattern, local, imaginary))
    return OperatorDictionary(scheme, povm, tuple(bob), grade, extended_pair_set)


def _solve_span(
    target: ComplexMatrix, members: Sequence[ComplexMatrix], *, real: bool
) -> tuple[npt.NDArray[np.complex128], float]:
    """Least-squares coefficients of ``target`` over ``members`` and the max residual."""
    basis = np.stack([m.ravel() for m in members], axis=1)
    vec = target.ravel()
    if real:
        stacked = np.vstack([basis.real, basis.imag])
        coeffs, *_ = np.linalg.lstsq(stacked, np.concatenate([vec.real, vec.imag]), rcond=None)
        coeffs = coeffs.astype(np.complex128)
    else:
        coeffs, *_ = np.linalg.lstsq(basis, vec, rcond=None)
    coeffs[np.abs(coeffs) < ZERO_SNAP] = 0.0
    residual = float(np.max(np.abs(basis @ coeffs - vec), initial=0.0))
    return coeffs, residual


def decompose_block(
    dictionary: OperatorDictionary, block: ComplexMatrix, pattern: Occupation
) -> dict[int, float] | None:
    """Real expansion of a Hermitian pattern block over that pattern's ideal operators.

    Returns an empty mapping for a zero block and ``None`` when the block lies
    outside the span.
    """
    if not np.any(np.abs(block) >= ZERO_SNAP):
        return {}
    members = dictionary.blocks.get(pattern)
    if not members:
        return None
    locals_ = [dictionary.bob_ops[j].local for j in members]  # type: ignore[union-attr]
    coeffs, residual = _solve_span(block, locals_, real=True)
    if residual >= DECOMPOSITION_TOL:
        return None
    return {j: float(c.real) for j, c in zip(members, coeffs, strict=True) if c != 0}


def operator_block(op: FockOperator, pattern: Occupation) -> ComplexMatrix:
    return block_of(op, pattern_indices(op.space, pattern))


def decompose_matrix(
    dictionary: OperatorDictionary, matrix: ComplexMatrix, grade: int
) -> tuple[dict[int, float], tuple[Occupation, ...]]:
    """Expand the grade-``grade`` projection of a full-space matrix pattern by pattern."""
    space = dictionary.space
    coeffs: dict[int, float] = {}
    dropped: list[Occupation] = []
    for pattern in spatial_patterns(space, grade):
        idx = pattern_indices(space, pattern)
        found = decompose_block(dictionary, matrix[np.ix_(idx, idx)], pattern)
        if found is None:
            dropped.append(pattern)
            continue
        for j, c in found.items():
            coeffs[j] = coeffs.get(j, 0.0) + c
    return coeffs, tuple(dropped)


def decompose_projection(
    povm: PovmSet,
    label: Outcome,
    grade: int,
    dictionary: OperatorDictionary,
    *,
    strict: bool = True,
) -> ProjectionDecomposition:
    """Write grade_project(M_label, grade) over ideal operators.

    Args:
        povm: POVM holding ``label``.
        label: Outcome whose element is projected.
        grade: Photon number of the projection.
        dictionary: Dictionary providing the ideal operators.
        strict: Raise instead of reporting blocks outside the span.

    Raises:
        DecompositionError: If the grade has no ideal operators, or a block lies
            outside the span while ``strict``.
    """
    if grade > dictionary.max_ideal_grade:
        raise DecompositionError(f"No ideal operators at grade {grade}.")
    coeffs, dropped = decompose_matrix(dictionary, povm[label].matrix, grade)
    if dropped and strict:
        raise DecompositionError(f"M_{label} grade {grade} leaves the span on patterns {dropped}.")
    names = {dictionary.bob_ops[j].name: c for j, c in coeffs.items()}
    return ProjectionDecomposition(f"M_{label}", grade, names, dropped)


def _vanishes(matrix: npt.ArrayLike) -> bool:
    return not np.any(np.abs(np.asarray(matrix)) >= DECOMPOSITION_TOL)


def _pair_relation(a: ComplexMatrix, b: ComplexMatrix) -> Literal["orthogonal", "commuting"] | None:
    """Classify two Hermitian blocks by their product."""
    ab = a @ b
    if _vanishes(ab):
        return "orthogonal"
    if _vanishes(ab - b @ a):
        return "commuting"
    return None


def _product_identities(
    dictionary: OperatorDictionary, pattern: Occupation, members: tuple[int, ...]
) -> list[ProductIdentity]:
    """X Y = sum_Z c_Z Z for ordered non-identity members whose product stays in the span.

    On a one-photon block these are the Pauli products, on a two-photon block
    the squares of the spin-1 components and the products of orthogonal
    projectors.
    """
    locals_ = {j: dictionary.bob_ops[j].local for j in members}  # type: ignore[union-attr]
    span = [locals_[j] for j in members]
    out: list[ProductIdentity] = []
    for j, l in product(members[1:], repeat=2):
        coeffs, residual = _solve_span(locals_[j] @ locals_[l], span, real=False)
        if residual < DECOMPOSITION_TOL:
            rhs = {m: complex(c) for m, c in zip(members, coeffs, strict=True) if c != 0}
            out.append(ProductIdentity(pattern, {(j, l): 1.0}, rhs))
    return out


def relation_tables(dictionary: OperatorDictionary) -> RelationTables:
    """Derive commuting pairs, orthogonal pairs, product identities and realness.

    A pair is orthogonal when its product vanishes: ideal operators of
    different patterns, and ideal operators or POVM elements whose blocks
    multiply to zero. A pair is commuting when its product is nonzero and
    symmetric: the identity with everything, active-scheme POVM elements of
    the same basis, and block-level commuting ideal/ideal or POVM/ideal pairs.
    The two sets are disjoint.
    """
    ops = dictionary.bob_ops
    found: dict[tuple[int, int], str] = {(0, l): "commuting" for l in range(1, len(ops))}
    if dictionary.scheme.scheme is Scheme.ACTIVE:
        for j, l in combinations(dictionary.measurement_indices, 2):
            if basis_of(ops[j]) is basis_of(ops[l]):
                found[(j, l)] = "commuting"
    for m in dictionary.measurement_indices:
        for x in dictionary.ideal_indices:
            ideal = ops[x]
            assert isinstance(ideal, IdealOperator)
            kind = _pair_relation(ideal.local, operator_block(ops[m].operator, ideal.pattern))
            if kind is not None:
                found[(min(m, x), max(m, x))] = kind
    for j, l in combinations(dictionary.ideal_indices, 2):
        a, b = ops[j], ops[l]
        assert isinstance(a, IdealOperator) and isinstance(b, IdealOperator)
        kind = "orthogonal" if a.pattern != b.pattern else _pair_relation(a.local, b.local)
        if kind is not None:
            found[(j, l)] = kind
    identities: list[ProductIdentity] = []
    for pattern, members in dictionary.blocks.items():
        identities.extend(_product_identities(dictionary, pattern, members))
    return RelationTables(
        commuting=frozenset(p for p, kind in found.items() if kind == "commuting"),
        orthogonal=frozenset(p for p, kind in found.items() if kind == "orthogonal"),
        product_identities=tuple(identities),
        imaginary=tuple(op.imaginary for op in ops),
    )


def basis_of(op: BobOperator) -> Polarization | None:
    if isinstance(op, MeasurementOperator) and op.outcome is not None:
        return op.outcome.basis
    return None
