from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import product
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import sparse

from app.domain.exceptions import DetectorModelError, FockSpaceError
from app.domain.services.fockspace import pattern_indices
from app.domain.services.idealops import (
    MeasurementOperator,
    OperatorDictionary,
    RelationTables,
    basis_of,
    decompose_block,
    relation_tables,
)
from app.domain.services.photon_bounds import TailInequality, witness_terms
from app.domain.value_objects import (
    AliceOutcome,
    ConstraintGroup,
    ObservedStatistics,
    Relation,
    Scheme,
)
from app.domain.value_objects.constants import ZERO_SNAP

type ComplexForm = dict[tuple[int, int], complex]
type FloatArray = npt.NDArray[np.float64]
type Bound = Literal["lower", "upper"]

_ALICE = (AliceOutcome.H, AliceOutcome.V)


@dataclass(frozen=True)
class LinearConstraint:
    """sum_e terms[e] * u_e (relation) rhs over the real EVM unknowns."""

    terms: Mapping[int, float]
    relation: Relation
    rhs: float
    group: ConstraintGroup
    label: str = ""

    def evaluate(self, u: npt.NDArray[np.float64]) -> float:
        return sum(c * float(u[e]) for e, c in self.terms.items())

    def violation(self, u: npt.NDArray[np.float64]) -> float:
        """Zero when satisfied; positive amount of violation otherwise."""
        lhs = self.evaluate(u)
        if self.relation is Relation.EQ:
            return abs(lhs - self.rhs)
        return max(0.0, self.rhs - lhs)


@dataclass(frozen=True, eq=False)
class EVMProblem:
    """Compiled EVM feasibility problem.

    The unknowns are one real number per upper-triangle entry (r <= c): the
    real part of real-type entries and the imaginary part of imaginary-type
    entries. Entries of orthogonal operator pairs are fixed to zero and never
    appear in constraint terms. ``split`` gives the (Alice, Bob) factor
    dimensions seen by the partial transpose; ``dictionary`` is absent for
    problems posed directly on a small state space.
    """

    dictionary: OperatorDictionary | None
    split: tuple[int, int]
    entries: tuple[tuple[int, int], ...]
    imaginary: tuple[bool, ...]
    eliminated: frozenset[int]
    equalities: tuple[LinearConstraint, ...]
    inequalities: tuple[LinearConstraint, ...]
    ledger: Mapping[ConstraintGroup, int]
    dropped_blocks: tuple[str, ...] = ()
    tails: tuple[TailInequality, ...] = field(default=(), repr=False)

    def __repr__(self) -> str:
        return (
            f"EVMProblem(dim={self.dim}, unknowns={len(self.entries) - len(self.eliminated)}, "
            f"equalities={len(self.equalities)}, inequalities={len(self.inequalities)})"
        )

    @property
    def dim(self) -> int:
        return self.split[0] * self.split[1]

    def unknowns(self, chi: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Read the real unknown vector off a matrix."""
        m = np.asarray(chi)
        rows = np.array([r for r, _ in self.entries])
        cols = np.array([c for _, c in self.entries])
        values = m[rows, cols]
        return np.where(np.array(self.imaginary), values.imag, values.real).astype(np.float64)

    def matrices(
        self,
    ) -> tuple[sparse.csr_matrix, FloatArray, sparse.csr_matrix, FloatArray]:
        """Return (A, b, C, d) with A u = b and C u >= d."""
        n = len(self.entries)
        return (*_stack(self.equalities, n), *_stack(self.inequalities, n))

    def residuals(self, chi: npt.ArrayLike) -> tuple[float, float]:
        """Largest equality and inequality violation of ``chi``."""
        u = self.unknowns(chi)
        eq = max((c.violation(u) for c in self.equalities), default=0.0)
        ineq = max((c.violation(u) for c in self.inequalities), default=0.0)
        return eq, ineq

    def type_violation(self, chi: npt.ArrayLike) -> float:
        """Largest part of ``chi`` forbidden by entry types or eliminations."""
        m = np.asarray(chi)
        worst = 0.0
        for e, (r, c) in enumerate(self.entries):
            v = m[r, c]
            if e in self.eliminated:
                worst = max(worst, abs(v))
            elif self.imaginary[e]:
                worst = max(worst, abs(v.real))
            else:
                worst = max(worst, abs(v.imag))
        return float(worst)

    def entry_matrix(self, u: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        """Hermitian matrix whose unknowns are ``u``."""
        values = np.asarray(u, dtype=float)
        out = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for e, (r, c) in enumerate(self.entries):
            if e in self.eliminated:
                continue
            v = 1j * values[e] if self.imaginary[e] else values[e]
            out[r, c] = v
            out[c, r] = np.conj(v)
        return out


def _stack(
    constraints: Sequence[LinearConstraint], n: int
) -> tuple[sparse.csr_matrix, npt.NDArray[np.float64]]:
    rows, cols, vals = [], [], []
    for k, con in enumerate(constraints):
        for e, c in con.terms.items():
            rows.append(k)
            cols.append(e)
            vals.append(c)
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(len(constraints), n))
    return mat, np.array([c.rhs for c in constraints], dtype=float)


def partial_transpose(
    matrix: npt.ArrayLike, dictionary: OperatorDictionary
) -> npt.NDArray[np.complex128]:
    """Transpose Alice's operator indices: [chi^G]_{(i,j),(k,l)} = chi_{(k,j),(i,l)}."""
    return transpose_alice(matrix, (dictionary.n_alice, dictionary.n_bob))


def transpose_alice(
    matrix: npt.ArrayLike, split: tuple[int, int]
) -> npt.NDArray[np.complex128]:
    """Partial transpose on the first factor of a (na * nb)-dimensional matrix."""
    m = np.asarray(matrix)
    na, nb = split
    if m.shape != (na * nb, na * nb):
        raise FockSpaceError(f"Matrix of shape {m.shape} does not match the EVM dimension.")
    return m.reshape(na, nb, na, nb).transpose(2, 1, 0, 3).reshape(na * nb, na * nb)


def evm_of_state(
    rho: npt.ArrayLike, dictionary: OperatorDictionary
) -> npt.NDArray[np.complex128]:
    """Evaluate chi_{ij,kl} = Tr(rho |i><k| (x) B_j B_l) by direct traces.

    ``rho`` acts on Alice's qubit (x) the truncated space, Alice outermost.

    Raises:
        FockSpaceError: On dimension mismatch.
    """
    r = np.asarray(rho, dtype=np.complex128)
    d = dictionary.space.dim
    if r.shape != (2 * d, 2 * d):
        raise FockSpaceError(f"State of shape {r.shape} does not act on C^2 (x) C^{d}.")
    bobs = np.stack([op.operator.matrix for op in dictionary.bob_ops])
    tensor = r.reshape(2, d, 2, d)
    chi = np.einsum("kaib,jbc,lca->ijkl", tensor, bobs, bobs, optimize=True)
    n = dictionary.dim
    return chi.reshape(n, n)


@dataclass
class _Builder:
    """Accumulates complex statements and reduces them to real rows."""

    dictionary: OperatorDictionary
    relations: RelationTables
    entries: list[tuple[int, int]] = field(default_factory=list)
    imaginary: list[bool] = field(default_factory=list)
    eliminated: set[int] = field(default_factory=set)
    equalities: list[LinearConstraint] = field(default_factory=list)
    inequalities: list[LinearConstraint] = field(default_factory=list)
    ledger: Counter[ConstraintGroup] = field(default_factory=Counter)
    dropped: list[str] = field(default_factory=list)
    _seen: set[tuple] = field(default_factory=set)

    def __post_init__(self) -> None:
        nb = self.dictionary.n_bob
        n = self.dictionary.dim
        self._index: dict[tuple[int, int], int] = {}
        for r in range(n):
            for c in range(r, n):
                j, l = r % nb, c % nb
                self._index[(r, c)] = len(self.entries)
                self.entries.append((r, c))
                self.imaginary.append(self.relations.imaginary[j] != self.relations.imaginary[l])
                if self.relations.is_orthogonal(j, l):
                    self.eliminated.add(len(self.entries) - 1)

    def pos(self, i: int, j: int, k: int, l: int) -> tuple[int, int]:
        nb = self.dictionary.n_bob
        return i * nb + j, k * nb + l

    def chi(self, i: int, j: int, k: int, l: int, coeff: complex = 1.0) -> ComplexForm:
        return {self.pos(i, j, k, l): coeff}

    def _real_terms(self, form: ComplexForm) -> dict[int, complex]:
        """Rewrite a form over chi entries as complex multiples of the real unknowns."""
        out: dict[int, complex] = {}
        for (r, c), a in form.items():
            if a == 0:
                continue
            e = self._index[(min(r, c), max(r, c))]
            if e in self.eliminated:
                continue
            if self.imaginary[e]:
                alpha = 1j if r <= c else -1j
            else:
                alpha = 1.0
            out[e] = out.get(e, 0.0) + a * alpha
        return out

    def _push(
        self,
        terms: Mapping[int, float],
        relation: Relation,
        rhs: float,
        group: ConstraintGroup,
        label: str,
    ) -> None:
        clean = {e: float(c) for e, c in terms.items() if abs(c) >= ZERO_SNAP}
        if not clean and (abs(rhs) < ZERO_SNAP or (relation is Relation.GE and rhs <= 0)):
            return
        key = self._key(clean, relation, rhs)
        if key in self._seen:
            return
        self._seen.add(key)
        con = LinearConstraint(clean, relation, float(rhs), group, label)
        (self.equalities if relation is Relation.EQ else self.inequalities).append(con)

    @staticmethod
    def _key(terms: Mapping[int, float], relation: Relation, rhs: float) -> tuple:
        if not terms:
            return (relation, round(rhs, 12))
        first = terms[min(terms)]
        scale = abs(first) if relation is Relation.GE else first
        norm = tuple((e, round(c / scale, 10)) for e, c in sorted(terms.items()))
        return (relation, norm, round(rhs / scale, 10))

    def equal(
        self, form: ComplexForm, rhs: complex, group: ConstraintGroup, label: str = ""
    ) -> None:
        """Record the statement ``form == rhs`` as up to two real rows."""
        self.ledger[group] += 1
        terms = self._real_terms(form)
        value = complex(rhs)
        self._push({e: c.real for e, c in terms.items()}, Relation.EQ, value.real, group, label)
        self._push({e: c.imag for e, c in terms.items()}, Relation.EQ, value.imag, group, label)

    def at_least(
        self, form: ComplexForm, rhs: float, group: ConstraintGroup, label: str = ""
    ) -> None:
        """Record the real statement ``form >= rhs``."""
        self.ledger[group] += 1
        terms = self._real_terms(form)
        self._push({e: c.real for e, c in terms.items()}, Relation.GE, rhs, group, label)

    def build(self, tails: tuple[TailInequality, ...]) -> EVMProblem:
        return EVMProblem(
            dictionary=self.dictionary,
            split=(self.dictionary.n_alice, self.dictionary.n_bob),
            entries=tuple(self.entries),
            imaginary=tuple(self.imaginary),
            eliminated=frozenset(self.eliminated),
            equalities=tuple(self.equalities),
            inequalities=tuple(self.inequalities),
            ledger=dict(self.ledger),
            dropped_blocks=tuple(self.dropped),
            tails=tails,
        )


def _add(
    target: ComplexForm, other: Mapping[tuple[int, int], complex], scale: complex = 1.0
) -> ComplexForm:
    for key, value in other.items():
        target[key] = target.get(key, 0.0) + scale * value
    return target


def _projected(
    b: _Builder, matrix: npt.NDArray[np.complex128], bound: Bound, name: str
) -> dict[int, float]:
    """Coefficients over ideal operators of the grade <= G part of ``matrix``.

    Blocks outside the span are dropped (``lower``) or replaced by their block
    identity (``upper``); both keep the derived inequality valid for PSD
    blocks below the identity.
    """
    d = b.dictionary
    out: dict[int, float] = {}
    for pattern in d.blocks:
        idx = pattern_indices(d.space, pattern)
        found = decompose_block(d, matrix[np.ix_(idx, idx)], pattern)
        if found is None:
            b.dropped.append(f"{name}@{pattern}")
            if bound == "lower":
                continue
            found = {d.block_identity(pattern): 1.0}
        for j, c in found.items():
            out[j] = out.get(j, 0.0) + c
    return out


def _grade_identities(d: OperatorDictionary, grades: Iterable[int]) -> list[int]:
    wanted = set(grades)
    return [d.block_identity(p) for p in d.blocks if sum(p) in wanted]


def _observation(b: _Builder, observed: ObservedStatistics) -> None:
    d = b.dictionary
    rho_a = observed.reduced_alice_state()
    for i, k in product(range(2), repeat=2):
        b.equal(b.chi(i, 0, k, 0), rho_a[k, i], ConstraintGroup.OBSERVATION, f"rhoA[{k},{i}]")
    for i, x in enumerate(_ALICE):
        for m in d.measurement_indices:
            op = d.bob_ops[m]
            assert isinstance(op, MeasurementOperator) and op.outcome is not None
            b.equal(
                b.chi(i, 0, i, m),
                2 * observed.p(x, op.outcome),
                ConstraintGroup.OBSERVATION,
                f"p({x},{op.outcome})",
            )


def _alice_cross(b: _Builder, observed: ObservedStatistics) -> None:
    """<|H><V| (x) M> = <|V><H| (x) M> = p(D, y) - p(A, y) for a real state."""
    d = b.dictionary
    for m in d.measurement_indices:
        op = d.bob_ops[m]
        assert isinstance(op, MeasurementOperator) and op.outcome is not None
        value = observed.p(AliceOutcome.D, op.outcome) - observed.p(AliceOutcome.A, op.outcome)
        b.equal(b.chi(0, 0, 1, m), value, ConstraintGroup.ALICE_CROSS, f"cross01({op.outcome})")
        b.equal(b.chi(1, 0, 0, m), value, ConstraintGroup.ALICE_CROSS, f"cross10({op.outcome})")


def _realness(b: _Builder) -> None:
    d = b.dictionary
    for i in range(d.n_alice):
        for l in range(1, d.n_bob):
            form = _add(b.chi(i, 0, i, l), b.chi(i, l, i, 0), -1.0)
            b.equal(form, 0.0, ConstraintGroup.REALNESS, f"Im<{d.bob_ops[l].name}>")


def _operator_relations(b: _Builder) -> None:
    """chi_{ij,kl} = chi_{il,kj} for commuting pairs; orthogonal pairs are eliminated."""
    d, rel = b.dictionary, b.relations
    quads = list(product(range(d.n_alice), repeat=2))
    for (j, l) in sorted(rel.commuting):
        for i, k in quads:
            form = _add(b.chi(i, j, k, l), b.chi(i, l, k, j), -1.0)
            label = f"[{d.bob_ops[j].name},{d.bob_ops[l].name}]"
            b.equal(form, 0.0, ConstraintGroup.COMMUTING, label)


def _commutation(b: _Builder) -> None:
    d, rel = b.dictionary, b.relations
    for identity in rel.product_identities:
        for i, k in product(range(d.n_alice), repeat=2):
            form: ComplexForm = {}
            for (j, l), a in identity.products.items():
                _add(form, b.chi(i, j, k, l, a))
            for m, c in identity.span.items():
                _add(form, b.chi(i, 0, k, m, -c))
            b.equal(form, 0.0, ConstraintGroup.COMMUTATION, f"product@{identity.pattern}")


def _projection(b: _Builder) -> None:
    """X T = X T^(g) and T X = T^(g) X for non-identity ideal X and T in {I, M}.

    ``g`` is the pattern of X. Block identities and orthogonal pairs are skipped.
    """
    d = b.dictionary
    targets = [0, *d.measurement_indices]
    for pattern, members in d.blocks.items():
        idx = pattern_indices(d.space, pattern)
        for x in members[1:]:
            name = d.bob_ops[x].name
            for t in targets:
                if b.relations.is_orthogonal(x, t):
                    continue
                found = decompose_block(d, d.bob_ops[t].operator.matrix[np.ix_(idx, idx)], pattern)
                if found is None:
                    continue
                label = f"{name}.{d.bob_ops[t].name}"
                for i, k in product(range(d.n_alice), repeat=2):
                    right = b.chi(i, x, k, t)
                    left = b.chi(i, t, k, x)
                    for y, c in found.items():
                        _add(right, b.chi(i, x, k, y, -c))
                        _add(left, b.chi(i, y, k, x, -c))
                    b.equal(right, 0.0, ConstraintGroup.PROJECTION, label)
                    b.equal(left, 0.0, ConstraintGroup.PROJECTION, f"{d.bob_ops[t].name}.{name}")


def _relation_pairs(d: OperatorDictionary) -> list[tuple[int, int]]:
    """Ordered operator pairs whose product is a PSD contraction below the first factor."""
    ms = d.measurement_indices
    if d.scheme.scheme is Scheme.PASSIVE:
        return [(m, m) for m in ms]
    return [
        (j, l) for j in ms for l in ms if basis_of(d.bob_ops[j]) is basis_of(d.bob_ops[l])
    ]


def _relation_inequalities(b: _Builder) -> None:
    d = b.dictionary
    pairs = _relation_pairs(d)
    for i in range(d.n_alice):
        for j, l in pairs:
            names = f"{d.bob_ops[j].name}{d.bob_ops[l].name}"
            below = _add(b.chi(i, 0, i, j), b.chi(i, j, i, l), -1.0)
            b.at_least(below, 0.0, ConstraintGroup.RELATION, f"{d.bob_ops[j].name}>={names}")
            b.at_least(b.chi(i, j, i, l), 0.0, ConstraintGroup.RELATION, f"{names}>=0")
    if d.max_ideal_grade < 0:
        return
    for i in range(d.n_alice):
        for m in d.measurement_indices:
            op = d.bob_ops[m]
            form = b.chi(i, 0, i, m)
            for x, c in _projected(b, op.operator.matrix, "lower", op.name).items():
                _add(form, b.chi(i, 0, i, x, -c))
            b.at_least(form, 0.0, ConstraintGroup.RELATION, f"{op.name}>={op.name}^(<=G)")
    unordered = sorted({(min(j, l), max(j, l)) for j, l in pairs})
    for i in range(d.n_alice):
        for j, l in unordered:
            a, c_op = d.bob_ops[j], d.bob_ops[l]
            product_matrix = a.operator.matrix @ c_op.operator.matrix
            name = f"{a.name}{c_op.name}"
            form = b.chi(i, j, i, l)
            for x, c in _projected(b, product_matrix, "lower", name).items():
                _add(form, b.chi(i, 0, i, x, -c))
            b.at_least(form, 0.0, ConstraintGroup.RELATION, f"{name}>={name}^(<=G)")


def _witness_form(
    b: _Builder, tail: TailInequality, observed_scheme: Scheme
) -> ComplexForm:
    """sum_{g < tail grade} <F^(g)> as a form in chi entries."""
    d = b.dictionary
    form: ComplexForm = {}
    grades = set(tail.exact_grades)
    for term in witness_terms(tail.kind, observed_scheme):
        element = d.povm[term.label].matrix
        for pattern in d.blocks:
            if sum(pattern) not in grades:
                continue
            idx = pattern_indices(d.space, pattern)
            found = decompose_block(d, element[np.ix_(idx, idx)], pattern)
            if found is None:
                b.dropped.append(f"F_{tail.kind}:{term.label}@{pattern}")
                continue
            for i, k in product(range(d.n_alice), repeat=2):
                a = term.alice[i, k]
                if a == 0:
                    continue
                for x, c in found.items():
                    _add(form, b.chi(i, 0, k, x, term.weight * a * c))
    return form


def _photon_tails(b: _Builder, tails: Sequence[TailInequality], scheme: Scheme) -> None:
    d = b.dictionary
    if d.max_ideal_grade < 0:
        return
    for tail in tails:
        # observed >= <F^(<T)> + (Tr - p_<T) * tail_min
        form = _witness_form(b, tail, scheme)
        for x in _grade_identities(d, tail.exact_grades):
            for i in range(d.n_alice):
                _add(form, b.chi(i, 0, i, x, -tail.tail_min))
        for i in range(d.n_alice):
            _add(form, b.chi(i, 0, i, 0, tail.tail_min))
        negated = {key: -v for key, v in form.items()}
        label = f"{tail.kind} tail n>={tail.tail_grade}"
        b.at_least(negated, -tail.observed, ConstraintGroup.PHOTON_TAIL, label)
    identities = _grade_identities(d, range(d.max_ideal_grade + 1))
    for i in range(d.n_alice):
        for m in d.measurement_indices:
            op = d.bob_ops[m]
            # M^(<=G) + I - I^(<=G) - M >= 0
            form = b.chi(i, 0, i, 0)
            _add(form, b.chi(i, 0, i, m), -1.0)
            for x, c in _projected(b, op.operator.matrix, "upper", op.name).items():
                _add(form, b.chi(i, 0, i, x, c))
            for x in identities:
                _add(form, b.chi(i, 0, i, x, -1.0))
            b.at_least(form, 0.0, ConstraintGroup.PHOTON_TAIL, f"{op.name}<={op.name}^(<=G)+I^(>G)")
    for i in range(d.n_alice):
        form = b.chi(i, 0, i, 0)
        for x in identities:
            _add(form, b.chi(i, 0, i, x, -1.0))
        b.at_least(form, 0.0, ConstraintGroup.PHOTON_TAIL, "I>=I^(<=G)")


def compile_problem(
    dictionary: OperatorDictionary,
    observed: ObservedStatistics,
    tails: Sequence[TailInequality] = (),
    *,
    relations: RelationTables | None = None,
) -> EVMProblem:
    """Compile observations, operator relations and photon tails into an EVM problem.

    Args:
        dictionary: Operator lists and POVM.
        observed: Statistics over the full outcome alphabet of the same scheme.
        tails: Tail inequalities from ``photon_tail_bounds``.
        relations: Precomputed relation tables, derived from ``dictionary``
            when omitted.

    Returns:
        EVMProblem: Problem with constraint ledger and dropped-block report.

    Raises:
        DetectorModelError: If the statistics belong to another scheme.
    """
    if observed.scheme is not dictionary.scheme.scheme or observed.squashed:
        raise DetectorModelError("Statistics do not match the dictionary's scheme.")
    b = _Builder(dictionary, relations or relation_tables(dictionary))
    _observation(b, observed)
    _alice_cross(b, observed)
    _operator_relations(b)
    _commutation(b)
    _realness(b)
    _projection(b)
    _relation_inequalities(b)
    _photon_tails(b, tails, observed.scheme)
    return b.build(tuple(tails))
