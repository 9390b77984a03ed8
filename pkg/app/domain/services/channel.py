from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, pi, sqrt

import numpy as np
import numpy.typing as npt
from scipy.special import beta

from app.domain.exceptions import FockSpaceError, ValueObjectError
from app.domain.services.evm import EVMProblem, LinearConstraint
from app.domain.services.fockspace import Occupation, embed_block, pattern_indices
from app.domain.services.photon_bounds import alice_projector
from app.domain.services.povm import outcomes_for_clicks, pattern_block
from app.domain.services.verdicts import FeasibilityVerdict, MarginSolver, verify
from app.domain.value_objects import (
    AliceOutcome,
    ChannelParams,
    ConstraintGroup,
    DetectorModel,
    FockSpace,
    ObservedStatistics,
    Outcome,
    Relation,
    Scheme,
)
from app.domain.value_objects.constants import ZERO_SNAP

_S = 1 / sqrt(2)


@dataclass(frozen=True, eq=False)
class ResendState:
    """Randomly polarized n-photon state in one spatial mode.

    ``density`` is indexed by |n_H, n - n_H> with n_H descending, the order
    of ``pattern_indices`` within a spatial mode.
    """

    n: int
    density: npt.NDArray[np.float64] = field(repr=False)

    def embed(self, space: FockSpace, spatial_mode: int) -> npt.NDArray[np.complex128]:
        """Place the state on ``spatial_mode`` of ``space``, vacuum elsewhere."""
        pattern = tuple(
            self.n if s == spatial_mode else 0 for s in range(space.mode_set.spatial_mode_count)
        )
        return embed_block(space, pattern_indices(space, pattern), self.density).matrix


def _angular_moment(a: int, b: int) -> float:
    """(1 / 2 pi) * integral over [0, 2 pi] of cos^a sin^b."""
    if a % 2 or b % 2:
        return 0.0
    return float(beta((a + 1) / 2, (b + 1) / 2) / pi)


@lru_cache(maxsize=64)
def resend_density(n: int) -> ResendState:
    """Average of (cos t a_H^+ + sin t a_V^+)^n |0> over the polarization angle t.

    Raises:
        ValueObjectError: If ``n`` < 1.
    """
    if n < 1:
        raise ValueObjectError(f"A resend state needs at least one photon, got {n}.")
    size = n + 1
    rho = np.zeros((size, size))
    for row in range(size):
        k = n - row
        for col in range(size):
            kp = n - col
            amp = sqrt(comb(n, k) * comb(n, kp))
            rho[row, col] = amp * _angular_moment(k + kp, 2 * n - k - kp)
    rho /= np.trace(rho)
    rho.setflags(write=False)
    return ResendState(n, rho)


def _signal_state(omega: float) -> npt.NDArray[np.float64]:
    """Depolarized (|HH> + |VV>)/sqrt(2) on Alice's qubit (x) one photon's polarization."""
    phi = np.array([1.0, 0.0, 0.0, 1.0]) * _S
    return (1 - omega) * np.outer(phi, phi) + omega * np.eye(4) / 4


def _unit(spatial: int, s: int, n: int) -> Occupation:
    return tuple(n if k == s else 0 for k in range(spatial))


def _alice_weight(x: AliceOutcome) -> npt.NDArray[np.float64]:
    return 0.5 * alice_projector(x)


def _bright_outcomes(model: DetectorModel, spatial_mode: int) -> tuple[Outcome, ...]:
    """Outcomes of an infinitely bright pulse: every detector with eta > 0 clicks."""
    clicks = frozenset(k for k, eta in enumerate(model.efficiencies[spatial_mode]) if eta > 0)
    return outcomes_for_clicks(model.scheme.scheme, clicks)


def simulate_statistics(params: ChannelParams, model: DetectorModel) -> ObservedStatistics:
    """Exact p(x, y) of the toy channel.

    rho_AB = p (I/2 (x) avg_s rho_n^(s))
             + (1 - p) [r I/2 (x) |vac><vac| + (1 - r) avg_s D_omega(|Phi_s><Phi_s|)]

    Every branch lives on a single spatial occupation pattern, so the traces
    are taken block by block with ``pattern_block`` and never need a
    truncated space. Active-scheme probabilities are conditional on Bob's
    basis.
    """
    scheme = model.scheme
    spatial = scheme.spatial_mode_count
    p, r = params.multi_photon, params.loss
    signal = _signal_state(params.omega)
    resend = None if params.resend_is_infinite else resend_density(params.n_resend or 1)
    probs: dict[tuple[AliceOutcome, Outcome], float] = {}
    for y in scheme.outcomes:
        vac = float(pattern_block(model, y, (0,) * spatial)[0, 0])
        one = [pattern_block(model, y, _unit(spatial, s, 1)) for s in range(spatial)]
        if resend is not None:
            patterns = (_unit(spatial, s, resend.n) for s in range(spatial))
            blocks = (pattern_block(model, y, q) for q in patterns)
            many = [float(np.trace(resend.density @ b)) for b in blocks]
        else:
            many = [float(y in _bright_outcomes(model, s)) for s in range(spatial)]
        # Alice's marginal is I/2 in the resend and vacuum branches: Tr(I/2 |x><x|/2) = 1/4.
        uncorrelated = 0.25 * (p * sum(many) / spatial + (1 - p) * r * vac)
        for x in AliceOutcome:
            a = _alice_weight(x)
            single = sum(float(np.trace(signal @ np.kron(a, b))) for b in one) / spatial
            value = uncorrelated + (1 - p) * (1 - r) * single
            probs[(x, y)] = 0.0 if abs(value) < ZERO_SNAP else value
    return ObservedStatistics(scheme.scheme, probs)


def channel_state(params: ChannelParams, space: FockSpace) -> npt.NDArray[np.complex128]:
    """Joint density matrix of the toy channel on Alice's qubit (x) ``space``.

    Raises:
        FockSpaceError: If the resend photon number is infinite or above the cutoff.
    """
    if params.resend_is_infinite and params.multi_photon > 0:
        raise FockSpaceError("The infinite-photon resend has no finite density matrix.")
    n = params.n_resend or 1
    if params.multi_photon > 0 and n > space.cutoff:
        raise FockSpaceError(f"Resending {n} photons needs cutoff >= {n}.")
    spatial = space.mode_set.spatial_mode_count
    d = space.dim
    eye_a = np.eye(2) / 2
    rho = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    vac = np.zeros((d, d))
    vac[space.vacuum_index(), space.vacuum_index()] = 1.0
    rho += (1 - params.multi_photon) * params.loss * np.kron(eye_a, vac)
    signal = _signal_state(params.omega).reshape(2, 2, 2, 2)
    for s in range(spatial):
        idx = pattern_indices(space, _unit(spatial, s, 1))
        block = np.zeros((2, d, 2, d))
        block[np.ix_(np.arange(2), idx, np.arange(2), idx)] = signal
        weight = (1 - params.multi_photon) * (1 - params.loss) / spatial
        rho += weight * block.reshape(2 * d, 2 * d)
        if params.multi_photon > 0:
            resend = resend_density(n).embed(space, s)
            rho += params.multi_photon / spatial * np.kron(eye_a, resend)
    return rho


def squash_statistics(observed: ObservedStatistics) -> ObservedStatistics:
    """Split double clicks evenly between the basis's single clicks; cross clicks become no-clicks.

    Raises:
        ValueObjectError: If the statistics are already squashed.
    """
    if observed.squashed:
        raise ValueObjectError("Statistics are already squashed.")
    probs: dict[tuple[AliceOutcome, Outcome], float] = {}
    for x in AliceOutcome:
        hv = observed.p(x, Outcome.HV)
        da = observed.p(x, Outcome.DA)
        probs[(x, Outcome.H)] = observed.p(x, Outcome.H) + hv / 2
        probs[(x, Outcome.V)] = observed.p(x, Outcome.V) + hv / 2
        probs[(x, Outcome.D)] = observed.p(x, Outcome.D) + da / 2
        probs[(x, Outcome.A)] = observed.p(x, Outcome.A) + da / 2
        if observed.scheme is Scheme.ACTIVE:
            probs[(x, Outcome.NONE_HV)] = observed.p(x, Outcome.NONE_HV)
            probs[(x, Outcome.NONE_DA)] = observed.p(x, Outcome.NONE_DA)
        else:
            probs[(x, Outcome.NONE)] = observed.p(x, Outcome.NONE) + observed.p(x, Outcome.CC)
    return ObservedStatistics(observed.scheme, probs, squashed=True)


def qutrit_elements(scheme: Scheme) -> dict[Outcome, npt.NDArray[np.float64]]:
    """Perfect-efficiency qutrit POVM in the basis (vacuum, H, V)."""
    states = {
        Outcome.H: np.array([0.0, 1.0, 0.0]),
        Outcome.V: np.array([0.0, 0.0, 1.0]),
        Outcome.D: np.array([0.0, _S, _S]),
        Outcome.A: np.array([0.0, _S, -_S]),
    }
    vac = np.diag([1.0, 0.0, 0.0])
    if scheme is Scheme.ACTIVE:
        out = {y: np.outer(v, v) for y, v in states.items()}
        out[Outcome.NONE_HV] = vac
        out[Outcome.NONE_DA] = vac
        return out
    out = {y: 0.5 * np.outer(v, v) for y, v in states.items()}
    out[Outcome.NONE] = vac
    return out


def squashed_problem(squashed: ObservedStatistics) -> EVMProblem:
    """State-level feasibility problem for Bob modeled as an ideal qutrit.

    The unknowns are the upper-triangle entries of a real 6 x 6 density
    matrix on Alice's qubit (x) the qutrit.

    Raises:
        ValueObjectError: If the statistics are not squashed.
    """
    if not squashed.squashed:
        raise ValueObjectError("Qutrit verification needs squashed statistics.")
    dim = 6
    entries = tuple((r, c) for r in range(dim) for c in range(r, dim))
    elements = qutrit_elements(squashed.scheme)
    rows: list[LinearConstraint] = []
    seen: set[tuple] = set()
    statements = 0
    for x in AliceOutcome:
        for y in squashed.outcomes:
            op = np.kron(_alice_weight(x), elements[y])
            terms = {
                e: float(op[r, c] if r == c else 2 * op[r, c])
                for e, (r, c) in enumerate(entries)
                if abs(op[r, c]) >= ZERO_SNAP
            }
            statements += 1
            rhs = squashed.p(x, y)
            key = (tuple(sorted((e, round(v, 12)) for e, v in terms.items())), round(rhs, 12))
            if key in seen:
                continue
            seen.add(key)
            rows.append(
                LinearConstraint(
                    terms, Relation.EQ, rhs, ConstraintGroup.OBSERVATION, f"p({x},{y})"
                )
            )
    return EVMProblem(
        dictionary=None,
        split=(2, 3),
        entries=entries,
        imaginary=(False,) * len(entries),
        eliminated=frozenset(),
        equalities=tuple(rows),
        inequalities=(),
        ledger={ConstraintGroup.OBSERVATION: statements},
    )


def verify_squashed(squashed: ObservedStatistics, solver: MarginSolver) -> FeasibilityVerdict:
    return verify(squashed_problem(squashed), solver)
