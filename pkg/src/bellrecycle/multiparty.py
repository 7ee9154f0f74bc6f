"""Sequential chains with many observers per side.

`chain_chsh` evaluates the CHSH value seen by an arbitrary observer pair
after the upstream observers' ensemble transfers have acted.  The multi-Bob
scheduler plays one projective Alice against a line of Bobs who share a
fixed measurement layout and pick their strengths greedily; the multi-pair
construction then lifts any feasible schedule to M Alices x N Bobs on M
independent qubit pairs using trivial (identity) observables, which leave
the other pairs undisturbed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import MeasurementPair, chsh_value
from .errors import ConstraintViolation, Infeasible, IndexOutOfRange, NotNonlocal
from .instruments import SQUARE_ROOT, MeasurementKind, apply_local, setting_channel
from .observables import make_observable, projective, trivial
from .states import TwoQubitState, add_isotropic_noise, make_state

_BISECTION_TOL = 1e-9


@dataclass(frozen=True)
class ObserverPlan:
    """One setting pair per observer on a given side, plus the instrument."""

    pairs: tuple[MeasurementPair, ...]
    kind: MeasurementKind = SQUARE_ROOT

    def __len__(self) -> int:
        return len(self.pairs)


def chain_chsh(
    state: TwoQubitState,
    alice_plan: ObserverPlan,
    bob_plan: ObserverPlan,
    m: int,
    n: int,
) -> float:
    """CHSH between the m-th Alice and n-th Bob (1-based indices).

    The transfers of Alices 1..m-1 and Bobs 1..n-1 are applied to the state
    first; the pair (m, n) then measures.
    """
    if not 1 <= m <= len(alice_plan):
        raise IndexOutOfRange(f"alice index {m} outside 1..{len(alice_plan)}")
    if not 1 <= n <= len(bob_plan):
        raise IndexOutOfRange(f"bob index {n} outside 1..{len(bob_plan)}")
    current = state
    for pair in alice_plan.pairs[: m - 1]:
        K = setting_channel(pair.first, pair.second, alice_plan.kind)
        current = apply_local(current, "alice", K)
    for pair in bob_plan.pairs[: n - 1]:
        L = setting_channel(pair.first, pair.second, bob_plan.kind)
        current = apply_local(current, "bob", L)
    return chsh_value(current, alice_plan.pairs[m - 1], bob_plan.pairs[n - 1])


@dataclass(frozen=True)
class MultiBobSchedule:
    """A feasible one-Alice/N-Bob strength schedule on a fixed layout."""

    state: TwoQubitState
    alice: MeasurementPair
    bob_directions: tuple[np.ndarray, np.ndarray]
    bob_strengths: tuple[float, ...]
    chsh_values: tuple[float, ...]
    margin: float

    def __post_init__(self):
        for d in self.bob_directions:
            d.setflags(write=False)

    def bob_plan(self, strengths=None) -> ObserverPlan:
        """Observer plan realising the schedule (optionally reweighted)."""
        y, yp = self.bob_directions
        strengths = self.bob_strengths if strengths is None else strengths
        pairs = tuple(
            MeasurementPair(make_observable(0.0, s, y), make_observable(0.0, s, yp))
            for s in strengths
        )
        return ObserverPlan(pairs=pairs)


def _schedule_chsh(state: TwoQubitState, alice: MeasurementPair,
                   y: np.ndarray, yp: np.ndarray, strength: float) -> float:
    bob = MeasurementPair(make_observable(0.0, strength, y), make_observable(0.0, strength, yp))
    return chsh_value(state, alice, bob)


def plan_multibob(T, n_bobs: int, margin: float = 0.05) -> MultiBobSchedule:
    """Greedy strength schedule for one Alice and `n_bobs` sequential Bobs.

    Alice measures projectively along the two principal directions of T; all
    Bobs share the equal-strength unbiased pair along the CHSH-optimal
    directions of the initial state.  Every Bob before the last gets the
    smallest strength whose CHSH value (given the upstream transfers) reaches
    2 + margin, found by bisection; the last Bob measures at full strength.
    Raises Infeasible, naming the first observer that cannot exceed 2.

    Note: on a singlet this layout supports at most two Bobs.  Once the
    first two Bobs pin their CHSH values above 2, the product of their
    transverse retention factors (1 + R_k)/2 is below 0.666, while a third
    violation would need it above 1/sqrt(2) ~ 0.707; so a third Bob cannot
    reach 2 at any strength, for any margin.
    """
    T = np.asarray(T, dtype=float).reshape(3, 3)
    if n_bobs < 1:
        raise ConstraintViolation(f"n_bobs must be >= 1, got {n_bobs}")
    if margin <= 0.0:
        raise ConstraintViolation(f"margin must be positive, got {margin}")
    U, sv, Vt = np.linalg.svd(T)
    if sv[0] > 1.0 + 1e-9:
        raise ConstraintViolation(f"largest singular value of T is {sv[0]} > 1")
    alice = MeasurementPair(projective(U[:, 0]), projective(U[:, 1]))
    chi = math.atan2(sv[1], sv[0])
    y = math.cos(chi) * Vt[0] + math.sin(chi) * Vt[1]
    yp = math.cos(chi) * Vt[0] - math.sin(chi) * Vt[1]
    y /= np.linalg.norm(y)
    yp /= np.linalg.norm(yp)

    # the planner works at the correlation-matrix level: any contraction is
    # accepted (the chain algebra never needs positivity of the full state)
    initial = make_state(np.zeros(3), np.zeros(3), T, check=False)
    state = initial
    target = 2.0 + margin
    strengths: list[float] = []
    values: list[float] = []
    for n in range(1, n_bobs + 1):
        s_full = _schedule_chsh(state, alice, y, yp, 1.0)
        if n == n_bobs or s_full < target:
            strength, value = 1.0, s_full
        else:
            lo_s, hi_s = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo_s + hi_s)
                if _schedule_chsh(state, alice, y, yp, mid) < target:
                    lo_s = mid
                else:
                    hi_s = mid
                if hi_s - lo_s <= _BISECTION_TOL:
                    break
            strength = hi_s
            value = _schedule_chsh(state, alice, y, yp, strength)
        if value <= 2.0:
            raise Infeasible(
                f"observer B{n} cannot exceed the CHSH bound (best {value:.6f})",
                failing_n=n,
            )
        strengths.append(strength)
        values.append(value)
        pair = MeasurementPair(
            make_observable(0.0, strength, y), make_observable(0.0, strength, yp)
        )
        state = apply_local(state, "bob", setting_channel(pair.first, pair.second))
    return MultiBobSchedule(
        state=initial,
        alice=alice,
        bob_directions=(y, yp),
        bob_strengths=tuple(strengths),
        chsh_values=tuple(values),
        margin=margin,
    )


def rerun_schedule(schedule: MultiBobSchedule, state: TwoQubitState | None = None) -> tuple[float, ...]:
    """Replay the schedule's fixed layout and strengths on a (new) state."""
    current = schedule.state if state is None else state
    y, yp = schedule.bob_directions
    values = []
    for strength in schedule.bob_strengths:
        values.append(_schedule_chsh(current, schedule.alice, y, yp, strength))
        pair = MeasurementPair(
            make_observable(0.0, strength, y), make_observable(0.0, strength, yp)
        )
        current = apply_local(current, "bob", setting_channel(pair.first, pair.second))
    return tuple(values)


@dataclass(frozen=True)
class NoiseRobustness:
    s_min: float
    p_min: float


def noise_robustness(schedule: MultiBobSchedule) -> NoiseRobustness:
    """Isotropic-noise tolerance of a feasible schedule.

    For unbiased observables every CHSH value scales linearly with the noise
    weight p, so all of them stay above 2 exactly for p > p_min = 2 / S_min.
    """
    if any(v <= 2.0 for v in schedule.chsh_values):
        raise NotNonlocal("schedule contains a CHSH value at or below 2")
    s_min = min(schedule.chsh_values)
    return NoiseRobustness(s_min=s_min, p_min=2.0 / s_min)


def verify_noise_robustness(schedule: MultiBobSchedule, p: float) -> tuple[float, ...]:
    """Replay the schedule on the isotropically noisy state with weight p."""
    noisy = add_isotropic_noise(schedule.state, p)
    return rerun_schedule(schedule, noisy)


def multipair_scenario(m_alices: int, n_bobs: int, base_schedule: MultiBobSchedule) -> np.ndarray:
    """CHSH matrix S_mn for M Alices and N Bobs over M independent pairs.

    On pair q, Alice m measures the base Alice pair when m == q and the
    trivial identity observable otherwise; Bobs run the base schedule on all
    pairs.  S_mn is the best CHSH over pairs, which equals the base value
    S(A, B_n) for every m because identity measurements do not disturb.
    """
    if n_bobs > len(base_schedule.bob_strengths):
        raise ConstraintViolation(
            f"base schedule covers {len(base_schedule.bob_strengths)} Bobs, need {n_bobs}"
        )
    if any(v <= 2.0 for v in base_schedule.chsh_values[:n_bobs]):
        raise Infeasible(
            "base schedule is not feasible for the requested number of Bobs",
            failing_n=int(np.argmax(np.array(base_schedule.chsh_values[:n_bobs]) <= 2.0)) + 1,
        )
    identity_pair = MeasurementPair(trivial(1.0), trivial(1.0))
    bob_plan = base_schedule.bob_plan(base_schedule.bob_strengths[:n_bobs])
    result = np.full((m_alices, n_bobs), -np.inf)
    for q in range(m_alices):
        alice_pairs = tuple(
            base_schedule.alice if m == q else identity_pair for m in range(m_alices)
        )
        alice_plan = ObserverPlan(pairs=alice_pairs)
        for m in range(1, m_alices + 1):
            for n in range(1, n_bobs + 1):
                value = chain_chsh(base_schedule.state, alice_plan, bob_plan, m, n)
                result[m - 1, n - 1] = max(result[m - 1, n - 1], value)
    return result
