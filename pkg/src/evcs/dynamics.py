"""Laxity, per-slot state evolution, and energy accounting over a finished run."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ChargingSession, ContractError, Instance

#: relative tolerance separating contract violations from float noise
RATE_TOL = 1e-9


def laxity(session: ChargingSession, t: int, remaining_energy: float) -> float:
    """Slack before the session becomes unfinishable; +inf before arrival.

    Defined as the clamped time to departure minus the time needed to finish
    at the peak rate.  Always computed from this closed form, never by
    accumulating per-slot increments, so repeated stepping cannot drift.
    """
    if remaining_energy < 0:
        raise ContractError(f"negative remaining energy {remaining_energy}")
    if t < session.arrival:
        return math.inf
    return max(session.departure - t, 0) - remaining_energy / session.max_rate


@dataclass(frozen=True)
class SimState:
    """Simulation state at the start of slot t: remaining energy per session."""

    t: int
    remaining: dict[str, float]

    def laxities(self, instance: Instance) -> dict[str, float]:
        return {s.id: laxity(s, self.t, self.remaining[s.id]) for s in instance.sessions}


def initial_state(instance: Instance) -> SimState:
    return SimState(0, {s.id: s.energy for s in instance.sessions})


def step(state: SimState, rates: dict[str, float], instance: Instance) -> SimState:
    """Apply one slot of charging and advance time; pure state-in/state-out."""
    t = state.t
    p_limit = instance.power.at(t) if t < instance.horizon else 0.0
    power_tol = RATE_TOL * max(1.0, p_limit)
    total = 0.0
    remaining = dict(state.remaining)
    active = {s.id: s for s in instance.sessions if s.arrival <= t < s.departure}
    for sid, r in rates.items():
        if sid not in active:
            if r != 0.0:
                raise ContractError(f"rate {r} for inactive session {sid} at slot {t}")
            continue
        s = active[sid]
        cap = min(s.max_rate, remaining[sid])
        if r < -RATE_TOL * max(1.0, s.max_rate) or r > cap + RATE_TOL * max(1.0, s.max_rate):
            raise ContractError(f"rate {r} outside [0, {cap}] for {sid} at slot {t}")
        r = min(max(r, 0.0), cap)
        remaining[sid] = max(remaining[sid] - r, 0.0)
        total += r
    if total > p_limit + power_tol:
        raise ContractError(f"total rate {total} exceeds power limit {p_limit} at slot {t}")
    return SimState(t + 1, remaining)


@dataclass(frozen=True)
class Schedule:
    """The full rate matrix of one run: per-session rate rows over [0, horizon)."""

    horizon: int
    rates: dict[str, tuple[float, ...]]

    def rate(self, sid: str, t: int) -> float:
        return self.rates[sid][t]

    def slot_total(self, t: int) -> float:
        return sum(row[t] for row in self.rates.values())

    def delivered(self, sid: str) -> float:
        return sum(self.rates[sid])

    def total_variation(self) -> float:
        """Sum over sessions of |r(t+1) - r(t)| between consecutive slots."""
        return sum(
            abs(row[t + 1] - row[t])
            for row in self.rates.values()
            for t in range(self.horizon - 1)
        )

    def switch_count(self, zero_eps: float = 1e-12) -> int:
        """How many times any session's rate crosses between zero and nonzero."""
        count = 0
        for row in self.rates.values():
            for t in range(self.horizon - 1):
                if (abs(row[t]) <= zero_eps) != (abs(row[t + 1]) <= zero_eps):
                    count += 1
        return count


@dataclass(frozen=True)
class RunVerdict:
    """Feasibility outcome of a schedule plus the scalar metrics of a run."""

    feasible: bool
    min_laxity: float
    unmet_energy: dict[str, float]
    oscillation: float
    switch_count: int
    violations: tuple = ()


def energy_delivered(schedule: Schedule, ids: set[str], t1: int, t2: int) -> float:
    """Total energy the schedule supplies to `ids` over slots t1..t2 inclusive."""
    if not 0 <= t1 <= t2 <= schedule.horizon:
        raise ContractError(f"bad interval [{t1}, {t2}] for horizon {schedule.horizon}")
    for sid in ids:
        if sid not in schedule.rates:
            raise KeyError(sid)
    hi = min(t2 + 1, schedule.horizon)
    return sum(sum(schedule.rates[sid][t1:hi]) for sid in ids)
