"""Independent feasibility check by exhaustive search on a rate grid.

Each session's per-slot rate is restricted to integer multiples of
max_rate / UNITS and its demand to an exact multiple of that step, so
feasibility on the grid is decidable by enumeration.  A grid-feasible
instance is feasible in the continuous relaxation; the converse can fail
by at most the discretization gap, so tests only assert the one-way
implication against the flow oracle.
"""
import random

import numpy as np

from evcs.model import ChargingSession, ConstantPower, Instance, StepwisePower

UNITS = 64
TOL = 1e-9


def _compositions(total: int, window: list[int], horizon: int) -> np.ndarray:
    """All length-horizon unit vectors supported on `window`, entries <= UNITS,
    summing to `total`; shape (N, horizon)."""
    out = []

    def rec(idx, left, prefix):
        if idx == len(window):
            if left == 0:
                row = [0] * horizon
                for slot, u in zip(window, prefix):
                    row[slot] = u
                out.append(row)
            return
        slots_after = len(window) - idx - 1
        lo = max(0, left - UNITS * slots_after)
        for u in range(lo, min(UNITS, left) + 1):
            rec(idx + 1, left - u, prefix + [u])

    rec(0, total, [])
    return np.array(out, dtype=np.float64) if out else np.zeros((0, horizon))


def _greedy_units(residual: np.ndarray, step: float, window_mask: np.ndarray) -> np.ndarray:
    """Max grid units a single session can draw from `residual` power, per row."""
    units = np.floor((residual + TOL) / step)
    np.clip(units, 0, UNITS, out=units)
    return (units * window_mask).sum(axis=-1)


def grid_feasible(instance: Instance, unit_demands: dict[str, int]) -> bool:
    T = instance.horizon
    power = np.array([instance.power.at(t) for t in range(T)])
    sessions = sorted(instance.sessions, key=lambda s: unit_demands[s.id])
    steps = [s.max_rate / UNITS for s in sessions]
    windows = [list(range(s.arrival, min(s.departure, T))) for s in sessions]
    masks = [np.array([1.0 if s.arrival <= t < s.departure else 0.0 for t in range(T)])
             for s in sessions]
    demands = [unit_demands[s.id] for s in sessions]

    if len(sessions) == 1:
        return _greedy_units(power[None, :], steps[0], masks[0])[0] >= demands[0]

    comps_last = None
    if len(sessions) == 2:
        for vec in _compositions(demands[0], windows[0], T):
            residual = power - vec * steps[0]
            if residual.min() < -TOL:
                continue
            if _greedy_units(residual[None, :], steps[1], masks[1])[0] >= demands[1]:
                return True
        return False

    comps_mid = _compositions(demands[1], windows[1], T)
    for vec in _compositions(demands[0], windows[0], T):
        residual = power - vec * steps[0]
        if residual.min() < -TOL:
            continue
        after_mid = residual[None, :] - comps_mid * steps[1]
        ok = after_mid.min(axis=1) >= -TOL
        if not ok.any():
            continue
        got = _greedy_units(after_mid[ok], steps[2], masks[2])
        if (got >= demands[2]).any():
            return True
    return False


def random_grid_instance(rng: random.Random):
    """Small instance whose demands are exact grid multiples; returns
    (instance, unit demand map)."""
    horizon = rng.randint(1, 3)
    n = rng.randint(1, 3)
    sessions = []
    unit_demands = {}
    for k in range(n):
        arrival = rng.randrange(0, horizon)
        departure = rng.randint(arrival + 1, horizon)
        r_bar = rng.choice([0.25, 0.5, 1.0, 2.0])
        span = departure - arrival
        units = rng.randint(1, min(UNITS * span, 96))
        sid = f"g{k}"
        unit_demands[sid] = units
        sessions.append(ChargingSession(sid, arrival, departure,
                                        units * (r_bar / UNITS), r_bar))
    if rng.random() < 0.5:
        power = ConstantPower(rng.uniform(0.1, 3.0))
    else:
        power = StepwisePower([rng.uniform(0.1, 3.0) for _ in range(horizon)])
    return Instance(tuple(sessions), power, horizon), unit_demands
