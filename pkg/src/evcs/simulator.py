"""Drives a policy over an instance slot by slot and scores the outcome."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from .dynamics import RunVerdict, Schedule, SimState, initial_state, laxity, step
from .feasibility import DEMAND_TOL
from .model import ContractError, Instance
from .schedulers import get_policy


class PolicyContractError(ContractError):
    """A policy returned rates violating its stated invariants (a bug signal)."""


def _check_decision(decision, state: SimState, instance: Instance, t: int) -> dict[str, float]:
    p_limit = instance.power.at(t)
    power_tol = 1e-9 * max(1.0, p_limit)
    total = 0.0
    cleaned = {}
    for sid, r in decision.rates.items():
        s = instance.session(sid)
        if not (s.arrival <= t < s.departure):
            raise PolicyContractError(f"rate for inactive session {sid} at slot {t}")
        cap = min(s.max_rate, state.remaining[sid])
        tol = 1e-9 * max(1.0, s.max_rate)
        if r < -tol or r > cap + tol:
            raise PolicyContractError(f"rate {r} outside [0, {cap}] for {sid} at slot {t}")
        cleaned[sid] = min(max(r, 0.0), cap)
        total += cleaned[sid]
    if total > p_limit + power_tol:
        raise PolicyContractError(f"slot {t} total {total} exceeds limit {p_limit}")
    return cleaned


def simulate(instance: Instance, policy_name: str) -> tuple[Schedule, RunVerdict]:
    """Run one policy over the full horizon; deterministic for fixed inputs."""
    policy = get_policy(policy_name)
    horizon = instance.horizon
    state = initial_state(instance)
    rows = {s.id: [0.0] * horizon for s in instance.sessions}
    min_lax = math.inf
    for t in range(horizon):
        for s in instance.sessions:
            if s.arrival <= t:
                min_lax = min(min_lax, laxity(s, t, state.remaining[s.id]))
        decision = policy(state, instance, t)
        rates = _check_decision(decision, state, instance, t)
        for sid, r in rates.items():
            rows[sid][t] = r
        state = step(state, rates, instance)
    for s in instance.sessions:
        min_lax = min(min_lax, laxity(s, horizon, state.remaining[s.id]))
    schedule = Schedule(horizon, {sid: tuple(row) for sid, row in rows.items()})
    unmet = {s.id: state.remaining[s.id] for s in instance.sessions}
    feasible = all(unmet[s.id] <= DEMAND_TOL * s.energy for s in instance.sessions)
    verdict = RunVerdict(
        feasible=feasible,
        min_laxity=min_lax,
        unmet_energy=unmet,
        oscillation=schedule.total_variation(),
        switch_count=schedule.switch_count(),
    )
    return schedule, verdict


def worker_count() -> int:
    """Worker cap from EVCS_THREADS; 1 (serial) unless the variable is set."""
    raw = os.environ.get("EVCS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _feasible_under(policy_name: str, instance: Instance) -> bool:
    return simulate(instance, policy_name)[1].feasible


def run_feasibility(instances, policy_name: str) -> list[bool]:
    """Per-instance feasibility flags, fanned out across workers when allowed."""
    workers = worker_count()
    if workers > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(partial(_feasible_under, policy_name), instances))
    return [_feasible_under(policy_name, inst) for inst in instances]


def success_rate(instances, policy_name: str) -> float:
    """Fraction of instances the policy completes feasibly."""
    if not instances:
        warnings.warn("success_rate over an empty corpus is vacuously 1.0")
        return 1.0
    flags = run_feasibility(instances, policy_name)
    return sum(flags) / len(flags)


def instance_metrics(instance: Instance) -> tuple[float, float]:
    """(max sojourn ratio, min normalized initial laxity) of an instance."""
    sojourns = [s.sojourn for s in instance.sessions]
    ratio = max(sojourns) / min(sojourns)
    norm_lax = min(laxity(s, s.arrival, s.energy) / s.sojourn for s in instance.sessions)
    return ratio, norm_lax


def binned_success_rates(instances, flags, metric_index: int, bins: int):
    """Equal-count bins over the sorted metric; (lo, hi, count, rate) per bin."""
    values = [instance_metrics(inst)[metric_index] for inst in instances]
    order = sorted(range(len(values)), key=lambda k: values[k])
    out = []
    for b in range(bins):
        chunk = order[b * len(order) // bins:(b + 1) * len(order) // bins]
        if not chunk:
            continue
        rate = sum(flags[j] for j in chunk) / len(chunk)
        out.append((values[chunk[0]], values[chunk[-1]], len(chunk), rate))
    return out


def separation_witness(instances, feasible_policy: str = "sllf",
                       infeasible_policy: str = "llf"):
    """First instance one policy completes and the other does not, else None."""
    for inst in instances:
        if simulate(inst, feasible_policy)[1].feasible and \
                not simulate(inst, infeasible_policy)[1].feasible:
            return inst
    return None
