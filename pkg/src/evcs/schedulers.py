"""The six online rate-allocation policies.

Every policy maps (state, instance, t) to this slot's rates using only the
sessions present at t; future arrivals are never consulted.  The smoothed
least-laxity-first policy solves its concave program in closed form: each
rate is a laxity-threshold clamp, with the threshold found by bisection so
the available power is exactly saturated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dynamics import SimState, laxity
from .model import ChargingSession, ContractError, Instance
from .netflow import FlowGraph

#: remaining energy below this fraction of the original demand counts as done
FINISHED_EPS = 1e-12

#: maximum bisection steps for the sLLF threshold
MAX_BISECT = 80


@dataclass
class RateDecision:
    """This slot's rates, the sLLF water-level (when applicable), and solver stats."""

    rates: dict[str, float]
    threshold: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _chargeable(state: SimState, instance: Instance, t: int) -> list[ChargingSession]:
    """Active sessions with unfinished demand, in instance order."""
    if state.t != t:
        raise ContractError(f"state at slot {state.t}, policy queried for {t}")
    out = []
    for s in instance.sessions:
        if s.arrival <= t < s.departure:
            if state.remaining[s.id] > FINISHED_EPS * max(1.0, s.energy):
                out.append(s)
    return out


def _sllf_fill(level: float, lax, caps, rbars) -> list[float]:
    return [
        min(max(rb * (level - lx + 1.0), 0.0), cap)
        for lx, cap, rb in zip(lax, caps, rbars)
    ]


def sllf_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Smoothed least-laxity-first: equalize next-slot laxities up to the caps."""
    evs = _chargeable(state, instance, t)
    if not evs:
        return RateDecision({}, threshold=math.inf)
    p_limit = instance.power.at(t)
    lax = [laxity(s, t, state.remaining[s.id]) for s in evs]
    caps = [min(s.max_rate, state.remaining[s.id]) for s in evs]
    rbars = [s.max_rate for s in evs]
    if sum(caps) <= p_limit:
        # under-loaded: every EV charges as fast as it can, no threshold needed
        return RateDecision({s.id: c for s, c in zip(evs, caps)}, threshold=math.inf,
                            diagnostics={"bisect_iterations": 0})
    tol = 1e-9 * max(1.0, p_limit)
    lo, hi = min(lax) - 1.0, max(lax) + 1.0
    level = lo
    iters = 0
    for _ in range(MAX_BISECT):
        iters += 1
        level = 0.5 * (lo + hi)
        total = sum(_sllf_fill(level, lax, caps, rbars))
        if abs(total - p_limit) <= tol:
            break
        if total < p_limit:
            lo = level
        else:
            hi = level
    rates = _sllf_fill(level, lax, caps, rbars)
    return RateDecision({s.id: r for s, r in zip(evs, rates)}, threshold=level,
                        diagnostics={"bisect_iterations": iters})


def _greedy_fill(evs, state, p_limit, key) -> dict[str, float]:
    rates = {}
    residual = p_limit
    for s in sorted(evs, key=key):
        r = min(s.max_rate, state.remaining[s.id], residual)
        r = max(r, 0.0)
        rates[s.id] = r
        residual -= r
    return rates


def llf_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Classic least-laxity-first: fill EVs in increasing laxity order."""
    evs = _chargeable(state, instance, t)
    key = lambda s: (laxity(s, t, state.remaining[s.id]), s.arrival, s.id)
    return RateDecision(_greedy_fill(evs, state, instance.power.at(t), key))


def edf_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Earliest-deadline-first: fill EVs in increasing departure order."""
    evs = _chargeable(state, instance, t)
    key = lambda s: (s.departure, s.arrival, s.id)
    return RateDecision(_greedy_fill(evs, state, instance.power.at(t), key))


def _waterfill(evs, state, p_limit, weight) -> dict[str, float]:
    """Iterative capped sharing; each round saturates at least one EV."""
    alloc = {s.id: 0.0 for s in evs}
    caps = {s.id: min(s.max_rate, state.remaining[s.id]) for s in evs}
    residual = p_limit
    open_ids = [s.id for s in evs if caps[s.id] > 0.0]
    rounds = 0
    while residual > 1e-12 and open_ids:
        rounds += 1
        assert rounds <= len(evs) + 1, "sharing loop failed to saturate"
        weights = {sid: weight(sid) for sid in open_ids}
        wsum = sum(weights.values())
        if wsum <= 0.0:
            break
        spent = 0.0
        still_open = []
        for sid in open_ids:
            share = residual * weights[sid] / wsum
            add = min(share, caps[sid] - alloc[sid])
            alloc[sid] += add
            spent += add
            if caps[sid] - alloc[sid] > 1e-15 * max(1.0, caps[sid]):
                still_open.append(sid)
        residual -= spent
        if spent <= 1e-15 * max(1.0, p_limit):
            break
        open_ids = still_open
    return alloc


def es_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Equal share: repeatedly split the leftover power evenly."""
    evs = _chargeable(state, instance, t)
    return RateDecision(_waterfill(evs, state, instance.power.at(t), lambda sid: 1.0))


def rep_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Remaining-energy-proportional sharing of the leftover power."""
    evs = _chargeable(state, instance, t)
    return RateDecision(
        _waterfill(evs, state, instance.power.at(t), lambda sid: state.remaining[sid]))


def olp_rates(state: SimState, instance: Instance, t: int) -> RateDecision:
    """Front-load the residual problem: earliest-slot-first minimum-cost flow.

    The residual transportation network (current EVs, remaining demands,
    remaining horizon) has per-unit cost equal to the slot index on the
    slot -> sink arcs, so every augmenting path's cost is the index of the
    slot it exits through.  Opening the sink arcs one slot at a time and
    running blocking flow to exhaustion therefore performs successive
    shortest-path augmentation exactly.  If the residual problem cannot ship
    all remaining demand, this slot falls back to the sLLF rates.
    """
    evs = _chargeable(state, instance, t)
    if not evs:
        return RateDecision({})
    horizon = instance.horizon
    source, sink = 0, 1
    g = FlowGraph(2 + len(evs) + (horizon - t))
    slot_node = lambda tau: 2 + len(evs) + (tau - t)
    demand = 0.0
    column_arcs: dict[str, int] = {}
    for k, s in enumerate(evs):
        rem = state.remaining[s.id]
        demand += rem
        g.add_edge(source, 2 + k, rem)
        for tau in range(t, min(s.departure, horizon)):
            idx = g.add_edge(2 + k, slot_node(tau), s.max_rate)
            if tau == t:
                column_arcs[s.id] = idx
    sink_arcs = [g.add_edge(slot_node(tau), sink, 0.0) for tau in range(t, horizon)]
    shipped = 0.0
    for tau, idx in zip(range(t, horizon), sink_arcs):
        g.raise_capacity(idx, instance.power.at(tau))
        shipped += g.max_flow(source, sink)
    if shipped < demand - 1e-9 * max(1.0, demand):
        fallback = sllf_rates(state, instance, t)
        fallback.diagnostics["olp_fallback"] = True
        return fallback
    rates = {s.id: (g.flow_on(column_arcs[s.id]) if s.id in column_arcs else 0.0)
             for s in evs}
    return RateDecision(rates, diagnostics={"olp_shipped": shipped})


POLICIES = {
    "sllf": sllf_rates,
    "llf": llf_rates,
    "edf": edf_rates,
    "es": es_rates,
    "rep": rep_rates,
    "olp": olp_rates,
}


def get_policy(name: str):
    try:
        return POLICIES[name]
    except KeyError:
        raise KeyError(f"unknown policy {name!r}; valid: {', '.join(sorted(POLICIES))}")
