"""M/G/inf birth-death engine: Poisson births, generally distributed lifetimes.

The closed-form steady state (Poisson with mean ``lam * E[G]``) lives here too,
so simulated traces can be checked against it.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

from .distributions import (
    LifetimeDistribution,
    RandomSource,
    mean_lifetime,
    sample_interarrival,
    sample_lifetime,
)

BIRTH = "birth"
DEATH = "death"


@dataclass(frozen=True)
class Event:
    kind: str
    time: float
    individual_id: int


@dataclass
class EventSchedule:
    """Next birth time plus a min-heap of pending ``(death_time, id)`` pairs."""

    next_birth_time: float = math.inf
    pending_deaths: List[Tuple[float, int]] = field(default_factory=list)
    _ids: "itertools.count" = field(default_factory=itertools.count, repr=False)

    def schedule_death(self, death_time: float, individual_id: int) -> None:
        heapq.heappush(self.pending_deaths, (death_time, individual_id))

    def next_death_time(self) -> float:
        return self.pending_deaths[0][0] if self.pending_deaths else math.inf

    def new_id(self) -> int:
        return next(self._ids)

    def __len__(self):
        return len(self.pending_deaths)


def start_schedule(lam: float, rng: RandomSource, now: float = 0.0) -> EventSchedule:
    sched = EventSchedule()
    sched.next_birth_time = now + sample_interarrival(lam, rng)
    return sched


def advance(
    schedule: EventSchedule,
    now: float,
    lam: float,
    dist: LifetimeDistribution,
    rng: RandomSource,
) -> Event:
    """Pop whichever of next birth / earliest death comes first.

    On a birth the newborn's death and the following birth are scheduled.
    Ties go to the death. ``now`` is only used to check monotonicity.
    """
    t_death = schedule.next_death_time()
    t_birth = schedule.next_birth_time
    if math.isinf(t_birth) and math.isinf(t_death):
        raise RuntimeError("schedule is empty: no pending birth or death")
    if t_birth < t_death:
        assert t_birth >= now, "event clock went backwards"
        ident = schedule.new_id()
        schedule.schedule_death(t_birth + sample_lifetime(dist, rng), ident)
        schedule.next_birth_time = t_birth + sample_interarrival(lam, rng)
        return Event(BIRTH, t_birth, ident)
    assert t_death >= now, "event clock went backwards"
    t, ident = heapq.heappop(schedule.pending_deaths)
    return Event(DEATH, t, ident)


@dataclass
class PopulationTrace:
    times: np.ndarray
    counts: np.ndarray
    births: int
    deaths: int


def simulate_population(
    lam: float,
    dist: LifetimeDistribution,
    horizon: float,
    rng: RandomSource,
    initial: int = 0,
) -> PopulationTrace:
    """Run the bare queue and sample N(t) at integer times 0..horizon.

    The count at integer time ``k`` includes every event with time <= k.
    Initial individuals (if any) get lifetimes drawn at t=0.
    """
    sched = start_schedule(lam, rng)
    for _ in range(initial):
        sched.schedule_death(sample_lifetime(dist, rng), sched.new_id())
    n_steps = int(math.floor(horizon))
    counts = np.empty(n_steps + 1, dtype=np.int64)
    pop = initial
    births = deaths = 0
    now = 0.0
    k = 0
    while k <= n_steps:
        t_next = min(sched.next_birth_time, sched.next_death_time())
        while k <= n_steps and k < t_next:
            counts[k] = pop
            k += 1
        if k > n_steps:
            break
        ev = advance(sched, now, lam, dist, rng)
        now = ev.time
        if ev.kind == BIRTH:
            pop += 1
            births += 1
        else:
            pop -= 1
            deaths += 1
    return PopulationTrace(np.arange(n_steps + 1, dtype=float), counts, births, deaths)


def limiting_pmf(lam: float, dist: LifetimeDistribution, i) -> np.ndarray:
    """Steady-state probability of ``i`` individuals (Poisson, computed in log space)."""
    m = lam * mean_lifetime(dist)
    i = np.asarray(i, dtype=float)
    return np.exp(i * math.log(m) - m - gammaln(i + 1.0))


def steady_state_moments(lam: float, dist: LifetimeDistribution) -> Tuple[float, float, float]:
    """``(mean, variance, mean_sojourn)`` of the steady-state population."""
    if not lam > 0:
        raise ValueError(f"birth rate must be > 0, got {lam}")
    g = mean_lifetime(dist)
    return lam * g, lam * g, g


def empirical_pmf(counts, support: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Relative frequency of each integer count; support defaults to min..max observed."""
    counts = np.asarray(counts, dtype=np.int64)
    if support is None:
        support = np.arange(counts.min(), counts.max() + 1)
    else:
        support = np.asarray(support, dtype=np.int64)
    # counts outside a supplied support are dropped, but still count toward the total
    idx = np.searchsorted(support, counts)
    hit = (idx < support.size) & (support[np.minimum(idx, support.size - 1)] == counts)
    freq = np.bincount(idx[hit], minlength=support.size)
    return support, freq / counts.size
