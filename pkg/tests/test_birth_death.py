import heapq
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from coevonet.birth_death import (
    BIRTH,
    DEATH,
    EventSchedule,
    advance,
    empirical_pmf,
    limiting_pmf,
    simulate_population,
    start_schedule,
    steady_state_moments,
)
from coevonet.distributions import Exponential, Lognormal, PowerLaw, Uniform, make_rng


def test_birth_before_death():
    s = EventSchedule(next_birth_time=3.2)
    s.schedule_death(5.1, 99)
    ev = advance(s, 0.0, 1.0, Exponential(1.0), make_rng(0))
    assert (ev.kind, ev.time) == (BIRTH, 3.2)
    # newborn death and next birth both scheduled after the birth
    assert len(s) == 2
    assert s.next_birth_time > 3.2


def test_death_before_birth():
    s = EventSchedule(next_birth_time=5.1)
    s.schedule_death(3.2, 7)
    ev = advance(s, 0.0, 1.0, Exponential(1.0), make_rng(0))
    assert (ev.kind, ev.time, ev.individual_id) == (DEATH, 3.2, 7)
    assert s.next_birth_time == 5.1


def test_empty_schedule_raises():
    with pytest.raises(RuntimeError):
        advance(EventSchedule(), 0.0, 1.0, Exponential(1.0), make_rng(0))


def test_pending_deaths_pop_minimum():
    s = EventSchedule(next_birth_time=math.inf)
    times = [4.0, 1.5, 9.0, 2.5, 0.5]
    for i, t in enumerate(times):
        s.schedule_death(t, i)
    popped = [advance(s, 0.0, 1.0, Exponential(1.0), make_rng(0)).time for _ in times]
    assert popped == sorted(times)


@given(st.integers(0, 2**32), st.sampled_from([PowerLaw(5, 3), Uniform(1, 4), Exponential(0.5), Lognormal(0, 1)]))
@settings(max_examples=25, deadline=None)
def test_event_stream_monotone_and_conserving(seed, dist):
    rng = make_rng(seed)
    s = start_schedule(2.0, rng)
    now, pop, alive = 0.0, 0, set()
    last_birth = -math.inf
    for _ in range(400):
        ev = advance(s, now, 2.0, dist, rng)
        assert ev.time >= now
        now = ev.time
        if ev.kind == BIRTH:
            assert ev.time > last_birth
            last_birth = ev.time
            alive.add(ev.individual_id)
            pop += 1
        else:
            alive.remove(ev.individual_id)
            pop -= 1
        assert pop == len(alive) == len(s)


def test_trace_conservation():
    tr = simulate_population(3.0, Uniform(10, 20), 500, make_rng(4), initial=7)
    assert tr.counts[-1] == 7 + tr.births - tr.deaths
    assert tr.counts[0] == 7
    assert np.all(tr.counts >= 0)


def test_trace_same_seed_identical():
    a = simulate_population(2.0, PowerLaw(60, 3), 2000, make_rng(11))
    b = simulate_population(2.0, PowerLaw(60, 3), 2000, make_rng(11))
    assert np.array_equal(a.counts, b.counts)


def test_powerlaw_mean_population_near_theory():
    tr = simulate_population(2.0, PowerLaw(60, 3), 10_000, make_rng(0))
    mean = tr.counts[1001:].mean()
    assert abs(mean - 240) / 240 < 0.03


def test_pmf_at_zero():
    m = 2.0 * 120.0
    assert limiting_pmf(2.0, PowerLaw(60, 3), 0) == pytest.approx(math.exp(-m), rel=1e-12)


def test_pmf_normalised():
    total = limiting_pmf(3.0, Exponential(0.02), np.arange(601)).sum()
    assert total >= 1 - 1e-10


def test_pmf_mode():
    i = np.arange(0, 600)
    assert int(i[np.argmax(limiting_pmf(2.0, PowerLaw(60, 3), i))]) in (239, 240)


@pytest.mark.parametrize(
    "lam, dist", [(2, PowerLaw(60, 3)), (3, Uniform(120, 150)), (3, Exponential(0.02)), (5, Lognormal(3, 1.5))]
)
def test_pmf_matches_scipy_poisson(lam, dist):
    i = np.arange(0, 800)
    m = lam * dist.mean()
    assert np.allclose(limiting_pmf(lam, dist, i), poisson.pmf(i, m), rtol=1e-9, atol=1e-300)


def test_moments_uniform():
    assert steady_state_moments(3, Uniform(120, 150)) == pytest.approx((405, 405, 135))


def test_moments_lognormal():
    mean, var, soj = steady_state_moments(5, Lognormal(3, 1.5))
    assert mean == pytest.approx(309.339, abs=1e-3)
    assert var == mean
    assert soj == pytest.approx(61.868, abs=1e-3)


@given(st.sampled_from([PowerLaw(60, 3), Uniform(1, 2), Exponential(0.1), Lognormal(1, 0.5)]))
def test_unit_rate_sojourn_equals_mean(dist):
    mean, _, soj = steady_state_moments(1.0, dist)
    assert soj == pytest.approx(mean)


def test_empirical_pmf_default_support():
    support, freq = empirical_pmf([3, 4, 4, 6])
    assert list(support) == [3, 4, 5, 6]
    assert list(freq) == [0.25, 0.5, 0.0, 0.25]


def test_empirical_pmf_explicit_support_drops_outside():
    support, freq = empirical_pmf([3, 4, 4, 9], support=np.arange(4, 6))
    assert list(freq) == [0.5, 0.0]


def test_heap_is_valid_after_births():
    rng = make_rng(2)
    s = start_schedule(5.0, rng)
    for _ in range(200):
        advance(s, 0.0, 5.0, Lognormal(0, 1), rng)
    h = list(s.pending_deaths)
    heapq.heapify(h)
    assert h[0] == s.pending_deaths[0]
