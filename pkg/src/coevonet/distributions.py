"""Seeded samplers for inter-arrival times and individual lifetimes.

All randomness in the package flows through :func:`make_rng`, which wraps
numpy's counter-based Philox bit generator. Philox output is defined by the
key/counter pair alone, so a given seed replays identically on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Union

import numpy as np

RandomSource = np.random.Generator


def make_rng(seed: int) -> RandomSource:
    """Return a fresh generator for ``seed`` (single owner, never shared)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


@dataclass(frozen=True)
class PowerLaw:
    x_min: float
    alpha: float

    def __post_init__(self):
        if not self.x_min > 0:
            raise ValueError(f"powerlaw x_min must be > 0, got {self.x_min}")
        if not self.alpha > 2:
            raise ValueError(f"powerlaw alpha must be > 2 for a finite mean, got {self.alpha}")

    def ppf(self, u: float) -> float:
        """Inverse CDF: x_min * (1 - u) ** (1 / (1 - alpha))."""
        return self.x_min * (1.0 - u) ** (1.0 / (1.0 - self.alpha))

    def mean(self) -> float:
        return self.x_min * (self.alpha - 1.0) / (self.alpha - 2.0)

    def sample(self, rng: RandomSource) -> float:
        # rng.random() is in [0, 1), so 1 - u never hits zero
        return self.ppf(rng.random())


@dataclass(frozen=True)
class Uniform:
    a: float
    b: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"uniform a must be >= 0, got {self.a}")
        if not self.b > self.a:
            raise ValueError(f"uniform requires a < b, got a={self.a}, b={self.b}")

    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def sample(self, rng: RandomSource) -> float:
        x = self.a + (self.b - self.a) * rng.random()
        # a == 0 would allow a zero lifetime
        return x if x > 0 else self.b


@dataclass(frozen=True)
class Exponential:
    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"exponential kappa must be > 0, got {self.kappa}")

    def mean(self) -> float:
        return 1.0 / self.kappa

    def sample(self, rng: RandomSource) -> float:
        return _expovariate(self.kappa, rng)


@dataclass(frozen=True)
class Lognormal:
    """Lognormal lifetime; ``upsilon``/``phi`` are the mean/std of the underlying normal."""

    upsilon: float
    phi: float

    def __post_init__(self):
        if not self.phi > 0:
            raise ValueError(f"lognormal phi must be > 0, got {self.phi}")

    def mean(self) -> float:
        return math.exp(self.upsilon + 0.5 * self.phi**2)

    def sample(self, rng: RandomSource) -> float:
        return math.exp(self.upsilon + self.phi * rng.standard_normal())


LifetimeDistribution = Union[PowerLaw, Uniform, Exponential, Lognormal]

_KINDS = {
    "powerlaw": (PowerLaw, ("x_min", "alpha")),
    "uniform": (Uniform, ("a", "b")),
    "exponential": (Exponential, ("kappa",)),
    "lognormal": (Lognormal, ("upsilon", "phi")),
}


def sample_lifetime(dist: LifetimeDistribution, rng: RandomSource) -> float:
    return dist.sample(rng)


def mean_lifetime(dist: LifetimeDistribution) -> float:
    return dist.mean()


def sample_interarrival(lam: float, rng: RandomSource) -> float:
    """Exponential waiting time with rate ``lam``; always strictly positive."""
    if not lam > 0:
        raise ValueError(f"birth rate must be > 0, got {lam}")
    return _expovariate(lam, rng)


def _expovariate(rate: float, rng: RandomSource) -> float:
    u = rng.random()
    if u == 0.0:
        u = math.ulp(0.5)
    return -math.log1p(-u) / rate


def lifetime_from_dict(d: Mapping[str, Any]) -> LifetimeDistribution:
    """Build a distribution from its config form, e.g. ``{"kind": "powerlaw", "x_min": 60, "alpha": 3}``."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise ValueError(f"lifetime.kind must be one of {sorted(_KINDS)}, got {kind!r}")
    cls, names = _KINDS[kind]
    missing = [n for n in names if n not in d]
    extra = sorted(set(d) - set(names))
    if missing:
        raise ValueError(f"lifetime ({kind}) missing key(s): {', '.join(missing)}")
    if extra:
        raise ValueError(f"lifetime ({kind}) has unknown key(s): {', '.join(extra)}")
    vals = {}
    for n in names:
        v = d[n]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValueError(f"lifetime.{n} must be a number, got {v!r}")
        vals[n] = float(v)
    return cls(**vals)


def lifetime_to_dict(dist: LifetimeDistribution) -> dict:
    for kind, (cls, names) in _KINDS.items():
        if isinstance(dist, cls):
            return {"kind": kind, **{n: getattr(dist, n) for n in names}}
    raise TypeError(f"not a lifetime distribution: {dist!r}")
