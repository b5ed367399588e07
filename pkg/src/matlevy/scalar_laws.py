"""One-dimensional infinitely divisible laws and their samplers.

Each supported family (Gaussian, Poisson, Gamma, compound Poisson with
drift) carries an exact sampler for every convolution power mu^{*t} and
exposes its triplet (gaussian variance a^2, drift psi, jump measure nu).

Drift conventions.  Triplet drifts are reported under the centering
function r / (1 + r^2), so for example Poisson(lam) has triplet
(0, lam/2, lam * delta_1).  The compound Poisson family instead stores
the *literal* linear drift of the path (``drift`` field): the time-t law
is drift * t plus a rate-t Poisson number of jumps.  ``drift_coefficient``
returns that literal drift for every family; ``triplet().drift`` converts
to the centered convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

SIGN_POSITIVE = "positive"
SIGN_NEGATIVE = "negative"

_MAX_NONZERO_RESAMPLES = 10_000


@dataclass(frozen=True)
class LevyMeasureDescriptor:
    """Summary of a jump measure: total mass, sign support, jump sampler.

    ``sample`` draws from nu / nu(R) and is None when the mass is zero or
    infinite.  Draws may include exact zeros for discrete convolution
    powers (an atom of mu^{*1/n} at 0); path samplers drop those as
    no-op jumps.
    """

    total_mass: float
    sign_support: frozenset
    sample: Callable[[np.random.Generator, int], np.ndarray] | None = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.total_mass)


@dataclass(frozen=True)
class ScalarTriplet:
    """Levy triplet (a^2, psi, nu) under the r/(1+r^2) centering."""

    gaussian_variance: float
    drift: float
    levy_measure: LevyMeasureDescriptor


@dataclass(frozen=True)
class SubordinatorCheck:
    """Diagnostics for the nonnegative-path (subordinator) conditions."""

    is_subordinator: bool
    gaussian_variance: float
    positive_jumps_only: bool
    small_jumps_integrable: bool
    zero_truncation_drift: float
    note: str = ""


# ---------------------------------------------------------------------------
# Jump-size laws for the compound Poisson family


@dataclass(frozen=True)
class NormalJumps:
    mean: float = 0.0
    std: float = 1.0

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.normal(self.mean, self.std, size=size)

    def truncation_mean(self) -> float:
        # E[J / (1 + J^2)] by quadrature against the normal density
        m, s = self.mean, self.std
        if s == 0.0:
            return m / (1.0 + m * m)
        def f(r):
            z = (r - m) / s
            return r / (1.0 + r * r) * math.exp(-0.5 * z * z) / (s * math.sqrt(2 * math.pi))
        val, _ = integrate.quad(f, m - 12 * s, m + 12 * s, limit=200)
        return val

    def mean_of(self, f) -> float:
        m, s = self.mean, self.std
        def g(r):
            z = (r - m) / s
            return f(r) * math.exp(-0.5 * z * z) / (s * math.sqrt(2 * math.pi))
        val, _ = integrate.quad(g, m - 12 * s, m + 12 * s, limit=200)
        return val

    def sign_support(self) -> frozenset:
        return frozenset({SIGN_POSITIVE, SIGN_NEGATIVE})

    def to_json(self) -> dict:
        return {"kind": "normal", "mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class ConstantJumps:
    value: float

    def __post_init__(self):
        if self.value == 0.0:
            raise ValueError("constant jump size must be nonzero")

    def sample(self, rng: np.random.Generator, size: int | None = None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def truncation_mean(self) -> float:
        return self.value / (1.0 + self.value**2)

    def mean_of(self, f) -> float:
        return f(self.value)

    def sign_support(self) -> frozenset:
        return frozenset({SIGN_POSITIVE if self.value > 0 else SIGN_NEGATIVE})

    def to_json(self) -> dict:
        return {"kind": "constant", "value": self.value}


@dataclass(frozen=True)
class UniformJumps:
    low: float
    high: float

    def __post_init__(self):
        if not self.low < self.high:
            raise ValueError("uniform jump law needs low < high")

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return rng.uniform(self.low, self.high, size=size)

    def truncation_mean(self) -> float:
        a, b = self.low, self.high
        return 0.5 * (math.log1p(b * b) - math.log1p(a * a)) / (b - a)

    def mean_of(self, f) -> float:
        val, _ = integrate.quad(f, self.low, self.high, limit=200)
        return val / (self.high - self.low)

    def sign_support(self) -> frozenset:
        signs = set()
        if self.high > 0:
            signs.add(SIGN_POSITIVE)
        if self.low < 0:
            signs.add(SIGN_NEGATIVE)
        return frozenset(signs)

    def to_json(self) -> dict:
        return {"kind": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class ConvolutionPowerJumps:
    """Jump sizes distributed as mu^{*power} of a base law.

    ``truncation_mean_value`` caches E[J/(1+J^2)]; it has no closed form
    in general and is estimated by Monte Carlo in :func:`discretize`.
    """

    base: "object"
    power: float
    truncation_mean_value: float | None = None

    def sample(self, rng: np.random.Generator, size: int | None = None):
        return self.base.sample_conv_power(self.power, rng, size=size)

    def truncation_mean(self) -> float:
        if self.truncation_mean_value is None:
            raise ValueError(
                "truncation mean of a convolution-power jump law must be "
                "estimated up front (see discretize)"
            )
        return self.truncation_mean_value

    def mean_of(self, f) -> float:
        raise ValueError("no closed-form integrals for convolution-power jumps")

    def sign_support(self) -> frozenset:
        return self.base.sign_support()

    def to_json(self) -> dict:
        return {
            "kind": "conv_power",
            "base": law_to_json(self.base),
            "power": self.power,
            "truncation_mean": self.truncation_mean_value,
        }


_JUMP_KINDS = {
    "normal": lambda d: NormalJumps(float(d["mean"]), float(d["std"])),
    "constant": lambda d: ConstantJumps(float(d["value"])),
    "uniform": lambda d: UniformJumps(float(d["low"]), float(d["high"])),
    "conv_power": lambda d: ConvolutionPowerJumps(
        law_from_json(d["base"]),
        float(d["power"]),
        None if d.get("truncation_mean") is None else float(d["truncation_mean"]),
    ),
}


def jump_law_from_json(data: dict):
    kind = data.get("kind")
    if kind not in _JUMP_KINDS:
        raise ValueError(f"unknown jump law kind {kind!r}")
    return _JUMP_KINDS[kind](data)


# ---------------------------------------------------------------------------
# Law families


@dataclass(frozen=True)
class GaussianLaw:
    """Gaussian law N(mean, variance); mu^{*t} = N(mean*t, variance*t)."""

    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be >= 0")

    def sample_conv_power(self, t: float, rng: np.random.Generator, size=None):
        return rng.normal(self.mean * t, math.sqrt(self.variance * t), size=size)

    def triplet(self) -> ScalarTriplet:
        measure = LevyMeasureDescriptor(0.0, frozenset())
        return ScalarTriplet(self.variance, self.mean, measure)

    def drift_coefficient(self) -> float:
        return self.mean

    def sign_support(self) -> frozenset:
        if self.variance > 0:
            return frozenset({SIGN_POSITIVE, SIGN_NEGATIVE})
        if self.mean == 0:
            return frozenset()
        return frozenset({SIGN_POSITIVE if self.mean > 0 else SIGN_NEGATIVE})

    def to_json(self) -> dict:
        return {"family": "gaussian", "mean": self.mean, "variance": self.variance}


@dataclass(frozen=True)
class PoissonLaw:
    """Poisson law with the given intensity; nu = intensity * delta_1."""

    intensity: float

    def __post_init__(self):
        if self.intensity <= 0:
            raise ValueError("intensity must be > 0")

    def sample_conv_power(self, t: float, rng: np.random.Generator, size=None):
        out = rng.poisson(self.intensity * t, size=size)
        return np.asarray(out, dtype=float) if size is not None else float(out)

    def triplet(self) -> ScalarTriplet:
        measure = LevyMeasureDescriptor(
            self.intensity,
            frozenset({SIGN_POSITIVE}),
            lambda rng, size=None: np.ones(size) if size is not None else 1.0,
        )
        return ScalarTriplet(0.0, self.intensity / 2.0, measure)

    def drift_coefficient(self) -> float:
        return 0.0

    def sign_support(self) -> frozenset:
        return frozenset({SIGN_POSITIVE})

    def to_json(self) -> dict:
        return {"family": "poisson", "intensity": self.intensity}


@dataclass(frozen=True)
class GammaLaw:
    """Gamma law with given shape and rate; mu^{*t} has shape*t.

    Infinite-activity subordinator: nu(dr) = shape * exp(-rate*r)/r dr on
    (0, inf), so there is no normalized jump sampler.
    """

    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0 or self.rate <= 0:
            raise ValueError("shape and rate must be > 0")

    def sample_conv_power(self, t: float, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape * t, 1.0 / self.rate, size=size)

    def triplet(self) -> ScalarTriplet:
        drift, _ = integrate.quad(
            lambda r: self.shape * math.exp(-self.rate * r) / (1.0 + r * r),
            0.0,
            np.inf,
        )
        measure = LevyMeasureDescriptor(math.inf, frozenset({SIGN_POSITIVE}))
        return ScalarTriplet(0.0, drift, measure)

    def levy_density(self, r: float) -> float:
        return self.shape * math.exp(-self.rate * r) / r if r > 0 else 0.0

    def drift_coefficient(self) -> float:
        return 0.0

    def sign_support(self) -> frozenset:
        return frozenset({SIGN_POSITIVE})

    def to_json(self) -> dict:
        return {"family": "gamma", "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class CompoundPoissonLaw:
    """Compound Poisson with literal linear drift.

    The time-t value is ``drift * t`` plus the sum of a Poisson(rate*t)
    number of i.i.d. jumps; the triplet converts the drift to the
    r/(1+r^2)-centered convention.
    """

    rate: float
    jumps: object
    drift: float = 0.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be > 0")

    def sample_conv_power(self, t: float, rng: np.random.Generator, size=None):
        if size is None:
            n = rng.poisson(self.rate * t)
            total = float(np.sum(self.jumps.sample(rng, n))) if n else 0.0
            return self.drift * t + total
        counts = rng.poisson(self.rate * t, size=size)
        flat = self.jumps.sample(rng, int(counts.sum()))
        sums = np.zeros(size)
        np.add.at(sums, np.repeat(np.arange(size), counts), flat)
        return self.drift * t + sums

    def triplet(self) -> ScalarTriplet:
        measure = LevyMeasureDescriptor(
            self.rate, self.jumps.sign_support(), self.jumps.sample
        )
        centered = self.drift + self.rate * self.jumps.truncation_mean()
        return ScalarTriplet(0.0, centered, measure)

    def drift_coefficient(self) -> float:
        return self.drift

    def sign_support(self) -> frozenset:
        signs = set(self.jumps.sign_support())
        if self.drift > 0:
            signs.add(SIGN_POSITIVE)
        elif self.drift < 0:
            signs.add(SIGN_NEGATIVE)
        return frozenset(signs)

    def to_json(self) -> dict:
        return {
            "family": "compound_poisson",
            "rate": self.rate,
            "drift": self.drift,
            "jumps": self.jumps.to_json(),
        }


_LAW_FAMILIES = {
    "gaussian": lambda d: GaussianLaw(float(d.get("mean", 0.0)), float(d["variance"])),
    "poisson": lambda d: PoissonLaw(float(d["intensity"])),
    "gamma": lambda d: GammaLaw(float(d["shape"]), float(d["rate"])),
    "compound_poisson": lambda d: CompoundPoissonLaw(
        float(d["rate"]), jump_law_from_json(d["jumps"]), float(d.get("drift", 0.0))
    ),
}


def law_from_json(data: dict):
    """Build a law from its JSON descriptor {"family": ..., params...}."""
    family = data.get("family")
    if family not in _LAW_FAMILIES:
        raise ValueError(f"unknown law family {family!r}")
    return _LAW_FAMILIES[family](data)


def law_to_json(law) -> dict:
    return law.to_json()


# ---------------------------------------------------------------------------
# Operations


def sample_conv_power(law, t: float, rng: np.random.Generator, size=None):
    """Draw from mu^{*t} for t > 0 (exact for every supported family)."""
    if t <= 0:
        raise ValueError("convolution power t must be > 0")
    return law.sample_conv_power(t, rng, size=size)


def sample_jump(law, rng: np.random.Generator) -> float:
    """Draw a nonzero jump size distributed as nu / nu(R).

    Requires a finite, nonzero jump mass.  Exact zeros (possible for
    discrete convolution-power jump laws, where mu^{*1/n} has an atom at
    zero) are resampled away, i.e. the draw is conditioned on being an
    actual jump.
    """
    measure = law.triplet().levy_measure
    if not measure.finite or measure.total_mass == 0.0 or measure.sample is None:
        raise ValueError("law does not have a finite nonzero jump measure")
    for _ in range(_MAX_NONZERO_RESAMPLES):
        beta = float(measure.sample(rng))
        if beta != 0.0:
            return beta
    raise RuntimeError("jump law appears to be concentrated at zero")


def discretize(
    law,
    n: int,
    mc_samples: int = 20_000,
    rng: np.random.Generator | None = None,
) -> CompoundPoissonLaw:
    """Compound Poisson approximation with jump measure n * mu^{*1/n}.

    The returned law is a pure jump sum (literal drift 0) of rate-n
    Poisson many mu^{*1/n} draws; its time-1 value converges in
    distribution to ``law`` as n grows.  The centered triplet drift
    psi_n = n * E[beta / (1 + beta^2)] is estimated by Monte Carlo with
    ``mc_samples`` draws and cached on the jump law.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if rng is None:
        rng = np.random.default_rng(0)
    betas = np.asarray(law.sample_conv_power(1.0 / n, rng, size=mc_samples), dtype=float)
    trunc_mean = float(np.mean(betas / (1.0 + betas**2)))
    jumps = ConvolutionPowerJumps(law, 1.0 / n, trunc_mean)
    return CompoundPoissonLaw(rate=float(n), jumps=jumps, drift=0.0)


def small_jump_second_moment(
    law, eps: float, mc_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Monte Carlo estimate of the truncated second moment of nu.

    For a finite-activity law this is nu(R) * E[beta^2 1{|beta| <= eps}]
    with beta ~ nu/nu(R); returns (estimate, standard error).  For
    discretized laws the estimate converges to the base gaussian variance
    a^2 as the discretization level grows.
    """
    if mc_samples < 100:
        raise ValueError("mc_samples must be >= 100")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    measure = law.triplet().levy_measure
    if not measure.finite or measure.sample is None:
        raise ValueError("law must have finite jump activity")
    betas = np.asarray(measure.sample(rng, mc_samples), dtype=float)
    vals = np.where(np.abs(betas) <= eps, betas**2, 0.0)
    mass = measure.total_mass
    est = mass * float(np.mean(vals))
    se = mass * float(np.std(vals, ddof=1)) / math.sqrt(mc_samples)
    return est, se


def _reference_jump_integral(law, f, vanish_radius, mc_samples, rng):
    """(integral of f against nu, standard error) for the base law."""
    if isinstance(law, GaussianLaw):
        return 0.0, 0.0
    if isinstance(law, PoissonLaw):
        return law.intensity * f(1.0), 0.0
    if isinstance(law, GammaLaw):
        lo = max(vanish_radius * 0.5, 1e-12)
        val, _ = integrate.quad(lambda r: f(r) * law.levy_density(r), lo, np.inf, limit=200)
        return val, 0.0
    if isinstance(law, CompoundPoissonLaw):
        try:
            return law.rate * law.jumps.mean_of(f), 0.0
        except ValueError:
            draws = np.asarray(law.jumps.sample(rng, mc_samples), dtype=float)
            vals = np.array([f(b) for b in draws])
            est = law.rate * float(np.mean(vals))
            se = law.rate * float(np.std(vals, ddof=1)) / math.sqrt(mc_samples)
            return est, se
    raise ValueError(f"no reference jump integral for {type(law).__name__}")


def weak_convergence_probe(
    law,
    n: int,
    f: Callable[[float], float],
    vanish_radius: float,
    mc_samples: int,
    rng: np.random.Generator,
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Compare integrals of f against n * mu^{*1/n} and against nu.

    ``f`` must be bounded, continuous, and vanish on
    (-vanish_radius, vanish_radius); that region is spot checked.  Returns
    ((estimate_n, se_n), (reference, se_ref)); the gap shrinks as n grows.
    """
    if vanish_radius <= 0:
        raise ValueError("vanish_radius must be > 0")
    for probe in (vanish_radius * 0.5, -vanish_radius * 0.5, vanish_radius * 0.25):
        if f(probe) != 0.0:
            raise ValueError(
                f"test function does not vanish on (-{vanish_radius}, {vanish_radius})"
            )
    betas = np.asarray(law.sample_conv_power(1.0 / n, rng, size=mc_samples), dtype=float)
    vals = np.array([f(b) for b in betas])
    est = n * float(np.mean(vals))
    se = n * float(np.std(vals, ddof=1)) / math.sqrt(mc_samples)
    ref = _reference_jump_integral(law, f, vanish_radius, mc_samples, rng)
    return (est, se), ref


def is_positive_subordinator_spec(law) -> SubordinatorCheck:
    """Check the conditions for nonnegative (subordinator) sample paths.

    True iff a^2 = 0, the jump measure charges only (0, inf), small jumps
    are integrable, and the zero-truncation drift psi_0 (the literal
    linear drift of the path) is nonnegative.  All checks are analytic for
    the supported families.
    """
    trip = law.triplet()
    positive_only = SIGN_NEGATIVE not in trip.levy_measure.sign_support
    integrable = True  # all supported families integrate (1 ^ r) near zero
    drift0 = law.drift_coefficient()
    ok = trip.gaussian_variance == 0.0 and positive_only and drift0 >= 0.0
    note = ""
    if trip.gaussian_variance > 0.0:
        note = "gaussian component present"
    elif not positive_only:
        note = "jump measure charges negative sizes"
    elif drift0 < 0.0:
        note = "negative drift"
    return SubordinatorCheck(
        is_subordinator=ok,
        gaussian_variance=trip.gaussian_variance,
        positive_jumps_only=positive_only,
        small_jumps_integrable=integrable,
        zero_truncation_drift=drift0,
        note=note,
    )
