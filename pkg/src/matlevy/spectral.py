"""Empirical spectral distributions and reference spectral laws.

Provides the ESD of a Hermitian matrix, closed-form or quadrature CDFs
for the semicircle, Marchenko-Pastur, and Cauchy laws, and distribution
distances (Kolmogorov-Smirnov against the analytic CDF, plus an
approximate Wasserstein-1 for laws with an atom where KS is
conservative).

Conventions: Semicircle(mean, variance) is supported on
[mean - 2 sd, mean + 2 sd].  MarchenkoPastur(ratio) is the free Poisson
law: an atom of mass (1 - ratio)+ at zero plus the density
sqrt((b - x)(x - a)) / (2 pi x) on [a, b] with a, b = (1 -+ sqrt(ratio))^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .hermitian import as_hermitian
from .scalar_laws import GaussianLaw, PoissonLaw

_QUAD_OPTS = {"epsabs": 1e-10, "epsrel": 1e-10, "limit": 200}


@dataclass(frozen=True)
class EmpiricalSpectralDistribution:
    """Uniform distribution on the eigenvalues of a Hermitian matrix."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        eigs = np.sort(np.asarray(self.eigenvalues, dtype=float))
        if eigs.size == 0:
            raise ValueError("empty spectrum")
        object.__setattr__(self, "eigenvalues", eigs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.eigenvalues, x, side="right") / self.dim

    def mean(self) -> float:
        return float(self.eigenvalues.mean())

    def second_moment(self) -> float:
        return float(np.mean(self.eigenvalues**2))


def esd(h: np.ndarray) -> EmpiricalSpectralDistribution:
    """Empirical spectral distribution of a Hermitian matrix."""
    return EmpiricalSpectralDistribution(np.linalg.eigvalsh(as_hermitian(h)))


# ---------------------------------------------------------------------------
# Reference laws


@dataclass(frozen=True)
class Semicircle:
    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("variance must be > 0")

    @property
    def support(self) -> tuple[float, float]:
        r = 2.0 * math.sqrt(self.variance)
        return self.mean - r, self.mean + r


@dataclass(frozen=True)
class MarchenkoPastur:
    ratio: float

    def __post_init__(self):
        if self.ratio <= 0:
            raise ValueError("ratio must be > 0")

    @property
    def edges(self) -> tuple[float, float]:
        s = math.sqrt(self.ratio)
        return (1.0 - s) ** 2, (1.0 + s) ** 2

    @property
    def atom(self) -> float:
        return max(0.0, 1.0 - self.ratio)


@dataclass(frozen=True)
class Cauchy:
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")


@dataclass(frozen=True)
class EmpiricalReference:
    """Reference law given by a finite sample (its empirical CDF)."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float))
        if s.size == 0:
            raise ValueError("empty reference sample")
        object.__setattr__(self, "samples", s)


def target_pdf(law, x: float) -> float:
    """Density of the absolutely continuous part of a reference law."""
    if isinstance(law, Semicircle):
        z = x - law.mean
        rad = 4.0 * law.variance - z * z
        return math.sqrt(rad) / (2.0 * math.pi * law.variance) if rad > 0 else 0.0
    if isinstance(law, MarchenkoPastur):
        a, b = law.edges
        if a < x < b:
            return math.sqrt((b - x) * (x - a)) / (2.0 * math.pi * x)
        return 0.0
    if isinstance(law, Cauchy):
        z = (x - law.location) / law.scale
        return 1.0 / (math.pi * law.scale * (1.0 + z * z))
    raise TypeError(f"no density for {type(law).__name__}")


def target_cdf(law, x: float) -> float:
    """CDF of a reference law at a point, in [0, 1]."""
    if isinstance(law, Semicircle):
        lo, hi = law.support
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        v = law.variance
        z = x - law.mean
        return (
            0.5
            + z * math.sqrt(4.0 * v - z * z) / (4.0 * math.pi * v)
            + math.asin(z / (2.0 * math.sqrt(v))) / math.pi
        )
    if isinstance(law, MarchenkoPastur):
        return float(_mp_cdf_many(law, np.array([x]))[0])
    if isinstance(law, Cauchy):
        return 0.5 + math.atan((x - law.location) / law.scale) / math.pi
    if isinstance(law, EmpiricalReference):
        return float(np.searchsorted(law.samples, x, side="right") / law.samples.size)
    raise TypeError(f"no CDF for {type(law).__name__}")


def _mp_cdf_many(law: MarchenkoPastur, xs: np.ndarray) -> np.ndarray:
    """CDF of the Marchenko-Pastur law at sorted points.

    Atom handled analytically, density integrated by adaptive quadrature
    with cumulative segments between consecutive evaluation points.
    """
    a, b = law.edges
    out = np.empty(xs.size)
    acc = 0.0
    prev = a
    for i, x in enumerate(xs):
        if x < 0.0:
            out[i] = 0.0
        elif x >= b:
            out[i] = 1.0
        elif x <= a:
            out[i] = law.atom
        else:
            seg, _ = integrate.quad(lambda r: target_pdf(law, r), prev, x, **_QUAD_OPTS)
            acc += seg
            prev = x
            out[i] = law.atom + acc
    return np.clip(out, 0.0, 1.0)


def _cdf_many(law, xs: np.ndarray) -> np.ndarray:
    """Vectorized CDF at sorted points (cumulative quadrature for MP)."""
    xs = np.asarray(xs, dtype=float)
    if isinstance(law, MarchenkoPastur):
        return _mp_cdf_many(law, xs)
    return np.array([target_cdf(law, float(x)) for x in xs])


def target_quantile(law, p: float) -> float:
    """Quantile function of a reference law (smallest x with F(x) >= p)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if isinstance(law, Cauchy):
        return law.location + law.scale * math.tan(math.pi * (p - 0.5))
    if isinstance(law, EmpiricalReference):
        return float(np.quantile(law.samples, p, method="inverted_cdf"))
    if isinstance(law, Semicircle):
        lo, hi = law.support
    elif isinstance(law, MarchenkoPastur):
        if p <= law.atom:
            return 0.0
        lo, hi = law.edges
    else:
        raise TypeError(f"no quantile for {type(law).__name__}")
    return float(optimize.brentq(lambda x: target_cdf(law, x) - p, lo, hi, xtol=1e-12))


def ks_distance(dist: EmpiricalSpectralDistribution, law) -> float:
    """Kolmogorov-Smirnov statistic of an ESD against an analytic CDF.

    sup over atoms of max(|F(l_i) - i/d|, |F(l_i) - (i-1)/d|).
    """
    eigs = dist.eigenvalues
    d = dist.dim
    f = _cdf_many(law, eigs)
    i = np.arange(1, d + 1)
    return float(np.max(np.maximum(np.abs(f - i / d), np.abs(f - (i - 1) / d))))


def wasserstein_distance(
    dist: EmpiricalSpectralDistribution, law, num_points: int = 4001
) -> float:
    """Approximate W1 distance, the integral of |F_esd - F_law|.

    Trapezoidal on a fine grid covering both supports; useful where the
    target has an atom and KS is conservative.
    """
    if isinstance(law, Semicircle):
        lo, hi = law.support
    elif isinstance(law, MarchenkoPastur):
        lo, hi = 0.0, law.edges[1]
    elif isinstance(law, EmpiricalReference):
        lo, hi = law.samples[0], law.samples[-1]
    else:
        raise TypeError(f"no W1 support bounds for {type(law).__name__}")
    lo = min(lo, float(dist.eigenvalues[0]))
    hi = max(hi, float(dist.eigenvalues[-1]))
    pad = 1e-9 * (1.0 + hi - lo)
    xs = np.linspace(lo - pad, hi + pad, num_points)
    gap = np.abs(dist.cdf(xs) - _cdf_many(law, xs))
    return float(np.trapezoid(gap, xs))


def free_target_for(law):
    """Limiting spectral law of the ensemble built from a scalar law.

    Registered closed forms: Gaussian -> semicircle (mean shift becomes a
    location shift), Poisson -> Marchenko-Pastur of the same intensity.
    Other families are rejected.
    """
    if isinstance(law, GaussianLaw):
        return Semicircle(law.mean, law.variance)
    if isinstance(law, PoissonLaw):
        return MarchenkoPastur(law.intensity)
    raise ValueError(
        f"no closed-form spectral target registered for {type(law).__name__}"
    )
