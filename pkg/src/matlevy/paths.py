"""Sample paths of vector- and matrix-valued Levy processes.

Paths are structural: a drift coefficient, an optionally realized
Brownian component on a time grid, and a time-stamped jump list with
rank-one factors.  Holding the factors (eigenvalue, direction) instead
of dense jump matrices lets covariation work in O(d^2) per jump, and
holding Brownian drivers as shared objects lets two paths declare that
they ride the same Brownian motion.

The BGCD samplers build the Hermitian ensembles whose time-1 empirical
spectral distributions approach free infinitely divisible laws: a
Gaussian part with covariance operator a^2 (Theta + tr(Theta) I)/(d+1),
a compound Poisson part with rank-one jumps beta * u u*, and the
discretized approximation that carries a general law through compound
Poisson jumps distributed as mu^{*1/n}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermitian import PHASE_TOL, as_hermitian, psd_sqrt
from .scalar_laws import sample_conv_power

RATE_SCALINGS = ("esd_consistent", "literal")


def _check_rate_scaling(rate_scaling: str) -> None:
    if rate_scaling not in RATE_SCALINGS:
        raise ValueError(f"rate_scaling must be one of {RATE_SCALINGS}")


def _clock_rate(d: int, mass: float, rate_scaling: str) -> float:
    # esd_consistent carries the dimension factor of the rank-one jump
    # measure; "literal" keeps the scalar mass as the arrival rate.
    return d * mass if rate_scaling == "esd_consistent" else mass


# ---------------------------------------------------------------------------
# Brownian drivers


@dataclass(frozen=True)
class BrownianDriver:
    """Realized Brownian values on a grid; identity marks sharing.

    ``values[k]`` is the Brownian position at ``grid[k]``; complex
    increments have total variance dt per entry, split equally between
    real and imaginary parts.  Two paths share a Brownian motion exactly
    when they reference the same driver object.
    """

    grid: np.ndarray
    values: np.ndarray
    kind: str  # "vector" | "hermitian" | "scalar"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0:
            raise ValueError("grid must be 1-d, start at 0, and have >= 2 points")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.values.shape[0] != grid.size:
            raise ValueError("values must have one slice per grid point")
        object.__setattr__(self, "grid", grid)

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def index_at(self, t: float) -> int:
        """Index of the nearest grid point <= t."""
        return int(np.searchsorted(self.grid, t, side="right")) - 1


def brownian_grid(horizon: float, step: float | None = None) -> np.ndarray:
    """Uniform grid on [0, horizon]; a single step when ``step`` is None."""
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    if step is None:
        return np.array([0.0, horizon])
    m = max(1, int(round(horizon / step)))
    return np.linspace(0.0, horizon, m + 1)


def sample_vector_driver(d: int, grid: np.ndarray, rng: np.random.Generator) -> BrownianDriver:
    """Standard C^d Brownian motion with quadratic variation t I_d."""
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    m = dt.size
    incr = (rng.normal(size=(m, d)) + 1j * rng.normal(size=(m, d))) * np.sqrt(dt / 2.0)[:, None]
    values = np.concatenate([np.zeros((1, d), dtype=complex), np.cumsum(incr, axis=0)])
    return BrownianDriver(grid, values, "vector")


def sample_hermitian_driver(d: int, grid: np.ndarray, rng: np.random.Generator) -> BrownianDriver:
    """Hermitian matrix Brownian motion.

    Diagonal entries are real Brownian motions of variance t; off-diagonal
    entries are complex with real/imaginary variances t/2, so the
    covariance operator on Hermitian test matrices is the identity.
    """
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    m = dt.size
    a = rng.normal(size=(m, d, d)) + 1j * rng.normal(size=(m, d, d))
    incr = (a + a.conj().transpose(0, 2, 1)) / 2.0 * np.sqrt(dt)[:, None, None]
    values = np.concatenate([np.zeros((1, d, d), dtype=complex), np.cumsum(incr, axis=0)])
    return BrownianDriver(grid, values, "hermitian")


def sample_scalar_driver(grid: np.ndarray, rng: np.random.Generator) -> BrownianDriver:
    """One-dimensional standard (variance t) Brownian motion."""
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    incr = rng.normal(size=dt.size) * np.sqrt(dt)
    values = np.concatenate([[0.0], np.cumsum(incr)])
    return BrownianDriver(grid, values, "scalar")


def sample_matrix_driver(
    d: int, q: int, grid: np.ndarray, rng: np.random.Generator
) -> BrownianDriver:
    """Standard d x q complex matrix Brownian motion, [B, B*](t) = q t I_d."""
    grid = np.asarray(grid, dtype=float)
    dt = np.diff(grid)
    m = dt.size
    incr = (rng.normal(size=(m, d, q)) + 1j * rng.normal(size=(m, d, q))) * np.sqrt(
        dt / 2.0
    )[:, None, None]
    values = np.concatenate([np.zeros((1, d, q), dtype=complex), np.cumsum(incr, axis=0)])
    return BrownianDriver(grid, values, "matrix")


# ---------------------------------------------------------------------------
# Gaussian component descriptors


@dataclass(frozen=True)
class BGCDGaussianPart:
    """Gaussian component (a/sqrt(d+1)) (H(t) + g(t) I_d).

    H is a Hermitian matrix Brownian motion and g an independent scalar
    one, giving covariance operator a^2 (Theta + tr(Theta) I)/(d+1) and
    quadratic variation a^2 t I_d.
    """

    variance: float
    matrix_driver: BrownianDriver
    scalar_driver: BrownianDriver

    @property
    def grid(self) -> np.ndarray:
        return self.matrix_driver.grid

    def value_at(self, k: int) -> np.ndarray:
        d = self.matrix_driver.values.shape[1]
        scale = math.sqrt(self.variance / (d + 1))
        eye = np.eye(d, dtype=complex)
        return scale * (self.matrix_driver.values[k] + self.scalar_driver.values[k] * eye)

    def continuous_qv(self, d: int, t: float) -> np.ndarray:
        return self.variance * t * np.eye(d, dtype=complex)


@dataclass(frozen=True)
class ScalarIdentityGaussianPart:
    """Gaussian component b(t) I_d with quadratic variation t I_d."""

    driver: BrownianDriver

    @property
    def grid(self) -> np.ndarray:
        return self.driver.grid

    def continuous_qv(self, d: int, t: float) -> np.ndarray:
        return t * np.eye(d, dtype=complex)


@dataclass(frozen=True)
class KroneckerGaussianPart:
    """Gaussian component S1^{1/2} B(t) S2^{1/2} for PSD S1, S2.

    B is a standard complex matrix Brownian motion; the quadratic
    variation is t tr(S2) S1.
    """

    sigma_left: np.ndarray
    sigma_right: np.ndarray
    driver: BrownianDriver
    sqrt_left: np.ndarray = field(repr=False, default=None)
    sqrt_right: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.sqrt_left is None:
            object.__setattr__(self, "sqrt_left", psd_sqrt(self.sigma_left))
        if self.sqrt_right is None:
            object.__setattr__(self, "sqrt_right", psd_sqrt(self.sigma_right))

    @property
    def grid(self) -> np.ndarray:
        return self.driver.grid

    def value_at(self, k: int) -> np.ndarray:
        return self.sqrt_left @ self.driver.values[k] @ self.sqrt_right

    def continuous_qv(self, d: int, t: float) -> np.ndarray:
        return t * float(np.trace(self.sigma_right).real) * self.sigma_left


# ---------------------------------------------------------------------------
# Jump collections


def _canonicalize_rows(dirs: np.ndarray) -> np.ndarray:
    """Phase-canonicalize each row (first significant coordinate real > 0)."""
    if dirs.shape[0] == 0:
        return dirs.astype(complex)
    dirs = np.array(dirs, dtype=complex)
    pivot_idx = (np.abs(dirs) > PHASE_TOL).argmax(axis=1)
    pivots = dirs[np.arange(dirs.shape[0]), pivot_idx]
    if np.any(np.abs(pivots) <= PHASE_TOL):
        raise ValueError("jump direction is numerically zero")
    dirs *= (pivots.conj() / np.abs(pivots))[:, None]
    return dirs


@dataclass(frozen=True)
class RankOneJumps:
    """Time-ordered rank-one Hermitian jumps lambda_j u_j u_j*."""

    times: np.ndarray
    eigenvalues: np.ndarray
    directions: np.ndarray  # (N, d), unit rows with canonical phase

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        lams = np.asarray(self.eigenvalues, dtype=float)
        dirs = np.asarray(self.directions, dtype=complex)
        if times.shape != lams.shape or dirs.shape[0] != times.size:
            raise ValueError("inconsistent jump array shapes")
        if times.size and (np.any(np.diff(times) <= 0) or times[0] <= 0):
            raise ValueError("jump times must be strictly increasing and > 0")
        if np.any(lams == 0.0):
            raise ValueError("jump eigenvalues must be nonzero")
        norms = np.linalg.norm(dirs, axis=1)
        if times.size and np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("jump directions must be unit vectors")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "eigenvalues", lams)
        object.__setattr__(self, "directions", _canonicalize_rows(dirs))

    @classmethod
    def empty(cls, d: int) -> "RankOneJumps":
        return cls(np.empty(0), np.empty(0), np.empty((0, d), dtype=complex))

    @property
    def count(self) -> int:
        return self.times.size

    def upto(self, t: float) -> int:
        """Number of jumps with time <= t."""
        return int(np.searchsorted(self.times, t, side="right"))

    def matrix_sum(self, k: int, weights: np.ndarray | None = None) -> np.ndarray:
        """Sum of the first k jump matrices, optionally reweighted."""
        d = self.directions.shape[1]
        if k == 0:
            return np.zeros((d, d), dtype=complex)
        w = self.eigenvalues[:k] if weights is None else weights[:k]
        u = self.directions[:k]
        return (u * w[:, None]).T @ u.conj()


@dataclass(frozen=True)
class VectorJumps:
    """Time-ordered C^d jumps."""

    times: np.ndarray
    vectors: np.ndarray  # (N, d)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        vecs = np.asarray(self.vectors, dtype=complex)
        if vecs.shape[0] != times.size:
            raise ValueError("inconsistent jump array shapes")
        if times.size and (np.any(np.diff(times) <= 0) or times[0] <= 0):
            raise ValueError("jump times must be strictly increasing and > 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def empty(cls, d: int) -> "VectorJumps":
        return cls(np.empty(0), np.empty((0, d), dtype=complex))

    @property
    def count(self) -> int:
        return self.times.size

    def upto(self, t: float) -> int:
        return int(np.searchsorted(self.times, t, side="right"))


# ---------------------------------------------------------------------------
# Path types


@dataclass(frozen=True)
class MatrixLevyPath:
    """Hermitian matrix Levy path: drift + Gaussian component + jumps."""

    d: int
    horizon: float
    drift: np.ndarray  # (d, d) Hermitian, per unit time
    gaussian: object | None
    jumps: RankOneJumps

    def __post_init__(self):
        object.__setattr__(self, "drift", as_hermitian(self.drift))
        if self.drift.shape != (self.d, self.d):
            raise ValueError("drift shape does not match dimension")
        if self.jumps.count and self.jumps.times[-1] > self.horizon:
            raise ValueError("jump beyond the path horizon")


@dataclass(frozen=True)
class VectorLevyPath:
    """C^d Levy path: drift vector + loading on a Brownian driver + jumps."""

    d: int
    horizon: float
    drift: np.ndarray  # (d,) per unit time
    loading: np.ndarray | None  # (d, d), applied to the driver
    driver: BrownianDriver | None
    jumps: VectorJumps

    def __post_init__(self):
        drift = np.asarray(self.drift, dtype=complex)
        if drift.shape != (self.d,):
            raise ValueError("drift must be a length-d vector")
        object.__setattr__(self, "drift", drift)
        if (self.loading is None) != (self.driver is None):
            raise ValueError("loading and driver must be given together")
        if self.loading is not None:
            loading = np.asarray(self.loading, dtype=complex)
            if loading.shape != (self.d, self.d):
                raise ValueError("loading must be d x d")
            object.__setattr__(self, "loading", loading)
        if self.jumps.count and self.jumps.times[-1] > self.horizon:
            raise ValueError("jump beyond the path horizon")


def evaluate_path(path, t: float) -> np.ndarray:
    """Path value at time t: drift*t + realized Gaussian part + jumps <= t.

    The Gaussian component is read at the nearest driver grid point <= t;
    drift and jump contributions are exact at any t in [0, horizon].
    """
    if t < 0 or t > path.horizon:
        raise ValueError(f"time {t} outside [0, {path.horizon}]")
    if isinstance(path, MatrixLevyPath):
        val = t * path.drift.astype(complex)
        if path.gaussian is not None:
            k = int(np.searchsorted(path.gaussian.grid, t, side="right")) - 1
            val = val + _gaussian_value(path.gaussian, path.d, k)
        val = val + path.jumps.matrix_sum(path.jumps.upto(t))
        return val
    if isinstance(path, VectorLevyPath):
        val = t * path.drift
        if path.driver is not None:
            k = path.driver.index_at(t)
            val = val + path.loading @ path.driver.values[k]
        n = path.jumps.upto(t)
        if n:
            val = val + path.jumps.vectors[:n].sum(axis=0)
        return val
    raise TypeError(f"cannot evaluate object of type {type(path).__name__}")


def _gaussian_value(gauss, d: int, k: int) -> np.ndarray:
    if isinstance(gauss, ScalarIdentityGaussianPart):
        return gauss.driver.values[k] * np.eye(d, dtype=complex)
    return gauss.value_at(k)


# ---------------------------------------------------------------------------
# Samplers


def sample_uniform_sphere(d: int, rng: np.random.Generator, size: int | None = None):
    """Uniform draw(s) from the unit sphere of C^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    n = 1 if size is None else size
    z = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    z /= np.linalg.norm(z, axis=1)[:, None]
    return z[0] if size is None else z


def sample_poisson_times(rate: float, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Arrival times of a Poisson process on (0, horizon].

    Exponential spacings; in the (measure-zero) event of a collision at
    double precision the whole sequence is resampled.
    """
    if rate <= 0:
        return np.empty(0)
    times = []
    t = 0.0
    while True:
        t += rng.exponential(1.0 / rate)
        if t > horizon:
            break
        times.append(t)
    arr = np.asarray(times)
    if np.unique(arr).size != arr.size:
        return sample_poisson_times(rate, horizon, rng)
    return arr


def sample_bgcd_gaussian_part(
    d: int,
    variance: float,
    grid: np.ndarray,
    rng: np.random.Generator,
) -> MatrixLevyPath:
    """Gaussian BGCD component as a pure-Gaussian Hermitian path.

    For Hermitian Theta, Var[tr(Theta M(t))] equals
    t * variance * (tr(Theta^2) + tr(Theta)^2) / (d + 1).
    """
    if variance < 0:
        raise ValueError("variance must be >= 0")
    grid = np.asarray(grid, dtype=float)
    gauss = BGCDGaussianPart(
        variance,
        sample_hermitian_driver(d, grid, rng),
        sample_scalar_driver(grid, rng),
    )
    return MatrixLevyPath(
        d, float(grid[-1]), np.zeros((d, d)), gauss, RankOneJumps.empty(d)
    )


def _thinned_jump_draws(measure, d, clock, horizon, rng):
    """Poisson arrival times with (beta, u) marks; zero betas dropped.

    Discrete convolution powers may place an atom at zero; a zero draw is
    not a jump, so the arrival is discarded (thinning the Poisson stream
    to the actual jump measure).
    """
    times = sample_poisson_times(clock, horizon, rng)
    n = times.size
    betas = np.asarray(measure.sample(rng, n), dtype=float) if n else np.empty(0)
    keep = betas != 0.0
    times, betas = times[keep], betas[keep]
    dirs = sample_uniform_sphere(d, rng, size=times.size)
    return times, betas, dirs


def sample_bgcd_compound_poisson(
    d: int,
    law,
    psi: float,
    horizon: float,
    rate_scaling: str = "esd_consistent",
    rng: np.random.Generator | None = None,
) -> MatrixLevyPath:
    """Compound Poisson BGCD path psi*t*I_d + sum beta_j u_j u_j*.

    Jump sizes are nu/nu(R) draws from the law's (finite) jump measure,
    directions are uniform on the unit sphere, and the Poisson clock runs
    at d*nu(R) (esd_consistent) or nu(R) (literal).
    """
    _check_rate_scaling(rate_scaling)
    measure = law.triplet().levy_measure
    if not measure.finite:
        raise ValueError("law must have finite jump activity")
    if measure.total_mass > 0:
        clock = _clock_rate(d, measure.total_mass, rate_scaling)
        times, betas, dirs = _thinned_jump_draws(measure, d, clock, horizon, rng)
        jumps = RankOneJumps(times, betas, dirs)
    else:
        jumps = RankOneJumps.empty(d)
    drift = psi * np.eye(d)
    return MatrixLevyPath(d, horizon, drift, None, jumps)


def sample_bgcd_path(
    d: int,
    law,
    horizon: float,
    rate_scaling: str = "esd_consistent",
    rng: np.random.Generator | None = None,
    grid: np.ndarray | None = None,
) -> MatrixLevyPath:
    """Full BGCD ensemble path for a law with triplet (a^2, psi, nu).

    Combines the literal linear drift of the law, the Gaussian component
    when a^2 > 0, and the compound Poisson jump part when nu is a finite
    nonzero measure.  Infinite-activity laws are rejected (approximate
    them through a discretization level instead).
    """
    _check_rate_scaling(rate_scaling)
    trip = law.triplet()
    if not trip.levy_measure.finite:
        raise ValueError("law must have finite jump activity")
    gauss = None
    if trip.gaussian_variance > 0:
        g = brownian_grid(horizon) if grid is None else np.asarray(grid, dtype=float)
        gauss = BGCDGaussianPart(
            trip.gaussian_variance,
            sample_hermitian_driver(d, g, rng),
            sample_scalar_driver(g, rng),
        )
    jumps = RankOneJumps.empty(d)
    if trip.levy_measure.total_mass > 0:
        clock = _clock_rate(d, trip.levy_measure.total_mass, rate_scaling)
        times, betas, dirs = _thinned_jump_draws(trip.levy_measure, d, clock, horizon, rng)
        jumps = RankOneJumps(times, betas, dirs)
    drift = law.drift_coefficient() * np.eye(d)
    return MatrixLevyPath(d, horizon, drift, gauss, jumps)


def build_covariation_triple(
    d: int,
    psi: float,
    times: np.ndarray,
    betas: np.ndarray,
    dirs: np.ndarray,
    horizon: float,
    driver: BrownianDriver,
) -> tuple[VectorLevyPath, VectorLevyPath, MatrixLevyPath]:
    """Assemble (X, Y, M) from common draws so that [X, Y*] == M exactly.

    X = sqrt(|psi|) B + sum sqrt(|beta_j|) u_j,
    Y = sign(psi) sqrt(|psi|) B + sum sign(beta_j) sqrt(|beta_j|) u_j,
    M = psi t I_d + sum beta_j u_j u_j*, all on the same (beta_j, u_j)
    and the same Brownian driver B.
    """
    root = math.sqrt(abs(psi))
    load_x = root * np.eye(d)
    load_y = float(np.sign(psi)) * root * np.eye(d)
    roots = np.sqrt(np.abs(betas))
    x_jumps = VectorJumps(times, roots[:, None] * dirs)
    y_jumps = VectorJumps(times, (np.sign(betas) * roots)[:, None] * dirs)
    zero = np.zeros(d)
    x = VectorLevyPath(d, horizon, zero, load_x, driver, x_jumps)
    y = VectorLevyPath(d, horizon, zero, load_y, driver, y_jumps)
    m = MatrixLevyPath(d, horizon, psi * np.eye(d), None, RankOneJumps(times, betas, dirs))
    return x, y, m


def sample_bgcd_approx(
    d: int,
    law,
    n: int,
    horizon: float,
    rate_scaling: str = "esd_consistent",
    rng: np.random.Generator | None = None,
    grid: np.ndarray | None = None,
) -> tuple[VectorLevyPath, VectorLevyPath, MatrixLevyPath]:
    """Level-n compound Poisson approximation triple (X, Y, M).

    Jump sizes are mu^{*1/n} draws on a Poisson clock of rate d*n
    (esd_consistent) or n (literal); psi is the law's centered triplet
    drift, carried by a shared Brownian loading sqrt(|psi|).  The matrix
    path M equals the structural covariation [X, Y*] at every time, and
    M(1) converges in distribution to the BGCD ensemble of the law as n
    grows.
    """
    _check_rate_scaling(rate_scaling)
    if n < 1:
        raise ValueError("n must be >= 1")
    psi = law.triplet().drift
    clock = _clock_rate(d, float(n), rate_scaling)
    times = sample_poisson_times(clock, horizon, rng)
    betas = (
        np.asarray(sample_conv_power(law, 1.0 / n, rng, size=times.size), dtype=float)
        if times.size
        else np.empty(0)
    )
    keep = betas != 0.0
    times, betas = times[keep], betas[keep]
    dirs = sample_uniform_sphere(d, rng, size=times.size)
    g = brownian_grid(horizon) if grid is None else np.asarray(grid, dtype=float)
    driver = sample_vector_driver(d, g, rng)
    return build_covariation_triple(d, psi, times, betas, dirs, horizon, driver)


def matrix_levy_exponent(
    d: int,
    law,
    theta: np.ndarray,
    mc_samples: int,
    rng: np.random.Generator,
) -> tuple[complex, float]:
    """Log characteristic exponent of the BGCD ensemble at a Hermitian theta.

    Returns (value, standard_error) where

        value = i psi tr(theta)
                - a^2 (tr(theta^2) + tr(theta)^2) / (2 (d + 1))
                + d nu(R) E[exp(i beta u* theta u) - 1
                            - i beta u* theta u / (1 + beta^2)]

    with the expectation over beta ~ nu/nu(R) and u uniform on the sphere
    estimated by Monte Carlo.  exp(value) approximates E[exp(i tr(theta
    M(1)))] for the esd_consistent ensemble.
    """
    if mc_samples < 1000:
        raise ValueError("mc_samples must be >= 1000")
    theta = as_hermitian(theta)
    if theta.shape != (d, d):
        raise ValueError("theta must be d x d")
    trip = law.triplet()
    if not trip.levy_measure.finite:
        raise ValueError("law must have finite jump activity")
    tr_theta = float(np.trace(theta).real)
    tr_theta2 = float(np.trace(theta @ theta).real)
    value = 1j * trip.drift * tr_theta
    value -= trip.gaussian_variance * (tr_theta2 + tr_theta**2) / (2.0 * (d + 1))
    se = 0.0
    mass = trip.levy_measure.total_mass
    if mass > 0:
        betas = np.asarray(trip.levy_measure.sample(rng, mc_samples), dtype=float)
        us = sample_uniform_sphere(d, rng, size=mc_samples)
        quad = np.einsum("jd,de,je->j", us.conj(), theta, us).real
        x = betas * quad
        integrand = np.exp(1j * x) - 1.0 - 1j * x / (1.0 + betas**2)
        value += d * mass * complex(np.mean(integrand))
        var = np.var(integrand.real, ddof=1) + np.var(integrand.imag, ddof=1)
        se = d * mass * math.sqrt(var / mc_samples)
    return complex(value), float(se)


# ---------------------------------------------------------------------------
# JSON dump format for matrix paths


def _complex_to_json(arr: np.ndarray) -> list:
    arr = np.asarray(arr, dtype=complex)
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def _complex_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _driver_increments(driver: BrownianDriver) -> np.ndarray:
    return np.diff(driver.values, axis=0)


def _driver_from_increments(grid, incr, kind) -> BrownianDriver:
    incr = np.asarray(incr)
    zero = np.zeros((1,) + incr.shape[1:], dtype=incr.dtype)
    values = np.concatenate([zero, np.cumsum(incr, axis=0)])
    return BrownianDriver(np.asarray(grid, dtype=float), values, kind)


def _gaussian_to_json(gauss) -> dict | None:
    if gauss is None:
        return None
    if isinstance(gauss, BGCDGaussianPart):
        return {
            "type": "bgcd",
            "variance": gauss.variance,
            "grid": gauss.grid.tolist(),
            "matrix_increments": _complex_to_json(_driver_increments(gauss.matrix_driver)),
            "scalar_increments": _driver_increments(gauss.scalar_driver).tolist(),
        }
    if isinstance(gauss, ScalarIdentityGaussianPart):
        return {
            "type": "scalar_identity",
            "grid": gauss.grid.tolist(),
            "increments": _driver_increments(gauss.driver).tolist(),
        }
    if isinstance(gauss, KroneckerGaussianPart):
        return {
            "type": "kronecker",
            "sigma_left": _complex_to_json(gauss.sigma_left),
            "sigma_right": _complex_to_json(gauss.sigma_right),
            "grid": gauss.grid.tolist(),
            "increments": _complex_to_json(_driver_increments(gauss.driver)),
        }
    raise TypeError(f"cannot serialize Gaussian part {type(gauss).__name__}")


def _gaussian_from_json(data) -> object | None:
    if data is None:
        return None
    kind = data["type"]
    if kind == "bgcd":
        return BGCDGaussianPart(
            float(data["variance"]),
            _driver_from_increments(
                data["grid"], _complex_from_json(data["matrix_increments"]), "hermitian"
            ),
            _driver_from_increments(
                data["grid"], np.asarray(data["scalar_increments"], dtype=float), "scalar"
            ),
        )
    if kind == "scalar_identity":
        return ScalarIdentityGaussianPart(
            _driver_from_increments(
                data["grid"], np.asarray(data["increments"], dtype=float), "scalar"
            )
        )
    if kind == "kronecker":
        return KroneckerGaussianPart(
            _complex_from_json(data["sigma_left"]),
            _complex_from_json(data["sigma_right"]),
            _driver_from_increments(
                data["grid"], _complex_from_json(data["increments"]), "vector"
            ),
        )
    raise ValueError(f"unknown Gaussian part type {kind!r}")


def path_to_json(path: MatrixLevyPath) -> dict:
    """Serialize a matrix path: drift, Gaussian spec + increments, jumps."""
    return {
        "d": path.d,
        "T": path.horizon,
        "drift": _complex_to_json(path.drift),
        "gaussian": _gaussian_to_json(path.gaussian),
        "jumps": [
            {
                "t": float(t),
                "lambda": float(lam),
                "u": _complex_to_json(u),
            }
            for t, lam, u in zip(
                path.jumps.times, path.jumps.eigenvalues, path.jumps.directions
            )
        ],
    }


def path_from_json(data: dict) -> MatrixLevyPath:
    d = int(data["d"])
    jumps = data["jumps"]
    if jumps:
        times = np.array([j["t"] for j in jumps])
        lams = np.array([j["lambda"] for j in jumps])
        dirs = np.stack([_complex_from_json(j["u"]) for j in jumps])
        jump_set = RankOneJumps(times, lams, dirs)
    else:
        jump_set = RankOneJumps.empty(d)
    return MatrixLevyPath(
        d,
        float(data["T"]),
        _complex_from_json(data["drift"]),
        _gaussian_from_json(data["gaussian"]),
        jump_set,
    )
