"""Seeded, reproducible experiment drivers.

Each command consumes a JSON-described configuration and writes CSV bulk
output plus a JSON report (and rendered figures) into an output
directory.  Reproducibility contract: the seed plus the replica index
determines every random draw, replicas get independent streams through
seed-sequence spawning, and results are reduced in replica order, so
outputs are byte-identical across runs and worker counts.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .covariation import adjoint, structural_covariation
from .hermitian import frobenius_norm
from .paths import (
    RATE_SCALINGS,
    VectorJumps,
    VectorLevyPath,
    evaluate_path,
    matrix_levy_exponent,
    sample_bgcd_approx,
    sample_bgcd_path,
    sample_uniform_sphere,
)
from .representations import (
    bgcd_covariation_pair,
    sample_signed_path,
    sample_subordinator_path,
    subordinator_to_vector_process,
    verify_representation,
    wiener_hopf_split,
)
from .scalar_laws import (
    GaussianLaw,
    PoissonLaw,
    discretize,
    law_from_json,
    law_to_json,
    small_jump_second_moment,
    weak_convergence_probe,
)
from .spectral import esd, free_target_for, ks_distance

KINDS = ("spectrum", "verify", "approx", "exponent")

# Chunk size for bulk characteristic-function Monte Carlo; fixed so that
# the draw layout is independent of the worker count.
CF_CHUNK = 2048

# Sub-stream identifiers for seed-sequence spawning.
_STREAM_SPECTRUM = 0
_STREAM_VERIFY = 1
_STREAM_APPROX = 2
_STREAM_APPROX_DIAG = 3
_STREAM_THETA = 4
_STREAM_CF = 5
_STREAM_EXPONENT = 6


class ConfigError(ValueError):
    """Invalid experiment configuration, carrying the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config error at '{field}': {message}")


def replica_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator derived from (seed, key) deterministically."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    d: int
    law: object
    replicas: int
    seed: int
    horizon: float = 1.0
    grid_step: float | None = None
    n_values: tuple[int, ...] | None = None
    rate_scaling: str = "esd_consistent"
    epsilon: float = 1.0
    mc_samples: int = 200_000
    theta_count: int = 5
    theta_scale: float = 0.35
    check_threshold: float | None = None
    out_dir: str | None = None

    _FIELDS = {
        "kind", "d", "T", "grid_step", "law", "n", "replicas", "seed",
        "rate_scaling", "epsilon", "mc_samples", "theta_count",
        "theta_scale", "check_threshold", "out_dir",
    }

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        for key in data:
            if key not in cls._FIELDS:
                raise ConfigError(key, "unknown field")
        for key in ("kind", "d", "law", "replicas", "seed"):
            if key not in data:
                raise ConfigError(key, "missing required field")
        kind = data["kind"]
        if kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}")
        d = data["d"]
        if not isinstance(d, int) or d < 1:
            raise ConfigError("d", "must be a positive integer")
        replicas = data["replicas"]
        if not isinstance(replicas, int) or replicas < 1:
            raise ConfigError("replicas", "must be a positive integer")
        seed = data["seed"]
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed", "must be a nonnegative integer")
        horizon = float(data.get("T", 1.0))
        if horizon <= 0:
            raise ConfigError("T", "must be > 0")
        grid_step = data.get("grid_step")
        if grid_step is not None:
            grid_step = float(grid_step)
            if grid_step <= 0:
                raise ConfigError("grid_step", "must be > 0")
        try:
            law = law_from_json(data["law"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError("law", str(exc)) from exc
        n_values = data.get("n")
        if n_values is not None:
            if (
                not isinstance(n_values, (list, tuple))
                or not n_values
                or not all(isinstance(n, int) and n >= 1 for n in n_values)
            ):
                raise ConfigError("n", "must be a non-empty list of integers >= 1")
            n_values = tuple(n_values)
        rate_scaling = data.get("rate_scaling", "esd_consistent")
        if rate_scaling not in RATE_SCALINGS:
            raise ConfigError("rate_scaling", f"must be one of {RATE_SCALINGS}")
        epsilon = float(data.get("epsilon", 1.0))
        if epsilon <= 0:
            raise ConfigError("epsilon", "must be > 0")
        mc_samples = data.get("mc_samples", 200_000)
        if not isinstance(mc_samples, int) or mc_samples < 1000:
            raise ConfigError("mc_samples", "must be an integer >= 1000")
        theta_count = data.get("theta_count", 5)
        if not isinstance(theta_count, int) or theta_count < 1:
            raise ConfigError("theta_count", "must be a positive integer")
        theta_scale = float(data.get("theta_scale", 0.35))
        if theta_scale <= 0:
            raise ConfigError("theta_scale", "must be > 0")
        check_threshold = data.get("check_threshold")
        if check_threshold is not None:
            check_threshold = float(check_threshold)
            if check_threshold <= 0:
                raise ConfigError("check_threshold", "must be > 0")
        out_dir = data.get("out_dir")
        config = cls(
            kind=kind,
            d=d,
            law=law,
            replicas=replicas,
            seed=seed,
            horizon=horizon,
            grid_step=grid_step,
            n_values=n_values,
            rate_scaling=rate_scaling,
            epsilon=epsilon,
            mc_samples=mc_samples,
            theta_count=theta_count,
            theta_scale=theta_scale,
            check_threshold=check_threshold,
            out_dir=out_dir,
        )
        config._validate_for_kind()
        return config

    def _validate_for_kind(self) -> None:
        finite = self.law.triplet().levy_measure.finite
        if self.kind == "approx":
            if self.n_values is None:
                raise ConfigError("n", "approx needs a list of discretization levels")
        elif not finite:
            raise ConfigError(
                "law",
                f"{self.kind} needs finite jump activity; approximate "
                "infinite-activity laws through the approx command",
            )
        if self.kind == "exponent" and self.rate_scaling != "esd_consistent":
            raise ConfigError(
                "rate_scaling",
                "the exponent's jump intensity carries the dimension factor; "
                "use esd_consistent",
            )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "d": self.d,
            "T": self.horizon,
            "grid_step": self.grid_step,
            "law": law_to_json(self.law),
            "n": list(self.n_values) if self.n_values is not None else None,
            "replicas": self.replicas,
            "seed": self.seed,
            "rate_scaling": self.rate_scaling,
            "epsilon": self.epsilon,
            "mc_samples": self.mc_samples,
            "theta_count": self.theta_count,
            "theta_scale": self.theta_scale,
            "check_threshold": self.check_threshold,
            "out_dir": self.out_dir,
        }


@dataclass
class RunReport:
    """Outcome of one command: config echo, per-replica rows, aggregates.

    Wall-clock time is kept out of the serialized report so repeated runs
    with the same configuration produce byte-identical files.
    """

    command: str
    version: str
    config: dict
    per_replica: list
    aggregates: dict
    wall_clock_seconds: float

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "per_replica": self.per_replica,
            "aggregates": self.aggregates,
        }


# ---------------------------------------------------------------------------
# Shared infrastructure


def _map_ordered(fn, items, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_eigen_csv(path: Path, eigen_lists: list) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replica", "index", "eigenvalue"])
        for replica, eigs in enumerate(eigen_lists):
            for index, value in enumerate(eigs):
                writer.writerow([replica, index, f"{value:.17g}"])


def _mean_se(values: list) -> tuple[float | None, float | None]:
    vals = [v for v in values if v is not None]
    if not vals:
        return None, None
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return mean, se


def _maybe_free_target(law):
    try:
        return free_target_for(law)
    except ValueError:
        return None


# ---------------------------------------------------------------------------
# spectrum


def run_spectrum(config: ExperimentConfig, out_dir: Path, jobs: int = 1,
                 render: bool = True) -> RunReport:
    """Sample the ensemble at the horizon and compare spectra to the target."""
    start = time.perf_counter()
    target = _maybe_free_target(config.law)

    def work(r: int):
        rng = replica_rng(config.seed, _STREAM_SPECTRUM, r)
        path = sample_bgcd_path(
            config.d, config.law, config.horizon, config.rate_scaling, rng
        )
        value = evaluate_path(path, config.horizon)
        spectrum = esd(value)
        row = {
            "replica": r,
            "ks": ks_distance(spectrum, target) if target is not None else None,
            "spectral_mean": spectrum.mean(),
            "jump_count": int(path.jumps.count),
        }
        return row, spectrum.eigenvalues

    results = _map_ordered(work, range(config.replicas), jobs)
    rows = [row for row, _ in results]
    eigen_lists = [eigs for _, eigs in results]
    ks_mean, ks_se = _mean_se([row["ks"] for row in rows])
    aggregates = {
        "ks_mean": ks_mean,
        "ks_se": ks_se,
        "target": None if target is None else type(target).__name__,
        "eigenvalue_count": int(sum(len(e) for e in eigen_lists)),
    }
    _write_eigen_csv(out_dir / "eigenvalues.csv", eigen_lists)
    report = RunReport(
        "spectrum", __version__, config.to_json(), rows, aggregates,
        time.perf_counter() - start,
    )
    _write_json(out_dir / "report.json", report.to_json())
    if render:
        from .figures import render_spectrum

        render_spectrum(
            np.concatenate(eigen_lists), target,
            out_dir / "figures" / "spectrum_esd.png",
        )
    return report


# ---------------------------------------------------------------------------
# verify


def _inject_extra_jump(x: VectorLevyPath, t: float) -> VectorLevyPath:
    """Defect injection: add a unit e_1 jump at time t (for --perturb)."""
    e1 = np.zeros((1, x.d), dtype=complex)
    e1[0, 0] = 1.0
    times = np.append(x.jumps.times, t)
    vectors = np.concatenate([x.jumps.vectors, e1])
    order = np.argsort(times)
    return VectorLevyPath(
        x.d, x.horizon, x.drift, x.loading, x.driver,
        VectorJumps(times[order], vectors[order]),
    )


def run_verify(config: ExperimentConfig, out_dir: Path, jobs: int = 1,
               perturb: bool = False, render: bool = True) -> RunReport:
    """Exercise the three representation identities on random paths."""
    start = time.perf_counter()
    psi = float(config.law.triplet().drift)

    def work(r: int):
        rng = replica_rng(config.seed, _STREAM_VERIFY, r)
        d_sub = int(rng.integers(1, 7))
        sub = sample_subordinator_path(d_sub, config.horizon, rng)
        x = subordinator_to_vector_process(sub, rng)
        if perturb:
            x = _inject_extra_jump(x, 0.9 * config.horizon)
        rep_quad = verify_representation(sub, x, mode="quadratic")

        d_sgn = int(rng.integers(1, 7))
        signed = sample_signed_path(d_sgn, config.horizon, rng)
        xs, ys = wiener_hopf_split(signed, rng)
        rep_diff = verify_representation(signed, xs, ys, mode="difference")
        disjoint = np.intersect1d(xs.jumps.times, ys.jumps.times).size == 0

        xp, yp, mp = bgcd_covariation_pair(
            config.d, config.law, psi, config.horizon, config.rate_scaling, rng
        )
        rep_pair = verify_representation(mp, xp, yp, mode="pair")
        return {
            "replica": r,
            "quadratic_max": rep_quad.max_discrepancy,
            "difference_max": rep_diff.max_discrepancy,
            "pair_max": rep_pair.max_discrepancy,
            "jump_times_disjoint": bool(disjoint),
        }

    rows = _map_ordered(work, range(config.replicas), jobs)
    aggregates = {
        "quadratic_max": max(row["quadratic_max"] for row in rows),
        "difference_max": max(row["difference_max"] for row in rows),
        "pair_max": max(row["pair_max"] for row in rows),
        "all_jump_times_disjoint": all(row["jump_times_disjoint"] for row in rows),
        "perturbed": perturb,
    }
    report = RunReport(
        "verify", __version__, config.to_json(), rows, aggregates,
        time.perf_counter() - start,
    )
    _write_json(out_dir / "report.json", report.to_json())
    if render:
        from .figures import render_verify

        render_verify(aggregates, out_dir / "figures" / "verify_discrepancy.png")
    return report


# ---------------------------------------------------------------------------
# approx


def _ramp(r: float) -> float:
    """Bounded continuous test function vanishing on (-1/4, 1/4)."""
    return float(np.clip((abs(r) - 0.25) / 0.25, 0.0, 1.0))


def run_approx(config: ExperimentConfig, out_dir: Path, jobs: int = 1,
               render: bool = True) -> RunReport:
    """Discretized-ensemble spectra and triplet-convergence diagnostics."""
    start = time.perf_counter()
    target = _maybe_free_target(config.law)
    n_values = config.n_values

    def work(task):
        i_n, r = task
        n = n_values[i_n]
        rng = replica_rng(config.seed, _STREAM_APPROX, i_n, r)
        x, y, m = sample_bgcd_approx(
            config.d, config.law, n, config.horizon, config.rate_scaling, rng
        )
        value = evaluate_path(m, config.horizon)
        spectrum = esd(value)
        pair = structural_covariation(x, adjoint(y), config.horizon).value
        return {
            "n": n,
            "replica": r,
            "ks": ks_distance(spectrum, target) if target is not None else None,
            "identity_discrepancy": frobenius_norm(pair - value),
        }, spectrum.eigenvalues

    tasks = [(i_n, r) for i_n in range(len(n_values)) for r in range(config.replicas)]
    results = _map_ordered(work, tasks, jobs)
    rows = [row for row, _ in results]

    aggregates = {"levels": []}
    for i_n, n in enumerate(n_values):
        level_rows = [row for row in rows if row["n"] == n]
        eigen_lists = [
            eigs for (row, eigs) in results if row["n"] == n
        ]
        _write_eigen_csv(out_dir / f"eigenvalues_n{n}.csv", eigen_lists)
        ks_mean, ks_se = _mean_se([row["ks"] for row in level_rows])
        rng_diag = replica_rng(config.seed, _STREAM_APPROX_DIAG, i_n)
        discretized = discretize(config.law, n, mc_samples=20_000, rng=rng_diag)
        moment, moment_se = small_jump_second_moment(
            discretized, config.epsilon, config.mc_samples, rng_diag
        )
        (probe, probe_se), (ref, ref_se) = weak_convergence_probe(
            config.law, n, _ramp, 0.25, min(config.mc_samples, 200_000), rng_diag
        )
        aggregates["levels"].append({
            "n": n,
            "ks_mean": ks_mean,
            "ks_se": ks_se,
            "max_identity_discrepancy": max(
                row["identity_discrepancy"] for row in level_rows
            ),
            "small_jump_second_moment": moment,
            "small_jump_se": moment_se,
            "jump_integral": probe,
            "jump_integral_se": probe_se,
            "jump_integral_reference": ref,
            "jump_integral_reference_se": ref_se,
        })
    report = RunReport(
        "approx", __version__, config.to_json(), rows, aggregates,
        time.perf_counter() - start,
    )
    _write_json(out_dir / "report.json", report.to_json())
    if render:
        from .figures import render_approx

        render_approx(aggregates["levels"], out_dir / "figures" / "approx_ks.png")
    return report


# ---------------------------------------------------------------------------
# exponent


def _sample_thetas(config: ExperimentConfig) -> list:
    rng = replica_rng(config.seed, _STREAM_THETA)
    thetas = []
    for _ in range(config.theta_count):
        g = rng.normal(size=(config.d, config.d)) + 1j * rng.normal(
            size=(config.d, config.d)
        )
        thetas.append(config.theta_scale * (g + g.conj().T) / 2.0)
    return thetas


def empirical_trace_cf(
    config: ExperimentConfig, thetas: list, jobs: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical characteristic function E[exp(i tr(theta M(T)))].

    Vectorizes replicas in fixed-size chunks (independent of the worker
    count) and reduces chunk statistics in order.  Returns per-theta
    complex means and combined standard errors.
    """
    trip = config.law.triplet()
    mass = trip.levy_measure.total_mass
    clock = config.d * mass
    t_horizon = config.horizon
    drift0 = config.law.drift_coefficient()
    k = len(thetas)
    base_phase = np.array(
        [drift0 * t_horizon * float(np.trace(th).real) for th in thetas]
    )
    n_chunks = (config.replicas + CF_CHUNK - 1) // CF_CHUNK

    def work(c: int):
        rng = replica_rng(config.seed, _STREAM_CF, c)
        n_rep = min(CF_CHUNK, config.replicas - c * CF_CHUNK)
        counts = rng.poisson(clock * t_horizon, size=n_rep)
        total = int(counts.sum())
        betas = (
            np.asarray(trip.levy_measure.sample(rng, total), dtype=float)
            if total
            else np.empty(0)
        )
        us = sample_uniform_sphere(config.d, rng, size=total)
        rep_idx = np.repeat(np.arange(n_rep), counts)
        stats = np.zeros((k, 4))
        for j, theta in enumerate(thetas):
            quad = (
                np.einsum("jd,de,je->j", us.conj(), theta, us).real
                if total
                else np.empty(0)
            )
            sums = np.bincount(rep_idx, weights=betas * quad, minlength=n_rep)
            phase = base_phase[j] + sums
            stats[j] = [
                np.cos(phase).sum(),
                np.sin(phase).sum(),
                (np.cos(phase) ** 2).sum(),
                (np.sin(phase) ** 2).sum(),
            ]
        return stats

    chunk_stats = _map_ordered(work, range(n_chunks), jobs)
    totals = np.sum(chunk_stats, axis=0)
    r = config.replicas
    mean_re = totals[:, 0] / r
    mean_im = totals[:, 1] / r
    var_re = np.maximum(totals[:, 2] / r - mean_re**2, 0.0)
    var_im = np.maximum(totals[:, 3] / r - mean_im**2, 0.0)
    means = mean_re + 1j * mean_im
    ses = np.sqrt((var_re + var_im) / r)
    return means, ses


def run_exponent(config: ExperimentConfig, out_dir: Path, jobs: int = 1,
                 render: bool = True) -> RunReport:
    """Empirical characteristic function against the analytic exponent."""
    start = time.perf_counter()
    thetas = _sample_thetas(config)
    empirical, emp_ses = empirical_trace_cf(config, thetas, jobs)
    rows = []
    for j, theta in enumerate(thetas):
        value, se_exp = matrix_levy_exponent(
            config.d, config.law, theta, config.mc_samples,
            replica_rng(config.seed, _STREAM_EXPONENT, j),
        )
        theory = np.exp(config.horizon * value)
        se_theory = abs(theory) * config.horizon * se_exp
        diff = abs(empirical[j] - theory)
        denom = math.hypot(emp_ses[j], se_theory)
        z = 0.0 if diff == 0.0 else (math.inf if denom == 0.0 else diff / denom)
        rows.append({
            "theta_index": j,
            "empirical": [float(empirical[j].real), float(empirical[j].imag)],
            "theory": [float(theory.real), float(theory.imag)],
            "se_empirical": float(emp_ses[j]),
            "se_theory": float(se_theory),
            "z": float(z),
        })
    aggregates = {
        "max_z": max(row["z"] for row in rows),
        "all_within_3se": all(row["z"] <= 3.0 for row in rows),
    }
    report = RunReport(
        "exponent", __version__, config.to_json(), rows, aggregates,
        time.perf_counter() - start,
    )
    _write_json(out_dir / "report.json", report.to_json())
    if render:
        from .figures import render_exponent

        render_exponent(
            [row["z"] for row in rows], out_dir / "figures" / "exponent_z.png"
        )
    return report


# ---------------------------------------------------------------------------
# dispatch and threshold checks


_RUNNERS = {
    "spectrum": run_spectrum,
    "verify": run_verify,
    "approx": run_approx,
    "exponent": run_exponent,
}

IDENTITY_TOL = 1e-10


def run_experiment(config: ExperimentConfig, out_dir, jobs: int = 1,
                   perturb: bool = False, render: bool = True) -> RunReport:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if render:
        (out_dir / "figures").mkdir(exist_ok=True)
    if config.kind == "verify":
        return run_verify(config, out_dir, jobs, perturb=perturb, render=render)
    if perturb:
        raise ConfigError("kind", "--perturb only applies to the verify command")
    return _RUNNERS[config.kind](config, out_dir, jobs, render=render)


def _default_ks_threshold(law) -> float | None:
    if isinstance(law, GaussianLaw):
        return 0.05
    if isinstance(law, PoissonLaw):
        return 0.08
    return None


def check_passed(config: ExperimentConfig, report: RunReport) -> tuple[bool, str]:
    """Acceptance-threshold check backing the CLI --check flag."""
    agg = report.aggregates
    if report.command == "verify":
        worst = max(agg["quadratic_max"], agg["difference_max"], agg["pair_max"])
        ok = worst <= IDENTITY_TOL and agg["all_jump_times_disjoint"]
        return ok, f"max identity discrepancy {worst:.3e} (tolerance {IDENTITY_TOL})"
    if report.command == "spectrum":
        threshold = config.check_threshold or _default_ks_threshold(config.law)
        if threshold is None or agg["ks_mean"] is None:
            return False, "no spectral target or threshold available"
        return agg["ks_mean"] <= threshold, (
            f"mean KS {agg['ks_mean']:.4f} vs threshold {threshold}"
        )
    if report.command == "approx":
        threshold = config.check_threshold or 0.1
        last = agg["levels"][-1]
        if last["ks_mean"] is None:
            return False, "no spectral target available"
        ok = last["ks_mean"] <= threshold and all(
            level["max_identity_discrepancy"] <= IDENTITY_TOL
            for level in agg["levels"]
        )
        return ok, (
            f"mean KS at n={last['n']} is {last['ks_mean']:.4f} "
            f"vs threshold {threshold}"
        )
    if report.command == "exponent":
        return agg["all_within_3se"], f"max |z| = {agg['max_z']:.3f} (limit 3)"
    return False, f"unknown command {report.command}"
