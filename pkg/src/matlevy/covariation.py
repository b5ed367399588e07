"""Matrix covariation and quadratic variation of Levy paths.

Two routes are provided.  The structural route is exact: the continuous
part is computed analytically from Brownian loadings and the declared
driver-sharing relations ([A B, B* C](t) = t A C for a shared standard
driver, zero for independent drivers), and the jump part is the sum of
jump products over common jump times.  The realized route is the plain
grid estimator sum (X_{k+1}-X_k)(Y_{k+1}-Y_k), used as a statistical
cross-check of the structural values.

Driver relations are declared by object identity: two paths ride the
same Brownian motion exactly when they reference the same driver object,
and distinct drivers are treated as independent.  Partially correlated
drivers are not representable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hermitian import frobenius_norm
from .paths import (
    BGCDGaussianPart,
    KroneckerGaussianPart,
    MatrixLevyPath,
    ScalarIdentityGaussianPart,
    VectorLevyPath,
    evaluate_path,
)


@dataclass(frozen=True)
class CovariationResult:
    """Covariation split into continuous and jump parts."""

    value: np.ndarray
    continuous: np.ndarray
    jump: np.ndarray
    method: str  # "structural" | "realized"

    def to_json(self) -> dict:
        from .paths import _complex_to_json

        return {
            "method": self.method,
            "value": _complex_to_json(self.value),
            "continuous": _complex_to_json(self.continuous),
            "jump": _complex_to_json(self.jump),
        }


@dataclass(frozen=True)
class Adjoint:
    """Marker wrapping a path to mean its conjugate transpose."""

    base: object


def adjoint(path) -> Adjoint:
    """View a path as its adjoint, e.g. [X, adjoint(Y)] is [X, Y*]."""
    if isinstance(path, Adjoint):
        raise TypeError("path is already an adjoint view")
    return Adjoint(path)


@dataclass(frozen=True)
class JumpPath:
    """Pure-jump matrix semimartingale of arbitrary rectangular shape.

    Used for generic covariation identities (bilinearity, transposes)
    where jumps need not be rank one.
    """

    rows: int
    cols: int
    horizon: float
    times: np.ndarray
    jumps: np.ndarray  # (N, rows, cols)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        jumps = np.asarray(self.jumps, dtype=complex)
        if jumps.shape != (times.size, self.rows, self.cols):
            raise ValueError("jump array shape mismatch")
        if times.size and (np.any(np.diff(times) <= 0) or times[0] <= 0):
            raise ValueError("jump times must be strictly increasing and > 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "jumps", jumps)

    def transpose(self) -> "JumpPath":
        return JumpPath(
            self.cols, self.rows, self.horizon, self.times,
            self.jumps.transpose(0, 2, 1),
        )

    def left_multiply(self, a: np.ndarray) -> "JumpPath":
        a = np.asarray(a, dtype=complex)
        return JumpPath(
            a.shape[0], self.cols, self.horizon, self.times,
            np.einsum("ij,njk->nik", a, self.jumps),
        )

    def right_multiply(self, c: np.ndarray) -> "JumpPath":
        c = np.asarray(c, dtype=complex)
        return JumpPath(
            self.rows, c.shape[1], self.horizon, self.times,
            np.einsum("njk,kl->njl", self.jumps, c),
        )

    @classmethod
    def from_matrix_path(cls, path: MatrixLevyPath) -> "JumpPath":
        if path.gaussian is not None:
            raise ValueError("only pure-jump matrix paths convert to JumpPath")
        dirs = path.jumps.directions
        mats = path.jumps.eigenvalues[:, None, None] * (
            dirs[:, :, None] * dirs.conj()[:, None, :]
        )
        return cls(path.d, path.d, path.horizon, path.jumps.times, mats)

    @classmethod
    def from_vector_path(cls, path: VectorLevyPath, as_adjoint: bool = False) -> "JumpPath":
        if path.driver is not None:
            raise ValueError("only pure-jump vector paths convert to JumpPath")
        vecs = path.jumps.vectors
        if as_adjoint:
            return cls(1, path.d, path.horizon, path.jumps.times, vecs.conj()[:, None, :])
        return cls(path.d, 1, path.horizon, path.jumps.times, vecs[:, :, None])


def _common_jump_indices(times_x: np.ndarray, times_y: np.ndarray):
    _, ix, iy = np.intersect1d(times_x, times_y, assume_unique=True, return_indices=True)
    return ix, iy


def _vector_pair_parts(x: VectorLevyPath, y: VectorLevyPath, t: float):
    """Continuous and jump parts of [X, Y*](t) for vector paths."""
    d = x.d
    if y.d != d:
        raise ValueError("dimension mismatch")
    if x.driver is not None and y.driver is not None and x.driver is y.driver:
        continuous = t * (x.loading @ y.loading.conj().T)
    else:
        continuous = np.zeros((d, d), dtype=complex)
    nx = x.jumps.upto(t)
    ny = y.jumps.upto(t)
    ix, iy = _common_jump_indices(x.jumps.times[:nx], y.jumps.times[:ny])
    if ix.size:
        xs = x.jumps.vectors[:nx][ix]
        ys = y.jumps.vectors[:ny][iy]
        jump = xs.T @ ys.conj()
    else:
        jump = np.zeros((d, d), dtype=complex)
    return continuous, jump


def _matrix_pair_jump(x: MatrixLevyPath, y: MatrixLevyPath, t: float) -> np.ndarray:
    """Jump part of [X, Y](t) via the rank-one factors.

    (lam_x u u*)(lam_y v v*) = lam_x lam_y (u* v is the inner product)
    u (u^H v) v*, computed as outer products without dense intermediates.
    """
    d = x.d
    nx = x.jumps.upto(t)
    ny = y.jumps.upto(t)
    ix, iy = _common_jump_indices(x.jumps.times[:nx], y.jumps.times[:ny])
    if ix.size == 0:
        return np.zeros((d, d), dtype=complex)
    ux = x.jumps.directions[:nx][ix]
    uy = y.jumps.directions[:ny][iy]
    coef = (
        x.jumps.eigenvalues[:nx][ix]
        * y.jumps.eigenvalues[:ny][iy]
        * np.einsum("jd,jd->j", ux.conj(), uy)
    )
    return (ux * coef[:, None]).T @ uy.conj()


def _jump_path_parts(x: JumpPath, y: JumpPath, t: float):
    if x.cols != y.rows:
        raise ValueError(f"shape mismatch: ({x.rows},{x.cols}) x ({y.rows},{y.cols})")
    continuous = np.zeros((x.rows, y.cols), dtype=complex)
    nx = int(np.searchsorted(x.times, t, side="right"))
    ny = int(np.searchsorted(y.times, t, side="right"))
    ix, iy = _common_jump_indices(x.times[:nx], y.times[:ny])
    if ix.size:
        jump = np.einsum("njk,nkl->jl", x.jumps[:nx][ix], y.jumps[:ny][iy])
    else:
        jump = np.zeros((x.rows, y.cols), dtype=complex)
    return continuous, jump


def quadratic_variation(path, t: float) -> CovariationResult:
    """Structural quadratic variation [X](t) = [X, X*](t).

    Continuous part by the Gaussian component's closed form, jump part
    sum of (jump)(jump)*; the value is PSD and independent of drift.
    """
    if t < 0 or t > path.horizon:
        raise ValueError(f"time {t} outside [0, {path.horizon}]")
    if isinstance(path, MatrixLevyPath):
        if path.gaussian is None:
            continuous = np.zeros((path.d, path.d), dtype=complex)
        else:
            continuous = path.gaussian.continuous_qv(path.d, t)
        n = path.jumps.upto(t)
        jump = path.jumps.matrix_sum(n, weights=path.jumps.eigenvalues**2)
    elif isinstance(path, VectorLevyPath):
        if path.driver is None:
            continuous = np.zeros((path.d, path.d), dtype=complex)
        else:
            continuous = t * (path.loading @ path.loading.conj().T)
        n = path.jumps.upto(t)
        vecs = path.jumps.vectors[:n]
        jump = vecs.T @ vecs.conj()
    else:
        raise TypeError(f"no quadratic variation for {type(path).__name__}")
    return CovariationResult(continuous + jump, continuous, jump, "structural")


def structural_covariation(x, y, t: float) -> CovariationResult:
    """Exact covariation [X, Y](t) of two declared paths.

    Supported pairs: vector path with an adjoint vector path (giving the
    d x d matrix [X, Y*]), matrix paths (Hermitian, so adjoint views are
    optional), and generic pure-jump paths of conformable shapes.
    """
    if isinstance(x, Adjoint):
        raise TypeError("adjoint view is only supported on the right factor")
    y_base = y.base if isinstance(y, Adjoint) else y
    if isinstance(x, VectorLevyPath) and isinstance(y_base, VectorLevyPath):
        if not isinstance(y, Adjoint):
            raise TypeError(
                "vector covariation needs an adjoint right factor; "
                "use structural_covariation(x, adjoint(y), t)"
            )
        if t < 0 or t > min(x.horizon, y_base.horizon):
            raise ValueError("time outside the common horizon")
        continuous, jump = _vector_pair_parts(x, y_base, t)
        return CovariationResult(continuous + jump, continuous, jump, "structural")
    if isinstance(x, MatrixLevyPath) and isinstance(y_base, MatrixLevyPath):
        if x is y_base:
            return quadratic_variation(x, t)
        if x.gaussian is not None or y_base.gaussian is not None:
            raise ValueError(
                "no declared driver relationship between distinct Gaussian "
                "matrix paths"
            )
        if t < 0 or t > min(x.horizon, y_base.horizon):
            raise ValueError("time outside the common horizon")
        d = x.d
        continuous = np.zeros((d, d), dtype=complex)
        jump = _matrix_pair_jump(x, y_base, t)
        return CovariationResult(jump.copy(), continuous, jump, "structural")
    if isinstance(x, JumpPath) and isinstance(y_base, JumpPath):
        if isinstance(y, Adjoint):
            y_base = JumpPath(
                y_base.cols, y_base.rows, y_base.horizon, y_base.times,
                y_base.jumps.conj().transpose(0, 2, 1),
            )
        continuous, jump = _jump_path_parts(x, y_base, t)
        return CovariationResult(continuous + jump, continuous, jump, "structural")
    raise TypeError(
        f"unsupported covariation pair: {type(x).__name__}, {type(y).__name__}"
    )


def realized_covariation(
    x_samples: np.ndarray,
    y_samples: np.ndarray,
    grid_x: np.ndarray | None = None,
    grid_y: np.ndarray | None = None,
) -> np.ndarray:
    """Grid estimator sum_k (X_{k+1} - X_k)(Y_{k+1} - Y_k).

    Samples are (m+1, rows, cols) arrays on identical grids; no
    jump/diffusion separation is attempted.
    """
    xs = np.asarray(x_samples, dtype=complex)
    ys = np.asarray(y_samples, dtype=complex)
    if grid_x is not None and grid_y is not None and not np.array_equal(grid_x, grid_y):
        raise ValueError("sampling grids differ")
    if xs.ndim != 3 or ys.ndim != 3:
        raise ValueError("samples must be (m+1, rows, cols) arrays")
    if xs.shape[0] != ys.shape[0] or xs.shape[0] < 2:
        raise ValueError("samples must share a grid with >= 2 points")
    if xs.shape[2] != ys.shape[1]:
        raise ValueError("incompatible sample shapes")
    dx = np.diff(xs, axis=0)
    dy = np.diff(ys, axis=0)
    return np.einsum("kij,kjl->il", dx, dy)


def sample_on_grid(path, grid: np.ndarray, as_adjoint: bool = False) -> np.ndarray:
    """Evaluate a path at every grid time as (m+1, rows, cols) samples.

    Vector paths come out as columns (d, 1), or rows (1, d) conjugated
    when ``as_adjoint`` is set; matrix paths are conjugate-transposed.
    """
    grid = np.asarray(grid, dtype=float)
    vals = [np.atleast_1d(evaluate_path(path, float(t))) for t in grid]
    arr = np.stack(vals)
    if arr.ndim == 2:  # vector path
        arr = arr.conj()[:, None, :] if as_adjoint else arr[:, :, None]
    elif as_adjoint:
        arr = arr.conj().transpose(0, 2, 1)
    return arr


@dataclass(frozen=True)
class BilinearityReport:
    lhs: np.ndarray
    rhs: np.ndarray
    discrepancy: float


def _as_jump_path(p) -> JumpPath:
    if isinstance(p, JumpPath):
        return p
    if isinstance(p, MatrixLevyPath):
        return JumpPath.from_matrix_path(p)
    if isinstance(p, VectorLevyPath):
        return JumpPath.from_vector_path(p)
    if isinstance(p, Adjoint) and isinstance(p.base, VectorLevyPath):
        return JumpPath.from_vector_path(p.base, as_adjoint=True)
    raise TypeError(f"cannot view {type(p).__name__} as a pure-jump path")


def bilinearity_check(
    a: np.ndarray, x, y, c: np.ndarray, t: float
) -> BilinearityReport:
    """Compare [A X, Y C](t) against A [X, Y](t) C for constant A, C.

    X and Y must be pure-jump paths (or convertible views); the
    discrepancy is reported in Frobenius norm and should be at rounding
    level.
    """
    a = np.asarray(a, dtype=complex)
    c = np.asarray(c, dtype=complex)
    jx = _as_jump_path(x)
    jy = _as_jump_path(y)
    lhs = structural_covariation(jx.left_multiply(a), jy.right_multiply(c), t).value
    rhs = a @ structural_covariation(jx, jy, t).value @ c
    return BilinearityReport(lhs, rhs, frobenius_norm(lhs - rhs))


def with_drift(path, drift) -> object:
    """Copy of a path with a different drift (jumps and drivers shared)."""
    return replace(path, drift=np.asarray(drift))
