"""Complex Hermitian linear algebra primitives.

Matrices are plain complex ndarrays; the helpers here enforce structural
invariants (Hermitian symmetry, positive semidefiniteness, unit rank)
rather than wrapping arrays in dedicated classes.  Everything is a pure
function of its inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12  # relative Frobenius tolerance for H == H*
PSD_TOL = 1e-10        # absolute floor for "nonnegative" eigenvalues
RANK_TOL = 1e-8        # relative eigenvalue threshold for rank decisions
PHASE_TOL = 1e-12      # modulus below which a coordinate counts as zero


def frobenius_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Frobenius inner product tr(A B*) of two equally shaped matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.conj()))


def frobenius_norm(a: np.ndarray) -> float:
    """Frobenius norm; equals sqrt(Re tr(A A*))."""
    return float(np.linalg.norm(np.asarray(a)))


def as_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate that ``m`` is Hermitian and return its symmetrization.

    The defect ``||M - M*||_F`` must not exceed ``tol * (1 + ||M||_F)``;
    within that budget the result is ``(M + M*)/2``, otherwise ValueError.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    defect = np.linalg.norm(m - m.conj().T)
    if defect > tol * (1.0 + np.linalg.norm(m)):
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e}")
    return (m + m.conj().T) / 2.0


def hermitian_eigen(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition H = U diag(w) U* of a Hermitian matrix.

    Returns eigenvalues in ascending order and a unitary matrix of
    eigenvectors (columns).  Input is validated and symmetrized first.
    """
    h = as_hermitian(h)
    w, u = np.linalg.eigh(h)
    return w, u


def psd_sqrt(p: np.ndarray) -> np.ndarray:
    """Positive semidefinite square root S with S @ S == P.

    Eigenvalues in [-PSD_TOL, 0) are clamped to zero; anything below
    -PSD_TOL is rejected.
    """
    w, u = hermitian_eigen(p)
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    s = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    return (s + s.conj().T) / 2.0


def pos_neg_split(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a Hermitian matrix into PSD parts with H = H_plus - H_minus.

    Parts are assembled from the positive and negative eigenpairs, so
    they carry orthogonal spectral supports and H_plus @ H_minus ~ 0.
    """
    w, u = hermitian_eigen(h)
    plus = (u * np.clip(w, 0.0, None)) @ u.conj().T
    minus = (u * np.clip(-w, 0.0, None)) @ u.conj().T
    return (plus + plus.conj().T) / 2.0, (minus + minus.conj().T) / 2.0


def canonical_phase(u: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """Rotate a global phase so the first nonzero coordinate is real > 0.

    "Nonzero" means modulus above ``tol``.  The rotation leaves u u*
    unchanged, which makes rank-one factorizations unique.
    """
    u = np.asarray(u, dtype=complex)
    idx = np.flatnonzero(np.abs(u) > tol)
    if idx.size == 0:
        raise ValueError("vector is numerically zero")
    pivot = u[idx[0]]
    return u * (pivot.conjugate() / abs(pivot))


@dataclass(frozen=True)
class RankOneHermitian:
    """Rank-one Hermitian matrix stored as (eigenvalue, unit direction).

    The direction is normalized and phase-canonicalized at construction;
    the matrix denoted is ``eigenvalue * u u*``.
    """

    eigenvalue: float
    direction: np.ndarray

    def __post_init__(self):
        if self.eigenvalue == 0.0:
            raise ValueError("rank-one eigenvalue must be nonzero")
        u = np.asarray(self.direction, dtype=complex).ravel()
        nrm = np.linalg.norm(u)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"direction norm {nrm} is not 1 within 1e-12")
        object.__setattr__(self, "direction", canonical_phase(u / nrm))

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def matrix(self) -> np.ndarray:
        return self.eigenvalue * np.outer(self.direction, self.direction.conj())


def factor_rank_one(v: np.ndarray, rank_tol: float = RANK_TOL) -> RankOneHermitian:
    """Factor a rank-one Hermitian matrix as lambda * u u*.

    Exactly one eigenvalue may exceed ``rank_tol * ||V||`` in modulus;
    zero matrices and numerical rank >= 2 are rejected.
    """
    v = as_hermitian(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot factor the zero matrix")
    w, u = np.linalg.eigh(v)
    significant = np.flatnonzero(np.abs(w) > rank_tol * nrm)
    if significant.size > 1:
        raise ValueError(f"numerical rank {significant.size} >= 2")
    k = int(np.argmax(np.abs(w)))
    return RankOneHermitian(float(w[k]), u[:, k])


def canonical_vector(v: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Vector x with x x* == V for a PSD rank-one matrix V.

    x is the unique representative whose first nonzero coordinate is real
    and nonnegative; coordinates before it are set to exactly zero.
    """
    v = as_hermitian(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot factor the zero matrix")
    w, u = np.linalg.eigh(v)
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    if np.count_nonzero(np.abs(w) > rank_tol * nrm) > 1:
        raise ValueError("numerical rank >= 2")
    x = np.sqrt(w[-1]) * canonical_phase(u[:, -1])
    pivot = np.flatnonzero(np.abs(x) > PHASE_TOL)[0]
    x[:pivot] = 0.0
    return x
