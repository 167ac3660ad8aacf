"""Dense complex linear algebra for Hermitian operators on bipartite spaces.

Conventions, used consistently by every consumer:

* operators are complex128 square ndarrays, row-major;
* bipartite global index is system-major, ``i = i_s * d_e + i_e``, so
  ``kron(A_system, B_environment)`` and the partial traces agree;
* spectral decompositions carry ascending eigenvalues and the eigenvector
  unitary as columns.

Propagation is spectral: diagonalize once, then per-time-step eigenbasis
phase products (no per-step matrix exponentials).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from . import kernels

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
LOG_CLIP = 1e-12

_EIGH_DRIVER = "evd"


class EigensolverError(RuntimeError):
    """Eigendecomposition did not converge; carries dimension and LAPACK detail."""

    def __init__(self, dim: int, detail: str):
        self.dim = dim
        self.detail = detail
        super().__init__(f"Hermitian eigensolver failed for dimension {dim}: {detail}")


class Subsystem(Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class BipartiteShape:
    """Dimensions of a system-environment product space (system-major)."""

    d_s: int
    d_e: int

    def __post_init__(self):
        if self.d_s < 1 or self.d_e < 1:
            raise ValueError(f"subsystem dimensions must be >= 1, got ({self.d_s}, {self.d_e})")

    @property
    def dim(self) -> int:
        return self.d_s * self.d_e


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvector unitary (columns) of a Hermitian operator."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A†)/2; washes out accumulated round-off."""
    return (a + a.conj().T) * 0.5


def hermiticity_defect(a: np.ndarray) -> float:
    """Elementwise max of |A - A†|."""
    return float(np.abs(a - a.conj().T).max())


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return hermiticity_defect(a) <= tol


def check_density_matrix(rho: np.ndarray,
                         herm_tol: float = HERMITICITY_TOL,
                         trace_tol: float = TRACE_TOL,
                         eig_tol: float = POSITIVITY_TOL) -> None:
    """Raise ValueError unless rho is a valid density matrix.

    Checks square shape, Hermiticity, unit trace and spectrum bounded
    below by -eig_tol. Diagnostic/test helper; not called in hot loops.
    """
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    defect = hermiticity_defect(rho)
    if defect > herm_tol:
        raise ValueError(f"density matrix not Hermitian: defect {defect:.3e} > {herm_tol:.1e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1 beyond {trace_tol:.1e}")
    wmin = float(eigvals_hermitian(rho)[0])
    if wmin < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {wmin:.3e}")


def _eigh(a: np.ndarray, vectors: bool):
    try:
        return sla.eigh(a, eigvals_only=not vectors, driver=_EIGH_DRIVER,
                        check_finite=False, overwrite_a=True)
    except sla.LinAlgError as exc:
        raise EigensolverError(a.shape[0], str(exc)) from exc


def eig_hermitian(a: np.ndarray, symmetrize: bool = True) -> SpectralDecomposition:
    """Full spectral decomposition of a Hermitian matrix.

    The input is re-symmetrized (A + A†)/2 before the solve unless
    symmetrize=False, so long operator products do not leak round-off
    into the decomposition.
    """
    work = hermitize(a) if symmetrize else np.array(a, copy=True)
    w, v = _eigh(work, vectors=True)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def eigvals_hermitian(a: np.ndarray, symmetrize: bool = True,
                      overwrite: bool = False) -> np.ndarray:
    """Eigenvalues (ascending) of a Hermitian matrix.

    overwrite=True lets the solve clobber the input (valid only for
    disposable temporaries); symmetrize=False skips the (A + A†)/2 pass,
    which is safe because the LAPACK driver reads a single triangle.
    """
    if symmetrize:
        work = hermitize(a)
    elif overwrite:
        work = np.asarray(a)
    else:
        work = np.array(a, copy=True)
    return _eigh(work, vectors=False)


def matrix_function(spec: SpectralDecomposition, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """V diag(f(lambda)) V† for a scalar function f applied to the spectrum.

    f receives the eigenvalue vector and may return real or complex values.
    Raises ValueError naming the offending eigenvalue when f is not finite
    on the spectrum.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        fw = np.asarray(f(spec.eigenvalues))
    if fw.shape != spec.eigenvalues.shape:
        raise ValueError("f must map the eigenvalue vector elementwise")
    bad = ~np.isfinite(fw)
    if bad.any():
        idx = int(np.argmax(bad))
        raise ValueError(
            f"matrix function not finite at eigenvalue {spec.eigenvalues[idx]!r} (index {idx})")
    v = spec.eigenvectors
    return (v * fw) @ v.conj().T


def propagator(spec: SpectralDecomposition, t: float) -> np.ndarray:
    """Unitary U(t) = V exp(-i lambda t) V† of the Hamiltonian behind spec."""
    if not np.isfinite(t):
        raise ValueError(f"propagation time must be finite, got {t}")
    return matrix_function(spec, lambda w: np.exp(-1j * w * t))


def to_eigenbasis(spec: SpectralDecomposition, a: np.ndarray) -> np.ndarray:
    """V† A V: express an operator in the decomposition's eigenbasis."""
    v = spec.eigenvectors
    return v.conj().T @ a @ v


def from_eigenbasis(spec: SpectralDecomposition, a_tilde: np.ndarray) -> np.ndarray:
    """V A V†: inverse of to_eigenbasis."""
    v = spec.eigenvectors
    return v @ a_tilde @ v.conj().T


def evolve_density(spec: SpectralDecomposition, rho_tilde0: np.ndarray, t: float) -> np.ndarray:
    """Evolve a density matrix given in the Hamiltonian eigenbasis to time t.

    rho_tilde0 = V† rho(0) V is computed once per run by the caller; each
    step is then V (rho_tilde0 ∘ P(t)) V† with P_jk = exp(-i(l_j - l_k)t),
    identical to U rho U† but two matrix products per step instead of a
    fresh exponential.
    """
    if rho_tilde0.shape != (spec.dim, spec.dim):
        raise ValueError(
            f"state shape {rho_tilde0.shape} does not match decomposition dimension {spec.dim}")
    phased = kernels.phase_evolve(rho_tilde0, spec.eigenvalues, float(t))
    return hermitize(from_eigenbasis(spec, phased))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product in the system-major convention (system factor first)."""
    return np.kron(a, b)


def partial_trace(rho: np.ndarray, shape: BipartiteShape, keep: Subsystem) -> np.ndarray:
    """Reduce a bipartite density matrix to one subsystem."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    if rho.shape[0] != shape.dim:
        raise ValueError(
            f"dimension {rho.shape[0]} does not factor as {shape.d_s} x {shape.d_e}")
    rho = np.ascontiguousarray(rho)
    if keep is Subsystem.SYSTEM:
        return kernels.partial_trace_env(rho, shape.d_s, shape.d_e)
    return kernels.partial_trace_sys(rho, shape.d_s, shape.d_e)


def eigvals_low_rank(factors: Sequence[np.ndarray], coeffs: Sequence[np.ndarray]) -> np.ndarray:
    """Nonzero-part spectrum of sum_b W_b diag(c_b) W_b† without forming it.

    factors are (d, k_b) blocks, coeffs the matching real weight vectors.
    With X the stacked blocks and C = diag(all coeffs), a reduced QR
    factorization X = Q R turns X C X† into Q (R C R†) Q†, so the
    spectrum is that of the small Hermitian matrix R C R† plus
    d - sum(k_b) exact zeros, which are not returned. Cost is
    O(d r^2 + r^3) for total rank r instead of O(d^3); the orthonormal
    congruence keeps rank-deficient stacks (overlapping factor spans)
    exact instead of amplifying null-space round-off.
    """
    x = np.hstack([np.asarray(w) for w in factors])
    c = np.concatenate([np.asarray(v, dtype=np.float64) for v in coeffs])
    if x.shape[1] != c.shape[0]:
        raise ValueError("factor columns and coefficient lengths disagree")
    r = np.linalg.qr(x, mode="r")
    m = (r * c) @ r.conj().T
    return eigvals_hermitian(m, symmetrize=True)
