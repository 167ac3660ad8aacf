"""Model construction: truncated oscillator, random-matrix bath, coupled Hamiltonian.

The system is a harmonic oscillator truncated to n_sys Fock states
(labels 0..n_sys-1); the environment Hamiltonian and the coupling
operator are independent GUE draws rescaled by 1/sqrt(n_env). All
frequencies are in units of the system frequency, hbar = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .linalg import (
    BipartiteShape,
    eig_hermitian,
    hermitize,
    kron,
)

RNG_ALGORITHM = "numpy.random.Philox (4x64 counter-based); Gaussians via Generator.standard_normal (ziggurat)"

GROUND_DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Full configuration of one simulation run.

    Times are in units of 1/omega_s, energies and temperatures in units
    of omega_s.
    """

    n_sys: int = 16
    n_env: int = 64
    omega_s: float = 1.0
    gamma: float = 0.32
    temp: float = 1.0
    alpha: float = 1.0
    seed: int = 42
    dt: float = 0.05
    t_max: float = 30.0

    def __post_init__(self):
        if self.n_sys < 2:
            raise ValueError(f"n_sys must be >= 2, got {self.n_sys}")
        if self.n_env < 2:
            raise ValueError(f"n_env must be >= 2, got {self.n_env}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.temp < 0:
            raise ValueError(f"temp must be >= 0, got {self.temp}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.t_max < self.dt:
            raise ValueError(f"t_max must be >= dt, got t_max={self.t_max}, dt={self.dt}")

    @property
    def shape(self) -> BipartiteShape:
        return BipartiteShape(self.n_sys, self.n_env)


@dataclass(frozen=True)
class ModelOperators:
    """Operator bundle for one realization; a pure function of ModelParams."""

    a_s: np.ndarray
    q_s: np.ndarray
    h_s: np.ndarray
    h_e: np.ndarray
    x_e: np.ndarray
    h_total: np.ndarray
    shape: BipartiteShape


class TruncatedCoherentState(NamedTuple):
    vector: np.ndarray
    deficit: float


def make_rng(seed: int) -> np.random.Generator:
    """Seeded counter-based generator; one stream per run, never shared."""
    return np.random.Generator(np.random.Philox(seed))


def truncated_annihilation(n_sys: int) -> np.ndarray:
    """Annihilation operator on the n_sys-dimensional truncated Fock space.

    <n|a|m> = sqrt(m) delta_{n,m-1}: the single superdiagonal carries
    sqrt(1)..sqrt(n_sys-1).
    """
    if n_sys < 2:
        raise ValueError(f"n_sys must be >= 2, got {n_sys}")
    return np.diag(np.sqrt(np.arange(1, n_sys, dtype=np.float64)), k=1).astype(np.complex128)


def position_operator(a: np.ndarray) -> np.ndarray:
    """Dimensionless position q = (a + a†)/sqrt(2)."""
    return (a + a.conj().T) / np.sqrt(2.0)


def system_hamiltonian(a: np.ndarray, omega_s: float) -> np.ndarray:
    """omega_s (a†a + 1/2) on the truncated space.

    a†a is exactly diag(0..n-1) there, so the diagonal is built directly:
    the level spacing stays exactly omega_s instead of picking up
    sqrt(m)^2 round-off.
    """
    n = a.shape[0]
    levels = omega_s * (np.arange(n, dtype=np.float64) + 0.5)
    return np.diag(levels).astype(np.complex128)


def sample_gue(n: int, rng: np.random.Generator) -> np.ndarray:
    """One GUE draw rescaled by 1/sqrt(n); Hermitian by construction.

    G gets i.i.d. entries with Re, Im ~ N(0,1); A = (G + G†)/2 then has
    off-diagonal Re/Im variance 1/2 and real N(0,1) diagonal, putting the
    spectrum of A/sqrt(n) on the semicircle support [-2, 2].
    """
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = (g + g.conj().T) / 2.0
    return a / np.sqrt(n)


def gibbs_state(h_e: np.ndarray, temp: float) -> np.ndarray:
    """Thermal state exp(-H/T)/Z, computed spectrally.

    The exponent is shifted by the smallest eigenvalue (a pure
    normalization that cannot underflow); temp = 0 returns the uniform
    mixture over the ground eigenspace (eigenvalues within 1e-10 of the
    minimum).
    """
    if temp < 0:
        raise ValueError(f"temperature must be >= 0, got {temp}")
    spec = eig_hermitian(h_e)
    w = spec.eigenvalues
    if temp == 0:
        ground = (w - w[0]) <= GROUND_DEGENERACY_TOL
        weights = ground.astype(np.float64)
    else:
        weights = np.exp(-(w - w[0]) / temp)
    weights /= weights.sum()
    v = spec.eigenvectors
    return hermitize((v * weights) @ v.conj().T)


def total_hamiltonian(h_s: np.ndarray, h_e: np.ndarray, q_s: np.ndarray,
                      x_e: np.ndarray, gamma: float) -> np.ndarray:
    """H = H_S ⊗ 1_E + 1_S ⊗ H_E + gamma (q_S ⊗ X_E), system-major."""
    n_s = h_s.shape[0]
    n_e = h_e.shape[0]
    if q_s.shape != h_s.shape or x_e.shape != h_e.shape:
        raise ValueError(
            f"operator dimensions disagree: h_s {h_s.shape}, q_s {q_s.shape}, "
            f"h_e {h_e.shape}, x_e {x_e.shape}")
    eye_s = np.eye(n_s, dtype=np.complex128)
    eye_e = np.eye(n_e, dtype=np.complex128)
    return kron(h_s, eye_e) + kron(eye_s, h_e) + gamma * kron(q_s, x_e)


def build_operators(params: ModelParams) -> ModelOperators:
    """All model operators for one realization.

    Deterministic: the RNG stream is seeded from params.seed and consumed
    in a fixed order (H_E draw, then X_E draw), so identical params give
    bitwise-identical operators.
    """
    a_s = truncated_annihilation(params.n_sys)
    q_s = position_operator(a_s)
    h_s = system_hamiltonian(a_s, params.omega_s)
    rng = make_rng(params.seed)
    h_e = sample_gue(params.n_env, rng)
    x_e = sample_gue(params.n_env, rng)
    h_total = total_hamiltonian(h_s, h_e, q_s, x_e, params.gamma)
    return ModelOperators(a_s=a_s, q_s=q_s, h_s=h_s, h_e=h_e, x_e=x_e,
                          h_total=h_total, shape=params.shape)


def truncated_coherent_state(alpha: complex, n_sys: int) -> TruncatedCoherentState:
    """Normalized truncated coherent state and its truncation deficit.

    Coefficients c_n ∝ alpha^n / sqrt(n!) for n < n_sys, built by the
    stable ratio recurrence c_n = c_{n-1} alpha / sqrt(n). The deficit is
    |1 - exp(-|alpha|^2) sum_n |alpha|^(2n)/n!|, the weight the truncation
    removes from the exact (untruncated) state.
    """
    c = np.empty(n_sys, dtype=np.complex128)
    c[0] = 1.0
    for n in range(1, n_sys):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    norm_sq = float(np.real(np.vdot(c, c)))
    deficit = abs(1.0 - math.exp(-abs(alpha) ** 2) * norm_sq)
    return TruncatedCoherentState(vector=c / math.sqrt(norm_sq), deficit=deficit)


def position_wavefunction(state: np.ndarray, q_grid: np.ndarray) -> np.ndarray:
    """Position-space probability density of a Fock-basis state.

    For a vector c: |sum_n c_n phi_n(q)|^2; for a density matrix rho:
    sum_{nm} rho_nm phi_n(q) phi_m(q), with phi_n the dimensionless
    oscillator eigenfunctions.
    """
    state = np.asarray(state)
    q = np.ascontiguousarray(q_grid, dtype=np.float64)
    if not np.isfinite(q).all():
        raise ValueError("q_grid must be finite")
    n = state.shape[0]
    phi = kernels.hermite_functions(q, n)
    if state.ndim == 1:
        amp = state @ phi.astype(np.complex128)
        return np.abs(amp) ** 2
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        tmp = state @ phi.astype(np.complex128)
        return np.real(np.einsum("nq,nq->q", phi, tmp))
    raise ValueError(f"state must be a vector or square matrix, got shape {state.shape}")
