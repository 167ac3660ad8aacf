"""Pure-numpy implementations of the hot kernels.

Reference versions for the numba-compiled kernels in ``_numba_impl``;
selected at import time by :mod:`aclsim.kernels` when numba is disabled
or unavailable. Both implementations must agree to float round-off
(enforced by tests/test_kernels.py).
"""

import numpy as np


def phase_evolve(rho_tilde, eigs, t):
    """Apply eigenbasis phase factors to a matrix expressed in that basis.

    Returns out[j, k] = rho_tilde[j, k] * exp(-i (eigs[j] - eigs[k]) t).
    """
    ph = np.exp(-1j * eigs * t)
    return (ph[:, None] * rho_tilde) * ph.conj()[None, :]


def partial_trace_env(rho, d_s, d_e):
    """Trace out the second (environment) factor; system-major indexing."""
    r4 = rho.reshape(d_s, d_e, d_s, d_e)
    return np.einsum("ieje->ij", r4)


def partial_trace_sys(rho, d_s, d_e):
    """Trace out the first (system) factor; system-major indexing."""
    r4 = rho.reshape(d_s, d_e, d_s, d_e)
    return np.einsum("sasb->ab", r4)


def branch_reduce_sys(vecs, weights):
    """System reduction of a weighted mixture of bipartite pure states.

    vecs has shape (d_s, d_e, K): K global state vectors reshaped to the
    (system, environment) index pair. Returns
    sum_k weights[k] * tr_E |v_k><v_k| as a (d_s, d_s) matrix.
    """
    d_s = vecs.shape[0]
    flat = vecs.reshape(d_s, -1)
    wflat = (vecs * weights).reshape(d_s, -1)
    return wflat @ flat.conj().T


def branch_reduce_env(vecs, weights):
    """Environment reduction; see branch_reduce_sys."""
    d_e = vecs.shape[1]
    swapped = vecs.transpose(1, 0, 2)
    flat = swapped.reshape(d_e, -1)
    wflat = (swapped * weights).reshape(d_e, -1)
    return wflat @ flat.conj().T


def hermite_functions(q, n):
    """First n normalized harmonic-oscillator eigenfunctions on a grid.

    Stable normalized recurrence
        phi_0 = pi^(-1/4) exp(-q^2/2)
        phi_m = sqrt(2/m) q phi_{m-1} - sqrt((m-1)/m) phi_{m-2}
    Returns an (n, len(q)) array.
    """
    q = np.asarray(q, dtype=np.float64)
    out = np.empty((n, q.shape[0]), dtype=np.float64)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * q * q)
    if n > 1:
        out[1] = np.sqrt(2.0) * q * out[0]
    for m in range(2, n):
        out[m] = np.sqrt(2.0 / m) * q * out[m - 1] - np.sqrt((m - 1) / m) * out[m - 2]
    return out


def entropy_from_eigs(eigs, clip):
    """Von Neumann entropy -sum(w log w) with eigenvalues <= clip dropped."""
    w = eigs[eigs > clip]
    if w.size == 0:
        return 0.0
    return float(-(w * np.log(w)).sum())


def positive_variation(series):
    """Sum of the positive forward increments of a 1-d series.

    Sequential accumulation, not numpy's pairwise sum: the result must be
    bitwise identical across backends and to a plain-loop reference.
    """
    acc = 0.0
    for i in range(series.shape[0] - 1):
        d = float(series[i + 1]) - float(series[i])
        if d > 0.0:
            acc += d
    return acc
