"""Numba-compiled hot kernels.

Same signatures and semantics as ``_numpy_impl``; the loop bodies are
written for nopython mode. cache=True persists compiled code next to
the package so repeated processes skip recompilation.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def phase_evolve(rho_tilde, eigs, t):
    d = rho_tilde.shape[0]
    ph = np.empty(d, dtype=np.complex128)
    for j in range(d):
        ph[j] = np.exp(-1j * eigs[j] * t)
    out = np.empty_like(rho_tilde)
    for j in range(d):
        pj = ph[j]
        for k in range(d):
            out[j, k] = rho_tilde[j, k] * (pj * np.conj(ph[k]))
    return out


@njit(cache=True)
def partial_trace_env(rho, d_s, d_e):
    out = np.zeros((d_s, d_s), dtype=np.complex128)
    for i in range(d_s):
        for j in range(d_s):
            acc = 0.0 + 0.0j
            for e in range(d_e):
                acc += rho[i * d_e + e, j * d_e + e]
            out[i, j] = acc
    return out


@njit(cache=True)
def partial_trace_sys(rho, d_s, d_e):
    out = np.zeros((d_e, d_e), dtype=np.complex128)
    for a in range(d_e):
        for b in range(d_e):
            acc = 0.0 + 0.0j
            for s in range(d_s):
                acc += rho[s * d_e + a, s * d_e + b]
            out[a, b] = acc
    return out


@njit(cache=True)
def branch_reduce_sys(vecs, weights):
    d_s, d_e, n_br = vecs.shape
    out = np.zeros((d_s, d_s), dtype=np.complex128)
    for k in range(n_br):
        w = weights[k]
        if w == 0.0:
            continue
        for i in range(d_s):
            for j in range(d_s):
                acc = 0.0 + 0.0j
                for e in range(d_e):
                    acc += vecs[i, e, k] * np.conj(vecs[j, e, k])
                out[i, j] += w * acc
    return out


@njit(cache=True)
def branch_reduce_env(vecs, weights):
    d_s, d_e, n_br = vecs.shape
    out = np.zeros((d_e, d_e), dtype=np.complex128)
    for k in range(n_br):
        w = weights[k]
        if w == 0.0:
            continue
        for a in range(d_e):
            for b in range(d_e):
                acc = 0.0 + 0.0j
                for s in range(d_s):
                    acc += vecs[s, a, k] * np.conj(vecs[s, b, k])
                out[a, b] += w * acc
    return out


@njit(cache=True)
def hermite_functions(q, n):
    nq = q.shape[0]
    out = np.empty((n, nq), dtype=np.float64)
    c0 = np.pi ** -0.25
    for i in range(nq):
        out[0, i] = c0 * np.exp(-0.5 * q[i] * q[i])
    if n > 1:
        s2 = np.sqrt(2.0)
        for i in range(nq):
            out[1, i] = s2 * q[i] * out[0, i]
    for m in range(2, n):
        a = np.sqrt(2.0 / m)
        b = np.sqrt((m - 1.0) / m)
        for i in range(nq):
            out[m, i] = a * q[i] * out[m - 1, i] - b * out[m - 2, i]
    return out


@njit(cache=True)
def entropy_from_eigs(eigs, clip):
    acc = 0.0
    for i in range(eigs.shape[0]):
        w = eigs[i]
        if w > clip:
            acc -= w * np.log(w)
    return acc


@njit(cache=True)
def positive_variation(series):
    acc = 0.0
    for i in range(series.shape[0] - 1):
        d = series[i + 1] - series[i]
        if d > 0.0:
            acc += d
    return acc
