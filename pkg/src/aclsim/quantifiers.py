"""Distinguishability quantifiers, backflow measure, and the information ledger.

Two quantifiers are supported everywhere: the trace distance and the
square root of the Jensen-Shannon divergence (natural logs internally,
with the 1/(2 ln 2) normalization making the divergence base-2). Both
map pairs of density matrices to [0, 1], vanish iff the states coincide,
and reach 1 iff the supports are orthogonal.

The streaming series engine evaluates the Jensen-Shannon divergence in
its entropy form J = [2 H(m) - H(r1) - H(r2)] / (2 ln 2) (eigenvalues
only); the public :func:`jensen_shannon` keeps the defining
relative-entropy form. The two are algebraically identical and are
cross-checked in the test suite.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, NamedTuple

import numpy as np

from . import kernels
from .linalg import (
    LOG_CLIP,
    POSITIVITY_TOL,
    eig_hermitian,
    eigvals_hermitian,
    eigvals_low_rank,
    kron,
)

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
SUPPORT_TOL = 1e-10
TIE_TOL = 1e-12


class QuantifierKind(Enum):
    TRACE_DISTANCE = "D"
    SQRT_JSD = "sqrtJ"


def _require_same_shape(r1: np.ndarray, r2: np.ndarray) -> None:
    if r1.shape != r2.shape:
        raise ValueError(f"state dimensions disagree: {r1.shape} vs {r2.shape}")


def trace_distance(r1: np.ndarray, r2: np.ndarray) -> float:
    """Half the trace norm of r1 - r2 (sum of |eigenvalues| over 2)."""
    _require_same_shape(r1, r2)
    return 0.5 * float(np.abs(eigvals_hermitian(r1 - r2)).sum())


def relative_entropy(rho: np.ndarray, sigma: np.ndarray, clip: float = LOG_CLIP) -> float:
    """Quantum relative entropy tr(rho log rho) - tr(rho log sigma), natural log.

    Eigenvalues at or below clip are treated as exact zeros
    (0 log 0 = 0); eigenvalues below -1e-10 are a positivity error.
    Returns inf when rho places weight beyond 1e-10 outside sigma's
    support (never the case for midpoint arguments).
    """
    _require_same_shape(rho, sigma)
    w_rho = eigvals_hermitian(rho)
    if float(w_rho[0]) < -POSITIVITY_TOL:
        raise ValueError(f"rho has negative eigenvalue {float(w_rho[0]):.3e}")
    spec_sigma = eig_hermitian(sigma)
    w_sig = spec_sigma.eigenvalues
    if float(w_sig[0]) < -POSITIVITY_TOL:
        raise ValueError(f"sigma has negative eigenvalue {float(w_sig[0]):.3e}")
    # weights of rho in sigma's eigenbasis
    q = np.real(np.einsum("ij,ik,kj->j", spec_sigma.eigenvectors.conj(), rho,
                          spec_sigma.eigenvectors, optimize=True))
    q = np.clip(q, 0.0, None)
    null = w_sig <= clip
    null_mass = float(q[null].sum())
    if null_mass > SUPPORT_TOL:
        log.warning("relative entropy support violation: %.3e of rho outside support of sigma",
                    null_mass)
        return math.inf
    keep = w_rho > clip
    tr_rho_log_rho = float((w_rho[keep] * np.log(w_rho[keep])).sum())
    live = ~null
    tr_rho_log_sigma = float((q[live] * np.log(w_sig[live])).sum())
    return tr_rho_log_rho - tr_rho_log_sigma


def jensen_shannon(r1: np.ndarray, r2: np.ndarray) -> float:
    """Jensen-Shannon divergence, normalized to [0, 1] by 1/(2 ln 2)."""
    _require_same_shape(r1, r2)
    mid = (r1 + r2) / 2.0
    return (relative_entropy(r1, mid) + relative_entropy(r2, mid)) / (2.0 * LN2)


def sqrt_jsd(r1: np.ndarray, r2: np.ndarray) -> float:
    """Square root of the Jensen-Shannon divergence (a metric)."""
    return math.sqrt(max(jensen_shannon(r1, r2), 0.0))


def distinguishability(r1: np.ndarray, r2: np.ndarray, kind: QuantifierKind) -> float:
    if kind is QuantifierKind.TRACE_DISTANCE:
        return trace_distance(r1, r2)
    return sqrt_jsd(r1, r2)


# entropy-form internals shared by the series engine

def _entropy(rho: np.ndarray) -> float:
    return kernels.entropy_from_eigs(eigvals_hermitian(rho), LOG_CLIP)


def _jsd_from_entropies(h1: float, h2: float, h_mid: float) -> float:
    return max((2.0 * h_mid - h1 - h2) / (2.0 * LN2), 0.0)


class _PairStats(NamedTuple):
    dist: float
    sqrtj: float
    h1: float
    h2: float


def _pair_stats(r1: np.ndarray, r2: np.ndarray) -> _PairStats:
    d = 0.5 * float(np.abs(eigvals_hermitian(r1 - r2)).sum())
    h1 = _entropy(r1)
    h2 = _entropy(r2)
    h_mid = _entropy((r1 + r2) / 2.0)
    return _PairStats(d, math.sqrt(_jsd_from_entropies(h1, h2, h_mid)), h1, h2)


def total_correlations(rho_se: np.ndarray, rho_s: np.ndarray, rho_e: np.ndarray,
                       kind: QuantifierKind) -> float:
    """Distinguishability between a global state and the product of its marginals."""
    return distinguishability(rho_se, kron(rho_s, rho_e), kind)


def env_distinguishability(rho_e_1: np.ndarray, rho_e_2: np.ndarray,
                           kind: QuantifierKind) -> float:
    """Distinguishability between the two environmental reductions."""
    return distinguishability(rho_e_1, rho_e_2, kind)


def distinguishability_series(snapshots: Iterable, kind: QuantifierKind) -> np.ndarray:
    """Per-time distinguishability of the two reduced system states."""
    return np.array([distinguishability(s.rho_s_1, s.rho_s_2, kind) for s in snapshots])


def blp_measure(series: np.ndarray) -> float:
    """Backflow measure: sum of all positive increments of the series.

    On a uniform grid this positive-variation sum equals the time
    integral of the positive part of the finite-difference rate (the dt
    factors cancel exactly).
    """
    series = np.ascontiguousarray(series, dtype=np.float64)
    return float(kernels.positive_variation(series))


def _global_pair_stats(snapshot) -> _PairStats:
    """Distinguishability stats of the two global states.

    Uses the branch factors when present: both the difference
    W1 P W1† - W2 P W2† and the midpoint have rank <= 2 n_env, so their
    nonzero spectra come from a small congruence instead of a d-dim
    solve. Falls back to dense eigensolves on materialized globals.
    """
    br = getattr(snapshot, "branches", None)
    if br is not None:
        w = br.weights
        diff_eigs = eigvals_low_rank([br.vectors_1, br.vectors_2], [w, -w])
        d = 0.5 * float(np.abs(diff_eigs).sum())
        mid_eigs = eigvals_low_rank([br.vectors_1, br.vectors_2], [w / 2.0, w / 2.0])
        h_mid = kernels.entropy_from_eigs(mid_eigs, LOG_CLIP)
        h_each = kernels.entropy_from_eigs(w, LOG_CLIP)
        return _PairStats(d, math.sqrt(_jsd_from_entropies(h_each, h_each, h_mid)),
                          h_each, h_each)
    if snapshot.rho_se_1 is None or snapshot.rho_se_2 is None:
        raise ValueError("global-state quantifiers need branch factors or materialized globals")
    return _pair_stats(snapshot.rho_se_1, snapshot.rho_se_2)


def information_ledger(snapshots: Iterable, kind: QuantifierKind):
    """Per-time (I_int, I_ext): information inside the open system vs outside.

    I_int(t) is the reduced-state distinguishability; I_ext(t) is the
    global-state distinguishability minus I_int(t). Their sum is the
    (constant) global distinguishability.
    """
    i_int: List[float] = []
    i_ext: List[float] = []
    for s in snapshots:
        inner = distinguishability(s.rho_s_1, s.rho_s_2, kind)
        stats = _global_pair_stats(s)
        total = stats.dist if kind is QuantifierKind.TRACE_DISTANCE else stats.sqrtj
        i_int.append(inner)
        i_ext.append(total - inner)
    return np.array(i_int), np.array(i_ext)


def bound_rhs(snapshot, kind: QuantifierKind) -> float:
    """Right-hand side of the backflow bound at one time.

    Total correlations of both evolved branches plus the environmental
    distinguishability; an upper bound on any later recovery of
    reduced-state distinguishability.
    """
    if snapshot.rho_se_1 is None or snapshot.rho_se_2 is None:
        raise ValueError("bound_rhs needs materialized global states")
    c1 = total_correlations(snapshot.rho_se_1, snapshot.rho_s_1, snapshot.rho_e_1, kind)
    c2 = total_correlations(snapshot.rho_se_2, snapshot.rho_s_2, snapshot.rho_e_2, kind)
    env = env_distinguishability(snapshot.rho_e_1, snapshot.rho_e_2, kind)
    return c1 + c2 + env


def quantifier_difference(snapshots: Iterable):
    """Per-time (sqrtJ - D) gaps for branch-1 correlations and env distinguishability.

    Either entry may be negative: neither quantifier dominates the other.
    """
    dx: List[float] = []
    dy: List[float] = []
    for s in snapshots:
        if s.rho_se_1 is None:
            raise ValueError("quantifier_difference needs materialized global states")
        cd = total_correlations(s.rho_se_1, s.rho_s_1, s.rho_e_1, QuantifierKind.TRACE_DISTANCE)
        cj = total_correlations(s.rho_se_1, s.rho_s_1, s.rho_e_1, QuantifierKind.SQRT_JSD)
        ed = env_distinguishability(s.rho_e_1, s.rho_e_2, QuantifierKind.TRACE_DISTANCE)
        ej = env_distinguishability(s.rho_e_1, s.rho_e_2, QuantifierKind.SQRT_JSD)
        dx.append(cj - cd)
        dy.append(ej - ed)
    return np.array(dx), np.array(dy)


class RevivalPair(NamedTuple):
    s_index: int
    t_index: int
    delta: float


def revival_targets(series: np.ndarray, tie_tol: float = TIE_TOL) -> List[RevivalPair]:
    """Pair every grid index with the nearest later local maximum.

    A maximal flat run of values (ties resolved at tie_tol) is one
    candidate, represented by its earliest index; it is a local maximum
    iff the series rises strictly into the run and drops strictly after
    it. Indices with no later maximum are omitted.
    """
    series = np.asarray(series, dtype=np.float64)
    n = series.shape[0]
    if n < 3:
        raise ValueError(f"series must have at least 3 points, got {n}")
    maxima: List[int] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs(series[j + 1] - series[i]) <= tie_tol:
            j += 1
        if i > 0 and j < n - 1:
            if series[i - 1] < series[i] - tie_tol and series[j + 1] < series[j] - tie_tol:
                maxima.append(i)
        i = j + 1
    out: List[RevivalPair] = []
    if not maxima:
        return out
    max_arr = np.array(maxima)
    for s in range(n):
        pos = int(np.searchsorted(max_arr, s + 1))
        if pos == len(maxima):
            continue
        t = int(max_arr[pos])
        out.append(RevivalPair(s, t, float(series[t] - series[s])))
    return out


@dataclass
class QuantifierSeries:
    """Time series of every scalar quantifier for one run.

    Columns not computed (flags off) are NaN. d_global/sqrtj_global are
    the constant global distinguishabilities, kept for invariance checks
    and the ledger.
    """

    times: np.ndarray
    d_s: np.ndarray
    sqrtj_s: np.ndarray
    d_corr1: np.ndarray
    d_corr2: np.ndarray
    sqrtj_corr1: np.ndarray
    sqrtj_corr2: np.ndarray
    d_env: np.ndarray
    sqrtj_env: np.ndarray
    d_bound_rhs: np.ndarray
    sqrtj_bound_rhs: np.ndarray
    d_global: np.ndarray
    sqrtj_global: np.ndarray
    d_iext: np.ndarray
    sqrtj_iext: np.ndarray
    delta_x: np.ndarray
    delta_y: np.ndarray


@dataclass
class SummaryRecord:
    """Per-(gamma, T, seed) aggregate of one run's distinguishability series."""

    gamma: float
    temp: float
    seed: int
    nm_d: float
    nm_sqrtj: float
    d_s_t0: float
    max_revival_d: float


def compute_series(snapshots: Iterable, with_correlations: bool = True,
                   with_ledger: bool = True) -> QuantifierSeries:
    """Single-pass evaluation of all enabled quantifiers over a snapshot stream.

    Correlation terms need materialized global states; ledger terms need
    branch factors or globals. Reduced-state and environmental series are
    always computed.
    """
    cols = {name: [] for name in (
        "times", "d_s", "sqrtj_s", "d_corr1", "d_corr2", "sqrtj_corr1", "sqrtj_corr2",
        "d_env", "sqrtj_env", "d_bound_rhs", "sqrtj_bound_rhs", "d_global", "sqrtj_global",
        "d_iext", "sqrtj_iext", "delta_x", "delta_y")}

    for snap in snapshots:
        cols["times"].append(snap.t)
        s_stats = _pair_stats(snap.rho_s_1, snap.rho_s_2)
        e_stats = _pair_stats(snap.rho_e_1, snap.rho_e_2)
        cols["d_s"].append(s_stats.dist)
        cols["sqrtj_s"].append(s_stats.sqrtj)
        cols["d_env"].append(e_stats.dist)
        cols["sqrtj_env"].append(e_stats.sqrtj)
        cols["delta_y"].append(e_stats.sqrtj - e_stats.dist)

        if with_correlations:
            if snap.rho_se_1 is None or snap.rho_se_2 is None:
                raise ValueError("correlation columns need snapshots with global states")
            br = getattr(snap, "branches", None)
            h_se = (kernels.entropy_from_eigs(br.weights, LOG_CLIP) if br is not None
                    else None)
            d_corr = []
            sqrtj_corr = []
            for rho_se, rho_s, rho_e, h_s, h_e in (
                    (snap.rho_se_1, snap.rho_s_1, snap.rho_e_1, s_stats.h1, e_stats.h1),
                    (snap.rho_se_2, snap.rho_s_2, snap.rho_e_2, s_stats.h2, e_stats.h2)):
                # the two d-dim eigensolves below dominate the whole run;
                # both operate on disposable temporaries
                prod = kron(rho_s, rho_e)
                diff = rho_se - prod
                d_corr.append(0.5 * float(np.abs(
                    eigvals_hermitian(diff, symmetrize=False, overwrite=True)).sum()))
                mid = prod
                mid += rho_se
                mid *= 0.5
                h_mid = kernels.entropy_from_eigs(
                    eigvals_hermitian(mid, symmetrize=False, overwrite=True), LOG_CLIP)
                h_glob = h_se if h_se is not None else _entropy(rho_se)
                sqrtj_corr.append(math.sqrt(_jsd_from_entropies(h_glob, h_s + h_e, h_mid)))
            cols["d_corr1"].append(d_corr[0])
            cols["d_corr2"].append(d_corr[1])
            cols["sqrtj_corr1"].append(sqrtj_corr[0])
            cols["sqrtj_corr2"].append(sqrtj_corr[1])
            cols["d_bound_rhs"].append(d_corr[0] + d_corr[1] + e_stats.dist)
            cols["sqrtj_bound_rhs"].append(sqrtj_corr[0] + sqrtj_corr[1] + e_stats.sqrtj)
            cols["delta_x"].append(sqrtj_corr[0] - d_corr[0])
        else:
            for name in ("d_corr1", "d_corr2", "sqrtj_corr1", "sqrtj_corr2",
                         "d_bound_rhs", "sqrtj_bound_rhs", "delta_x"):
                cols[name].append(math.nan)

        if with_ledger:
            g_stats = _global_pair_stats(snap)
            cols["d_global"].append(g_stats.dist)
            cols["sqrtj_global"].append(g_stats.sqrtj)
            cols["d_iext"].append(g_stats.dist - s_stats.dist)
            cols["sqrtj_iext"].append(g_stats.sqrtj - s_stats.sqrtj)
        else:
            for name in ("d_global", "sqrtj_global", "d_iext", "sqrtj_iext"):
                cols[name].append(math.nan)

    return QuantifierSeries(**{name: np.array(vals, dtype=np.float64)
                               for name, vals in cols.items()})


def summarize(series: QuantifierSeries, gamma: float, temp: float, seed: int) -> SummaryRecord:
    """Aggregate one run: backflow measures, initial distinguishability, largest revival."""
    pairs = revival_targets(series.d_s)
    max_revival = max((p.delta for p in pairs), default=0.0)
    return SummaryRecord(
        gamma=gamma, temp=temp, seed=seed,
        nm_d=blp_measure(series.d_s),
        nm_sqrtj=blp_measure(series.sqrtj_s),
        d_s_t0=float(series.d_s[0]),
        max_revival_d=max(max_revival, 0.0),
    )
