"""Run orchestration and persistence: single runs, sweeps, convergence, wavepackets.

Every mode writes deterministic, locale-independent CSV output plus a
manifest.json carrying the fully resolved configuration, the RNG
algorithm and seed, the grid, versions and wall clock — enough to
reproduce any emitted scalar bitwise on one platform.
"""

from __future__ import annotations

import datetime as _dt
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, kernels
from .dynamics import (
    convergence_check,
    damped_wavepacket,
    evolve_pair,
    free_wavepacket,
    initial_pair,
    time_grid,
)
from .model import RNG_ALGORITHM, ModelParams, build_operators
from .quantifiers import QuantifierSeries, SummaryRecord, compute_series, summarize

SERIES_HEADER = ("t,D_S,sqrtJ_S,D_corr1,D_corr2,sqrtJ_corr1,sqrtJ_corr2,"
                 "D_env,sqrtJ_env,D_bound_rhs,sqrtJ_bound_rhs,D_Iext,sqrtJ_Iext,"
                 "deltaX,deltaY")
SUMMARY_HEADER = "gamma,T,seed,N_D,N_sqrtJ,D_S_t0,max_revival_D"
CSV_SCHEMA_VERSION = 1

_SERIES_COLUMNS = (
    ("D_S", "d_s"), ("sqrtJ_S", "sqrtj_s"),
    ("D_corr1", "d_corr1"), ("D_corr2", "d_corr2"),
    ("sqrtJ_corr1", "sqrtj_corr1"), ("sqrtJ_corr2", "sqrtj_corr2"),
    ("D_env", "d_env"), ("sqrtJ_env", "sqrtj_env"),
    ("D_bound_rhs", "d_bound_rhs"), ("sqrtJ_bound_rhs", "sqrtj_bound_rhs"),
    ("D_Iext", "d_iext"), ("sqrtJ_Iext", "sqrtj_iext"),
    ("deltaX", "delta_x"), ("deltaY", "delta_y"),
)


class ConfigError(ValueError):
    """Invalid run configuration (CLI exit code 1)."""


@dataclass(frozen=True)
class SweepSpec:
    gamma_values: Tuple[float, ...] = (0.32, 0.55, 1.0)
    temp_values: Tuple[float, ...] = (1.0,)
    seeds: Tuple[int, ...] = (42,)

    def __post_init__(self):
        if not self.gamma_values or not self.temp_values or not self.seeds:
            raise ConfigError("sweep lists must be nonempty")


@dataclass(frozen=True)
class WavepacketSpec:
    q_min: float = -8.0
    q_max: float = 8.0
    q_step: float = 0.01
    sample_times: Tuple[float, ...] = tuple(k * math.pi / 4 for k in range(9))
    gamma: float = 0.32
    temp: float = 0.1

    def q_grid(self) -> np.ndarray:
        n = int(math.floor((self.q_max - self.q_min) / self.q_step + 1e-9)) + 1
        return self.q_min + np.arange(n) * self.q_step


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration for any runner mode; validated on construction."""

    model: ModelParams = field(default_factory=ModelParams)
    out_dir: Optional[str] = None
    with_correlations: bool = True
    with_ledger: bool = True
    method: str = "branch"
    workers: int = 1
    sweep: SweepSpec = field(default_factory=SweepSpec)
    wavepacket: WavepacketSpec = field(default_factory=WavepacketSpec)

    def __post_init__(self):
        if self.method not in ("branch", "density"):
            raise ConfigError(f"method must be 'branch' or 'density', got {self.method!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


def config_from_dict(raw: dict, overrides: Optional[dict] = None) -> RunConfig:
    """Build a RunConfig from a JSON-shaped dict; overrides win over file values."""
    raw = dict(raw or {})
    overrides = overrides or {}
    model_raw = dict(raw.pop("model", {}))
    if "seed" in overrides and overrides["seed"] is not None:
        model_raw["seed"] = overrides["seed"]
    sweep_raw = raw.pop("sweep", None)
    wave_raw = raw.pop("wavepacket", None)
    known = {"out_dir", "with_correlations", "with_ledger", "method", "workers"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        model = ModelParams(**model_raw)
        sweep = SweepSpec(**{k: tuple(v) if isinstance(v, list) else v
                             for k, v in (sweep_raw or {}).items()})
        wave = WavepacketSpec(**{k: tuple(v) if isinstance(v, list) else v
                                 for k, v in (wave_raw or {}).items()})
        cfg = RunConfig(model=model, sweep=sweep, wavepacket=wave, **raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if "out_dir" in overrides and overrides["out_dir"] is not None:
        cfg = replace(cfg, out_dir=str(overrides["out_dir"]))
    return cfg


def load_config(path: Optional[str], overrides: Optional[dict] = None) -> RunConfig:
    if path is None:
        return config_from_dict({}, overrides)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return config_from_dict(raw, overrides)


def _fmt(x: float) -> str:
    """Locale-independent full-precision float formatting (round-trip exact)."""
    return repr(float(x))


def _fmt_param(x: float) -> str:
    """Compact value formatting for directory names (g0.32_T1_s42)."""
    return f"{float(x):g}"


def _manifest(cfg: RunConfig, mode: str, grid_info: dict, outputs: List[str],
              started: float, extra: Optional[dict] = None) -> dict:
    doc = {
        "manifest_version": 1,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "mode": mode,
        "config": asdict(cfg),
        "rng": {
            "algorithm": RNG_ALGORITHM,
            "seed": cfg.model.seed,
            "numpy_version": np.__version__,
        },
        "grid": grid_info,
        "software": {
            "package": "aclsim",
            "version": __version__,
            "kernels_backend": kernels.BACKEND,
        },
        "wall_clock": {
            "started_utc": _dt.datetime.fromtimestamp(started, _dt.timezone.utc).isoformat(),
            "elapsed_seconds": time.time() - started,
        },
        "outputs": outputs,
    }
    if extra:
        doc.update(extra)
    return doc


def _write_manifest(out_dir: Path, doc: dict) -> None:
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_series_csv(path: Path, series: QuantifierSeries) -> None:
    lines = [SERIES_HEADER]
    columns = [series.times] + [getattr(series, attr) for _, attr in _SERIES_COLUMNS]
    for k in range(series.times.shape[0]):
        lines.append(",".join(_fmt(col[k]) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_single(cfg: RunConfig, out_dir: Optional[Path] = None) -> Tuple[QuantifierSeries, Path]:
    """One full run: series.csv + manifest.json in the output directory."""
    started = time.time()
    out = Path(out_dir) if out_dir is not None else Path(cfg.out_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)
    ops = build_operators(cfg.model)
    init = initial_pair(cfg.model, ops)
    include_globals = cfg.with_correlations or (cfg.with_ledger and cfg.method == "density")
    snaps = evolve_pair(cfg.model, ops, init, method=cfg.method,
                        include_globals=include_globals)
    series = compute_series(snaps, with_correlations=cfg.with_correlations,
                            with_ledger=cfg.with_ledger)
    write_series_csv(out / "series.csv", series)
    grid = time_grid(cfg.model)
    doc = _manifest(cfg, "single",
                    {"dt": grid.dt, "t_max": grid.t_max, "n_times": grid.n_times},
                    ["series.csv"], started)
    _write_manifest(out, doc)
    return series, out


def _sweep_point(cfg: RunConfig, gamma: float, temp: float, seed: int,
                 root: str) -> Tuple[dict, Optional[SummaryRecord]]:
    sub = Path(root) / f"g{_fmt_param(gamma)}_T{_fmt_param(temp)}_s{seed}"
    meta = {"gamma": gamma, "temp": temp, "seed": seed, "dir": sub.name,
            "status": "ok", "error": None}
    try:
        point_cfg = replace(cfg, model=replace(cfg.model, gamma=gamma, temp=temp, seed=seed))
        series, _ = run_single(point_cfg, out_dir=sub)
    except Exception as exc:  # record per-point failure, keep the sweep going
        meta["status"] = "failed"
        meta["error"] = f"{type(exc).__name__}: {exc}"
        return meta, None
    return meta, summarize(series, gamma, temp, seed)


def run_sweep(cfg: RunConfig, out_dir: Optional[Path] = None) -> Tuple[int, int, Path]:
    """Grid sweep over (gamma, T, seed); summary.csv plus per-point series.

    Returns (n_ok, n_failed, out_dir). Failed points are recorded in the
    manifest with their error and skipped in summary.csv.
    """
    started = time.time()
    out = Path(out_dir) if out_dir is not None else Path(cfg.out_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)
    points = list(itertools.product(cfg.sweep.gamma_values, cfg.sweep.temp_values,
                                    cfg.sweep.seeds))
    results: List[Tuple[dict, Optional[SummaryRecord]]] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_sweep_point, cfg, g, t, s, str(out))
                       for g, t, s in points]
            results = [f.result() for f in futures]
    else:
        results = [_sweep_point(cfg, g, t, s, str(out)) for g, t, s in points]

    lines = [SUMMARY_HEADER]
    metas = []
    n_ok = n_failed = 0
    for meta, record in results:
        metas.append(meta)
        if record is None:
            n_failed += 1
            continue
        n_ok += 1
        lines.append(",".join([
            _fmt(record.gamma), _fmt(record.temp), str(record.seed),
            _fmt(record.nm_d), _fmt(record.nm_sqrtj),
            _fmt(record.d_s_t0), _fmt(record.max_revival_d),
        ]))
    (out / "summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    grid = time_grid(cfg.model)
    doc = _manifest(cfg, "sweep",
                    {"dt": grid.dt, "t_max": grid.t_max, "n_times": grid.n_times},
                    ["summary.csv"] + [m["dir"] + "/series.csv" for m in metas
                                       if m["status"] == "ok"],
                    started, extra={"points": metas})
    _write_manifest(out, doc)
    return n_ok, n_failed, out


def run_convergence(cfg: RunConfig, out_dir: Optional[Path] = None) -> Tuple[dict, Path]:
    """Grid-halving convergence report written to convergence.json."""
    started = time.time()
    out = Path(out_dir) if out_dir is not None else Path(cfg.out_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)
    ops = build_operators(cfg.model)
    init = initial_pair(cfg.model, ops)
    report = convergence_check(cfg.model, ops, init, quantity="both")
    with open(out / "convergence.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    grid = time_grid(cfg.model)
    doc = _manifest(cfg, "convergence",
                    {"dt": grid.dt, "t_max": grid.t_max, "n_times": grid.n_times},
                    ["convergence.json"], started)
    _write_manifest(out, doc)
    return report, out


def _write_wavepacket_csv(path: Path, sample_times: Sequence[float],
                          q_grid: np.ndarray, densities: np.ndarray) -> None:
    lines = ["t,q,p"]
    for i, t in enumerate(sample_times):
        for j in range(q_grid.shape[0]):
            lines.append(f"{_fmt(t)},{_fmt(q_grid[j])},{_fmt(densities[i, j])}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_wavepacket(cfg: RunConfig, out_dir: Optional[Path] = None) -> Path:
    """Free and damped wavepacket position densities (Fig.-1-style benchmark)."""
    started = time.time()
    out = Path(out_dir) if out_dir is not None else Path(cfg.out_dir or "runs")
    out.mkdir(parents=True, exist_ok=True)
    wave = cfg.wavepacket
    q = wave.q_grid()
    damped_params = replace(cfg.model, gamma=wave.gamma, temp=wave.temp)
    ops = build_operators(damped_params)
    free = free_wavepacket(damped_params, ops, q, wave.sample_times)
    init = initial_pair(damped_params, ops)
    damped = damped_wavepacket(damped_params, ops, init, q, wave.sample_times)
    _write_wavepacket_csv(out / "wavepacket_free.csv", wave.sample_times, q, free)
    _write_wavepacket_csv(out / "wavepacket_damped.csv", wave.sample_times, q, damped)
    doc = _manifest(cfg, "wavepacket",
                    {"q_min": wave.q_min, "q_max": wave.q_max, "q_step": wave.q_step,
                     "sample_times": list(wave.sample_times)},
                    ["wavepacket_free.csv", "wavepacket_damped.csv"], started,
                    extra={"damped_model": asdict(damped_params)})
    _write_manifest(out, doc)
    return out
