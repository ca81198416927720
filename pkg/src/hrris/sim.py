"""Seeded Monte Carlo comparison of HR-RIS against conventional RIS baselines.

Every trial owns a random stream derived from ``(seed, trial_index)``, so
results do not depend on execution order or on how many trials run. Within
a trial all methods see the same channel realization.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, fields, replace
import math
import os
import tempfile

import numpy as np

from .channel import FadingParams, Geometry, scenario_channels
from .optimizer import (
    AoConfig,
    SystemParams,
    alternating_optimize,
    random_phase_coefficients,
    se_exact,
)

METHODS = ("hr-ris", "ris-opt", "ris-random")
AXES = ("p_bs_dbm", "k", "hrris_x", "p_a_max_dbm")
CSV_HEADER = ("axis", "value", "method", "mean_se", "std_se", "trials", "seed")

_INT_FIELDS = {"n", "n_t", "n_r", "k", "phase_bits", "trials", "seed", "max_sweeps"}


class ConfigError(ValueError):
    """Invalid scenario field; ``key`` names the offending field."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Flat scenario description; defaults reproduce the reference setup.

    Powers are in dBm, distances in meters. ``active_set=None`` means the
    first ``k`` element indices.
    """

    n: int = 50
    n_t: int = 32
    n_r: int = 2
    k: int = 4
    active_set: tuple = None
    hrris_x: float = 51.0
    x_ms: float = 40.0
    y_ms: float = 2.0
    kappa_t: float = math.inf
    kappa_r: float = 0.0
    eps_t: float = 2.2
    eps_r: float = 2.8
    beta0_db: float = -30.0
    p_bs_dbm: float = 30.0
    sigma2_dbm: float = -80.0
    p_a_max_dbm: float = 0.0
    phase_bits: int = 2
    trials: int = 100
    seed: int = 0
    max_sweeps: int = 100
    rel_tol: float = 1e-4

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "active_set":
                continue
            if f.name in _INT_FIELDS:
                if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                    raise ConfigError(f.name, f"expected an integer, got {value!r}")
                object.__setattr__(self, f.name, int(value))
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                    raise ConfigError(f.name, f"expected a number, got {value!r}")
                value = float(value)
                if math.isnan(value) or (math.isinf(value) and f.name not in ("kappa_t", "kappa_r")):
                    raise ConfigError(f.name, f"must be finite, got {value!r}")
                object.__setattr__(self, f.name, value)

        for key in ("n", "n_t", "n_r", "trials", "max_sweeps"):
            if getattr(self, key) < 1:
                raise ConfigError(key, f"must be >= 1, got {getattr(self, key)}")
        if not 0 <= self.k <= self.n:
            raise ConfigError("k", f"must satisfy 0 <= k <= n={self.n}, got {self.k}")
        if self.phase_bits < 0:
            raise ConfigError("phase_bits", f"must be >= 0, got {self.phase_bits}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if not self.rel_tol > 0:
            raise ConfigError("rel_tol", f"must be > 0, got {self.rel_tol}")

        if self.active_set is None:
            active = tuple(range(self.k))
        else:
            try:
                active = tuple(sorted(int(i) for i in self.active_set))
            except (TypeError, ValueError):
                raise ConfigError("active_set", f"expected a list of integers, got {self.active_set!r}") from None
            if len(active) != self.k:
                raise ConfigError("active_set", f"has {len(active)} entries but k={self.k}")
            if len(set(active)) != len(active) or any(not 0 <= i < self.n for i in active):
                raise ConfigError("active_set", f"indices must be distinct and in [0, {self.n}), got {list(active)}")
        object.__setattr__(self, "active_set", active)

        # surface the geometry/fading validators under the config key names
        for key, build in (("hrris_x", lambda: self.geometry), ("kappa_t", lambda: self.fading_t),
                           ("kappa_r", lambda: self.fading_r)):
            try:
                build()
            except ValueError as err:
                raise ConfigError(key, str(err)) from None

    @property
    def geometry(self):
        return Geometry(hrris_x=self.hrris_x, ms_pos=(self.x_ms, self.y_ms))

    @property
    def fading_t(self):
        return FadingParams(self.kappa_t, self.eps_t, self.beta0_db)

    @property
    def fading_r(self):
        return FadingParams(self.kappa_r, self.eps_r, self.beta0_db)

    @property
    def params(self):
        return SystemParams.from_dbm(self.p_bs_dbm, self.sigma2_dbm, self.p_a_max_dbm, self.phase_bits)


@dataclass(frozen=True)
class SeStats:
    """Per-method aggregate; ``std_se`` is the population standard deviation."""

    mean_se: float
    std_se: float
    per_trial: tuple
    method_tag: str


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    method: str
    stats: SeStats
    trials: int
    seed: int


def _streams(cfg, trial_index):
    seq = np.random.SeedSequence([cfg.seed, trial_index])
    return seq.spawn(3)


def draw_channels(cfg, trial_index):
    """Channel realization for one trial; shared by all methods."""
    channel_seq, _, _ = _streams(cfg, trial_index)
    return scenario_channels(
        cfg.geometry, cfg.n, cfg.n_t, cfg.n_r, cfg.fading_t, cfg.fading_r,
        np.random.default_rng(channel_seq),
    )


def run_trial(cfg, trial_index, method_tag):
    """Spectral efficiency (bits/s/Hz) of one method on one realization."""
    if method_tag not in METHODS:
        raise ValueError(f"unknown method {method_tag!r}; expected one of {METHODS}")
    _, init_seq, random_seq = _streams(cfg, trial_index)
    ch = draw_channels(cfg, trial_index)
    params = cfg.params

    if method_tag == "ris-random":
        coefs = random_phase_coefficients(cfg.n, cfg.phase_bits, np.random.default_rng(random_seq))
        return se_exact(ch.h_t, ch.h_r, coefs, params)

    active = cfg.active_set if method_tag == "hr-ris" else ()
    ao = AoConfig(active_set=active, max_sweeps=cfg.max_sweeps, rel_tol=cfg.rel_tol, seed=init_seq)
    return alternating_optimize(ch.h_t, ch.h_r, params, ao).se_exact


def _trial_task(args):
    return run_trial(*args)


def run_monte_carlo(cfg, method_tag, workers=1):
    tasks = [(cfg, i, method_tag) for i in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_trial_task, tasks))
    else:
        values = [_trial_task(t) for t in tasks]
    arr = np.asarray(values, dtype=float)
    return SeStats(float(arr.mean()), float(arr.std()), tuple(values), method_tag)


def config_at(cfg, axis, value):
    """Copy of ``cfg`` with one sweep axis set to ``value``."""
    if axis not in AXES:
        raise ValueError(f"unknown axis {axis!r}; valid axes: {', '.join(AXES)}")
    try:
        if axis == "k":
            if float(value) != int(value):
                raise ConfigError("k", f"must be an integer, got {value!r}")
            return replace(cfg, k=int(value), active_set=None)
        return replace(cfg, **{axis: float(value)})
    except (ConfigError, TypeError, ValueError) as err:
        raise ValueError(f"invalid {axis} value {value!r}: {err}") from None


def sweep(cfg, axis, values, methods=METHODS, workers=1):
    """One row per (axis value, method), in deterministic order."""
    points = [(float(v), config_at(cfg, axis, v)) for v in values]
    rows = []
    for value, point_cfg in points:
        for method in sorted(methods):
            stats = run_monte_carlo(point_cfg, method, workers=workers)
            rows.append(SweepRow(axis, value, method, stats, point_cfg.trials, point_cfg.seed))
    rows.sort(key=lambda r: (r.value, r.method))
    return rows


def _fmt(x):
    return format(float(x), ".12g")


def write_results(rows, path):
    """Write rows as CSV; the file appears only once fully written."""
    path = os.fspath(path)
    ordered = sorted(rows, key=lambda r: (r.value, r.method))
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".hrris-", suffix=".csv", dir=directory)
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_HEADER)
                for r in ordered:
                    writer.writerow([r.axis, _fmt(r.value), r.method, _fmt(r.stats.mean_se),
                                     _fmt(r.stats.std_se), r.trials, r.seed])
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as err:
        raise OSError(f"cannot write results to {path}: {err}") from err


def read_results(path):
    """Parse a results CSV back into a list of dicts with numeric fields."""
    with open(path, newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            rec["value"] = float(rec["value"])
            rec["mean_se"] = float(rec["mean_se"])
            rec["std_se"] = float(rec["std_se"])
            rec["trials"] = int(rec["trials"])
            rec["seed"] = int(rec["seed"])
            out.append(rec)
        return out
