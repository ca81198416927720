"""Rician MIMO channels for the BS -> surface -> MS geometry.

All random draws go through an explicitly passed ``numpy.random.Generator``.
The LoS component is a rank-one outer product of half-wavelength ULA
steering vectors with uniformly drawn angles.
"""

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class Geometry:
    """BS at the origin, surface at ``(hrris_x, 0)``, MS at ``ms_pos``."""

    hrris_x: float = 51.0
    ms_pos: tuple = (40.0, 2.0)
    bs_pos: tuple = (0.0, 0.0)

    def __post_init__(self):
        coords = (self.hrris_x, *self.ms_pos, *self.bs_pos)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"geometry coordinates must be finite, got {coords}")
        if self.hrris_x <= 0:
            raise ValueError(f"hrris_x must be > 0, got {self.hrris_x}")
        if self.d_r <= 0:
            raise ValueError("surface and MS positions coincide")

    @property
    def d_t(self):
        """BS -> surface distance in meters."""
        return math.hypot(self.hrris_x - self.bs_pos[0], self.bs_pos[1])

    @property
    def d_r(self):
        """Surface -> MS distance in meters."""
        return math.hypot(self.hrris_x - self.ms_pos[0], self.ms_pos[1])


@dataclass(frozen=True)
class FadingParams:
    """Per-link Rician factor, path-loss exponent and 1 m reference loss.

    ``kappa`` may be ``math.inf`` for a pure line-of-sight link.
    """

    kappa: float
    exponent: float
    beta0_db: float = -30.0

    def __post_init__(self):
        if not (self.kappa >= 0):
            raise ValueError(f"kappa must be >= 0 or inf, got {self.kappa}")
        if not (1 < self.exponent <= 6):
            raise ValueError(f"path-loss exponent must lie in (1, 6], got {self.exponent}")
        if not math.isfinite(self.beta0_db):
            raise ValueError("beta0_db must be finite")


@dataclass(frozen=True)
class ChannelPair:
    h_t: np.ndarray  # N x N_t, BS -> surface
    h_r: np.ndarray  # N_r x N, surface -> MS


def path_loss_linear(d, exponent, beta0_db=-30.0):
    """Linear power gain ``10**(beta0_db/10) * d**(-exponent)``."""
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d}")
    return 10.0 ** (beta0_db / 10.0) * d ** (-exponent)


def steering_vector(n_elems, angle):
    """Half-wavelength ULA response as an ``(n_elems, 1)`` column."""
    if n_elems < 1:
        raise ValueError(f"n_elems must be >= 1, got {n_elems}")
    k = np.arange(n_elems)
    return np.exp(1j * np.pi * k * np.sin(angle)).reshape(-1, 1)


def rician_matrix(rows, cols, kappa, rng):
    """Unit-average-power Rician matrix.

    The angle pair and the NLoS block are always drawn, whatever ``kappa``,
    so the generator advances identically for every configuration.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"shape must be positive, got ({rows}, {cols})")
    if not kappa >= 0:
        raise ValueError(f"kappa must be >= 0 or inf, got {kappa}")
    aoa, aod = rng.uniform(0.0, 2.0 * np.pi, size=2)
    los = steering_vector(rows, aoa) @ steering_vector(cols, aod).conj().T
    nlos = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)

    if math.isinf(kappa):
        return los
    if kappa == 0:
        return nlos
    return np.sqrt(kappa / (1.0 + kappa)) * los + np.sqrt(1.0 / (1.0 + kappa)) * nlos


def scenario_channels(geom, n, n_t, n_r, fading_t, fading_r, rng):
    """Draw ``H_t`` then ``H_r`` for one realization."""
    small_t = rician_matrix(n, n_t, fading_t.kappa, rng)
    small_r = rician_matrix(n_r, n, fading_r.kappa, rng)
    gain_t = path_loss_linear(geom.d_t, fading_t.exponent, fading_t.beta0_db)
    gain_r = path_loss_linear(geom.d_r, fading_r.exponent, fading_r.beta0_db)
    return ChannelPair(h_t=np.sqrt(gain_t) * small_t, h_r=np.sqrt(gain_r) * small_r)


def dbm_to_mw(p_dbm):
    return 10.0 ** (p_dbm / 10.0)
