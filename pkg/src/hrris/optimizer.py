"""Closed-form alternating optimization of hybrid relay-reflecting surfaces.

Notation follows the usual cascaded-channel conventions: ``H_t`` is the
``N x N_t`` BS -> surface channel, ``H_r`` the ``N_r x N`` surface -> MS
channel, ``r_n`` the n-th column of ``H_r`` and ``t_n^H`` the n-th row of
``H_t``. Element indices are 0-based throughout.

Each element n sees the surrogate objective

    f(alpha) = log2 |A_n + |alpha|^2 B_n + alpha C_n + conj(alpha) C_n^H|

where A_n, B_n, C_n collect everything that does not depend on alpha.
B_n and C_n are rank one, so the eigenvalues needed by the update are
plain traces.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .channel import dbm_to_mw
from .linalg import determinant, inverse, trace

TWO_PI = 2.0 * np.pi

# Slack allowed on the remaining active budget before it counts as a violation.
BUDGET_ATOL = 1e-12


class BudgetViolationError(ValueError):
    """Remaining active power budget went negative."""


@dataclass(frozen=True)
class SystemParams:
    """Link budget in linear milliwatts.

    ``phase_bits = 0`` selects continuous phases.
    """

    p_bs: float
    sigma2: float
    p_a_max: float
    phase_bits: int = 0

    def __post_init__(self):
        if not self.p_bs > 0:
            raise ValueError(f"p_bs must be > 0 mW, got {self.p_bs}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be > 0 mW, got {self.sigma2}")
        if not self.p_a_max >= 0:
            raise ValueError(f"p_a_max must be >= 0 mW, got {self.p_a_max}")
        if self.phase_bits < 0:
            raise ValueError(f"phase_bits must be >= 0, got {self.phase_bits}")

    @property
    def rho(self):
        return self.p_bs / self.sigma2

    @classmethod
    def from_dbm(cls, p_bs_dbm, sigma2_dbm, p_a_max_dbm, phase_bits=0):
        return cls(dbm_to_mw(p_bs_dbm), dbm_to_mw(sigma2_dbm), dbm_to_mw(p_a_max_dbm), phase_bits)


@dataclass(frozen=True, eq=False)
class HrRisCoefficients:
    """Per-element coefficients plus the (sorted) active index set.

    Passive elements must have unit modulus. ``upsilon``, ``phi`` and ``psi``
    are dense diagonal views: all elements, passive only, active only.
    """

    alphas: np.ndarray
    active_set: tuple = ()

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=np.complex128).ravel()
        alphas.setflags(write=False)
        active = tuple(sorted(int(i) for i in self.active_set))
        n = alphas.size
        if len(set(active)) != len(active):
            raise ValueError(f"active_set has duplicate indices: {self.active_set}")
        if active and (active[0] < 0 or active[-1] >= n):
            raise ValueError(f"active_set indices must lie in [0, {n}), got {active}")
        if not np.all(np.isfinite(alphas)):
            raise ValueError("coefficients must be finite")
        passive = ~_mask(n, active)
        if np.any(np.abs(np.abs(alphas[passive]) - 1.0) > 1e-12):
            raise ValueError("passive elements must have unit modulus")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "active_set", active)

    @property
    def n(self):
        return self.alphas.size

    @property
    def active_mask(self):
        return _mask(self.n, self.active_set)

    @property
    def upsilon(self):
        return np.diag(self.alphas)

    @property
    def phi(self):
        return np.diag(np.where(self.active_mask, 0, self.alphas))

    @property
    def psi(self):
        return np.diag(np.where(self.active_mask, self.alphas, 0))

    def replace(self, n, alpha):
        alphas = self.alphas.copy()
        alphas[n] = alpha
        return HrRisCoefficients(alphas, self.active_set)


def _mask(n, active_set):
    mask = np.zeros(n, dtype=bool)
    mask[list(active_set)] = True
    return mask


def _log2det(m):
    return math.log2(determinant(m).real)


# ---------------------------------------------------------------------------
# Objectives and power
# ---------------------------------------------------------------------------

def element_power_costs(h_t, params):
    """Power drawn per unit squared gain: ``sigma2 + P_BS * ||t_n||^2``."""
    row_energy = np.sum(np.abs(h_t) ** 2, axis=1)
    return params.sigma2 + params.p_bs * row_energy


def cascaded_channel(h_t, h_r, coefs):
    """``H_r diag(alpha) H_t``."""
    return (h_r * coefs.alphas) @ h_t


def _relay_noise(h_r, alphas, active_idx):
    """``H_r Psi Psi^H H_r^H = sum_{i in A} |alpha_i|^2 r_i r_i^H``."""
    relayed = h_r[:, active_idx] * alphas[active_idx]
    return relayed @ relayed.conj().T


def noise_covariance(h_r, coefs):
    """Aggregate noise covariance normalized by sigma2: ``I + H_r Psi Psi^H H_r^H``."""
    n_r = h_r.shape[0]
    return np.eye(n_r, dtype=np.complex128) + _relay_noise(h_r, coefs.alphas, list(coefs.active_set))


def se_exact(h_t, h_r, coefs, params):
    """True spectral efficiency in bits/s/Hz."""
    g = cascaded_channel(h_t, h_r, coefs)
    r = noise_covariance(h_r, coefs)
    m = np.eye(h_r.shape[0]) + params.rho * (g @ g.conj().T) @ inverse(r)
    # det(I + PSD R^-1) >= 1; clamp roundoff just below zero
    return max(_log2det(m), 0.0)


def se_upper(h_t, h_r, coefs, params):
    """Surrogate objective ``log2 |I + H_r Psi Psi^H H_r^H + rho G G^H|``.

    Never below :func:`se_exact`; identical when nothing is active.
    """
    g = cascaded_channel(h_t, h_r, coefs)
    return _log2det(noise_covariance(h_r, coefs) + params.rho * (g @ g.conj().T))


def active_power(coefs, h_t, params, costs=None):
    """Total active transmit power in mW, ``sum_{n in A} |alpha_n|^2 xi_n``."""
    if costs is None:
        costs = element_power_costs(h_t, params)
    idx = list(coefs.active_set)
    return float(np.abs(coefs.alphas[idx]) ** 2 @ costs[idx])


def active_power_trace(coefs, h_t, params):
    """Same quantity as :func:`active_power` from the full matrix trace.

    Kept as an independent cross-check of the per-element expansion.
    """
    psi = coefs.psi
    cov = params.p_bs * (h_t @ h_t.conj().T) + params.sigma2 * np.eye(h_t.shape[0])
    return trace(psi @ cov @ psi.conj().T).real


# ---------------------------------------------------------------------------
# Per-element machinery
# ---------------------------------------------------------------------------

def _abc_from_exclusions(r, row, is_active, s_ex, noise_ex, rho):
    a = np.eye(r.size, dtype=np.complex128) + noise_ex + rho * (s_ex @ s_ex.conj().T)
    b_scale = rho * np.vdot(row, row).real + (1.0 if is_active else 0.0)
    b = b_scale * np.outer(r, r.conj())
    c = rho * np.outer(r, row @ s_ex.conj().T)
    return a, b, c


def _abc(n, alphas, is_active, h_t, h_r, s_full, noise_full, rho):
    # exclusion sums by removing element n from the running aggregates
    r = h_r[:, n]
    row = h_t[n]  # t_n^H
    s_ex = s_full - alphas[n] * np.outer(r, row)
    noise_ex = noise_full - abs(alphas[n]) ** 2 * np.outer(r, r.conj()) if is_active else noise_full
    return _abc_from_exclusions(r, row, is_active, s_ex, noise_ex, rho)


def compute_abc(n, coefs, h_t, h_r, params):
    """``(A_n, B_n, C_n)`` for element ``n`` given all other coefficients.

    Relay noise is independent across active elements, so it enters as
    ``sum |alpha_i|^2 r_i r_i^H`` with no cross terms; an active element adds
    ``r_n r_n^H`` to B_n and nothing to C_n. A passive element's A_n keeps
    the full relayed-noise term, so ``A_n + |a|^2 B_n + a C_n + a* C_n^H``
    always rebuilds the surrogate matrix.

    Exclusion sums are rebuilt from scratch here; the optimizer loop uses
    running aggregates instead.
    """
    others = coefs.alphas.copy()
    others[n] = 0
    active_others = [i for i in coefs.active_set if i != n]
    s_ex = (h_r * others) @ h_t
    noise_ex = _relay_noise(h_r, others, active_others)
    return _abc_from_exclusions(h_r[:, n], h_t[n], bool(coefs.active_mask[n]), s_ex, noise_ex, params.rho)


def rank1_eigenvalue(m):
    """Sole (possibly) non-zero eigenvalue of a rank-<=1 square matrix.

    The trace of a rank-one matrix equals its only non-zero eigenvalue; rank
    is not re-checked here.
    """
    return trace(m)


def quantize_phase(theta, bits):
    """Snap ``theta`` to the nearest of ``2**bits`` uniform levels on [0, 2pi).

    ``bits = 0`` returns ``theta`` untouched. Exact midpoints go to the lower
    level.
    """
    if bits < 0:
        raise ValueError(f"bits must be >= 0, got {bits}")
    if bits == 0:
        return theta
    levels = 1 << bits
    step = TWO_PI / levels
    k = math.fmod(theta, TWO_PI)
    if k < 0:
        k += TWO_PI
    k /= step
    lower = math.floor(k)
    idx = lower + 1 if k - lower > 0.5 else lower
    return (idx % levels) * step


@dataclass
class AoWorkspace:
    """Per-element scratch state for one coefficient update."""

    n: int
    alpha: complex
    is_active: bool
    a_n: np.ndarray
    b_n: np.ndarray
    c_n: np.ndarray
    d_n: np.ndarray
    e_n: np.ndarray
    gamma_n: float
    lambda_n: complex
    p_tilde: float = 0.0


def _target_modulus(n, p_tilde, params, costs):
    remaining = params.p_a_max - p_tilde
    if remaining < -BUDGET_ATOL:
        raise BudgetViolationError(
            f"element {n}: other active elements hold {p_tilde:.6e} mW, "
            f"above the budget {params.p_a_max:.6e} mW"
        )
    return math.sqrt(max(remaining, 0.0) / costs[n])


def build_workspace(n, alphas, is_active, h_t, h_r, s_full, noise_full, params, costs, active_idx):
    """Assemble A_n..E_n, gamma_n and lambda_n for element ``n``.

    D_n and E_n are formed with the modulus the update will assign (the full
    remaining budget for active elements, one for passive ones).
    """
    a, b, c = _abc(n, alphas, is_active, h_t, h_r, s_full, noise_full, params.rho)
    if is_active:
        others = [i for i in active_idx if i != n]
        p_tilde = float(np.abs(alphas[others]) ** 2 @ costs[others]) if others else 0.0
        modulus = _target_modulus(n, p_tilde, params, costs)
    else:
        p_tilde = 0.0
        modulus = 1.0
    a_inv = inverse(a)
    a_inv_b = a_inv @ b
    d = np.eye(a.shape[0]) + modulus**2 * a_inv_b
    e = a @ d
    return AoWorkspace(
        n=n,
        alpha=complex(alphas[n]),
        is_active=is_active,
        a_n=a,
        b_n=b,
        c_n=c,
        d_n=d,
        e_n=e,
        gamma_n=rank1_eigenvalue(a_inv_b).real,
        lambda_n=rank1_eigenvalue(inverse(e) @ c),
        p_tilde=p_tilde,
    )


def _optimal_phase(lam):
    return -np.angle(lam)


def update_coefficient(n, workspace, params, costs):
    """Closed-form maximizer of the surrogate over element ``n``.

    Phase ``-arg(lambda_n)`` (quantized if requested); modulus one for
    passive elements and the whole remaining active budget otherwise. An
    element with ``lambda_n == 0`` keeps its previous value.
    """
    if workspace.lambda_n == 0:
        return workspace.alpha
    if workspace.is_active:
        modulus = _target_modulus(n, workspace.p_tilde, params, costs)
    else:
        modulus = 1.0
    phase = quantize_phase(float(_optimal_phase(workspace.lambda_n)), params.phase_bits)
    return modulus * complex(math.cos(phase), math.sin(phase))


def objective_decomposition_check(n, alpha, workspace):
    """Evaluate the surrogate at ``alpha`` directly and via the 3-term split.

    Returns ``(f_direct, f_decomposed)`` with

        f_decomposed = log2|A_n| + log2(1 + |alpha|^2 gamma_n) + h(alpha),
        h(alpha)     = log2|I + alpha E^-1 C + conj(alpha) E^-1 C^H|,

    where D_n, E_n and gamma_n are rebuilt for the probe's modulus.
    """
    a, b, c = workspace.a_n, workspace.b_n, workspace.c_n
    eye = np.eye(a.shape[0])
    mod2 = abs(alpha) ** 2
    f_direct = _log2det(a + mod2 * b + alpha * c + np.conj(alpha) * c.conj().T)

    a_inv_b = inverse(a) @ b
    gamma = rank1_eigenvalue(a_inv_b).real
    e = a @ (eye + mod2 * a_inv_b)
    e_inv = inverse(e)
    h = _log2det(eye + alpha * (e_inv @ c) + np.conj(alpha) * (e_inv @ c.conj().T))
    f_decomposed = _log2det(a) + math.log2(1.0 + mod2 * gamma) + h
    return f_direct, f_decomposed


# ---------------------------------------------------------------------------
# Algorithm driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AoConfig:
    active_set: tuple = ()
    max_sweeps: int = 100
    rel_tol: float = 1e-4
    seed: object = 0

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError(f"max_sweeps must be >= 1, got {self.max_sweeps}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        active = tuple(int(i) for i in self.active_set)
        if len(set(active)) != len(active):
            raise ValueError(f"active_set has duplicate indices: {self.active_set}")
        object.__setattr__(self, "active_set", tuple(sorted(active)))


@dataclass
class AoReport:
    coefficients: HrRisCoefficients
    objective_trace: list
    se_exact: float
    se_upper: float
    sweeps_used: int
    converged: bool = field(default=False)


def initial_coefficients(n, active_set, params, costs, rng):
    """Random start: uniform phases, active power split by normalized uniform weights.

    The active elements together consume exactly ``p_a_max``.
    """
    if params.phase_bits:
        levels = 1 << params.phase_bits
        phases = rng.integers(0, levels, size=n) * (TWO_PI / levels)
    else:
        phases = rng.uniform(0.0, TWO_PI, size=n)
    alphas = np.exp(1j * phases)
    idx = list(active_set)
    if idx:
        weights = 1.0 - rng.random(len(idx))  # (0, 1]
        share = params.p_a_max * weights / weights.sum()
        alphas[idx] *= np.sqrt(share / costs[idx])
    return HrRisCoefficients(alphas, active_set)


def random_phase_coefficients(n, phase_bits, rng):
    """Fully passive surface with uniformly random (quantized) phases."""
    if phase_bits:
        levels = 1 << phase_bits
        phases = rng.integers(0, levels, size=n) * (TWO_PI / levels)
    else:
        phases = rng.uniform(0.0, TWO_PI, size=n)
    return HrRisCoefficients(np.exp(1j * phases), ())


def alternating_optimize(
    h_t,
    h_r,
    params: SystemParams,
    config: AoConfig,
    init: Optional[HrRisCoefficients] = None,
    callback: Optional[Callable[[int, HrRisCoefficients], None]] = None,
) -> AoReport:
    """Cyclic per-element closed-form updates until the surrogate settles.

    ``objective_trace[0]`` is the surrogate at the starting point and entry
    ``k`` the value after sweep ``k``. Iteration stops once the relative
    change over a sweep drops below ``config.rel_tol``. With quantized phases
    the best iterate seen at a sweep boundary is returned.

    ``callback(n, coefs)`` fires after every single element update.
    """
    n_elems = h_t.shape[0]
    active_idx = list(config.active_set)
    if active_idx and active_idx[-1] >= n_elems:
        raise ValueError(f"active_set index {active_idx[-1]} out of range for N={n_elems}")
    is_active = _mask(n_elems, active_idx)
    costs = element_power_costs(h_t, params)

    if init is None:
        rng = np.random.default_rng(config.seed)
        init = initial_coefficients(n_elems, active_idx, params, costs, rng)
    elif init.active_set != tuple(active_idx):
        raise ValueError("init.active_set does not match config.active_set")

    alphas = init.alphas.copy()
    rho = params.rho
    f_prev = se_upper(h_t, h_r, init, params)
    objective = [f_prev]
    best_f, best_alphas = f_prev, alphas.copy()
    converged = False
    sweeps = 0

    for _ in range(config.max_sweeps):
        # rebuilt every sweep so rank-one updates cannot drift
        s_full = (h_r * alphas) @ h_t
        noise_full = _relay_noise(h_r, alphas, active_idx)
        for n in range(n_elems):
            ws = build_workspace(n, alphas, bool(is_active[n]), h_t, h_r, s_full, noise_full, params, costs, active_idx)
            new = update_coefficient(n, ws, params, costs)
            delta = new - alphas[n]
            if delta != 0:
                r = h_r[:, n]
                s_full = s_full + delta * np.outer(r, h_t[n])
                if is_active[n]:
                    noise_full = noise_full + (abs(new) ** 2 - abs(alphas[n]) ** 2) * np.outer(r, r.conj())
                alphas[n] = new
            if callback is not None:
                callback(n, HrRisCoefficients(alphas, active_idx))

        sweeps += 1
        coefs = HrRisCoefficients(alphas, active_idx)
        f_new = se_upper(h_t, h_r, coefs, params)
        objective.append(f_new)
        if f_new >= best_f:
            best_f, best_alphas = f_new, alphas.copy()
        if abs(f_new - f_prev) <= config.rel_tol * max(abs(f_prev), abs(f_new)):
            converged = True
            break
        f_prev = f_new

    final = alphas if params.phase_bits == 0 else best_alphas
    coefs = HrRisCoefficients(final, active_idx)
    return AoReport(
        coefficients=coefs,
        objective_trace=objective,
        se_exact=se_exact(h_t, h_r, coefs, params),
        se_upper=se_upper(h_t, h_r, coefs, params),
        sweeps_used=sweeps,
        converged=converged,
    )


def coordinate_optimality_check(h_t, h_r, coefs, params, grid_size=32, rel_tol=1e-4):
    """True if no single-coefficient change raises the surrogate by > rel_tol (relative).

    Phases are scanned on the quantized grid, or on ``grid_size`` uniform
    points in continuous mode. Active elements also scan ``grid_size``
    moduli from zero up to their remaining-budget limit.
    """
    costs = element_power_costs(h_t, params)
    if params.phase_bits:
        levels = 1 << params.phase_bits
        phases = np.arange(levels) * (TWO_PI / levels)
    else:
        phases = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    unit = np.exp(1j * phases)
    f_cur = se_upper(h_t, h_r, coefs, params)
    active_idx = list(coefs.active_set)

    for n in range(coefs.n):
        a, b, c = compute_abc(n, coefs, h_t, h_r, params)
        if n in coefs.active_set:
            others = [i for i in active_idx if i != n]
            p_tilde = float(np.abs(coefs.alphas[others]) ** 2 @ costs[others]) if others else 0.0
            m_max = math.sqrt(max(params.p_a_max - p_tilde, 0.0) / costs[n])
            cand = np.outer(np.linspace(0.0, m_max, grid_size), unit).ravel()
        else:
            cand = unit
        mats = (
            a[None]
            + (np.abs(cand) ** 2)[:, None, None] * b[None]
            + cand[:, None, None] * c[None]
            + np.conj(cand)[:, None, None] * c.conj().T[None]
        )
        best = float(np.max(np.log2(np.linalg.det(mats).real)))
        if best - f_cur > rel_tol * abs(f_cur):
            return False
    return True
