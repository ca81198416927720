"""scikit-learn style wrapper around the alternating optimizer."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .optimizer import AoConfig, SystemParams, alternating_optimize, cascaded_channel, se_exact
from .validation import check_active_set, check_channels


class HrRisOptimizer(BaseEstimator):
    """Fit surface coefficients to one channel realization.

    Parameters
    ----------
    active_set : sequence of int
        0-based indices of the amplifying elements. Empty means a purely
        passive surface.
    p_bs, sigma2, p_a_max : float
        BS transmit power, noise power and active budget, all in mW.
    phase_bits : int
        Phase resolution; 0 keeps phases continuous.
    max_sweeps, rel_tol :
        Stopping rule of the cyclic updates.
    random_state : None, int or numpy Generator
        Seeds the random starting point.

    Attributes
    ----------
    coef_ : ndarray of shape (N,)
        Complex per-element coefficients.
    coefficients_ : HrRisCoefficients
    objective_trace_ : list of float
        Surrogate objective at the start and after each sweep.
    se_exact_, se_upper_ : float
        Spectral efficiency of the fitted coefficients (true and surrogate).
    n_sweeps_ : int
    converged_ : bool
    """

    def __init__(
        self,
        active_set=(),
        p_bs=1.0,
        sigma2=1.0,
        p_a_max=1.0,
        phase_bits=0,
        max_sweeps=100,
        rel_tol=1e-4,
        random_state=None,
    ):
        self.active_set = active_set
        self.p_bs = p_bs
        self.sigma2 = sigma2
        self.p_a_max = p_a_max
        self.phase_bits = phase_bits
        self.max_sweeps = max_sweeps
        self.rel_tol = rel_tol
        self.random_state = random_state

    def _system_params(self):
        return SystemParams(self.p_bs, self.sigma2, self.p_a_max, self.phase_bits)

    def fit(self, H_t, H_r):
        h_t, h_r = check_channels(H_t, H_r)
        active = check_active_set(self.active_set, h_t.shape[0])
        config = AoConfig(
            active_set=active,
            max_sweeps=self.max_sweeps,
            rel_tol=self.rel_tol,
            seed=np.random.default_rng(self.random_state),
        )
        report = alternating_optimize(h_t, h_r, self._system_params(), config)

        self.coefficients_ = report.coefficients
        self.coef_ = np.array(report.coefficients.alphas)
        self.objective_trace_ = list(report.objective_trace)
        self.se_exact_ = report.se_exact
        self.se_upper_ = report.se_upper
        self.n_sweeps_ = report.sweeps_used
        self.converged_ = report.converged
        self.n_elements_ = h_t.shape[0]
        return self

    def _check_shape(self, h_t):
        if h_t.shape[0] != self.n_elements_:
            raise ValueError(f"fitted for N={self.n_elements_} elements, got channels with N={h_t.shape[0]}")

    def transform(self, H_t, H_r):
        """Effective end-to-end channel ``H_r diag(coef_) H_t``."""
        check_is_fitted(self, "coef_")
        h_t, h_r = check_channels(H_t, H_r)
        self._check_shape(h_t)
        return cascaded_channel(h_t, h_r, self.coefficients_)

    def score(self, H_t, H_r):
        """Spectral efficiency (bits/s/Hz) of the fitted coefficients."""
        check_is_fitted(self, "coef_")
        h_t, h_r = check_channels(H_t, H_r)
        self._check_shape(h_t)
        return se_exact(h_t, h_r, self.coefficients_, self._system_params())
