"""Randomized self-validation suites behind ``hrris validate``.

Each suite takes a base seed and a ``quick`` flag and returns a list of
failure messages (empty on success). Instance ``i`` of a suite is drawn from
``default_rng([seed, i])`` so any failure can be replayed in isolation.
"""

import math

import numpy as np

from .linalg import determinant, inverse
from .optimizer import (
    AoConfig,
    HrRisCoefficients,
    SystemParams,
    active_power,
    active_power_trace,
    alternating_optimize,
    build_workspace,
    compute_abc,
    element_power_costs,
    initial_coefficients,
    objective_decomposition_check,
    rank1_eigenvalue,
    se_exact,
    se_upper,
)


def _cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def random_instance(rng, n, n_t, n_r, k, phase_bits=0):
    """Unit-scale Gaussian channels, random powers and a random active set."""
    h_t = _cn(rng, (n, n_t))
    h_r = _cn(rng, (n_r, n))
    params = SystemParams(
        p_bs=float(rng.uniform(0.5, 5.0)),
        sigma2=1.0,
        p_a_max=float(rng.uniform(0.1, 3.0)),
        phase_bits=phase_bits,
    )
    active = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
    return h_t, h_r, params, active


def random_coefficients(rng, h_t, params, active):
    """Feasible random coefficients; active power anywhere in [0, budget]."""
    costs = element_power_costs(h_t, params)
    coefs = initial_coefficients(h_t.shape[0], active, params, costs, rng)
    alphas = coefs.alphas.copy()
    alphas[list(active)] *= math.sqrt(rng.uniform(0.0, 1.0))
    return HrRisCoefficients(alphas, active)


def reference_ris_ao(h_t, h_r, params, init_alphas, max_sweeps=100, rel_tol=1e-4):
    """Plain cyclic phase-only optimizer for a fully passive surface.

    Written against numpy.linalg with every exclusion sum rebuilt from
    scratch; it shares no code with the HR-RIS path. Returns
    ``(alphas, se)``.
    """
    rho = params.rho
    n, _ = h_t.shape
    n_r = h_r.shape[0]
    alphas = np.array(init_alphas, dtype=complex)
    bits = params.phase_bits

    def surrogate(al):
        g = h_r @ np.diag(al) @ h_t
        return np.linalg.slogdet(np.eye(n_r) + rho * g @ g.conj().T)[1] / math.log(2.0)

    def snap(theta):
        if not bits:
            return theta
        step = 2 * math.pi / 2**bits
        k = (theta % (2 * math.pi)) / step
        lo = math.floor(k)
        return ((lo + 1 if k - lo > 0.5 else lo) % 2**bits) * step

    f_old = surrogate(alphas)
    best = (f_old, alphas.copy())
    for _ in range(max_sweeps):
        for m in range(n):
            others = [i for i in range(n) if i != m]
            rest = sum(alphas[i] * np.outer(h_r[:, i], h_t[i]) for i in others)
            rest = rest if others else np.zeros((n_r, h_t.shape[1]), complex)
            big_a = np.eye(n_r) + rho * rest @ rest.conj().T
            big_b = rho * np.outer(h_r[:, m], h_t[m]) @ np.outer(h_r[:, m], h_t[m]).conj().T
            big_c = rho * np.outer(h_r[:, m], h_t[m]) @ rest.conj().T
            eig = np.linalg.eigvals(np.linalg.inv(big_a + big_b) @ big_c)
            lam = eig[np.argmax(np.abs(eig))]
            if lam != 0:
                alphas[m] = np.exp(1j * snap(-np.angle(lam)))
        f_new = surrogate(alphas)
        if f_new >= best[0]:
            best = (f_new, alphas.copy())
        if abs(f_new - f_old) <= rel_tol * max(abs(f_old), abs(f_new)):
            break
        f_old = f_new
    final = alphas if not bits else best[1]
    g = h_r @ np.diag(final) @ h_t
    se = np.linalg.slogdet(np.eye(n_r) + rho * g @ g.conj().T)[1] / math.log(2.0)
    return final, max(se, 0.0)


def char_poly_root_2x2(m):
    """Larger-modulus root of the 2x2 characteristic polynomial."""
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = np.sqrt(tr * tr - 4 * det)
    roots = ((tr + disc) / 2, (tr - disc) / 2)
    return max(roots, key=abs)


# ---------------------------------------------------------------------------

def suite_reconstruction(seed, quick=False, count=500):
    count = 50 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, 10))
        h_t, h_r, params, active = random_instance(
            rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(0, min(n, 3) + 1))
        )
        coefs = random_coefficients(rng, h_t, params, active)
        g = h_r @ np.diag(coefs.alphas) @ h_t
        hp = h_r @ coefs.psi
        target = np.eye(h_r.shape[0]) + hp @ hp.conj().T + params.rho * g @ g.conj().T
        for n_idx in range(n):
            a, b, c = compute_abc(n_idx, coefs, h_t, h_r, params)
            al = coefs.alphas[n_idx]
            rebuilt = a + abs(al) ** 2 * b + al * c + np.conj(al) * c.conj().T
            err = float(np.max(np.abs(rebuilt - target)))
            if err > 1e-9:
                failures.append(f"seed=[{seed},{i}] element {n_idx}: max entry error {err:.3e}")
                break
    return failures


def suite_decomposition(seed, quick=False, count=1000):
    count = 100 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, 10))
        h_t, h_r, params, active = random_instance(
            rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(0, min(n, 3) + 1))
        )
        coefs = random_coefficients(rng, h_t, params, active)
        costs = element_power_costs(h_t, params)
        n_idx = int(rng.integers(n))
        s_full = h_r @ np.diag(coefs.alphas) @ h_t
        hp = h_r @ coefs.psi
        noise_full = hp @ hp.conj().T
        ws = build_workspace(n_idx, coefs.alphas, bool(coefs.active_mask[n_idx]), h_t, h_r,
                             s_full, noise_full, params, costs, list(active))
        alpha = complex(rng.uniform(0, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
        f_direct, f_dec = objective_decomposition_check(n_idx, alpha, ws)
        if not abs(f_direct - f_dec) <= 1e-9:
            failures.append(f"seed=[{seed},{i}]: f_direct={f_direct!r} f_decomposed={f_dec!r}")
            continue
        a_inv_b = inverse(ws.a_n) @ ws.b_n
        lhs = math.log2(determinant(np.eye(a_inv_b.shape[0]) + abs(alpha) ** 2 * a_inv_b).real)
        rhs = math.log2(1.0 + abs(alpha) ** 2 * rank1_eigenvalue(a_inv_b).real)
        if not abs(lhs - rhs) <= 1e-9:
            failures.append(f"seed=[{seed},{i}]: log2|D_n|={lhs!r} vs log2(1+|a|^2 gamma)={rhs!r}")
    return failures


def suite_trace_eigenvalue(seed, quick=False, count=1000):
    count = 100 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        m = np.outer(_cn(rng, 2), _cn(rng, 2).conj())
        got = rank1_eigenvalue(m)
        want = char_poly_root_2x2(m)
        if not abs(got - want) <= 1e-10 * max(1.0, abs(want)):
            failures.append(f"seed=[{seed},{i}]: trace {got!r} vs root {want!r}")
    return failures


def suite_monotone_ascent(seed, quick=False, count=100):
    count = 10 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(4, 17))
        h_t, h_r, params, active = random_instance(
            rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), int(rng.integers(0, 3))
        )
        rep = alternating_optimize(h_t, h_r, params, AoConfig(active_set=active, seed=rng))
        steps = np.diff(rep.objective_trace)
        if steps.size and steps.min() < -1e-9:
            failures.append(f"seed=[{seed},{i}]: objective dropped by {-steps.min():.3e}")
    return failures


def suite_budget_safety(seed, quick=False, count=100):
    count = 12 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        k = (1, 2, 4)[i % 3]
        n = int(rng.integers(k + 2, 13))
        h_t, h_r, params, active = random_instance(rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), k)
        costs = element_power_costs(h_t, params)
        limit = params.p_a_max * (1 + 1e-9)
        worst = []

        def watch(n_idx, coefs):
            p = active_power(coefs, h_t, params, costs)
            if p > limit:
                worst.append((n_idx, p))
            p_tr = active_power_trace(coefs, h_t, params)
            if abs(p - p_tr) > 1e-9 * max(abs(p_tr), 1e-300):
                worst.append((n_idx, p, p_tr))

        alternating_optimize(h_t, h_r, params, AoConfig(active_set=active, seed=rng), callback=watch)
        if worst:
            failures.append(f"seed=[{seed},{i}]: budget check failed at {worst[0]} (P_max={params.p_a_max})")
    return failures


def suite_upper_bound(seed, quick=False, count=1000):
    count = 100 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, 10))
        k = int(rng.integers(1, min(n, 3) + 1))
        h_t, h_r, params, active = random_instance(rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), k)
        coefs = random_coefficients(rng, h_t, params, active)
        exact, upper = se_exact(h_t, h_r, coefs, params), se_upper(h_t, h_r, coefs, params)
        if upper < exact - 1e-12:
            failures.append(f"seed=[{seed},{i}]: se_upper {upper!r} < se_exact {exact!r}")
        passive = HrRisCoefficients(np.exp(1j * np.angle(coefs.alphas)), ())
        exact0, upper0 = se_exact(h_t, h_r, passive, params), se_upper(h_t, h_r, passive, params)
        if abs(exact0 - upper0) > 1e-12:
            failures.append(f"seed=[{seed},{i}]: K=0 gap {abs(exact0 - upper0):.3e}")
    return failures


def suite_k0_reduction(seed, quick=False, count=50):
    """Empty active set versus :func:`reference_ris_ao`.

    Even instances use 2-bit phases with the default stopping rule, odd ones
    continuous phases run to convergence; a run cut short mid-trajectory
    would only compare roundoff histories.
    """
    count = 6 if quick else count
    failures = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, 13))
        bits = 2 if i % 2 == 0 else 0
        h_t, h_r, params, _ = random_instance(rng, n, int(rng.integers(1, 5)), int(rng.integers(1, 5)), 0, bits)
        rel_tol, max_sweeps = (1e-4, 100) if bits else (1e-12, 1000)
        init = HrRisCoefficients(np.exp(1j * rng.uniform(0, 2 * np.pi, n)), ())
        rep = alternating_optimize(h_t, h_r, params, AoConfig(max_sweeps=max_sweeps, rel_tol=rel_tol), init=init)
        _, ref_se = reference_ris_ao(h_t, h_r, params, init.alphas, max_sweeps=max_sweeps, rel_tol=rel_tol)
        if abs(rep.se_exact - ref_se) > 1e-12:
            failures.append(f"seed=[{seed},{i}]: HR-RIS(K=0) {rep.se_exact!r} vs reference {ref_se!r}")
    return failures


SUITES = {
    "reconstruction": suite_reconstruction,
    "decomposition": suite_decomposition,
    "trace-eigenvalue": suite_trace_eigenvalue,
    "monotone-ascent": suite_monotone_ascent,
    "budget-safety": suite_budget_safety,
    "upper-bound": suite_upper_bound,
    "k0-reduction": suite_k0_reduction,
}


def run_all(seed=0, quick=False):
    """Map suite name -> list of failure messages."""
    return {name: fn(seed, quick) for name, fn in SUITES.items()}
