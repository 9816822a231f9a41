"""Landau-level transition probabilities by three independent routes.

A particle sits in the Fock state |n1, n2> of the initial constant field;
the field varies and settles at omega_f.  The transition probability to
|m1, m2> of the final field is computed as

* ``overlap``      -- |<m| evolved n>|^2 by adaptive 2D quadrature of the
                      wave functions (the ground-truth oracle route);
* ``jacobi``       -- the closed form
                      (m2! n1!)/(m1! n2!) R^(m1-n1) (1-R)^(n2-n1+1)
                      |J_{n1}^{(m1-n1, n2-n1)}(1 - 2R)|^2
                      driven by the envelope reflection coefficient R;
* ``tomographic``  -- the trace formula
                      P = (1/4 pi^2) int w_n(X) w_m(Y)
                          e^{i(X1-Y1+X2-Y2)} dX dY dmu dnu.

For the tomographic route the X and Y integrals are Gaussian-moment
closed forms per (mu, nu); in polar frame coordinates
(mu_j, nu_j) = r_j (cos th_j, sin th_j) the radial integrals are again
Gaussian moments, so only the two frame angles are left to stratified
Monte Carlo over [0, 2pi)^2.  Axial symmetry conserves L_z = n2 - n1, so
probabilities with m2 - m1 != n2 - n1 vanish (the Jacobi route enforces
the selection rule; quadrature confirms it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import states
from .envelope import FieldProfile, extract_asymptotics, solve_envelope
from .numerics import (BudgetError, MCConfig, QuadratureBudget,
                       adaptive_quad_2d, stream_rng)
from .special import HERMITE_CAP, CapacityError, jacobi_poly, log_factorial

CLAMP_TOL = 1e-9
SETTLE = 1.0  # extra integration past the profile's flat tail


@dataclass(frozen=True)
class TransitionSpec:
    initial: tuple[int, int]
    final: tuple[int, int]
    profile: FieldProfile
    quad_budget: QuadratureBudget = QuadratureBudget(abs_tol=1e-11,
                                                     rel_tol=1e-9,
                                                     max_evals=4_000_000)
    mc: MCConfig = field(default_factory=lambda: MCConfig(
        seed=0, n_samples=1_000_000, n_strata=2500))
    envelope_tol: float = 1e-12

    def __post_init__(self):
        for pair in (self.initial, self.final):
            if len(pair) != 2 or min(pair) < 0:
                raise ValueError("state indices must be non-negative pairs")
            if max(pair) > HERMITE_CAP:
                raise CapacityError(f"indices {pair} exceed cap {HERMITE_CAP}")


@dataclass(frozen=True)
class ProbabilityEstimate:
    """One transition probability; stochastic routes report their stderr.

    Values are confined to [-stderr, 1 + stderr]: deterministic routes
    clamp roundoff-level excursions, stochastic estimates of boundary
    probabilities are clipped to the window edge.
    """

    value: float
    stderr: float
    route: str
    samples: int = 0

    def __post_init__(self):
        if not (-self.stderr - CLAMP_TOL <= self.value
                <= 1.0 + self.stderr + CLAMP_TOL):
            raise ValueError(
                f"probability {self.value} outside [0, 1] beyond tolerance")


def _clamped(value: float, route: str, stderr: float = 0.0,
             samples: int = 0) -> ProbabilityEstimate:
    if stderr == 0.0:
        if value < -CLAMP_TOL or value > 1.0 + CLAMP_TOL:
            raise ValueError(f"{route} probability {value} outside [0, 1]")
        value = min(max(value, 0.0), 1.0)
    return ProbabilityEstimate(value=value, stderr=stderr, route=route,
                               samples=samples)


# ---------------------------------------------------------------------------
# Shared evolved/final contexts


def evolved_contexts(profile: FieldProfile, tol: float = 1e-12,
                     settle: float = SETTLE):
    """(evolved VaryingField at the settle time, final ConstantField, R)."""
    t_eval = profile.t_end + settle
    if t_eval <= profile.t_start:
        t_eval = profile.t_start + max(settle, 1.0)
    traj = solve_envelope(profile, t_end=t_eval, tol=tol)
    asym = extract_asymptotics(traj, profile)
    evolved = states.VaryingField(traj.state_at(t_eval))
    final = states.ConstantField(profile.omega_final)
    return evolved, final, asym.big_r


# ---------------------------------------------------------------------------
# Route 1: overlap integral


def _overlap_in_contexts(initial, final_idx, evolved, final_ctx,
                         budget: QuadratureBudget) -> ProbabilityEstimate:
    n_label = states.Fock(*initial)
    m_label = states.Fock(*final_idx)
    span = max(states.support_radius(n_label, evolved, tail=1e-22),
               states.support_radius(m_label, final_ctx, tail=1e-22))

    def integrand(x, y):
        return (np.conj(states.fock_wavefunction(m_label, final_ctx, x, y))
                * states.fock_wavefunction(n_label, evolved, x, y))

    amp, _err = adaptive_quad_2d(integrand, (-span, span, -span, span), budget)
    return _clamped(abs(amp) ** 2, "overlap")


def probability_overlap(spec: TransitionSpec) -> ProbabilityEstimate:
    """|int psi_final* psi_evolved dx dy|^2 by adaptive quadrature."""
    evolved, final, _ = evolved_contexts(spec.profile, tol=spec.envelope_tol)
    return _overlap_in_contexts(spec.initial, spec.final, evolved, final,
                                spec.quad_budget)


# ---------------------------------------------------------------------------
# Route 2: Jacobi closed form


def probability_jacobi(initial: tuple[int, int], final: tuple[int, int],
                       big_r: float) -> ProbabilityEstimate:
    """Closed-form probability from the reflection coefficient R.

    Selection rule m2 - m1 = n2 - n1 (else 0); the m1 < n1 corner is
    evaluated through the time-reversal symmetry P_n^m = P_m^n.
    """
    if not 0.0 <= big_r < 1.0:
        raise ValueError(f"R = {big_r} outside [0, 1)")
    n1, n2 = initial
    m1, m2 = final
    if min(n1, n2, m1, m2) < 0 or max(n1, n2, m1, m2) > HERMITE_CAP:
        raise CapacityError("indices out of range")
    if m2 - m1 != n2 - n1:
        return _clamped(0.0, "jacobi")
    if m1 < n1:
        n1, n2, m1, m2 = m1, m2, n1, n2
    log_pref = (log_factorial(m2) + log_factorial(n1)
                - log_factorial(m1) - log_factorial(n2))
    jac = jacobi_poly(n1, m1 - n1, n2 - n1, 1.0 - 2.0 * big_r)
    value = (math.exp(log_pref) * big_r ** (m1 - n1)
             * (1.0 - big_r) ** (n2 - n1 + 1) * jac * jac)
    return _clamped(value, "jacobi")


def jacobi_row(initial: tuple[int, int], big_r: float,
               tol: float = 1e-6) -> tuple[dict, float]:
    """All final-state probabilities for one initial state, with tail bound.

    Finals run over m1 = max(0, n1 - n2), ... with m2 = m1 + (n2 - n1);
    terms eventually decay geometrically like R per step, so the row is
    truncated once the term ratio rho stays below 1 and the remaining tail
    bound last * rho / (1 - rho) drops under ``tol``.
    """
    n1, n2 = initial
    delta = n2 - n1
    row: dict[tuple[int, int], float] = {}
    m1 = max(0, -delta)
    prev = None
    tail = math.inf
    while True:
        m = (m1, m1 + delta)
        p = probability_jacobi(initial, m, big_r).value
        row[m] = p
        if prev is not None and m1 > n1 + 2:
            if prev == 0.0 and p == 0.0:
                tail = 0.0  # geometric factor underflowed; row is exhausted
                break
            if prev > 0.0:
                ratio = p / prev
                if 0.0 <= ratio < 1.0:
                    tail = p * ratio / (1.0 - ratio)
                    if tail < tol:
                        break
        prev = p
        m1 += 1
        if m1 + max(0, delta) > HERMITE_CAP:
            # row truncated at the index cap; report the achieved bound
            if not math.isfinite(tail):
                raise BudgetError("jacobi row tail bound unavailable at cap",
                                  achieved=math.inf)
            break
    return row, tail


# ---------------------------------------------------------------------------
# Route 3: tomographic trace integral


def _axis_frame(c: complex, theta: np.ndarray):
    """Per-sample axis data: unit-frame denominator and Gaussian width."""
    d_hat = 2.0 * c * np.sin(theta) + 1j * np.cos(theta)
    k = -2.0 * c.real / np.abs(d_hat) ** 2
    return d_hat, k


def _moment_coeffs(k: np.ndarray, deg: int) -> np.ndarray:
    """Coefficient arrays h[a, p] of the Gaussian moment polynomials.

    int x^a exp(-k x^2 + i r x) dx = sqrt(pi/k) exp(-r^2/(4k)) h_a(r)
    with h_0 = 1 and h_{a+1} = (i r h_a + a h_{a-1}) / (2 k).
    """
    b = k.shape[0]
    h = np.zeros((deg + 1, deg + 1, b), dtype=complex)
    h[0, 0] = 1.0
    inv2k = 0.5 / k
    for a in range(deg):
        h[a + 1, 1:] = 1j * h[a, :-1] * inv2k
        if a:
            h[a + 1] += a * h[a - 1] * inv2k
    return h


def _radial_table(h_x: np.ndarray, h_y: np.ndarray, k_x: np.ndarray,
                  k_y: np.ndarray) -> np.ndarray:
    """I[a, a'] = int_0^inf r m_a(r; k_x) conj(m_a'(r; k_y)) dr per sample.

    Expanding both moment polynomials leaves gamma-function radial moments
    of exp(-Q r^2) with Q = 1/(4 k_x) + 1/(4 k_y).
    """
    deg_x = h_x.shape[0] - 1
    deg_y = h_y.shape[0] - 1
    q = 0.25 / k_x + 0.25 / k_y
    smax = deg_x + deg_y
    qpow = q[None, :] ** (-0.5 * (np.arange(smax + 1) + 2.0))[:, None]
    gam = np.array([0.5 * math.gamma(0.5 * (s + 2)) for s in range(smax + 1)])
    gvec = gam[:, None] * qpow  # (smax+1, b)
    pref = math.pi / np.sqrt(k_x * k_y)
    h_y_c = np.conj(h_y)
    # tmp[a, q_idx] = sum_p h_x[a, p] gvec[p + q_idx]
    tmp = np.empty((deg_x + 1, deg_y + 1, h_x.shape[2]), dtype=complex)
    for qi in range(deg_y + 1):
        tmp[:, qi] = np.einsum("apb,pb->ab", h_x, gvec[qi:qi + deg_x + 1])
    table = np.einsum("aqb,cqb->acb", tmp, h_y_c)
    return table * pref


def _hermite_sq_coeffs(n1: int, n2: int, s11, s12, ell) -> np.ndarray:
    """Real coefficient arrays of |H_{n1 n2}(S, u(x1, x2))|^2 per sample.

    The Hermite recurrence runs on bivariate polynomial coefficient
    tensors (deg+1, deg+1, batch); u_i = ell[i,0] x1 + ell[i,1] x2.
    """
    deg = n1 + n2
    b = s11.shape[0]
    shape = (deg + 1, deg + 1, b)

    def blank():
        return np.zeros(shape, dtype=complex)

    def mul_u(poly, i):
        out = blank()
        out[1:, :] += ell[i][0] * poly[:-1, :]
        out[:, 1:] += ell[i][1] * poly[:, :-1]
        return out

    table = {}
    table[(0, 0)] = blank()
    table[(0, 0)][0, 0] = 1.0
    for i in range(n1):
        h = mul_u(table[(i, 0)], 0)
        if i:
            h -= s11 * i * table[(i - 1, 0)]
        table[(i + 1, 0)] = h
    for j in range(n2):
        for i in range(n1 + 1):
            h = mul_u(table[(i, j)], 1)
            if i:
                h -= s12 * i * table[(i - 1, j)]
            if j:
                h += s11 * j * table[(i, j - 1)]  # S22 = -S11
            table[(i, j + 1)] = h
    hh = table[(n1, n2)]
    sq = np.zeros((2 * deg + 1, 2 * deg + 1, b), dtype=complex)
    hc = np.conj(hh)
    for i in range(deg + 1):
        for j in range(deg + 1):
            sq[i:i + deg + 1, j:j + deg + 1] += hh[i, j] * hc
    return sq.real


def _gauss_data(ctx) -> tuple[complex, float]:
    return ctx.gauss_c, ctx.sigma


def tomographic_table(profile: FieldProfile, pairs, mc: MCConfig,
                      envelope_tol: float = 1e-12,
                      settle: float = SETTLE, contexts=None) -> dict:
    """Monte-Carlo estimates for many (initial, final) pairs at once.

    All pairs share the same stratified angle samples, the same radial
    tables and the per-state Hermite coefficient tensors, so a full
    n, m <= 2 table costs little more than a single pair.  Returns
    {(initial, final): ProbabilityEstimate}.  ``contexts`` may inject a
    precomputed (evolved, final) pair in place of the envelope solve.
    """
    pairs = [(tuple(n), tuple(m)) for n, m in pairs]
    if contexts is not None:
        evolved, final = contexts
    else:
        evolved, final, _ = evolved_contexts(profile, tol=envelope_tol,
                                             settle=settle)
    c_x, sig_x = _gauss_data(evolved)
    c_y, sig_y = _gauss_data(final)
    initials = sorted({p[0] for p in pairs})
    finals = sorted({p[1] for p in pairs})
    deg_x = {n: 2 * (n[0] + n[1]) for n in initials}
    deg_y = {m: 2 * (m[0] + m[1]) for m in finals}
    dx_max = max(deg_x.values())
    dy_max = max(deg_y.values())
    n_strata = mc.n_strata
    k_side = int(round(math.sqrt(n_strata)))
    if k_side * k_side != n_strata:
        raise ValueError("n_strata must be a perfect square (angle grid)")
    n_per = mc.samples_per_stratum
    cell = 2.0 * math.pi / k_side
    sums = {p: [] for p in pairs}
    varsums = {p: [] for p in pairs}
    for stratum in range(n_strata):
        rng = stream_rng(mc.seed, stratum)
        u = rng.random((n_per, 2))
        i1, i2 = divmod(stratum, k_side)
        th1 = (i1 + u[:, 0]) * cell
        th2 = (i2 + u[:, 1]) * cell
        axis = {}
        for j, th in ((0, th1), (1, th2)):
            dx_hat, kx = _axis_frame(c_x, th)
            dy_hat, ky = _axis_frame(c_y, th)
            h_x = _moment_coeffs(kx, dx_max)
            h_y = _moment_coeffs(ky, dy_max)
            axis[j] = {
                "absd": np.abs(dx_hat) * np.abs(dy_hat),
                "dx_hat": dx_hat, "dy_hat": dy_hat, "sin": np.sin(th),
                "table": _radial_table(h_x, h_y, kx, ky),
            }
        prefactor = (sig_x**2 * sig_y**2 / math.pi**2
                     / (axis[0]["absd"] * axis[1]["absd"]))
        frame_x = _frame_arrays(sig_x, axis[0]["dx_hat"], axis[1]["dx_hat"],
                                axis[0]["sin"], axis[1]["sin"])
        frame_y = _frame_arrays(sig_y, axis[0]["dy_hat"], axis[1]["dy_hat"],
                                axis[0]["sin"], axis[1]["sin"])
        coeff_n = {n: _hermite_sq_coeffs(n[0], n[1], *frame_x)
                   for n in initials}
        coeff_m = {m: _hermite_sq_coeffs(m[0], m[1], *frame_y)
                   for m in finals}
        for n, m in pairs:
            dn, dm = deg_x[n], deg_y[m]
            i1t = axis[0]["table"][:dn + 1, :dm + 1]
            i2t = axis[1]["table"][:dn + 1, :dm + 1]
            cn = coeff_n[n]
            cm = coeff_m[m]
            w1 = np.einsum("acb,aeb->ceb", i1t, cn)
            w2 = np.einsum("ceb,efb->cfb", w1, i2t)
            t_val = np.einsum("cfb,cfb->b", w2, cm)
            log_nfac = (log_factorial(n[0]) + log_factorial(n[1])
                        + log_factorial(m[0]) + log_factorial(m[1]))
            g = (prefactor * t_val).real * math.exp(-log_nfac)
            mean = float(g.mean())
            var = float(g.var(ddof=1)) / n_per
            sums[(n, m)].append(mean)
            varsums[(n, m)].append(var)
    out = {}
    for p in pairs:
        value = math.fsum(sums[p]) / n_strata
        stderr = math.sqrt(math.fsum(varsums[p])) / n_strata
        value = min(max(value, -stderr), 1.0 + stderr)
        out[p] = ProbabilityEstimate(value=value, stderr=stderr,
                                     route="tomographic",
                                     samples=mc.n_samples)
    return out


def _frame_arrays(sigma: float, d1: np.ndarray, d2: np.ndarray,
                  sin1: np.ndarray, sin2: np.ndarray):
    """Hermite frame of one side over the sample batch.

    In unit-frame coordinates t_j = -sin(theta_j) / D_hat_j and

        S11 = sigma^2 (t1 - t2),  S22 = -S11,
        S12 = -i (sigma^2 (t1 + t2) - 1),
        u   = sigma (-x1/D1 + i x2/D2,  i x1/D1 - x2/D2).
    """
    t1 = -sin1 / d1
    t2 = -sin2 / d2
    s11 = sigma**2 * (t1 - t2)
    s12 = -1j * (sigma**2 * (t1 + t2) - 1.0)
    ell = ((-sigma / d1, 1j * sigma / d2), (1j * sigma / d1, -sigma / d2))
    return s11, s12, ell


def probability_tomographic(spec: TransitionSpec) -> ProbabilityEstimate:
    """Stochastic estimate of the trace-formula probability."""
    table = tomographic_table(spec.profile, [(spec.initial, spec.final)],
                              spec.mc, envelope_tol=spec.envelope_tol)
    est = table[(tuple(spec.initial), tuple(spec.final))]
    target = max(1e-3, 0.01 * abs(est.value))
    if est.stderr > target:
        raise BudgetError("tomographic stderr target unreachable",
                          achieved=est.stderr)
    return est


def reflection_from_tomograms(profile: FieldProfile,
                              mc: MCConfig | None = None) -> tuple[float, float]:
    """R = 1 - P_00^00 with P estimated by the tomographic route."""
    mc = mc or MCConfig(seed=0, n_samples=1_000_000, n_strata=2500)
    table = tomographic_table(profile, [((0, 0), (0, 0))], mc)
    est = table[((0, 0), (0, 0))]
    return 1.0 - est.value, est.stderr


# ---------------------------------------------------------------------------
# Batch driver


@dataclass(frozen=True)
class TableEntry:
    initial: tuple[int, int]
    final: tuple[int, int]
    estimates: dict


def selection_pairs(n_max: int, m_cap: int | None = None):
    """All (initial, final) pairs with indices <= n_max obeying the
    L_z selection rule m2 - m1 = n2 - n1 (finals capped at m_cap)."""
    m_cap = n_max if m_cap is None else m_cap
    pairs = []
    for n1 in range(n_max + 1):
        for n2 in range(n_max + 1):
            delta = n2 - n1
            for m1 in range(max(0, -delta), m_cap + 1):
                if m1 + delta <= m_cap:
                    pairs.append(((n1, n2), (m1, m1 + delta)))
    return pairs


def transition_table(profile: FieldProfile, n_max: int,
                     routes=("overlap", "jacobi"),
                     mc: MCConfig | None = None,
                     quad_budget: QuadratureBudget | None = None,
                     envelope_tol: float = 1e-12,
                     row_tail_tol: float = 1e-6):
    """All transitions among levels <= n_max by the requested routes.

    Returns (entries, row_sums) where row_sums[initial] = (completeness
    over the full jacobi row, documented tail bound).  Jacobi rows extend
    beyond n_max until the geometric tail bound drops under
    ``row_tail_tol``; route entries are reported for finals <= n_max.
    """
    if n_max > HERMITE_CAP:
        raise CapacityError(f"n_max {n_max} exceeds cap {HERMITE_CAP}")
    quad_budget = quad_budget or QuadratureBudget(abs_tol=1e-11, rel_tol=1e-9,
                                                  max_evals=4_000_000)
    evolved, final_ctx, big_r = evolved_contexts(profile, tol=envelope_tol)
    pairs = selection_pairs(n_max)
    tomo = {}
    if "tomographic" in routes:
        mc = mc or MCConfig(seed=0, n_samples=1_000_000, n_strata=2500)
        tomo = tomographic_table(profile, pairs, mc, envelope_tol=envelope_tol)
    entries = []
    for n, m in pairs:
        ests = {}
        if "overlap" in routes:
            ests["overlap"] = _overlap_in_contexts(n, m, evolved, final_ctx,
                                                   quad_budget)
        if "jacobi" in routes:
            ests["jacobi"] = probability_jacobi(n, m, big_r)
        if "tomographic" in routes:
            ests["tomographic"] = tomo[(n, m)]
        entries.append(TableEntry(initial=n, final=m, estimates=ests))
    row_sums = {}
    for n1 in range(n_max + 1):
        for n2 in range(n_max + 1):
            row, tail = jacobi_row((n1, n2), big_r, tol=row_tail_tol)
            row_sums[(n1, n2)] = (math.fsum(row.values()), tail)
    return entries, row_sums
