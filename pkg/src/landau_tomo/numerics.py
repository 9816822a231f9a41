"""Shared numerical engines.

Adaptive 2D quadrature (nested Gauss-Kronrod rule pairs on bisected
rectangles), closed-form Gaussian-times-polynomial moments, and stratified
importance-sampled Monte Carlo with counter-based random streams so that a
fixed (seed, n_samples, n_strata) configuration reproduces bit-identical
estimates regardless of how the work is chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np


class BudgetError(RuntimeError):
    """Raised when a numerical budget (evaluations, samples) is exhausted.

    Carries the best achieved error estimate in ``achieved``.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class SamplerError(RuntimeError):
    """Raised when an importance sampler yields an invalid weight."""


@dataclass(frozen=True)
class QuadratureBudget:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_evals: int = 2_000_000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_evals < 1000:
            raise ValueError("max_evals must be at least 1e3")


# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GAUSS_IDX = np.arange(1, 15, 2)
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


def _rect_rule(f, x0, x1, y0, y1):
    """Kronrod and embedded Gauss estimates of f over a rectangle."""
    hx, hy = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
    cx, cy = 0.5 * (x1 + x0), 0.5 * (y1 + y0)
    xs = cx + hx * _XK
    ys = cy + hy * _XK
    vals = np.asarray(f(xs[:, None], ys[None, :]))
    wk2 = np.outer(_WK, _WK)
    k = (wk2 * vals).sum() * hx * hy
    g = (np.outer(_WG, _WG) * vals[np.ix_(_GAUSS_IDX, _GAUSS_IDX)]).sum() * hx * hy
    return k, abs(k - g)


def adaptive_quad_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    domain: Sequence[float],
    budget: QuadratureBudget = QuadratureBudget(),
) -> tuple[complex, float]:
    """Integrate ``f(x, y)`` over the rectangle (x0, x1, y0, y1).

    ``f`` must accept broadcastable arrays and may return complex values.
    Rectangles are kept in an error-ordered worklist and bisected along
    their longer side until both tolerances are met.  Raises
    :class:`BudgetError` when ``max_evals`` is exceeded first.
    """
    x0, x1, y0, y1 = map(float, domain)
    k, e = _rect_rule(f, x0, x1, y0, y1)
    regions = [(-e, x0, x1, y0, y1, k)]
    n_evals = 225
    total, total_err = k, e
    while True:
        tol = max(budget.abs_tol, budget.rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err
        if n_evals + 450 > budget.max_evals:
            raise BudgetError("adaptive_quad_2d evaluation budget exhausted",
                              achieved=total_err)
        regions.sort()
        neg_e, rx0, rx1, ry0, ry1, rk = regions.pop(0)
        if rx1 - rx0 >= ry1 - ry0:
            xm = 0.5 * (rx0 + rx1)
            parts = [(rx0, xm, ry0, ry1), (xm, rx1, ry0, ry1)]
        else:
            ym = 0.5 * (ry0 + ry1)
            parts = [(rx0, rx1, ry0, ym), (rx0, rx1, ym, ry1)]
        total -= rk
        total_err += neg_e  # neg_e = -error of the split region
        for p in parts:
            pk, pe = _rect_rule(f, *p)
            regions.append((-pe, *p, pk))
            total += pk
            total_err += pe
        n_evals += 450


def gaussian_tail_halfwidth(scale: float, abs_tol: float) -> float:
    """Half-width L such that the Gaussian tail of exp(-(r/scale)^2) mass
    beyond |x| = L is below ``abs_tol``.  Used by callers to truncate
    infinite domains before handing them to :func:`adaptive_quad_2d`."""
    # 2D radial tail of exp(-r^2/s^2): pi s^2 exp(-L^2/s^2)
    val = max(abs_tol, 1e-300)
    return scale * math.sqrt(max(1.0, math.log(math.pi * scale**2 / val)))


# ---------------------------------------------------------------------------
# Gaussian-times-polynomial moments


def _gaussian_normalization(q: np.ndarray) -> complex:
    """pi^(d/2) det(Q)^(-1/2) with the branch fixed by Re Q > 0.

    Factor Q = L (I + i M) L^T with real L from the Cholesky factor of
    Re Q; the eigenvalues of the real symmetric M all satisfy
    Re(1 + i m) = 1 > 0, so the principal square root is correct
    eigenvalue by eigenvalue.
    """
    d = q.shape[0]
    qr, qi = q.real, q.imag
    low = np.linalg.cholesky(qr)
    inv_low = np.linalg.inv(low)
    m = inv_low @ qi @ inv_low.T
    eigs = np.linalg.eigvalsh(0.5 * (m + m.T))
    half_log = complex(np.sum(np.log(1.0 + 1j * eigs))) / 2.0
    det_low = float(np.prod(np.diag(low)))
    return math.pi ** (d / 2) / det_low * np.exp(-half_log)


def _central_moment(cov: np.ndarray, idx: tuple[int, ...], cache: dict) -> complex:
    """Isserlis recursion E[w_i1 ... w_ik] for covariance ``cov``."""
    if len(idx) == 0:
        return 1.0
    if len(idx) % 2 == 1:
        return 0.0
    key = tuple(sorted(idx))
    if key in cache:
        return cache[key]
    first, rest = key[0], key[1:]
    total = 0.0 + 0.0j
    for j in range(len(rest)):
        sub = rest[:j] + rest[j + 1:]
        total += cov[first, rest[j]] * _central_moment(cov, sub, cache)
    cache[key] = total
    return total


def gaussian_poly_moment(
    q: np.ndarray,
    u: np.ndarray,
    poly: Mapping[tuple[int, ...], complex],
) -> complex:
    """Exact value of  integral poly(z) exp(-z^T Q z + u^T z) d^d z.

    ``Q`` is complex symmetric with positive-definite real part, ``u`` a
    complex d-vector and ``poly`` maps multi-indices to coefficients.
    Completing the square leaves central moments of a Gaussian with
    (complex) covariance Q^{-1}/2, evaluated by the Isserlis recursion.
    """
    q = np.asarray(q, dtype=complex)
    u = np.asarray(u, dtype=complex)
    d = q.shape[0]
    if q.shape != (d, d) or u.shape != (d,):
        raise ValueError("Q must be d x d and u length d")
    if not np.allclose(q, q.T, atol=1e-12):
        raise ValueError("Q must be symmetric")
    eigs_re = np.linalg.eigvalsh(q.real)
    if eigs_re.min() <= 0:
        raise ValueError("Re(Q) must be positive definite")
    qinv = np.linalg.inv(q)
    center = 0.5 * qinv @ u
    norm = _gaussian_normalization(q) * np.exp(0.25 * u @ qinv @ u)
    cov = 0.5 * qinv
    cache: dict = {}
    total = 0.0 + 0.0j
    for alpha, coeff in poly.items():
        if len(alpha) != d:
            raise ValueError(f"multi-index {alpha} has wrong dimension")
        # expand prod_i (center_i + w_i)^alpha_i into central moments
        expansion = [((), coeff)]
        for i, a in enumerate(alpha):
            new = []
            for widx, c in expansion:
                for k in range(a + 1):
                    new.append((widx + (i,) * k,
                                c * math.comb(a, k) * center[i] ** (a - k)))
            expansion = new
        for widx, c in expansion:
            total += c * _central_moment(cov, widx, cache)
    return complex(total * norm)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    n_samples: int = 100_000
    n_strata: int = 100
    proposal: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_samples < 1000:
            raise ValueError("n_samples must be at least 1e3")
        if self.n_strata < 1 or self.n_samples % self.n_strata != 0:
            raise ValueError("strata must divide samples evenly")

    @property
    def samples_per_stratum(self) -> int:
        return self.n_samples // self.n_strata


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream); independent by construction."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), stream]))


class BoxUniformSampler:
    """Stratified uniform sampler on an axis-aligned box.

    Strata partition the box on a regular ``strata_shape`` grid; the
    importance weight of every point in stratum k is the stratum volume,
    so that summing per-stratum means of f * weight estimates the integral
    of f over the whole box.
    """

    def __init__(self, lo: Sequence[float], hi: Sequence[float],
                 strata_shape: Sequence[int]):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.shape = tuple(int(s) for s in strata_shape)
        if len(self.shape) != self.lo.size:
            raise ValueError("strata_shape must match box dimension")
        self.n_strata = int(np.prod(self.shape))
        self.cell = (self.hi - self.lo) / np.asarray(self.shape)
        self.cell_volume = float(np.prod(self.cell))

    def sample(self, rng: np.random.Generator, n: int, stratum: int,
               n_strata: int) -> tuple[np.ndarray, np.ndarray]:
        if n_strata != self.n_strata:
            raise ValueError("config strata count does not match sampler grid")
        idx = np.unravel_index(stratum, self.shape)
        base = self.lo + self.cell * np.asarray(idx)
        pts = base + self.cell * rng.random((n, self.lo.size))
        weights = np.full(n, self.cell_volume)
        return pts, weights


class ProductCauchySampler:
    """Heavy-tailed product-Cauchy proposal on R^d (one scale per axis).

    Strata are independent replicate streams: weights fold in the 1/K
    factor so the per-stratum means still sum to the integral estimate.
    """

    def __init__(self, scales: Sequence[float]):
        self.scales = np.asarray(scales, dtype=float)
        if np.any(self.scales <= 0):
            raise ValueError("proposal scales must be positive")

    def sample(self, rng, n, stratum, n_strata):
        pts = rng.standard_cauchy((n, self.scales.size)) * self.scales
        dens = np.prod(
            1.0 / (math.pi * self.scales * (1.0 + (pts / self.scales) ** 2)),
            axis=1)
        if np.any(dens <= 0) or not np.all(np.isfinite(dens)):
            raise SamplerError("proposal density vanished at a sample")
        return pts, 1.0 / (dens * n_strata)


def mc_estimate(
    f: Callable[[np.ndarray], np.ndarray],
    sampler,
    config: MCConfig,
) -> tuple[float, float]:
    """Unbiased importance-sampling estimate of an integral.

    ``f`` maps an (n, d) point array to n values; ``sampler.sample`` must
    return points and importance weights w with
    sum_k E_k[f w] = integral.  The estimate and its standard error come
    from per-stratum means and variances, accumulated in a fixed order so
    the result is bit-identical for a given config.
    """
    n_per = config.samples_per_stratum
    means, variances = [], []
    for k in range(config.n_strata):
        rng = stream_rng(config.seed, k)
        pts, w = sampler.sample(rng, n_per, k, config.n_strata)
        if not np.all(np.isfinite(w)):
            raise SamplerError("non-finite importance weight")
        vals = np.asarray(f(pts)) * w
        m = math.fsum(vals.tolist()) / n_per
        v = math.fsum(((vals - m) ** 2).tolist()) / max(n_per - 1, 1)
        means.append(m)
        variances.append(v / n_per)
    value = math.fsum(means)
    stderr = math.sqrt(math.fsum(variances))
    return value, stderr
