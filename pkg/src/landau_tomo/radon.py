"""Numerical symplectic-tomography transforms.

Model-independent oracles for the closed forms in :mod:`states`:

* tomogram of a sampled wave function, 1 and 2 degrees of freedom, via the
  chirped Fourier integral

      w(X, mu, nu) = (1 / 2 pi |nu|) | int psi(y)
                     exp(i mu y^2 / (2 nu) - i X y / nu) dy |^2

  (per axis in 2D, with prefactor 1 / (4 pi^2 |nu1 nu2|));
* the inverse map from a 1D tomogram back to the density matrix on a grid,
  through the Weyl characteristic function
      chi(mu, nu) = int w(X, mu, nu) exp(i X) dX,
      rho(x, x') = (1/2 pi) int chi(mu, x - x') exp(-i mu (x+x')/2) dmu,
  which reduces the triple integral to a double one with nu fixed by the
  grid geometry.

Grids must resolve the chirp: the per-cell phase step of the kernel has to
stay below pi/4, otherwise a :class:`ResolutionError` reports the grid size
that would suffice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import states
from .special import hermite_phys, log_factorial

BOUNDARY_DECAY = 1e-8


class ResolutionError(ValueError):
    """Grid too coarse for the requested chirp; carries ``required_n``."""

    def __init__(self, message: str, required_n: int):
        super().__init__(f"{message}; need at least n = {required_n}")
        self.required_n = required_n


class ValidationError(ValueError):
    """Input tomogram failed normalization/homogeneity prechecks."""


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _next_pow2(n: int) -> int:
    return 1 << max(1, int(math.ceil(math.log2(max(2, n)))))


# ---------------------------------------------------------------------------
# Wave-function grids


@dataclass(frozen=True)
class WavefunctionGrid:
    """Uniform 2D grid of complex amplitudes, optionally with the exact callable."""

    xs: np.ndarray
    ys: np.ndarray
    psi: np.ndarray
    exact: Callable | None = None

    def __post_init__(self):
        nx, ny = len(self.xs), len(self.ys)
        if not (_is_pow2(nx) and _is_pow2(ny)):
            raise ValueError("grid sizes must be powers of two")
        if self.psi.shape != (nx, ny):
            raise ValueError("psi shape must match (n_x, n_y)")
        peak = float(np.abs(self.psi).max())
        edge = max(np.abs(self.psi[0, :]).max(), np.abs(self.psi[-1, :]).max(),
                   np.abs(self.psi[:, 0]).max(), np.abs(self.psi[:, -1]).max())
        if peak == 0.0 or edge > BOUNDARY_DECAY * peak:
            raise ValueError(
                f"grid does not cover the state support (edge/peak = "
                f"{edge / max(peak, 1e-300):.2e})")

    @property
    def hx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def hy(self) -> float:
        return float(self.ys[1] - self.ys[0])

    @classmethod
    def from_callable(cls, f, x_max: float, n: int, y_max: float | None = None,
                      keep_exact: bool = True) -> "WavefunctionGrid":
        y_max = x_max if y_max is None else y_max
        n = n if _is_pow2(n) else _next_pow2(n)
        xs = np.linspace(-x_max, x_max, n)
        ys = np.linspace(-y_max, y_max, n)
        psi = np.asarray(f(xs[:, None], ys[None, :]), dtype=complex)
        return cls(xs=xs, ys=ys, psi=psi, exact=f if keep_exact else None)

    @classmethod
    def from_state(cls, label, ctx, n: int = 512,
                   x_max: float | None = None) -> "WavefunctionGrid":
        f = lambda x, y: states.wavefunction(label, ctx, x, y)
        if x_max is None:
            # probe |psi| on a polar mesh and trim the span to the smallest
            # radius whose tail stays below the boundary-decay invariant
            hi = states.support_radius(label, ctx, tail=1e-20)
            angles = np.linspace(0.0, 2.0 * math.pi, 24, endpoint=False)
            radii = np.linspace(0.0, hi, 400)
            mags = np.abs(f(radii[:, None] * np.cos(angles)[None, :],
                            radii[:, None] * np.sin(angles)[None, :]))
            prof = mags.max(axis=1)
            tail_max = np.maximum.accumulate(prof[::-1])[::-1]
            ok = np.nonzero(tail_max <= 1e-10 * prof.max())[0]
            x_max = float(radii[ok[0]]) if len(ok) else hi
        return cls.from_callable(f, x_max=x_max, n=n)

    def save(self, path: str) -> None:
        """Columnar dump: x  y  Re(psi)  Im(psi), row-major over the grid."""
        nx, ny = len(self.xs), len(self.ys)
        cols = np.column_stack([
            np.repeat(self.xs, ny), np.tile(self.ys, nx),
            self.psi.real.ravel(), self.psi.imag.ravel(),
        ])
        np.savetxt(path, cols, header="x y re_psi im_psi")

    @classmethod
    def load(cls, path: str) -> "WavefunctionGrid":
        data = np.loadtxt(path)
        xs = np.unique(data[:, 0])
        ys = np.unique(data[:, 1])
        psi = (data[:, 2] + 1j * data[:, 3]).reshape(len(xs), len(ys))
        return cls(xs=xs, ys=ys, psi=psi)


@dataclass(frozen=True)
class WavefunctionGrid1D:
    xs: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        if not _is_pow2(len(self.xs)):
            raise ValueError("grid size must be a power of two")
        peak = float(np.abs(self.psi).max())
        edge = max(abs(self.psi[0]), abs(self.psi[-1]))
        if peak == 0.0 or edge > BOUNDARY_DECAY * peak:
            raise ValueError("grid does not cover the state support")

    @property
    def h(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @classmethod
    def from_callable(cls, f, x_max: float, n: int) -> "WavefunctionGrid1D":
        xs = np.linspace(-x_max, x_max, n if _is_pow2(n) else _next_pow2(n))
        return cls(xs=xs, psi=np.asarray(f(xs), dtype=complex))


def _check_resolution(x_max: float, h: float, big_x: float, mu: float,
                      nu: float, n: int) -> None:
    if abs(nu) < 1e-3:
        raise ValueError("|nu| >= 1e-3 required for the grid transform")
    chirp_step = abs(mu) * x_max * h / abs(nu)
    carrier_step = abs(big_x) * h / abs(nu)
    worst = max(chirp_step / (math.pi / 4), carrier_step / (math.pi / 2))
    if worst > 1.0:
        raise ResolutionError(
            f"chirp/carrier under-resolved (mu={mu:g}, nu={nu:g}, X={big_x:g})",
            required_n=_next_pow2(int(n * worst) + 1))


def _axis_kernel(xs: np.ndarray, big_x: float, mu: float, nu: float) -> np.ndarray:
    return np.exp((0.5j * mu / nu) * xs * xs - (1j * big_x / nu) * xs)


def tomogram_from_wavefunction_1d(grid: WavefunctionGrid1D, big_x: float,
                                  mu: float, nu: float) -> float:
    """w(X, mu, nu) of a sampled 1D wave function."""
    _check_resolution(abs(grid.xs).max(), grid.h, big_x, mu, nu, len(grid.xs))
    amp = np.sum(grid.psi * _axis_kernel(grid.xs, big_x, mu, nu)) * grid.h
    return float(abs(amp) ** 2 / (2.0 * math.pi * abs(nu)))


def tomogram_from_wavefunction_2d(grid: WavefunctionGrid,
                                  pt: states.TomogramPoint) -> float:
    """w(X1, mu1, nu1, X2, mu2, nu2) of a sampled 2D wave function.

    The chirped double integral separates into two axis kernels, so a
    single point costs one matrix contraction of the grid.
    """
    _check_resolution(abs(grid.xs).max(), grid.hx, pt.x1, pt.mu1, pt.nu1,
                      len(grid.xs))
    _check_resolution(abs(grid.ys).max(), grid.hy, pt.x2, pt.mu2, pt.nu2,
                      len(grid.ys))
    v1 = _axis_kernel(grid.xs, pt.x1, pt.mu1, pt.nu1)
    v2 = _axis_kernel(grid.ys, pt.x2, pt.mu2, pt.nu2)
    amp = v1 @ grid.psi @ v2 * grid.hx * grid.hy
    return float(abs(amp) ** 2 / (4.0 * math.pi**2 * abs(pt.nu1 * pt.nu2)))


def tomogram_grid_2d(grid: WavefunctionGrid, mu1: float, nu1: float,
                     mu2: float, nu2: float, pad: int = 2):
    """Tomogram on a full X1 x X2 grid for one frame, via zero-padded FFTs.

    Returns (X1 nodes, X2 nodes, w) with the frequency axis mapped to
    X_j = nu_j k_j.  Grids are zero-padded ``pad`` times before the
    transform to suppress wrap-around of the Gaussian tails.
    """
    _check_resolution(abs(grid.xs).max(), grid.hx, 0.0, mu1, nu1, len(grid.xs))
    _check_resolution(abs(grid.ys).max(), grid.hy, 0.0, mu2, nu2, len(grid.ys))
    nx, ny = len(grid.xs), len(grid.ys)
    big_n = (pad * nx, pad * ny)
    chirped = grid.psi * np.exp((0.5j * mu1 / nu1) * grid.xs[:, None] ** 2
                                + (0.5j * mu2 / nu2) * grid.ys[None, :] ** 2)
    spec = np.fft.fft2(chirped, s=big_n)
    k1 = 2.0 * math.pi * np.fft.fftfreq(big_n[0], d=grid.hx)
    k2 = 2.0 * math.pi * np.fft.fftfreq(big_n[1], d=grid.hy)
    # FFT sums exp(-i k j h); restore the x0 offset phase of each axis
    phase1 = np.exp(-1j * k1 * grid.xs[0])
    phase2 = np.exp(-1j * k2 * grid.ys[0])
    amp = spec * phase1[:, None] * phase2[None, :] * grid.hx * grid.hy
    w = np.abs(amp) ** 2 / (4.0 * math.pi**2 * abs(nu1 * nu2))
    order1 = np.argsort(k1)
    order2 = np.argsort(k2)
    return nu1 * k1[order1], nu2 * k2[order2], w[np.ix_(order1, order2)]


# ---------------------------------------------------------------------------
# 1D oscillator states (unit frequency), used by the inverse-map checks


def oscillator_eigenfunction(n: int, x):
    """psi_n(x) of the unit harmonic oscillator (hbar = m = omega = 1)."""
    x = np.asarray(x, dtype=float)
    log_norm = -0.5 * (n * math.log(2.0) + log_factorial(n)) - 0.25 * math.log(math.pi)
    return math.exp(log_norm) * hermite_phys(n, x) * np.exp(-0.5 * x * x)


def oscillator_tomogram_1d(n: int, big_x, mu: float, nu: float):
    """Closed-form tomogram of the oscillator level n.

    X = mu q + nu p is again a unit-oscillator quadrature scaled by
    s = sqrt(mu^2 + nu^2), so w_n(X) = |psi_n(X/s)|^2 / s.
    """
    s = np.hypot(mu, nu)
    big_x = np.asarray(big_x, dtype=float)
    return np.abs(oscillator_eigenfunction(n, big_x / s)) ** 2 / s


def oscillator_amplitudes_1d(n_max: int, big_x, mu: float, nu: float):
    """Chirped-transform amplitudes a_n(X, mu, nu) of oscillator levels.

    a_n = int psi_n(y) exp(i mu y^2/(2 nu) - i X y/nu) dy, so the tomogram
    of any superposition sum c_n psi_n is |sum c_n a_n|^2 / (2 pi |nu|).
    Computed in closed form from the coherent generating function; needs
    nu != 0 (use the position-density limit at nu = 0).
    """
    if abs(nu) < 1e-12:
        raise ValueError("amplitudes need nu != 0")
    big_x = np.asarray(big_x, dtype=float)
    tau = nu / (nu - 1j * mu)        # from completing the chirped square
    c_half = -(nu - 1j * mu) / (2.0 * nu)
    pref = math.pi ** -0.25 * np.sqrt(math.pi / -c_half) \
        * np.exp(-0.5 * tau * (big_x / nu) ** 2)
    s_coef = 1.0 - 2.0 * tau
    u = -1j * math.sqrt(2.0) * tau * big_x / nu
    out = []
    h_prev = np.zeros_like(u)
    h = np.ones_like(u)
    for n in range(n_max + 1):
        out.append(pref * h * math.exp(-0.5 * log_factorial(n)))
        h, h_prev = u * h - s_coef * n * h_prev, h
    return out


def mixed_oscillator_tomogram(weights, coeff_rows) -> Callable:
    """w(X, mu, nu) of the mixture sum_k weights[k] |phi_k><phi_k| with
    phi_k = sum_n coeff_rows[k][n] psi_n; broadcasts, handles nu -> 0."""
    weights = [float(w) for w in weights]
    coeff_rows = [np.asarray(c, dtype=complex) for c in coeff_rows]
    n_max = max(len(c) for c in coeff_rows) - 1

    def _block(xrow, mu_scalar, nu):
        amps = oscillator_amplitudes_1d(n_max, xrow, mu_scalar, nu)
        out = np.zeros(np.shape(xrow))
        for lam, c in zip(weights, coeff_rows):
            tot = sum(c[n] * amps[n] for n in range(len(c)))
            out += lam * np.abs(tot) ** 2
        return out

    def w(big_x, mu, nu):
        big_x, mu_b = np.broadcast_arrays(np.asarray(big_x, dtype=float),
                                          np.asarray(mu, dtype=float))
        if abs(nu) < 1e-6:
            q = big_x / mu_b
            psis = [oscillator_eigenfunction(n, q) for n in range(n_max + 1)]
            total = sum(
                lam * np.abs(sum(c[n] * psis[n] for n in range(len(c)))) ** 2
                for lam, c in zip(weights, coeff_rows))
            return total / np.abs(mu_b)
        if mu_b.ndim == 0 or np.all(mu_b == mu_b.ravel()[0]):
            vals = _block(big_x, float(mu_b.ravel()[0]), float(nu))
        else:
            # per-row mu (inverse-map evaluation pattern)
            vals = np.stack([_block(big_x[i], float(mu_b[i].ravel()[0]),
                                    float(nu))
                             for i in range(big_x.shape[0])])
        return vals / (2.0 * math.pi * abs(nu))

    return w


# ---------------------------------------------------------------------------
# Inverse map (1D, desk scale)


@dataclass(frozen=True)
class DensityGrid:
    """rho(x, x') sampled on a uniform 1D grid."""

    xs: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        n = len(self.xs)
        if self.rho.shape != (n, n):
            raise ValueError("rho must be square on the grid")
        h = float(self.xs[1] - self.xs[0])
        herm = float(np.abs(self.rho - self.rho.conj().T).max())
        if herm > 1e-8:
            raise ValidationError(f"density not Hermitian (dev {herm:.2e})")
        tr = float(np.trace(self.rho).real * h)
        if abs(tr - 1.0) > 1e-6:
            raise ValidationError(f"trace {tr} != 1")
        if float(self.rho.diagonal().real.min()) < -1e-8:
            raise ValidationError("negative diagonal")

    @property
    def h(self) -> float:
        return float(self.xs[1] - self.xs[0])


def density_from_tomogram_1d(w: Callable, xs: np.ndarray,
                             mu_max: float = 14.0, n_mu: int = 384,
                             n_x_quad: int = 768) -> DensityGrid:
    """Reconstruct rho(x, x') from a 1D tomogram callable w(X, mu, nu).

    ``w`` must broadcast over its arguments.  The tomogram is validated
    (normalization at sample frames) before inversion.  nu is fixed by the
    grid geometry: nu = x - x' takes the 2n - 1 values k h.
    """
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    h = float(xs[1] - xs[0])
    # precheck: normalization at a few frames
    for mu, nu in ((1.0, 0.5), (0.3, -1.1), (0.0, 1.0)):
        s = math.hypot(mu, nu)
        xq = np.linspace(-10 * s, 10 * s, 2001)
        total = float(np.trapezoid(w(xq, mu, nu), xq))
        if abs(total - 1.0) > 1e-4:
            raise ValidationError(
                f"tomogram not normalized at (mu, nu) = ({mu}, {nu}): {total}")
    mus = np.linspace(-mu_max, mu_max, n_mu)
    rho = np.zeros((n, n), dtype=complex)
    for k in range(-(n - 1), n):
        nu = k * h
        nu_eff = nu if abs(nu) > 1e-12 else 1e-12
        # characteristic function chi(mu, nu) = E[exp(i X)] under w
        scale = np.hypot(mus, nu_eff)
        xq = np.linspace(-10, 10, n_x_quad)[None, :] * scale[:, None]
        vals = w(xq, mus[:, None], nu_eff)
        chi = np.trapezoid(vals * np.exp(1j * xq), xq, axis=1)
        idx_i = np.arange(max(0, k), min(n, n + k))
        idx_j = idx_i - k
        mids = 0.5 * (xs[idx_i] + xs[idx_j])
        kernel = np.exp(-1j * np.outer(mids, mus))
        vals_d = kernel @ chi * (mus[1] - mus[0]) / (2.0 * math.pi)
        rho[idx_i, idx_j] = vals_d
    # enforce exact Hermiticity of the numerical reconstruction
    rho = 0.5 * (rho + rho.conj().T)
    return DensityGrid(xs=xs, rho=rho)


def tomogram_from_density_1d(density: DensityGrid, big_x, mu: float,
                             nu: float):
    """Forward map of a gridded (possibly mixed) 1D density matrix.

    ``big_x`` may be an array.  Grouping the double sum over the grid by
    the difference d = x - x' turns it into a short Fourier series in X,
    so evaluating a whole X batch costs one (2n-1)-column contraction.
    """
    big_x = np.asarray(big_x, dtype=float)
    scalar_in = big_x.ndim == 0 and np.ndim(mu) == 0
    if abs(nu) >= 1e-6:
        _check_resolution(float(abs(density.xs).max()), density.h,
                          float(np.abs(big_x).max()), float(np.max(np.abs(mu))),
                          nu, len(density.xs))
    rows = np.atleast_2d(big_x)
    mu_col = np.broadcast_to(np.asarray(mu, dtype=float).reshape(-1, 1)
                             if np.ndim(mu) else np.full((1, 1), float(mu)),
                             (rows.shape[0], 1))
    xs = density.xs
    n = len(xs)
    if abs(nu) < 1e-6:
        # exact nu -> 0 limit: X = mu q, so w = rho(X/mu, X/mu) / |mu|
        from scipy.interpolate import CubicSpline
        diag = CubicSpline(xs, density.rho.diagonal().real, extrapolate=False)
        vals = np.stack([
            np.nan_to_num(diag(rows[i] / mu_col[i, 0])) / abs(mu_col[i, 0])
            for i in range(rows.shape[0])])
    else:
        chirp = np.exp((0.5j * mu_col / nu) * xs * xs)  # (rows, n)
        # per-row sums over the m-th grid diagonal of rho dressed by chirps
        sums = np.empty((rows.shape[0], 2 * n - 1), dtype=complex)
        for m in range(n):
            dpos = density.rho.diagonal(-m)  # rho[j+m, j]
            sums[:, n - 1 + m] = np.einsum("rj,j,rj->r", chirp[:, m:], dpos,
                                           np.conj(chirp[:, :n - m]))
            if m:
                sums[:, n - 1 - m] = np.conj(sums[:, n - 1 + m])
        z = np.exp(-1j * rows * density.h / nu)
        pos = np.zeros_like(z)
        neg = np.zeros_like(z)
        for m in range(n - 1, 0, -1):  # Horner in z and conj(z)
            pos = (pos + sums[:, n - 1 + m, None]) * z
            neg = (neg + sums[:, n - 1 - m, None]) * np.conj(z)
        vals = (pos + neg + sums[:, n - 1, None]).real * density.h**2 \
            / (2.0 * math.pi * abs(nu))
    if scalar_in:
        return float(vals[0, 0] if vals.ndim == 2 else vals[0])
    return vals.reshape(big_x.shape)
