"""Wave functions and closed-form symplectic tomograms of Landau states.

Every state handled here is Gaussian times polynomial.  In complex
coordinates zeta = x + i y a coherent state |alpha, beta> reads

    psi = N exp[ c (x^2+y^2) - (|a|^2+|b|^2)/2
                 + sigma (bt zeta + i at zeta*) - i at bt ]

with, for a constant field omega:   c = -omega/2,  sigma = sqrt(omega),
N = sqrt(omega/pi), and (at, bt) = (alpha, beta); for a field that varied
in time (envelope eps):             c = i eps'/eps,
sigma = sqrt(omega0)/|eps|, N = sqrt(omega0/pi)/eps, and the parameters
rotate, at = alpha exp(-i phi_a), bt = beta exp(-i phi_b), with phases
built from the envelope's gamma integrals.  Fock states are the Taylor
coefficients of the exp(+(|a|^2+|b|^2)/2)-rescaled coherent state in
(alpha, beta), which lands on two-variable Hermite polynomials.

The tomogram of any such state along X_j = mu_j q_j + nu_j p_j is a
Gaussian times |H|^2 whose per-axis pieces stay finite for every frame
with (mu_j, nu_j) != (0, 0); the only genuinely singular denominator is
D_j = 2 c nu_j + i mu_j, and Re(c) < 0 keeps |D_j| > 0 away from the
excluded origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envelope import EnvelopeState
from .special import (CapacityError, HERMITE_CAP, hermite_2var_linear,
                      log_factorial)

COHERENT_RANGE = 10.0


class SingularFrameError(ValueError):
    """Frame denominator below 1e-300; use the (mu, nu) -> (0, 0) limit."""


# ---------------------------------------------------------------------------
# Labels, contexts, points


@dataclass(frozen=True)
class Coherent:
    alpha: complex
    beta: complex

    def __post_init__(self):
        if abs(self.alpha) > COHERENT_RANGE or abs(self.beta) > COHERENT_RANGE:
            raise ValueError(
                f"|alpha|, |beta| must be <= {COHERENT_RANGE} (numerical range)")


@dataclass(frozen=True)
class Fock:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("Fock indices must be non-negative")
        if self.n1 > HERMITE_CAP or self.n2 > HERMITE_CAP:
            raise CapacityError(
                f"Fock indices ({self.n1}, {self.n2}) exceed cap {HERMITE_CAP}")


StateLabel = Coherent | Fock


@dataclass(frozen=True)
class ConstantField:
    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def gauss_c(self) -> complex:
        return complex(-0.5 * self.omega)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.omega)

    @property
    def norm(self) -> complex:
        return complex(math.sqrt(self.omega / math.pi))

    phi_alpha = 0.0
    phi_beta = 0.0


@dataclass(frozen=True)
class VaryingField:
    env: EnvelopeState

    def __post_init__(self):
        omega0 = self.env.omega0  # validates the Wronskian sign
        if not omega0 > 0:
            raise ValueError("envelope does not define a positive omega0")

    @property
    def omega0(self) -> float:
        return self.env.omega0

    @property
    def gauss_c(self) -> complex:
        return 1j * self.env.eps_dot / self.env.eps

    @property
    def sigma(self) -> float:
        return math.sqrt(self.omega0) / abs(self.env.eps)

    @property
    def norm(self) -> complex:
        return math.sqrt(self.omega0 / math.pi) / self.env.eps

    @property
    def _theta_gamma(self) -> tuple[float, float]:
        # theta = arg eps tracked continuously, big_gamma = (1/2) int omega
        theta = 0.25 * self.omega0 * (self.env.gamma_plus + self.env.gamma_minus)
        big_gamma = 0.25 * (self.env.gamma_plus - self.env.gamma_minus)
        return theta, big_gamma

    @property
    def phi_alpha(self) -> float:
        theta, big_gamma = self._theta_gamma
        return theta + big_gamma

    @property
    def phi_beta(self) -> float:
        theta, big_gamma = self._theta_gamma
        return theta - big_gamma


FieldContext = ConstantField | VaryingField


@dataclass(frozen=True)
class TomogramPoint:
    """Symplectic-tomography coordinates (X_j, mu_j, nu_j) for j = 1, 2."""

    x1: float
    mu1: float
    nu1: float
    x2: float
    mu2: float
    nu2: float

    def __post_init__(self):
        for mu, nu in ((self.mu1, self.nu1), (self.mu2, self.nu2)):
            if mu == 0.0 and nu == 0.0:
                raise ValueError("(mu_j, nu_j) must not be (0, 0)")


def _rotated_params(label: Coherent, ctx: FieldContext) -> tuple[complex, complex]:
    at = label.alpha * np.exp(-1j * ctx.phi_alpha)
    bt = label.beta * np.exp(-1j * ctx.phi_beta)
    return at, bt


# ---------------------------------------------------------------------------
# Wave functions


def coherent_wavefunction(label: Coherent, ctx: FieldContext, x, y):
    """<x, y | alpha, beta> for the given field context (vectorized in x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    at, bt = _rotated_params(label, ctx)
    zeta = x + 1j * y
    expo = (ctx.gauss_c * (x * x + y * y)
            - 0.5 * (abs(label.alpha) ** 2 + abs(label.beta) ** 2)
            + ctx.sigma * (bt * zeta + 1j * at * np.conj(zeta))
            - 1j * at * bt)
    out = ctx.norm * np.exp(expo)
    return complex(out) if out.ndim == 0 else out


def coherent_generating_wavefunction(alpha: complex, beta: complex,
                                     ctx: FieldContext, x, y):
    """exp(+(|a|^2+|b|^2)/2) <x,y|alpha,beta>: holomorphic in (alpha, beta).

    This is the generating function whose Taylor coefficients at the
    origin are sqrt(n1! n2!) times the Fock wave functions; it accepts
    arbitrary complex (alpha, beta) without the coherent range guard.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    at = alpha * np.exp(-1j * ctx.phi_alpha)
    bt = beta * np.exp(-1j * ctx.phi_beta)
    zeta = x + 1j * y
    expo = (ctx.gauss_c * (x * x + y * y)
            + ctx.sigma * (bt * zeta + 1j * at * np.conj(zeta))
            - 1j * at * bt)
    out = ctx.norm * np.exp(expo)
    return complex(out) if out.ndim == 0 else out


_M0 = np.array([[0.0, 1j], [1j, 0.0]])


def fock_wavefunction(label: Fock, ctx: FieldContext, x, y):
    """psi_{n1 n2}(x, y): Taylor coefficient of the coherent family.

    Extracting d^n1/d alpha d^n2/d beta of the generating wave function
    gives a phase exp(-i (n1 phi_a + n2 phi_b)) times the two-variable
    Hermite polynomial with S = [[0, i], [i, 0]] and linear term
    u = (i sigma zeta*, sigma zeta).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    zeta = x + 1j * y
    u = (1j * ctx.sigma * np.conj(zeta), ctx.sigma * zeta)
    poly = hermite_2var_linear(_M0, u, label.n1, label.n2)
    phase = np.exp(-1j * (label.n1 * ctx.phi_alpha + label.n2 * ctx.phi_beta))
    scale = math.exp(-0.5 * (log_factorial(label.n1) + log_factorial(label.n2)))
    out = (ctx.norm * scale * phase
           * np.exp(ctx.gauss_c * (x * x + y * y)) * poly)
    return complex(out) if out.ndim == 0 else out


def wavefunction(label: StateLabel, ctx: FieldContext, x, y):
    if isinstance(label, Coherent):
        return coherent_wavefunction(label, ctx, x, y)
    return fock_wavefunction(label, ctx, x, y)


def coherent_fock_coefficient(alpha: complex, beta: complex,
                              n1: int, n2: int) -> complex:
    """<n1, n2 | alpha, beta> = e^{-(|a|^2+|b|^2)/2} a^n1 b^n2 / sqrt(n1! n2!)."""
    log_mag = -0.5 * (log_factorial(n1) + log_factorial(n2))
    return (math.exp(log_mag - 0.5 * (abs(alpha) ** 2 + abs(beta) ** 2))
            * alpha**n1 * beta**n2)


def support_radius(label: StateLabel, ctx: FieldContext,
                   tail: float = 1e-9) -> float:
    """Radius beyond which |psi| is below sqrt(tail) of its peak scale."""
    decay = -2.0 * ctx.gauss_c.real  # |psi|^2 ~ exp(-decay r^2)
    if isinstance(label, Coherent):
        shift = 2.0 * ctx.sigma * (abs(label.alpha) + abs(label.beta)) / decay
        bump = 0.0
    else:
        shift = 0.0
        bump = math.sqrt((2.0 * (label.n1 + label.n2) + 1.0) / decay)
    return shift + 2.0 * bump + math.sqrt(math.log(1.0 / tail) / decay) + 1.0


# ---------------------------------------------------------------------------
# Closed-form tomograms


def frame_denominators(c: complex, pt: TomogramPoint) -> tuple[complex, complex]:
    d1 = 2.0 * c * pt.nu1 + 1j * pt.mu1
    d2 = 2.0 * c * pt.nu2 + 1j * pt.mu2
    if abs(d1) < 1e-300 or abs(d2) < 1e-300:
        raise SingularFrameError(
            "frame denominator underflow; evaluate the (mu, nu) -> 0 limit")
    return d1, d2


def _axis_exponent(c: complex, p: complex, x, nu: float, d: complex):
    """2 Re of the completed-square exponent along one axis.

    Grouped as [-nu Re(p^2 d*) - 2 X Im(p d*) + 2 Re(c) X^2] / |d|^2,
    which stays finite down to nu = 0 (position-density limit).
    """
    dc = np.conj(d)
    mod2 = (d * dc).real
    return (-nu * (p * p * dc).real - 2.0 * x * (p * dc).imag
            + 2.0 * c.real * x * x) / mod2


def _coherent_linear_coeffs(label: Coherent, ctx: FieldContext):
    at, bt = _rotated_params(label, ctx)
    p1 = ctx.sigma * (bt + 1j * at)   # multiplies x
    p2 = ctx.sigma * (at + 1j * bt)   # multiplies y
    log_norm = (-abs(label.alpha) ** 2 - abs(label.beta) ** 2
                + 2.0 * (at * bt).imag)
    return p1, p2, log_norm


def tomogram_coherent(label: Coherent, ctx: FieldContext, pt: TomogramPoint,
                      x1=None, x2=None):
    """w_{alpha beta}(X1, mu1, nu1, X2, mu2, nu2); nonnegative, normalized.

    ``x1``/``x2`` may override pt.x1/pt.x2 with arrays to evaluate a whole
    X-grid in one call for a fixed frame.
    """
    x1 = pt.x1 if x1 is None else np.asarray(x1, dtype=float)
    x2 = pt.x2 if x2 is None else np.asarray(x2, dtype=float)
    c = ctx.gauss_c
    d1, d2 = frame_denominators(c, pt)
    p1, p2, log_norm = _coherent_linear_coeffs(label, ctx)
    expo = (_axis_exponent(c, p1, x1, pt.nu1, d1)
            + _axis_exponent(c, p2, x2, pt.nu2, d2) + log_norm)
    pref = ctx.sigma**2 / (math.pi * abs(d1) * abs(d2))
    out = pref * np.exp(expo)
    return float(out) if np.ndim(out) == 0 else out


def hermite_frame(c: complex, sigma: float, pt: TomogramPoint):
    """S matrix and linear map for the Fock tomogram Hermite polynomial.

    Returns (S, L) with u = L @ (X1, X2); derived from the holomorphic
    expansion of the coherent tomogram amplitude in (alpha, beta).
    """
    d1, d2 = frame_denominators(c, pt)
    t1 = -pt.nu1 / d1
    t2 = -pt.nu2 / d2
    s11 = sigma**2 * (t1 - t2)
    s12 = -1j * (sigma**2 * (t1 + t2) - 1.0)
    s = np.array([[s11, s12], [s12, -s11]])
    ell = sigma * np.array([[-1.0 / d1, 1j / d2], [1j / d1, -1.0 / d2]])
    return s, ell


def tomogram_fock(label: Fock, ctx: FieldContext, pt: TomogramPoint,
                  x1=None, x2=None):
    """w_{n1 n2}(pt) = w_00(pt) |H^{S}_{n1 n2}(u)|^2 / (n1! n2!)."""
    x1 = pt.x1 if x1 is None else np.asarray(x1, dtype=float)
    x2 = pt.x2 if x2 is None else np.asarray(x2, dtype=float)
    c = ctx.gauss_c
    d1, d2 = frame_denominators(c, pt)
    base_expo = (_axis_exponent(c, 0.0j, x1, pt.nu1, d1)
                 + _axis_exponent(c, 0.0j, x2, pt.nu2, d2))
    pref = ctx.sigma**2 / (math.pi * abs(d1) * abs(d2))
    s, ell = hermite_frame(c, ctx.sigma, pt)
    u = (ell[0, 0] * x1 + ell[0, 1] * x2, ell[1, 0] * x1 + ell[1, 1] * x2)
    h = hermite_2var_linear(s, u, label.n1, label.n2)
    log_nfac = log_factorial(label.n1) + log_factorial(label.n2)
    mag2 = (h * np.conj(h)).real
    out = np.where(mag2 > 0.0,
                   pref * np.exp(base_expo + np.log(np.maximum(mag2, 1e-300))
                                 - log_nfac),
                   0.0)
    return float(out) if np.ndim(out) == 0 else out


def tomogram(label: StateLabel, ctx: FieldContext, pt: TomogramPoint,
             x1=None, x2=None):
    if isinstance(label, Coherent):
        return tomogram_coherent(label, ctx, pt, x1=x1, x2=x2)
    return tomogram_fock(label, ctx, pt, x1=x1, x2=x2)


def tomogram_window(label: StateLabel, ctx: FieldContext,
                    pt: TomogramPoint) -> tuple[float, float, float, float]:
    """(center1, center2, scale1, scale2) of the tomogram's X support.

    The Gaussian factor is exp(2 Re(c) (X - X*)^2 / |D|^2 + const), so the
    per-axis scale is |D| / sqrt(-4 Re c); Fock/coherent factors widen it.
    """
    c = ctx.gauss_c
    d1, d2 = frame_denominators(c, pt)
    base1 = math.sqrt(abs(d1) ** 2 / (-4.0 * c.real))
    base2 = math.sqrt(abs(d2) ** 2 / (-4.0 * c.real))
    if isinstance(label, Fock):
        grow = math.sqrt(2.0 * (label.n1 + label.n2) + 1.0)
        c1 = c2 = 0.0
    else:
        grow = 1.0 + 0.5 * (abs(label.alpha) + abs(label.beta))
        p1, p2, _ = _coherent_linear_coeffs(label, ctx)
        c1 = float((p1 * np.conj(d1)).imag / (2.0 * c.real))
        c2 = float((p2 * np.conj(d2)).imag / (2.0 * c.real))
    return c1, c2, base1 * grow, base2 * grow
