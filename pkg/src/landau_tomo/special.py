"""Special functions for the closed-form tomograms and transition laws.

Two-variable Hermite polynomials defined by the generating function

    exp(-1/2 a S a^T + a S k) = sum_{n1,n2} H^{S}_{n1 n2}(k) a1^n1 a2^n2 / (n1! n2!)

with S a symmetric complex 2x2 matrix, plus Jacobi polynomials J_n^(s,m)
valid for negative integer superscripts, and stable log-factorials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

HERMITE_CAP = 20


class CapacityError(ValueError):
    """Raised when a Fock or polynomial index exceeds the configured cap."""


@dataclass(frozen=True)
class HermiteMVSpec:
    """Arguments of H^{S}_{n1 n2}(k): symmetric 2x2 S, 2-vector k, indices."""

    s: np.ndarray
    k: np.ndarray
    n1: int
    n2: int
    cap: int = HERMITE_CAP
    _su: tuple = field(init=False, repr=False)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        k = np.asarray(self.k, dtype=complex)
        if s.shape != (2, 2) or k.shape != (2,):
            raise ValueError("S must be 2x2 and k a 2-vector")
        asym = abs(s[0, 1] - s[1, 0])
        if asym > 1e-12 * max(1.0, float(np.max(np.abs(s)))):
            raise ValueError(f"S is not symmetric (|S01 - S10| = {asym:.3e})")
        s = 0.5 * (s + s.T)
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("indices must be non-negative")
        if self.n1 > self.cap or self.n2 > self.cap:
            raise CapacityError(
                f"indices ({self.n1}, {self.n2}) exceed cap {self.cap}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "_su", (s, s @ k))


def hermite_2var_linear(s: np.ndarray, u, n1: int, n2: int):
    """H_{n1 n2} for the generating function exp(-1/2 a S a^T + a . u).

    This is the same family as :func:`hermite_mv` parametrized by the plain
    linear term u = S k, which avoids inverting S when the caller already
    has u.  ``u`` components may be scalars or broadcastable arrays; the
    two-index recurrence

        H_{n1+1,n2} = u1 H_{n1,n2} - S11 n1 H_{n1-1,n2} - S12 n2 H_{n1,n2-1}
        H_{n1,n2+1} = u2 H_{n1,n2} - S12 n1 H_{n1-1,n2} - S22 n2 H_{n1,n2-1}

    follows from differentiating the generating function once.
    """
    table = hermite_2var_table(s, u, n1, n2)
    return table[n1][n2]


def hermite_2var_table(s: np.ndarray, u, n1_max: int, n2_max: int) -> list:
    """Full table H_{ij} for i <= n1_max, j <= n2_max (see hermite_2var_linear)."""
    s = np.asarray(s, dtype=complex)
    u1, u2 = u[0], u[1]
    one = np.ones_like(u1 * 1.0j) if isinstance(u1, np.ndarray) else 1.0 + 0.0j
    table = [[None] * (n2_max + 1) for _ in range(n1_max + 1)]
    table[0][0] = one
    for i in range(n1_max):
        prev = table[i - 1][0] if i > 0 else 0.0
        table[i + 1][0] = u1 * table[i][0] - s[0, 0] * i * prev
    for j in range(n2_max):
        for i in range(n1_max + 1):
            low1 = table[i - 1][j] if i > 0 else 0.0
            low2 = table[i][j - 1] if j > 0 else 0.0
            table[i][j + 1] = (u2 * table[i][j]
                               - s[0, 1] * i * low1
                               - s[1, 1] * j * low2)
    return table


def hermite_mv(spec: HermiteMVSpec) -> complex:
    """Evaluate the two-variable Hermite polynomial H^{S}_{n1 n2}(k)."""
    s, u = spec._su
    return complex(hermite_2var_linear(s, u, spec.n1, spec.n2))


def _binom_general(z: int, k: int) -> float:
    """Generalized binomial C(z, k) for integer z (possibly negative), k >= 0."""
    if k < 0:
        return 0.0
    out = 1.0
    for i in range(1, k + 1):
        out *= (z - k + i) / i
    return out


def jacobi_poly(n: int, s: int, m: int, x: float) -> float:
    """Jacobi polynomial J_n^(s,m)(x) in the normalization J_n^(s,m)(1) = C(n+s, n).

    Evaluated by the explicit finite sum

        J_n^(s,m)(x) = sum_k C(n+s, n-k) C(n+m, k) ((x-1)/2)^k ((x+1)/2)^(n-k)

    with generalized binomials, which stays valid for the negative integer
    superscripts that appear in the transition law; terms are combined with
    compensated summation.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    xm = 0.5 * (x - 1.0)
    xp = 0.5 * (x + 1.0)
    terms = []
    for k in range(n + 1):
        c = _binom_general(n + s, n - k) * _binom_general(n + m, k)
        if c != 0.0:
            terms.append(c * xm**k * xp ** (n - k))
    return math.fsum(terms)


def log_factorial(n: int) -> float:
    """ln(n!) via lgamma; exact to better than 1e-13 relative."""
    if n < 0:
        raise ValueError("factorial argument must be non-negative")
    return math.lgamma(n + 1)


def hermite_phys(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev
    h = 2.0 * x
    for k in range(1, n):
        h, h_prev = 2.0 * x * h - 2.0 * k * h_prev, h
    return h
