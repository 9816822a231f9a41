"""Magnetic-field profiles and the classical envelope equation.

A profile specifies the cyclotron frequency omega(t) > 0 (dimensionless,
hbar = m = e = c = 1).  The complex envelope eps(t) solves

    eps'' + (omega(t)/2)^2 eps = 0,   eps(t0) = 1,  eps'(t0) = i omega(t0)/2,

so a constant field gives eps = exp(i omega t / 2) with |eps| = 1 and the
Wronskian W = eps eps'* - eps* eps' stays pinned at -i omega(t0).  Alongside
eps the solver accumulates the phase integrals

    gamma_pm(t) = int_t0^t [ |eps|^-2  +/-  omega ] dtau,

which parametrize the time-dependent coherent states.  Once the profile is
flat again, eps decomposes into exp(+/- i Omega_f t) components whose
amplitude ratio is the reflection coefficient R of the effective 1D
potential; R drives all Landau-level transition probabilities.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

FLATNESS_RTOL = 1e-9


class ProfileError(ValueError):
    """Invalid field-profile specification or out-of-domain evaluation."""


class IntegrationFailure(RuntimeError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t = {t:g}")
        self.t = t


class DegenerateAsymptoticsError(RuntimeError):
    """|c_plus| too small to define R < 1."""


# ---------------------------------------------------------------------------
# Profiles


@dataclass(frozen=True)
class ConstantProfile:
    omega0: float
    kind = "constant"

    def __post_init__(self):
        if self.omega0 <= 0:
            raise ProfileError("omega0 must be positive")

    def omega(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.omega0)

    def breakpoints(self):
        return []

    @property
    def t_start(self):
        return 0.0

    @property
    def t_end(self):
        return 0.0

    @property
    def omega_start(self):
        return self.omega0

    @property
    def omega_final(self):
        return self.omega0

    def as_config(self):
        return {"kind": "constant", "omega0": self.omega0}


@dataclass(frozen=True)
class StepProfile:
    omega0: float
    omega1: float
    t_jump: float = 0.0
    kind = "step"

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega1 <= 0:
            raise ProfileError("step frequencies must be positive")

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t < self.t_jump, self.omega0, self.omega1)

    def breakpoints(self):
        return [self.t_jump]

    @property
    def t_start(self):
        return self.t_jump

    @property
    def t_end(self):
        return self.t_jump

    @property
    def omega_start(self):
        # left limit: the field before the jump
        return self.omega0

    @property
    def omega_final(self):
        return self.omega1

    def as_config(self):
        return {"kind": "step", "omega0": self.omega0, "omega1": self.omega1,
                "t_jump": self.t_jump}


@dataclass(frozen=True)
class SmoothRampProfile:
    omega0: float
    omega1: float
    t_center: float = 0.0
    width: float = 1.0
    kind = "smooth-ramp"

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega1 <= 0:
            raise ProfileError("ramp frequencies must be positive")
        if self.width <= 0:
            raise ProfileError("ramp width must be positive")

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        x = (t - self.t_center) / self.width
        return self.omega0 + (self.omega1 - self.omega0) * 0.5 * (1.0 + np.tanh(x))

    def breakpoints(self):
        return []

    def _flat_offset(self, omega_ref: float) -> float:
        # (1 + tanh x)/2 deviates from its asymptote by ~exp(-2|x|)
        delta = abs(self.omega1 - self.omega0)
        if delta == 0.0:
            return 0.0
        return 0.5 * math.log(delta / (FLATNESS_RTOL * omega_ref)) + 1.0

    @property
    def t_start(self):
        return self.t_center - self.width * self._flat_offset(self.omega0)

    @property
    def t_end(self):
        return self.t_center + self.width * self._flat_offset(self.omega1)

    @property
    def omega_start(self):
        return float(self.omega(self.t_start))

    @property
    def omega_final(self):
        return self.omega1

    def as_config(self):
        return {"kind": "smooth-ramp", "omega0": self.omega0,
                "omega1": self.omega1, "t_center": self.t_center,
                "width": self.width}


class TabulatedProfile:
    """Sampled omega(t), interpolated linearly (order 1) or by cubic spline."""

    kind = "tabulated"

    def __init__(self, samples: Sequence[Sequence[float]], order: int = 3):
        samples = [(float(t), float(w)) for t, w in samples]
        ts = np.array([s[0] for s in samples])
        ws = np.array([s[1] for s in samples])
        if len(ts) < 2 or np.any(np.diff(ts) <= 0):
            raise ProfileError("tabulated samples must be strictly increasing in t")
        if np.any(ws <= 0):
            raise ProfileError("tabulated omega values must be positive")
        if order not in (1, 3):
            raise ProfileError("interpolation order must be 1 or 3")
        self.samples = samples
        self.order = order
        self._ts, self._ws = ts, ws
        self._spline = CubicSpline(ts, ws) if order == 3 else None

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self._ts[0] - 1e-12) or np.any(t > self._ts[-1] + 1e-12):
            raise ProfileError(
                f"t outside tabulated domain [{self._ts[0]:g}, {self._ts[-1]:g}]")
        if self._spline is not None:
            return self._spline(t)
        return np.interp(t, self._ts, self._ws)

    def breakpoints(self):
        return []

    @property
    def t_start(self):
        return float(self._ts[0])

    @property
    def t_end(self):
        return float(self._ts[-1])

    @property
    def omega_start(self):
        return float(self._ws[0])

    @property
    def omega_final(self):
        return float(self._ws[-1])

    def as_config(self):
        return {"kind": "tabulated", "order": self.order,
                "samples": [[t, w] for t, w in self.samples]}

    def __eq__(self, other):
        return (isinstance(other, TabulatedProfile)
                and self.as_config() == other.as_config())


FieldProfile = ConstantProfile | StepProfile | SmoothRampProfile | TabulatedProfile

_PROFILE_KINDS = {
    "constant": (ConstantProfile, ("omega0",)),
    "step": (StepProfile, ("omega0", "omega1", "t_jump")),
    "smooth-ramp": (SmoothRampProfile, ("omega0", "omega1", "t_center", "width")),
    "tabulated": (TabulatedProfile, ("samples", "order")),
}


def profile_from_config(config: dict) -> FieldProfile:
    """Build a profile from a JSON-style config document."""
    if not isinstance(config, dict) or "kind" not in config:
        raise ProfileError("profile config must be an object with a 'kind' field")
    kind = config["kind"]
    if kind not in _PROFILE_KINDS:
        raise ProfileError(f"unknown profile kind '{kind}'")
    cls, fields = _PROFILE_KINDS[kind]
    kwargs = {}
    for name in fields:
        if name in config:
            kwargs[name] = config[name]
    extra = set(config) - set(fields) - {"kind"}
    if extra:
        raise ProfileError(f"unexpected profile field(s): {sorted(extra)}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ProfileError(f"bad profile config for kind '{kind}': {exc}") from exc


def profile_hash(profile: FieldProfile) -> str:
    payload = json.dumps(profile.as_config(), sort_keys=True,
                         separators=(",", ":"))
    return "sha256:" + hashlib.sha256(payload.encode()).hexdigest()[:16]


def omega_at(profile: FieldProfile, t) -> float | np.ndarray:
    """Evaluate omega(t); exact for analytic kinds, interpolated for tabulated."""
    out = profile.omega(t)
    return float(out) if np.isscalar(t) else out


# ---------------------------------------------------------------------------
# Envelope integration


@dataclass(frozen=True)
class EnvelopeState:
    """Envelope data at one instant: eps, eps', and the phase integrals."""

    t: float
    eps: complex
    eps_dot: complex
    gamma_plus: float
    gamma_minus: float

    def __post_init__(self):
        if abs(self.eps) == 0.0:
            raise ValueError("|eps| must be positive")

    @property
    def wronskian(self) -> complex:
        return self.eps * np.conj(self.eps_dot) - np.conj(self.eps) * self.eps_dot

    @property
    def omega0(self) -> float:
        """Initial frequency recovered from the conserved Wronskian -i omega0."""
        w0 = 2.0 * (np.conj(self.eps) * self.eps_dot).imag
        if w0 <= 0:
            raise ValueError("envelope Wronskian does not correspond to omega0 > 0")
        return float(w0)


class EnvelopeTrajectory:
    """Dense-output envelope solution over [t_start, t_end]."""

    def __init__(self, profile, segments, t_start, t_end, tol):
        self.profile = profile
        self._segments = segments  # list of (t_lo, t_hi, OdeSolution)
        self.t_start = t_start
        self.t_end = t_end
        self.tol = tol

    def _raw(self, t: float) -> np.ndarray:
        for t_lo, t_hi, sol in self._segments:
            if t <= t_hi or (t_lo, t_hi, sol) is self._segments[-1]:
                return sol(min(max(t, t_lo), t_hi))
        raise ValueError("time outside trajectory range")

    def state_at(self, t: float) -> EnvelopeState:
        if t < self.t_start - 1e-12 or t > self.t_end + 1e-12:
            raise ValueError(
                f"t = {t:g} outside solved range [{self.t_start:g}, {self.t_end:g}]")
        y = self._raw(float(t))
        eps = complex(y[0], y[1])
        eps_dot = complex(y[2], y[3])
        phi, gam = y[4], y[5]
        return EnvelopeState(t=float(t), eps=eps, eps_dot=eps_dot,
                             gamma_plus=phi + gam, gamma_minus=phi - gam)

    def sample(self, ts) -> list[EnvelopeState]:
        return [self.state_at(t) for t in np.asarray(ts, dtype=float)]

    def wronskian_drift(self, n: int = 64) -> float:
        ts = np.linspace(self.t_start, self.t_end, n)
        w0 = self.state_at(self.t_start).wronskian
        return max(abs(self.state_at(t).wronskian - w0) for t in ts)


def solve_envelope(profile: FieldProfile, t_end: float, tol: float = 1e-10,
                   t_start: float | None = None) -> EnvelopeTrajectory:
    """Integrate the envelope equation from the profile's flat start to t_end.

    The ODE runs on the real 6-vector (Re eps, Im eps, Re eps', Im eps',
    int |eps|^-2, int omega) with an adaptive embedded Runge-Kutta 4(5)
    pair and dense output; step discontinuities split the integration at
    the jump so the error control never straddles one.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t_start is None:
        t_start = profile.t_start
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")
    omega = profile.omega

    def rhs(t, y):
        w = float(omega(t))
        quarter = 0.25 * w * w
        mod2 = y[0] * y[0] + y[1] * y[1]
        return [y[2], y[3], -quarter * y[0], -quarter * y[1], 1.0 / mod2, w]

    # at a step's own start the initial field is the left limit
    if abs(t_start - profile.t_start) < 1e-12:
        w0 = float(profile.omega_start)
    else:
        w0 = float(omega(t_start))
    y0 = [1.0, 0.0, 0.0, 0.5 * w0, 0.0, 0.0]
    cuts = sorted(b for b in profile.breakpoints() if t_start < b < t_end)
    edges = [t_start, *cuts, t_end]
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        # evaluate omega just inside the segment so step jumps stay one-sided
        mid_shift = 1e-12 * max(1.0, abs(hi - lo))

        def seg_rhs(t, y, _lo=lo, _hi=hi):
            tt = min(max(t, _lo + mid_shift), _hi - mid_shift)
            return rhs(tt, y)

        sol = solve_ivp(seg_rhs, (lo, hi), y0, method="RK45", rtol=tol,
                        atol=tol * 1e-2, dense_output=True, max_step=np.inf)
        if not sol.success:
            raise IntegrationFailure(f"envelope integration failed: {sol.message}",
                                     t=float(sol.t[-1]))
        segments.append((lo, hi, sol.sol))
        y0 = sol.y[:, -1].tolist()
    if not segments:
        # degenerate zero-length interval: constant in time
        raise ValueError("empty integration interval")
    return EnvelopeTrajectory(profile, segments, t_start, t_end, tol)


def ermakov_residual(traj: EnvelopeTrajectory, ts) -> float:
    """Max residual of |eps|'' + (omega/2)^2 |eps| - |W/2|^2 / |eps|^3 = 0.

    Cross-check of the auxiliary amplitude equation; uses eps'' from the
    envelope ODE rather than finite differences.
    """
    worst = 0.0
    w0 = traj.state_at(traj.t_start).omega0
    for t in np.asarray(ts, dtype=float):
        st = traj.state_at(t)
        w = float(traj.profile.omega(t))
        rho = abs(st.eps)
        eps_ddot = -0.25 * w * w * st.eps
        re_dd = ((eps_ddot * np.conj(st.eps)).real + abs(st.eps_dot) ** 2) / rho
        rho_dot = (st.eps_dot * np.conj(st.eps)).real / rho
        rho_ddot = re_dd - rho_dot * rho_dot / rho
        resid = rho_ddot + 0.25 * w * w * rho - (w0 / 2.0) ** 2 / rho**3
        worst = max(worst, abs(resid))
    return worst


# ---------------------------------------------------------------------------
# Asymptotics


@dataclass(frozen=True)
class AsymptoticData:
    """Positive/negative-frequency amplitudes of eps after the variation ends.

    eps(t) = c_plus exp(i Omega_f t) + c_minus exp(-i Omega_f t) for
    t >= t_end with Omega_f = omega_f / 2; R = |c_minus|^2 / |c_plus|^2.
    """

    c_plus: complex
    c_minus: complex
    big_r: float

    def __post_init__(self):
        if not 0.0 <= self.big_r < 1.0:
            raise ValueError(f"R = {self.big_r} outside [0, 1)")


def extract_asymptotics(traj: EnvelopeTrajectory,
                        profile: FieldProfile | None = None) -> AsymptoticData:
    """Bogoliubov data from (eps, eps') at the end of the trajectory.

    Requires the profile to be flat past t_end (analytic kinds guarantee it
    past their declared t_end; tabulated profiles are checked over the
    trailing window).  The 2x2 linear system for (c_plus, c_minus) is
    solved in closed form.
    """
    profile = profile if profile is not None else traj.profile
    t = traj.t_end
    if t < profile.t_end - 1e-12:
        raise ValueError("trajectory must extend past the profile's flat tail")
    w_f = float(profile.omega(t))
    if abs(w_f - profile.omega_final) > FLATNESS_RTOL * profile.omega_final:
        raise ProfileError("profile is not constant over the matching window")
    if isinstance(profile, TabulatedProfile):
        window = np.linspace(max(profile.t_start, t - 2.0), t, 16)
        if np.max(np.abs(profile.omega(window) - w_f)) > FLATNESS_RTOL * w_f:
            raise ProfileError("tabulated profile tail is not flat")
    st = traj.state_at(t)
    big_omega = 0.5 * w_f
    phase = np.exp(-1j * big_omega * t)
    c_plus = 0.5 * (st.eps - 1j * st.eps_dot / big_omega) * phase
    c_minus = 0.5 * (st.eps + 1j * st.eps_dot / big_omega) / phase
    if abs(c_plus) < 1e-12:
        raise DegenerateAsymptoticsError(
            "|c_plus| below tolerance; R would not be < 1")
    big_r = float(abs(c_minus) ** 2 / abs(c_plus) ** 2)
    if big_r >= 1.0:
        raise DegenerateAsymptoticsError(f"R = {big_r} >= 1")
    return AsymptoticData(c_plus=complex(c_plus), c_minus=complex(c_minus),
                          big_r=big_r)


def reflection_coefficient(profile: FieldProfile, tol: float = 1e-12,
                           settle: float = 0.0) -> float:
    """Convenience: R for a profile via envelope integration to its flat tail."""
    if isinstance(profile, ConstantProfile):
        return 0.0
    t_end = profile.t_end + settle
    if t_end <= profile.t_start:
        t_end = profile.t_start + max(1.0, settle)
    traj = solve_envelope(profile, t_end=t_end, tol=tol)
    return extract_asymptotics(traj, profile).big_r
