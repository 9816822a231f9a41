"""Self-contained invariant suite behind ``validate`` (CLI and service).

Each check re-derives an independent quantity (conserved Wronskian,
textbook step-matching reflection, transform oracle, unitarity row sums,
inverse-map round trip, bitwise MC reproducibility) and reports the
measured deviation against its tolerance.
"""

from __future__ import annotations

import numpy as np

from . import radon, states
from .envelope import StepProfile, solve_envelope, extract_asymptotics
from .numerics import MCConfig
from .schemas import CheckResult
from .transitions import (evolved_contexts, jacobi_row, probability_jacobi,
                          probability_overlap, tomographic_table,
                          TransitionSpec)

STEP = StepProfile(1.0, 4.0, 0.0)


def _check(name, measured, tolerance, detail=""):
    return CheckResult(name=name, passed=bool(measured < tolerance),
                       measured=float(measured), tolerance=float(tolerance),
                       detail=detail)


def run_validation(fast: bool = True, seed: int = 0) -> list[CheckResult]:
    checks = []
    rng = np.random.default_rng(seed)

    # Wronskian conservation along the solved envelope
    tol = 1e-10
    traj = solve_envelope(STEP, t_end=2.0, tol=tol)
    checks.append(_check("envelope_wronskian_drift", traj.wronskian_drift(),
                         10 * tol, "step 1->4, tol 1e-10"))

    # reflection coefficient versus the analytic step matching
    asym = extract_asymptotics(traj)
    checks.append(_check("envelope_step_reflection",
                         abs(asym.big_r - 0.36), 1e-9,
                         "R = ((0.5-2)/(0.5+2))^2 = 0.36"))

    # tomogram normalization over random frames
    evolved, final, big_r = evolved_contexts(STEP)
    worst = 0.0
    labels = [(states.Coherent(0.6 - 0.3j, 0.2 + 0.8j), final),
              (states.Fock(1, 1), evolved)]
    for label, ctx in labels:
        for _ in range(2 if fast else 6):
            frame = rng.normal(size=4)
            pt = states.TomogramPoint(0.0, frame[0], frame[1], 0.0,
                                      frame[2], frame[3])
            c1, c2, s1, s2 = states.tomogram_window(label, ctx, pt)
            xs1 = np.linspace(c1 - 9 * s1, c1 + 9 * s1, 801)
            xs2 = np.linspace(c2 - 9 * s2, c2 + 9 * s2, 801)
            w = states.tomogram(label, ctx, pt, x1=xs1[:, None],
                                x2=xs2[None, :])
            total = w.sum() * (xs1[1] - xs1[0]) * (xs2[1] - xs2[0])
            worst = max(worst, abs(total - 1.0))
    checks.append(_check("tomogram_normalization", worst, 1e-6,
                         "int w dX1 dX2 = 1, random frames"))

    # closed forms versus the numerical transform
    label = states.Fock(2, 1)
    grid = radon.WavefunctionGrid.from_state(label, evolved,
                                             n=256 if fast else 512)
    worst = 0.0
    count = 0
    while count < (6 if fast else 25):
        phi = rng.uniform(0, 2 * np.pi, 2)
        r = np.exp(rng.uniform(np.log(0.3), np.log(1.5), 2))
        pt = states.TomogramPoint(
            r[0] * rng.normal() * 1.2, r[0] * np.cos(phi[0]),
            r[0] * np.sin(phi[0]), r[1] * rng.normal() * 1.2,
            r[1] * np.cos(phi[1]), r[1] * np.sin(phi[1]))
        try:
            num = radon.tomogram_from_wavefunction_2d(grid, pt)
        except (radon.ResolutionError, ValueError):
            continue
        worst = max(worst, abs(states.tomogram(label, evolved, pt) - num))
        count += 1
    checks.append(_check("tomogram_transform_agreement", worst, 1e-7,
                         "closed form vs chirped transform"))

    # ground-state law and route agreement
    spec = TransitionSpec(initial=(0, 0), final=(0, 0), profile=STEP)
    p_overlap = probability_overlap(spec).value
    p_jacobi = probability_jacobi((0, 0), (0, 0), big_r).value
    gap = max(abs(p_overlap - (1.0 - big_r)), abs(p_jacobi - (1.0 - big_r)))
    checks.append(_check("route_agreement_ground", gap, 1e-6,
                         "P_00 = 1 - R, overlap and jacobi"))

    # unitarity of jacobi rows
    worst = 0.0
    for n1 in range(2):
        for n2 in range(2):
            row, tail = jacobi_row((n1, n2), big_r)
            worst = max(worst, abs(sum(row.values()) - 1.0), tail)
    checks.append(_check("unitarity_rows", worst, 1e-4,
                         "sum_m P_n->m = 1 within the tail bound"))

    # inverse-map round trip at desk scale
    xs = np.linspace(-6.0, 6.0, 48 if fast else 64)
    w0 = radon.mixed_oscillator_tomogram([1.0], [[1.0]])
    dens = radon.density_from_tomogram_1d(
        w0, xs, n_mu=256 if fast else 384, n_x_quad=512 if fast else 768)
    psi0 = radon.oscillator_eigenfunction(0, xs)
    err = np.abs(dens.rho - np.outer(psi0, psi0)).max()
    checks.append(_check("inverse_map_roundtrip", err, 1e-4,
                         "oscillator ground state"))

    # Monte-Carlo determinism: fixed config gives identical bits
    mc = MCConfig(seed=seed, n_samples=10_000, n_strata=100)
    t1 = tomographic_table(STEP, [((0, 0), (0, 0))], mc)[((0, 0), (0, 0))]
    t2 = tomographic_table(STEP, [((0, 0), (0, 0))], mc)[((0, 0), (0, 0))]
    delta = 0.0 if (t1.value == t2.value and t1.stderr == t2.stderr) else 1.0
    checks.append(_check("mc_determinism", delta, 0.5,
                         "bit-identical repeated estimate"))

    if not fast:
        mc = MCConfig(seed=seed, n_samples=200_000, n_strata=2500)
        table = tomographic_table(STEP, [((0, 0), (0, 0)), ((1, 0), (1, 0))],
                                  mc)
        worst = 0.0
        for pair, est in table.items():
            ref = probability_jacobi(pair[0], pair[1], big_r).value
            worst = max(worst, abs(est.value - ref) / max(est.stderr, 1e-12))
        checks.append(_check("tomographic_route_pull", worst, 4.0,
                             "|tomographic - jacobi| / stderr"))
    return checks
