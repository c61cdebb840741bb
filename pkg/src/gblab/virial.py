"""Virial functionals I, J, N, their combination H and the exact
time-derivative identities along the modulated flow.

The perturbation obeys, with V = f'(Q_c) and N(v1) = -d(f(Q_c+v1) - f(Q_c) - V v1),

    v1_t = d(v2 + c v1) + (rho' - c) d(Q_c + v1) - c' Lambda Q_c
    v2_t = d Lcal v1 + c d(v2 + c v1) + N + (rho' - c) d(v2 - c Q_c) + c' Lambda(c Q_c)

and the identities below follow by integration by parts.  ``variant="printed"``
switches the three sign conventions that differ in the published displays
(see the project notes); the default is the derived form, which the
trajectory finite-difference check confirms.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grid import Grid
from .profiles import SolitonParams, eval_Qc, eval_Qc_prime, f, f2_lambda_Qc, fprime, lambda_Qc, lambda_cQc, potential_derivs
from .transform import PerturbationFrame, helmholtz_inv, to_z
from .weights import WeightSet

VARIANTS = ("derived", "printed")


@dataclass(frozen=True)
class ModulationRates:
    c_rate: float
    rho_rate_minus_c: float


@dataclass(frozen=True)
class VirialConstants:
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 1.0


class WeightCache:
    """Weight derivative arrays on a fixed grid."""

    def __init__(self, weights: WeightSet, grid: Grid):
        y = grid.x
        self.weights = weights
        self.grid = grid
        self.phiA = weights.phiA.derivs(y)
        self.psi = weights.psiAB.derivs(y)
        self.zetaA = weights.zetaA.derivs(y)
        self.chiA_zetaB = weights.chiA(y) * weights.zetaB(y)


@dataclass
class _Profile:
    qc: np.ndarray
    qcp: np.ndarray
    lam: np.ndarray
    lamc: np.ndarray
    V: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    f2lam: np.ndarray


def _profile(params: SolitonParams, y) -> _Profile:
    V, V1, V2 = potential_derivs(params, y)
    return _Profile(eval_Qc(params, y), eval_Qc_prime(params, y), lambda_Qc(params, y),
                    lambda_cQc(params, y), V, V1, V2, f2_lambda_Qc(params, y))


def nonlinear_term(params: SolitonParams, v1, grid: Grid):
    """N(v1) = -d_y (f(Q_c + v1) - f(Q_c) - f'(Q_c) v1)."""
    qc = eval_Qc(params, grid.x)
    p = params.p
    return -grid.deriv(f(qc + v1, p) - f(qc, p) - fprime(qc, p) * v1, 1)


# --- functionals -------------------------------------------------------------------

def functional_I(frame: PerturbationFrame, wc: WeightCache) -> float:
    return wc.grid.integrate(wc.phiA[0] * frame.v1 * frame.v2)


def functional_J(frame: PerturbationFrame, wc: WeightCache) -> float:
    return wc.grid.integrate(wc.psi[0] * frame.z1 * frame.z2)


def functional_N(frame: PerturbationFrame, wc: WeightCache) -> float:
    g = wc.grid
    return g.integrate(wc.psi[0] * g.deriv(frame.z1, 1) * g.deriv(frame.z2, 1))


def h_coefficients(delta: float, k: VirialConstants = VirialConstants()):
    """Weights of I and N in H = J + a I + b N."""
    return 16.0 * delta ** (3.0 / 40.0) * k.C2, 40.0 * k.C1 * k.C2 * delta ** 0.125


def functional_H(I: float, J: float, N: float, delta: float, k: VirialConstants = VirialConstants()) -> float:
    a, b = h_coefficients(delta, k)
    return J + a * I + b * N


# --- identities --------------------------------------------------------------------

def _check_variant(variant):
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}")


def dtI_terms(frame, params: SolitonParams, rates: ModulationRates, wc: WeightCache,
              variant: str = "derived") -> dict:
    _check_variant(variant)
    g = wc.grid
    c, cr, rr = params.c, rates.c_rate, rates.rho_rate_minus_c
    pr = _profile(params, g.x)
    v1, v2 = frame.v1, frame.v2
    v1p = g.deriv(v1, 1)
    ph, ph1, ph3 = wc.phiA[0], wc.phiA[1], wc.phiA[3]
    Nv = nonlinear_term(params, v1, g)
    sgn_c = 1.0 if variant == "derived" else -1.0
    sgn_n = 1.0 if variant == "derived" else -1.0
    return {
        "quadratic": -0.5 * g.integrate(ph1 * ((v2 + c * v1) ** 2 + 3 * v1p ** 2 + (1 - c * c - pr.V) * v1 ** 2)),
        "shift_cross": -rr * g.integrate(ph1 * v1 * v2),
        "potential": -0.5 * g.integrate(ph * pr.V1 * v1 ** 2),
        "phi3": 0.5 * g.integrate(ph3 * v1 ** 2),
        "shift_profile": rr * g.integrate(ph * pr.qcp * (v2 - c * v1)),
        "speed": -cr * g.integrate(ph * (v2 * pr.lam - sgn_c * v1 * pr.lamc)),
        "nonlinear": sgn_n * g.integrate(ph * v1 * Nv),
    }


def rhs_dtI(frame, params, rates, wc, variant: str = "derived") -> float:
    return float(sum(dtI_terms(frame, params, rates, wc, variant).values()))


def _m_terms(frame, params: SolitonParams, rates: ModulationRates, eps: float, g: Grid, pr: _Profile,
             variant: str):
    """M1 + M1c and M2 + M2c of the transformed system."""
    c, cr, rr = params.c, rates.c_rate, rates.rho_rate_minus_c
    S = lambda u: helmholtz_inv(eps, u, g)
    v1, v2, z1, z2 = frame.v1, frame.v2, frame.z1, frame.z2
    SN = S(nonlinear_term(params, v1, g))
    z2p = g.deriv(z2, 1)
    M1 = c * SN - eps * S(2 * pr.V1 * g.deriv(z2, 2) + pr.V2 * z2p)
    M2 = SN
    if variant == "derived":
        M1c = cr * S(-c * pr.qc - pr.f2lam * v1 + v2) + rr * (g.deriv(z1, 1) + S(pr.V1 * v1))
        M2c = cr * S(pr.qc + v1) + rr * z2p
    else:
        M1c = cr * S(c * pr.qc + pr.f2lam * v1 + 2 * c * v1 - v2) + rr * (g.deriv(z1, 1) - S(pr.V1 * v1))
        M2c = -cr * S(pr.qc + v1) + rr * z2p
    return M1 + M1c, M2 + M2c, {"M1": M1, "M1c": M1c, "M2": M2, "M2c": M2c}


def dJ_terms(frame, params, rates, wc: WeightCache, eps: float, variant: str = "derived") -> dict:
    _check_variant(variant)
    g = wc.grid
    c = params.c
    pr = _profile(params, g.x)
    z1, z2 = frame.z1, frame.z2
    z2p = g.deriv(z2, 1)
    ps, ps1, ps3 = wc.psi[0], wc.psi[1], wc.psi[3]
    _, _, m = _m_terms(frame, params, rates, eps, g, pr, variant)
    return {
        "quadratic": -0.5 * g.integrate(ps1 * ((z1 + c * z2) ** 2 + 3 * z2p ** 2 + (1 - c * c - pr.V) * z2 ** 2)),
        "potential": 0.5 * g.integrate(ps * pr.V1 * z2 ** 2),
        "psi3": 0.5 * g.integrate(ps3 * z2 ** 2),
        "M1": g.integrate(ps * m["M1"] * z2),
        "M1c": g.integrate(ps * m["M1c"] * z2),
        "M2": g.integrate(ps * z1 * m["M2"]),
        "M2c": g.integrate(ps * z1 * m["M2c"]),
    }


def rhs_dtJ(frame, params, rates, wc, eps, variant: str = "derived") -> float:
    return float(sum(dJ_terms(frame, params, rates, wc, eps, variant).values()))


def dN_terms(frame, params, rates, wc: WeightCache, eps: float, variant: str = "derived") -> dict:
    _check_variant(variant)
    g = wc.grid
    c = params.c
    pr = _profile(params, g.x)
    z1p, z2p = g.deriv(frame.z1, 1), g.deriv(frame.z2, 1)
    z2pp = g.deriv(frame.z2, 2)
    ps, ps1, ps3 = wc.psi[0], wc.psi[1], wc.psi[3]
    _, _, m = _m_terms(frame, params, rates, eps, g, pr, variant)
    d = lambda u: g.deriv(u, 1)
    return {
        "quadratic": -0.5 * g.integrate(ps1 * ((z1p + c * z2p) ** 2 + 3 * z2pp ** 2 + (1 - c * c - pr.V) * z2p ** 2)),
        "potential": -0.5 * g.integrate(ps * pr.V1 * z2p ** 2),
        "psi3": 0.5 * g.integrate(ps3 * z2p ** 2),
        "M1": g.integrate(ps * z2p * d(m["M1"])),
        "M1c": g.integrate(ps * z2p * d(m["M1c"])),
        "M2": g.integrate(ps * z1p * d(m["M2"])),
        "M2c": g.integrate(ps * z1p * d(m["M2c"])),
    }


def rhs_dtN(frame, params, rates, wc, eps, variant: str = "derived") -> float:
    return float(sum(dN_terms(frame, params, rates, wc, eps, variant).values()))


# --- trajectory diagnostics ----------------------------------------------------------

@dataclass
class VirialSnapshot:
    t: float
    I: float
    J: float
    N: float
    H: float
    rhs_I: float
    rhs_J: float
    rhs_N: float
    rates: ModulationRates
    P_local: float = float("nan")


@dataclass
class VirialSeries:
    snapshots: list
    fd_dI: np.ndarray
    fd_dJ: np.ndarray
    fd_dN: np.ndarray
    fd_dH: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def column(self, name):
        return np.array([getattr(s, name) for s in self.snapshots])


def local_norm(frame: PerturbationFrame, params: SolitonParams, eps: float, grid: Grid) -> float:
    """P = int mu v1^2 + int mu (S(v2 + c v1))^2 with mu = sech^2."""
    mu = 1.0 / np.cosh(np.clip(grid.x, -350, 350)) ** 2
    s = helmholtz_inv(eps, frame.v2 + params.c * frame.v1, grid)
    return grid.integrate(mu * frame.v1 ** 2) + grid.integrate(mu * s ** 2)


def weighted_energy_density(frame: PerturbationFrame, params: SolitonParams, grid: Grid) -> float:
    """int ((1-c^2) v1^2 + v1'^2 + (v2 + c v1)^2) sech^2."""
    mu = 1.0 / np.cosh(np.clip(grid.x, -350, 350)) ** 2
    v1, v2, c = frame.v1, frame.v2, params.c
    return grid.integrate(mu * ((1 - c * c) * v1 ** 2 + grid.deriv(v1, 1) ** 2 + (v2 + c * v1) ** 2))


def virial_series(track, p: float, weights: WeightSet, grid: Grid, constants: VirialConstants = VirialConstants(),
                  variant: str = "derived", refine: int = 4) -> VirialSeries:
    """Functionals and identity right-hand sides at each tracked time, plus
    second-order finite-difference derivatives of the functionals.

    The frames are band-limited but the weights contain the exp(-1/t) bump,
    whose spectrum decays only like exp(-sqrt k); quadrature therefore runs on
    a grid refined by ``refine`` after spectral interpolation of the frame.
    """
    fine = grid.refined(refine) if refine > 1 else grid
    wc = WeightCache(weights, fine)
    eps, delta = weights.scales.eps, weights.scales.delta
    snaps = []
    for t, ms, cr, rr in zip(track.times, track.states, track.c_rate, track.rho_rate_minus_c):
        params = SolitonParams(p, ms.c)
        v = ms.v if refine <= 1 else PerturbationFrame(grid.interpolate(ms.v.v1, refine),
                                                        grid.interpolate(ms.v.v2, refine))
        frame = to_z(v, params, eps, fine)
        rates = ModulationRates(float(cr), float(rr))
        I, J, N = functional_I(frame, wc), functional_J(frame, wc), functional_N(frame, wc)
        snaps.append(VirialSnapshot(
            float(t), I, J, N, functional_H(I, J, N, delta, constants),
            rhs_dtI(frame, params, rates, wc, variant),
            rhs_dtJ(frame, params, rates, wc, eps, variant),
            rhs_dtN(frame, params, rates, wc, eps, variant),
            rates, local_norm(frame, params, eps, fine)))
    times = np.asarray(track.times, dtype=float)

    def fd(name):
        vals = np.array([getattr(s, name) for s in snaps])
        if len(vals) < 3:
            return np.full(len(vals), np.nan)
        return np.gradient(vals, times, edge_order=2)

    return VirialSeries(snaps, fd("I"), fd("J"), fd("N"), fd("H"))


def relative_error(fd, rhs, floor: float = 1e-12) -> float:
    """sup |fd - rhs| / max(sup |rhs|, floor) over interior samples."""
    fd, rhs = np.asarray(fd)[1:-1], np.asarray(rhs)[1:-1]
    return float(np.max(np.abs(fd - rhs)) / max(np.max(np.abs(rhs)), floor))


@dataclass
class DecaySeries:
    times: np.ndarray
    P_local: np.ndarray
    density: np.ndarray
    running_integral: np.ndarray


def decay_monitor(track, p: float, eps: float, grid: Grid) -> DecaySeries:
    P, D = [], []
    for ms in track.states:
        params = SolitonParams(p, ms.c)
        P.append(local_norm(ms.v, params, eps, grid))
        D.append(weighted_energy_density(ms.v, params, grid))
    t = np.asarray(track.times, dtype=float)
    D = np.array(D)
    run = np.concatenate([[0.0], np.cumsum(0.5 * (D[1:] + D[:-1]) * np.diff(t))]) if len(t) else np.zeros(0)
    return DecaySeries(t, np.array(P), D, run)


DIAG_HEADER = ["t", "I", "J", "N", "H", "fd_dI", "rhs_I", "fd_dJ", "rhs_J", "fd_dN", "rhs_N", "P_local"]


def write_diagnose_csv(path, series: VirialSeries):
    with open(path, "w", newline="") as fh:
        fh.write("# gblab diagnose v1\n")
        w = csv.writer(fh)
        w.writerow(DIAG_HEADER)
        for s, a, b, cc in zip(series.snapshots, series.fd_dI, series.fd_dJ, series.fd_dN):
            row = [s.t, s.I, s.J, s.N, s.H, a, s.rhs_I, b, s.rhs_J, cc, s.rhs_N, s.P_local]
            w.writerow([f"{v:.17g}" for v in row])
