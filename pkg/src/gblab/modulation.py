"""Modulated decomposition u = Q_{c,rho} + v with <T_c, v> = <J Q_c, v> = 0.

Work happens in the frame centred at rho: the state is shifted spectrally,
v(y) = u(y + rho) - (Q_c, -c Q_c)(y).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ModulationDegenerateError, ModulationError
from .grid import Grid
from .profiles import (SolitonParams, eval_Qc, eval_Qc_prime, lambda_Qc, lambda_Qc_prime)
from .simulator import FieldPair, Trajectory
from .transform import PerturbationFrame


@dataclass
class ModulationState:
    c: float
    rho: float
    residuals: tuple
    v: PerturbationFrame
    iterations: int = 0


@dataclass
class ModulationTrack:
    times: np.ndarray
    c: np.ndarray
    rho: np.ndarray
    res1: np.ndarray
    res2: np.ndarray
    c_rate: np.ndarray
    rho_rate_minus_c: np.ndarray
    states: list = field(default_factory=list)
    error: str = ""


@dataclass
class _Pieces:
    qc: np.ndarray
    qcp: np.ndarray
    lam: np.ndarray
    lamp: np.ndarray


def _pieces(p, c, y):
    s = SolitonParams(p, c)
    return _Pieces(eval_Qc(s, y), eval_Qc_prime(s, y), lambda_Qc(s, y), lambda_Qc_prime(s, y))


def orthogonality(p: float, c: float, v1, v2, grid: Grid):
    """(<T_c, v>, <J Q_c, v>) in the centred frame."""
    q = _pieces(p, c, grid.x)
    return (grid.inner(q.qcp, v1) - c * grid.inner(q.qcp, v2),
            -c * grid.inner(q.qc, v1) + grid.inner(q.qc, v2))


def _centre(state: FieldPair, p, c, rho, grid):
    u1 = grid.shift(state.u1, rho)
    u2 = grid.shift(state.u2, rho)
    q = _pieces(p, c, grid.x)
    return u1 - q.qc, u2 + c * q.qc, q


def gd_pairing(p: float, c: float, grid: Grid) -> float:
    """<J Q_c, D_c> on the grid, D_c = (Lambda Q_c, -(Q_c + c Lambda Q_c))."""
    q = _pieces(p, c, grid.x)
    return grid.inner(-c * q.qc, q.lam) + grid.inner(q.qc, -(q.qc + c * q.lam))


def _check_degenerate(p, c, grid, q, degeneracy_tol):
    mass = grid.inner(q.qc, q.qc)
    gd = grid.inner(-c * q.qc, q.lam) + grid.inner(q.qc, -(q.qc + c * q.lam))
    if abs(gd) < degeneracy_tol * mass:
        raise ModulationDegenerateError(
            f"<JQ_c, Lambda Q_c> = {gd:.3e} vanishes at c = {c:.9f} (c^2 = (p-1)/4)")
    return gd


def decompose(state: FieldPair, grid: Grid, p: float, guess: tuple, tol: float = 1e-10,
              max_iter: int = 50, degeneracy_tol: float = 1e-4) -> ModulationState:
    """Damped Newton solve of the two orthogonality conditions in (c, rho)."""
    c, rho = float(guess[0]), float(guess[1])
    scale = tol * np.sqrt(grid.norm(state.u1) ** 2 + grid.norm(state.u2) ** 2)
    y = grid.x

    def resid(c, rho):
        w1, w2, q = _centre(state, p, c, rho, grid)
        F1 = grid.inner(q.qcp, w1) - c * grid.inner(q.qcp, w2)
        F2 = -c * grid.inner(q.qc, w1) + grid.inner(q.qc, w2)
        return np.array([F1, F2]), w1, w2, q

    F, w1, w2, q = resid(c, rho)
    for it in range(max_iter + 1):
        if np.max(np.abs(F)) <= scale:
            _check_degenerate(p, c, grid, q, degeneracy_tol)
            return ModulationState(c, rho, (float(F[0]), float(F[1])), PerturbationFrame(w1, w2), it)
        if it == max_iter:
            break
        gd = _check_degenerate(p, c, grid, q, degeneracy_tol)
        w1p, w2p = grid.deriv(w1, 1), grid.deriv(w2, 1)
        # d_c T = (Lambda Q_c', -Q_c' - c Lambda Q_c'), d_c G = (-Q_c - c Lambda Q_c, Lambda Q_c)
        dcF1 = grid.inner(q.lamp, w1) - grid.inner(q.qcp + c * q.lamp, w2)
        drF1 = grid.inner(q.qcp, w1p) - c * grid.inner(q.qcp, w2p) + (1 + c * c) * grid.inner(q.qcp, q.qcp)
        dcF2 = -grid.inner(q.qc + c * q.lam, w1) + grid.inner(q.lam, w2) - gd
        drF2 = -c * grid.inner(q.qc, w1p) + grid.inner(q.qc, w2p)
        Jm = np.array([[dcF1, drF1], [dcF2, drF2]])
        try:
            step = np.linalg.solve(Jm, -F)
        except np.linalg.LinAlgError as exc:
            raise ModulationError("singular modulation Jacobian", tuple(F)) from exc
        lam = 1.0
        base = np.max(np.abs(F))
        for _ in range(30):
            cn, rn = c + lam * step[0], rho + lam * step[1]
            if abs(cn) < 1:
                Fn, w1n, w2n, qn = resid(cn, rn)
                if np.max(np.abs(Fn)) < base or lam < 1e-6:
                    break
            lam *= 0.5
        else:
            raise ModulationError("line search failed", tuple(F))
        c, rho, F, w1, w2, q = cn, rn, Fn, w1n, w2n, qn
    raise ModulationError(f"no convergence in {max_iter} iterations; residuals {F}", tuple(F))


def coarse_search(state: FieldPair, grid: Grid, p: float, c_range=(-0.95, 0.95), nc: int = 39):
    """Best (c, rho) over a coarse speed grid; rho by FFT cross-correlation."""
    best = None
    U1, U2 = np.fft.rfft(state.u1), np.fft.rfft(state.u2)
    for c in np.linspace(c_range[0], c_range[1], nc):
        if abs(c) >= 1:
            continue
        q = eval_Qc(SolitonParams(p, c), grid.x)
        Qh = np.fft.rfft(q)
        corr = np.fft.irfft(U1 * np.conj(Qh) - c * U2 * np.conj(Qh), n=grid.n)
        j = int(np.argmax(corr))
        # lag j matches u(x + j dx) with Q_c(x)
        rho = (j * grid.dx + grid.L) % (2 * grid.L) - grid.L
        w1, w2, _ = _centre(state, p, c, rho, grid)
        r = grid.norm(w1) ** 2 + grid.norm(w2) ** 2
        if best is None or r < best[0]:
            best = (r, c, rho)
    return best[1], best[2]


def track(traj: Trajectory, guess: tuple, tol: float = 1e-10, max_iter: int = 50,
          degeneracy_tol: float = 1e-4, keep_states: bool = True) -> ModulationTrack:
    grid, p = traj.grid, traj.p
    cs, rs, r1, r2, states = [], [], [], [], []
    c, rho = guess
    err = ""
    prev_t = traj.times[0]
    for t, st in zip(traj.times, traj.snapshots):
        g = (c, rho + c * (t - prev_t))
        try:
            ms = decompose(st, grid, p, g, tol, max_iter, degeneracy_tol)
        except ModulationDegenerateError:
            raise
        except ModulationError:
            try:
                ms = decompose(st, grid, p, coarse_search(st, grid, p), tol, max_iter, degeneracy_tol)
            except ModulationError as exc:
                err = f"decomposition failed at t={t}: {exc}"
                break
        c, rho, prev_t = ms.c, ms.rho, t
        cs.append(c)
        rs.append(rho)
        r1.append(ms.residuals[0])
        r2.append(ms.residuals[1])
        if keep_states:
            states.append(ms)
    times = np.asarray(traj.times[: len(cs)], dtype=float)
    cs, rs = np.array(cs), np.array(rs)
    if len(cs) >= 3:
        c_rate = np.gradient(cs, times, edge_order=2)
        r_rate = np.gradient(rs, times, edge_order=2) - cs
    else:
        c_rate = np.full(len(cs), np.nan)
        r_rate = np.full(len(cs), np.nan)
    return ModulationTrack(times, cs, rs, np.array(r1), np.array(r2), c_rate, r_rate, states, err)


def rate_bound_ratios(tr: ModulationTrack, p: float, grid: Grid, floor: float = 1e-300):
    """Empirical constants in the modulation-rate estimates, per tracked time:
    |rho' - c| / (||Q^(3/4) v1|| + ||Q^(3/4)(v2 + c v1)||) and
    |c'| / (||Q^((p-1)/2) v1||^2 + ||Q^(3/4) v1||^2 + ||Q^(3/4)(v2 + c v1)||^2)."""
    r_rho, r_c = [], []
    for ms, cr, rr in zip(tr.states, tr.c_rate, tr.rho_rate_minus_c):
        q = eval_Qc(SolitonParams(p, ms.c), grid.x)
        v1, v2 = ms.v.v1, ms.v.v2
        a = grid.norm(q ** 0.75 * v1)
        b = grid.norm(q ** 0.75 * (v2 + ms.c * v1))
        e = grid.norm(q ** (0.5 * (p - 1)) * v1)
        r_rho.append(abs(rr) / max(a + b, floor))
        r_c.append(abs(cr) / max(e * e + a * a + b * b, floor))
    return np.array(r_rho), np.array(r_c)


TRACK_HEADER = ["t", "c", "rho", "res1", "res2", "c_rate", "rho_rate_minus_c"]


def write_track_csv(path, tr: ModulationTrack):
    with open(path, "w", newline="") as fh:
        fh.write("# gblab track v1\n")
        w = csv.writer(fh)
        w.writerow(TRACK_HEADER)
        for row in zip(tr.times, tr.c, tr.rho, tr.res1, tr.res2, tr.c_rate, tr.rho_rate_minus_c):
            w.writerow([f"{v:.17g}" for v in row])
