"""Constrained minima of quadratic forms by projected eigenproblems.

The quotient Q[v] = B[v, v] / ||v||^2 is minimized over {v : <g_i, v> = 0}.
The norm matrix is Fourier-diagonal, so the problem is whitened with M^(-1/2)
and the constraints are removed by an orthonormal null-space basis.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError
from .grid import Grid
from .operators import second_derivative_matrix
from .profiles import SolitonParams, eval_Qc, eval_Qc_prime, fprime, lambda_Qc, lambda_cQc

FORMS = ("B_L", "B_Ltilde", "B_local")


@dataclass
class FormSpec:
    form: str
    params: SolitonParams
    grid: Grid
    constraints: list | None = None  # list of (g1, g2) pairs; None selects the default set

    def __post_init__(self):
        if self.form not in FORMS:
            raise DomainError(f"form must be one of {FORMS}")


def default_constraints(form: str, params: SolitonParams, grid: Grid) -> list:
    y = grid.x
    c = params.c
    qc, qcp = eval_Qc(params, y), eval_Qc_prime(params, y)
    if form in ("B_L", "B_local"):
        return [(qcp, -c * qcp), (-c * qc, qc)]
    # form acting on (eta1, eta2) with the H^1 component second
    return [(lambda_Qc(params, y), -lambda_cQc(params, y))]


def _symbol_matrix(grid: Grid, sym) -> np.ndarray:
    col = np.fft.irfft(sym, n=grid.n)
    idx = (np.arange(grid.n)[:, None] - np.arange(grid.n)[None, :]) % grid.n
    return col[idx]


def _first_derivative_matrix(grid: Grid) -> np.ndarray:
    col = np.fft.irfft(1j * grid.kr_odd, n=grid.n)
    idx = (np.arange(grid.n)[:, None] - np.arange(grid.n)[None, :]) % grid.n
    return col[idx]


def form_matrices(spec: FormSpec):
    """(A, Minvhalf): form matrix and inverse square root of the norm matrix."""
    g, p, c = spec.grid, spec.params.p, spec.params.c
    n = g.n
    V = fprime(eval_Qc(spec.params, g.x), p)
    eye = np.eye(n)
    D2 = second_derivative_matrix(g)
    h1 = _symbol_matrix(g, 1.0 / np.sqrt(1.0 + g.kr ** 2))
    Z = np.zeros((n, n))
    if spec.form == "B_L":
        L = -D2 + np.diag(1.0 - V)
        A = np.block([[L, c * eye], [c * eye, eye]])
        Mih = np.block([[h1, Z], [Z, eye]])
    elif spec.form == "B_Ltilde":
        Lt = -3.0 * D2 + np.diag(1.0 - V)
        A = np.block([[eye, c * eye], [c * eye, Lt]])
        Mih = np.block([[eye, Z], [Z, h1]])
    else:
        w = 1.0 / np.cosh(np.clip(spec.params.gamma * g.x, -700, 700))
        D1 = _first_derivative_matrix(g)
        W = np.diag(w)
        top = D1.T @ W @ D1 + np.diag(w * (1.0 - c * c - V + c * c))
        A = np.block([[top, c * W], [c * W, W]])
        Mn = np.block([[np.diag(w) + D1.T @ W @ D1, Z], [Z, W]])
        ev, U = linalg.eigh(0.5 * (Mn + Mn.T))
        if ev.min() <= 1e-13 * ev.max():
            raise DomainError("weighted norm is singular on this grid")
        Mih = (U / np.sqrt(ev)) @ U.T
    return 0.5 * (A + A.T), 0.5 * (Mih + Mih.T)


@dataclass
class RayleighResult:
    min_quotient: float
    minimizer: np.ndarray
    asymmetry: float
    n_constraints: int


def constrained_min_rayleigh(spec: FormSpec, constraints: list | None = None, count: int = 1,
                             rank_tol: float = 1e-10) -> RayleighResult:
    """Minimum of the quotient on the constraint subspace.

    ``constraints`` overrides ``spec.constraints``; pass [] for none.
    """
    if constraints is None:
        constraints = spec.constraints
    if constraints is None:
        constraints = default_constraints(spec.form, spec.params, spec.grid)
    A, Mih = form_matrices(spec)
    B = Mih @ A @ Mih
    asym = float(np.max(np.abs(B - B.T)))
    B = 0.5 * (B + B.T)
    N = B.shape[0]
    if constraints:
        C = np.column_stack([np.concatenate(gi) for gi in constraints])
        Ct = Mih @ C
        Q, R = linalg.qr(Ct, mode="full")
        d = np.abs(np.diag(R))
        if d.min() <= rank_tol * d.max():
            raise DomainError("constraint vectors are linearly dependent on the grid")
        Zb = Q[:, C.shape[1]:]
        Bp = Zb.T @ B @ Zb
        asym = max(asym, float(np.max(np.abs(Bp - Bp.T))))
        Bp = 0.5 * (Bp + Bp.T)
    else:
        Zb = None
        Bp = B
    w, Y = linalg.eigh(Bp, subset_by_index=[0, count - 1], driver="evr")
    vec = Mih @ (Zb @ Y[:, 0] if Zb is not None else Y[:, 0])
    return RayleighResult(float(w[0]), vec, asym, len(constraints))


def essential_floor(form: str, c: float) -> float:
    """Bottom of the quotient over plane waves (k = 0)."""
    return 1.0 - abs(c)


@dataclass
class PositivityRow:
    p: float
    c: float
    min_unconstrained: float
    min_constrained: float
    crossing_estimate: float = float("nan")


def grid_for(params: SolitonParams, n: int, form: str = "B_L") -> Grid:
    """Domain of half length 40/gamma; the sech(gamma x)-weighted form uses
    20/gamma so that its weighted norm stays well conditioned."""
    if form == "B_local":
        return Grid(12.0 / params.gamma, n)
    return Grid(max(40.0, 40.0 / params.gamma), n)


def positivity_map(p: float, c_grid, form: str = "B_Ltilde", n: int = 512) -> list[PositivityRow]:
    rows = []
    for c in c_grid:
        if not 0 < c < 1:
            raise DomainError("speeds must lie in (0, 1)")
        params = SolitonParams(p, float(c))
        spec = FormSpec(form, params, grid_for(params, n, form))
        rows.append(PositivityRow(p, float(c), constrained_min_rayleigh(spec, []).min_quotient,
                                  constrained_min_rayleigh(spec).min_quotient))
    for a, b in zip(rows[:-1], rows[1:]):
        if np.sign(a.min_constrained) != np.sign(b.min_constrained):
            t = a.min_constrained / (a.min_constrained - b.min_constrained)
            b.crossing_estimate = a.c + t * (b.c - a.c)
    return rows


def crossings(rows) -> list[float]:
    return [r.crossing_estimate for r in rows if np.isfinite(r.crossing_estimate)]


def write_coercivity_csv(path, rows):
    with open(path, "w", newline="") as fh:
        fh.write("# gblab coercivity v1\n")
        w = csv.writer(fh)
        w.writerow(["p", "c", "min_unconstrained", "min_constrained", "crossing_estimate"])
        for r in rows:
            w.writerow([f"{v:.17g}" for v in (r.p, r.c, r.min_unconstrained, r.min_constrained, r.crossing_estimate)])
