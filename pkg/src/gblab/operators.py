"""Linearized operators around the solitary wave, discretized by Fourier
collocation, with closed-form eigenvalue oracles."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError, EigenSolverError
from .grid import Grid
from .profiles import (SolitonParams, eval_Q, eval_Q_prime, eval_Qc, eval_Qc_prime,
                       lambda_Qc, lambda_cQc)

KINDS = ("L0", "Ltilde0", "Lcal", "Lmatrix", "Ltilde_matrix")


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    params: SolitonParams
    grid: Grid

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")

    @property
    def is_block(self) -> bool:
        return self.kind.endswith("matrix")


def second_derivative_matrix(grid: Grid) -> np.ndarray:
    """Dense symmetric Fourier second-derivative matrix (circulant)."""
    # the inverse transform of the symbol is the first column of F^-1 diag(-k^2) F
    col = np.fft.irfft(-grid.kr ** 2, n=grid.n)
    idx = (np.arange(grid.n)[:, None] - np.arange(grid.n)[None, :]) % grid.n
    return col[idx]


def _potential(spec: OperatorSpec) -> np.ndarray:
    p = spec.params.p
    y = spec.grid.x
    q = eval_Q(p, y) if spec.kind in ("L0", "Ltilde0") else eval_Qc(spec.params, y)
    return p * q ** (p - 1.0)


def _scalar_parts(spec: OperatorSpec):
    """(coefficient of -d^2, constant shift) of the scalar (1,1) entry."""
    c = spec.params.c
    return {
        "L0": (1.0, 1.0),
        "Ltilde0": (3.0, 1.0),
        "Lcal": (1.0, 1.0 - c * c),
        "Lmatrix": (1.0, 1.0),
        "Ltilde_matrix": (3.0, 1.0),
    }[spec.kind]


def assemble(spec: OperatorSpec) -> np.ndarray:
    """Dense symmetric matrix of the operator (size n or 2n)."""
    n = spec.grid.n
    a, s = _scalar_parts(spec)
    A = -a * second_derivative_matrix(spec.grid)
    A[np.diag_indices(n)] += s - _potential(spec)
    A = 0.5 * (A + A.T)
    if not spec.is_block:
        return A
    c = spec.params.c
    eye = np.eye(n)
    return np.block([[A, c * eye], [c * eye, eye]])


def apply(spec: OperatorSpec, v):
    """Matrix-free action; ``v`` is one array (scalar kinds) or a pair."""
    g = spec.grid
    a, s = _scalar_parts(spec)
    V = _potential(spec)
    if not spec.is_block:
        return -a * g.deriv(v, 2) + (s - V) * v
    v1, v2 = v
    c = spec.params.c
    return (-a * g.deriv(v1, 2) + (s - V) * v1 + c * v2, c * v1 + v2)


# --- closed forms -----------------------------------------------------------------

def alpha_of_p(p: float) -> float:
    return (p + 1) / 12.0 * (-3 + 6 / (p + 1) + np.sqrt((9 + 6 * p + 33 * p * p) / (1 + p) ** 2))


def beta_of_p(p: float) -> float:
    return (p + 1) / 4.0 * (-3 + 2 / (p + 1) + np.sqrt((3 + 2 * p + 11 * p * p) / (3 * (1 + p) ** 2)))


def chang_eigenvalues(p: float) -> list[float]:
    """Discrete eigenvalues 1 - k_m^2 of L0, k_m = ((m+1) - (m-1) p)/2 > 0."""
    out = []
    m = 0
    while True:
        km = 0.5 * ((m + 1) - (m - 1) * p)
        if km <= 0:
            break
        out.append(1.0 - km * km)
        m += 1
    return out


def lambda0_matrix(params: SolitonParams) -> float:
    """Negative eigenvalue of the block operator [[L, c], [c, 1]]."""
    p, c, g2 = params.p, params.c, params.gamma ** 2
    k0 = 0.5 * (p + 1)
    return 1.0 - 0.5 * g2 * (k0 * k0 + np.sqrt(k0 ** 4 + 4 * c * c / g2 ** 2))


def psi_minus(params: SolitonParams, y):
    """Unnormalized eigenvector Q_c^((p+1)/2) (1, c/(lambda0-1))."""
    lam = lambda0_matrix(params)
    q = eval_Qc(params, y) ** (0.5 * (params.p + 1))
    return q, params.c / (lam - 1.0) * q


def oracle_values(spec: OperatorSpec) -> list[float]:
    p, c = spec.params.p, spec.params.c
    if spec.kind == "L0":
        return chang_eigenvalues(p)
    if spec.kind == "Lcal":
        return [spec.params.gamma ** 2 * v for v in chang_eigenvalues(p)]
    if spec.kind == "Ltilde0":
        vals = [1 - 3 * alpha_of_p(p) ** 2]
        b = beta_of_p(p)
        if b > -1:
            vals.append(1 - 3 * (b + 1) ** 2)
        return vals
    if spec.kind == "Lmatrix":
        return [lambda0_matrix(spec.params), 0.0]
    return []


# --- eigen solve ------------------------------------------------------------------

@dataclass
class SpectralReport:
    kind: str
    p: float
    c: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    oracle_values: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "schema": "gblab/spectrum v1",
            "kind": self.kind, "p": self.p, "c": self.c,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "residuals": [float(v) for v in self.residuals],
            "oracle_values": [float(v) for v in self.oracle_values],
        }, indent=2)


def lowest_eigenpairs(spec: OperatorSpec, k: int = 3, tol: float = 1e-8) -> SpectralReport:
    if k < 1:
        raise DomainError("need k >= 1")
    A = assemble(spec)
    k = min(k, A.shape[0])
    try:
        w, V = linalg.eigh(A, subset_by_index=[0, k - 1], driver="evr")
    except linalg.LinAlgError as exc:
        raise EigenSolverError(f"dense eigensolver failed: {exc}") from exc
    res = np.linalg.norm(A @ V - V * w, axis=0)
    if np.any(res > tol * max(1.0, np.abs(w).max())):
        raise EigenSolverError(f"eigen residuals too large: {res}")
    return SpectralReport(spec.kind, spec.params.p, spec.params.c, w, V, res, oracle_values(spec))


def count_negative(spec: OperatorSpec, k: int = 4, tol: float = 1e-8) -> int:
    """Eigenvalues below -tol; kernel modes sit at rounding level."""
    return int(np.sum(lowest_eigenpairs(spec, k).eigenvalues < -tol))


@dataclass(frozen=True)
class IdentityResiduals:
    lcal_lambda: float
    block_lambda: float


def verify_identity_LLambda(params: SolitonParams, grid: Grid) -> IdentityResiduals:
    """Discrete L2 norms of Lcal(Lambda Q_c) - 2 c Q_c and
    Lmatrix(Lambda Q_c, -d_c(c Q_c)) + J(Q_c, -c Q_c)."""
    y = grid.x
    c = params.c
    qc = eval_Qc(params, y)
    lam = lambda_Qc(params, y)
    r1 = apply(OperatorSpec("Lcal", params, grid), lam) - 2 * c * qc
    b1, b2 = apply(OperatorSpec("Lmatrix", params, grid), (lam, -lambda_cQc(params, y)))
    r2 = np.sqrt(grid.norm(b1 - c * qc) ** 2 + grid.norm(b2 + qc) ** 2)
    return IdentityResiduals(grid.norm(r1), r2)


def kernel_cosine(params: SolitonParams, grid: Grid, vec) -> float:
    """|cos| between a grid vector and Q' (or Q_c' for c != 0)."""
    qp = eval_Q_prime(params.p, grid.x) if params.c == 0 else eval_Qc_prime(params, grid.x)
    v = np.asarray(vec)[: grid.n]
    return abs(np.dot(v, qp)) / (np.linalg.norm(v) * np.linalg.norm(qp))
