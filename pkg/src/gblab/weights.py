"""Virial weights: cutoff chi, exponential weights zeta_K, their
antiderivatives phi_K and the composite psi_{A,B} = chi_A^2 phi_B.

Derivatives are exact: every weight is evaluated as a truncated Taylor jet
(value and normalized derivatives to order 4) built from a small forward-mode
arithmetic, so no finite differences enter the virial identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from .errors import DomainError

ORDER = 4
_FACT = np.array([math.factorial(k) for k in range(ORDER + 1)], dtype=float)


class Jet:
    """Taylor coefficients c_k = f^(k)(x)/k!, shape (ORDER+1, *x.shape)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def variable(cls, x, scale=1.0):
        x = np.asarray(x, dtype=float)
        c = np.zeros((ORDER + 1,) + x.shape)
        c[0] = x * scale
        c[1] = scale
        return cls(c)

    @classmethod
    def const(cls, value, shape):
        c = np.zeros((ORDER + 1,) + shape)
        c[0] = value
        return cls(c)

    def derivs(self):
        return self.c * _FACT.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(self.c + o.c)
        c = self.c.copy()
        c[0] = c[0] + o
        return Jet(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.c * o)
        out = np.zeros_like(self.c)
        for k in range(ORDER + 1):
            for j in range(k + 1):
                out[k] += self.c[j] * o.c[k - j]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.c / o)
        out = np.zeros_like(self.c)
        for k in range(ORDER + 1):
            acc = self.c[k].copy()
            for j in range(1, k + 1):
                acc -= o.c[j] * out[k - j]
            out[k] = acc / o.c[0]
        return Jet(out)

    def exp(self):
        out = np.zeros_like(self.c)
        out[0] = np.exp(self.c[0])
        for k in range(1, ORDER + 1):
            acc = np.zeros_like(out[0])
            for j in range(1, k + 1):
                acc += j * self.c[j] * out[k - j]
            out[k] = acc / k
        return Jet(out)

    def replace(self, mask, other):
        """Take ``other`` where ``mask`` holds."""
        return Jet(np.where(mask, other.c, self.c))

    def shift_up(self, value):
        """Jet of an antiderivative whose derivative is ``self``."""
        out = np.zeros_like(self.c)
        out[0] = value
        for k in range(1, ORDER + 1):
            out[k] = self.c[k - 1] / k
        return Jet(out)


def _h(t: Jet) -> Jet:
    """exp(-1/t) for t > 0, zero otherwise, as a jet."""
    t0 = t.c[0]
    pos = t0 > 1e-3
    unit = Jet.const(1.0, t0.shape)
    safe = unit.replace(pos, t)
    val = (-unit / safe).exp()
    return Jet(np.where(pos, val.c, 0.0))


def chi_jet(x, scale: float = 1.0) -> Jet:
    """chi(x / scale): 1 on |x| <= scale, 0 on |x| >= 2 scale, smooth between."""
    x = np.asarray(x, dtype=float)
    sgn = np.where(x < 0, -1.0, 1.0)
    r = Jet.variable(x, 1.0 / scale) * sgn  # |x| / scale away from 0
    t = r - 1.0
    a = _h(1.0 - t)
    b = _h(t)
    out = a / (a + b)
    core = np.abs(x) <= scale
    return out.replace(core, Jet.const(1.0, x.shape))


def zeta_jet(x, K: float) -> Jet:
    x = np.asarray(x, dtype=float)
    sgn = np.where(x < 0, -1.0, 1.0)
    r = Jet.variable(x) * sgn
    return ((chi_jet(x) - 1.0) * r * (1.0 / K)).exp()


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_PANELS = 16


def _zeta_sq_integral(u, K: float):
    """int_1^u zeta_K^2 for 1 <= u <= 2, composite Gauss-Legendre (vectorized)."""
    u = np.asarray(u, dtype=float)
    edges = np.linspace(0.0, 1.0, _PANELS + 1)
    # panel nodes mapped to [0, 1], then onto [1, u]
    s = (0.5 * (edges[:-1, None] + edges[1:, None]) + 0.5 * (edges[1:, None] - edges[:-1, None]) * _GL_NODES).ravel()
    w = (0.5 * (edges[1:, None] - edges[:-1, None]) * _GL_WEIGHTS).ravel()
    pts = 1.0 + (u[..., None] - 1.0) * s
    z = zeta_jet(pts, K).c[0]
    return (u - 1.0) * np.sum(w * z * z, axis=-1)


@lru_cache(maxsize=64)
def _phi_at_two(K: float) -> float:
    return 1.0 + float(_zeta_sq_integral(np.array(2.0), K))


def phi_value(x, K: float):
    """phi_K(x) = int_0^x zeta_K^2, odd in x."""
    x = np.asarray(x, dtype=float)
    s = np.abs(x)
    out = np.empty_like(s)
    inner = s <= 1
    out[inner] = s[inner]
    outer = s >= 2
    out[outer] = _phi_at_two(K) + 0.5 * K * (math.exp(-4.0 / K) - np.exp(-2.0 * s[outer] / K))
    mid = ~(inner | outer)
    if np.any(mid):
        out[mid] = 1.0 + _zeta_sq_integral(s[mid], K)
    return np.sign(x) * out


def phi_jet(x, K: float) -> Jet:
    z = zeta_jet(x, K)
    return (z * z).shift_up(phi_value(x, K))


class Weight:
    """A scalar weight evaluable with derivatives up to order 4."""

    def __init__(self, jet_fn, name=""):
        self._jet = jet_fn
        self.name = name

    def jet(self, x) -> Jet:
        return self._jet(np.asarray(x, dtype=float))

    def derivs(self, x):
        """Array of shape (5, ...) holding f, f', f'', f''', f''''."""
        return self.jet(x).derivs()

    def __call__(self, x, nu: int = 0):
        return self.derivs(x)[nu]


@dataclass(frozen=True)
class WeightScales:
    delta: float
    A: float
    B: float
    eps: float

    def __post_init__(self):
        for name in ("delta", "A", "B", "eps"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v}")

    @classmethod
    def from_delta(cls, delta: float) -> "WeightScales":
        A = 1.0 / delta
        B = A ** 0.1
        return cls(delta, A, B, B ** -4)

    def ordered(self, delta_max: float = 0.1) -> bool:
        return self.delta <= delta_max and 1.0 < self.B < self.A


@dataclass(frozen=True)
class WeightSet:
    scales: WeightScales
    chi: Weight
    chiA: Weight
    zetaA: Weight
    zetaB: Weight
    phiA: Weight
    phiB: Weight
    psiAB: Weight


def make_weights(scales: WeightScales) -> WeightSet:
    A, B = scales.A, scales.B

    def psi(x):
        ca = chi_jet(x, A)
        return ca * ca * phi_jet(x, B)

    return WeightSet(
        scales=scales,
        chi=Weight(chi_jet, "chi"),
        chiA=Weight(lambda x: chi_jet(x, A), "chiA"),
        zetaA=Weight(lambda x: zeta_jet(x, A), "zetaA"),
        zetaB=Weight(lambda x: zeta_jet(x, B), "zetaB"),
        phiA=Weight(lambda x: phi_jet(x, A), "phiA"),
        phiB=Weight(lambda x: phi_jet(x, B), "phiB"),
        psiAB=Weight(psi, "psiAB"),
    )


# --- empirical inequality constants ----------------------------------------------

def _sech(x):
    return 1.0 / np.cosh(np.clip(x, -700, 700))


def _bound_constants(scales: WeightScales, n: int, p: float, c: float) -> dict:
    from .profiles import SolitonParams, eval_Qc, lambda_Qc

    W = make_weights(scales)
    A, B = scales.A, scales.B
    x = np.linspace(-4 * A, 4 * A, n)
    out = {}
    for label, K, wz in (("A", A, W.zetaA), ("B", B, W.zetaB)):
        # the zeta inequalities live on the scale of the weight; sample there
        band = np.linspace(1.0, 2.0, n)
        xs = np.concatenate([np.linspace(-6 * K - 4, 6 * K + 4, n), band, -band])
        d = wz.derivs(xs)
        r1, r2, r3, r4 = d[1] / d[0], d[2] / d[0], d[3] / d[0], d[4] / d[0]
        sech = _sech(xs)
        out[f"z11a_{label}"] = K * np.max(np.abs(r2 - 2 * r1 ** 2))
        out[f"z11b_{label}"] = K * np.max(np.abs(r1))
        out[f"z11b_core_{label}"] = np.max(np.abs(r1[np.abs(xs) <= 1]))
        out[f"z11c_{label}"] = np.max(np.abs(r2) / (K ** -2 + sech / K))
        out[f"zprime3_{label}"] = np.max(np.abs(r3) / (K ** -3 + sech / K))
        out[f"zprime4_{label}"] = np.max(np.abs(r4) / (K ** -4 + sech / K))
    params = SolitonParams(p, c)
    g = params.gamma
    phA = W.phiA.derivs(x)
    out["vA_phiprime_max"] = np.max(phA[1])
    out["vA_phiprime_min"] = np.min(phA[1])
    out["vA_phi_over_x"] = np.max(np.abs(phA[0][x != 0] / x[x != 0]))
    out["vA_phi_over_A"] = np.max(np.abs(phA[0])) / A
    decay = _sech(0.75 * g * x)
    out["vA_phiQc"] = np.max((np.abs(phA[0] * eval_Qc(params, x)) + np.abs(phA[0] * lambda_Qc(params, x))) / decay)
    phB = W.phiB(x)
    out["vB_phi_over_B"] = np.max(np.abs(phB)) / B
    chia2 = W.chiA(x) ** 2
    psi = W.psiAB(x)
    nz = chia2 > 1e-300
    out["vB_psi_over_Bchi2"] = np.max(np.abs(psi[nz]) / (B * chia2[nz]))
    return {k: float(v) for k, v in out.items()}


@dataclass
class BoundReport:
    constants: dict
    refined: dict
    stable: dict
    passed: bool


def verify_weight_bounds(scales: WeightScales, sample_count: int = 4000, p: float = 3.0,
                         c: float = 0.8, rtol: float = 2e-2) -> BoundReport:
    if sample_count < 1000:
        raise DomainError("sample_count must be at least 1000")
    a = _bound_constants(scales, sample_count, p, c)
    b = _bound_constants(scales, 2 * sample_count + 1, p, c)
    stable = {}
    for k in a:
        va, vb = a[k], b[k]
        stable[k] = bool(np.isfinite(va) and np.isfinite(vb) and abs(va - vb) <= rtol * max(abs(vb), 1e-12) + 1e-12)
    return BoundReport(a, b, stable, all(stable.values()))
