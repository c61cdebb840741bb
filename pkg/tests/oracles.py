"""Independent reference computations used by the tests.

Each oracle avoids the code path it checks: finite differences instead of
analytic derivatives, scipy adaptive quadrature instead of the trapezoid
rule, second-order finite-difference matrices instead of Fourier
collocation, and direct time derivatives of the functionals (through the
perturbation equation) instead of the integrated-by-parts identities.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, sparse
from scipy.sparse import linalg as splinalg


# --- closed forms -----------------------------------------------------------------

def q_closed(p, x):
    """Q written directly from the cosh form."""
    return ((p + 1) / (2 * np.cosh((p - 1) * x / 2) ** 2)) ** (1 / (p - 1))


def a1_p3():
    return -(12 + math.pi ** 2) / 36 - 0.5


def m_plus_p3():
    pi2 = math.pi ** 2
    return (30 + pi2 + math.sqrt(576 + 60 * pi2 + pi2 ** 2)) / 72


def lambda0_closed(p, c):
    g2 = 1 - c * c
    k0 = (p + 1) / 2
    return 1 - 0.5 * g2 * (k0 ** 2 + math.sqrt(k0 ** 4 + 4 * c * c / g2 ** 2))


# --- finite differences -------------------------------------------------------------

def central_diff(fun, x, h=1e-5):
    return (fun(x + h) - fun(x - h)) / (2 * h)


def five_point(fun, x, h=1e-3):
    return (fun(x - 2 * h) - 8 * fun(x - h) + 8 * fun(x + h) - fun(x + 2 * h)) / (12 * h)


def second_diff(fun, x, h=1e-4):
    return (fun(x + h) - 2 * fun(x) + fun(x - h)) / (h * h)


# --- quadrature ---------------------------------------------------------------------

def quad_line(fun, cut=60.0):
    """Adaptive scipy quadrature over the line, split at the origin."""
    a, _ = integrate.quad(fun, -cut, 0, limit=400, epsabs=1e-15, epsrel=1e-13)
    b, _ = integrate.quad(fun, 0, cut, limit=400, epsabs=1e-15, epsrel=1e-13)
    return a + b


# --- finite-difference operators -----------------------------------------------------

def fd_schrodinger_ground(potential, L, n, coeff=1.0):
    """Lowest eigenvalue of -coeff d^2 + potential(x) with a 3-point Dirichlet stencil."""
    x = np.linspace(-L, L, n + 2)[1:-1]
    h = x[1] - x[0]
    main = 2 * coeff / h ** 2 + potential(x)
    off = -coeff / h ** 2 * np.ones(n - 1)
    A = sparse.diags([off, main, off], [-1, 0, 1], format="csc")
    w = splinalg.eigsh(A, k=1, sigma=-10.0, which="LM", return_eigenvectors=False)
    return float(w[0])


# --- perturbation equation in the moving frame ---------------------------------------

def dt_perturbation(p, c, c_rate, rr, y, v1, v2, deriv):
    """Time derivative of (v1, v2) from the linearized-plus-nonlinear system.

    Written from u = (Q_c, -c Q_c)(x - rho) + v(x - rho) and the gGB system,
    with rho' = c + rr.  ``deriv(u, k)`` is the k-th spatial derivative.
    """
    g = math.sqrt(1 - c * c)
    s = g ** (2 / (p - 1))
    qc = s * q_closed(p, g * y)
    qcp = deriv(qc, 1)
    # d_c Q_c and d_c (c Q_c) by centred differences in c
    h = 1e-6

    def qc_of(cc):
        gg = math.sqrt(1 - cc * cc)
        return gg ** (2 / (p - 1)) * q_closed(p, gg * y)

    lam = (qc_of(c + h) - qc_of(c - h)) / (2 * h)
    lamc = ((c + h) * qc_of(c + h) - (c - h) * qc_of(c - h)) / (2 * h)
    fp = p * qc ** (p - 1)
    fu = lambda u: np.abs(u) ** (p - 1) * u
    N = -deriv(fu(qc + v1) - fu(qc) - fp * v1, 1)
    rho_rate = c + rr
    dv1 = deriv(v2, 1) + rho_rate * deriv(v1, 1) + rr * qcp - c_rate * lam
    dv2 = (rho_rate * deriv(v2, 1) + deriv(-deriv(v1, 2) + v1 - fp * v1, 1) + N
           - c * rr * qcp + c_rate * lamc)
    return dv1, dv2, qc, lam


def direct_dI(p, c, c_rate, rr, grid, v1, v2, phi):
    d1, d2, _, _ = dt_perturbation(p, c, c_rate, rr, grid.x, v1, v2, grid.deriv)
    return grid.integrate(phi * (d1 * v2 + v1 * d2))


def _z_and_dz(p, c, c_rate, rr, grid, v1, v2, eps):
    y = grid.x
    d1, d2, qc, lam = dt_perturbation(p, c, c_rate, rr, y, v1, v2, grid.deriv)
    S = lambda u: np.fft.irfft(np.fft.rfft(u) / (1 + eps * grid.kr ** 2), n=grid.n)
    fp = p * qc ** (p - 1)
    f2lam = p * (p - 1) * qc ** (p - 2) * lam
    Lc = lambda u: -grid.deriv(u, 2) + (1 - c * c) * u - fp * u
    m = c * v1 + v2
    z1, z2 = S(Lc(v1) + c * m), S(m)
    dm = c_rate * v1 + c * d1 + d2
    # product rule on Lcal(c) v1 + c m: (d_c Lcal) v1 = (-2c - f'' Lambda Q_c) v1, then c' m + c m'
    dz1 = S(c_rate * (-2 * c - f2lam) * v1 + Lc(d1) + c_rate * m + c * dm)
    dz2 = S(dm)
    return z1, z2, dz1, dz2


def direct_dJ(p, c, c_rate, rr, grid, v1, v2, eps, psi):
    z1, z2, dz1, dz2 = _z_and_dz(p, c, c_rate, rr, grid, v1, v2, eps)
    return grid.integrate(psi * (dz1 * z2 + z1 * dz2))


def direct_dN(p, c, c_rate, rr, grid, v1, v2, eps, psi):
    z1, z2, dz1, dz2 = _z_and_dz(p, c, c_rate, rr, grid, v1, v2, eps)
    d = lambda u: grid.deriv(u, 1)
    return grid.integrate(psi * (d(dz1) * d(z2) + d(z1) * d(dz2)))


def localized_frame(grid, seed, amp=0.05, width=3.0):
    """Smooth random localized pair, resolved on ``grid``."""
    rng = np.random.default_rng(seed)
    x = grid.x
    out = []
    for _ in range(2):
        coef = rng.standard_normal(4)
        poly = sum(cf * (x / width) ** j for j, cf in enumerate(coef))
        out.append(amp * poly * np.exp(-((x - rng.uniform(-2, 2)) / width) ** 2))
    return out
