"""Speed threshold for coercivity of the transformed quadratic form.

Two readings are computed side by side: the printed closed formula
m = (|a1| + sqrt(a1^2 - 4 a2)) / 2, c = sqrt(m / (1 + m)), and the positive
roots of the positivity polynomial 1 + a1 m + a2 m^2 in the variable
m = 2 c^2 / gamma^2.  At p = 3 they disagree.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError
from .operators import alpha_of_p, beta_of_p
from .profiles import eval_Q, lambda0_Q
from .quadrature import line_integral


def _shift_term(p: float) -> float:
    return 1.0 / (p - 1.0) - 1.0 / (2.0 * (alpha_of_p(p) + 1.0))


def compute_a2(p: float) -> float:
    if not p > 1:
        raise DomainError("p must exceed 1")
    return _shift_term(p) ** 2


def threshold_integrals(p: float, rtol: float = 1e-13):
    a = alpha_of_p(p)
    i2a = line_integral(lambda x: eval_Q(p, x) ** (2 * a), decay=2 * a, rtol=rtol)
    ia1 = line_integral(lambda x: eval_Q(p, x) ** (a + 1), decay=a + 1, rtol=rtol)
    ilam = line_integral(lambda x: lambda0_Q(p, x) ** 2, decay=1.5, rtol=rtol)
    return i2a, ia1, ilam


def compute_a1(p: float, rtol: float = 1e-13) -> float:
    if not p > 1:
        raise DomainError("p must exceed 1")
    a = alpha_of_p(p)
    i2a, ia1, ilam = threshold_integrals(p, rtol)
    return 0.5 * (1 - 3 * a * a) * i2a * ilam / ia1 ** 2 - 2 * _shift_term(p)


def m_plus_paper(a1: float, a2: float):
    """Printed formula; None when a1^2 < 4 a2."""
    disc = a1 * a1 - 4 * a2
    if disc < 0:
        return None
    return 0.5 * (abs(a1) + math.sqrt(disc))


def positivity_poly(m, a1, a2):
    return 1.0 + a1 * m + a2 * m * m


def quadratic_roots(a1: float, a2: float, m_max: float = 1e3, step: float = 1e-3) -> list[float]:
    """Positive roots of 1 + a1 m + a2 m^2 on (0, m_max]: bracket by scanning,
    refine by bisection."""
    m = np.arange(1, int(round(m_max / step)) + 1) * step
    v = positivity_poly(m, a1, a2)
    roots = []
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) <= 0)[0]
    for i in idx:
        if v[i] == 0:
            roots.append(float(m[i]))
            continue
        if v[i + 1] == 0:
            continue
        roots.append(optimize.bisect(positivity_poly, m[i], m[i + 1], args=(a1, a2), xtol=1e-15, rtol=1e-15))
    return roots


def c_from_m(m: float) -> float:
    """Invert m = 2 c^2 / (1 - c^2)."""
    return math.sqrt(m / (2.0 + m))


@dataclass
class ThresholdReport:
    p: float
    alpha: float
    beta: float
    a1: float
    a2: float
    m_paper: float | None
    quadratic_roots: list = field(default_factory=list)
    c_plus_paper: float = float("nan")
    c_plus_alt: list = field(default_factory=list)
    bona_sachs: float = float("nan")
    discrepancy_flag: bool = False
    error: str = ""

    @property
    def c_plus_alt_low(self) -> float:
        return self.c_plus_alt[0] if self.c_plus_alt else float("nan")

    @property
    def c_plus_alt_high(self) -> float:
        return self.c_plus_alt[-1] if len(self.c_plus_alt) > 1 else float("nan")


def c_plus(p: float) -> ThresholdReport:
    if not p > 1:
        raise DomainError("p must exceed 1")
    a1, a2 = compute_a1(p), compute_a2(p)
    m = m_plus_paper(a1, a2)
    roots = quadratic_roots(a1, a2)
    rep = ThresholdReport(p=p, alpha=alpha_of_p(p), beta=beta_of_p(p), a1=a1, a2=a2, m_paper=m,
                          quadratic_roots=roots, c_plus_alt=[c_from_m(r) for r in roots],
                          bona_sachs=math.sqrt((p - 1) / 4))
    if m is not None:
        rep.c_plus_paper = math.sqrt(m / (1 + m))
        rep.discrepancy_flag = bool(positivity_poly(m, a1, a2) < 0)
    return rep


def a2_root(lo: float = 6.0, hi: float = 7.0) -> float:
    """Exponent where a2 vanishes, i.e. 1/(p-1) = 1/(2(alpha+1))."""
    return optimize.brentq(_shift_term, lo, hi, xtol=1e-14)


def threshold_curve(p_min: float, p_max: float, steps: int) -> list[ThresholdReport]:
    if not (1 < p_min < p_max) or steps < 1:
        raise DomainError("need 1 < p_min < p_max and steps >= 1")
    rows = []
    for i in range(steps + 1):
        p = p_min + (p_max - p_min) * i / steps
        try:
            rows.append(c_plus(p))
        except Exception as exc:  # recorded per row, sweep continues
            rows.append(ThresholdReport(p=p, alpha=float("nan"), beta=float("nan"), a1=float("nan"),
                                        a2=float("nan"), m_paper=None, error=str(exc)))
    return rows


CSV_HEADER = ["p", "alpha", "a1", "a2", "m_paper", "c_plus_paper", "c_plus_alt_low",
              "c_plus_alt_high", "bona_sachs", "discrepancy_flag"]


def write_threshold_csv(path, rows):
    def fmt(v):
        return "nan" if v is None else f"{v:.17g}"

    with open(path, "w", newline="") as fh:
        fh.write("# gblab threshold v1\n")
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([fmt(r.p), fmt(r.alpha), fmt(r.a1), fmt(r.a2), fmt(r.m_paper), fmt(r.c_plus_paper),
                        fmt(r.c_plus_alt_low), fmt(r.c_plus_alt_high), fmt(r.bona_sachs),
                        str(r.discrepancy_flag).lower()])
