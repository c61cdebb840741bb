"""Periodic grid with Fourier differentiation and quadrature."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with ``n`` points.

    Wavenumbers are k_j = pi j / L in FFT order.  Odd-order spectral
    derivatives drop the Nyquist mode so that they stay real and
    antisymmetric.
    """

    L: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise DomainError(f"half length must be positive, got {self.L}")
        n = int(self.n)
        if n < 64 or n & (n - 1):
            raise DomainError(f"n must be a power of two >= 64, got {self.n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @cached_property
    def k_odd(self) -> np.ndarray:
        kk = self.k.copy()
        kk[self.n // 2] = 0.0
        return kk

    @cached_property
    def kr(self) -> np.ndarray:
        """Non-negative wavenumbers matching ``np.fft.rfft``."""
        return 2.0 * np.pi * np.fft.rfftfreq(self.n, d=self.dx)

    @cached_property
    def kr_odd(self) -> np.ndarray:
        kk = self.kr.copy()
        kk[-1] = 0.0
        return kk

    @property
    def k_max(self) -> float:
        return np.pi * self.n / (2.0 * self.L)

    def symbol(self, f, sym):
        """Apply a real Fourier multiplier given as an array over ``kr``."""
        return np.fft.irfft(sym * np.fft.rfft(f), n=self.n)

    def deriv(self, f, order: int = 1):
        if order == 0:
            return np.array(f, dtype=float, copy=True)
        kk = self.kr_odd if order % 2 else self.kr
        return np.fft.irfft((1j * kk) ** order * np.fft.rfft(f), n=self.n)

    def shift(self, f, a: float):
        """Return g(x) = f(x + a) by spectral interpolation."""
        return np.fft.irfft(np.exp(1j * self.kr_odd * a) * np.fft.rfft(f), n=self.n)

    def integrate(self, f) -> float:
        return float(self.dx * np.sum(f))

    def inner(self, f, g) -> float:
        return float(self.dx * np.dot(f, g))

    def norm(self, f) -> float:
        return float(np.sqrt(self.dx * np.dot(f, f)))

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.L, self.n * factor)

    def interpolate(self, f, factor: int = 2):
        """Band-limited interpolation of ``f`` onto ``refined(factor)``."""
        fh = np.fft.rfft(f)
        fh[-1] *= 0.5  # split the Nyquist mode symmetrically
        m = self.n * factor
        out = np.zeros(m // 2 + 1, dtype=complex)
        out[: fh.size] = fh
        return np.fft.irfft(out, n=m) * factor
