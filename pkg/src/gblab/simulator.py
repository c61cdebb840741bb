"""Pseudospectral integrator for the generalized Good-Boussinesq system

    u1_t = (u2)_x,   u2_t = (-u1_xx + u1 - f(u1))_x,   f(s) = |s|^(p-1) s

on a periodic grid.  Time stepping is Lawson (integrating factor) RK4: the
linear part is carried exactly by its group, which per wavenumber is a 2x2
rotation with frequency omega = |k| sqrt(1 + k^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CFLError, DomainError, NumericalError
from .grid import Grid
from .profiles import F, SolitonParams, eval_Qc, f, fprime


@dataclass
class FieldPair:
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        self.u1 = np.asarray(self.u1, dtype=float)
        self.u2 = np.asarray(self.u2, dtype=float)
        if self.u1.shape != self.u2.shape:
            raise DomainError("field components must share a shape")

    def copy(self) -> "FieldPair":
        return FieldPair(self.u1.copy(), self.u2.copy())


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list
    E: np.ndarray
    P: np.ndarray
    p: float
    grid: Grid
    blowup: bool = False
    meta: dict = field(default_factory=dict)


def soliton_state(params: SolitonParams, grid: Grid, x0: float | None = None) -> FieldPair:
    a = params.x0 if x0 is None else x0
    # wrap the centre onto the periodic cell
    y = (grid.x - a + grid.L) % (2 * grid.L) - grid.L
    q = eval_Qc(params, y)
    return FieldPair(q, -params.c * q)


def conserved(state: FieldPair, p: float, grid: Grid):
    u1, u2 = state.u1, state.u2
    ux = grid.deriv(u1, 1)
    E = 0.5 * grid.integrate(u2 ** 2 + u1 ** 2 + ux ** 2 - 2.0 * F(u1, p))
    P = grid.integrate(u1 * u2)
    return E, P


def dealias_mask(grid: Grid) -> np.ndarray:
    return (grid.kr <= 2.0 / 3.0 * grid.k_max).astype(float)


def rhs(state: FieldPair, p: float, grid: Grid, dealias: bool = True) -> FieldPair:
    """Time derivative; nonlinearity dealiased with the 2/3 rule."""
    u1, u2 = state.u1, state.u2
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
        raise NumericalError("non-finite state")
    nl = np.fft.rfft(f(u1, p))
    if dealias:
        nl *= dealias_mask(grid)
    lin = -grid.deriv(u1, 2) + u1
    return FieldPair(grid.deriv(u2, 1), grid.deriv(lin, 1) - np.fft.irfft(1j * grid.kr_odd * nl, n=grid.n))


class Integrator:
    """Lawson RK4 with exact linear propagator and optional sponge."""

    def __init__(self, grid: Grid, p: float, dt: float, dealias: bool = True,
                 sponge_width: float = 0.0, sponge_strength: float = 1.0, cfl: float = 2.5):
        if not dt > 0:
            raise DomainError("dt must be positive")
        self.grid, self.p, self.dt, self.cfl = grid, p, dt, cfl
        k = grid.kr_odd
        self.k = k
        self.omega = np.abs(k) * np.sqrt(1.0 + k * k)
        self.mask = dealias_mask(grid) if dealias else np.ones_like(grid.kr)
        self.E_half = self._propagator(0.5 * dt)
        self.E_full = self._propagator(dt)
        self.sponge = None
        if sponge_width > 0:
            d = np.abs(grid.x) - (grid.L - sponge_width)
            ramp = np.where(d > 0, np.sin(0.5 * np.pi * np.clip(d / sponge_width, 0, 1)) ** 2, 0.0)
            self.sponge = np.exp(-sponge_strength * ramp * dt)

    def _propagator(self, t):
        k, w = self.k, self.omega
        cs = np.cos(w * t)
        with np.errstate(invalid="ignore", divide="ignore"):
            sw = np.where(w > 0, np.sin(w * t) / np.where(w > 0, w, 1.0), t)
        ik = 1j * k
        return cs, ik * sw, ik * (1.0 + k * k) * sw

    @staticmethod
    def _apply(E, a, b):
        cs, e12, e21 = E
        return cs * a + e12 * b, e21 * a + cs * b

    def _nonlinear(self, a):
        """Spectral nonlinear term (0, -ik f(u1)) for u1-hat = a."""
        u1 = np.fft.irfft(a, n=self.grid.n)
        return -1j * self.k * self.mask * np.fft.rfft(f(u1, self.p))

    def check_cfl(self, state: FieldPair):
        # the integrating factor removes the linear k^2 stiffness; the limit is
        # set by the nonlinear flux -d_x f(u1) with speed max f'(u1)
        kd = 2.0 / 3.0 * self.grid.k_max
        speed = max(1.0, float(np.max(fprime(state.u1, self.p))))
        limit = self.cfl / (kd * speed)
        if self.dt > limit:
            raise CFLError(f"dt={self.dt} exceeds stability bound {limit:.3g}", suggested_dt=0.9 * limit)

    def _lawson(self, a, b):
        """One step for (u1-hat, u2-hat).  Stages carry u' = A u + N(u) in the
        frame of exp(tA); N only has a second component."""
        h, Eh, E1 = self.dt, self.E_half, self.E_full

        def lift(E, n):  # E applied to (0, n)
            cs, e12, _ = E
            return e12 * n, cs * n

        ah, bh = self._apply(Eh, a, b)
        ae, be = self._apply(E1, a, b)
        n1 = self._nonlinear(a)
        x, y = lift(Eh, n1)
        n2 = self._nonlinear(ah + 0.5 * h * x)
        n3 = self._nonlinear(ah)  # second component of u3 does not enter N
        x, y = lift(Eh, n3)
        n4 = self._nonlinear(ae + h * x)
        x1, y1 = lift(E1, n1)
        x2, y2 = lift(Eh, n2 + n3)
        return ae + h / 6.0 * (x1 + 2.0 * x2), be + h / 6.0 * (y1 + 2.0 * y2 + n4)

    def step(self, state: FieldPair) -> FieldPair:
        a, b = self._lawson(np.fft.rfft(state.u1), np.fft.rfft(state.u2))
        u1 = np.fft.irfft(a, n=self.grid.n)
        u2 = np.fft.irfft(b, n=self.grid.n)
        if self.sponge is not None:
            u1 *= self.sponge
            u2 *= self.sponge
        return FieldPair(u1, u2)


PERTURBATIONS = ("none", "gauss", "random")


@dataclass
class SimulationConfig:
    p: float = 3.0
    c: float = 0.75
    delta: float = 0.0
    perturbation: str = "gauss"
    seed: int = 0
    L: float = 100.0
    n: int = 4096
    dt: float = 0.01
    T: float = 20.0
    snapshot_every: float = 0.5
    sponge: bool = False
    sponge_width: float = 15.0
    sponge_strength: float = 2.0
    x0: float = 0.0
    blowup_factor: float = 50.0
    dealias: bool = True

    def validate(self):
        SolitonParams(self.p, self.c, self.x0)
        Grid(self.L, self.n)
        if self.perturbation not in PERTURBATIONS:
            raise DomainError(f"perturbation must be one of {PERTURBATIONS}")
        if not (self.delta >= 0 and self.T > 0 and self.dt > 0 and self.snapshot_every > 0):
            raise DomainError("delta >= 0 and positive T, dt, snapshot_every required")
        ratio = self.snapshot_every / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio or round(ratio) < 1:
            raise DomainError("snapshot_every must be a positive multiple of dt")
        ratio = self.T / self.snapshot_every
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise DomainError("T must be a multiple of snapshot_every")
        return self


def hl2_norm(v1, v2, grid: Grid) -> float:
    return float(np.sqrt(grid.norm(v1) ** 2 + grid.norm(grid.deriv(v1, 1)) ** 2 + grid.norm(v2) ** 2))


def perturbation(kind: str, grid: Grid, delta: float, x0: float = 0.0, seed: int = 0):
    """Localized perturbation with H^1 x L^2 norm ``delta``."""
    x = grid.x
    if kind == "none" or delta == 0:
        return np.zeros(grid.n), np.zeros(grid.n)
    if kind == "gauss":
        v1 = np.exp(-(x - x0 - 0.5) ** 2)
        v2 = 0.5 * np.exp(-(x - x0 + 0.5) ** 2)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        env = np.exp(-((x - x0) / 3.0) ** 2)
        lowpass = np.exp(-(grid.kr / 2.0) ** 2)
        v1 = env * np.fft.irfft(lowpass * np.fft.rfft(rng.standard_normal(grid.n)), n=grid.n)
        v2 = env * np.fft.irfft(lowpass * np.fft.rfft(rng.standard_normal(grid.n)), n=grid.n)
    else:
        raise DomainError(f"unknown perturbation {kind!r}")
    s = delta / hl2_norm(v1, v2, grid)
    return s * v1, s * v2


def initial_state(cfg: SimulationConfig, grid: Grid) -> FieldPair:
    params = SolitonParams(cfg.p, cfg.c, cfg.x0)
    st = soliton_state(params, grid)
    v1, v2 = perturbation(cfg.perturbation, grid, cfg.delta, cfg.x0, cfg.seed)
    return FieldPair(st.u1 + v1, st.u2 + v2)


def integrate_state(state: FieldPair, integ: Integrator, steps: int) -> FieldPair:
    for _ in range(steps):
        state = integ.step(state)
    return state


def run(cfg: SimulationConfig, state: FieldPair | None = None) -> Trajectory:
    cfg.validate()
    grid = Grid(cfg.L, cfg.n)
    if state is None:
        state = initial_state(cfg, grid)
    integ = Integrator(grid, cfg.p, cfg.dt, dealias=cfg.dealias,
                       sponge_width=cfg.sponge_width if cfg.sponge else 0.0,
                       sponge_strength=cfg.sponge_strength)
    integ.check_cfl(state)
    per = int(round(cfg.snapshot_every / cfg.dt))
    nsnap = int(round(cfg.T / cfg.snapshot_every))
    amp0 = float(np.max(np.abs(state.u1))) or 1.0
    times, snaps, Es, Ps = [0.0], [state], [], []
    E, P = conserved(state, cfg.p, grid)
    Es.append(E)
    Ps.append(P)
    blowup = False
    for j in range(1, nsnap + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):  # blow-up is reported below
                for _ in range(per):
                    state = integ.step(state)
                    if not np.all(np.isfinite(state.u1)):
                        raise NumericalError("non-finite field")
        except NumericalError:
            blowup = True
            break
        if np.max(np.abs(state.u1)) > cfg.blowup_factor * amp0:
            blowup = True
            break
        times.append(j * cfg.snapshot_every)
        snaps.append(state)
        E, P = conserved(state, cfg.p, grid)
        Es.append(E)
        Ps.append(P)
    return Trajectory(np.array(times), snaps, np.array(Es), np.array(Ps), cfg.p, grid, blowup,
                      meta={"config": cfg})
