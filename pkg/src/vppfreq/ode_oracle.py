"""Reference time-domain simulation of the nonlinear frequency dynamics.

Integrates the swing equation with load damping, a first-order governor with
a droop dead band, and the VPP's dead-banded droop, using a fixed-step
classical fourth-order Runge-Kutta scheme. The VPP's synthetic inertia is
folded into the swing constant (it acts on the same derivative term), while
its droop channel can optionally pass through a first-order actuation lag.

This module exists to validate the closed-form model: it shares no algebra
with it beyond the underlying differential equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError
from .freq_model import Disturbance, GridParams, VppParams

__all__ = ["SimConfig", "Trajectory", "simulate"]


@dataclass(frozen=True)
class SimConfig:
    """Fixed-step integration settings.

    dt:     step size, s
    t_end:  simulation horizon, s
    t_vpp:  VPP droop actuation time constant, s (0 disables the lag)
    method: integration scheme; only the classical Runge-Kutta step ("rk4")
            is supported
    """

    dt: float = 1e-3
    t_end: float = 30.0
    t_vpp: float = 0.0
    method: str = "rk4"

    def __post_init__(self) -> None:
        if not self.dt > 0.0 or not self.t_end > 0.0:
            raise ValueError("dt and t_end must be strictly positive")
        if self.t_vpp < 0.0:
            raise ValueError("t_vpp must be non-negative")
        if self.method != "rk4":
            raise ValueError(f"unsupported integration method: {self.method!r}")


@dataclass(frozen=True)
class Trajectory:
    """Sampled simulation output.

    times:   sample instants, s (uniform grid including t = 0)
    delta_f: frequency deviation, Hz
    p_sg:    synchronous governor power output, p.u.
    p_vpp:   VPP power output (droop plus synthetic inertia), p.u.
    """

    times: np.ndarray
    delta_f: np.ndarray
    p_sg: np.ndarray
    p_vpp: np.ndarray


def _deadband(x: float, width: float) -> float:
    """Symmetric dead band: zero inside +/- width, shifted linear outside."""
    if x > width:
        return x - width
    if x < -width:
        return x + width
    return 0.0


def simulate(
    grid: GridParams,
    vpp: VppParams,
    dist: Disturbance,
    cfg: SimConfig | None = None,
) -> Trajectory:
    """Integrate the disturbance response from rest and sample every step.

    Raises NonFiniteError as soon as the frequency state stops being finite,
    which in practice means the step size is too large for the dynamics.
    """
    if cfg is None:
        cfg = SimConfig()
    f1 = grid.f_db1 / grid.f0
    f2 = grid.f_db2 / grid.f0
    two_h = 2.0 * (grid.h0 + vpp.h_vpp)
    d0 = grid.d0
    d_v = vpp.d_vpp
    r = grid.r
    t_sg = grid.t_sg
    dp = dist.delta_p
    dt = cfg.dt
    lag = cfg.t_vpp > 0.0

    n = int(round(cfg.t_end / dt))
    times = np.arange(n + 1) * dt
    out_f = np.empty(n + 1)
    out_sg = np.empty(n + 1)
    out_vpp = np.empty(n + 1)

    df = 0.0  # frequency deviation, p.u.
    psg = 0.0  # governor output, p.u.
    pvd = 0.0  # lagged VPP droop output, p.u. (only used when lag is active)

    def rhs(df_: float, psg_: float, pvd_: float) -> tuple[float, float, float]:
        droop = pvd_ if lag else -d_v * _deadband(df_, f1)
        ddf = (-dp - d0 * df_ + droop + psg_) / two_h
        dpsg = (-psg_ - r * _deadband(df_, f2)) / t_sg
        dpvd = (-pvd_ - d_v * _deadband(df_, f1)) / cfg.t_vpp if lag else 0.0
        return ddf, dpsg, dpvd

    def record(i: int) -> None:
        ddf = rhs(df, psg, pvd)[0]
        droop = pvd if lag else -d_v * _deadband(df, f1)
        out_f[i] = df * grid.f0
        out_sg[i] = psg
        out_vpp[i] = droop - 2.0 * vpp.h_vpp * ddf

    record(0)
    for i in range(1, n + 1):
        k1 = rhs(df, psg, pvd)
        k2 = rhs(df + 0.5 * dt * k1[0], psg + 0.5 * dt * k1[1], pvd + 0.5 * dt * k1[2])
        k3 = rhs(df + 0.5 * dt * k2[0], psg + 0.5 * dt * k2[1], pvd + 0.5 * dt * k2[2])
        k4 = rhs(df + dt * k3[0], psg + dt * k3[1], pvd + dt * k3[2])
        df += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        psg += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        pvd += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if not math.isfinite(df):
            raise NonFiniteError(
                f"frequency state became non-finite at t = {i * dt:.6g} s; "
                "reduce the step size"
            )
        record(i)
    return Trajectory(times=times, delta_f=out_f, p_sg=out_sg, p_vpp=out_vpp)
