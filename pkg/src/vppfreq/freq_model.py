"""Closed-form post-contingency frequency response of a two-area aggregate.

The model covers a power system whose frequency is governed by an aggregate
swing equation with load damping, a reheat-style synchronous governor with a
droop dead band, and a virtual power plant (VPP) that contributes synthetic
inertia and droop with its own, tighter dead band.

After a step power deficit the deviation evolves in three pieces:

1. Before the VPP droop dead band is crossed, only inertia and load damping
   act, giving a first-order decay toward -delta_p/d0.
2. Between the VPP and governor dead-band crossings the deviation is
   approximated as held at the VPP dead-band edge (the gap between the two
   bands is narrow by design).
3. Once governor droop is active the response is an underdamped second-order
   transient whose coefficients depend on total inertia and damping; its
   stationary points and asymptote are available analytically.

All arithmetic is carried out in per-unit on the system power base, with
frequency quantities divided by the nominal frequency on the way in and
multiplied by it on the way out. Deviations are negative for a power deficit;
metric values (rate of change, nadir, steady-state offset) are reported as
positive magnitudes in physical units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NeverActivatesError, OverdampedError

__all__ = [
    "GridParams",
    "VppParams",
    "Disturbance",
    "SecondOrderCoeffs",
    "FreqMetrics",
    "derive_coeffs",
    "deadband_crossing_times",
    "freq_response",
    "response_curve",
    "rocof_max",
    "nadir",
    "qss",
    "metrics",
]


@dataclass(frozen=True)
class GridParams:
    """Fixed parameters of the host grid and its synchronous generation.

    d0:     load damping constant, p.u. power per p.u. frequency
    h0:     aggregate synchronous inertia constant, s
    r:      governor droop gain, p.u. power per p.u. frequency
    t_sg:   governor/turbine time constant, s
    f0:     nominal frequency, Hz
    f_db1:  VPP droop dead-band half-width, Hz
    f_db2:  governor droop dead-band half-width, Hz
    """

    d0: float
    h0: float
    r: float
    t_sg: float
    f0: float
    f_db1: float
    f_db2: float

    def __post_init__(self) -> None:
        for name in ("d0", "h0", "r", "t_sg", "f0"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"GridParams.{name} must be strictly positive")
        if self.f_db1 < 0.0 or self.f_db2 < 0.0:
            raise ValueError("dead-band widths must be non-negative")
        # The VPP band is the inner one; branches of the piecewise response
        # assume it activates first.
        if self.f_db1 > self.f_db2:
            raise ValueError("f_db1 must not exceed f_db2")


@dataclass(frozen=True)
class VppParams:
    """Virtual inertia (s) and virtual damping (p.u.) provided by the VPP."""

    h_vpp: float
    d_vpp: float

    def __post_init__(self) -> None:
        if self.h_vpp < 0.0 or self.d_vpp < 0.0:
            raise ValueError("VPP inertia and damping must be non-negative")


@dataclass(frozen=True)
class Disturbance:
    """Step power deficit delta_p > 0 (p.u.), i.e. a frequency-drop event."""

    delta_p: float

    def __post_init__(self) -> None:
        if not self.delta_p > 0.0:
            raise ValueError("delta_p must be strictly positive (drop event)")


@dataclass(frozen=True)
class SecondOrderCoeffs:
    """Coefficients of the droop-active branch of the response.

    omega_n/zeta/omega_d are the natural frequency, damping ratio and damped
    frequency of the second-order transient; (eta1, phi1) and (eta2, phi2)
    are the envelope gains and phases of its two sinusoidal terms; m is the
    amplitude ratio coupling the governor dead-band term to the main term.
    h_total and d_total are system plus VPP inertia and damping.
    """

    omega_n: float
    zeta: float
    omega_d: float
    eta1: float
    phi1: float
    eta2: float
    phi2: float
    m: float
    h_total: float
    d_total: float


@dataclass(frozen=True)
class FreqMetrics:
    """Security metrics of one disturbance response, in physical units.

    rocof_max: largest instantaneous rate of change of frequency, Hz/s
    nadir:     largest frequency dip magnitude, Hz
    qss:       quasi-steady-state deviation magnitude, Hz
    t_nadir:   time of the nadir, s after the disturbance
    t_db1:     time the VPP dead band is crossed, s
    t_db2:     time the governor dead band is crossed, s
    """

    rocof_max: float
    nadir: float
    qss: float
    t_nadir: float
    t_db1: float
    t_db2: float


def _db_pu(grid: GridParams) -> tuple[float, float]:
    return grid.f_db1 / grid.f0, grid.f_db2 / grid.f0


def derive_coeffs(grid: GridParams, vpp: VppParams, dist: Disturbance) -> SecondOrderCoeffs:
    """Compute the second-order coefficients of the droop-active branch.

    Raises OverdampedError when the damping ratio reaches 1, where the
    oscillatory closed form (and the nadir machinery built on it) breaks down.
    """
    h_total = grid.h0 + vpp.h_vpp
    d_total = grid.d0 + vpp.d_vpp
    t = grid.t_sg
    omega_n = math.sqrt((d_total + grid.r) / (2.0 * h_total * t))
    zeta = (2.0 * h_total + d_total * t) / (
        2.0 * math.sqrt(2.0 * t * h_total * (grid.r + d_total))
    )
    if zeta >= 1.0:
        raise OverdampedError(
            f"damping ratio {zeta:.4f} >= 1; oscillatory closed form not applicable"
        )
    root = math.sqrt(1.0 - zeta * zeta)
    omega_d = omega_n * root
    eta1 = math.sqrt((1.0 - 2.0 * t * omega_n * zeta + (t * omega_n) ** 2) / (1.0 - zeta * zeta))
    # Quadrant-correct phase: chosen so the droop-active branch starts at zero
    # deviation (eta1 * sin(phi1) = -1 when the branch originates at t = 0).
    phi1 = math.atan2(-omega_d, t * omega_n * omega_n - zeta * omega_n)
    eta2 = 1.0 / root
    phi2 = math.atan(root / zeta)
    f1_pu, f2_pu = _db_pu(grid)
    m = (grid.r * f2_pu) / (dist.delta_p + vpp.d_vpp * f1_pu) * (eta2 / eta1)
    return SecondOrderCoeffs(
        omega_n=omega_n,
        zeta=zeta,
        omega_d=omega_d,
        eta1=eta1,
        phi1=phi1,
        eta2=eta2,
        phi2=phi2,
        m=m,
        h_total=h_total,
        d_total=d_total,
    )


def deadband_crossing_times(
    grid: GridParams, vpp: VppParams, dist: Disturbance
) -> tuple[float, float]:
    """Times at which the deviation crosses the VPP and governor dead bands.

    Inverts the inertia-plus-load-damping decay, whose asymptote is
    -delta_p/d0: if a band edge lies at or beyond that asymptote the band is
    never crossed and NeverActivatesError is raised (an explicit no-activation
    outcome rather than an infinite time).
    """
    f1_pu, f2_pu = _db_pu(grid)
    h_total = grid.h0 + vpp.h_vpp
    times = []
    for name, f_pu in (("VPP", f1_pu), ("governor", f2_pu)):
        arg = 1.0 - f_pu * grid.d0 / dist.delta_p
        if arg <= 0.0:
            raise NeverActivatesError(
                f"disturbance {dist.delta_p} p.u. never crosses the {name} "
                f"dead band ({f_pu:.6g} p.u.)"
            )
        times.append(-(2.0 * h_total / grid.d0) * math.log(arg))
    return times[0], times[1]


def _branch_amplitudes(
    grid: GridParams, vpp: VppParams, dist: Disturbance
) -> tuple[float, float]:
    """Amplitudes of the droop-active branch: main term and dead-band term."""
    f1_pu, f2_pu = _db_pu(grid)
    d_sum = vpp.d_vpp + grid.d0 + grid.r
    amp1 = (dist.delta_p + vpp.d_vpp * f1_pu) / d_sum
    amp2 = grid.r * f2_pu / d_sum
    return amp1, amp2


def response_curve(
    grid: GridParams, vpp: VppParams, dist: Disturbance, times: np.ndarray
) -> np.ndarray:
    """Evaluate the piecewise closed-form deviation (Hz) at an array of times.

    Times must be non-negative. The droop-active branch is evaluated in
    wall-clock time, so the piecewise curve is continuous at the governor
    dead-band crossing up to the narrow-gap approximation.
    """
    t = np.asarray(times, dtype=float)
    if t.size and float(t.min()) < 0.0:
        raise ValueError("times must be non-negative")
    co = derive_coeffs(grid, vpp, dist)
    t_db1, t_db2 = deadband_crossing_times(grid, vpp, dist)
    f1_pu, _ = _db_pu(grid)
    amp1, amp2 = _branch_amplitudes(grid, vpp, dist)

    first = -dist.delta_p / grid.d0 * (1.0 - np.exp(-grid.d0 / (2.0 * co.h_total) * t))
    decay = np.exp(-co.zeta * co.omega_n * t)
    second = -amp1 * (1.0 + decay * co.eta1 * np.sin(co.omega_d * t + co.phi1)) - amp2 * (
        1.0 - decay * co.eta2 * np.sin(co.omega_d * t + co.phi2)
    )
    out = np.where(t <= t_db1, first, np.where(t < t_db2, -f1_pu, second))
    return out * grid.f0


def freq_response(grid: GridParams, vpp: VppParams, dist: Disturbance, t: float) -> float:
    """Closed-form frequency deviation (Hz) at a single time t >= 0 s."""
    return float(response_curve(grid, vpp, dist, np.array([float(t)]))[0])


def rocof_max(grid: GridParams, vpp: VppParams, dist: Disturbance) -> float:
    """Peak rate of change of frequency (Hz/s), attained at t = 0+.

    Only inertia limits the initial slope; dead bands keep both droop
    channels inactive at the instant of the step.
    """
    return grid.f0 * dist.delta_p / (2.0 * (grid.h0 + vpp.h_vpp))


def qss(grid: GridParams, vpp: VppParams, dist: Disturbance) -> float:
    """Quasi-steady-state deviation magnitude (Hz) of the droop-active branch.

    Both droop channels back off by their dead bands at steady state, which
    is why the dead-band widths appear in the numerator.
    """
    f1_pu, f2_pu = _db_pu(grid)
    d_sum = vpp.d_vpp + grid.d0 + grid.r
    return grid.f0 * (dist.delta_p + vpp.d_vpp * f1_pu + grid.r * f2_pu) / d_sum


def _branch2_deriv2(
    co: SecondOrderCoeffs, amp1: float, amp2: float, t: float
) -> float:
    """Second time derivative of the droop-active branch (p.u./s^2)."""
    zw = co.zeta * co.omega_n
    e = math.exp(-zw * t)
    a = zw * zw - co.omega_d * co.omega_d
    b = 2.0 * zw * co.omega_d
    u1 = e * (a * math.sin(co.omega_d * t + co.phi1) - b * math.cos(co.omega_d * t + co.phi1))
    u2 = e * (a * math.sin(co.omega_d * t + co.phi2) - b * math.cos(co.omega_d * t + co.phi2))
    return -amp1 * co.eta1 * u1 + amp2 * co.eta2 * u2


def nadir(grid: GridParams, vpp: VppParams, dist: Disturbance) -> tuple[float, float]:
    """Frequency nadir magnitude (Hz) and its time (s).

    Solves the stationary-point condition of the droop-active branch, which
    reduces to tan(omega_d * t) = N with N assembled from the envelope gains
    and phases. Candidate times advance in half-periods until the first one
    inside the branch domain that is a genuine minimum of the deviation
    (second derivative of the deviation positive).
    """
    co = derive_coeffs(grid, vpp, dist)
    _, t_db2 = deadband_crossing_times(grid, vpp, dist)
    amp1, amp2 = _branch_amplitudes(grid, vpp, dist)
    zw = co.zeta * co.omega_n
    s1, c1 = math.sin(co.phi1), math.cos(co.phi1)
    s2, c2 = math.sin(co.phi2), math.cos(co.phi2)
    num = co.omega_d * (co.m * c2 - c1) - zw * (co.m * s2 - s1)
    den = zw * (co.m * c2 - c1) + co.omega_d * (co.m * s2 - s1)
    t_n = math.atan2(num, den) / co.omega_d
    half_period = math.pi / co.omega_d
    for _ in range(64):
        if t_n >= t_db2 and t_n > 1e-12 and _branch2_deriv2(co, amp1, amp2, t_n) > 0.0:
            break
        t_n += half_period
    else:  # pragma: no cover - unreachable for a valid drop event
        raise ArithmeticError("no admissible stationary point found for the nadir")
    return abs(freq_response(grid, vpp, dist, t_n)), t_n


def metrics(grid: GridParams, vpp: VppParams, dist: Disturbance) -> FreqMetrics:
    """Bundle all security metrics of one disturbance response."""
    t_db1, t_db2 = deadband_crossing_times(grid, vpp, dist)
    dip, t_n = nadir(grid, vpp, dist)
    return FreqMetrics(
        rocof_max=rocof_max(grid, vpp, dist),
        nadir=dip,
        qss=qss(grid, vpp, dist),
        t_nadir=t_n,
        t_db1=t_db1,
        t_db2=t_db2,
    )
