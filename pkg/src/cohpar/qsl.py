"""Quantum speed limit certificates for simulated schedules.

Within a segment the Hamiltonian is constant and commutes with its own
evolution, so ``<H>`` and ``Delta H`` are constants of motion and the time
averages reduce to duration-weighted sums over segments.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import expm

from .operators import apply_local, spectral_spread
from .scheduler import HamiltonianSchedule
from .simulator import StateVector, simulate


class QslError(ValueError):
    pass


@dataclass(frozen=True)
class QslReport:
    bures_angle: float
    E_avg: float
    dE_avg: float
    tau_qsl: float
    actual_T: float

    @property
    def saturation(self) -> float:
        return self.tau_qsl / self.actual_T if self.actual_T > 0 else 0.0

    @property
    def valid(self) -> bool:
        return self.actual_T >= self.tau_qsl - 1e-9

    def to_dict(self) -> dict:
        return asdict(self) | {"saturation": self.saturation, "valid": self.valid}


def bures_angle(psi0: StateVector, psif: StateVector) -> float:
    """``arccos |<psi0|psif>|`` computed as an atan2, which stays accurate near zero."""
    a, b = psi0.amplitudes / psi0.norm, psif.amplitudes / psif.norm
    ov = np.vdot(a, b)
    orth = np.linalg.norm(b - ov * a)
    return float(np.arctan2(orth, abs(ov)))


def _as_state(schedule: HamiltonianSchedule, psi0) -> StateVector:
    if isinstance(psi0, StateVector):
        return psi0
    return StateVector.basis(int(psi0), schedule.n_wires)


def _moments(seg, psi: np.ndarray, n: int) -> tuple[float, float]:
    h_psi = apply_local(psi, seg.hamiltonian.matrix, seg.wires, n)
    mean = float(np.vdot(psi, h_psi).real)
    # ||(H - <H>) psi|| avoids the cancellation in <H^2> - <H>^2
    return mean, float(np.linalg.norm(h_psi - mean * psi))


def time_averaged_energies(schedule: HamiltonianSchedule, psi0) -> tuple[float, float]:
    """``(E, Delta E)``: time-averaged energy above ground and energy spread."""
    total = schedule.total_T
    if total <= 0:
        raise QslError("time averages need a schedule of positive duration")
    n = schedule.n_wires
    psi = _as_state(schedule, psi0).amplitudes
    e_sum = de_sum = 0.0
    for seg in schedule.segments:
        mean, spread = _moments(seg, psi, n)
        h_min = spectral_spread(seg.hamiltonian).h_min
        e_sum += seg.duration * (mean - h_min)
        de_sum += seg.duration * spread
        psi = apply_local(psi, seg.unitary.matrix, seg.wires, n)
    return e_sum / total, de_sum / total


def time_averaged_energies_quadrature(schedule: HamiltonianSchedule, psi0, points: int = 1000) -> tuple[float, float]:
    """Trapezoid-rule integration along the trajectory (cross-check for small registers)."""
    total = schedule.total_T
    if total <= 0:
        raise QslError("time averages need a schedule of positive duration")
    n = schedule.n_wires
    psi = _as_state(schedule, psi0).amplitudes
    e_int = de_int = 0.0
    for seg in schedule.segments:
        h = seg.hamiltonian.matrix
        h_min = float(np.linalg.eigvalsh(h)[0])
        times = np.linspace(0.0, seg.duration, points)
        step = expm(-1j * h * (times[1] - times[0]))
        e_vals, de_vals = np.empty(points), np.empty(points)
        for j in range(points):
            mean, spread = _moments(seg, psi, n)
            e_vals[j], de_vals[j] = mean - h_min, spread
            if j + 1 < points:
                psi = apply_local(psi, step, seg.wires, n)
        e_int += trapezoid(e_vals, times)
        de_int += trapezoid(de_vals, times)
    return e_int / total, de_int / total


def qsl_bound(schedule: HamiltonianSchedule, psi0) -> QslReport:
    """Bures angle times ``max(1/E, 1/Delta E)`` for the simulated trajectory."""
    start = _as_state(schedule, psi0)
    total = schedule.total_T
    if total <= 0:
        return QslReport(0.0, 0.0, 0.0, 0.0, 0.0)
    final = simulate(schedule, start).final
    angle = bures_angle(start, final)
    e_avg, de_avg = time_averaged_energies(schedule, start)
    rates = [r for r in (e_avg, de_avg) if r > 1e-12]
    # a vanishing rate means the state never moved, so the angle is zero too
    tau = angle / min(rates) if rates and angle > 1e-12 else 0.0
    return QslReport(angle, e_avg, de_avg, tau, total)


def certified_bound(schedule: HamiltonianSchedule, inputs: Iterable[int]) -> QslReport:
    """Report of the input whose speed limit is largest."""
    reports = [qsl_bound(schedule, i) for i in inputs]
    if not reports:
        return QslReport(0.0, 0.0, 0.0, 0.0, schedule.total_T)
    return max(reports, key=lambda r: r.tau_qsl)
