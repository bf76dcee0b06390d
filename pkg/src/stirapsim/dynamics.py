"""Time-dependent Hamiltonian assembly and certified Schrodinger propagation.

The equation of motion is d/dt psi = -i H(t) psi (hbar = 1) with the
rotating-wave Hamiltonian

    H(t) = detuning |4><4| + (1/2) sum_i ( Omega_i(t) |i><4| + h.c. ).

Integration is fixed-step classical RK4 on the 4-component complex ODE. Norm
drift is monitored at every step and never corrected: it is the accuracy
diagnostic, and exceeding ``NORM_DRIFT_LIMIT`` is a hard failure. A
convergence certificate (step halving) is available on demand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .pulses import PulseSchedule, rabi_frequencies, simulation_window
from .states import StateVector

#: Hard failure threshold on |norm - 1| during propagation (step too large).
NORM_DRIFT_LIMIT = 1e-6
#: Contractual bound on |norm - 1| at the end of a healthy propagation.
FINAL_NORM_TOL = 1e-9
#: Default number of steps per resolved timescale min(tau, 1/omega0).
STEPS_PER_TIMESCALE = 50
#: Entry-state normalization tolerance.
INITIAL_NORM_TOL = 1e-9


class IntegrationError(RuntimeError):
    """Norm drift exceeded NORM_DRIFT_LIMIT: the step is too large."""


class NumericalBlowupError(IntegrationError):
    """Amplitudes left the representable range (nan/inf)."""


@dataclass(frozen=True)
class PropagatorConfig:
    """Numerical knobs for the propagator.

    step       fixed RK4 step; None selects min(tau, 1/omega0)/STEPS_PER_TIMESCALE
    tolerance  relative local-error target the certificate is compared against
    """

    step: float | None = None
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.step is not None and self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step!r}")


def default_step(sched: PulseSchedule) -> float:
    """Step resolving both the envelope width and the Rabi period."""
    fastest = sched.tau if sched.omega0 == 0 else min(sched.tau, 1.0 / sched.omega0)
    return fastest / STEPS_PER_TIMESCALE


@dataclass(frozen=True)
class HamiltonianSample:
    """4x4 Hermitian matrix of the coupling Hamiltonian at one instant."""

    matrix: np.ndarray


def hamiltonian_at(t: float, sched: PulseSchedule) -> HamiltonianSample:
    """H(t) with entries H[i][4] = Omega_i(t)/2 (i = 1..3) and H[4][4] = detuning."""
    o1, o2, o3 = rabi_frequencies(t, sched)
    h = np.zeros((4, 4), dtype=complex)
    for i, om in enumerate((o1, o2, o3)):
        h[i, 3] = complex(om) / 2.0
        h[3, i] = complex(om).conjugate() / 2.0
    h[3, 3] = sched.detuning
    return HamiltonianSample(matrix=h)


@dataclass(frozen=True)
class Trajectory:
    """Sampled history of one propagation.

    times            strictly increasing sample instants (snapped to the step grid)
    states           complex amplitudes, one row per sample
    rabi             |Omega_1|, |Omega_2|, |Omega_3| per sample
    max_p4           running max of the excited-state population over *every* step
    max_norm_error   running max of |norm - 1| over every step
    """

    times: np.ndarray
    states: np.ndarray
    rabi: np.ndarray
    max_p4: float
    max_norm_error: float

    def index_of(self, t: float) -> int:
        """Index of the sample closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))

    def state_at(self, t: float) -> np.ndarray:
        return self.states[self.index_of(t)]

    def final_state(self) -> StateVector:
        return StateVector(self.states[-1])


CouplingFn = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


def propagate_coupling(
    psi0: StateVector,
    coupling: CouplingFn,
    detuning: float,
    step: float,
    t_start: float,
    t_end: float,
    sample_times: Sequence[float] | np.ndarray | None = None,
) -> Trajectory:
    """Integrate the Schrodinger equation for arbitrary coupling functions.

    ``coupling`` maps an array of times to the three Rabi-frequency arrays.
    This is the generic core behind :func:`propagate`; tests drive it directly
    with constant couplings to compare against closed-form solutions.
    """
    if t_end <= t_start:
        raise ValueError(f"t_end must exceed t_start, got [{t_start!r}, {t_end!r}]")
    if abs(psi0.norm() - 1.0) > INITIAL_NORM_TOL:
        raise ValueError(f"initial state not normalized: |psi0| = {psi0.norm()!r}")

    span = t_end - t_start
    n_steps = max(2, int(round(span / step)))
    n_steps += n_steps % 2  # even count puts a grid node at the window midpoint
    h = span / n_steps

    nodes = t_start + h * np.arange(n_steps + 1)
    halves = t_start + h * (np.arange(n_steps) + 0.5)
    o1n, o2n, o3n = _coupling_tables(coupling, nodes)
    o1h, o2h, o3h = _coupling_tables(coupling, halves)

    sample_idx = _sample_indices(sample_times, t_start, h, n_steps)
    sample_set = {idx: row for row, idx in enumerate(sample_idx)}

    m = len(sample_idx)
    out_states = np.empty((m, 4), dtype=complex)
    a1, a2, a3, a4 = (complex(x) for x in psi0.amplitudes)
    if 0 in sample_set:
        out_states[sample_set[0]] = (a1, a2, a3, a4)

    det = float(detuning)
    max_p4 = abs(a4) ** 2
    max_norm_err = abs(abs(a1) ** 2 + abs(a2) ** 2 + max_p4 + abs(a3) ** 2 - 1.0)

    for k in range(n_steps):
        p1, p2, p3 = o1n[k], o2n[k], o3n[k]
        d4 = -1j * (det * a4 + 0.5 * (p1.conjugate() * a1 + p2.conjugate() * a2
                                      + p3.conjugate() * a3))
        k11 = -0.5j * p1 * a4
        k12 = -0.5j * p2 * a4
        k13 = -0.5j * p3 * a4
        k14 = d4

        p1, p2, p3 = o1h[k], o2h[k], o3h[k]
        b1, b2, b3, b4 = (a1 + 0.5 * h * k11, a2 + 0.5 * h * k12,
                          a3 + 0.5 * h * k13, a4 + 0.5 * h * k14)
        k21 = -0.5j * p1 * b4
        k22 = -0.5j * p2 * b4
        k23 = -0.5j * p3 * b4
        k24 = -1j * (det * b4 + 0.5 * (p1.conjugate() * b1 + p2.conjugate() * b2
                                       + p3.conjugate() * b3))

        b1, b2, b3, b4 = (a1 + 0.5 * h * k21, a2 + 0.5 * h * k22,
                          a3 + 0.5 * h * k23, a4 + 0.5 * h * k24)
        k31 = -0.5j * p1 * b4
        k32 = -0.5j * p2 * b4
        k33 = -0.5j * p3 * b4
        k34 = -1j * (det * b4 + 0.5 * (p1.conjugate() * b1 + p2.conjugate() * b2
                                       + p3.conjugate() * b3))

        p1, p2, p3 = o1n[k + 1], o2n[k + 1], o3n[k + 1]
        b1, b2, b3, b4 = a1 + h * k31, a2 + h * k32, a3 + h * k33, a4 + h * k34
        k41 = -0.5j * p1 * b4
        k42 = -0.5j * p2 * b4
        k43 = -0.5j * p3 * b4
        k44 = -1j * (det * b4 + 0.5 * (p1.conjugate() * b1 + p2.conjugate() * b2
                                       + p3.conjugate() * b3))

        sixth = h / 6.0
        a1 += sixth * (k11 + 2 * k21 + 2 * k31 + k41)
        a2 += sixth * (k12 + 2 * k22 + 2 * k32 + k42)
        a3 += sixth * (k13 + 2 * k23 + 2 * k33 + k43)
        a4 += sixth * (k14 + 2 * k24 + 2 * k34 + k44)

        p4 = abs(a4) ** 2
        if p4 > max_p4:
            max_p4 = p4
        norm_err = abs(abs(a1) ** 2 + abs(a2) ** 2 + abs(a3) ** 2 + p4 - 1.0)
        if norm_err > max_norm_err:
            max_norm_err = norm_err
        if not norm_err <= NORM_DRIFT_LIMIT:
            if math.isnan(norm_err) or math.isinf(norm_err):
                raise NumericalBlowupError(
                    f"non-finite amplitudes at t = {nodes[k + 1]!r}"
                )
            raise IntegrationError(
                f"norm drift {norm_err:.3e} exceeds {NORM_DRIFT_LIMIT} at "
                f"t = {nodes[k + 1]!r}; reduce the step"
            )

        row = sample_set.get(k + 1)
        if row is not None:
            out_states[row] = (a1, a2, a3, a4)

    out_times = nodes[sample_idx]
    co1, co2, co3 = coupling(out_times)
    rabi = np.column_stack([np.abs(co1), np.abs(co2), np.abs(co3)]).astype(float)
    return Trajectory(
        times=out_times,
        states=out_states,
        rabi=rabi,
        max_p4=max_p4,
        max_norm_error=max_norm_err,
    )


def _sample_indices(
    sample_times, t_start: float, h: float, n_steps: int
) -> np.ndarray:
    """Snap requested sample times to step-grid indices (unique, increasing)."""
    if sample_times is None:
        count = min(n_steps, 2000)
        idx = np.unique(np.rint(np.linspace(0, n_steps, count + 1)).astype(int))
        return idx
    req = np.asarray(sample_times, dtype=float)
    if req.ndim != 1 or req.size == 0:
        raise ValueError("sample_times must be a non-empty 1-d sequence")
    idx = np.rint((req - t_start) / h).astype(int)
    if idx.min() < 0 or idx.max() > n_steps:
        raise ValueError("sample_times must lie within [t_start, t_end]")
    return np.unique(idx)


def propagate(
    psi0: StateVector,
    sched: PulseSchedule,
    cfg: PropagatorConfig | None = None,
    t_start: float | None = None,
    t_end: float | None = None,
    sample_times: Sequence[float] | np.ndarray | None = None,
) -> Trajectory:
    """Propagate ``psi0`` under the schedule's pulses.

    The window defaults to :func:`stirapsim.pulses.simulation_window`. Sample
    times are snapped to the nearest step-grid node; the trajectory reports the
    snapped times.
    """
    cfg = cfg or PropagatorConfig()
    if t_start is None or t_end is None:
        w0, w1 = simulation_window(sched)
        t_start = w0 if t_start is None else t_start
        t_end = w1 if t_end is None else t_end
    step = cfg.step if cfg.step is not None else default_step(sched)
    return propagate_coupling(
        psi0,
        lambda ts: rabi_frequencies(ts, sched),
        sched.detuning,
        step,
        t_start,
        t_end,
        sample_times,
    )


def convergence_certificate(
    psi0: StateVector,
    sched: PulseSchedule,
    cfg: PropagatorConfig | None = None,
    t_start: float | None = None,
    t_end: float | None = None,
) -> float:
    """Max absolute change of any final amplitude when the step is halved."""
    cfg = cfg or PropagatorConfig()
    step = cfg.step if cfg.step is not None else default_step(sched)
    if t_start is None or t_end is None:
        t_start, t_end = simulation_window(sched)
    finals = []
    for s in (step, step / 2.0):
        traj = propagate(
            psi0, sched, PropagatorConfig(step=s, tolerance=cfg.tolerance),
            t_start, t_end, sample_times=[t_end],
        )
        finals.append(traj.states[-1])
    return float(np.max(np.abs(finals[0] - finals[1])))


def dark_state_at(t: float, sched: PulseSchedule) -> StateVector:
    """Normalized instantaneous zero-coupling state at time ``t``.

    With the common fields-1,2 envelope Omega(t) (real, >= 0) and the complex
    field-3 coupling Omega_3(t), the exact null vector of H(t) in the coupled
    sector is conj(Omega_3)|C> - Omega |3>, which reduces to the familiar
    real-coupling form inside either process. Raises ValueError when both
    envelopes vanish (between or outside the processes the dark direction is
    not defined).
    """
    o1, o2, o3 = rabi_frequencies(t, sched)
    omega = math.hypot(abs(o1), abs(o2))
    total = omega * omega + abs(o3) ** 2
    if total <= 0.0:
        raise ValueError(f"dark state undefined at t = {t!r}: all couplings vanish")
    # Bright state |C> = cos(chi)|1> + e^{i eta} sin(chi)|2>.
    c1 = math.cos(sched.chi)
    c2 = cmath.exp(1j * sched.eta) * math.sin(sched.chi)
    o3c = complex(o3).conjugate()
    amps = np.array([o3c * c1, o3c * c2, -omega, 0.0], dtype=complex)
    return StateVector(amps / math.sqrt(total))
