"""Pulse envelopes and the two-process counterintuitive schedule.

Produces the three complex Rabi frequencies Omega_1(t), Omega_2(t), Omega_3(t)
for the full sequence. Gaussian envelopes by default; a sin^2 window with
matched area and crossing overlap is available to probe shape robustness.

Timing layout (process pair separated by ``big_t``, pulse half-offset ``t0``):

    process 1 (centered -T/2): field 3 leads at -T/2-t0, fields 1,2 trail
        at -T/2+t0 (counterintuitive: the initially-empty side is coupled
        first).
    process 2 (centered +T/2): fields 1,2 lead at +T/2-t0, field 3 trails
        at +T/2+t0 and carries the constant phase factor e^{+i delta}.

The sign of the field-3 phase factor is fixed so that the bright component of
the qubit returns with amplitude factor e^{-i delta} (the adiabatic-limit map
the analytic oracle encodes); with the opposite sign the realized rotation
angle would be -delta.

Fields 1 and 2 keep identical phases in both processes; their ratio is
cos(chi) : e^{i eta} sin(chi) at every instant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .states import RotationSpec

#: Simulation window extends this many envelope widths past the outermost center.
WINDOW_MARGIN_SIGMAS = 5.0
#: Minimum normalized pump/Stokes envelope cross-correlation (STIRAP overlap).
MIN_ENVELOPE_OVERLAP = 0.3

PULSE_SHAPES = ("gaussian", "sin2")


def envelope(t, center: float, tau: float):
    """Gaussian envelope exp[-(t-center)^2 / 2 tau^2], peak value 1 at t=center.

    Accepts scalar or ndarray ``t``. Requires tau > 0.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau!r}")
    x = np.asarray(t, dtype=float) - center
    out = np.exp(-(x * x) / (2.0 * tau * tau))
    return out if out.ndim else float(out)


def sin2_window(t, center: float, width: float):
    """sin^2-shaped window: cos^2(pi (t-center) / 2 width) inside |t-center| < width."""
    if width <= 0:
        raise ValueError(f"width must be positive, got {width!r}")
    x = np.asarray(t, dtype=float) - center
    out = np.where(
        np.abs(x) < width, np.cos(math.pi * x / (2.0 * width)) ** 2, 0.0
    )
    return out if out.ndim else float(out)


def sin2_matched_params(tau: float, t0: float) -> tuple[float, float]:
    """(half-width, amplitude scale) for a sin^2 window matched to the Gaussian.

    The half-width reproduces the Gaussian envelope value at the pump/Stokes
    crossing midpoint, exp(-t0^2/2 tau^2); the amplitude scale tau*sqrt(2 pi)/w
    reproduces the single-pulse area.
    """
    crossing = math.exp(-(t0 * t0) / (4.0 * tau * tau))
    width = math.pi * t0 / (2.0 * math.acos(crossing))
    return width, tau * math.sqrt(2.0 * math.pi) / width


@dataclass(frozen=True)
class PulseSchedule:
    """Parameters of the two-process pulse sequence (arbitrary units, hbar = 1).

    omega0   peak Rabi frequency of each pulse
    tau      Gaussian width
    t0       half offset between the pump and Stokes pulses of one process
    big_t    separation between the two process centers
    chi/eta  amplitude-mixing angle and relative phase of fields 1, 2
    delta    phase shift of field 3 in the second process (the rotation angle)
    detuning common single-photon detuning of all three fields
    shape    "gaussian" or "sin2" (matched area and crossing overlap)
    """

    omega0: float
    tau: float
    t0: float
    big_t: float
    chi: float
    eta: float
    delta: float
    detuning: float = 0.0
    shape: str = "gaussian"

    def __post_init__(self) -> None:
        if self.omega0 < 0:
            raise ValueError(f"omega0 must be >= 0, got {self.omega0!r}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if self.t0 <= 0:
            raise ValueError(f"t0 must be positive, got {self.t0!r}")
        if self.big_t <= 2 * self.t0:
            raise ValueError(
                f"big_t must exceed 2*t0 so the processes are resolved: "
                f"big_t={self.big_t!r}, t0={self.t0!r}"
            )
        if self.shape not in PULSE_SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; use one of {PULSE_SHAPES}")
        overlap = envelope_overlap(self)
        if overlap <= MIN_ENVELOPE_OVERLAP:
            raise ValueError(
                f"pump/Stokes envelope overlap {overlap:.4f} <= {MIN_ENVELOPE_OVERLAP} "
                f"(pulses within one process must overlap significantly)"
            )

    def rotation_spec(self) -> RotationSpec:
        """Rotation axis/angle this schedule targets in the adiabatic limit."""
        return RotationSpec(chi=self.chi, eta=self.eta, delta=self.delta)

    def centers(self) -> dict[str, float]:
        """Envelope centers keyed by role: fields (1,2) and 3 in each process."""
        half = self.big_t / 2.0
        return {
            "process1_field3": -half - self.t0,
            "process1_fields12": -half + self.t0,
            "process2_fields12": half - self.t0,
            "process2_field3": half + self.t0,
        }

    def _single_envelope(self, t, center: float):
        if self.shape == "sin2":
            width, scale = sin2_matched_params(self.tau, self.t0)
            return scale * sin2_window(t, center, width)
        return envelope(t, center, self.tau)


def envelope_overlap(sched: PulseSchedule) -> float:
    """Normalized cross-correlation of the pump and Stokes envelopes of one process.

    For Gaussians this is exp(-(2 t0)^2 / 4 tau^2) in closed form; other shapes
    are integrated numerically on a dense grid.
    """
    if sched.shape == "gaussian":
        return math.exp(-(2.0 * sched.t0) ** 2 / (4.0 * sched.tau**2))
    width, _ = sin2_matched_params(sched.tau, sched.t0)
    half_span = width + sched.t0
    t = np.linspace(-half_span, half_span, 4001)
    pump = sin2_window(t, sched.t0, width)
    stokes = sin2_window(t, -sched.t0, width)
    return float(np.trapezoid(pump * stokes, t) / np.trapezoid(pump * pump, t))


def simulation_window(sched: PulseSchedule) -> tuple[float, float]:
    """Time span covering both processes with margin for the envelope tails."""
    margin = WINDOW_MARGIN_SIGMAS * sched.tau
    if sched.shape == "sin2":
        width, _ = sin2_matched_params(sched.tau, sched.t0)
        margin = max(margin, width)
    half = sched.big_t / 2.0 + sched.t0 + margin
    return -half, half


def rabi_frequencies(t, sched: PulseSchedule):
    """The three complex Rabi frequencies at time(s) ``t``.

    Returns (Omega_1, Omega_2, Omega_3); each is a scalar for scalar ``t`` and
    an ndarray for array ``t``. Omega_1 and Omega_2 share the common envelope
    split as cos(chi) and e^{i eta} sin(chi); Omega_3 sums the two Stokes/pump
    pulses of field 3 with the second one carrying e^{+i delta}.
    """
    c = sched.centers()
    common = sched.omega0 * (
        sched._single_envelope(t, c["process1_fields12"])
        + sched._single_envelope(t, c["process2_fields12"])
    )
    omega3 = sched.omega0 * (
        sched._single_envelope(t, c["process1_field3"])
        + cmath.exp(1j * sched.delta) * sched._single_envelope(t, c["process2_field3"])
    )
    omega1 = common * math.cos(sched.chi)
    omega2 = common * cmath.exp(1j * sched.eta) * math.sin(sched.chi)
    return omega1, omega2, omega3
