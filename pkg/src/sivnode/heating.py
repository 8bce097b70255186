"""Pulse-train ohmic heating of the nanobeam and its coherence impact.

A single microwave pulse at t0 raises the local temperature by the
two-exponential bump (exp(-(t-t0)/tau_th) - exp(-9(t-t0)/tau_th)), zero
before the pulse; a pulse train superposes bumps.  The bump is normalized to
unit peak so ``delta_t_per_pulse`` is the peak temperature rise of one
isolated pulse.  The dephasing-rate model maps local temperature to an
instantaneous rate; the default uses the single-phonon occupancy of the
orbital gap, with a calibration constant fit to the observed collapse depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import H_GHZ_PER_K
from .decoherence import BathSet, DecouplingSequence, coherence

# peak of (e^-x - e^-9x) sits at x = ln(9)/8
_PEAK_X = math.log(9.0) / 8.0
_PEAK_VALUE = math.exp(-_PEAK_X) - math.exp(-9.0 * _PEAK_X)


@dataclass(frozen=True)
class HeatingParams:
    """tau_thermal: beam rethermalization time (us); delta_t_per_pulse: peak
    temperature rise of one pulse (mK); base_temp: steady-state (mK)."""

    tau_thermal: float
    delta_t_per_pulse: float
    base_temp: float

    def __post_init__(self):
        if min(self.tau_thermal, self.delta_t_per_pulse, self.base_temp) <= 0:
            raise ValueError("all heating parameters must be positive")

    def scaled_to_rabi(self, rabi_mhz: float, reference_rabi_mhz: float) -> "HeatingParams":
        """Pulse impulse scales with dissipated power, i.e. with Rabi^2."""
        factor = (rabi_mhz / reference_rabi_mhz) ** 2
        return HeatingParams(self.tau_thermal, self.delta_t_per_pulse * factor, self.base_temp)


def pulse_bump(dt, tau_thermal):
    """Unit-peak single-pulse temperature response at time dt after the pulse."""
    dt = np.asarray(dt, dtype=float)
    x = np.clip(dt / tau_thermal, 0.0, None)
    out = (np.exp(-x) - np.exp(-9.0 * x)) / _PEAK_VALUE
    return np.where(dt <= 0.0, 0.0, out)


def heating_trace(pulse_times, hp: HeatingParams, t_grid=None):
    """Temperature samples (mK) for a pulse train, plus the trace maximum.

    The default grid spans the sequence window: from t = 0 to the last pulse
    plus one inter-pulse spacing (the spin only dephases while the sequence
    runs).  Returns (t_grid, temperature, t_max).
    """
    pulse_times = np.asarray(sorted(pulse_times), dtype=float)
    if pulse_times.size == 0:
        raise ValueError("need at least one pulse")
    if t_grid is None:
        spacing = pulse_times[0] if pulse_times.size == 1 else pulse_times[1] - pulse_times[0]
        end = pulse_times[-1] + max(spacing, 1e-3)
        t_grid = np.linspace(0.0, end, max(500, 40 * pulse_times.size))
    t_grid = np.asarray(t_grid, dtype=float)
    temp = hp.base_temp + hp.delta_t_per_pulse * np.sum(
        pulse_bump(t_grid[None, :] - pulse_times[:, None], hp.tau_thermal), axis=0
    )
    return t_grid, temp, float(temp.max())


def phonon_occupation_rate(orbital_gap_ghz: float, rate_scale: float = 1.0):
    """Dephasing-rate model: rate = scale * n_BE(h * Delta_gs / k_B T).

    Returns a callable mapping temperature in mK to a rate in 1/us.  This is
    an injection point; any temperature -> rate map can replace it.
    """

    def rate(temp_mk):
        temp_mk = np.asarray(temp_mk, dtype=float)
        x = orbital_gap_ghz / (H_GHZ_PER_K * np.maximum(temp_mk, 1e-9) * 1e-3)
        x = np.clip(x, 1e-12, 500.0)
        return rate_scale / np.expm1(x)

    return rate


def coherence_with_heating(
    seq: DecouplingSequence,
    hp: HeatingParams,
    t2_model,
    baths: BathSet | None = None,
) -> float:
    """Echo amplitude including heating: exp(-int rate(T(t)) dt) times the
    bath-limited coherence.

    t2_model maps temperature (mK) to an instantaneous dephasing rate
    (1/us); the integral runs over the sequence window.
    """
    pulses = seq.pulse_times()
    end = seq.total_time
    grid = np.linspace(0.0, end, max(800, 60 * seq.n_pulses))
    _, temp, _ = heating_trace(pulses, hp, t_grid=grid)
    rates = np.asarray(t2_model(temp), dtype=float)
    chi_heat = float(np.trapz(rates, grid))
    base = coherence(end, seq, baths) if baths is not None else 1.0
    return base * math.exp(-chi_heat)


def rabi_frequency(power_w: float, calibration_mhz_per_sqrt_w: float) -> float:
    """Rabi frequency in MHz for a given drive power, Omega = c * sqrt(P)."""
    if power_w < 0:
        raise ValueError("power must be >= 0")
    return calibration_mhz_per_sqrt_w * math.sqrt(power_w)


# 3 W of drive power gives an 80 MHz Rabi frequency at the device
RABI_CALIBRATION_MHZ_PER_SQRT_W = 80.0 / math.sqrt(3.0)
