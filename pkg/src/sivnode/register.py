"""Electron(SiV) x 13C two-spin dynamics under timed MW/RF pulse programs.

Model: electron pseudo-spin-1/2 in its rotating frame; secular hyperfine
coupling conditions the nuclear precession on the electron state,

    H = omega_L I_z + S_z (x) (a_par I_z + a_perp I_x),   S_z = +-1/2,

so the two electron branches see (omega_L +- a_par/2) I_z +- (a_perp/2) I_x.
Frequencies are in MHz internally (parameters quoted in kHz), times in
microseconds, phases 2*pi*f*t.  Basis ordering is kron(electron, nuclear):
{up-up, up-dn, dn-up, dn-dn}.  Ideal MW pi-pulses are instantaneous electron
rotations; finite pulses add a resonant drive term for their duration.  RF
pulses drive the nucleus in the rotating-wave approximation, branch by
branch.

The default hyperfine parameters are calibrated (see
scripts/calibrate_hyperfine.py) so that the 8-pulse gate timings match the
measured register: the maximally entangling point at half-spacing 2.859 us,
the initialization timing at 2.857 us, and an unconditional point at
inter-pulse spacing 0.731 us.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


class BlockStructureError(ValueError):
    """Sequence does not return the electron to its branch (odd flip count)."""


@dataclass(frozen=True)
class HyperfineParams:
    """Secular/transverse hyperfine components and nuclear Larmor, in kHz."""

    a_parallel: float
    a_perp: float
    nuclear_larmor: float

    def __post_init__(self):
        if self.nuclear_larmor < 0:
            raise ValueError("nuclear_larmor must be >= 0")

    @property
    def omega_up_mhz(self) -> float:
        """Precession frequency conditioned on electron up (MHz)."""
        return math.hypot(self.nuclear_larmor + self.a_parallel / 2.0, self.a_perp / 2.0) * 1e-3

    @property
    def omega_down_mhz(self) -> float:
        return math.hypot(self.nuclear_larmor - self.a_parallel / 2.0, self.a_perp / 2.0) * 1e-3


def _load_calibrated() -> HyperfineParams:
    with resources.files("sivnode.fixtures").joinpath("hyperfine_calibration.json").open() as fh:
        data = json.load(fh)
    return HyperfineParams(
        a_parallel=data["a_parallel_khz"],
        a_perp=data["a_perp_khz"],
        nuclear_larmor=data["nuclear_larmor_khz"],
    )


def calibrated_hyperfine() -> HyperfineParams:
    """Pinned output of the pre-build timing calibration."""
    return _load_calibrated()


# --- pulse program -------------------------------------------------------


@dataclass(frozen=True)
class Delay:
    duration: float  # us


@dataclass(frozen=True)
class MwPiPulse:
    """Ideal instantaneous electron pi rotation about (cos phase, sin phase, 0)."""

    phase: float = 0.0


@dataclass(frozen=True)
class MwPulse:
    """Finite resonant electron drive: rotation `angle` at Rabi angle/2pi/duration."""

    angle: float
    phase: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be >= 0")


@dataclass(frozen=True)
class RfPulse:
    """Direct nuclear drive: frequency/rabi in kHz, duration in us."""

    frequency: float
    rabi: float
    duration: float
    phase: float = 0.0

    def __post_init__(self):
        if self.duration < 0 or self.rabi < 0:
            raise ValueError("rf duration and rabi must be >= 0")


@dataclass(frozen=True)
class TwoSpinSequence:
    events: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    @property
    def total_duration(self) -> float:
        return sum(getattr(e, "duration", 0.0) for e in self.events)

    def to_json(self) -> str:
        rows = []
        for e in self.events:
            if isinstance(e, Delay):
                rows.append({"type": "delay", "duration_us": e.duration})
            elif isinstance(e, MwPiPulse):
                rows.append({"type": "mw_pi", "phase_rad": e.phase})
            elif isinstance(e, MwPulse):
                rows.append(
                    {"type": "mw", "angle_rad": e.angle, "phase_rad": e.phase, "duration_us": e.duration}
                )
            elif isinstance(e, RfPulse):
                rows.append(
                    {
                        "type": "rf",
                        "frequency_khz": e.frequency,
                        "rabi_khz": e.rabi,
                        "duration_us": e.duration,
                        "phase_rad": e.phase,
                    }
                )
            else:
                raise TypeError("unknown event %r" % (e,))
        return json.dumps({"events": rows}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TwoSpinSequence":
        rows = json.loads(text)["events"]
        events = []
        for r in rows:
            kind = r["type"]
            if kind == "delay":
                events.append(Delay(r["duration_us"]))
            elif kind == "mw_pi":
                events.append(MwPiPulse(r.get("phase_rad", 0.0)))
            elif kind == "mw":
                events.append(MwPulse(r["angle_rad"], r.get("phase_rad", 0.0), r["duration_us"]))
            elif kind == "rf":
                events.append(
                    RfPulse(r["frequency_khz"], r["rabi_khz"], r["duration_us"], r.get("phase_rad", 0.0))
                )
            else:
                raise ValueError("unknown event type %r" % kind)
        return cls(tuple(events))


def cpmg_sequence(n_pulses: int, tau_half: float, phases=None) -> TwoSpinSequence:
    """tau - pi - (2tau - pi)^(n-1) - tau with inter-pulse spacing 2*tau_half."""
    if n_pulses <= 0:
        raise ValueError("n_pulses must be positive")
    if phases is None:
        phases = [0.0] * n_pulses
    events = [Delay(tau_half)]
    for k in range(n_pulses):
        events.append(MwPiPulse(phases[k]))
        events.append(Delay(2 * tau_half if k < n_pulses - 1 else tau_half))
    return TwoSpinSequence(tuple(events))


def xy8_sequence(n_repeats: int, tau_half: float) -> TwoSpinSequence:
    base = [0.0, math.pi / 2, 0.0, math.pi / 2, math.pi / 2, 0.0, math.pi / 2, 0.0]
    return cpmg_sequence(8 * n_repeats, tau_half, phases=base * n_repeats)


# --- propagation ----------------------------------------------------------


def _su2_rotation(axis, angle) -> np.ndarray:
    """exp(-i angle/2 axis.sigma) for a unit axis."""
    ax, ay, az = axis
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return c * _I2 - 1j * s * (ax * _SX + ay * _SY + az * _SZ)


def _branch_axes(hf: HyperfineParams):
    """(axis, frequency MHz) of the conditioned nuclear precession per branch."""
    out = []
    for sign in (+1.0, -1.0):
        fz = (hf.nuclear_larmor + sign * hf.a_parallel / 2.0) * 1e-3
        fx = sign * hf.a_perp / 2.0 * 1e-3
        w = math.hypot(fz, fx)
        axis = (fx / w, 0.0, fz / w) if w > 0 else (0.0, 0.0, 1.0)
        out.append((axis, w))
    return out[0], out[1]


def _free_blocks(hf: HyperfineParams, duration: float):
    (axis_up, w_up), (axis_dn, w_dn) = _branch_axes(hf)
    u_up = _su2_rotation(axis_up, 2.0 * math.pi * w_up * duration)
    u_dn = _su2_rotation(axis_dn, 2.0 * math.pi * w_dn * duration)
    return u_up, u_dn


def _block_diag(u_up, u_dn) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = u_up
    out[2:, 2:] = u_dn
    return out


def _free_hamiltonian(hf: HyperfineParams) -> np.ndarray:
    """H_free in MHz for matrix-exponential propagation of driven events."""
    iz, ix = 0.5 * _SZ, 0.5 * _SX
    p_up = np.diag([1.0, 0.0]).astype(complex)
    p_dn = np.diag([0.0, 1.0]).astype(complex)
    h_up = (hf.nuclear_larmor + hf.a_parallel / 2.0) * 1e-3 * iz + hf.a_perp / 2.0 * 1e-3 * ix
    h_dn = (hf.nuclear_larmor - hf.a_parallel / 2.0) * 1e-3 * iz - hf.a_perp / 2.0 * 1e-3 * ix
    return np.kron(p_up, h_up) + np.kron(p_dn, h_dn)


def propagate(seq: TwoSpinSequence, hf: HyperfineParams) -> np.ndarray:
    """Unitary of the full pulse program (product of piecewise-constant steps)."""
    from scipy.linalg import expm

    u = np.eye(4, dtype=complex)
    t_abs = 0.0
    for event in seq.events:
        if isinstance(event, Delay):
            step = _block_diag(*_free_blocks(hf, event.duration))
            t_abs += event.duration
        elif isinstance(event, MwPiPulse):
            axis = (math.cos(event.phase), math.sin(event.phase), 0.0)
            step = np.kron(_su2_rotation(axis, math.pi), _I2)
        elif isinstance(event, MwPulse):
            if event.duration == 0.0:
                axis = (math.cos(event.phase), math.sin(event.phase), 0.0)
                step = np.kron(_su2_rotation(axis, event.angle), _I2)
            else:
                rabi_mhz = event.angle / (2.0 * math.pi * event.duration)
                drive = (
                    0.5
                    * rabi_mhz
                    * (math.cos(event.phase) * _SX + math.sin(event.phase) * _SY)
                )
                h = _free_hamiltonian(hf) + np.kron(drive, _I2)
                step = expm(-2j * math.pi * h * event.duration)
                t_abs += event.duration
        elif isinstance(event, RfPulse):
            step = _rf_step(event, hf, t_abs)
            t_abs += event.duration
        else:
            raise TypeError("unknown event %r" % (event,))
        u = step @ u
    return u


def _rf_step(event: RfPulse, hf: HyperfineParams, t_start: float) -> np.ndarray:
    """RWA nuclear drive, applied branch by branch in the conditioned eigenbasis.

    Each electron branch sees a two-level nuclear transition at its
    conditioned frequency; the drive acts with detuning Delta_s = f_s - f_rf
    and Rabi frequency `rabi`.  Valid for drives slow against the hyperfine
    splitting (the operating regime for direct RF control).
    """
    f_rf = event.frequency * 1e-3  # MHz
    rabi = event.rabi * 1e-3
    (axis_up, w_up), (axis_dn, w_dn) = _branch_axes(hf)
    blocks = []
    for axis, w_s in ((axis_up, w_up), (axis_dn, w_dn)):
        # rotate the branch quantization axis onto z
        tilt = math.atan2(axis[0], axis[2])
        r = _su2_rotation((0.0, 1.0, 0.0), tilt)
        delta = w_s - f_rf
        phase = event.phase + 2.0 * math.pi * f_rf * t_start
        h_rot = 0.5 * delta * _SZ + 0.5 * rabi * (
            math.cos(phase) * _SX + math.sin(phase) * _SY
        )
        w_gen = math.sqrt(delta**2 + rabi**2)
        if w_gen > 0:
            n = (
                rabi * math.cos(phase) / w_gen,
                rabi * math.sin(phase) / w_gen,
                delta / w_gen,
            )
            u_rot = _su2_rotation(n, 2.0 * math.pi * w_gen * event.duration)
        else:
            u_rot = _I2.copy()
        # undo the rotating frame accumulated during the pulse
        frame = _su2_rotation((0.0, 0.0, 1.0), 2.0 * math.pi * f_rf * event.duration)
        blocks.append(r @ frame @ u_rot @ r.conj().T)
    return _block_diag(*blocks)


# --- gate analysis ---------------------------------------------------------


@dataclass(frozen=True)
class GateReport:
    """Axis-angle decomposition of the electron-conditioned nuclear rotations.

    entangling_phi is half the relative rotation angle of the two
    conditionals, in [0, pi/2]; pi/2 marks a maximally entangling gate
    (antiparallel pi/2 rotations, or the 2pi/3 construction about the tilted
    axis pair).
    """

    axis_up: np.ndarray
    axis_down: np.ndarray
    angle_up: float
    angle_down: float
    entangling_phi: float
    unitary: np.ndarray

    def to_json(self) -> str:
        return json.dumps(
            {
                "axis_up": [float(x) for x in self.axis_up],
                "axis_down": [float(x) for x in self.axis_down],
                "angle_up_rad": self.angle_up,
                "angle_down_rad": self.angle_down,
                "entangling_phi_rad": self.entangling_phi,
                "unitary_real": np.real(self.unitary).tolist(),
                "unitary_imag": np.imag(self.unitary).tolist(),
            },
            indent=2,
        )


def axis_angle(u: np.ndarray) -> tuple[np.ndarray, float]:
    """Decompose a 2x2 unitary as exp(i delta) R_n^phi, with angle in [0, pi].

    Rotations follow the register's reporting convention
    R_n^phi = cos(phi/2) I + i sin(phi/2) n.sigma, under which the printed
    entangling block is a +2pi/3 rotation about (+sqrt(2), 0, 1)/sqrt(3).
    """
    det = np.linalg.det(u)
    v = u / np.sqrt(det)
    cos_half = np.clip(np.real(np.trace(v)) / 2.0, -1.0, 1.0)
    # fix the SU(2) sign so the rotation angle lands in [0, pi]
    if cos_half < 0:
        v = -v
        cos_half = -cos_half
    angle = 2.0 * math.acos(cos_half)
    nx = np.imag(v[0, 1] + v[1, 0]) / 2.0
    ny = np.real(v[0, 1] - v[1, 0]) / 2.0
    nz = np.imag(v[0, 0] - v[1, 1]) / 2.0
    norm = math.sqrt(nx * nx + ny * ny + nz * nz)
    if norm < 1e-12:
        return np.array([0.0, 0.0, 1.0]), 0.0
    return np.array([nx, ny, nz]) / norm, angle


def relative_rotation_angle(u_up: np.ndarray, u_dn: np.ndarray) -> float:
    """Rotation angle of U_up U_dn^dagger, folded into [0, pi]."""
    w = u_up @ u_dn.conj().T
    w = w / np.sqrt(np.linalg.det(w))
    cos_half = np.clip(abs(np.real(np.trace(w)) / 2.0), 0.0, 1.0)
    return 2.0 * math.acos(cos_half)


def conditional_rotation(seq: TwoSpinSequence, hf: HyperfineParams) -> GateReport:
    """Axis-angle report of the nuclear conditionals of a block-diagonal gate."""
    u = propagate(seq, hf)
    off = max(np.abs(u[:2, 2:]).max(), np.abs(u[2:, :2]).max())
    if off > 1e-10:
        raise BlockStructureError(
            "sequence leaves electron branches mixed (off-block norm %.2e); "
            "an odd number of ideal pi-pulses cannot be decomposed" % off
        )
    u_up, u_dn = u[:2, :2], u[2:, 2:]
    axis_up, angle_up = axis_angle(u_up)
    axis_dn, angle_dn = axis_angle(u_dn)
    phi = relative_rotation_angle(u_up, u_dn) / 2.0
    return GateReport(axis_up, axis_dn, angle_up, angle_dn, phi, u)


def find_resonances(hf: HyperfineParams, n_pulses: int, tau_range) -> np.ndarray:
    """Electron <S_x> after an n-pulse train vs half-spacing tau.

    The electron starts in |+> with the nucleus maximally mixed; the signal
    is Re tr(U_up^dag U_dn)/2, signed so full-contrast flips (-1) are
    distinguishable from multi-nucleus-style collapse to 0.  Returns an
    array of (tau, signal) rows; resonances are minima.
    """
    rows = []
    for tau in np.asarray(tau_range, dtype=float):
        u = propagate(cpmg_sequence(n_pulses, tau), hf)
        signal = 0.5 * np.real(np.trace(u[:2, :2].conj().T @ u[2:, 2:]))
        rows.append((tau, signal))
    return np.asarray(rows)


# --- composite gates -------------------------------------------------------

# Entangling block printed for the initialization construction: a rotation by
# 2pi/3 about the axis pair (+-sqrt(2), 0, 1)/sqrt(3), in the sign convention
# that reproduces the printed composite matrix.  (The source misprints the
# (2,2) entry as (1-i)/sqrt(2); unitarity forces (1-i)/2.)
R_ENTANGLE_IDEAL = np.array(
    [
        [(1 + 1j) / 2, 1j / math.sqrt(2), 0, 0],
        [1j / math.sqrt(2), (1 - 1j) / 2, 0, 0],
        [0, 0, (1 + 1j) / 2, -1j / math.sqrt(2)],
        [0, 0, -1j / math.sqrt(2), (1 - 1j) / 2],
    ],
    dtype=complex,
)

INIT_TARGET = np.array(
    [
        [0, 0, -(1 + 1j) / 2, -1 / math.sqrt(2)],
        [1j / math.sqrt(2), -(1 + 1j) / 2, 0, 0],
        [0, 0, -(1 - 1j) / 2, -1j / math.sqrt(2)],
        [1 / math.sqrt(2), (1 - 1j) / 2, 0, 0],
    ],
    dtype=complex,
)


def compose_init_ideal() -> np.ndarray:
    """Initialization gate from two entangling blocks and electron pulses.

    The composition (pi/2)_(-x) -> R -> (pi/2)_y -> R (time order) reproduces
    the printed composite matrix exactly; see tests for the entry-wise check.
    """
    half_y = np.kron(_su2_rotation((0.0, 1.0, 0.0), math.pi / 2.0), _I2)
    half_mx = np.kron(_su2_rotation((-1.0, 0.0, 0.0), math.pi / 2.0), _I2)
    return R_ENTANGLE_IDEAL @ half_y @ R_ENTANGLE_IDEAL @ half_mx


def init_sequence(tau_init: float, n_pulses: int = 8) -> TwoSpinSequence:
    """Pulse realization of the initialization gate: each entangling block is
    an n-pulse train at the initialization half-spacing."""
    train = cpmg_sequence(n_pulses, tau_init).events
    return TwoSpinSequence(
        (MwPulse(math.pi / 2.0, math.pi),) + train + (MwPulse(math.pi / 2.0, math.pi / 2.0),) + train
    )


def init_gate(hf: HyperfineParams, tau_init: float, n_pulses: int = 8):
    """Simulated initialization gate at the given half-spacing.

    Returns (unitary, polarizations): the populations of nuclear |dn> after
    acting on |up,up> and |up,dn> (the gate should pump the nucleus to |dn>
    for an electron prepared |up>, regardless of the nuclear input).
    """
    u = propagate(init_sequence(tau_init, n_pulses), hf)
    pol = []
    for col in (0, 1):  # inputs |up,up>, |up,dn>
        out = u[:, col]
        p_dn = abs(out[1]) ** 2 + abs(out[3]) ** 2
        pol.append(float(p_dn))
    return u, pol


def nuclear_ramsey(
    hf: HyperfineParams,
    wait_times,
    t2_star_us: float,
    envelope: str = "gaussian",
    electron_state: str = "up",
):
    """Ramsey signal of the nucleus between two unconditional pi/2 gates.

    The free precession runs at the electron-conditioned frequency; the
    dephasing envelope (Gaussian by default, exponential by flag) multiplies
    the oscillating part.  Returns signal samples in [0, 1].
    """
    if envelope not in ("gaussian", "exponential"):
        raise ValueError("envelope must be 'gaussian' or 'exponential'")
    (axis_up, w_up), (axis_dn, w_dn) = _branch_axes(hf)
    w = w_up if electron_state == "up" else w_dn
    axis = axis_up if electron_state == "up" else axis_dn
    half = _su2_rotation((0.0, 1.0, 0.0), math.pi / 2.0)
    out = []
    for t in np.asarray(wait_times, dtype=float):
        u = half @ _su2_rotation(axis, 2.0 * math.pi * w * t) @ half
        p_dn = abs(u[1, 1]) ** 2  # start |dn>, read |dn>
        if envelope == "gaussian":
            env = math.exp(-((t / (t2_star_us)) ** 2))
        else:
            env = math.exp(-t / t2_star_us)
        out.append(0.5 + (p_dn - 0.5) * env)
    return np.asarray(out)


def rf_rabi(hf: HyperfineParams, rabi_khz: float, durations, detuning_khz: float = 0.0):
    """Nuclear flip probability under a direct RF tone (two-level Rabi).

    Resonant drive flips with probability sin^2(pi * Omega * t); a detuned
    drive reaches at most Omega^2/(Omega^2 + Delta^2).
    """
    if rabi_khz < 0:
        raise ValueError("rabi must be >= 0")
    durations = np.asarray(durations, dtype=float)
    omega = rabi_khz * 1e-3  # MHz
    delta = detuning_khz * 1e-3
    w_gen = math.sqrt(omega**2 + delta**2)
    if w_gen == 0:
        return np.zeros_like(durations)
    amp = omega**2 / w_gen**2
    return amp * np.sin(math.pi * w_gen * durations) ** 2


def rf_coherence_penalty(
    rabi_khz: float,
    pulse_duration_us: float,
    reference_rabi_khz: float = 1.0,
    reference_duration_us: float = 100.0,
    reference_loss: float = 0.2,
) -> float:
    """Fractional SiV echo-contrast retained after an RF pulse.

    RF dissipation heats the beam like MW drive does; the dephasing integral
    scales with the deposited energy, i.e. with Omega_RF^2 * duration.  The
    scale is calibrated so the reference point (1 kHz, 100 us) loses 20 %.
    """
    chi_ref = -math.log(1.0 - reference_loss)
    chi = chi_ref * (rabi_khz / reference_rabi_khz) ** 2 * (
        pulse_duration_us / reference_duration_us
    )
    return math.exp(-chi)
