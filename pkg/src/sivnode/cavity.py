"""Spin-dependent cavity reflection: input-output model, Purcell broadening,
cooperativity and spectrum fitting.

All rates and frequencies in this module are stored as *angular* frequencies
(rad/ns, i.e. 2*pi*GHz).  Constructors take ordinary GHz through
:meth:`CavityAtomParams.from_ordinary` so a quoted "kappa = 2*pi x 33 GHz"
enters as ``from_ordinary(kappa_total=33, ...)``; this keeps factors of 2*pi
out of user code entirely.  The reflection formula itself is homogeneous in
the rates, so both conventions give identical R(omega) as long as they are
not mixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fitting import FitError, FitResult, least_squares_fit

TWO_PI = 2.0 * math.pi

_PARAM_NAMES = ("kappa_in", "kappa_total", "omega_cavity", "omega_atom", "g_coupling", "gamma_atom")


@dataclass(frozen=True)
class CavityAtomParams:
    """Atom-cavity parameters, angular frequencies in rad/ns (2*pi*GHz)."""

    kappa_in: float
    kappa_total: float
    omega_cavity: float
    omega_atom: float
    g_coupling: float
    gamma_atom: float

    def __post_init__(self):
        if not 0 < self.kappa_in <= self.kappa_total:
            raise ValueError("require 0 < kappa_in <= kappa_total")
        if self.g_coupling < 0:
            raise ValueError("g_coupling must be >= 0")
        if self.gamma_atom <= 0:
            raise ValueError("gamma_atom must be positive")

    @classmethod
    def from_ordinary(cls, kappa_in, kappa_total, omega_cavity, omega_atom, g_coupling, gamma_atom):
        """Build from ordinary frequencies in GHz (each value is multiplied by 2*pi)."""
        return cls(
            kappa_in=TWO_PI * kappa_in,
            kappa_total=TWO_PI * kappa_total,
            omega_cavity=TWO_PI * omega_cavity,
            omega_atom=TWO_PI * omega_atom,
            g_coupling=TWO_PI * g_coupling,
            gamma_atom=TWO_PI * gamma_atom,
        )

    def detuned_atom(self, omega_atom: float) -> "CavityAtomParams":
        return replace(self, omega_atom=omega_atom)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in _PARAM_NAMES])


@dataclass(frozen=True)
class SpectrumTrace:
    """Reflectance samples over a strictly increasing frequency grid."""

    frequencies: np.ndarray  # angular, rad/ns
    reflectance: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        r = np.asarray(self.reflectance, dtype=float)
        if f.shape != r.shape:
            raise ValueError("frequencies and reflectance must have equal length")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if self.sigma is not None and np.asarray(self.sigma).shape != f.shape:
            raise ValueError("sigma must match the grid length")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "reflectance", r)
        if self.sigma is not None:
            object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))

    def to_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frequency_ghz", "reflectance", "sigma"])
            sig = self.sigma if self.sigma is not None else np.zeros_like(self.frequencies)
            for f, r, s in zip(self.frequencies / TWO_PI, self.reflectance, sig):
                writer.writerow(["%.12g" % f, "%.12g" % r, "%.12g" % s])

    @classmethod
    def from_csv(cls, path):
        import csv

        freqs, refl, sig = [], [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                freqs.append(TWO_PI * float(row[0]))
                refl.append(float(row[1]))
                sig.append(float(row[2]))
        sigma = np.array(sig)
        if np.all(sigma == 0):
            sigma = None
        return cls(np.array(freqs), np.array(refl), sigma)


def _response_denominator(omega, p: CavityAtomParams):
    return (
        1j * (omega - p.omega_cavity)
        + p.kappa_total
        + p.g_coupling**2 / (1j * (omega - p.omega_atom) + p.gamma_atom)
    )


def reflectance(omega, p: CavityAtomParams):
    """R(omega) = |1 - 2*kappa_in / (i(w-wc) + kappa + g^2/(i(w-wa)+gamma))|^2.

    Accepts scalar or array omega (angular).  Values may exceed 1 by at most
    unit-amplitude roundoff; anything above 1 + 1e-9 would indicate a bug.
    """
    amp = 1.0 - 2.0 * p.kappa_in / _response_denominator(omega, p)
    return np.abs(amp) ** 2


def purcell_linewidth(p: CavityAtomParams) -> float:
    """Cavity-broadened atomic linewidth (angular), Lorentzian in detuning."""
    delta = p.omega_cavity - p.omega_atom
    lorentz = 1.0 / (1.0 + 4.0 * delta**2 / p.kappa_total**2)
    return p.gamma_atom + 4.0 * p.g_coupling**2 / p.kappa_total * lorentz


def cooperativity(p: CavityAtomParams) -> float:
    """C = 4 g^2 / (kappa_total * gamma); > 1 marks deterministic interaction."""
    return 4.0 * p.g_coupling**2 / (p.kappa_total * p.gamma_atom)


def is_deterministic(p: CavityAtomParams) -> bool:
    return cooperativity(p) > 1.0


def spin_spectrum(p_up: CavityAtomParams, p_down: CavityAtomParams, grid):
    """Reflection traces for both spin states plus their contrast |R_up-R_dn|.

    p_up and p_down must differ only in omega_atom.
    """
    if replace(p_up, omega_atom=0.0) != replace(p_down, omega_atom=0.0):
        raise ValueError("p_up and p_down may differ only in omega_atom")
    grid = np.asarray(grid, dtype=float)
    r_up = reflectance(grid, p_up)
    r_down = reflectance(grid, p_down)
    contrast = np.abs(r_up - r_down)
    return SpectrumTrace(grid, r_up), SpectrumTrace(grid, r_down), contrast


def optimal_probe(p_up: CavityAtomParams, p_down: CavityAtomParams, grid):
    """Probe frequency of maximum spin contrast on the grid.

    Ties are broken toward the midpoint of the two atomic frequencies.
    Returns (f_probe, peak_contrast, degenerate_flag); the flag marks the
    zero-contrast case of identical transitions.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("optimal_probe requires a non-empty grid")
    _, _, contrast = spin_spectrum(p_up, p_down, grid)
    peak = float(contrast.max())
    candidates = np.flatnonzero(contrast >= peak * (1.0 - 1e-12))
    midpoint = 0.5 * (p_up.omega_atom + p_down.omega_atom)
    best = candidates[np.argmin(np.abs(grid[candidates] - midpoint))]
    degenerate = peak < 1e-12
    return float(grid[best]), peak, degenerate


def _reflectance_jacobian(omega, p_vec):
    """Analytic d|A|^2/dp for A = 1 - 2*kappa_in/D(omega)."""
    kappa_in, kappa_tot, omega_c, omega_a, g, gamma = p_vec
    atom = 1j * (omega - omega_a) + gamma
    d = 1j * (omega - omega_c) + kappa_tot + g**2 / atom
    a = 1.0 - 2.0 * kappa_in / d
    dd = {
        "kappa_in": np.zeros_like(d),
        "kappa_total": np.ones_like(d),
        "omega_cavity": -1j * np.ones_like(d),
        "omega_atom": 1j * g**2 / atom**2,
        "g_coupling": 2.0 * g / atom,
        "gamma_atom": -(g**2) / atom**2,
    }
    jac = np.empty((np.size(omega), len(_PARAM_NAMES)))
    for col, name in enumerate(_PARAM_NAMES):
        if name == "kappa_in":
            da = -2.0 / d
        else:
            da = 2.0 * kappa_in / d**2 * dd[name]
        jac[:, col] = 2.0 * np.real(np.conj(a) * da)
    return jac


def fit_spectrum(trace: SpectrumTrace, initial: CavityAtomParams, frozen=()) -> tuple[CavityAtomParams, float]:
    """Weighted least-squares fit of the reflection model to a trace.

    frozen is an iterable of parameter names held at their initial values
    (the measurement workflow fits kappa on a far-detuned trace first, then
    freezes kappa and gamma to extract g on resonance).  Raises FitError on
    non-convergence or degenerate (constant) data.
    """
    frozen = set(frozen)
    unknown = frozen - set(_PARAM_NAMES)
    if unknown:
        raise ValueError("unknown parameter names in frozen mask: %s" % sorted(unknown))
    if trace.frequencies.size < 5:
        raise ValueError("fit requires at least 5 points")
    if np.ptp(trace.reflectance) < 1e-12:
        raise FitError("degenerate trace: reflectance is constant")

    weights = 1.0 / trace.sigma if trace.sigma is not None else np.ones_like(trace.reflectance)
    free_idx = [i for i, n in enumerate(_PARAM_NAMES) if n not in frozen]
    if not free_idx:
        raise ValueError("all parameters frozen")
    base = initial.as_array()

    def assemble(x):
        vec = base.copy()
        vec[free_idx] = x
        return vec

    def residual(x):
        vec = assemble(x)
        amp = 1.0 - 2.0 * vec[0] / (
            1j * (trace.frequencies - vec[2])
            + vec[1]
            + vec[4] ** 2 / (1j * (trace.frequencies - vec[3]) + vec[5])
        )
        return (np.abs(amp) ** 2 - trace.reflectance) * weights

    def jacobian(x):
        jac = _reflectance_jacobian(trace.frequencies, assemble(x))
        return jac[:, free_idx] * weights[:, None]

    result: FitResult = least_squares_fit(residual, base[free_idx], jac=jacobian)
    vec = assemble(result.params)
    fitted = CavityAtomParams(*vec)
    return fitted, result.residual
