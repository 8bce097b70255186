"""SiV level structure under strain, spin-orbit coupling and magnetic field.

The single-manifold Hamiltonian is a 4x4 matrix in the combined orbital/spin
basis {|e_y up>, |e_y dn>, |e_x up>, |e_x dn>}, containing spin-orbit
coupling (lambda), strain (alpha, beta, gamma), an orbital Zeeman term
(quenched by the Ham reduction factor q) and the spin Zeeman term.  All
energies are ordinary frequencies in GHz, fields in Tesla.

The orbital Zeeman term couples to the axial field projection only (the
orbital moment is locked to the symmetry axis); the spin Zeeman term uses the
full field vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import MU_B_GHZ_PER_T

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_EYE2 = np.eye(2, dtype=complex)

# Orbital pseudo-spin operators in the {e_y, e_x} basis.  L_Z generates the
# e_x <-> e_y coupling of both the spin-orbit and orbital-Zeeman terms.
_L_Z = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)


class DegenerateFieldError(ValueError):
    """Raised when an operation requires a nonzero magnetic field."""


@dataclass(frozen=True)
class SivParameters:
    """Spin-orbit, strain and Zeeman parameters of one SiV manifold.

    lambda_so : spin-orbit constant (GHz), half the zero-strain splitting
    strain_alpha, strain_beta, strain_gamma : strain energies (GHz)
    zeeman_orbital : orbital gyromagnetic factor gamma_L (GHz/T)
    zeeman_spin : spin gyromagnetic factor gamma_S (GHz/T)
    ham_reduction : dimensionless quenching factor q of the orbital moment
    strain_susceptibility : GHz frequency shift per unit strain
    """

    lambda_so: float
    strain_alpha: float = 0.0
    strain_beta: float = 0.0
    strain_gamma: float = 0.0
    zeeman_orbital: float = MU_B_GHZ_PER_T
    zeeman_spin: float = 2.0 * MU_B_GHZ_PER_T
    ham_reduction: float = 0.1
    strain_susceptibility: float = 1.7e6

    def __post_init__(self):
        if self.lambda_so <= 0:
            raise ValueError("lambda_so must be positive (got %g)" % self.lambda_so)
        if not 0.0 < self.ham_reduction <= 1.0:
            raise ValueError("ham_reduction must lie in (0, 1]")
        if self.strain_susceptibility <= 0:
            raise ValueError("strain_susceptibility must be positive")

    def with_strain_zx(self, epsilon_zx: float) -> "SivParameters":
        """Parameters for a single-component strain model beta = f * eps_zx."""
        return SivParameters(
            lambda_so=self.lambda_so,
            strain_alpha=0.0,
            strain_beta=self.strain_susceptibility * epsilon_zx,
            strain_gamma=0.0,
            zeeman_orbital=self.zeeman_orbital,
            zeeman_spin=self.zeeman_spin,
            ham_reduction=self.ham_reduction,
            strain_susceptibility=self.strain_susceptibility,
        )


# Appendix-style defaults: lambda is the half-splitting constant, so the
# zero-strain ground splitting is 2*lambda = 50 GHz.
GROUND_DEFAULT = SivParameters(lambda_so=25.0, strain_susceptibility=1.7e6)
EXCITED_DEFAULT = SivParameters(lambda_so=125.0, strain_susceptibility=3.4e6)


@dataclass(frozen=True)
class MagneticField:
    """External field in spherical coordinates about the SiV symmetry axis."""

    magnitude: float
    polar_angle: float = 0.0
    azimuthal_angle: float = 0.0

    def __post_init__(self):
        if self.magnitude < 0:
            raise ValueError("field magnitude must be >= 0")
        if not 0.0 <= self.polar_angle <= math.pi:
            raise ValueError("polar_angle must lie in [0, pi]")

    @property
    def b_z(self) -> float:
        return self.magnitude * math.cos(self.polar_angle)

    @property
    def vector(self) -> np.ndarray:
        s = math.sin(self.polar_angle)
        return self.magnitude * np.array(
            [s * math.cos(self.azimuthal_angle), s * math.sin(self.azimuthal_angle), math.cos(self.polar_angle)]
        )


@dataclass(frozen=True)
class LevelStructure:
    """Sorted eigenfrequencies (GHz) and eigenvectors of one manifold."""

    energies: np.ndarray
    states: np.ndarray  # states[:, i] is the i-th eigenvector


@dataclass(frozen=True)
class TransitionSet:
    """Qubit and spin-conserving optical frequencies (GHz).

    Optical frequencies are quoted relative to the zero-field line center of
    the lower-branch transition; optical_splitting = f_up_up - f_down_down.
    """

    f_qubit: float
    f_up_up: float
    f_down_down: float

    @property
    def optical_splitting(self) -> float:
        return self.f_up_up - self.f_down_down


def build_hamiltonian(params: SivParameters, field: MagneticField) -> np.ndarray:
    """4x4 manifold Hamiltonian (GHz) in {e_y up, e_y dn, e_x up, e_x dn}."""
    lam = params.lambda_so
    a, b, g = params.strain_alpha, params.strain_beta, params.strain_gamma

    h_orb_so = -lam * _L_Z  # combined with S_z below
    h_strain_orb = np.array([[a - b, g], [g, a + b]], dtype=complex)

    # spin-orbit: -lambda * L_z * sigma_z  (opposite sign for the two spins)
    h = np.kron(h_orb_so, _SIGMA_Z) + np.kron(h_strain_orb, _EYE2)

    # orbital Zeeman: q * gamma_L * B_axial * L_z, spin independent
    h += params.ham_reduction * params.zeeman_orbital * field.b_z * np.kron(_L_Z, _EYE2)

    # spin Zeeman: (gamma_S / 2) * B . sigma, full vector
    bx, by, bz = field.vector
    h_spin = 0.5 * params.zeeman_spin * (bx * _SIGMA_X + by * _SIGMA_Y + bz * _SIGMA_Z)
    h += np.kron(_EYE2, h_spin)

    # reorder from kron(orbital, spin) to the documented basis ordering
    # kron(orbital, spin) already yields {e_y up, e_y dn, e_x up, e_x dn}
    return h


def _spin_up_projector(field: MagneticField) -> np.ndarray:
    """Projector onto spin-up along the field (z if the field vanishes)."""
    if field.magnitude == 0:
        n = np.array([0.0, 0.0, 1.0])
    else:
        n = field.vector / field.magnitude
    p_spin = 0.5 * (_EYE2 + n[0] * _SIGMA_X + n[1] * _SIGMA_Y + n[2] * _SIGMA_Z)
    return np.kron(_EYE2, p_spin)


def level_structure(params: SivParameters, field: MagneticField) -> LevelStructure:
    """Diagonalize the manifold Hamiltonian with stable doublet labeling.

    Within each (near-)degenerate doublet, eigenvectors are ordered so the
    state with larger spin-up overlap (along the field direction) comes
    second; this keeps transition naming stable through level crossings and
    at B = 0 where the Kramers doublets are degenerate.
    """
    h = build_hamiltonian(params, field)
    energies, states = np.linalg.eigh(h)
    proj = _spin_up_projector(field)
    order = list(range(4))
    for lo in (0, 2):
        i, j = order[lo], order[lo + 1]
        wi = float(np.real(np.conj(states[:, i]) @ proj @ states[:, i]))
        wj = float(np.real(np.conj(states[:, j]) @ proj @ states[:, j]))
        if wi > wj:
            order[lo], order[lo + 1] = j, i
    return LevelStructure(energies=energies[order], states=states[:, order])


def ground_splitting(params: SivParameters) -> float:
    """Field-free gap between the two orbital doublets, 2*sqrt(b^2+g^2+l^2)."""
    return 2.0 * math.sqrt(
        params.strain_beta**2 + params.strain_gamma**2 + params.lambda_so**2
    )


def strain_from_splitting(delta_gs: float, params: SivParameters) -> float:
    """Invert ground_splitting for the single-component strain eps_zx."""
    half = delta_gs / 2.0
    if half <= params.lambda_so:
        raise ValueError(
            "splitting %g GHz is below the zero-strain value 2*lambda = %g GHz"
            % (delta_gs, 2 * params.lambda_so)
        )
    beta = math.sqrt(half**2 - params.lambda_so**2)
    return beta / params.strain_susceptibility


def _doublet_splittings(params: SivParameters, field: MagneticField) -> tuple[float, float]:
    ls = level_structure(params, field)
    e = ls.energies
    return float(e[1] - e[0]), float(e[3] - e[2])


def transitions(gs: SivParameters, es: SivParameters, field: MagneticField) -> TransitionSet:
    """Qubit frequency and spin-conserving optical lines at a shared field."""
    ls_g = level_structure(gs, field)
    ls_e = level_structure(es, field)
    zero = MagneticField(0.0)
    zpl0 = level_structure(es, zero).energies[:2].mean() - level_structure(gs, zero).energies[:2].mean()
    f_dd = float(ls_e.energies[0] - ls_g.energies[0] - zpl0)
    f_uu = float(ls_e.energies[1] - ls_g.energies[1] - zpl0)
    return TransitionSet(
        f_qubit=float(ls_g.energies[1] - ls_g.energies[0]),
        f_up_up=f_uu,
        f_down_down=f_dd,
    )


def effective_g(params: SivParameters, field: MagneticField) -> float:
    """Effective g-factor of the lower-branch qubit, f_qubit = g*mu_B*B/h."""
    if field.magnitude <= 0:
        raise DegenerateFieldError("effective_g requires a nonzero field")
    f_qubit, _ = _doublet_splittings(params, field)
    return f_qubit / (MU_B_GHZ_PER_T * field.magnitude)


def orbital_composition(params: SivParameters) -> tuple[np.ndarray, np.ndarray]:
    """Zero-field orbital content of the two lower-branch spin states.

    Returns (c_up, c_down); each is a normalized complex pair (a_ex, a_ey)
    giving the |e_x> and |e_y> amplitudes of the lower orbital branch for
    that spin.  The global phase is fixed by making the larger amplitude
    real and positive.
    """
    lam = params.lambda_so
    b, g = params.strain_beta, params.strain_gamma
    d = math.sqrt(b**2 + g**2 + lam**2)

    out = []
    for sign in (+1.0, -1.0):  # spin up carries gamma - i*lambda, spin down the conjugate
        off = g - 1j * sign * lam
        # lower eigenvector of [[-b, off], [off*, +b]] with eigenvalue -d
        if d - b > abs(off) * 1e-12 + 0.0:
            a_ey = -off
            a_ex = d - b
        else:  # b-dominated limit: ground orbital is pure e_y
            a_ey = 1.0 + 0.0j
            a_ex = 0.0 + 0.0j
        v = np.array([a_ex, a_ey], dtype=complex)
        v = v / np.linalg.norm(v)
        anchor = v[0] if abs(v[0]) >= abs(v[1]) else v[1]
        v = v * (abs(anchor) / anchor)
        out.append(v)
    return out[0], out[1]


def strain_sensitivity(
    gs: SivParameters,
    es: SivParameters,
    epsilon_zx: float,
    xi: float,
    b_axial: float,
) -> tuple[float, float]:
    """First-order qubit and optical frequency shifts for a relative strain
    fluctuation xi of the single nonzero component eps_zx.

    Returns (df_mw, df_optical) in GHz, with the closed-form sign convention
    of the source expressions: df_mw > 0 and df_optical < 0 for xi > 0 (the
    two shifts are reported as anticorrelated).  The underlying Hamiltonian
    derivative has magnitude equal to both expressions; see tests.
    """
    if xi < 0:
        raise ValueError("xi must be >= 0")
    beta_g = gs.strain_susceptibility * epsilon_zx
    beta_e = es.strain_susceptibility * epsilon_zx
    d_g = math.sqrt(beta_g**2 + gs.lambda_so**2)
    d_e = math.sqrt(beta_e**2 + es.lambda_so**2)

    df_mw = (
        2.0
        * beta_g**2
        * gs.lambda_so
        * b_axial
        * gs.ham_reduction
        * gs.zeeman_orbital
        / d_g**3
        * xi
    )
    df_optical = (beta_g**2 / d_g - beta_e**2 / d_e) * xi
    return df_mw, df_optical
