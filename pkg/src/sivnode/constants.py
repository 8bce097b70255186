"""Shared physical constants.

All spin-model energies are ordinary frequencies in GHz; magnetic fields in
Tesla. Cavity-QED quantities are stored as angular frequencies (see
:mod:`sivnode.cavity`).
"""

# Bohr magneton as an ordinary frequency per field, h*f = mu_B*B
MU_B_GHZ_PER_T = 13.996  # GHz/T

# Nuclear magneton and 13C gyromagnetic ratio (ordinary frequency)
MU_N_MHZ_PER_T = 7.6226  # MHz/T
GAMMA_C13_MHZ_PER_T = 10.705  # MHz/T, 13C nuclear spin

# Bohr to nuclear magneton ratio; enters the nuclear-bath density estimate
MU_B_TO_MU_N = MU_B_GHZ_PER_T * 1e3 / MU_N_MHZ_PER_T

# SI values used by the dipolar bath-density estimates
MU_B_SI = 9.2740100783e-24  # J/T
MU_0_SI = 1.25663706212e-6  # T^2 m^3 / J
HBAR_SI = 1.054571817e-34  # J s
H_SI = 6.62607015e-34  # J s
K_B_SI = 1.380649e-23  # J/K
H_GHZ_PER_K = 20.8366  # k_B/h in GHz/K (thermal occupation arguments)

# Diamond carbon number density, atoms per nm^3 (3.515 g/cm^3)
DIAMOND_ATOMS_PER_NM3 = 176.2

# Refractive index of diamond at 737 nm
N_DIAMOND = 2.4

# SiV zero-phonon line
LAMBDA_ZPL_NM = 737.0
