"""Scratch: verify register behaviors with the pinned calibration."""
import math
import sys

import numpy as np

sys.path.insert(0, "src")
from sivnode.register import (
    INIT_TARGET,
    calibrated_hyperfine,
    compose_init_ideal,
    conditional_rotation,
    cpmg_sequence,
    find_resonances,
    init_gate,
    propagate,
)

hf = calibrated_hyperfine()
print("ideal init matrix match:", np.abs(compose_init_ideal() - INIT_TARGET).max())

# resonance scan: deepest dip location
taus = np.linspace(0.2, 3.0, 2801)
rows = find_resonances(hf, 8, taus)
i = int(np.argmin(rows[:, 1]))
print("deepest resonance at tau=%.4f us, signal=%.4f" % (rows[i, 0], rows[i, 1]))
print("baseline (far from resonance) max signal:", rows[:, 1].max())

# init gate polarization
u, pol = init_gate(hf, 2.857)
print("init polarizations (|up,up> and |up,dn> inputs):", pol)
print("unitarity:", np.abs(u @ u.conj().T - np.eye(4)).max())

# unconditional gate character at spacing 0.731 (half-spacing 0.3655)
rep = conditional_rotation(cpmg_sequence(8, 0.3655), hf)
print("uncond axes:", np.round(rep.axis_up, 4), np.round(rep.axis_down, 4))
print("uncond angles/pi:", rep.angle_up / math.pi, rep.angle_down / math.pi)

# doubling N doubles the conditional angle (mod 2pi) at the resonance
r8 = conditional_rotation(cpmg_sequence(8, 2.859), hf)
r16 = conditional_rotation(cpmg_sequence(16, 2.859), hf)
print("angle8/pi=%.4f angle16/pi=%.4f" % (r8.angle_up / math.pi, r16.angle_up / math.pi))
