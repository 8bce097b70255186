"""Scratch: find the composition of printed R blocks + electron pulses that
reproduces the printed Init matrix entry-wise."""
import itertools
import math

import numpy as np

from sivnode.register import INIT_TARGET, R_ENTANGLE_IDEAL, _su2_rotation, _I2

R = R_ENTANGLE_IDEAL

pulses = {
    "pix": np.kron(_su2_rotation((1, 0, 0), math.pi), _I2),
    "piy": np.kron(_su2_rotation((0, 1, 0), math.pi), _I2),
    "pix-": np.kron(_su2_rotation((-1, 0, 0), math.pi), _I2),
    "piy-": np.kron(_su2_rotation((0, -1, 0), math.pi), _I2),
    "X": np.kron(np.array([[0, 1], [1, 0]], dtype=complex), _I2),
    "iX": 1j * np.kron(np.array([[0, 1], [1, 0]], dtype=complex), _I2),
    "Y": np.kron(np.array([[0, -1j], [1j, 0]], dtype=complex), _I2),
    "iY": 1j * np.kron(np.array([[0, -1j], [1j, 0]], dtype=complex), _I2),
    "pi2x": np.kron(_su2_rotation((1, 0, 0), math.pi / 2), _I2),
    "pi2y": np.kron(_su2_rotation((0, 1, 0), math.pi / 2), _I2),
    "pi2x-": np.kron(_su2_rotation((-1, 0, 0), math.pi / 2), _I2),
    "pi2y-": np.kron(_su2_rotation((0, -1, 0), math.pi / 2), _I2),
}
rvars = {"R": R, "Rd": R.conj().T, "Rc": R.conj(), "Rt": R.T}

best = None
for (rn1, r1), (rn2, r2) in itertools.product(rvars.items(), repeat=2):
    for pn1, p1 in pulses.items():
        # pattern A: p1-after-r1-after-p?-r2 variants; compose right-to-left in time:
        # time order: r2 then p1 then r1  => U = r1 @ p1 @ r2
        u = r1 @ p1 @ r2
        err = np.abs(u - INIT_TARGET).max()
        if best is None or err < best[0]:
            best = (err, f"{rn1} @ {pn1} @ {rn2}")
        for pn2, p2 in pulses.items():
            u = p2 @ r1 @ p1 @ r2
            err = np.abs(u - INIT_TARGET).max()
            if err < best[0]:
                best = (err, f"{pn2} @ {rn1} @ {pn1} @ {rn2}")
            u = r1 @ p1 @ r2 @ p2
            err = np.abs(u - INIT_TARGET).max()
            if err < best[0]:
                best = (err, f"{rn1} @ {pn1} @ {rn2} @ {pn2}")

print("best:", best)
