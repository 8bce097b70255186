#!/usr/bin/env python3
"""Pre-build search for the default hyperfine parameters.

The register timings to reproduce (8-pulse trains throughout):

  * maximally entangling conditional rotation (relative half-angle pi/2)
    at half-spacing tau = 2.859 us;
  * the initialization timing tau_init = 2.857 us realizing an electron-up
    nuclear rotation of 0.63*pi about the axis (0.78, 0, 0.62);
  * an unconditional point (parallel conditional axes) at inter-pulse
    spacing 0.731 us (half-spacing 0.3655 us).

The comb of echo resonances sits at half-spacings (2k+1)/(4*f_avg) with
f_avg the mean conditioned precession frequency.  Matching the entangling
point to the k = 15 resonance pins f_avg near 2.71 MHz (a field of roughly
0.25 T); the remaining freedom (a_par, a_perp) is fixed by the
initialization-gate rotation, and the unconditional point falls on the
second anti-resonance.  The result is written to src/sivnode/fixtures/ and
pinned there; this script exists so the search is reproducible.

Usage: python3 scripts/calibrate_hyperfine.py [--write]
"""

import argparse
import json
import math
import pathlib
import sys

import numpy as np
from scipy.optimize import minimize

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from sivnode.register import (  # noqa: E402
    HyperfineParams,
    conditional_rotation,
    cpmg_sequence,
)

TAU_ENTANGLE = 2.859
TAU_INIT = 2.857
TAU_UNCOND = 0.3655  # half-spacing for inter-pulse spacing 0.731 us
N_PULSES = 8
TARGET_INIT_ANGLE = 0.63 * math.pi
TARGET_INIT_AXIS = np.array([0.78, 0.0, 0.62])
TARGET_INIT_AXIS = TARGET_INIT_AXIS / np.linalg.norm(TARGET_INIT_AXIS)


def gate_metrics(hf: HyperfineParams):
    ent = conditional_rotation(cpmg_sequence(N_PULSES, TAU_ENTANGLE), hf)
    init = conditional_rotation(cpmg_sequence(N_PULSES, TAU_INIT), hf)
    unc = conditional_rotation(cpmg_sequence(N_PULSES, TAU_UNCOND), hf)
    return ent, init, unc


def objective(x):
    omega_l, a_par, a_perp = x
    if omega_l <= 0 or a_perp <= 0:
        return 1e6
    hf = HyperfineParams(a_parallel=a_par, a_perp=a_perp, nuclear_larmor=omega_l)
    try:
        ent, init, unc = gate_metrics(hf)
    except Exception:
        return 1e6
    cost = (
        60.0 * (ent.entangling_phi - math.pi / 2.0) ** 2
        + 20.0 * (init.angle_up - TARGET_INIT_ANGLE) ** 2
        + 60.0 * float(np.sum((init.axis_up - TARGET_INIT_AXIS) ** 2))
        + 0.5 * (1.0 - abs(float(np.dot(unc.axis_up, unc.axis_down)))) ** 2
    )
    return cost


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--write", action="store_true", help="write the fixture file")
    args = parser.parse_args()

    # coarse grid around the node-31 comb anchor, then simplex refinement
    # from the best cells
    cells = []
    for omega_l in np.linspace(2620.0, 2800.0, 10):
        for a_par in np.linspace(-400.0, 400.0, 11):
            for a_perp in np.linspace(20.0, 1220.0, 25):
                c = objective((omega_l, a_par, a_perp))
                cells.append((c, (omega_l, a_par, a_perp)))
    cells.sort(key=lambda item: item[0])
    print("grid best:", cells[0])

    best = None
    for _, start in cells[:4]:
        res = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-7, "fatol": 1e-14, "maxiter": 4000, "maxfev": 6000},
        )
        if best is None or res.fun < best.fun:
            best = res
    res = best
    omega_l, a_par, a_perp = res.x
    print("refined:", res.x, "cost", res.fun)

    hf = HyperfineParams(a_parallel=a_par, a_perp=a_perp, nuclear_larmor=omega_l)
    ent, init, unc = gate_metrics(hf)
    print("entangling phi/pi:", ent.entangling_phi / math.pi)
    print("init angle/pi:", init.angle_up / math.pi, "axis:", init.axis_up)
    print("uncond axis dot:", float(np.dot(unc.axis_up, unc.axis_down)))

    if args.write:
        out = {
            "a_parallel_khz": float(a_par),
            "a_perp_khz": float(a_perp),
            "nuclear_larmor_khz": float(omega_l),
            "notes": "calibrated by scripts/calibrate_hyperfine.py; "
            "8-pulse gate timings 2.859/2.857/0.3655 us",
        }
        path = pathlib.Path(__file__).resolve().parent.parent / "src/sivnode/fixtures/hyperfine_calibration.json"
        path.write_text(json.dumps(out, indent=2) + "\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
