"""Scratch: per-comb refinement of the hyperfine calibration."""
import math
import sys

import numpy as np
from scipy.optimize import minimize

sys.path.insert(0, "src")
from sivnode.register import HyperfineParams, conditional_rotation, cpmg_sequence

TAU_ENT, TAU_INIT, TAU_UNC, N = 2.859, 2.857, 0.3655, 8
T_ANGLE = 0.63 * math.pi
T_AXIS = np.array([0.78, 0.0, 0.62])
T_AXIS = T_AXIS / np.linalg.norm(T_AXIS)


def metrics(x):
    hf = HyperfineParams(a_parallel=x[1], a_perp=x[2], nuclear_larmor=x[0])
    ent = conditional_rotation(cpmg_sequence(N, TAU_ENT), hf)
    init = conditional_rotation(cpmg_sequence(N, TAU_INIT), hf)
    unc = conditional_rotation(cpmg_sequence(N, TAU_UNC), hf)
    return ent, init, unc


def cost(x):
    if x[0] <= 0 or x[2] <= 0:
        return 1e6
    try:
        ent, init, unc = metrics(x)
    except Exception:
        return 1e6
    return (
        60.0 * (ent.entangling_phi - math.pi / 2.0) ** 2
        + 20.0 * (init.angle_up - T_ANGLE) ** 2
        + 60.0 * float(np.sum((init.axis_up - T_AXIS) ** 2))
        + 0.5 * (1.0 - abs(float(np.dot(unc.axis_up, unc.axis_down)))) ** 2
    )


for comb_f in (2711.0, 4110.0, 5509.0, 6908.0, 8307.0):
    cells = []
    for wl in np.linspace(comb_f - 90, comb_f + 90, 10):
        for ap in np.linspace(-400, 400, 11):
            for at in np.linspace(20, 1220, 25):
                cells.append((cost((wl, ap, at)), (wl, ap, at)))
    cells.sort(key=lambda c: c[0])
    best = None
    for _, s in cells[:4]:
        r = minimize(cost, s, method="Nelder-Mead",
                     options={"xatol": 1e-7, "fatol": 1e-14, "maxiter": 3000, "maxfev": 5000})
        if best is None or r.fun < best.fun:
            best = r
    ent, init, unc = metrics(best.x)
    print(
        "comb %.0f kHz -> cost %.4g x=%s | phi/pi=%.4f angle/pi=%.4f axis=%s unc=%.5f"
        % (
            comb_f,
            best.fun,
            np.round(best.x, 3),
            ent.entangling_phi / math.pi,
            init.angle_up / math.pi,
            np.round(init.axis_up, 4),
            float(np.dot(unc.axis_up, unc.axis_down)),
        )
    )
