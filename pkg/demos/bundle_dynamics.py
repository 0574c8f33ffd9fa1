"""Integrate the bundle equations in tube coordinates and compare them
with the ordinary Hamiltonian flow on T*Q.

The planar Kepler problem is run twice with step dt and dt/2; the error
ratio close to 16 shows fourth-order agreement.  A circular orbit then
shows that a relative equilibrium keeps the slice coordinates fixed.
"""

import numpy as np

from cbslice import catalog
from cbslice.dynamics import central_force, compare_flows, integrate_model
from cbslice.tube import ModelPoint, TubeChart

if __name__ == "__main__":
    kepler = central_force(coeff=-1.0, power=-1.0)
    tc = TubeChart(catalog.chart("so2_plane"))
    m0 = ModelPoint(np.eye(2), np.array([0.1]), np.array([0.1]), np.array([-0.1]))
    errs = []
    for dt in (0.1, 0.05):
        out = compare_flows(tc, kepler, m0, dt, int(round(2.0 / dt)))
        errs.append(out["sup_error"])
        print(f"dt = {dt:5.3f}: sup |tube(model) - ambient| = {out['sup_error']:.3e}, "
              f"angular momentum drift = {out['momentum_drift']:.1e}, energy drift = {out['energy_drift']:.1e}")
    print(f"error ratio {errs[0] / errs[1]:.2f}")

    action, q0, p0 = catalog.so2_circular_orbit(1.0)
    tc = TubeChart(catalog.chart("so2_circular_orbit"))
    rec = integrate_model(tc, kepler, tc.base_point(), 0.01, 300)
    spread = max(np.abs(s.a).max() + np.abs(s.delta).max() for s in rec.model)
    angle = np.arctan2(rec.model[-1].g[1, 0], rec.model[-1].g[0, 0])
    print(f"circular orbit: slice coordinates move by at most {spread:.1e}; group angle after t = 3 is {angle:.6f}")
