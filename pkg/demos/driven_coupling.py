"""Time-dependent coupling: running coupling, mass gap and driving regimes.

The coupling follows from a linear drive of the scattering parameter; at
late times it matches the one-loop running form, and the mass gap it
implies decides whether the drive is adiabatic or fast.
"""

import numpy as np

from gnqkz.scattering import CouplingModel, characteristic_time, classify_regime, rg_trajectory
from gnqkz.thermo import log_gap_fit

model = CouplingModel(1.0, 2.0)
t = np.linspace(10, 1000, 100)
traj = rg_trajectory(model, t)
print(f"log-log slope of the running coupling: {traj.loglog_slope:.5f}")

fit = log_gap_fit(model, t, 2000.0)
print(f"ln m(t) against an affine law: max residual {fit.max_residual:.1e}")

t0 = characteristic_time(2000.0, 4.0)
print(f"characteristic time t0 = {t0:.15f}")
for alpha in (1.0, 10.0, 100.0):
    rep = classify_regime(CouplingModel(alpha, 2.0), t0, 2000.0, 4.0)
    print(f"alpha = {alpha:6.1f}: {rep.regime} (drive ratio {rep.drive_ratio:.2f})")
