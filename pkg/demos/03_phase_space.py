"""Coordinates freeze while momenta run away in the Zeno regime."""
import warnings

import numpy as np

from qutrit_zeno.hamilton_flow import FlowSpec, classify_regime, delocalization, integrate
from qutrit_zeno.monitored_dynamics import DEFAULT_FREQUENCIES
from qutrit_zeno.su_n_basis import UnphysicalStateWarning, canonical_initial_state

with warnings.catch_warnings():
    warnings.simplefilter("ignore", UnphysicalStateWarning)
    x0 = canonical_initial_state(0.3, 0.4)
p0 = np.array([1.0, 0.5] * 4)

for alpha in (0.1, 1.7):
    s = integrate(x0, FlowSpec(DEFAULT_FREQUENCIES, 0.0, alpha), T=20.0, p0=p0)
    r = classify_regime(s.t, s.x)
    print(f"alpha3={alpha}: {r.regime}, final max|p| = {np.abs(s.p[-1]).max():.3e}")
    if r.freeze_time is not None:
        d = delocalization(s, r)
        print(f"  frozen from t={r.freeze_time:.2f}; momenta grow {d['growth']:.3g}x afterwards")

# The map-derived momentum flow is -dH/dx by construction; the printed one is not everywhere
spec = FlowSpec(DEFAULT_FREQUENCIES, 0.0, 1.7)
x, p = x0, p0
print("printed pdot:      ", np.round(spec.momentum(x, p), 4))
print("map-derived pdot:  ", np.round(spec.with_variant("oracle-corrected").momentum(x, p), 4))
