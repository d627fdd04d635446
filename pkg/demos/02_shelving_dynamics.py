"""Postselected measurement map vs the drift equations, and the three regimes.

Run with an argument to save a figure:  python 02_shelving_dynamics.py out.png
"""
import sys
import warnings

import numpy as np

from qutrit_zeno.hamilton_flow import FlowSpec, classify_regime, integrate
from qutrit_zeno.monitored_dynamics import DEFAULT_FREQUENCIES, MonitorConfig, map_trajectory
from qutrit_zeno.su_n_basis import UnphysicalStateWarning, canonical_initial_state, flow_to_bloch

# the starting vector is not a positive matrix; the map runs on it anyway
warnings.simplefilter("ignore", UnphysicalStateWarning)
y0 = canonical_initial_state()
print("initial flow coordinates:", np.round(y0, 4))

runs = {}
for alpha in (0.2, 0.7, 1.7):
    flow = integrate(y0, FlowSpec(DEFAULT_FREQUENCIES, 0.0, alpha), T=20.0)
    rec = map_trajectory(flow_to_bloch(y0), DEFAULT_FREQUENCIES, MonitorConfig(0.0, alpha, 1e-3),
                         "single", T=20.0, allow_unphysical=True)
    gap = np.abs(rec.flow_coords() - flow.x).max()
    report = classify_regime(flow.t, flow.x)
    runs[alpha] = flow
    print(f"alpha3={alpha}: {report.regime:12s} freeze_time={report.freeze_time}  "
          f"max |map - flow| = {gap:.2e}  survival = {rec.survival[-1]:.3e}")

# Two ancillae, equal rates
for alpha in (0.1, 0.7, 1.7):
    flow = integrate(y0, FlowSpec(DEFAULT_FREQUENCIES, alpha, alpha, "double"), T=20.0)
    r = classify_regime(flow.t, flow.x)
    print(f"double alpha2=alpha3={alpha}: {r.regime:12s} freeze_time={r.freeze_time}")

if len(sys.argv) > 1:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(14, 4), sharey=True)
    for ax, (alpha, flow) in zip(axes, runs.items()):
        ax.plot(flow.t, flow.x, lw=1)
        ax.set_title(f"alpha3 = {alpha}")
        ax.set_xlabel("t")
    axes[0].legend([f"x{i}" for i in range(1, 9)], ncol=2, fontsize=7)
    fig.tight_layout()
    fig.savefig(sys.argv[1])
