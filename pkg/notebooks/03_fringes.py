# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Coincidence fringes
#
# Bob's HWP stays fixed while Alice turns her polarizer in 30 degree steps.
# The ++ coincidences follow cos^2(t1 + t2). White noise reduces the fringe
# visibility to the noise parameter v.

# %%
import numpy as np

from entbell import cli, stats
from entbell.config import load_config

cfg = load_config()
prepared = cli.prepared_from_config(cfg)
noise = cli.noise_from_config(cfg)
theta1 = np.deg2rad(cfg.fringe_theta1_deg)

# %%
scans = {}
for t2_deg in cfg.fringe_theta2_deg:
    scan = stats.fringe_scan(prepared, np.radians(t2_deg), theta1, noise,
                             cfg.fringe_mean_total, seed=cfg.seed)
    fit = stats.fit_fringe(scan)
    scans[t2_deg] = (scan, fit)
    print(f"theta2 = {t2_deg:g} deg (HWP at {t2_deg / 2:g} deg): V = {fit.visibility:.3f}")

# %% [markdown]
# Repeating with 100 seeds gives the spread of the fitted visibility:

# %%
for t2_deg in cfg.fringe_theta2_deg:
    vis = [stats.fit_visibility(stats.fringe_scan(prepared, np.radians(t2_deg), theta1, noise,
                                                  cfg.fringe_mean_total, seed=(cfg.seed, r)))
           for r in range(100)]
    print(f"theta2 = {t2_deg:g}: {np.mean(vis):.3f} +/- {np.std(vis, ddof=1):.3f}")

# %%
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fine = np.linspace(0, 2 * np.pi, 400)
    fig, ax = plt.subplots()
    for (t2_deg, (scan, fit)), marker in zip(scans.items(), ("s", "o")):
        ax.plot(np.degrees([t for t, _ in scan]), [n for _, n in scan], marker, ls="none",
                label=f"theta2={t2_deg:g}")
        ax.plot(np.degrees(fine), fit(fine), "-")
    ax.set_xlabel("Alice polarizer angle (deg)")
    ax.set_ylabel("++ coincidences")
    ax.legend()
    fig.savefig("fringes.png", dpi=120)
