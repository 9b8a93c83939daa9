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
# # CHSH test
#
# Settings {t1, t1~, t2, t2~} = {0, 45, 22.5, 67.5} degrees make the ideal
# state reach S = 2 sqrt2. No local deterministic strategy gets beyond 2.

# %%
import math

import numpy as np

from entbell import cli, experiment, stats
from entbell.config import load_config

prepared = experiment.default_prepared()

# %%
print("ideal S:", stats.quantum_chsh(prepared))
print("best local strategy:", stats.lhv_max_chsh())
print("largest S on a 20^4 setting grid:", stats.tsirelson_grid_max(prepared))
print("white-noise threshold:", stats.critical_visibility(prepared), "vs", 1 / math.sqrt(2))

# %% [markdown]
# ## Finite counts
#
# With the default per-basis noise the expected S is 2 sqrt2 * 0.83 = 2.35.
# The mean number of coincidences per setting pair is chosen so that each
# correlation has sigma close to 0.05.

# %%
cfg = load_config()
noise = cli.noise_from_config(cfg)
mean_total = cli.chsh_mean_total(cfg, prepared)
counts, res = stats.run_chsh(prepared, noise, mean_total, seed=cfg.seed)
for name, c, e in zip(("E1", "E2", "E3", "E4"), counts, res.correlations):
    print(name, c.as_tuple(), f"{e.e_value:+.3f} +/- {e.sigma:.3f}")
print(f"S = {res.s_value:.3f} +/- {res.s_sigma:.3f}, {res.sigmas_of_violation:.1f} sigma")

# %%
s_vals = np.array([stats.run_chsh(prepared, noise, mean_total, seed=s)[1].s_value
                   for s in range(200)])
print(f"S over 200 seeds: {s_vals.mean():.3f} +/- {s_vals.std(ddof=1):.3f}")
print("fraction violating S <= 2:", np.mean(s_vals > 2))

# %% [markdown]
# For comparison, four correlations of 0.69, -0.61, -0.58, -0.60 with
# errors 0.05, 0.04, 0.04, 0.04 combine to:

# %%
r = stats.chsh(*(stats.CorrelationEstimate(e, s) for e, s in
                 [(0.69, 0.05), (-0.61, 0.04), (-0.58, 0.04), (-0.60, 0.04)]))
print(f"S = {r.s_value:.2f} +/- {r.s_sigma:.3f} -> {r.sigmas_of_violation:.2f} sigma")
