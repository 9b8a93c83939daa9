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
# # Preparing the three-photon state
#
# Two polarization-entangled pairs, both in |phi+>, are fused on a
# polarizing beamsplitter. Keeping only events with one photon in each
# output port leaves a four-photon GHZ state. Quarter-wave plates on every
# mode plus a trigger photon detected behind an H polarizer then leave
# Alice's photon entangled with the *Bell state* of Bob's pair.

# %%
import numpy as np

from entbell import experiment, qstate
from entbell.qstate import fidelity

# %% [markdown]
# ## Source and fusion

# %%
source = experiment.build_source()
print(source)

ghz, p_fuse = experiment.fuse_source()
print(ghz)
print("fusion success probability:", p_fuse)

# %% [markdown]
# ## Finding the wave-plate settings
#
# The QWP angles are not fixed a priori. `calibrate_preparation` scans
# multiples of 45 degrees for the four plates and multiples of 90 degrees
# for a phase on Alice's photon. It returns the first setting that
# reproduces the target state.

# %%
cal = experiment.calibrate_preparation()
print("QWP angles (deg):", np.rad2deg(cal.qwp_angles))
print("phase (deg):", np.rad2deg(cal.calibration_phase))

prepared = experiment.prepare_state(cal.qwp_angles, cal.calibration_phase)
print(prepared.state)
print("overall post-selection probability:", prepared.preparation_probability)

# %% [markdown]
# The result is (|H>|phi-> - |V>|psi+>)/sqrt2. It is also the GHZ state
# written in circular polarization, (|RRR> + |LLL>)/sqrt2:

# %%
target = experiment.target_state()
print("fidelity with target:", fidelity(prepared.state, target))
print("fidelity with circular GHZ:", fidelity(target, experiment.ghz_circular_state()))

# %% [markdown]
# Bob's photons carry no polarization information on their own. Each has
# flat H/V marginals:

# %%
for mode in ("b1", "b2"):
    print(mode, qstate.marginal(prepared.state, mode))
