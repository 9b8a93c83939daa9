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
# # Bob's restricted Bell-state analyzer
#
# Bob's outcome +1 is a projection onto cos(t2)|phi-> + sin(t2)|psi+>.
# Optically this is a half-wave plate at t2/2 in mode b2, a second PBS that
# keeps even parity, and a diagonal polarizer on each output. Here we check
# that the circuit and the rank-1 projector give the same statistics.

# %%
import numpy as np

from entbell import experiment

prepared = experiment.default_prepared()

# %% [markdown]
# Which polarizer pair works depends on the HWP sign convention. The
# analyzer calibration tries each pair in turn:

# %%
pair = experiment.calibrate_analyzer(prepared)
print("polarizer pair (+1 = diagonal, -1 = antidiagonal):", pair)

# %%
rng = np.random.default_rng(0)
for t1, t2 in rng.uniform(0, np.pi, size=(5, 2)):
    circ = experiment.circuit_outcome_probabilities(prepared, t1, t2, pair)
    proj = experiment.outcome_probabilities(prepared, t1, t2)
    print(f"t1={np.degrees(t1):6.1f} t2={np.degrees(t2):6.1f}  "
          f"circuit={np.round(circ, 4)}  projector={np.round(proj, 4)}")

# %% [markdown]
# The raw circuit weights are half the projector probabilities. The other
# half of the accepted even-parity events goes to the polarizer pairing
# that is not counted.

# %%
print(experiment.analyzer_circuit_weights(prepared, 0.3, 0.5, pair))
print(experiment.outcome_probabilities(prepared, 0.3, 0.5))
