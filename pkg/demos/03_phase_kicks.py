"""Random phase kicks reproduce exponential decay of the overlap.

Each collision multiplies the inter-world coherence by a random phase
factor. Averaged over many trajectories the coherence follows
exp(-sigma phi t), independent of the fictitious sphere radius used to
count collisions.
"""

from interworld import ScatteringChannel, phase_kick_summary, sample_phase_kick_trajectory
from interworld.report import text_summary

channel = ScatteringChannel("rest gas", 2.4e-18, 5.712e16)

# %% Kicks are tiny at a millimetre radius and large near sqrt(sigma)
for radius in (1e-3, 2e-9):
    trajectory = sample_phase_kick_trajectory(channel, radius=radius, duration=4 / channel.rate, seed=3, n_points=9)
    print(f"r = {radius:g} m: " + " ".join(f"{c:.3f}" for _, c in trajectory))

# %% 100 000 trajectories against the closed form
print(text_summary(phase_kick_summary(channel, 100_000, seed=1)))
