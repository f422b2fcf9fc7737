"""Driving the ion in one world and asking what the other world sees.

With the pi-pulse field held sqrt(2) times longer, a fully coherent
partner world would be excited with certainty. Absorption itself damps
the overlap though, and the feedback model lets that damping act on the
Rabi angle as it builds up.
"""

import numpy as np

from interworld import excitation_damping, feedback_excitation, make_mwi_pulse, make_pi_pulse, rabi_probability

pi = make_pi_pulse(1.0)
mwi = make_mwi_pulse(1.0)

# %% Local and cross-world probabilities
print(f"pi pulse, local p      = {rabi_probability(pi):.6f}")
print(f"MWI pulse, rabi p      = {rabi_probability(mwi):.6f}")
print(f"MWI pulse, damping D   = {excitation_damping(mwi):.6f}  (1/e = {np.exp(-1):.6f})")
print(f"MWI pulse, feedback p  = {feedback_excitation(mwi).probability_p:.6f}")

# %% Extra background decoherence during the pulse only lowers p
for rate in np.logspace(-2, 1, 7):
    p = feedback_excitation(mwi, decoherence_rate=mwi.excitation_rate + rate).probability_p
    print(f"background {rate:7.3g} /s  ->  p = {p:.4f}")
