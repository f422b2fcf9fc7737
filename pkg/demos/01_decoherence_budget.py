"""Decoherence budget of a room-temperature Hg+ trap.

Three channels destroy the overlap between the two worlds: rest-gas
collisions, elastic scattering of the drive photons, and the residual
variability of the confining field. Their times combine like parallel
resistors.
"""

from interworld import decoherence_budget, make_mwi_pulse
from interworld.constants import TORR
from interworld.report import reference_trap, text_summary

# %% Rest gas dominates at typical vacuum
trap = reference_trap(1e-9 * TORR)
print(text_summary(decoherence_budget(trap)))

# %% The drive adds a channel, but only while it is on
print(text_summary(decoherence_budget(trap, make_mwi_pulse(1.0))))

# %% Improving the vacuum buys time linearly
for torr in (1e-8, 1e-9, 1e-10, 1e-11):
    budget = decoherence_budget(reference_trap(torr * TORR))
    print(f"{torr:8.0e} torr  ->  {budget.combined_time:10.4g} s")
