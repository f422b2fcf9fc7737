"""Running the full protocol and sending a short message.

The sender's world drives the ion; the receiver's world reads it out
after a wait. Bits are encoded by pulsing (1) or not pulsing (0).
"""

import warnings
from dataclasses import replace

from interworld import ExcitationModel, parse_scenario, run_protocol, transmit_bits
from interworld.protocol import DecoherenceWindowWarning
from interworld.report import text_summary
from interworld.scenario import reference_scenario_path

scenario = parse_scenario(reference_scenario_path())

# %% The reference pulse is long compared with the rest-gas time, so it warns
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always", DecoherenceWindowWarning)
    report = run_protocol(scenario)
for w in caught:
    print("warning:", w.message)
print(text_summary(report))

# %% Both excitation models side by side

for model in ExcitationModel:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecoherenceWindowWarning)
        r = run_protocol(replace(scenario, model=model, n_trials=5000))
    est = r.cross_world_excitation_rate
    print(f"{model.value:16} rate {est.rate:.4f}  [{est.lower:.4f}, {est.upper:.4f}]")

# %% A short message
with warnings.catch_warnings():
    warnings.simplefilter("ignore", DecoherenceWindowWarning)
    print(text_summary(transmit_bits("1011001110001011", scenario)))
