r"""
Batches of seeded trials
========================

An experiment config fixes where instances come from, the palette rule and
the solver rates.  Each trial gets its own seed derived from the master
seed, so the batch is reproducible record by record.
"""

import dataclasses

from cflcolor.harness import (
    BoundInputs,
    ExperimentConfig,
    corollary2_bound,
    records_to_csv,
    run_experiment,
    theorem1_bound,
)
from cflcolor.wireless import DbmConfig

cfg = ExperimentConfig(source="dbm", dbm=DbmConfig(intensity=0.5, detection_threshold=-15.0), trials=20, seed=9)
res = run_experiment(cfg)
print(records_to_csv(res.records[:5]))
s = res.summary
print(s["convergence_fraction"], s["mean_rounds"], s["eligible_fraction"], s["colored_fraction"])

###############################################################################
# Two spare colors, same instances and same random streams.
plus = run_experiment(dataclasses.replace(cfg, palette="chi+2"))
print("chi:", s["mean_rounds"], " chi+2:", plus.summary["mean_rounds"])

###############################################################################
# Worst-case guarantees are astronomically loose, hence the log domain.
for n in (2, 5, 20):
    inp = BoundInputs(n, gamma=0.1 / 12)
    print(n, theorem1_bound(inp).log_value, corollary2_bound(inp).log_value)
