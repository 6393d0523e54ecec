"""
Six people, five topics
=======================

Two bundled scenarios share one influence network. In the first, everyone's
logic agrees in sign, and only topic 3 splits because its inputs are
weighted differently by the two groups. In the second, the groups disagree
on the sign of a single entry (how topic 2 reacts to topic 1). Topic 2 then
splits, and the split travels downstream to topics 3, 4 and 5.
"""

import numpy as np

from beliefnet import cross_validate
from beliefnet.config import load_config

for name in ("scenario_fig3", "scenario_fig4"):
    net, prof, x0 = load_config(name).resolve()
    report = cross_validate(net, prof, x0)
    print(f"\n{name}: blocks {[[p + 1 for p in b] for b in report.prediction.partition.blocks]}")
    for check, verdict in zip(report.topics, report.prediction.verdicts):
        alpha = "" if verdict.alpha is None else f" alpha={verdict.alpha:+.4f}"
        print(f"  topic {check.topic + 1}: {verdict.kind.value:<24} spread={check.simulated_spread:.3g}"
              f"{alpha}  [{verdict.rule}]")
    print(f"  predictor, fixed points and simulation agree: {report.agreement}"
          f" (converged after {report.trajectory.converged_at} steps)")

# the final opinions of every individual on topic 3 in the first scenario
net, prof, x0 = load_config("scenario_fig3").resolve()
y = cross_validate(net, prof, x0).topics[2].simulated_limit
print("\ntopic 3 final opinions:", np.round(y, 4))
