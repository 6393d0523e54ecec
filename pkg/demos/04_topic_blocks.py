"""
Breaking a belief system into blocks
====================================

Seven topics form four groups. Topics 1-3 form a cycle, and topic 4 stands
alone; neither group listens to anything outside itself. Topics 5 and 6
listen to each other and to topics 3 and 4. Topic 7 follows topic 6.
The predictor walks the groups in dependency order and applies a different
rule to each kind of group.
"""

import numpy as np

from beliefnet import condense_logic, predict_all
from beliefnet.generate import balanced_signs, random_influence, random_profile
from beliefnet.model import validate_influence, validate_profile

# pattern[p, q]: topic p listens to topic q (0-based)
pattern = np.eye(7, dtype=bool)
for p, q in [(0, 2), (1, 0), (2, 1), (4, 2), (4, 5), (5, 3), (5, 4), (6, 5)]:
    pattern[p, q] = True

rng = np.random.default_rng(3)
signs = balanced_signs(pattern, rng)
(C,) = random_profile(pattern, signs, 1, rng)
net = validate_influence(random_influence(5, rng))
prof = validate_profile([C] * 5)

part = condense_logic(prof)
for j, block in enumerate(part.blocks):
    kind = "closed" if part.closed_flags[j] else f"listens to {sorted(q + 1 for q in part.ext_dep_sets[j])}"
    print(f"block {j + 1}: topics {[p + 1 for p in block]}  {kind}")

rep = predict_all(net, prof, rng.uniform(-1, 1, 5 * 7))
print()
for p, v in enumerate(rep.verdicts):
    print(f"topic {p + 1}: {v.kind.value:<10} alpha={v.alpha:+.4f}  [{v.rule}]")
