"""
Groups of topics that depend only on each other
===============================================

When every topic in a group feeds back into every other, three outcomes
are possible. If the signs are consistent (the topics split into two
camps) and everyone agrees on them, opinions reach consensus with equal
magnitudes and camp-dependent signs. If the signs contain a contradiction,
or if people disagree on a sign, everything decays to zero.
"""

import numpy as np

from beliefnet import build_system, predict_all, simulate
from beliefnet.dynamics import to_topic_major
from beliefnet.generate import random_influence
from beliefnet.model import validate_influence, validate_profile

rng = np.random.default_rng(7)
net = validate_influence(random_influence(4, rng))
x0 = rng.uniform(-1, 1, 4 * 3)

cases = {
    # topic 3 opposes topics 1 and 2, which support each other
    "two camps": [[0.6, 0.2, -0.2], [0.3, 0.5, -0.2], [-0.25, -0.25, 0.5]],
    # a cycle with one negative link cannot be split into camps
    "contradiction": [[0.6, 0.4, 0.0], [0.0, 0.5, 0.5], [-0.3, 0.0, 0.7]],
}
for label, C in cases.items():
    prof = validate_profile([np.array(C)] * 4)
    rep = predict_all(net, prof, x0)
    y = to_topic_major(simulate(build_system(net, prof), x0).limit, 4, 3).reshape(3, 4)
    print(f"{label:>14}: {[v.kind.value for v in rep.verdicts]}")
    print(f"{'':>14}  limits per topic {np.round(y.mean(axis=1), 6)}")

# one person flips the sign of how topic 1 hears topic 2
C = np.array(cases["two camps"])
flipped = C.copy()
flipped[0, 1] = -flipped[0, 1]
prof = validate_profile([C, C, C, flipped])
rep = predict_all(net, prof, x0)
y = simulate(build_system(net, prof), x0).limit
print(f"{'competition':>14}: {[v.kind.value for v in rep.verdicts]}, max |limit| {np.abs(y).max():.1e}")
