"""
Balance of the full opinion network
===================================

Each pair (person, topic) is a node of a large signed graph. Whether that
graph splits into two hostile camps can be read off a single person's logic
matrix, unless people disagree on a sign. In that case the graph is
unbalanced, and we can exhibit the offending cycle explicitly.
"""

import numpy as np

from beliefnet import build_multiplex_pattern, multiplex_balance_via_lemma, structural_balance
from beliefnet.generate import random_influence
from beliefnet.model import has_competition, validate_influence, validate_profile

rng = np.random.default_rng(1)
net = validate_influence(random_influence(3, rng))
C = np.array([[0.5, -0.5], [-0.4, 0.6]])

prof = validate_profile([C] * 3)
short = multiplex_balance_via_lemma(prof, has_competition(prof))
direct = structural_balance(build_multiplex_pattern(net, prof))
print("shared logic: balanced by shortcut", short.balanced, "| direct check", direct.balanced)
print("  camps (node = topic*n + person):", [sorted(c) for c in short.partition])

D = C.copy()
D[0, 1] = 0.5
prof = validate_profile([C, C, D])
verdict = multiplex_balance_via_lemma(prof, has_competition(prof), net)
print("\nperson 3 flips a sign: balanced", verdict.balanced)
print("  negative cycle (from, to, sign):")
for u, v, s in verdict.witness:
    print(f"    (topic {u // 3 + 1}, person {u % 3 + 1}) -> (topic {v // 3 + 1}, person {v % 3 + 1})  {s:+d}")
