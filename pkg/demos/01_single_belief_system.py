"""
One person, two linked topics
=============================

A single individual holds opinions on two topics: how important a space
programme is (topic 1) and whether it should be privatised (topic 2). The
second opinion is pulled towards the first. With a positive link the two
opinions end up equal; with a negative link they end up opposite.
"""

import numpy as np

from beliefnet import simulate, structural_balance

x0 = np.array([1.0, -0.2])

# topic 2 gives half its weight to topic 1
follow = np.array([[1.0, 0.0],
                   [0.5, 0.5]])
traj = simulate(follow, x0)
print("positive link: limit", traj.limit.round(9), "after", traj.converged_at, "steps")

# the same link with the opposite sign
oppose = np.array([[1.0, 0.0],
                   [-0.5, 0.5]])
traj = simulate(oppose, x0)
print("negative link: limit", traj.limit.round(9), "after", traj.converged_at, "steps")

# the signs split the topics into two camps; opposite camps end opposite
camps = structural_balance(oppose).partition
print("camps of the negative link:", [sorted(p + 1 for p in c) for c in camps])
