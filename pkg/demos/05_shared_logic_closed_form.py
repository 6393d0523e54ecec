"""
Everyone shares one belief system
=================================

When all individuals use the same logic matrix C, the network dynamics
factor: the limit is the influence-weighted average of initial opinions
pushed through the limit of C's powers. This script compares that closed
form against brute-force iteration.
"""

import numpy as np

from beliefnet import build_system, simulate
from beliefnet.config import load_config
from beliefnet.dynamics import homogeneous_limit, power_limit

net, prof, x0 = load_config("homogeneous_example").resolve()
C = prof.matrices[0].C
print("shared logic matrix:\n", C)
print("limit of its powers:\n", power_limit(C).round(6))
print("influence weights (left Perron vector):", net.perron_vector().round(4))

closed = homogeneous_limit(net, C, x0)
traj = simulate(build_system(net, prof), x0)
print(f"\nsimulation converged after {traj.converged_at} steps")
print(f"max difference to the closed form: {np.abs(traj.limit - closed).max():.2e}")
print("common final opinion per topic:", closed[:prof.m].round(6))
