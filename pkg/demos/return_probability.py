"""
Return to the field-polarised state
===================================

Deep in the strong-field phase the state at A' is close to all spins along
x. Free evolution under the zero-field part of H takes it away and back;
the return probability peaks at the optimal free-evolution times.
"""

import math

import numpy as np

from freeotto import ModelSpec, ground_state_probability_ltim, ground_state_probability_tim, return_probability

tau = np.linspace(0, math.pi, 13)
print("TIM, J = 1")
for L in (2, 4, 6):
    print(f"  L={L}", np.round(ground_state_probability_tim(L, 1.0, tau), 4))

# the published four-spin formula for the longitudinal-field chain differs
# from direct evaluation; the two-spin one agrees
print("LTIM, J = B_z = 1")
for L in (2, 4):
    spec = ModelSpec("LTIM", L, B_z=1.0)
    closed = ground_state_probability_ltim(L, 1.0, 1.0, tau)
    exact = return_probability(spec, tau)
    print(f"  L={L} closed form", np.round(closed, 4))
    print(f"  L={L} exact      ", np.round(exact, 4))
