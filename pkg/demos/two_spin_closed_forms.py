"""
Two spins: simulation against closed forms
==========================================

For two spins the adiabatic cycle is solvable by hand. The state reached
at A' only depends on two numbers, alpha and delta, and free evolution
under the Ising coupling rotates its energy as cos(4 J tau_k).

We compare three curves for E_A(tau_k):

* the density-matrix simulation with an adiabatic return ramp,
* the exact adiabatic closed form,
* the published closed form, which carries extra cos(4 h1)/sin(4 h1) terms.
"""

import math

import numpy as np

from freeotto import CycleParams, ModelSpec, two_spin_coefficients, two_spin_energy_A, two_spin_energy_A_adiabatic
from freeotto.cycle import prepare_dense

h1, h2, T_C = 10.0, 0.1, 0.01
params = CycleParams(h1=h1, h2=h2, T_H=100, T_C=T_C, tau1=math.inf, tau2=math.inf)
prepared = prepare_dense(ModelSpec("TIM", 2), params)
coeffs = two_spin_coefficients(h1, h2, 1.0, T_C)
print(f"alpha = {coeffs.alpha:.6f}, delta = {coeffs.delta:.6f}, E_A' = {prepared.E_Aprime:.6f}")

###############################################################################
# One period of the free evolution

tau = np.linspace(0, math.pi / 2, 9)
exact = two_spin_energy_A_adiabatic(tau, coeffs, h1)
published = two_spin_energy_A(tau, coeffs, h1)
print(f"{'tau_k':>8} {'simulated':>12} {'adiabatic':>12} {'published':>12}")
for t, a, b in zip(tau, exact, published):
    print(f"{t:8.4f} {prepared.energy_A(t):12.6f} {a:12.6f} {b:12.6f}")

###############################################################################
# A finite return ramp moves the optimum away from tau_k = 0

for tau2 in (0.1, 1.0, 50.0):
    pc = prepare_dense(ModelSpec("TIM", 2), params.with_(tau1=0.1, tau2=tau2))
    grid = np.linspace(0, math.pi / 2, 200)
    E = [pc.energy_A(t) for t in grid]
    print(f"tau2 = {tau2:5}: E_A' = {pc.E_Aprime:9.4f}, min E_A = {min(E):9.4f} at tau_k = {grid[np.argmin(E)]:.3f}")
