"""
Scanning the free-evolution time
================================

The state at A' is computed once; E_A(tau_k) then only needs diagonal
phases. The optimal tau_k barely moves with the chain length, while the
work grows linearly with it.
"""

from freeotto import CycleParams, ModelSpec, tau_k_optimizer
from freeotto.cycle import prepare_dense

params = CycleParams()  # h1=10, h2=0.2, T_H=100, T_C=0.001, tau1=tau2=0.1

for L in (2, 4, 6, 8):
    spec = ModelSpec("TIM", L)
    prepared = prepare_dense(spec, params)
    opt = tau_k_optimizer(spec, params, prepared=prepared)
    free, normal = prepared.result(opt.tau_k_opt), prepared.result(0.0)
    print(f"L={L:2d}  tau_k_opt={opt.tau_k_opt:.4f}  W/L free={free.W / L:8.4f}  normal={normal.W / L:8.4f}  "
          f"eta free={free.eta:.4f}  normal={normal.eta:.4f}")

###############################################################################
# The scan itself is returned for plotting

opt = tau_k_optimizer(ModelSpec("TIM", 4), params, grid_points=16)
for t, e in opt.scan:
    print(f"{t:7.4f} {e:10.5f}")
