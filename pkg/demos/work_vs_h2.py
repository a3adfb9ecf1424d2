"""
Work output against the cold-stroke field
=========================================

Sweep h2 for both working media, with and without the free-evolution
stroke. The same grid is available from the command line:

    freeotto sweep --model LTIM --Bz 1 --sweep h2:0.1:0.5:5 --sweep L=2,4,6 --optimize-tau-k --out ltim.csv
"""

import numpy as np

from freeotto import CycleParams, ModelSpec, tau_k_optimizer
from freeotto.cycle import prepare_dense

for model, B_z in (("TIM", 0.0), ("LTIM", 1.0)):
    print(model)
    for L in (2, 6):
        spec = ModelSpec(model, L, B_z=B_z)
        for h2 in np.linspace(0.1, 0.5, 5):
            p = CycleParams(h2=h2)
            pc = prepare_dense(spec, p)
            opt = tau_k_optimizer(spec, p, prepared=pc)
            free, normal = pc.result(opt.tau_k_opt), pc.result(0.0)
            print(f"  L={L} h2={h2:.1f}  |W| {abs(normal.W):7.3f} -> {abs(free.W):7.3f}   "
                  f"eta {normal.eta:6.3f} -> {free.eta:6.3f}   tau_k_opt={opt.tau_k_opt:.3f}")
