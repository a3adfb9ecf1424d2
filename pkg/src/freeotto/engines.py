"""Name-based dispatch over the cycle engines."""

from __future__ import annotations

from .cycle import CycleParams, CycleResult, PreparedCycle, prepare_dense, prepare_statevector, DegenerateGroundState
from .models import Model, ModelSpec

ENGINES = ("dense", "statevector", "kspace", "analytic2spin")


def check_compatible(engine: str, spec: ModelSpec) -> None:
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    if engine == "kspace":
        if spec.model is not Model.TIM:
            raise ValueError("engine 'kspace' supports model TIM only")
        if spec.L % 2:
            raise ValueError("engine 'kspace' needs an even L")
    if engine == "analytic2spin" and (spec.L != 2 or spec.model is not Model.TIM):
        raise ValueError("engine 'analytic2spin' needs model TIM with L = 2")


def prepare(engine: str, spec: ModelSpec, params: CycleParams, **kw) -> PreparedCycle:
    check_compatible(engine, spec)
    if engine == "dense":
        return prepare_dense(spec, params, **kw)
    if engine == "statevector":
        try:
            return prepare_statevector(spec, params, **kw)
        except DegenerateGroundState:
            return prepare_dense(spec, params, **{k: v for k, v in kw.items() if k == "l_max"})
    if engine == "kspace":
        from .kspace import prepare_kspace

        return prepare_kspace(spec.L, params, J=spec.J, **kw)
    from .analytics import prepare_analytic_two_spin

    return prepare_analytic_two_spin(spec, params, **kw)


def run(engine: str, spec: ModelSpec, params: CycleParams, *, keep_states: bool = False, **kw) -> CycleResult:
    if engine == "dense" and keep_states:
        kw.setdefault("fold_mirror", False)
    return prepare(engine, spec, params, **kw).result(params.tau_k, keep_states=keep_states)
