"""Run configurations, parameter grids and CSV/manifest output."""

from __future__ import annotations

import csv
import dataclasses
import itertools
import json
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import tau_k_optimizer
from .cycle import CycleParams, CycleResult
from .engines import ENGINES, check_compatible, prepare
from .models import Model, ModelSpec

SWEEP_VARIABLES = ("h2", "tau_k", "L", "tau2")
RESULT_COLUMNS = (
    "E_A", "E_Aprime", "E_B", "E_C", "E_D", "Q_in", "Q_out", "W", "abs_W", "eta", "P", "abs_P",
    "tau_k", "tau_k_opt", "tau_total", "is_engine", "status", "W_sta",
)
CONVERGENCE_TOL = 1e-6


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key (and line)."""


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    values: tuple

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """``var:start:stop:count`` (inclusive linspace) or ``var=v1,v2,...``."""
        text = text.strip()
        try:
            if "=" in text:
                var, rest = text.split("=", 1)
                vals = [float(v) for v in rest.split(",") if v.strip()]
            else:
                var, start, stop, count = text.split(":")
                n = int(count)
                if n < 1:
                    raise ConfigError(f"sweep {text!r}: count must be >= 1")
                vals = np.linspace(float(start), float(stop), n).tolist()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"sweep {text!r}: expected var:start:stop:count or var=a,b,c ({exc})") from None
        var = var.strip()
        if var not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable {var!r} not in {', '.join(SWEEP_VARIABLES)}")
        if not vals:
            raise ConfigError(f"sweep {text!r} has no values")
        if var == "L":
            if any(v != int(v) for v in vals):
                raise ConfigError(f"sweep {text!r}: L values must be integers")
            vals = [int(v) for v in vals]
        return cls(var, tuple(vals))


@dataclass(frozen=True)
class RunConfig:
    engine: str = "dense"
    spec: ModelSpec = field(default_factory=ModelSpec)
    params: CycleParams = field(default_factory=CycleParams)
    sweep: tuple = ()
    optimize_tau_k: bool = False
    output_path: str | None = None
    grid_points: int = 64
    tau_k_max: float | None = None
    workers: int = 1
    check_convergence: bool = False

    def __post_init__(self):
        if len(self.sweep) > 2:
            raise ConfigError("at most two sweep axes are allowed")
        names = [a.variable for a in self.sweep]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate sweep variable in {names}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine: unknown engine {self.engine!r}; choose from {', '.join(ENGINES)}")
        if self.grid_points < 16:
            raise ConfigError("grid_points: must be >= 16")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        for spec, params in self.cells():
            try:
                check_compatible(self.engine, spec)
            except ValueError as exc:
                raise ConfigError(f"engine: {exc}") from None
            if self.engine == "statevector" and params.T_C != 0:
                raise ConfigError("engine: 'statevector' needs TC = 0")

    def cells(self):
        """``(spec, params)`` for every grid cell, first axis slowest."""
        axes = [[(a.variable, v) for v in a.values] for a in self.sweep]
        for combo in itertools.product(*axes):
            spec, params = self.spec, self.params
            for var, v in combo:
                if var == "L":
                    spec = dataclasses.replace(spec, L=v)
                else:
                    params = params.with_(**{var: v})
            yield spec, params

    def axis_values(self):
        return list(itertools.product(*[a.values for a in self.sweep]))

    def as_dict(self) -> dict:
        d = {
            "engine": self.engine,
            "model": self.spec.model.value,
            "L": self.spec.L,
            "J": self.spec.J,
            "B_z": self.spec.B_z,
            "sweep": [{"variable": a.variable, "values": list(a.values)} for a in self.sweep],
            "optimize_tau_k": self.optimize_tau_k,
            "grid_points": self.grid_points,
            "tau_k_max": self.tau_k_max,
            "output_path": self.output_path,
            "check_convergence": self.check_convergence,
        }
        d.update({k: (str(v) if isinstance(v, float) and math.isinf(v) else v)
                  for k, v in dataclasses.asdict(self.params).items()})
        return d


# key -> (target, converter); target is ("spec"|"params"|"run", field name)
def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float(text) -> float:
    return float(text)  # accepts "inf"


def _int(text) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


CONFIG_KEYS = {
    "engine": ("run", "engine", str),
    "model": ("spec", "model", lambda s: Model(str(s).upper())),
    "L": ("spec", "L", _int),
    "J": ("spec", "J", _float),
    "Bz": ("spec", "B_z", _float),
    "h1": ("params", "h1", _float),
    "h2": ("params", "h2", _float),
    "TH": ("params", "T_H", _float),
    "TC": ("params", "T_C", _float),
    "tau1": ("params", "tau1", _float),
    "tau2": ("params", "tau2", _float),
    "tau_bath": ("params", "tau_bath", _float),
    "tau_k": ("params", "tau_k", _float),
    "dt_max": ("params", "dt_max", _float),
    "scheme": ("params", "scheme", str),
    "optimize_tau_k": ("run", "optimize_tau_k", _bool),
    "out": ("run", "output_path", str),
    "grid_points": ("run", "grid_points", _int),
    "tau_k_max": ("run", "tau_k_max", _float),
    "workers": ("run", "workers", _int),
    "check_convergence": ("run", "check_convergence", _bool),
    "sweep": ("run", "sweep", SweepAxis.parse),
}


def read_config_file(path) -> list[tuple[str, str, str]]:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Returns ``(key, value, where)`` triples; ``sweep`` may repeat.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {str(p)!r} not found")
    out, seen = [], set()
    for n, raw in enumerate(p.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{p.name}:{n}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in seen and key != "sweep":
            raise ConfigError(f"{where}: duplicate key {key!r}")
        seen.add(key)
        out.append((key, value, where))
    return out


def build_config(entries) -> RunConfig:
    """Apply ``(key, value, where)`` entries in order on top of the defaults.

    The default parameter set is ``h1=10, h2=0.2, TH=100, TC=0.001,
    tau1=tau2=0.1, tau_bath=0.2, J=1`` with ``L=2``.
    """
    groups = {"spec": {}, "params": {}, "run": {}}
    sweeps, flag_sweeps = [], []
    for key, value, where in entries:
        target, name, conv = CONFIG_KEYS[key]
        try:
            v = conv(value)
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
        if key == "sweep":
            (flag_sweeps if where.startswith("--") else sweeps).append(v)
        else:
            groups[target][name] = v
    try:
        spec = ModelSpec(**groups["spec"])
        params = CycleParams(**groups["params"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = groups["run"]
    run["sweep"] = tuple(flag_sweeps or sweeps)  # flags replace file axes
    return RunConfig(spec=spec, params=params, **run)


def _status_row(status: str) -> dict:
    return {"status": status}


def run_cell(cell) -> dict:
    """Evaluate one grid cell; exceptions become a status string."""
    engine, spec, params, optimize, grid_points, tau_k_max, check = cell
    try:
        pc = prepare(engine, spec, params)
        tau_k_opt = None
        tau_k = params.tau_k
        if optimize:
            opt = tau_k_optimizer(spec, params, tau_k_max, grid_points, prepared=pc)
            tau_k = tau_k_opt = opt.tau_k_opt
        res = pc.result(tau_k)
        status = "ok"
        if check and engine != "analytic2spin":
            p2 = params.with_(dt_max=params.dt_max / 2)
            res2 = prepare(engine, spec, p2).result(tau_k)
            delta = max(abs(getattr(res, k) - getattr(res2, k)) for k in ("E_A", "E_Aprime", "E_B", "E_C", "E_D"))
            if delta > CONVERGENCE_TOL:
                status = f"unconverged({delta:.3g})"
        return record(res, tau_k_opt, status)
    except Exception as exc:  # a failing cell must not stop the sweep
        return _status_row(f"error: {type(exc).__name__}: {exc}".replace("\n", " "))


def record(res: CycleResult, tau_k_opt, status="ok") -> dict:
    row = {k: getattr(res, k) for k in ("E_A", "E_Aprime", "E_B", "E_C", "E_D", "Q_in", "Q_out", "W", "eta", "P")}
    row.update(abs_W=abs(res.W), abs_P=abs(res.P), tau_k=res.tau_k, tau_k_opt=tau_k_opt,
               tau_total=res.tau_total, is_engine=res.is_engine, status=status)
    return row


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def run_sweep(config: RunConfig) -> list[dict]:
    cells = [(config.engine, s, p, config.optimize_tau_k, config.grid_points, config.tau_k_max,
              config.check_convergence) for s, p in config.cells()]
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            rows = list(ex.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    out = []
    for vals, row in zip(config.axis_values(), rows):
        full = {a.variable: v for a, v in zip(config.sweep, vals)}
        full.update(row)
        out.append(full)
    return out


def columns(config: RunConfig) -> list[str]:
    return [a.variable for a in config.sweep] + list(RESULT_COLUMNS)


def write_csv(path, cols, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([fmt(r.get(c)) for c in cols])


def manifest_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.name + ".manifest.json")


def write_manifest(csv_path, config: RunConfig | None, command: str, wall_time: float, extra=None) -> Path:
    data = {
        "command": command,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config.as_dict() if config is not None else None,
        "integrator": None if config is None else {"scheme": config.params.scheme, "dt_max": config.params.dt_max},
        "wall_time_s": round(wall_time, 3),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        data.update(extra)
    mp = manifest_path(csv_path)
    mp.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return mp
