"""Command-line front end: ``freeotto {cycle,scan-tauk,sweep,validate}``.

Exit codes: 0 success, 1 usage error, 2 numerical-validation failure,
3 failed sweep cells.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
import time

from .sweep import (
    ConfigError, RunConfig, build_config, columns, fmt, read_config_file, run_cell, run_sweep, write_csv,
    write_manifest,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_PARTIAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# flag -> config key
_FLAGS = {
    "--engine": "engine", "--model": "model", "--L": "L", "--J": "J", "--Bz": "Bz",
    "--h1": "h1", "--h2": "h2", "--TH": "TH", "--TC": "TC", "--tau1": "tau1", "--tau2": "tau2",
    "--tau-bath": "tau_bath", "--tau-k": "tau_k", "--dt-max": "dt_max", "--scheme": "scheme",
    "--out": "out", "--grid-points": "grid_points", "--tau-k-max": "tau_k_max", "--workers": "workers",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    for flag, key in _FLAGS.items():
        p.add_argument(flag, dest=key, metavar=key.upper())
    p.add_argument("--optimize-tau-k", dest="optimize_tau_k", action="store_true", default=None,
                   help="replace tau_k by the E_A-minimising free-evolution time")
    p.add_argument("--check-convergence", dest="check_convergence", action="store_true", default=None,
                   help="rerun with dt_max/2 and flag cells whose energies move by more than 1e-6")
    p.add_argument("--sweep", action="append", default=[], metavar="AXIS",
                   help="var:start:stop:count or var=a,b,c with var in h2, tau_k, L, tau2 (max two)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freeotto", description="Quantum Otto cycles on spin chains with free evolution.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("cycle", "run a single cycle and print its energies, heats, work, efficiency and power"),
        ("scan-tauk", "scan E_A over the free-evolution time and locate its minimum"),
        ("sweep", "run a grid over up to two of h2, tau_k, L, tau2 and write CSV"),
        ("validate", "cross-engine and integrator-convergence checks for the configured model"),
    ):
        _add_common(sub.add_parser(name, help=text, description=text))
    return parser


def config_from_args(args) -> RunConfig:
    entries = read_config_file(args.config) if args.config else []
    for flag, key in _FLAGS.items():
        v = getattr(args, key)
        if v is not None:
            entries.append((key, v, flag))
    for key in ("optimize_tau_k", "check_convergence"):
        if getattr(args, key):
            entries.append((key, "true", "--" + key.replace("_", "-")))
    entries += [("sweep", s, "--sweep") for s in args.sweep]
    return build_config(entries)


def _emit_csv(config, cols, rows, command, t0, extra=None):
    if config.output_path:
        write_csv(config.output_path, cols, rows)
        write_manifest(config.output_path, config, command, time.perf_counter() - t0, extra)
    else:
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for r in rows:
            buf.write(",".join(fmt(r.get(c)) for c in cols) + "\n")
        sys.stdout.write(buf.getvalue())


def _exit_for(rows) -> int:
    statuses = [r.get("status", "") for r in rows]
    if any(s.startswith("error") for s in statuses):
        return EXIT_PARTIAL
    if any(s.startswith("unconverged") for s in statuses):
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_cycle(config: RunConfig, t0) -> int:
    if config.sweep:
        raise ConfigError("cycle: --sweep is only valid with the sweep command")
    row = run_cell((config.engine, config.spec, config.params, config.optimize_tau_k, config.grid_points,
                    config.tau_k_max, config.check_convergence))
    cols = columns(config)
    if config.output_path:
        write_csv(config.output_path, cols, [row])
        write_manifest(config.output_path, config, "cycle", time.perf_counter() - t0)
    for c in cols:
        if c in row:
            print(f"{c:>10} = {fmt(row[c])}")
    if row["status"].startswith("error"):
        print(row["status"], file=sys.stderr)
    return _exit_for([row])


def cmd_sweep(config: RunConfig, t0) -> int:
    rows = run_sweep(config)
    code = _exit_for(rows)
    failed = sum(not r["status"] == "ok" for r in rows)
    _emit_csv(config, columns(config), rows, "sweep", t0, {"n_records": len(rows), "n_failed": failed})
    if failed:
        print(f"{failed} of {len(rows)} cells did not finish cleanly", file=sys.stderr)
    return code


def cmd_scan(config: RunConfig, t0) -> int:
    from .analytics import tau_k_optimizer
    from .engines import prepare

    if config.sweep:
        raise ConfigError("scan-tauk: --sweep is only valid with the sweep command")
    pc = prepare(config.engine, config.spec, config.params)
    opt = tau_k_optimizer(config.spec, config.params, config.tau_k_max, config.grid_points, prepared=pc)
    rows = []
    for tk, _ in opt.scan:
        r = pc.result(tk)
        rows.append({"tau_k": tk, "E_A": r.E_A, "Q_in": r.Q_in, "W": r.W, "eta": r.eta, "P": r.P,
                     "is_engine": r.is_engine})
    cols = ["tau_k", "E_A", "Q_in", "W", "eta", "P", "is_engine"]
    extra = {"tau_k_opt": opt.tau_k_opt, "E_A_min": opt.E_A_min, "E_Aprime": pc.E_Aprime}
    _emit_csv(config, cols, rows, "scan-tauk", t0, extra)
    print(f"tau_k_opt = {fmt(opt.tau_k_opt)}  E_A_min = {fmt(opt.E_A_min)}  E_Aprime = {fmt(pc.E_Aprime)}",
          file=sys.stderr if not config.output_path else sys.stdout)
    return EXIT_OK


def validation_checks(config: RunConfig):
    """Yield ``(name, value, tolerance)``; a check passes when value <= tolerance."""
    from .cycle import convergence_check, run_cycle, run_cycle_statevector
    from .kspace import run_cycle_kspace
    from .models import Model

    spec, params = config.spec, config.params
    if not math.isinf(params.tau1) and not math.isinf(params.tau2):
        yield "dt_max halving, max |dE|", convergence_check(spec, params), 1e-6
    ref = run_cycle(spec, params)
    yield "first law |W + Q_in + Q_out|", abs(ref.W + ref.Q_in + ref.Q_out), 1e-12 * max(1.0, abs(ref.Q_in))
    if spec.model is Model.TIM and spec.L % 2 == 0 and params.T_C > 0:
        k = run_cycle_kspace(spec.L, params, J=spec.J)
        for key in ("W", "Q_in", "Q_out", "eta"):
            a, b = getattr(ref, key), getattr(k, key)
            yield f"kspace vs dense {key}, rel", abs(a - b) / max(abs(a), 1e-300), 1e-6
    if params.T_C == 0:
        s = run_cycle_statevector(spec, params)
        yield "statevector vs dense E_A", abs(s.E_A - ref.E_A), 1e-8


def cmd_validate(config: RunConfig, t0) -> int:
    ok = True
    for name, value, tol in validation_checks(config):
        good = value <= tol
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {name}: {value:.3e} (tol {tol:.0e})")
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {"cycle": cmd_cycle, "sweep": cmd_sweep, "scan-tauk": cmd_scan, "validate": cmd_validate}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](config, t0)
    except ConfigError as exc:
        print(f"freeotto: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
