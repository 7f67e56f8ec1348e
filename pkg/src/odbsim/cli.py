"""Command-line interface for the experiment runners.

Each subcommand writes `report.json` plus its CSV streams into --out and
prints the headline numbers.  With --assert the exit code is nonzero when
any headline check misses its threshold.
"""

import argparse
import json
import sys

from .experiments import (
    HOM_PRESET,
    SWAP_PRESET,
    ExperimentConfig,
    export_pulses,
    gate_checks,
    parse_config,
    run_adiabaticity_table,
    run_convergence,
    run_detuning_check,
    run_hom,
    run_swap_gkp,
)


def _add_common(sub):
    sub.add_argument("--config", help="flat key = value config file")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--dt-ns", type=float, default=None, help="ramp-segment step in ns")
    sub.add_argument("--grid-points", type=int, default=None)
    sub.add_argument("--no-hopping-during-fc", action="store_true")
    sub.add_argument("--physical-phase-gate", action="store_true")
    sub.add_argument("--assert", dest="assert_gates", action="store_true",
                     help="exit nonzero if a headline check misses its threshold")


def _load_config(args, preset):
    cfg = parse_config(args.config, base=preset) if args.config else preset
    if args.dt_ns is not None:
        cfg.dt_ns = args.dt_ns
    if args.grid_points is not None:
        cfg.grid_points = args.grid_points
    if args.no_hopping_during_fc:
        cfg.hopping_during_fc = False
    if args.physical_phase_gate:
        cfg.physical_phase_gate = True
    return cfg


def _finish(report, args):
    checks = gate_checks(report) if args.assert_gates else []
    summary = {
        k: report[k]
        for k in (
            "experiment",
            "infidelity_probability",
            "infidelity_amplitude",
            "wall_clock_s",
        )
        if k in report
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    failed = False
    for name, passed, value, threshold in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {value:.6g} (want {threshold})")
        failed = failed or not passed
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="odbsim", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("hom", "swap-gkp", "detune-check", "adiabaticity", "pulse-export", "convergence"):
        sub = subs.add_parser(name)
        _add_common(sub)
        if name == "convergence":
            sub.add_argument("--experiment", choices=("hom", "swap"), default="hom")
    args = parser.parse_args(argv)

    if args.command == "hom":
        cfg = _load_config(args, HOM_PRESET)
        return _finish(run_hom(cfg, out_dir=args.out), args)
    if args.command == "swap-gkp":
        cfg = _load_config(args, SWAP_PRESET)
        return _finish(run_swap_gkp(cfg, out_dir=args.out), args)
    if args.command == "detune-check":
        cfg = _load_config(args, HOM_PRESET)
        return _finish(run_detuning_check(cfg, out_dir=args.out), args)
    if args.command == "adiabaticity":
        cfg = _load_config(args, ExperimentConfig())
        return _finish(run_adiabaticity_table(cfg, out_dir=args.out), args)
    if args.command == "pulse-export":
        cfg = _load_config(args, ExperimentConfig())
        paths = export_pulses(cfg, args.out or ".")
        print(json.dumps(paths, indent=2, sort_keys=True))
        return 0
    if args.command == "convergence":
        cfg = _load_config(args, HOM_PRESET if args.experiment == "hom" else SWAP_PRESET)
        return _finish(run_convergence(cfg, which=args.experiment, out_dir=args.out), args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
