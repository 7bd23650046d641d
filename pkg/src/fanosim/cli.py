"""Command-line front end: ``fanosim {correlation,spectrum,compile,verify,jw}``.

Experiment settings come from built-in defaults, then an optional JSON
``--config`` file, then explicit flags, later sources winning.  Config keys
are the long flag names with dashes replaced by underscores, e.g.
``{"eps": -8, "v": 0.5, "steps": 128, "noise_std": 0.04}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .circuits import Circuit
from .io import DEFAULT_DIGITS, atomic_write, write_csv, write_svg
from .jordan_wigner import FermionOp, OccupationState, describe, jw_map, jw_state
from .model import ModelParams, correlation_closed_form, derive, oracle_correlation, oracle_spectrum_signal
from .nmr.compiler import CompileOptions, compile_circuit, optimize_delays
from .nmr.molecule import FIXTURES, Molecule, load_fixture, load_molecule
from .nmr.sequence import PulseSequence
from .nmr.verify import budget_check, verify
from .operators import basis_state
from .simulator import (
    CSV_COLUMNS,
    ExperimentResult,
    run_correlation_experiment,
    run_spectrum_experiment,
    time_grid,
)
from .spectral import SPECTRUM_COLUMNS, check_nyquist, dft, find_peaks, propagate_errors

CORRELATION_DEFAULTS = {
    "eps": -8.0,
    "eps_k0": -2.0,
    "v": 4.0,
    "t_start": 0.1,
    "dt": 0.1,
    "steps": 15,
    "mode": "ideal",
    "molecule": None,
    "noise_std": 0.0,
    "seed": 0,
    "out": "correlation.csv",
    "svg": None,
    "oracle": False,
    "digits": DEFAULT_DIGITS,
    "refocus": "full",
}
SPECTRUM_DEFAULTS = {
    **CORRELATION_DEFAULTS,
    "v": 0.5,
    "steps": 128,
    "noise_std": 0.04,
    "out": "spectrum_signal.csv",
    "spectrum_out": None,
    "count": 2,
    "refine": False,
    "energy_offset": "mean",
}


class ConfigError(ValueError):
    pass


def _experiment_flags(p: argparse.ArgumentParser, spectrum: bool) -> None:
    p.add_argument("--config", help="JSON file with default settings")
    p.add_argument("--eps", type=float, help="impurity energy")
    p.add_argument("--eps-k0", type=float, help="energy of the coupled ring mode")
    p.add_argument("--v", type=float, help="impurity coupling")
    p.add_argument("--t-start", type=float, help="first sample time")
    p.add_argument("--dt", type=float, help="sample spacing")
    p.add_argument("--steps", type=int, help="number of samples")
    p.add_argument("--mode", choices=("ideal", "pulse"), help="ideal circuits or compiled pulse sequences")
    p.add_argument("--molecule", help=f"molecule JSON path or fixture name {FIXTURES} (pulse mode)")
    p.add_argument("--refocus", choices=("full", "coarse", "none"), help="refocusing scheme (pulse mode)")
    p.add_argument("--noise-std", type=float, help="Gaussian noise per real/imaginary part")
    p.add_argument("--seed", type=int, help="noise seed")
    p.add_argument("--out", help="signal CSV path")
    p.add_argument("--svg", help="optional SVG plot path")
    p.add_argument("--oracle", action="store_true", default=None, help="write exact values instead of simulating")
    p.add_argument("--digits", type=int, help="decimals written to CSV")
    if spectrum:
        p.add_argument("--spectrum-out", help="spectrum CSV path (default: <out>_dft.csv)")
        p.add_argument("--count", type=int, help="number of peaks to report")
        p.add_argument("--refine", action="store_true", default=None, help="sub-bin peak refinement")
        p.add_argument(
            "--energy-offset", choices=("mean", "sum"), help="constant energy term: (eps+eps_k0)/2 or eps+eps_k0"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fanosim", description="Fano-Anderson impurity simulation, NMR pulse compilation and spectral analysis."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlation", help="impurity correlation G(t) through the ancilla network")
    _experiment_flags(p, spectrum=False)
    p = sub.add_parser("spectrum", help="return amplitude S(t), its DFT and peak report")
    _experiment_flags(p, spectrum=True)

    p = sub.add_parser("compile", help="compile a circuit file to a pulse sequence")
    p.add_argument("circuit", help="circuit text file")
    p.add_argument("--molecule", required=True, help="molecule JSON path or fixture name")
    p.add_argument("--out", help="write the sequence here (default: stdout)")
    p.add_argument("--refocus", choices=("full", "coarse", "none"), default="full")
    p.add_argument("--pulse-duration", type=float, default=1e-3)
    p.add_argument("--block-duration", type=float)
    p.add_argument("--optimize", action="store_true", help="optimize block delays")

    p = sub.add_parser("verify", help="compile (or load) and verify a sequence against its circuit")
    p.add_argument("circuit", help="circuit text file")
    p.add_argument("--molecule", required=True, help="molecule JSON path or fixture name")
    p.add_argument("--sequence", help="sequence file (default: compile the circuit)")
    p.add_argument("--refocus", choices=("full", "coarse", "none"), default="full")
    p.add_argument("--init", help="initial basis state of the circuit qubits, e.g. 010")
    p.add_argument("--finite-pulses", action="store_true", help="integrate pulses over their duration")

    p = sub.add_parser("jw", help="print Jordan-Wigner images of fermion operators or states")
    p.add_argument("ops", nargs="*", help="operators: b, b+, c0, c0+, c1, ...")
    p.add_argument("--modes", type=int, default=2, help="total number of modes (impurity included)")
    p.add_argument("--state", help="comma-separated occupied modes, e.g. 1 or 0,2")
    return parser


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    cfg = dict(defaults)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if not cfg["dt"] > 0:
        raise ConfigError(f"dt must be positive, got {cfg['dt']}")
    if cfg["steps"] < 0:
        raise ConfigError(f"steps must be non-negative, got {cfg['steps']}")
    if cfg["noise_std"] < 0:
        raise ConfigError("noise_std must be non-negative")
    if cfg["mode"] == "pulse" and not cfg["molecule"]:
        raise ConfigError("pulse mode requires --molecule")
    return cfg


def _molecule(spec: str) -> Molecule:
    if spec in FIXTURES:
        return load_fixture(spec)
    return load_molecule(spec)


def _params(cfg: dict) -> ModelParams:
    return ModelParams(epsilon=float(cfg["eps"]), epsilon_k0=float(cfg["eps_k0"]), V=float(cfg["v"]))


def _run(cfg: dict, kind: str) -> ExperimentResult:
    p = _params(cfg)
    grid = time_grid(cfg["t_start"], cfg["dt"], cfg["steps"])
    if cfg["oracle"]:
        if kind == "correlation":
            values = oracle_correlation(p, grid) if grid.size else np.array([], dtype=complex)
        else:
            values = oracle_spectrum_signal(p, grid, cfg["energy_offset"]) if grid.size else np.array([], dtype=complex)
        noise = 0.0
        return ExperimentResult(grid, values, noise, noise, cfg["mode"])
    kwargs = {
        "mode": cfg["mode"],
        "noise_std": cfg["noise_std"],
        "seed": cfg["seed"],
        "molecule": _molecule(cfg["molecule"]) if cfg["mode"] == "pulse" else None,
        "compile_options": CompileOptions(refocus=cfg["refocus"]),
    }
    if kind == "correlation":
        return run_correlation_experiment(p, grid, **kwargs)
    return run_spectrum_experiment(p, grid, energy_offset=cfg["energy_offset"], **kwargs)


def cmd_correlation(args: argparse.Namespace) -> int:
    cfg = _resolve(args, CORRELATION_DEFAULTS)
    result = _run(cfg, "correlation")
    write_csv(cfg["out"], CSV_COLUMNS, result.rows(), cfg["digits"])
    if cfg["noise_std"] > 0 and not cfg["oracle"]:
        print(f"seed {cfg['seed']}")
    if cfg["svg"]:
        exact = correlation_closed_form(_params(cfg), result.t) if len(result) else np.array([])
        write_svg(
            cfg["svg"],
            [("t", result.t, {"|G| measured": np.abs(result.values), "|G| exact": np.abs(exact)})],
        )
    print(f"wrote {len(result)} samples to {cfg['out']}")
    return 0


def cmd_spectrum(args: argparse.Namespace) -> int:
    cfg = _resolve(args, SPECTRUM_DEFAULTS)
    p = _params(cfg)
    result = _run(cfg, "spectrum")
    write_csv(cfg["out"], CSV_COLUMNS, result.rows(), cfg["digits"])
    spectrum_out = cfg["spectrum_out"] or str(Path(cfg["out"]).with_suffix("")) + "_dft.csv"
    if cfg["noise_std"] > 0 and not cfg["oracle"]:
        print(f"seed {cfg['seed']}")
    if len(result) < 2:
        write_csv(spectrum_out, SPECTRUM_COLUMNS, [], cfg["digits"])
        print(f"wrote {len(result)} samples to {cfg['out']}; too few samples for a spectrum")
        return 0
    d = derive(p, degenerate="limit")
    offset = d.mean_energy if cfg["energy_offset"] == "mean" else 2 * d.mean_energy
    check_nyquist([offset - d.splitting, offset + d.splitting], cfg["dt"])
    spec = dft(result)
    write_csv(spectrum_out, SPECTRUM_COLUMNS, spec.rows(), cfg["digits"])
    report = find_peaks(spec, cfg["count"], cfg["refine"])
    noise = 0.0 if cfg["oracle"] else cfg["noise_std"]
    print(f"per-bin std {propagate_errors(noise, len(result)):.6f}")
    for i, peak in enumerate(report.peaks, 1):
        print(f"peak {i}: eta = {peak.frequency:.6f} +/- {peak.resolution:.6f}, weight {peak.weight:.6f}")
    if not report.complete:
        print(f"only {len(report.peaks)} of {cfg['count']} requested peaks found")
    if cfg["svg"]:
        write_svg(
            cfg["svg"],
            [
                ("t", result.t, {"Re S": result.values.real, "Im S": result.values.imag}),
                ("eta", spec.eta, {"Re S~": spec.amplitudes.real, "Im S~": spec.amplitudes.imag}),
            ],
        )
    print(f"wrote {len(result)} samples to {cfg['out']} and spectrum to {spectrum_out}")
    return 0


def _load_circuit(path: str) -> Circuit:
    return Circuit.loads(Path(path).read_text())


def cmd_compile(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    m = _molecule(args.molecule)
    opts = CompileOptions(args.pulse_duration, args.refocus, args.block_duration)
    seq = compile_circuit(circuit, m, opts)
    if args.optimize:
        result = optimize_delays(seq, m, opts)
        seq = result.sequence
        print(f"residual coupling objective {result.before:.6g} -> {result.after:.6g}", file=sys.stderr)
    report = budget_check(seq, m)
    text = seq.dumps()
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    print(
        f"pulses {report.pulses}, ising blocks {report.ising_blocks}, duration {report.duration:.6g} s",
        file=sys.stderr,
    )
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    m = _molecule(args.molecule)
    if args.sequence:
        seq = PulseSequence.loads(Path(args.sequence).read_text())
    else:
        seq = compile_circuit(circuit, m, CompileOptions(refocus=args.refocus))
    init = basis_state(args.init) if args.init else None
    report = verify(seq, m, circuit, init, instantaneous=not args.finite_pulses)
    print(f"fidelity {report.fidelity:.12f}")
    return 0


def _parse_op(token: str) -> FermionOp:
    dagger = token.endswith("+")
    name = token.rstrip("+")
    if name == "b":
        return FermionOp(0, dagger)
    if name.startswith("c") and name[1:].isdigit():
        return FermionOp(int(name[1:]) + 1, dagger)
    raise ValueError(f"cannot parse operator {token!r}; use b, b+, c0, c0+, ...")


def cmd_jw(args: argparse.Namespace) -> int:
    if not args.ops and args.state is None:
        raise ValueError("give operators and/or --state")
    for token in args.ops:
        op = _parse_op(token)
        print(f"{token} -> {describe(jw_map(op, args.modes))}")
    if args.state is not None:
        occupied = [int(x) for x in args.state.split(",") if x.strip()]
        occ = OccupationState(occupied, args.modes)
        index, sign = jw_state(occ)
        bits = format(index, f"0{args.modes}b")
        print(f"state {sorted(occ.occupied)} -> {'+' if sign > 0 else '-'}|{bits}>")
    return 0


COMMANDS = {
    "correlation": cmd_correlation,
    "spectrum": cmd_spectrum,
    "compile": cmd_compile,
    "verify": cmd_verify,
    "jw": cmd_jw,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
