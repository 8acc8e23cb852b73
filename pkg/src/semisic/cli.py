"""Command-line front end: ``semisic {povm,compile,simulate,selftest}``.

Every command prints one JSON run report on stdout (command, inputs,
outputs, residuals, version); progress and errors go to stderr.  Exit codes:
0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .optics import NoiseModel, TemplateInsufficientError, angle_rows, apply_noise, realize_schedule
from .povm import NotRankOneError, OutOfRangeError, b_label, build_semi_sic, parse_b, verify_povm
from .qmath import PureQubit
from .selftest import (
    FitFailedError,
    WitnessSpec,
    default_witness,
    fit_witness,
    optimal_scenario,
    q_max,
    sample_witness_with_counts,
    seesaw_optimize,
    semi_sic_residual,
    witness_from_statistics,
    noisy_statistics,
)
from .serialize import dumps, povm_from_dict, povm_to_dict, state_to_json
from .walk import CoinSchedule, CompilationFailedError, compile_povm, effective_povm, port_probabilities

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
PORTS = (5, 3, 1, -1)


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        return dumps({"command": self.command, "inputs": self.inputs, "outputs": self.outputs,
                      "residuals": self.residuals, "version": self.version})


def _parse_b(text: str) -> float:
    try:
        return parse_b(text)
    except (OutOfRangeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _parse_state(text: str) -> PureQubit:
    try:
        theta, phi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--state expects 'theta,phi' in radians, got {text!r}") from exc
    return PureQubit.from_angles(theta, phi)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_noise(path: str | None) -> NoiseModel | None:
    if path is None:
        return None
    try:
        return NoiseModel.from_dict(_load_json(path))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad noise config: {exc}") from exc


def _write_csv(path: str, header: list[str], rows: list) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------- commands


def cmd_povm(args) -> RunReport:
    B = _parse_b(args.B)
    povm = build_semi_sic(args.B)
    report = RunReport("povm", {"B": b_label(args.B), "verify": args.verify})
    report.outputs["povm"] = povm_to_dict(povm)
    if args.verify:
        v = verify_povm(povm, B)
        report.outputs["verification"] = v.to_dict()
        report.residuals = {"max_residual": v.max_residual}
        if not v.ok:
            report.outputs["failed"] = v.failures()
    if args.json:
        Path(args.json).write_text(dumps(povm_to_dict(povm)) + "\n")
    if args.csv:
        rows = [[i + 1, _fmt(el.weight), *(_fmt(c) for c in el.bloch)] for i, el in enumerate(povm.elements)]
        _write_csv(args.csv, ["element", "trace", "bloch_x", "bloch_y", "bloch_z"], rows)
    return report


def cmd_compile(args) -> RunReport:
    if (args.B is None) == (args.povm is None):
        raise UsageError("give exactly one of --B or --povm")
    if args.B is not None:
        _parse_b(args.B)
        target = build_semi_sic(args.B)
        inputs = {"B": b_label(args.B)}
    else:
        try:
            target = povm_from_dict(_load_json(args.povm))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad POVM file: {exc}") from exc
        inputs = {"povm": povm_to_dict(target)}
    inputs["angles"] = args.angles
    try:
        schedule = compile_povm(target)
    except NotRankOneError as exc:
        raise UsageError(str(exc)) from exc
    except CompilationFailedError as exc:
        raise NumericalFailure(str(exc)) from exc
    residual = effective_povm(schedule).residual_at(PORTS, target)
    report = RunReport("compile", inputs)
    report.outputs["schedule"] = schedule.to_dict()
    report.outputs["ports"] = list(PORTS)
    report.residuals["round_trip"] = residual
    print(f"round-trip residual {residual:.3e}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(dumps(schedule.to_dict()) + "\n")
    if args.angles:
        try:
            realized, chains = realize_schedule(schedule)
        except TemplateInsufficientError as exc:
            raise NumericalFailure(str(exc)) from exc
        label = inputs.get("B", "")
        rows = angle_rows(chains, label)
        report.outputs["angles"] = rows
        report.residuals["plates"] = effective_povm(realized).residual_at(PORTS, target)
        if args.angles_csv:
            _write_csv(args.angles_csv, ["B", "label", "kind", "angle_deg"],
                       [[r["B"], r["label"], r["kind"], _fmt(r["angle_deg"])] for r in rows])
    return report


def cmd_simulate(args) -> RunReport:
    if (args.B is None) == (args.schedule is None):
        raise UsageError("give exactly one of --B or --schedule")
    psi = _parse_state(args.state)
    model = _load_noise(args.noise)
    if args.shots < 0:
        raise UsageError("--shots must be >= 0")
    inputs = {"state": args.state, "shots": args.shots, "seed": args.seed,
              "noise": None if model is None else model.to_dict()}
    if args.B is not None:
        _parse_b(args.B)
        try:
            schedule = compile_povm(build_semi_sic(args.B))
        except CompilationFailedError as exc:
            raise NumericalFailure(str(exc)) from exc
        ports = list(PORTS)
        inputs["B"] = b_label(args.B)
    else:
        try:
            schedule = CoinSchedule.from_dict(_load_json(args.schedule))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad schedule file: {exc}") from exc
        ports = effective_povm(schedule).positions
        inputs["schedule"] = schedule.to_dict()
    exact = port_probabilities(schedule, psi, ports)
    report = RunReport("simulate", inputs)
    report.outputs["ports"] = ports
    report.outputs["state"] = state_to_json(psi)
    report.outputs["exact"] = exact.tolist()
    report.residuals["normalization"] = abs(float(exact.sum()) - 1.0)
    probs = exact
    if model is not None:
        probs = apply_noise(exact, model, schedule, psi)
        report.outputs["noisy"] = probs.tolist()
        report.residuals["noise_shift"] = float(np.max(np.abs(probs - exact)))
    sampled = stderr = None
    if args.shots > 0:
        rng = np.random.default_rng(args.seed)
        counts = rng.multinomial(args.shots, probs / probs.sum())
        sampled = counts / args.shots
        stderr = np.sqrt(sampled * (1 - sampled) / args.shots)
        report.outputs["counts"] = counts.tolist()
        report.outputs["sampled"] = sampled.tolist()
        report.outputs["stderr"] = stderr.tolist()
    if args.fig3_csv:
        label = inputs.get("B", "")
        rows = []
        for i, p in enumerate(probs):
            rows.append([label, i + 1, _fmt(p), "" if sampled is None else _fmt(sampled[i]),
                         "" if stderr is None else _fmt(stderr[i])])
        _write_csv(args.fig3_csv, ["B", "outcome", "theory", "sampled", "stderr"], rows)
    return report


def cmd_selftest(args) -> RunReport:
    _parse_b(args.B)
    model = _load_noise(args.noise)
    if args.shots < 0:
        raise UsageError("--shots must be >= 0")
    inputs = {"B": b_label(args.B), "shots": args.shots, "seed": args.seed, "scenario": args.scenario,
              "fit": args.fit, "noise": None if model is None else model.to_dict()}
    try:
        if args.witness:
            try:
                spec = WitnessSpec.from_dict(_load_json(args.witness))
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"bad witness file: {exc}") from exc
        elif args.fit:
            print(f"fitting witness for B={b_label(args.B)}", file=sys.stderr)
            spec = fit_witness(args.B, seed=args.seed, restarts=args.restarts)
        else:
            spec = default_witness(args.B)
    except FitFailedError as exc:
        raise NumericalFailure(str(exc)) from exc
    inputs["witness"] = {"omega": spec.omega.tolist(), "k": spec.k}
    B = parse_b(args.B)
    if args.scenario == "seesaw":
        inputs["restarts"] = args.restarts
        print(f"see-saw with {args.restarts} restarts", file=sys.stderr)
        scenario, opt = seesaw_optimize(spec, restarts=args.restarts, seed=args.seed, threads=args.threads)
        scenario = type(scenario)(scenario.preparations, scenario.observables, scenario.povm4, B)
    else:
        scenario = optimal_scenario(args.B, spec)
    report = RunReport("selftest", inputs)
    if args.shots == 0:
        result = witness_from_statistics(noisy_statistics(scenario, model), spec, B)
        result.stderr = 0.0
        counts = None
    else:
        result, counts = sample_witness_with_counts(scenario, spec, args.shots, model, seed=args.seed)
    report.outputs["result"] = result.to_dict()
    report.outputs["scenario"] = scenario.to_dict()
    report.residuals["semi_sic"] = semi_sic_residual(scenario.povm4, B)
    report.residuals["q_gap"] = result.gap
    if counts is not None and args.counts_csv:
        _write_csv(args.counts_csv, ["x", "y", "b", "count"], counts.rows())
    if args.fig4_csv:
        stderr = "" if result.stderr is None else _fmt(result.stderr)
        _write_csv(args.fig4_csv, ["B", "W", "stderr", "Q"], [[b_label(args.B), _fmt(result.w), stderr, _fmt(q_max(B))]])
    return report


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semisic", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("povm", help="construct (and verify) a semi-SIC POVM")
    p.add_argument("--B", required=True, help="pairwise overlap, e.g. 1/13 or 0.07")
    p.add_argument("--json", metavar="FILE", help="also write the POVM JSON to FILE")
    p.add_argument("--csv", metavar="FILE", help="write traces and Bloch vectors as CSV")
    p.add_argument("--verify", action="store_true", help="run the family checks; exit 3 if any fails")
    p.set_defaults(func=cmd_povm)

    p = sub.add_parser("compile", help="compile a POVM into a five-step coin schedule")
    p.add_argument("--B")
    p.add_argument("--povm", metavar="FILE", help="POVM JSON as written by 'povm --json'")
    p.add_argument("--angles", action="store_true", help="also derive waveplate angles")
    p.add_argument("--angles-csv", metavar="FILE", help="write the angle table as CSV (with --angles)")
    p.add_argument("--out", metavar="FILE", help="write the schedule JSON to FILE")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="walk statistics for an input state")
    p.add_argument("--B")
    p.add_argument("--schedule", metavar="FILE")
    p.add_argument("--state", default=f"{math.pi / 2!r},0", help="theta,phi in radians (default |+>)")
    p.add_argument("--shots", type=int, default=0, help="0 = exact probabilities only")
    p.add_argument("--noise", metavar="FILE", help="NoiseModel JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fig3-csv", metavar="FILE")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="evaluate or estimate the self-testing witness")
    p.add_argument("--B", required=True)
    p.add_argument("--shots", type=int, default=0, help="shots per setting; 0 = exact value")
    p.add_argument("--noise", metavar="FILE", help="NoiseModel JSON")
    p.add_argument("--witness", metavar="FILE", help="WitnessSpec JSON (default: shipped spec)")
    p.add_argument("--fit", action="store_true", help="fit a fresh witness first")
    p.add_argument("--scenario", choices=("optimal", "seesaw"), default="optimal",
                   help="ideal semi-SIC strategy or the see-saw optimum")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--counts-csv", metavar="FILE")
    p.add_argument("--fig4-csv", metavar="FILE")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(report.to_json())
    if report.outputs.get("failed"):
        print(f"failed checks: {report.outputs['failed']}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
