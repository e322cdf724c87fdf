"""Command-line frontend.

Exit codes: 0 success, 2 input validation failure, 3 domain invariant
violation, 4 numerical non-convergence.  Indices are 0-based in files and
in json/csv output, 1-based in the human-readable tables.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

from . import continuum, density, entropy, simulate, states
from .counting import CountingFunction, effnum, validate_counting_function, weights_from_probs
from .errors import ConvergenceError, InvalidInput, InvariantViolation
from .io import (
    csv_text,
    json_text,
    load_decomposition,
    load_density,
    load_dfd_family,
    load_grid_wavefunction,
    load_refine_problem,
    load_state,
    parse_counting_selector,
)


class CommandResult:
    def __init__(self, payload: dict, csv_header: list[str], csv_rows: list[list], table: str):
        self.payload = payload
        self.csv_header = csv_header
        self.csv_rows = csv_rows
        self.table = table


def _kv_table(title: str, pairs: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in pairs)
    lines = [title]
    lines += [f"  {k:<{width}}  {v}" for k, v in pairs]
    return "\n".join(lines) + "\n"


def _f(x: float) -> str:
    return f"{x:.12g}"


def _cmd_mu(args) -> CommandResult:
    psi = load_state(args.state)
    dec, basis, _ = load_decomposition(args.decomposition, psi.dim)
    c = parse_counting_selector(args.cf)
    probs = states.subspace_probs(psi, dec, basis)
    value = states.mu_uncertainty(psi, dec, basis, c)
    minimal = states.mu_uncertainty_min(psi, dec, basis)
    payload = {
        "command": "mu",
        "n": psi.dim,
        "m": dec.m_count,
        "counting_function": c.label,
        "block_probs": probs.p,
        "mu_uncertainty": value,
        "mu_uncertainty_min": minimal,
    }
    header = ["block", "probability"]
    rows = [[m, p] for m, p in enumerate(probs.p.tolist())]
    rows.append(["mu_uncertainty", value])
    rows.append(["mu_uncertainty_min", minimal])
    pairs = [("dimension N", str(psi.dim)), ("blocks M", str(dec.m_count)),
             ("kernel", c.label)]
    pairs += [(f"p[{m + 1}]", _f(p)) for m, p in enumerate(probs.p.tolist())]
    pairs += [("mu-uncertainty", _f(value)), ("minimal (star)", _f(minimal))]
    return CommandResult(payload, header, rows,
                         _kv_table("measurement uncertainty (blocks 1-based)", pairs))


def _parse_log_base(text: str) -> tuple[str, float]:
    """Entropies are natural-log internally; this is display-only."""
    text = text.strip()
    if text == "e":
        return "e", 1.0
    try:
        base = float(text)
    except ValueError as exc:
        raise InvalidInput(f'--log-base must be "e" or a number > 1, got {text!r}') from exc
    if base <= 1.0:
        raise InvalidInput(f"--log-base must exceed 1, got {base}")
    return text, math.log(base)


def _cmd_qnum(args) -> CommandResult:
    rho = load_density(args.density)
    c = parse_counting_selector(args.cf)
    base_label, divisor = _parse_log_base(args.log_base)
    spectrum = density.hermitian_eigen(rho).eigenvalues
    value = density.quantum_effnum(rho, c)
    minimal = density.quantum_effnum_min(rho)
    payload = {
        "command": "qnum",
        "n": rho.dim,
        "counting_function": c.label,
        "log_base": base_label,
        "spectrum": spectrum,
        "qnum": value,
        "qnum_min": minimal,
        "entropy": density.quantum_mu_entropy(rho, c) / divisor,
        "entropy_min": density.quantum_mu_entropy_min(rho) / divisor,
    }
    header = ["eigenvalue_rank", "eigenvalue"]
    rows = [[i, v] for i, v in enumerate(spectrum.tolist())]
    rows.append(["qnum", value])
    rows.append(["qnum_min", minimal])
    pairs = [("dimension N", str(rho.dim)), ("kernel", c.label)]
    pairs += [(f"rho[{i + 1}]", _f(v)) for i, v in enumerate(spectrum.tolist())]
    pairs += [
        ("state components", _f(value)),
        ("minimal (star)", _f(minimal)),
        ("entropy", _f(payload["entropy"])),
        ("entropy (star)", _f(payload["entropy_min"])),
    ]
    return CommandResult(payload, header, rows,
                         _kv_table("density-matrix state content (ranks 1-based)", pairs))


def _parse_dims(text: str) -> density.BipartiteStructure:
    match = re.fullmatch(r"(\d+)x(\d+)", text.strip())
    if not match:
        raise InvalidInput(f'--dims must look like "2x3", got {text!r}')
    return density.BipartiteStructure(int(match.group(1)), int(match.group(2)))


def _cmd_entangle(args) -> CommandResult:
    psi = load_state(args.state)
    bp = _parse_dims(args.dims)
    c = parse_counting_selector(args.cf)
    side_a = density.mu_entanglement(psi, bp, c, side="A")
    side_b = density.mu_entanglement(psi, bp, c, side="B")
    min_a = density.mu_entanglement_min(psi, bp, side="A")
    min_b = density.mu_entanglement_min(psi, bp, side="B")
    payload = {
        "command": "entangle",
        "dims": [bp.dim_a, bp.dim_b],
        "counting_function": c.label,
        "side_a": side_a,
        "side_b": side_b,
        "agreement": abs(side_a - side_b),
        "side_a_min": min_a,
        "side_b_min": min_b,
        "agreement_min": abs(min_a - min_b),
    }
    header = ["quantity", "value"]
    rows = [["side_a", side_a], ["side_b", side_b], ["agreement", abs(side_a - side_b)],
            ["side_a_min", min_a], ["side_b_min", min_b], ["agreement_min", abs(min_a - min_b)]]
    pairs = [
        ("partition", f"{bp.dim_a} x {bp.dim_b}"),
        ("kernel", c.label),
        ("entanglement (A kept)", _f(side_a)),
        ("entanglement (B kept)", _f(side_b)),
        ("side agreement", f"{abs(side_a - side_b):.3e}"),
        ("minimal (A kept)", _f(min_a)),
        ("minimal (B kept)", _f(min_b)),
    ]
    return CommandResult(payload, header, rows, _kv_table("bipartite state sharing", pairs))


def _cmd_effvol(args) -> CommandResult:
    psi = load_grid_wavefunction(args.wavefunction)
    c = parse_counting_selector(args.cf)
    value = continuum.effective_volume(psi, c)
    minimal = continuum.effective_volume(psi, CountingFunction.minimal())
    total = psi.grid.total_volume
    payload = {
        "command": "effvol",
        "d": psi.grid.d,
        "cells": psi.grid.ncells,
        "total_volume": total,
        "counting_function": c.label,
        "effective_volume": value,
        "effective_volume_min": minimal,
        "fraction": value / total,
    }
    header = ["quantity", "value"]
    rows = [["total_volume", total], ["effective_volume", value],
            ["effective_volume_min", minimal], ["fraction", value / total]]
    pairs = [
        ("dimension D", str(psi.grid.d)),
        ("cells", str(psi.grid.ncells)),
        ("kernel", c.label),
        ("box volume", _f(total)),
        ("effective volume", _f(value)),
        ("minimal (star)", _f(minimal)),
        ("occupied fraction", _f(value / total)),
    ]
    return CommandResult(payload, header, rows, _kv_table("effective volume", pairs))


def _cmd_refine(args) -> CommandResult:
    problem, description = load_refine_problem(args.problem)
    c = parse_counting_selector(args.cf)
    result = continuum.refine_sequence(problem, args.levels, c)
    payload = {
        "command": "refine",
        "problem": description,
        "counting_function": c.label,
        "levels": [
            {"level": r.level, "m_count": r.m_count, "spacing": r.spacing, "ratio": r.ratio}
            for r in result.rows
        ],
        "extrapolated": result.extrapolated,
        "residual": result.residual,
        "fit_order": result.fit_order,
        "fit_window": result.window,
    }
    header = ["level", "m_count", "spacing", "ratio"]
    rows = [[r.level, r.m_count, r.spacing, r.ratio] for r in result.rows]
    rows.append(["extrapolated", "", "", result.extrapolated])
    lines = [f"refinement of {description} ({c.label})"]
    lines += [
        f"  level {r.level}: M = {r.m_count:<8d} h = {r.spacing:<12.6g} F = {_f(r.ratio)}"
        for r in result.rows
    ]
    lines.append(f"  extrapolated F = {_f(result.extrapolated)} "
                 f"(order {result.fit_order}, window {result.window}, "
                 f"residual {result.residual:.3e})")
    return CommandResult(payload, header, rows, "\n".join(lines) + "\n")


def _cmd_simulate(args) -> CommandResult:
    psi = load_state(args.state)
    dec, basis, eigtuples = load_decomposition(args.decomposition, psi.dim)
    c = parse_counting_selector(args.cf)
    trial_counts = [int(t) for t in str(args.trials).split(",") if t]
    if not trial_counts:
        raise InvalidInput("--trials must name at least one trial count")
    probs = states.subspace_probs(psi, dec, basis)
    exact = effnum(weights_from_probs(probs), c)
    rows = []
    entries = []
    for t in trial_counts:
        seq = simulate.sample_outcomes(psi, dec, basis, t, args.seed, eigtuples=eigtuples)
        est = simulate.plugin_mu_estimate(seq, dec.m_count, c)
        deviation = abs(est.estimate - exact)
        entries.append({"trials": t, "estimate": est.estimate, "stderr": est.stderr,
                        "exact": exact, "abs_error": deviation})
        rows.append([t, est.estimate, est.stderr, exact, deviation])
    payload = {
        "command": "simulate",
        "m": dec.m_count,
        "seed": args.seed,
        "generator": simulate.GENERATOR_ID,
        "counting_function": c.label,
        "exact": exact,
        "runs": entries,
    }
    header = ["trials", "estimate", "stderr", "exact", "abs_error"]
    lines = [f"measurement simulation (seed {args.seed}, {simulate.GENERATOR_ID})"]
    lines += [
        f"  T = {e['trials']:<9d} estimate = {_f(e['estimate'])} "
        f"+/- {e['stderr']:.3e}   exact = {_f(exact)}"
        for e in entries
    ]
    return CommandResult(payload, header, rows, "\n".join(lines) + "\n")


def _cmd_dfd(args) -> CommandResult:
    family = load_dfd_family(args.family)
    c = parse_counting_selector(args.cf)
    result = entropy.dfd_gamma_scan(family, c)
    payload = {
        "command": "dfd",
        "counting_function": c.label,
        "steps": [{"n": s.n, "ratio": s.ratio, "k_eq": s.k_eq} for s in result.steps],
        "gamma": result.gamma,
        "residual": result.residual,
        "fit_window": result.window,
    }
    header = ["n", "ratio", "k_eq"]
    rows = [[s.n, s.ratio, s.k_eq] for s in result.steps]
    rows.append(["gamma", result.gamma, ""])
    lines = [f"degree-of-freedom density scan ({c.label})"]
    lines += [f"  n = {s.n:<9d} F = {_f(s.ratio):<22} k_eq = {_f(s.k_eq)}" for s in result.steps]
    lines.append(f"  gamma = {_f(result.gamma)} (window {result.window}, "
                 f"residual {result.residual:.3e})")
    return CommandResult(payload, header, rows, "\n".join(lines) + "\n")


_LOADERS = {
    "amps": ("state", load_state),
    "rows": ("density", load_density),
    "values": ("grid wave function", load_grid_wavefunction),
    "kind": ("problem/family", None),
}


def _cmd_check(args) -> CommandResult:
    c = parse_counting_selector(args.cf)
    report = validate_counting_function(c)
    targets = []
    failures = 0
    for path in args.files:
        try:
            doc = json.loads(open(path).read())
        except Exception as exc:
            targets.append({"path": path, "valid": False, "detail": str(exc)})
            failures += 1
            continue
        try:
            if "amps" in doc:
                load_state(path)
                kind = "state"
            elif "rows" in doc and "dim" in doc:
                load_density(path)
                kind = "density"
            elif "groups" in doc:
                dim = max(i for g in doc["groups"] for i in g) + 1
                load_decomposition(path, dim)
                kind = "decomposition"
            elif "values" in doc:
                load_grid_wavefunction(path)
                kind = "grid wave function"
            elif doc.get("kind") in ("constant", "half-box-1d", "gaussian-1d"):
                load_refine_problem(path)
                kind = "refinement problem"
            elif doc.get("kind") in ("uniform-power", "explicit"):
                load_dfd_family(path)
                kind = "family"
            else:
                raise InvalidInput("unrecognized document schema")
            targets.append({"path": path, "valid": True, "detail": kind})
        except (InvalidInput, InvariantViolation) as exc:
            targets.append({"path": path, "valid": False, "detail": str(exc)})
            failures += 1
    payload = {
        "command": "check",
        "counting_function": c.label,
        "kernel_checks": [
            {"name": chk.name, "passed": chk.passed, "detail": chk.detail}
            for chk in report.checks
        ],
        "kernel_passed": report.passed,
        "files": targets,
    }
    header = ["target", "passed", "detail"]
    rows = [[chk.name, chk.passed, chk.detail] for chk in report.checks]
    rows += [[t["path"], t["valid"], t["detail"]] for t in targets]
    lines = [f"kernel {c.label}:"]
    lines.append("  " + report.summary().replace("\n", "\n  "))
    for t in targets:
        status = "ok" if t["valid"] else "INVALID"
        lines.append(f"  {t['path']}: {status} ({t['detail']})")
    if not report.passed or failures:
        raise InvalidInput("\n".join(lines))
    return CommandResult(payload, header, rows, "\n".join(lines) + "\n")


def _render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return json_text(result.payload) + "\n"
    if fmt == "csv":
        return csv_text(result.csv_header, result.csv_rows)
    return result.table


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    tmp = out + ".tmp"
    with open(tmp, "w") as handle:
        handle.write(text)
    os.replace(tmp, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effnum",
        description="Effective-number analysis of states, densities and distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cf", default="star",
                       help='counting kernel: "star" or "alpha=<x>" (default star)')
        p.add_argument("--format", choices=("table", "csv", "json"), default="table")
        p.add_argument("--out", default=None, help="write output to this path")

    p = sub.add_parser("mu", help="measurement uncertainty of a state")
    p.add_argument("state")
    p.add_argument("decomposition")
    common(p)
    p.set_defaults(handler=_cmd_mu)

    p = sub.add_parser("qnum", help="state content of a density matrix")
    p.add_argument("density")
    p.add_argument("--log-base", default="e", dest="log_base",
                   help='entropy display base: "e" (default), 2, or any base > 1')
    common(p)
    p.set_defaults(handler=_cmd_qnum)

    p = sub.add_parser("entangle", help="bipartite state sharing of a pure state")
    p.add_argument("state")
    p.add_argument("--dims", required=True, help="factor dimensions, e.g. 2x3")
    common(p)
    p.set_defaults(handler=_cmd_entangle)

    p = sub.add_parser("effvol", help="effective volume of a grid wave function")
    p.add_argument("wavefunction")
    common(p)
    p.set_defaults(handler=_cmd_effvol)

    p = sub.add_parser("refine", help="refinement scan with extrapolation")
    p.add_argument("problem")
    p.add_argument("--levels", type=int, default=5)
    common(p)
    p.set_defaults(handler=_cmd_refine)

    p = sub.add_parser("simulate", help="Monte Carlo measurement simulation")
    p.add_argument("state")
    p.add_argument("decomposition")
    p.add_argument("--trials", default="100000",
                   help="trial count, or comma-separated list for a convergence table")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("dfd", help="degree-of-freedom density scan of a family")
    p.add_argument("family")
    common(p)
    p.set_defaults(handler=_cmd_dfd)

    p = sub.add_parser("check", help="validate a kernel and input files")
    p.add_argument("files", nargs="*")
    common(p)
    p.set_defaults(handler=_cmd_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.handler(args)
        text = _render(result, args.format)
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (InvalidInput, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
