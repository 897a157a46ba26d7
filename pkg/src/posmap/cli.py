"""Command-line workbench.

    posmap choi --in id2.json
    posmap check --cone blockpos --special 1,1,0.6,0.5
    posmap woronowicz --in id3.json --json report.json
    posmap pipeline-marciniak --in s.json --seed 7

Exit codes: 0 when a verdict was computed (a "not member" verdict included),
1 for usage, parse and dimension errors, 2 when a rank computation is
unstable between the budget and twice the budget.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import cones
from .bidual import default_budget, probe_bidual
from .linalg import DimensionError, Tolerance, pairing
from .maps import apply, pairing_maps, svd_reduce
from .pipeline import RankInstabilityError, pipeline_marciniak
from .serialize import ParseError, loads, map_from_json, matrix_from_json, matrix_to_json, vector_to_json
from .woronowicz import woronowicz_verdict

COMMANDS = ("choi", "apply", "pair", "check", "bidual", "woronowicz", "reduce", "pipeline-marciniak")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    env = os.environ.get("POSMAP_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"POSMAP_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="infile", help="input JSON file (default: stdin)")
    common.add_argument("--json", dest="json_out", help="write the machine-readable report here")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 42, or $POSMAP_SEED)")
    common.add_argument("--budget", type=int, default=None, help="zero-variety sample budget")
    common.add_argument("--tol-rank", type=float, default=1e-9)
    common.add_argument("--tol-entry", type=float, default=1e-9)
    common.add_argument("--restarts", type=int, default=cones.DEFAULT_RESTARTS)
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the report")

    parser = argparse.ArgumentParser(prog="posmap", description="Positive maps workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("choi", parents=[common], help="print the Choi matrix of a map")
    sub.add_parser("apply", parents=[common], help='apply a map: {"map": ..., "a": ...}')
    sub.add_parser("pair", parents=[common], help='pair {"a", "b"} matrices or {"psi", "phi"} maps')
    check = sub.add_parser("check", parents=[common], help="cone membership")
    check.add_argument("--cone", required=True, choices=["positive", "cp", "sp", "blockpos"])
    check.add_argument("--special", help="a,b,alpha,beta for the closed-form 4x4 test")
    sub.add_parser("bidual", parents=[common], help="bi-dual face dimension of a map")
    sub.add_parser("woronowicz", parents=[common], help="kernel criterion report for a map")
    sub.add_parser("reduce", parents=[common], help="s = u sigma v^* reduction of a matrix")
    sub.add_parser("pipeline-marciniak", parents=[common], help="exposedness chain for Ad_s")
    return parser


def _read_input(args):
    if args.infile is None:
        return loads(sys.stdin.read())
    try:
        with open(args.infile) as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read {args.infile}: {err.strerror}") from None
    return loads(text)


def _parse_special(text: str) -> cones.SpecialWitnessForm:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--special takes a,b,alpha,beta")
    try:
        a, b = float(parts[0]), float(parts[1])
        alpha, beta = complex(parts[2].replace(" ", "")), complex(parts[3].replace(" ", ""))
    except ValueError:
        raise UsageError(f"--special: cannot parse {text!r}") from None
    return cones.SpecialWitnessForm(a, b, alpha, beta)


def _complex_json(z) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _verdict_json(v: cones.ConeVerdict) -> dict:
    out = {"member": v.member, "margin": v.margin, "method": v.method.value}
    if v.certificate is not None:
        out["certificate"] = vector_to_json(v.certificate)
    return out


def _verdict_text(v: cones.ConeVerdict) -> str:
    return f"{'member' if v.member else 'not member'}, margin {v.margin:.6g} ({v.method.value})"


def _run_check(args, tol, seed, payload):
    if args.cone == "blockpos":
        if args.special:
            form = _parse_special(args.special)
            verdict = cones.block_positive_special(form, tol)
        else:
            rho = matrix_from_json(payload.get("rho") if isinstance(payload, dict) else None, "$.rho")
            m, n = payload.get("m"), payload.get("n")
            if not (isinstance(m, int) and isinstance(n, int) and m * n == rho.shape[0] == rho.shape[1]):
                raise DimensionError(f"rho of shape {rho.shape} does not split as m={m}, n={n}")
            value, (xi, eta) = cones.min_product_expectation(rho, m, n, args.restarts, seed=seed, tol=tol)
            member = value >= -tol.entry_tol
            verdict = cones.ConeVerdict(member, value, cones.Method.ALTERNATING_MINIMIZATION,
                                        None if member else np.kron(xi, eta))
    else:
        phi = map_from_json(payload)
        if args.cone == "positive":
            verdict = cones.is_positive_map(phi, args.restarts, seed, tol)
        elif args.cone == "cp":
            verdict = cones.is_completely_positive(phi, tol)
        else:
            verdict = cones.is_superpositive_2x2(phi, tol)
    return _verdict_json(verdict), _verdict_text(verdict)


def run(args, tol: Tolerance, seed: int):
    """Returns (input payload, results, human text)."""
    cmd = args.command
    needs_input = not (cmd == "check" and args.special)
    payload = _read_input(args) if needs_input else None

    if cmd == "choi":
        phi = map_from_json(payload)
        with np.printoptions(precision=6, suppress=True, linewidth=160):
            text = f"Choi matrix of M_{phi.m} -> M_{phi.n}:\n{phi.choi}"
        return payload, {"m": phi.m, "n": phi.n, "choi": matrix_to_json(phi.choi)}, text

    if cmd == "apply":
        phi = map_from_json(payload.get("map") if isinstance(payload, dict) else None, "$.map")
        a = matrix_from_json(payload.get("a"), "$.a")
        image = apply(phi, a)
        with np.printoptions(precision=6, suppress=True, linewidth=160):
            text = str(image)
        return payload, {"image": matrix_to_json(image)}, text

    if cmd == "pair":
        if not isinstance(payload, dict):
            raise ParseError("$: expected an object")
        if "psi" in payload or "phi" in payload:
            value = pairing_maps(map_from_json(payload.get("psi"), "$.psi"),
                                 map_from_json(payload.get("phi"), "$.phi"))
        else:
            value = pairing(matrix_from_json(payload.get("a"), "$.a"), matrix_from_json(payload.get("b"), "$.b"))
        return payload, {"pairing": _complex_json(value)}, f"pairing = {complex(value):.12g}"

    if cmd == "check":
        results, text = _run_check(args, tol, seed, payload)
        return payload, {"cone": args.cone, **results}, text

    if cmd == "bidual":
        phi = map_from_json(payload)
        budget = default_budget(phi.m, phi.n) if args.budget is None else args.budget
        probe = probe_bidual(phi, budget, seed, tol, check_stability=True)
        if not probe.stable:
            raise RankInstabilityError("bidual", (probe.dimension, probe.dimension_at_double))
        results = {
            "dimension": probe.dimension,
            "dimension_at_double_budget": probe.dimension_at_double,
            "budget": budget,
            "samples": probe.sample_count,
            "exposed": probe.exposed,
        }
        if probe.exposed:
            status = f"exposed (numerical certificate at budget {budget})"
        else:
            status = f"not certified exposed at budget {budget}"
        return payload, results, f"bi-dual dimension {probe.dimension}: {status}"

    if cmd == "woronowicz":
        phi = map_from_json(payload)
        rep = woronowicz_verdict(phi, args.budget, seed, tol)
        results = rep.as_dict()
        text = (f"dim_N = {rep.dim_N}, dim_ker = {rep.dim_ker_hat}, unital = {rep.unital}, "
                f"commutant = {rep.commutant_dim}, verdict {rep.verdict.value}")
        return payload, results, text

    if cmd == "reduce":
        s = matrix_from_json(payload)
        u, sigma, v, r = svd_reduce(s, tol)
        residual = float(np.max(np.abs(u @ sigma @ v.conj().T - s)))
        results = {"rank": r, "u": matrix_to_json(u), "sigma": matrix_to_json(sigma),
                   "v": matrix_to_json(v), "reconstruction_residual": residual}
        return payload, results, f"rank {r}, reconstruction residual {residual:.3g}"

    s = matrix_from_json(payload)
    result = pipeline_marciniak(s, args.budget, seed, tol)
    lines = [f"Ad_s for s of shape {s.shape[0]}x{s.shape[1]}, rank {result.rank}"]
    for step in result.steps:
        detail = ", ".join(f"{k}={v}" for k, v in step.items() if k != "step")
        lines.append(f"  {step['step']}: {detail}")
    lines.append(f"verdict: {result.verdict} at budget {result.budget}")
    return payload, result.as_dict(), "\n".join(lines)


def _digest(args, payload) -> str:
    record = {
        "command": args.command,
        "input": payload,
        "cone": getattr(args, "cone", None),
        "special": getattr(args, "special", None),
        "budget": args.budget,
        "restarts": args.restarts,
    }
    return hashlib.sha256(json.dumps(record, sort_keys=True).encode()).hexdigest()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    start = time.perf_counter()
    try:
        seed = _default_seed() if args.seed is None else args.seed
        tol = Tolerance(args.tol_rank, args.tol_entry)
        payload, results, text = run(args, tol, seed)
    except (UsageError, ParseError, DimensionError, ValueError, IndexError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except RankInstabilityError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 2
    print(text)
    if args.json_out:
        report = {
            "command": args.command,
            "inputs_digest": _digest(args, payload),
            "results": results,
            "seed": seed,
            "tolerances": {"rank_tol": tol.rank_tol, "entry_tol": tol.entry_tol},
        }
        if args.timing:
            report["timing_ms"] = round(1000 * (time.perf_counter() - start), 3)
        with open(args.json_out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
