"""Command-line front end: ``rhdecode {analyze,encode,decode,simulate,bench}``.

Exit status: 0 on success, 1 on input errors or exceeded budgets, 2 on usage
errors, 3 when a simulation violates a hard invariant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from ._version import __version__
from .block import (
    admissible_capability,
    build_window_code,
    density_stats,
    min_distance,
    multiplicity_bound,
)
from .budget import ENV_VAR, default_budget
from .channel import ChannelSpec, ExperimentConfig, apply_channel, make_rng, run_experiment, transmit_frame
from .decoders import HorizonParams, cost_bound, exact_decode, receding_horizon_decode
from .errors import BudgetExceeded, SpecError
from .io import (
    check_sequence_for_code,
    code_from_dict,
    code_to_dict,
    format_sequence,
    load_code,
    parse_messages,
    parse_sequence,
    read_manifest_line,
    read_text,
)
from .system import ConvCode, encode, zero_return_extension

EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3

FORMATS = ("text", "csv", "structured")


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _nonneg(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {n}")
    return n


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=d if suppress else None, help="master seed")
    p.add_argument(
        "--budget", type=_positive, default=d if suppress else None, help=f"enumeration budget (default: ${ENV_VAR} or 2**24)"
    )
    p.add_argument("--format", choices=FORMATS, default=d if suppress else "text", help="output format")
    p.add_argument("-o", "--output", default=d if suppress else None, help="write the main output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rhdecode", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rhdecode {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        _add_globals(sp, suppress=True)
        return sp

    sp = add("analyze", "window code analysis")
    sp.add_argument("code", help="code spec file or bundled:NAME")
    sp.add_argument("--N", type=_positive, required=True)
    sp.add_argument("--L", type=_positive, required=True)
    sp.add_argument("--T", type=_nonneg, help="frame length for the cost bound")
    sp.add_argument("--M", type=int, help="solution multiplicity for the bound")
    sp.add_argument("--Delta", type=int, help="consecutive differing inputs for the bound")

    sp = add("encode", "encode a message file and return to the zero state")
    sp.add_argument("code")
    sp.add_argument("messages", help="message file (header 'p k T')")
    sp.add_argument("--no-terminate", action="store_true", help="skip the zero-return extension")

    sp = add("decode", "receding-horizon decode of a received sequence")
    sp.add_argument("code")
    sp.add_argument("received", help="sequence file (header 'p n k T')")
    sp.add_argument("--N", type=_positive, required=True)
    sp.add_argument("--L", type=_positive, required=True)
    sp.add_argument("--exact", action="store_true", help="also run the exact dynamic-programming decoder")

    sp = add("simulate", "Monte Carlo experiment")
    sp.add_argument("config", help="experiment config (JSON), or a report/CSV whose manifest to replay")
    sp.add_argument("--workers", type=_positive, default=1)
    sp.add_argument("--csv", dest="csv_out", help="also write the per-trial CSV here")

    sp = add("bench", "time the receding-horizon decoder against the exact decoder")
    sp.add_argument("code")
    sp.add_argument("--N", type=_positive, required=True)
    sp.add_argument("--L", type=_positive, required=True)
    sp.add_argument("--T", type=_nonneg, required=True)
    sp.add_argument("--trials", type=_positive, default=50)
    sp.add_argument("--p-err", type=float, default=0.1, help="q-ary symmetric noise level of the bench frames")
    sp.add_argument("--repeat", type=_positive, default=3, help="timed repetitions per frame (minimum kept)")
    return parser


# ---------------------------------------------------------------------------
# rendering helpers


def _matrix_text(m) -> str:
    rows = m.tolist() if m.rows and m.cols else []
    if not rows:
        return "    (empty)"
    width = max(len(str(v)) for r in rows for v in r)
    return "\n".join("    " + " ".join(str(v).rjust(width) for v in r) for r in rows)


def _structured(doc: dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv_rows(header: list[str], rows: list[list[Any]], manifest: dict[str, Any]) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _manifest(command: str, args: argparse.Namespace, **params: Any) -> dict[str, Any]:
    return {
        "tool": "rhdecode",
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "budget": args.budget if args.budget is not None else default_budget(),
        **params,
    }


def _fraction(f) -> dict[str, Any]:
    return {"exact": str(f), "float": float(f)}


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args: argparse.Namespace) -> tuple[str, int]:
    code, gen = load_code(args.code)
    if args.L > args.N:
        raise SpecError("arguments", "--L", f"need L <= N, got N={args.N}, L={args.L}")
    if (args.M is None) != (args.Delta is None):
        raise SpecError("arguments", "--M/--Delta", "give both or neither")
    budget = args.budget
    wc = build_window_code(code, args.N, budget)
    d_N = min_distance(wc, budget)
    adm = admissible_capability(wc, args.L, budget)
    dens = []
    for i in range(1, args.N + 1):
        ci = build_window_code(code, i, budget)
        ds = density_stats(ci.length, ci.dimension, min_distance(ci, budget), code.field)
        dens.append({"N": i, "length": ci.length, "dimension": ci.dimension, "t": ds.t, "E_kt": ds.E_kt,
                     "density": _fraction(ds.density), "p_outside": _fraction(ds.p_outside)})
    doc: dict[str, Any] = {
        "manifest": _manifest("analyze", args, code=code_to_dict(code), N=args.N, L=args.L, T=args.T, M=args.M, Delta=args.Delta),
        "code": {"label": code.label, "field_p": code.p, "n": code.n, "k": code.k, "delta": code.delta,
                 "kappa": list(code.kappa), "generator_verified": gen is not None},
        "window": {"N": args.N, "B_N": wc.B.tolist(), "H_N": wc.H.tolist(), "d_N": d_N, "rho_N": wc.rho},
        "admissible": {"L": args.L, "d_prime": adm.d_prime, "protected": list(adm.protected),
                       "correctable": adm.correctable, "meets_side_condition": adm.meets_side_condition},
        "density": dens,
    }
    if args.T is not None:
        doc["cost_bound"] = {"T": args.T, "L": args.L, "value": cost_bound(wc, args.T, args.L)}
    if args.M is not None:
        mb = multiplicity_bound(code, args.N, args.Delta, args.M, budget)
        doc["multiplicity_bound"] = {"M": args.M, "N": args.N, "Delta": args.Delta, **_fraction(mb)}

    if args.format == "structured":
        return _structured(doc), 0
    if args.format == "csv":
        rows: list[list[Any]] = [
            ["n", code.n], ["k", code.k], ["delta", code.delta], ["kappa", " ".join(map(str, code.kappa))],
            ["d_N", d_N], ["rho_N", wc.rho], ["d_prime", adm.d_prime],
            ["protected", " ".join(map(str, adm.protected))], ["meets_side_condition", int(adm.meets_side_condition)],
        ]
        rows += [[f"density_C{d['N']}", d["density"]["exact"]] for d in dens]
        if "cost_bound" in doc:
            rows.append(["cost_bound", doc["cost_bound"]["value"]])
        if "multiplicity_bound" in doc:
            rows.append(["multiplicity_bound", doc["multiplicity_bound"]["exact"]])
        return _csv_rows(["quantity", "value"], rows, doc["manifest"]), 0

    out = [f"code {code.label or args.code} over GF({code.p})",
           f"  n = {code.n}, k = {code.k}, delta = {code.delta}, kappa = {list(code.kappa)}"]
    if gen is not None:
        out.append("  generator P(z) Q(z)^-1 realized by (A, B, C, D): yes")
    out += [f"window N = {args.N}", "  B_N =", _matrix_text(wc.B), "  H_N =", _matrix_text(wc.H),
            f"  d_N = {d_N}, rho_N = {wc.rho}",
            f"admissible errors for L = {args.L}",
            f"  protected = {{{', '.join(map(str, adm.protected))}}}",
            f"  d' = {adm.d_prime} (corrects {adm.correctable} per window), d' >= d_N - 1: {adm.meets_side_condition}",
            "density"]
    for d in dens:
        out.append(f"  C_{d['N']} [{d['length']},{d['dimension']}]: t = {d['t']}, E_kt = {d['E_kt']}, "
                   f"density = {d['density']['exact']}, outside = {d['p_outside']['exact']}")
    if "cost_bound" in doc:
        out.append(f"cost bound ceil(T/L) rho_N for T = {args.T}: {doc['cost_bound']['value']}")
    if "multiplicity_bound" in doc:
        mbd = doc["multiplicity_bound"]
        out.append(f"multiplicity bound (M = {args.M}, Delta = {args.Delta}): {mbd['exact']} ~ {mbd['float']:.6g}")
    return "\n".join(out) + "\n", 0


def cmd_encode(args: argparse.Namespace) -> tuple[str, int]:
    code, _ = load_code(args.code)
    name, text = read_text(args.messages)
    field, u = parse_messages(text, name)
    if field != code.field:
        raise SpecError(name, "header", f"field GF({field.p}) does not match the code's GF({code.p})")
    if u and len(u[0]) != code.k:
        raise SpecError(name, "header", f"messages have {len(u[0])} entries, code needs k = {code.k}")
    seq, x = encode(code, u)
    if not args.no_terminate:
        tail, _ = encode(code, zero_return_extension(code, x, args.budget), x)
        seq = type(seq)(seq.y + tail.y, seq.u + tail.u, seq.field)
    manifest = _manifest("encode", args, code=code_to_dict(code), messages=u, terminate=not args.no_terminate)
    return format_sequence(seq, manifest), 0


def cmd_decode(args: argparse.Namespace) -> tuple[str, int]:
    code, _ = load_code(args.code)
    if args.L > args.N:
        raise SpecError("arguments", "--L", f"need L <= N, got N={args.N}, L={args.L}")
    name, text = read_text(args.received)
    received, r = parse_sequence(text, name)
    check_sequence_for_code(code, received, r, name)
    res = receding_horizon_decode(code, received, HorizonParams(args.N, args.L), budget=args.budget)
    doc: dict[str, Any] = {
        "manifest": _manifest("decode", args, code=code_to_dict(code), received=[list(s) for s in received.symbols()],
                              N=args.N, L=args.L, exact=args.exact),
        "u": [list(u) for u in res.u_seq],
        "codeword": [list(s) for s in res.codeword.symbols()],
        "window_costs": list(res.per_step_costs),
        "tie_events": [{"t": t, "count": c} for t, c in res.tie_events],
        "tau": res.tau,
        "cost": res.cost,
    }
    if args.exact:
        ex = exact_decode(code, received, args.budget)
        width = max(len(ex.codeword), len(res.codeword))
        a, b = res.codeword.padded(width).symbols(), ex.codeword.padded(width).symbols()
        doc["exact"] = {
            "cost": ex.cost,
            "codeword": [list(s) for s in ex.codeword.symbols()],
            "differs_at": [t for t in range(width) if a[t] != b[t]],
        }

    if args.format == "structured":
        return _structured(doc), 0
    if args.format == "csv":
        rows = []
        width = len(res.codeword)
        for t in range(width):
            row = [t, " ".join(map(str, res.codeword.symbol(t))), " ".join(map(str, res.u_seq[t]))]
            if args.exact:
                exw = doc["exact"]["codeword"]
                row.append(" ".join(map(str, exw[t])) if t < len(exw) else "")
            rows.append(row)
        header = ["t", "codeword", "u"] + (["exact_codeword"] if args.exact else [])
        return _csv_rows(header, rows, doc["manifest"]), 0

    fmt = lambda v: "(" + ",".join(map(str, v)) + ")"  # noqa: E731
    out = [f"decoded {len(received)} symbols with N = {args.N}, L = {args.L}",
           "u: " + " ".join(fmt(u) for u in res.u_seq),
           "codeword: " + " ".join(fmt(s) for s in res.codeword.symbols()),
           "window costs: " + " ".join(map(str, res.per_step_costs)),
           "tie events: " + (", ".join(f"t={t} ({c} nearest)" for t, c in res.tie_events) or "none"),
           f"tau = {res.tau}", f"cost = {res.cost}"]
    if args.exact:
        ex = doc["exact"]
        out.append(f"exact cost = {ex['cost']}")
        out.append("exact codeword: " + " ".join(fmt(s) for s in ex["codeword"]))
        out.append("differs at t = " + (", ".join(map(str, ex["differs_at"])) or "none"))
    return "\n".join(out) + "\n", 0


def config_from_document(doc: Any, source: str, seed: int | None, budget: int | None) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a config, report or manifest document."""
    if isinstance(doc, dict) and "manifest" in doc:
        doc = doc["manifest"]
    if not isinstance(doc, dict):
        raise SpecError(source, "document", "expected a JSON object")
    for key in ("code", "N", "L", "T", "channel", "trials"):
        if key not in doc:
            raise SpecError(source, key, "missing")
    code_ref = doc["code"]
    if isinstance(code_ref, dict):
        code, _ = code_from_dict(code_ref, f"{source}:code")
    elif isinstance(code_ref, str):
        ref = code_ref
        if not ref.startswith("bundled:") and not Path(ref).is_absolute():
            ref = str(Path(source).parent / ref)
        code, _ = load_code(ref)
    else:
        raise SpecError(source, "code", "expected a path, bundled:NAME or an inline code object")
    try:
        channel = ChannelSpec.from_dict(doc["channel"], code)
        return ExperimentConfig(
            code=code,
            N=int(doc["N"]),
            L=int(doc["L"]),
            T=int(doc["T"]),
            channel=channel,
            trials=int(doc["trials"]),
            seed=int(doc.get("seed") or 0) if seed is None else seed,
            exact=bool(doc.get("exact", False)),
            M=doc.get("M"),
            Delta=doc.get("Delta"),
            budget=budget if budget is not None else doc.get("budget"),
            timing=bool(doc.get("timing", False)),
        )
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(source, "config", str(exc)) from exc


def _load_config_document(source: str) -> Any:
    name, text = read_text(source)
    manifest = read_manifest_line(text)
    if manifest is not None and not text.lstrip().startswith("{"):
        return manifest
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(name, f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc


def cmd_simulate(args: argparse.Namespace) -> tuple[str, int]:
    doc = _load_config_document(args.config)
    cfg = config_from_document(doc, args.config, args.seed, args.budget)
    report = run_experiment(cfg, workers=args.workers)
    if args.csv_out:
        Path(args.csv_out).write_text(report.to_csv())
    status = 0 if report.ok else EXIT_VIOLATION
    if args.format == "structured":
        return report.to_json(), status
    if args.format == "csv":
        return report.to_csv(), status
    s = report.summary()
    out = [f"{s['trials']} trials, seed {cfg.seed}",
           f"frame errors: {s['frame_error_count']}",
           f"average cost: {s['avg_cost']:.6g}",
           f"max cost over 0..T-1: {s['max_cost']} (bound {s['bound_cost']})",
           f"trials with a tie: {s['tie_event_rate']:.6g}",
           f"first-window tie rate: {s['first_window_tie_rate']:.6g}"]
    if s["multisolution_rate"] is not None:
        out.append(f"multiple-solution rate: {s['multisolution_rate']:.6g} (bound {s['multiplicity_bound']})")
    if s["exact_equal_fraction"] is not None:
        out.append(f"heuristic cost equals exact cost: {s['exact_equal_fraction']:.6g}")
    out.append("violations: " + ("none" if report.ok else "; ".join(report.violations)))
    return "\n".join(out) + "\n", status


def _median_and_spread(values: list[float]) -> tuple[float, float, float]:
    arr = np.asarray(values)
    return float(np.median(arr)), float(np.percentile(arr, 10)), float(np.percentile(arr, 90))


def run_bench(code: ConvCode, N: int, L: int, T: int, trials: int, seed: int, p_err: float,
              repeat: int = 3, budget: int | None = None) -> dict[str, Any]:
    """Per-frame decode times of both decoders on the same noisy frames."""
    params = HorizonParams(N, L)
    wc = build_window_code(code, N, budget)
    wc.syndrome_table  # precomputed once, as in deployment
    rng = make_rng(seed)
    channel = ChannelSpec.q_symmetric(p_err)
    frames = []
    for _ in range(trials):
        sent = transmit_frame(code, T, rng)
        frames.append(apply_channel(sent, channel, rng)[0])
    heur: list[float] = []
    exact: list[float] = []
    skipped = False
    for rx in frames:
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            receding_horizon_decode(code, rx, params, window=wc, budget=budget)
            best = min(best, time.perf_counter() - t0)
        heur.append(best)
        if skipped:
            continue
        best = float("inf")
        try:
            for _ in range(repeat):
                t0 = time.perf_counter()
                exact_decode(code, rx, budget)
                best = min(best, time.perf_counter() - t0)
        except BudgetExceeded:
            skipped = True
            continue
        exact.append(best)
    rows = []
    for name, vals, skip in (("receding_horizon", heur, False), ("exact_dp", exact, skipped)):
        if skip or not vals:
            rows.append({"decoder": name, "median_s": None, "p10_s": None, "p90_s": None, "frames": 0, "skipped": True})
        else:
            med, lo, hi = _median_and_spread(vals)
            rows.append({"decoder": name, "median_s": med, "p10_s": lo, "p90_s": hi, "frames": len(vals), "skipped": False})
    return {"rows": rows}


def cmd_bench(args: argparse.Namespace) -> tuple[str, int]:
    code, _ = load_code(args.code)
    if args.L > args.N:
        raise SpecError("arguments", "--L", f"need L <= N, got N={args.N}, L={args.L}")
    seed = 0 if args.seed is None else args.seed
    result = run_bench(code, args.N, args.L, args.T, args.trials, seed, args.p_err, args.repeat, args.budget)
    manifest = _manifest("bench", args, code=code_to_dict(code), N=args.N, L=args.L, T=args.T,
                         trials=args.trials, p_err=args.p_err, repeat=args.repeat)
    manifest["seed"] = seed
    rows = result["rows"]
    if args.format == "structured":
        return _structured({"manifest": manifest, "rows": rows}), 0
    header = ["decoder", "median_s", "p10_s", "p90_s", "frames", "skipped"]
    if args.format == "csv":
        return _csv_rows(header, [["" if r[h] is None else (int(r[h]) if isinstance(r[h], bool) else r[h]) for h in header]
                                  for r in rows], manifest), 0
    out = [f"{'decoder':<18}{'median us':>12}{'p10 us':>12}{'p90 us':>12}{'frames':>8}"]
    for r in rows:
        if r["skipped"]:
            out.append(f"{r['decoder']:<18}{'skipped (budget)':>36}")
        else:
            out.append(f"{r['decoder']:<18}{r['median_s'] * 1e6:>12.1f}{r['p10_s'] * 1e6:>12.1f}"
                       f"{r['p90_s'] * 1e6:>12.1f}{r['frames']:>8}")
    return "\n".join(out) + "\n", 0


COMMANDS = {
    "analyze": cmd_analyze,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, status = COMMANDS[args.command](args)
    except SpecError as exc:
        print(f"rhdecode: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"rhdecode: budget exceeded: {exc.quantity} needs {exc.size} > {exc.budget}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"rhdecode: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_VIOLATION:
        print("rhdecode: hard invariant violated", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
