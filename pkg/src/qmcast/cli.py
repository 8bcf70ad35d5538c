"""Command-line harness: build codes, run protocols, sweep parameters,
and verify reports.

Exit status contract: 0 when all verifications pass, 1 when a simulation
ran but verification failed, 2 for usage errors / infeasible requests.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .code import code_from_document, construct_code
from .errors import QmcastError
from .gf import make_field
from .kobayashi import ghz_reference, run_protocol1
from .mcast12 import verify_12
from .mcast13 import verify_13
from .network import builtin_network, min_cut, parse_network
from .uqcm import (CloneParams12, CloneParams13, analytic_fidelities_12,
                   analytic_fidelities_13, channel_12_oracle, channel_13_oracle,
                   haar_random_state)
from .sim import PureState, fidelity, partial_trace

BUILTIN_NAMES = ("butterfly", "chain", "tree2", "tree3")


def _load_network(spec: str):
    if spec in BUILTIN_NAMES:
        return builtin_network(spec)
    return parse_network(Path(spec).read_text())


def _load_state(path: str | None, d: int, seed: int) -> np.ndarray:
    if path is None:
        return haar_random_state(d, np.random.default_rng(seed))
    raw = json.loads(Path(path).read_text())
    vec = np.array([complex(x[0], x[1]) if isinstance(x, list) else complex(x)
                    for x in raw])
    if vec.size != d:
        raise QmcastError(f"state file has {vec.size} amplitudes, need {d}")
    return vec / np.linalg.norm(vec)


def _emit(doc, out: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(doc, indent=2, default=_jsonable)
    else:
        rows = doc["rows"] if isinstance(doc, dict) and "rows" in doc else doc
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _jsonable(v) for k, v in row.items()})
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, tuple):
        return list(v)
    return v


# -- subcommands -------------------------------------------------------------

def cmd_code(args) -> int:
    net = _load_network(args.network)
    field = make_field(args.p, args.t)
    cuts = {t: min_cut(net, t) for t in net.targets}
    feasible = all(c >= args.rate for c in cuts.values())
    doc = {"min_cuts": cuts, "rate": args.rate, "feasible": feasible}
    if not feasible:
        _emit(doc, args.out, "json")
        print(f"infeasible: rate {args.rate} exceeds min-cut {min(cuts.values())}",
              file=sys.stderr)
        return 2
    code = construct_code(net, args.rate, field, args.seed)
    doc["code"] = code.to_document()
    _emit(doc, args.out, "json")
    return 0


def _make_params12(args, d: int) -> CloneParams12:
    if args.a is not None and args.b is not None:
        return CloneParams12(args.a, args.b, d)
    if args.b is not None:
        b = args.b
        a = -b / d + math.sqrt(b * b / (d * d) + 1 - b * b)
        return CloneParams12(a, b, d)
    return CloneParams12.from_ratio(1.0, 1.0, d)


def _make_params13(args, d: int) -> CloneParams13:
    if args.alpha is not None:
        return CloneParams13(args.alpha, args.beta, args.gamma, d)
    return CloneParams13.from_ratio(1.0, 1.0, 1.0, d)


def cmd_run(args) -> int:
    net = _load_network(args.network)
    field = make_field(args.p, args.t)
    code = construct_code(net, args.rate, field, args.seed)
    d = field.q ** args.rate
    psi = _load_state(args.state, d, args.seed)
    rng = np.random.default_rng(args.seed)
    start = time.time()

    report = {
        "kind": args.kind,
        "network": args.network,
        "field": {"p": args.p, "t": args.t},
        "rate": args.rate,
        "seed": args.seed,
        "state": [_jsonable(complex(x)) for x in psi],
        "code": code.to_document(),
    }
    if args.kind == "ghz":
        res = run_protocol1(code, psi)
        ref = ghz_reference(code, psi)
        min_f = min(br.state.fidelity_upto_phase(ref) for br in res.branches)
        report.update({
            "branches": len(res.branches),
            "min_branch_fidelity": min_f,
            "edge_uses": res.transcript.edge_uses,
            "passed": bool(min_f >= 1 - 1e-9),
        })
    elif args.kind == "clone12":
        params = _make_params12(args, d)
        report["params"] = {"a": params.a, "b": params.b, "d": d}
        report.update(verify_12(code, params, psi, rng=rng))
    elif args.kind == "clone13":
        params = _make_params13(args, d)
        report["params"] = {"alpha": params.alpha, "beta": params.beta,
                            "gamma": params.gamma, "d": d}
        report.update(verify_13(code, params, psi, rng=rng))
    report["wall_clock_s"] = time.time() - start
    _emit(report, args.out, "json")
    return 0 if report["passed"] else 1


def cmd_sweep(args) -> int:
    d = args.d
    rng = np.random.default_rng(args.seed)
    psi = haar_random_state(d, rng)
    rows = []
    worst = 0.0
    if args.kind == "clone12":
        for b in np.linspace(0.0, 1.0, args.points):
            a = -b / d + math.sqrt(b * b / (d * d) + 1 - b * b)
            params = CloneParams12(a, b, d)
            fa, fb = analytic_fidelities_12(params)
            rho = channel_12_oracle(psi, params)
            sa = fidelity(partial_trace(rho, ["A"]), PureState.from_vector([("A", d)], psi))
            sb = fidelity(partial_trace(rho, ["B"]), PureState.from_vector([("B", d)], psi))
            dev = max(abs(sa - fa), abs(sb - fb))
            worst = max(worst, dev)
            rows.append({"a": a, "b": b, "analytic_F1": fa, "analytic_F2": fb,
                         "simulated_F1": sa, "simulated_F2": sb, "deviation": dev})
    else:
        for t in np.linspace(0.0, 1.0, args.points):
            params = CloneParams13.from_ratio(1.0, t, t, d)
            fs = analytic_fidelities_13(params)
            rho = channel_13_oracle(psi, params)
            sim = tuple(
                fidelity(partial_trace(rho, [lbl]), PureState.from_vector([(lbl, d)], psi))
                for lbl in ("A", "B", "C"))
            dev = max(abs(x - y) for x, y in zip(sim, fs))
            worst = max(worst, dev)
            rows.append({"ratio": t,
                         "alpha": params.alpha, "beta": params.beta, "gamma": params.gamma,
                         "analytic_F1": fs[0], "analytic_F2": fs[1], "analytic_F3": fs[2],
                         "simulated_F1": sim[0], "simulated_F2": sim[1],
                         "simulated_F3": sim[2], "deviation": dev})
    doc = {"kind": args.kind, "d": d, "seed": args.seed,
           "max_deviation": worst, "rows": rows}
    _emit(doc, args.out, args.format)
    return 0 if worst < 1e-9 else 1


def cmd_verify(args) -> int:
    """Replay a run report: rebuild the embedded code and re-verify."""
    doc = json.loads(Path(args.report).read_text())
    code = code_from_document(doc["code"])
    psi = np.array([complex(x[0], x[1]) for x in doc["state"]])
    rng = np.random.default_rng(doc["seed"])
    if doc["kind"] == "ghz":
        res = run_protocol1(code, psi)
        ref = ghz_reference(code, psi)
        ok = all(br.state.fidelity_upto_phase(ref) >= 1 - 1e-9 for br in res.branches)
    elif doc["kind"] == "clone12":
        p = doc["params"]
        ok = verify_12(code, CloneParams12(p["a"], p["b"], p["d"]), psi,
                       rng=rng)["passed"]
    else:
        p = doc["params"]
        ok = verify_13(code, CloneParams13(p["alpha"], p["beta"], p["gamma"], p["d"]),
                       psi, rng=rng)["passed"]
    print("pass" if ok else "FAIL")
    return 0 if ok else 1


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmcast",
                                 description="multicast quantum network coding simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--network", required=True,
                       help="builtin name (butterfly, chain, tree2, tree3) or JSON file")
        p.add_argument("--p", type=int, default=2, help="field characteristic")
        p.add_argument("--t", type=int, default=1, help="field extension degree")
        p.add_argument("--rate", type=int, default=1, help="source rate r")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)

    pc = sub.add_parser("code", help="construct a classical multicast code")
    common(pc)
    pc.set_defaults(func=cmd_code)

    pr = sub.add_parser("run", help="run a protocol and verify it")
    pr.add_argument("kind", choices=["ghz", "clone12", "clone13"])
    common(pr)
    pr.add_argument("--state", default=None, help="JSON amplitude file")
    pr.add_argument("--a", type=float, default=None)
    pr.add_argument("--b", type=float, default=None)
    pr.add_argument("--alpha", type=float, default=None)
    pr.add_argument("--beta", type=float, default=None)
    pr.add_argument("--gamma", type=float, default=None)
    pr.set_defaults(func=cmd_run)

    ps = sub.add_parser("sweep", help="fidelity-vs-asymmetry table")
    ps.add_argument("kind", choices=["clone12", "clone13"])
    ps.add_argument("--d", type=int, default=2)
    ps.add_argument("--points", type=int, default=21)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default=None)
    ps.add_argument("--format", choices=["json", "csv"], default="json")
    ps.set_defaults(func=cmd_sweep)

    pv = sub.add_parser("verify", help="replay and re-verify a run report")
    pv.add_argument("--report", required=True)
    pv.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QmcastError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
