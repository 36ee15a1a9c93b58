"""Command-line entry point.

Exit codes: 0 success, 2 invalid input, 3 infeasible conversion,
4 verification failure.  Reports are ``key=value`` lines, or one JSON
object with ``--json``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .channels import classify_block_incoherent, dephasing_covariance_deviation, validate_cptp
from .conversion import build_conversion_channel, necessity_certificate, verify_conversion
from .core import _check_dim, check_density_matrix
from .demo import format_table, run_demo
from .errors import BlockCoherenceError, CertificateViolation, Infeasible, VerificationFailed
from .gates import build_gate_protocol, protocol_checks, run_gate_protocol
from .kcoherence import conjecture_probe, enumerate_structures, restricted_bell
from .measures import c_entropy, c_l1, coherence_rank
from .optimize import OptimizerOptions
from .powers import bcp, bdp

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 2, 3, 4


def default_seed() -> int:
    return int(os.environ.get("BLOCKCOH_SEED", "0"))


def _plain(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _emit(report: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps({k: _plain(v) for k, v in report.items()}))
        return
    for k, v in report.items():
        v = _plain(v)
        print(f"{k}={json.dumps(v) if isinstance(v, list) else v}")


# --------------------------------------------------------------------------
# subcommands


def cmd_measure(args) -> dict:
    s = io.load_structure(args.structure)
    doc = io.load(args.state)
    if args.density:
        rho = check_density_matrix(io.density_from_doc(doc))
        _check_dim(rho.shape[0], s, "density")
        rank = None
    else:
        psi = io.state_from_doc(doc, s)
        rho = psi.density()
        rank = coherence_rank(psi.amplitudes)
    out = {"structure": str(s), "c_entropy": c_entropy(rho, s), "c_l1": c_l1(rho, s)}
    if rank is not None:
        out["coherence_rank"] = rank
    return out


def cmd_convert(args) -> dict:
    s = io.load_structure(args.structure)
    src = io.load_state(args.src, s)
    dst = io.load_state(args.dst, s)
    plan = build_conversion_channel(src, dst)
    if not plan.feasible:
        raise Infeasible(plan.message)
    rep = verify_conversion(plan, src, dst)
    cert = necessity_certificate(plan.channel, src, dst)
    if not cert.chain:
        raise VerificationFailed("certificate", "x <= B y <= y does not hold")
    if args.emit_kraus:
        io.save(args.emit_kraus, io.channel_to_doc(plan.channel))
    out = {
        "structure": str(s),
        "feasible": True,
        "method": plan.method,
        "x_sorted": plan.x_sorted,
        "y_sorted": plan.y_sorted,
    }
    if plan.gammas is not None:
        out.update({f"gamma_{i}^2": g for i, g in enumerate(plan.gammas)})
    out.update({
        "num_kraus": len(plan.channel),
        "cptp_residual": rep.cptp_residual,
        "block_incoherent": rep.block_incoherent,
        "fidelity": rep.fidelity,
        "doubly_stochastic": cert.B,
    })
    return out


def cmd_check_channel(args) -> dict:
    s = io.load_structure(args.structure)
    ch = io.channel_from_doc(io.load(args.channel), s)
    ok, res = validate_cptp(ch)
    verdict = classify_block_incoherent(ch)
    out = {
        "structure": str(s),
        "num_kraus": len(ch),
        "cptp": ok,
        "cptp_residual": res,
        "block_incoherent": verdict.is_block_incoherent,
        "column_violations": len(verdict.violations),
    }
    if ch.d_in == ch.d_out:
        out["dephasing_covariance_deviation"] = dephasing_covariance_deviation(ch, s)
    return out


def _power(args, fn) -> dict:
    s = io.load_structure(args.structure)
    ch = io.channel_from_doc(io.load(args.channel), s)
    opts = OptimizerOptions(restarts=args.restarts, seed=args.seed)
    res = fn(ch, s, opts, measure=args.measure)
    out = {"structure": str(s), "value": res.value, "measure": args.measure,
           "restarts": res.restarts, "seed": args.seed, "gap": res.gap}
    if res.block is not None:
        out["block"] = res.block
    return out


def cmd_gate(args) -> dict:
    s = io.load_structure(args.structure)
    u = io.matrix_from_doc(io.load(args.unitary))
    psi = io.load_state(args.state, s).amplitudes
    proto = build_gate_protocol(u, s)
    res, inco = protocol_checks(proto)
    sys_m, anc_m = run_gate_protocol(proto, psi)
    target = u @ psi
    fid = float(np.real(target.conj() @ sys_m @ target))
    anc_c = c_l1(anc_m, s)
    if res > 1e-9 or not inco:
        raise VerificationFailed("protocol", f"completeness residual {res:.3g}, incoherent={inco}")
    if fid < 1 - 1e-8 or anc_c > 1e-8:
        raise VerificationFailed("gate", f"fidelity {fid:.12g}, ancilla C_l1 {anc_c:.3g}")
    return {"structure": str(s), "num_kraus": len(proto.channel), "completeness_residual": res,
            "block_incoherent": inco, "fidelity": fid, "ancilla_c_l1": anc_c}


def cmd_kcoh(args) -> dict:
    fam = enumerate_structures(args.d, args.k)
    out = {"d": args.d, "k": args.k, "num_structures": len(fam),
           "restricted_bell": restricted_bell(args.d, args.k)}
    if args.d <= 4:
        rep = conjecture_probe(args.d, args.k, args.trials, args.seed)
        out.update({"trials": rep.trials, "seed": args.seed, "violations": rep.violations,
                    "max_residual": rep.max_residual})
        if rep.violations:
            raise VerificationFailed("probe", f"{rep.violations} violations")
    if args.list:
        out["structures"] = [str(s) for s in fam]
    return out


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    p = argparse.ArgumentParser(prog="blockcoh", description="Block coherence toolkit")
    p.add_argument("--json", action="store_true", help="emit one JSON object instead of key=value lines")
    sub = p.add_subparsers(dest="command", required=True)
    # ``--json`` is accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    m = sub.add_parser("measure", parents=[common], help="block coherence of a state")
    m.add_argument("--state", required=True)
    m.add_argument("--structure", required=True)
    m.add_argument("--density", action="store_true", help="state file holds a density matrix")
    m.set_defaults(func=cmd_measure)

    c = sub.add_parser("convert", parents=[common], help="build and verify a pure-state conversion channel")
    c.add_argument("--from", dest="src", required=True)
    c.add_argument("--to", dest="dst", required=True)
    c.add_argument("--structure", required=True)
    c.add_argument("--emit-kraus", metavar="OUT")
    c.set_defaults(func=cmd_convert)

    k = sub.add_parser("check-channel", parents=[common], help="completeness and block-incoherence of a channel")
    k.add_argument("--channel", required=True)
    k.add_argument("--structure", required=True)
    k.set_defaults(func=cmd_check_channel)

    for name, fn in (("bcp", bcp), ("bdp", bdp)):
        q = sub.add_parser(name, parents=[common], help=f"{name.upper()} of a channel")
        q.add_argument("--channel", required=True)
        q.add_argument("--structure", required=True)
        q.add_argument("--restarts", type=int, default=32)
        q.add_argument("--seed", type=int, default=seed)
        q.add_argument("--measure", choices=("l1", "entropy"), default="l1")
        q.set_defaults(func=lambda a, fn=fn: _power(a, fn))

    g = sub.add_parser("gate", parents=[common], help="implement a unitary from a maximally coherent resource")
    g.add_argument("--unitary", required=True)
    g.add_argument("--structure", required=True)
    g.add_argument("--state", required=True)
    g.set_defaults(func=cmd_gate)

    h = sub.add_parser("kcoh", parents=[common], help="rank-bounded structures and the C_k probe")
    h.add_argument("--d", type=int, required=True)
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--trials", type=int, default=500)
    h.add_argument("--seed", type=int, default=seed)
    h.add_argument("--list", action="store_true", help="print every structure")
    h.set_defaults(func=cmd_kcoh)

    d = sub.add_parser("demo", parents=[common], help="reproduce the worked examples as a pass/fail table")
    d.add_argument("--seed", type=int, default=seed)
    d.add_argument("--restarts", type=int, default=16)
    d.set_defaults(func=None)
    return p


def _run_demo(args) -> int:
    rows = run_demo(args.seed, args.restarts)
    ok = all(r.passed for r in rows)
    if args.json:
        print(json.dumps({"passed": ok, "rows": [
            {"name": r.name, "expected": float(r.expected), "got": float(r.got), "tol": r.tol, "passed": r.passed}
            for r in rows]}))
    else:
        print(format_table(rows))
        print(f"passed={sum(r.passed for r in rows)}/{len(rows)}")
    return EXIT_OK if ok else EXIT_VERIFY


def _fail(code: int, kind: str, msg: str) -> int:
    print(f"error={kind}: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            return _run_demo(args)
        _emit(args.func(args), args.json)
        return EXIT_OK
    except json.JSONDecodeError as exc:
        return _fail(EXIT_INVALID, "malformed JSON", f"{exc.msg} at line {exc.lineno}, column {exc.colno}")
    except OSError as exc:
        return _fail(EXIT_INVALID, "unreadable file", str(exc))
    except Infeasible as exc:
        return _fail(EXIT_INFEASIBLE, "infeasible", str(exc))
    except (VerificationFailed, CertificateViolation) as exc:
        return _fail(EXIT_VERIFY, "verification failed", str(exc))
    except BlockCoherenceError as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except ValueError as exc:
        return _fail(EXIT_INVALID, "invalid input", str(exc))


if __name__ == "__main__":
    sys.exit(main())
