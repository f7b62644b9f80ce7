"""Command-line workbench.  Exit codes: 0 ok, 1 mathematical precondition, 2 I/O or format."""
from __future__ import annotations

import argparse
import json
import sys
from typing import List

from .action import SubspaceW, ZSeries
from .dressing import dress, kth_root, normalize_full, schur_from_ring
from .errors import ArtifactError, FormatError, PreconditionError
from .growth import check_A, check_strong, check_super_strong, in_Pi_alpha
from .operators import EPlusOp, commutator, eplus_mul
from .sato import reconstruct_s, reconstruct_s_certified
from .schur import UTSeries, invariants_NA, psi1, psi1_inv, ring_closure, validate_schur_pair
from .series import rat
from .workbench import (
    apply_to_exponential,
    eigenvalue_check,
    example_burchnall_chaundy,
    example_calogero_symbols,
    example_toric,
)


def _load(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _op(path, args) -> EPlusOp:
    op = EPlusOp.from_json(_load(path))
    if args.prec is not None:
        op = op.truncate_prec(args.prec)
    if args.window is not None and (op.window_lo < args.window):
        op = op.truncate_window(args.window)
    return op


def _ops(paths, args) -> List[EPlusOp]:
    out = []
    for p in paths:
        obj = _load(p)
        items = obj if isinstance(obj, list) else obj.get("operators", [obj]) if isinstance(obj, dict) else None
        if items is None:
            raise FormatError(f"{p}: expected an operator or a list of operators")
        for it in items:
            op = EPlusOp.from_json(it)
            if args.prec is not None:
                op = op.truncate_prec(args.prec)
            out.append(op)
    return out


def _uts(path) -> List[UTSeries]:
    obj = _load(path)
    items = obj if isinstance(obj, list) else [obj]
    return [UTSeries.from_json(it) for it in items]


def _report_status(checks):
    return 0 if all(c.get("status") != "fail" for c in checks) else 1


# --- commands ---------------------------------------------------------------

def cmd_mul(args):
    return eplus_mul(_op(args.a, args), _op(args.b, args), args.window).to_json()


def cmd_commutator(args):
    return commutator(_op(args.a, args), _op(args.b, args), args.window).to_json()


def cmd_sato(args):
    w = SubspaceW.from_json(_load(args.w))
    if args.alpha is not None:
        s, cert = reconstruct_s_certified(w, rat(args.alpha))
        return {"s": s.to_json(), "certificate": cert.to_json()}
    return reconstruct_s(w, args.window).to_json()


def cmd_root(args):
    return kth_root(_op(args.p, args), args.k, args.window).to_json()


def cmd_normalize(args):
    n = normalize_full(_op(args.p, args), _op(args.q, args), args.prec)
    return {"s": n.s.to_json(), "s_inv": n.s_inv.to_json(), "p": n.p.to_json(), "q": n.q.to_json()}


def cmd_dress(args):
    return dress(_op(args.l1, args), _op(args.l2, args), args.window).to_json()


def cmd_schur(args):
    gens = _ops(args.gens, args)
    bounds = tuple(args.bounds) if args.bounds else (args.cutoff or 3, args.cutoff or 3)
    res = schur_from_ring(gens, args.p, args.q, bounds, args.window)
    return {
        "s_total": res.s_total.to_json(),
        "A": [a.to_json() for a in res.a],
        "W": res.w.to_json(),
        "checks": res.report,
    }


def cmd_psi1(args):
    obj = _load(args.series)
    if args.inverse:
        return psi1_inv(UTSeries.from_json(obj)).to_json()
    return psi1(ZSeries.from_json(obj)).to_json()


def cmd_invariants(args):
    gens = _uts(args.gens)
    cutoff = args.cutoff or 4
    inv = invariants_NA(ring_closure(gens, cutoff), cutoff)
    out = inv.to_json()
    out["cutoff"] = cutoff
    return out


def cmd_validate(args):
    cut = {"word_length": args.cutoff or 3}
    if args.bounds:
        cut["bounds"] = tuple(args.bounds)
    data = validate_schur_pair(_uts(args.a), _uts(args.w), cut)
    out = data.to_json()
    out["_exit"] = 0 if data.valid else 1
    return out


def cmd_ba(args):
    t = _op(args.t, args)
    out = {"ba": apply_to_exponential(t).to_json()}
    if args.eigen:
        p = _op(args.eigen, args)
        out["eigenvalue"] = eigenvalue_check(p, t, args.window).to_json()
    return out


def cmd_check(args):
    p = _op(args.op, args)
    alpha = rat(args.alpha)
    if args.anchor is None:
        cert = in_Pi_alpha(p, alpha)
    else:
        fn = {"A": check_A, "strong": check_strong, "super-strong": check_super_strong}[args.kind]
        cert = fn(p, alpha, tuple(args.anchor))
    return cert.to_json()


def cmd_example(args):
    prec = args.prec
    window = args.window
    if args.name == "cusp":
        P, Q, report = example_burchnall_chaundy(prec or 12, window or -8)
        ops = {"P": P.to_json(), "Q": Q.to_json()}
    elif args.name == "toric":
        cut = args.cutoff or 6
        P, Q, P3, report = example_toric(prec or 10, window or -6, (cut, cut), pipeline=args.pipeline)
        ops = {"P": P.to_json(), "Q": Q.to_json(), "P'": P3.to_json()}
    else:
        L1, L2, report = example_calogero_symbols()
        ops = {"L1": L1.to_json(), "L2": L2.to_json()}
    out = {"checks": report}
    if args.operators:
        out["operators"] = ops
    out["_exit"] = _report_status(report)
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None, help="x-precision (truncate inputs / example size)")
    common.add_argument("--window", type=int, default=None, help="∂₂-window floor")
    common.add_argument("--cutoff", type=int, default=None, help="enumeration cutoff")
    common.add_argument("-o", "--output", default=None, help="write JSON here instead of stdout")

    ap = argparse.ArgumentParser(prog="psido2", description="Truncated pseudo-differential operator workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("mul", cmd_mul, "product of two operators")
    p.add_argument("a"); p.add_argument("b")
    p = add("commutator", cmd_commutator, "commutator of two operators")
    p.add_argument("a"); p.add_argument("b")
    p = add("sato-reconstruct", cmd_sato, "dressing operator S from a subspace basis")
    p.add_argument("w"); p.add_argument("--alpha", default=None, help="also certify A_alpha")
    p = add("root", cmd_root, "k-th root of a monic operator")
    p.add_argument("p"); p.add_argument("--k", type=int, required=True)
    p = add("normalize", cmd_normalize, "normalize a quasi-elliptic pair")
    p.add_argument("p"); p.add_argument("q")
    p = add("dress", cmd_dress, "dressing operator of (L1, L2)")
    p.add_argument("l1"); p.add_argument("l2")
    p = add("schur", cmd_schur, "ring to (S, A, W)")
    p.add_argument("gens", nargs="+")
    p.add_argument("--p", type=int, default=0); p.add_argument("--q", type=int, default=1)
    p.add_argument("--bounds", type=int, nargs=2, default=None)
    p = add("psi1", cmd_psi1, "ψ₁ transform of a z-series (or its inverse)")
    p.add_argument("series"); p.add_argument("--inverse", action="store_true")
    p = add("invariants", cmd_invariants, "N_A and related invariants of a generated ring")
    p.add_argument("gens")
    p = add("validate-schur", cmd_validate, "validate a Schur pair in k[[u]]((t))")
    p.add_argument("a"); p.add_argument("w")
    p.add_argument("--bounds", type=int, nargs=2, default=None)
    p = add("ba", cmd_ba, "apply an operator to the exponential; optional eigenvalue")
    p.add_argument("t"); p.add_argument("--eigen", default=None)
    p = add("check-condition", cmd_check, "growth-condition certificate")
    p.add_argument("op"); p.add_argument("--alpha", default="1")
    p.add_argument("--kind", choices=["A", "strong", "super-strong"], default="A")
    p.add_argument("--anchor", type=int, nargs=2, default=None)
    p = add("example", cmd_example, "example gallery")
    p.add_argument("name", choices=["cusp", "toric", "calogero-symbols"])
    p.add_argument("--pipeline", action="store_true", help="also run the full toric pipeline")
    p.add_argument("--operators", action="store_true", help="include the operators in the output")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out = args.fn(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    code = 0
    if isinstance(out, dict) and "_exit" in out:
        code = out.pop("_exit")
    text = json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
