"""Command-line interface.

Exit codes: 0 the claim holds, 1 it fails, 2 inconclusive or out of
budget, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import constructions as C
from .basis import PairNotOrthogonal, ProductBasis, build_graph, lower_bound_size
from .document import DocumentError, dumps_basis, load_basis, state_json
from .entangle import FullBasis, certify, recheck
from .extend import BudgetExhausted, is_extendible
from .numerics import DEFAULT_TOL, DimensionMismatch

OK, FAILS, INCONCLUSIVE, BAD_INPUT = 0, 1, 2, 3
DEFAULT_BUDGET = 10_000_000
PALETTE = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan", "gold", "gray"]
NAMES = [
    "pyramid",
    "tiles",
    "family33",
    "pyr34",
    "pyr34plus",
    "shifts",
    "genshifts",
    "gentiles1",
    "gentiles2",
    "sept",
    "genpyramid",
    "quadres",
    "tensor",
    "sept-counterexample",
]
TENSOR_FACTORS = {"pyramid": C.pyramid, "tiles": C.tiles, "pyr34": C.pyr34, "pyr34plus": C.pyr34_plus}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


def build(name: str, args: argparse.Namespace) -> ProductBasis:
    if name == "family33":
        params = C.Family33Params(*args.angles) if args.angles else C.Family33Params.pyramid_point()
        return C.family33(params, margin=args.margin)
    if name == "genshifts":
        return C.genshifts(args.k or 2)
    if name == "gentiles1":
        return C.gentiles1(args.n or 4)
    if name == "gentiles2":
        return C.gentiles2(args.m or 3, args.n or 4)
    if name == "genpyramid":
        n = args.n or 3
        params = C.GenPyramidParams.default(n)
        if args.offset is not None:
            params = C.GenPyramidParams(n, params.p, args.offset)
        return C.genpyramid(params)
    if name == "quadres":
        return C.quadres(args.p or 5)
    if name == "tensor":
        return C.tensor_upb(TENSOR_FACTORS[args.left](), TENSOR_FACTORS[args.right]())
    simple = {
        "pyramid": C.pyramid,
        "tiles": C.tiles,
        "pyr34": C.pyr34,
        "pyr34plus": C.pyr34_plus,
        "shifts": C.shifts,
        "sept": C.sept,
        "sept-counterexample": C.sept_counterexample,
    }
    return simple[name]()


def cmd_generate(args) -> int:
    try:
        pb = build(args.name, args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    text = dumps_basis(pb)
    summary = f"{len(pb)} states, dims {list(pb.dims)}"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {summary} to {args.out}")
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return OK


def _load(args) -> ProductBasis | int:
    try:
        return load_basis(args.path, args.tol)
    except PairNotOrthogonal as exc:
        print(f"not a product basis: {exc}")
        return FAILS
    except (DocumentError, DimensionMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


def _graph_summary(pb: ProductBasis, tol: float) -> str:
    g = build_graph(pb, tol)
    per = [len(e) for e in g.edges]
    return f"graph: {g.n} vertices, edges per party {per}, complete: {'yes' if g.is_complete() else 'no'}"


def cmd_verify(args) -> int:
    pb = _load(args)
    if isinstance(pb, int):
        return pb
    n = len(pb)
    if n > 1:
        v = pb.vectors()
        g = np.abs(v.conj() @ v.T)
        np.fill_diagonal(g, 0.0)
        print(f"orthogonal: {n} states, max |<psi_j|psi_k>| = {g.max():.3e}")
    else:
        print(f"orthogonal: {n} states")
    print(_graph_summary(pb, args.tol))
    if all(d >= 2 for d in pb.dims):
        bound = lower_bound_size(pb.dims)
        rel = "meets" if n == bound else ("exceeds" if n > bound else "is below")
        print(f"lower bound: {bound}; size {n} {rel} it")
    budget = 0 if args.exhaustive else args.budget
    try:
        res = is_extendible(pb, args.tol, budget, args.threads)
    except BudgetExhausted as exc:
        print(f"budget exhausted ({exc.nodes} nodes)")
        return INCONCLUSIVE
    if res.extendible:
        print("extendible, witness emitted")
        witness = {
            "partition": list(res.partition),
            "local_ranks": list(res.local_ranks),
            "new_state": state_json(res.new_state),
        }
        print(json.dumps(witness))
        if args.witness_out:
            Path(args.witness_out).write_text(dumps_basis(pb.with_states([res.new_state], args.tol)))
        verdict = "extendible"
    else:
        print(f"UPB (exhaustive, {res.assignments} assignments)")
        print(f"nodes visited: {res.nodes}")
        verdict = "upb"
    if args.expect and args.expect != verdict:
        return FAILS
    return OK


def _certificate_doc(cert, pb) -> dict:
    ev = dict(cert.evidence)
    if "completion" in ev:
        ev["completion"] = [state_json(s) for s in ev["completion"]]
    if "dims" in ev:
        ev["dims"] = list(ev["dims"])
    if "families" in ev:
        ev["families"] = [list(p) for p in ev["families"]]
    doc = {"kind": cert.kind, "dims": list(pb.dims), "states": len(pb), "evidence": ev}
    if cert.ppt is not None:
        doc["ppt_all_cuts"] = cert.ppt.ppt
        doc["cuts"] = [{"kept": list(c.kept), "transposed": list(c.transposed), "min_eig": c.min_eig} for c in cert.ppt.cuts]
    return doc


def cmd_certify(args) -> int:
    pb = _load(args)
    if isinstance(pb, int):
        return pb
    ext = None
    if args.extend:
        try:
            ext = tuple(int(x) for x in args.extend.split(","))
        except ValueError:
            print(f"error: --extend expects comma-separated integers, got {args.extend!r}", file=sys.stderr)
            return BAD_INPUT
        if len(ext) != pb.n_parties or any(e < d for e, d in zip(ext, pb.dims)):
            print(f"error: extension {list(ext)} does not contain dims {list(pb.dims)}", file=sys.stderr)
            return BAD_INPUT
    budget = 0 if args.exhaustive else args.budget
    try:
        cert = certify(pb, args.tol, budget, ext, threads=args.threads)
    except FullBasis as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    ev = cert.evidence
    ppt = cert.ppt is not None and cert.ppt.ppt
    tag = " + PPT-all-cuts" if ppt else " (partial transpose not positive)"
    if cert.kind == "UPB":
        print(f"UPB{tag}")
    elif cert.kind == "RangeDeficit":
        print(f"RangeDeficit {ev['span_dim']} < {ev['rank']}{tag}")
    elif cert.kind == "SeparableByCompletion":
        print(f"SeparableByCompletion in {list(ev['dims'])} ({len(ev['completion'])} added states)")
    else:
        print(f"Inconclusive: {ev['reason']}")
        if ev.get("assumed_separable"):
            print("separable if PPT states of rank at most two are separable")
    for c in cert.ppt.cuts if cert.ppt else ():
        print(f"  cut {list(c.kept)} | {list(c.transposed)}: min eigenvalue of partial transpose {c.min_eig:.3e}")
    doc = _certificate_doc(cert, pb)
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if cert.kind == "Inconclusive":
        return INCONCLUSIVE
    if not recheck(cert, pb, args.tol):
        print("certificate failed re-verification")
        return FAILS
    if cert.kind in ("UPB", "RangeDeficit") and not ppt:
        return FAILS
    return OK


def graph_dot(pb: ProductBasis, tol: float = DEFAULT_TOL) -> str:
    g = build_graph(pb, tol)
    lines = ["graph orthogonality {", "  node [shape=circle];"]
    lines += [f"  {v};" for v in range(g.n)]
    pairs = sorted({p for e in g.edges for p in e})
    for a, b in pairs:
        for c in g.colors_of(a, b):
            lines.append(f'  {a} -- {b} [color="{PALETTE[c % len(PALETTE)]}", party={c}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_graph(args) -> int:
    pb = _load(args)
    if isinstance(pb, int):
        return pb
    dot = graph_dot(pb, args.tol)
    g = build_graph(pb, args.tol)
    print(f"{sum(len(e) for e in g.edges)} edges, per party {[len(e) for e in g.edges]}")
    if args.dot:
        Path(args.dot).write_text(dot)
    else:
        sys.stdout.write(dot)
    return OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="upb", description="Construct, verify and certify unextendible product bases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, search: bool = False):
        sp.add_argument("path", help="basis document")
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
        if search:
            sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="node budget for the search")
            sp.add_argument("--exhaustive", action="store_true", help="run the search without a node budget")
            sp.add_argument("--threads", type=int, default=1)

    g = sub.add_parser("generate", help="write a construction as a basis document")
    g.add_argument("name", choices=NAMES)
    g.add_argument("-o", "--out")
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--offset", type=int, help="polygon offset for genpyramid")
    g.add_argument("--angles", type=float, nargs=6, metavar="A", help="gammaA thetaA phiA gammaB thetaB phiB")
    g.add_argument("--margin", type=float, default=1e-3)
    g.add_argument("--left", choices=sorted(TENSOR_FACTORS), default="pyramid")
    g.add_argument("--right", choices=sorted(TENSOR_FACTORS), default="pyramid")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check orthogonality and decide extendibility")
    common(v, search=True)
    v.add_argument("--expect", choices=["upb", "extendible"])
    v.add_argument("--witness-out", help="write the basis extended by the witness state")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("certify", help="classify the complement state")
    common(c, search=True)
    c.add_argument("--extend", help="local dimensions d1,d2,... in which to look for a completion")
    c.add_argument("-o", "--out", help="write the certificate as JSON")
    c.set_defaults(func=cmd_certify)

    gr = sub.add_parser("graph", help="export the orthogonality graph")
    common(gr)
    gr.add_argument("--dot", help="output path for the DOT file")
    gr.set_defaults(func=cmd_graph)
    return p


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit with BAD_INPUT, --help with 0
        return exc.code if isinstance(exc.code, int) else BAD_INPUT
    if hasattr(args, "tol") and not 0 < args.tol < 1e-3:
        print(f"error: --tol must lie in (0, 1e-3), got {args.tol}", file=sys.stderr)
        return BAD_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
