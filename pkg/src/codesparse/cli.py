"""Command-line front end.

Every subcommand emits one JSON object on stdout.  Rationals appear as
"num/den" strings; decimal renderings are display only.  Randomized
subcommands require an explicit --seed and are bit-reproducible given
(input, seed), except for the wall_time_s field.

Exit codes: 0 success (verified when --verify is set), 2 verification
failure (the report is still emitted), 1 malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import cayley as cayley_mod
from . import counting, corpus, csp as csp_mod, graphs as graphs_mod
from . import hypergraphs as hyper_mod, sparsify as sparsify_mod
from .codes import GeneratorMatrix, Sparsifier, unit_weights, verify_sparsifier
from .errors import CodesparseError, ParseError
from .formats import (
    fraction_decimal_str,
    fraction_to_str,
    parse_cayley,
    parse_code,
    parse_csp,
    parse_fraction,
    parse_graph,
    parse_hypergraph,
    render_cayley,
    render_code,
    render_csp,
    render_graph,
    render_hypergraph,
    sparsifier_from_json,
    sparsifier_to_json,
)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _fraction_arg(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ParseError:
        raise argparse.ArgumentTypeError(f"expected a rational like 1/2, got {text!r}")


def _sparsifier_json(sp: Sparsifier) -> dict:
    return {
        "coords": list(sp.coords),
        "weights": [fraction_to_str(w) for w in sp.weights],
    }


def _verification_json(rep) -> dict:
    return {
        "passed": rep.passed,
        "epsilon": fraction_to_str(rep.epsilon),
        "max_relative_error": fraction_to_str(rep.max_relative_error),
        "max_relative_error_decimal": fraction_decimal_str(rep.max_relative_error),
        "witness": list(rep.witness) if rep.witness is not None else None,
        "checked": rep.checked,
    }


def _emit(report: dict, started: float) -> None:
    report["wall_time_s"] = f"{time.monotonic() - started:.3f}"
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _sparsify_knobs(args) -> dict:
    return {
        "eta": args.eta,
        "aggressive": args.aggressive,
        "base_case_multiplier": args.base_case_multiplier,
    }


def _add_sparsify_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--epsilon", type=_fraction_arg, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--eta", type=_fraction_arg, default=None)
    sub.add_argument("--aggressive", action="store_true")
    sub.add_argument(
        "--base-case-multiplier",
        dest="base_case_multiplier",
        type=_fraction_arg,
        default=Fraction(100),
    )
    sub.add_argument("--verify", action="store_true")
    sub.add_argument("--format", choices=["json"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codesparse")
    subs = parser.add_subparsers(dest="command", required=True)

    sc = subs.add_parser("sparsify-code", help="sparsify a linear code")
    sc.add_argument("--code", required=True)
    sc.add_argument("--weights", default=None, help="optional file of n rationals")
    _add_sparsify_flags(sc)

    sg = subs.add_parser("sparsify-graph", help="cut-sparsify a graph")
    sg.add_argument("--graph", required=True)
    sg.add_argument("--via-code", action="store_true", dest="via_code")
    sg.add_argument("--C", type=_fraction_arg, default=None, dest="c_override")
    sg.add_argument(
        "--base-edges", type=_fraction_arg, default=None, dest="base_edge_override"
    )
    _add_sparsify_flags(sg)

    sh = subs.add_parser("sparsify-hypergraph", help="cut-sparsify a hypergraph")
    sh.add_argument("--hypergraph", required=True)
    _add_sparsify_flags(sh)

    sy = subs.add_parser("sparsify-cayley", help="spectrally sparsify a Cayley spec")
    sy.add_argument("--cayley", required=True)
    _add_sparsify_flags(sy)

    sp = subs.add_parser("sparsify-csp", help="sparsify an affine CSP instance")
    sp.add_argument("--csp", required=True)
    _add_sparsify_flags(sp)

    cp = subs.add_parser("classify-predicate", help="classify a ternary predicate")
    cp.add_argument("--table", required=True)
    cp.add_argument("--format", choices=["json"], default="json")

    cb = subs.add_parser("count-bound", help="check the codeword counting bound")
    cb.add_argument("--code", required=True)
    cb.add_argument("--d", type=int, required=True)
    cb.add_argument("--format", choices=["json"], default="json")

    ct = subs.add_parser("contract", help="run the contraction algorithm")
    ct.add_argument("--code", required=True)
    ct.add_argument("--alpha", type=int, required=True)
    ct.add_argument("--seed", type=int, required=True)
    ct.add_argument("--format", choices=["json"], default="json")

    dh = subs.add_parser("decompose-hypergraph", help="hyperedge decomposition")
    dh.add_argument("--hypergraph", required=True)
    dh.add_argument("--d", type=int, required=True)
    dh.add_argument("--format", choices=["json"], default="json")

    st = subs.add_parser("spectrum", help="Laplacian spectrum of a Cayley spec")
    st.add_argument("--cayley", required=True)
    st.add_argument("--format", choices=["json"], default="json")

    vf = subs.add_parser("verify", help="verify a sparsifier exhaustively")
    vf.add_argument("--code", required=True)
    vf.add_argument("--sparsifier", required=True)
    vf.add_argument("--epsilon", type=_fraction_arg, required=True)
    vf.add_argument("--format", choices=["json"], default="json")

    gc = subs.add_parser("gen-corpus", help="write deterministic fixtures")
    gc.add_argument("kind", choices=["code", "graph", "hypergraph", "cayley", "csp"])
    gc.add_argument("--out", default=None)
    gc.add_argument("--seed", type=int, default=0)
    gc.add_argument("--q", type=int, default=2)
    gc.add_argument("--k", type=int, default=4)
    gc.add_argument("--n", type=int, default=16)
    gc.add_argument("--m", type=int, default=8)
    gc.add_argument("--p", type=_fraction_arg, default=Fraction(1, 2))
    gc.add_argument("--family", default="random")
    gc.add_argument("--model", default="gnp")
    gc.add_argument("--kind", dest="csp_kind", default="xor2-complete")
    gc.add_argument("--arity", type=int, default=3)

    rp = subs.add_parser("report", help="render figures and CSV summaries")
    rp.add_argument("--code", default=None)
    rp.add_argument("--cayley", default=None)
    rp.add_argument("--outdir", required=True)
    rp.add_argument("--d", type=int, default=1)
    rp.add_argument("--epsilon", type=_fraction_arg, default=None)
    rp.add_argument("--seed", type=int, default=None)
    rp.add_argument("--eta", type=_fraction_arg, default=None)
    rp.add_argument("--aggressive", action="store_true")
    rp.add_argument(
        "--base-case-multiplier",
        dest="base_case_multiplier",
        type=_fraction_arg,
        default=Fraction(100),
    )
    rp.add_argument("--format", choices=["json"], default="json")
    return parser


def _cmd_sparsify_code(args, started) -> int:
    text = _read(args.code)
    G, file_weights = parse_code(text)
    weights = file_weights
    digests = {"code": _digest(text)}
    if args.weights:
        wtext = _read(args.weights)
        digests["weights"] = _digest(wtext)
        toks = wtext.split()
        weights = tuple(parse_fraction(t, 1, j + 1) for j, t in enumerate(toks))
    sp = sparsify_mod.final_code_sparsify(
        G, weights, args.epsilon, args.seed, **_sparsify_knobs(args)
    )
    report = {
        "command": "sparsify-code",
        "input_digest": digests,
        "seed": args.seed,
        "epsilon": fraction_to_str(args.epsilon),
        "sizes": {"coordinates": G.n, "retained": len(sp)},
        "sparsifier": _sparsifier_json(sp),
        "verification": None,
    }
    exit_code = 0
    if args.verify:
        rep = verify_sparsifier(G, weights, sp, args.epsilon)
        report["verification"] = _verification_json(rep)
        report["max_relative_error"] = fraction_decimal_str(rep.max_relative_error)
        exit_code = 0 if rep.passed else 2
    _emit(report, started)
    return exit_code


def _cmd_sparsify_graph(args, started) -> int:
    text = _read(args.graph)
    g = parse_graph(text)
    if args.via_code:
        G = graphs_mod.cut_code(g)
        sp = sparsify_mod.final_code_sparsify(
            G,
            g.edge_weights(),
            args.epsilon,
            args.seed,
            **_sparsify_knobs(args),
        )
        edges = tuple(
            (g.edges[i][0], g.edges[i][1], w) for i, w in zip(sp.coords, sp.weights)
        )
        sparsified = graphs_mod.Graph(g.n_vertices, edges)
    else:
        sparsified = graphs_mod.graph_sparsify_appendix(
            g, args.epsilon, args.seed, args.c_override, args.base_edge_override
        )
    report = {
        "command": "sparsify-graph",
        "input_digest": {"graph": _digest(text)},
        "seed": args.seed,
        "epsilon": fraction_to_str(args.epsilon),
        "via_code": bool(args.via_code),
        "sizes": {"edges": g.m, "retained": sparsified.m},
        "graph": {
            "n": sparsified.n_vertices,
            "edges": [
                [u, v, fraction_to_str(w)] for u, v, w in sparsified.edges
            ],
        },
        "verification": None,
    }
    exit_code = 0
    if args.verify:
        rep = graphs_mod.verify_cut_sparsifier(g, sparsified, args.epsilon)
        report["verification"] = _verification_json(rep)
        exit_code = 0 if rep.passed else 2
    _emit(report, started)
    return exit_code


def _cmd_sparsify_hypergraph(args, started) -> int:
    text = _read(args.hypergraph)
    h = parse_hypergraph(text)
    sparsified = hyper_mod.sparsify_hypergraph(
        h,
        args.epsilon,
        args.seed,
        eta=args.eta,
        aggressive=args.aggressive,
        base_case_multiplier=args.base_case_multiplier,
    )
    report = {
        "command": "sparsify-hypergraph",
        "input_digest": {"hypergraph": _digest(text)},
        "seed": args.seed,
        "epsilon": fraction_to_str(args.epsilon),
        "sizes": {"hyperedges": h.m, "retained": sparsified.m},
        "hypergraph": {
            "n": sparsified.n_vertices,
            "hyperedges": [
                {"vertices": list(e), "weight": fraction_to_str(w)}
                for e, w in zip(sparsified.hyperedges, sparsified.weights)
            ],
        },
        "verification": None,
    }
    exit_code = 0
    if args.verify:
        rep = hyper_mod.verify_hypergraph_sparsifier(h, sparsified, args.epsilon)
        report["verification"] = _verification_json(rep)
        exit_code = 0 if rep.passed else 2
    _emit(report, started)
    return exit_code


def _cmd_sparsify_cayley(args, started) -> int:
    text = _read(args.cayley)
    spec = parse_cayley(text)
    sparsified = cayley_mod.sparsify_cayley(
        spec,
        args.epsilon,
        args.seed,
        eta=args.eta,
        aggressive=args.aggressive,
        base_case_multiplier=args.base_case_multiplier,
    )
    report = {
        "command": "sparsify-cayley",
        "input_digest": {"cayley": _digest(text)},
        "seed": args.seed,
        "epsilon": fraction_to_str(args.epsilon),
        "sizes": {"generators": spec.n, "retained": sparsified.n},
        "cayley": {
            "k": sparsified.k,
            "generators": [
                {"vector": vec, "weight": fraction_to_str(w)}
                for vec, w in sparsified.generators
            ],
        },
        "verification": None,
    }
    exit_code = 0
    if args.verify:
        ok, worst = cayley_mod.spectrum_within(spec, sparsified, args.epsilon)
        report["verification"] = {
            "passed": ok,
            "epsilon": fraction_to_str(args.epsilon),
            "max_relative_error": fraction_to_str(worst),
            "max_relative_error_decimal": fraction_decimal_str(worst),
        }
        exit_code = 0 if ok else 2
    _emit(report, started)
    return exit_code


def _cmd_sparsify_csp(args, started) -> int:
    text = _read(args.csp)
    instance = parse_csp(text)
    sparsified = csp_mod.sparsify_affine_csp(
        instance,
        args.epsilon,
        args.seed,
        eta=args.eta,
        aggressive=args.aggressive,
        base_case_multiplier=args.base_case_multiplier,
    )
    report = {
        "command": "sparsify-csp",
        "input_digest": {"csp": _digest(text)},
        "seed": args.seed,
        "epsilon": fraction_to_str(args.epsilon),
        "sizes": {"constraints": instance.m, "retained": sparsified.m},
        "csp": render_csp(sparsified).splitlines(),
        "verification": None,
    }
    exit_code = 0
    if args.verify:
        rep = csp_mod.verify_csp_sparsifier(instance, sparsified, args.epsilon)
        report["verification"] = _verification_json(rep)
        exit_code = 0 if rep.passed else 2
    _emit(report, started)
    return exit_code


def _cmd_classify(args, started) -> int:
    pred = csp_mod.Predicate.from_string(args.table)
    result = csp_mod.ternary_classify(pred)
    report = {
        "command": "classify-predicate",
        "table": pred.to_string(),
        "satisfying_assignments": len(pred.satisfying_assignments()),
        "verdict": result.verdict,
    }
    if result.representation is not None:
        report["representation"] = {
            "p": result.representation.p,
            "coefficients": list(result.representation.coefficients),
        }
    if result.witness is not None:
        report["witness"] = list(result.witness)
    _emit(report, started)
    return 0


def _cmd_count_bound(args, started) -> int:
    text = _read(args.code)
    G, _ = parse_code(text)
    rep = counting.check_counting_bound(G, args.d)
    report = {
        "command": "count-bound",
        "input_digest": {"code": _digest(text)},
        "d": args.d,
        "column_count": rep.column_count,
        "passed": rep.passed,
        "per_alpha": [
            {"alpha": l.alpha, "observed": l.observed, "bound": l.bound, "ok": l.ok}
            for l in rep.per_alpha
        ],
    }
    _emit(report, started)
    return 0


def _cmd_contract(args, started) -> int:
    text = _read(args.code)
    G, _ = parse_code(text)
    trace = counting.contract(G, args.alpha, args.seed)
    final = trace.final_matrix
    report = {
        "command": "contract",
        "input_digest": {"code": _digest(text)},
        "seed": args.seed,
        "alpha": args.alpha,
        "chosen_coordinates": list(trace.chosen_coordinates),
        "final_matrix": {
            "p": final.p,
            "n": final.n,
            "k": final.k,
            "rows": final.entries.tolist(),
        },
    }
    _emit(report, started)
    return 0


def _cmd_decompose_hypergraph(args, started) -> int:
    text = _read(args.hypergraph)
    h = parse_hypergraph(text)
    removed, residual, cut_report, code_report = hyper_mod.hypergraph_decomposition(
        h, args.d
    )
    report = {
        "command": "decompose-hypergraph",
        "input_digest": {"hypergraph": _digest(text)},
        "d": args.d,
        "removed_hyperedges": list(removed),
        "residual": {
            "n": residual.n_vertices,
            "hyperedges": [list(e) for e in residual.hyperedges],
        },
        "cut_counts": [
            {"alpha": a, "observed": o, "bound": b, "ok": ok}
            for a, o, b, ok in cut_report.per_alpha
        ],
        "codeword_counts_passed": code_report.passed if code_report else None,
    }
    _emit(report, started)
    return 0


def _cmd_spectrum(args, started) -> int:
    text = _read(args.cayley)
    spec = parse_cayley(text)
    lam = cayley_mod.laplacian_spectrum(spec)
    report = {
        "command": "spectrum",
        "input_digest": {"cayley": _digest(text)},
        "k": spec.k,
        "eigenvalues": [fraction_to_str(v) for v in lam],
    }
    _emit(report, started)
    return 0


def _cmd_verify(args, started) -> int:
    text = _read(args.code)
    G, weights = parse_code(text)
    sp_text = _read(args.sparsifier)
    sp = sparsifier_from_json(sp_text)
    rep = verify_sparsifier(G, weights, sp, args.epsilon)
    report = {
        "command": "verify",
        "input_digest": {"code": _digest(text), "sparsifier": _digest(sp_text)},
        "epsilon": fraction_to_str(args.epsilon),
        "verification": _verification_json(rep),
    }
    _emit(report, started)
    return 0 if rep.passed else 2


def _cmd_gen_corpus(args, started) -> int:
    kind = args.kind
    if kind == "code":
        if args.family == "identity":
            G = corpus.identity_code(args.q, args.k)
        elif args.family == "repetition":
            G = corpus.repetition_code(args.q, args.n)
        elif args.family == "hamming74":
            G = corpus.hamming_7_4()
        elif args.family == "simplex":
            G = corpus.simplex_code(args.k)
        elif args.family == "random":
            G = corpus.random_code(args.q, args.k, args.n, args.seed)
        else:
            raise ParseError(f"unknown code family {args.family!r}")
        text = render_code(G)
    elif kind == "graph":
        if args.model == "gnp":
            g = corpus.gnp_graph(args.n, args.p, args.seed)
        elif args.model == "complete":
            g = corpus.complete_graph(args.n)
        elif args.model == "cycle":
            g = corpus.cycle_graph(args.n)
        elif args.model == "cube":
            g = corpus.cube_graph(args.k)
        else:
            raise ParseError(f"unknown graph model {args.model!r}")
        text = render_graph(g)
    elif kind == "hypergraph":
        h = corpus.random_hypergraph(args.n, args.m, args.seed)
        text = render_hypergraph(h)
    elif kind == "cayley":
        if args.family == "simplex":
            spec = corpus.simplex_cayley(args.k)
        elif args.family == "hypercube":
            spec = corpus.hypercube_cayley(args.k)
        else:
            spec = corpus.random_cayley(args.k, args.m, args.seed)
        text = render_cayley(spec)
    else:  # csp
        if args.csp_kind == "xor2-complete":
            instance = corpus.xor2_complete(args.k)
        elif args.csp_kind == "random-affine":
            instance = corpus.random_affine_csp(args.q, args.k, args.m, args.arity, args.seed)
        else:
            raise ParseError(f"unknown csp kind {args.csp_kind!r}")
        text = render_csp(instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
        return 0
    report = {
        "command": "gen-corpus",
        "kind": kind,
        "out": args.out,
        "digest": _digest(text),
    }
    _emit(report, started)
    return 0


def _cmd_report(args, started) -> int:
    from . import report as report_mod

    produced = []
    digests = {}
    if args.code:
        text = _read(args.code)
        digests["code"] = _digest(text)
        G, weights = parse_code(text)
        bound_rep = counting.check_counting_bound(G, args.d)
        produced += report_mod.write_counting_report(G, bound_rep, args.outdir)
        if args.epsilon is not None and args.seed is not None:
            sp = sparsify_mod.final_code_sparsify(
                G,
                weights,
                args.epsilon,
                args.seed,
                eta=args.eta,
                aggressive=args.aggressive,
                base_case_multiplier=args.base_case_multiplier,
            )
            ver = verify_sparsifier(G, weights, sp, args.epsilon)
            produced += report_mod.write_sparsifier_report(
                G, weights, sp, ver, args.outdir
            )
    elif args.cayley:
        text = _read(args.cayley)
        digests["cayley"] = _digest(text)
        spec = parse_cayley(text)
        sparsified = None
        if args.epsilon is not None and args.seed is not None:
            sparsified = cayley_mod.sparsify_cayley(
                spec,
                args.epsilon,
                args.seed,
                eta=args.eta,
                aggressive=args.aggressive,
                base_case_multiplier=args.base_case_multiplier,
            )
        produced += report_mod.write_spectrum_report(spec, sparsified, args.outdir)
    else:
        raise ParseError("report needs --code or --cayley")
    report = {
        "command": "report",
        "input_digest": digests,
        "outdir": args.outdir,
        "files": [str(p) for p in produced],
    }
    _emit(report, started)
    return 0


_HANDLERS = {
    "sparsify-code": _cmd_sparsify_code,
    "sparsify-graph": _cmd_sparsify_graph,
    "sparsify-hypergraph": _cmd_sparsify_hypergraph,
    "sparsify-cayley": _cmd_sparsify_cayley,
    "sparsify-csp": _cmd_sparsify_csp,
    "classify-predicate": _cmd_classify,
    "count-bound": _cmd_count_bound,
    "contract": _cmd_contract,
    "decompose-hypergraph": _cmd_decompose_hypergraph,
    "spectrum": _cmd_spectrum,
    "verify": _cmd_verify,
    "gen-corpus": _cmd_gen_corpus,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    started = time.monotonic()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args, started)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except CodesparseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
