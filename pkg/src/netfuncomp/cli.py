"""Command-line front end.

Every subcommand prints one JSON report to stdout wrapped in an envelope
carrying the tool version and the fully resolved configuration, so a report
can be reproduced from itself.  Floats are rounded to 15 significant digits
and keys are sorted before printing; identical inputs and options therefore
produce byte-identical reports.  Exit codes: 0 on success, 2 for any input
or usage problem (with a one-line diagnostic on stderr), 3 when a size cap
is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__, bounds, chargraph, codesim, entropy, equiv, examples, netmodel, pgraph
from .errors import NetfuncompError, UsageError
from .netmodel import NetworkModel


def _round_floats(doc):
    if isinstance(doc, float):
        return float(f"{doc:.15g}")
    if isinstance(doc, dict):
        return {k: _round_floats(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_round_floats(v) for v in doc]
    return doc


def _emit(command: str, config: dict, result) -> None:
    doc = {
        "tool": "netfuncomp",
        "version": __version__,
        "command": command,
        "config": config,
        "result": result,
    }
    print(json.dumps(_round_floats(doc), sort_keys=True, indent=2))


def _load(path: str) -> NetworkModel:
    model = netmodel.load_model(path)
    return netmodel.validate(model)


def _parse_cut(model: NetworkModel, text: str) -> netmodel.CutAnalysis:
    ids = tuple(sorted(x.strip() for x in text.split(",") if x.strip()))
    if not ids:
        raise UsageError("empty cut")
    return netmodel.analyze_cut(model, ids)


def _parse_partition(
    model: NetworkModel, cut: netmodel.CutAnalysis, text: str | None
) -> netmodel.StrongPartition:
    wanted = None
    if text is not None:
        wanted = tuple(
            sorted(
                tuple(sorted(x.strip() for x in blk.split(",") if x.strip()))
                for blk in text.split("/")
            )
        )
    for part in netmodel.enumerate_strong_partitions(model, cut):
        if wanted is None and part.is_trivial:
            return part
        if wanted is not None and tuple(sorted(part.blocks)) == wanted:
            return part
    raise UsageError(f"{text or 'trivial'} is not a strong partition of {cut.cut}")


def _parse_assignment(text: str, q: int, n_sources: int, k: int) -> netmodel.Assignment:
    symbols = [int(c) for c in text] if q <= 10 else [int(x) for x in text.split(",")]
    if len(symbols) != n_sources * k or any(not 0 <= v < q for v in symbols):
        raise UsageError(f"assignment {text!r} does not fit {n_sources} sources at k={k}")
    return tuple(tuple(symbols[i * k : (i + 1) * k]) for i in range(n_sources))


def _search_config(args) -> bounds.SearchConfig:
    pairs = None
    if getattr(args, "pairs", None):
        with open(args.pairs, encoding="utf-8") as fh:
            listed = json.load(fh)
        if not isinstance(listed, list):
            raise UsageError("--pairs file must hold a JSON list of {cut, blocks}")
        pairs = tuple(
            (
                tuple(sorted(item["cut"])),
                tuple(sorted(tuple(sorted(b)) for b in item["blocks"])),
            )
            for item in listed
        )
    return bounds.SearchConfig(max_cut_size=args.max_cut_size, pairs=pairs)


def _opt_config(args, *, grid_default: bool = False) -> bounds.OptConfig:
    grid = grid_default if args.grid_oracle is None else args.grid_oracle
    return bounds.OptConfig(
        starts=args.starts, seed=args.seed, gain_tol=args.tol, grid_oracle=grid
    )


def _bounds_result(
    model: NetworkModel, search: bounds.SearchConfig, opt: bounds.OptConfig
) -> dict:
    basic = bounds.basic_lower_bound(model, search)
    improved = bounds.improved_lower_bound(model, search, opt)
    fixed = bounds.fixed_length_bound(model, search)
    rows = []
    for b, i, f in zip(basic.pairs, improved.pairs, fixed.pairs):
        rows.append(
            {
                "cut": list(b.cut),
                "blocks": [list(blk) for blk in b.blocks],
                "basic": b.value,
                "improved": i.value,
                "fixed_length": f.value,
                "details": {
                    "basic": dict(b.details),
                    "improved": dict(i.details),
                    "fixed_length": dict(f.details),
                },
            }
        )
    return {
        "basic": basic.value,
        "improved": improved.value,
        "fixed_length": fixed.value,
        "witness": {
            "basic": {
                "cut": list(basic.witness_cut),
                "blocks": [list(b) for b in basic.witness_blocks],
            },
            "improved": {
                "cut": list(improved.witness_cut),
                "blocks": [list(b) for b in improved.witness_blocks],
            },
            "fixed_length": {
                "cut": list(fixed.witness_cut),
                "blocks": [list(b) for b in fixed.witness_blocks],
            },
        },
        "pairs": rows,
    }


def _bounds_csv(result: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["cut", "blocks", "basic", "improved", "fixed_length"])
    for row in result["pairs"]:
        writer.writerow(
            [
                ",".join(row["cut"]),
                "/".join(",".join(b) for b in row["blocks"]),
                f"{row['basic']:.15g}",
                f"{row['improved']:.15g}",
                f"{row['fixed_length']:.15g}",
            ]
        )
    return out.getvalue()


def _threads() -> int:
    raw = os.environ.get("NETFUNC_THREADS", "")
    try:
        return int(raw) if raw else 1
    except ValueError:
        raise UsageError(f"NETFUNC_THREADS must be an integer, got {raw!r}")


def _cmd_validate(args) -> None:
    model = _load(args.model)
    _emit(
        "validate",
        {"model": args.model},
        {
            "valid": True,
            "alphabet": model.alphabet_size,
            "nodes": len(model.nodes),
            "edges": len(model.edges),
            "sources": list(model.sources),
            "sink": model.sink,
        },
    )


def _cmd_cuts(args) -> None:
    model = _load(args.model)
    doc = []
    for analysis in netmodel.enumerate_cut_sets(model, args.max_cut_size):
        parts = netmodel.enumerate_strong_partitions(model, analysis)
        doc.append(
            {
                "cut": list(analysis.cut),
                "k_set": sorted(analysis.k_set),
                "i_set": sorted(analysis.i_set),
                "j_set": sorted(analysis.j_set),
                "global": analysis.is_global,
                "strong_partitions": [
                    [list(b) for b in p.blocks] for p in parts
                ],
            }
        )
    _emit(
        "cuts",
        {"model": args.model, "max_cut_size": args.max_cut_size},
        {"cut_sets": doc, "count": len(doc)},
    )


def _cmd_classes(args) -> None:
    model = _load(args.model)
    i_sources = tuple(x.strip() for x in args.i.split(",") if x.strip())
    j_sources = tuple(x.strip() for x in args.j.split(",") if x.strip()) if args.j else ()
    a_j = ()
    if args.aj:
        a_j = _parse_assignment(args.aj, model.alphabet_size, len(j_sources), args.k)
    part = equiv.i_aj_classes(model, i_sources, j_sources, a_j, k=args.k)
    _emit(
        "classes",
        {
            "model": args.model,
            "i": list(i_sources),
            "j": list(j_sources),
            "aj": args.aj,
            "k": args.k,
        },
        {
            "sources": list(part.sources),
            "k": part.k,
            "num_classes": part.num_classes,
            "classes": [
                [netmodel.format_assignment(a, model.alphabet_size) for a in cls]
                for cls in part.classes
            ],
        },
    )


def _cmd_chargraph(args) -> None:
    model = _load(args.model)
    cut = _parse_cut(model, args.cut)
    partition = _parse_partition(model, cut, args.blocks)
    cg = chargraph.build(model, cut, partition, args.k)
    report = chargraph.layer_report(cg)
    g = cg.graph
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)
        name = "chargraph_" + "_".join(cut.cut) + f"_k{args.k}"
        path = os.path.join(args.dot, name + ".dot")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(pgraph.to_dot(g, name=name))
    _emit(
        "chargraph",
        {
            "model": args.model,
            "cut": list(cut.cut),
            "blocks": [list(b) for b in partition.blocks],
            "k": args.k,
            "dot": args.dot,
        },
        {
            "graph": {
                "vertices": list(g.vertices),
                "edges": [list(e) for e in g.edges()],
                "dist": [float(p) for p in g.dist],
            },
            "order": list(cg.order),
            "layers": [
                {
                    "vertex": g.vertices[i],
                    "fiber": c.fiber,
                    "class": c.cls,
                    "leftover": c.leftover,
                    "bracket": list(c.bracket),
                }
                for i, c in enumerate(cg.layers)
            ],
            "layer_certificate": {
                "fibers_isolated": report.fibers_isolated,
                "classes_completely_connected": report.classes_completely_connected,
                "leftover_isolated": report.leftover_isolated,
                "brackets_completely_connected": report.brackets_completely_connected,
                "bracket_interiors_empty": report.bracket_interiors_empty,
                "ok": report.ok,
            },
        },
    )


def _cmd_entropy(args) -> None:
    with open(args.graph, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        g = pgraph.ProbGraph(
            [tuple(v) if isinstance(v, list) else v for v in doc["vertices"]],
            [
                (
                    tuple(u) if isinstance(u, list) else u,
                    tuple(v) if isinstance(v, list) else v,
                )
                for u, v in doc["edges"]
            ],
            doc["dist"],
        )
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed graph document: {exc}") from exc
    chrom = entropy.chromatic_entropy(g)
    kappa = entropy.graph_entropy(g)
    omega = entropy.clique_entropy(g)
    tree = omega.certificate
    _emit(
        "entropy",
        {"graph": args.graph},
        {
            "chromatic_entropy": chrom.value,
            "graph_entropy": kappa.value,
            "clique_entropy": omega.value,
            "methods": {
                "chromatic": chrom.method,
                "graph": kappa.method,
                "clique": omega.method,
            },
            "certificate": tree.to_dict(list(g.vertices)) if tree is not None else None,
        },
    )


def _cmd_bounds(args) -> None:
    model = _load(args.model)
    search = _search_config(args)
    opt = _opt_config(args)
    result = _bounds_result(model, search, opt)
    if args.csv:
        sys.stdout.write(_bounds_csv(result))
        return
    _emit(
        "bounds",
        {
            "model": args.model,
            "max_cut_size": args.max_cut_size,
            "pairs": args.pairs,
            "seed": opt.seed,
            "starts": opt.starts,
            "tol": opt.gain_tol,
            "grid_oracle": opt.grid_oracle,
            "threads": _threads(),
        },
        result,
    )


def _cmd_simulate(args) -> None:
    if args.builtin is None and args.code is None:
        raise UsageError("simulate needs --builtin NAME or --code FILE")
    if args.builtin is not None:
        if args.builtin != "diamond":
            raise UsageError(f"unknown builtin scheme {args.builtin!r}")
        model = examples.diamond_model() if args.model is None else _load(args.model)
        scheme = codesim.diamond_scheme(args.k)
        code = codesim.huffman_transform(model, scheme)
        source = {"builtin": args.builtin, "k": args.k}
    else:
        if args.model is None:
            raise UsageError("simulate --code needs a model file")
        model = _load(args.model)
        with open(args.code, encoding="utf-8") as fh:
            doc = json.load(fh)
        if isinstance(doc, dict) and "builtin" in doc:
            if doc["builtin"] != "diamond":
                raise UsageError(f"unknown builtin scheme {doc['builtin']!r}")
            scheme = codesim.diamond_scheme(int(doc.get("k", args.k)))
            code = codesim.huffman_transform(model, scheme)
        else:
            code = codesim.code_from_dict(model, doc)
        source = {"code": args.code}
    report = codesim.evaluate(model, code)
    _emit(
        "simulate",
        {"model": args.model, **source},
        report.to_dict(),
    )


def _cmd_example(args) -> None:
    if args.name not in examples.BUILTIN_MODELS:
        raise UsageError(f"unknown example {args.name!r}")
    model = examples.BUILTIN_MODELS[args.name]()
    result: dict = {"model": netmodel.model_to_dict(model)}
    if args.bounds:
        search = bounds.SearchConfig(max_cut_size=args.max_cut_size)
        opt = _opt_config(args)
        result["bounds"] = _bounds_result(model, search, opt)
    _emit(
        "example",
        {
            "name": args.name,
            "bounds": args.bounds,
            "max_cut_size": args.max_cut_size,
            "seed": args.seed,
            "starts": args.starts,
            "tol": args.tol,
            "grid_oracle": bool(args.grid_oracle),
            "threads": _threads(),
        },
        result,
    )


def _add_opt_flags(sp) -> None:
    sp.add_argument("--seed", type=int, default=0, help="optimizer seed")
    sp.add_argument("--starts", type=int, default=32, help="random optimizer starts")
    sp.add_argument("--tol", type=float, default=1e-9, help="ascent convergence gain")
    grid = sp.add_mutually_exclusive_group()
    grid.add_argument(
        "--grid-oracle", dest="grid_oracle", action="store_true", default=None,
        help="cross-check low-dimensional pairs on a grid",
    )
    grid.add_argument(
        "--no-grid-oracle", dest="grid_oracle", action="store_false",
        help="disable the grid cross-check",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netfuncomp",
        description="Lower bounds and code simulation for zero-error network function computation.",
    )
    parser.add_argument("--version", action="version", version=f"netfuncomp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a network model file")
    sp.add_argument("model")
    sp.set_defaults(func=_cmd_validate)

    sp = sub.add_parser("cuts", help="enumerate cut sets and strong partitions")
    sp.add_argument("model")
    sp.add_argument("--max-cut-size", type=int, default=None)
    sp.set_defaults(func=_cmd_cuts)

    sp = sub.add_parser("classes", help="source-block equivalence classes")
    sp.add_argument("model")
    sp.add_argument("--i", required=True, help="comma-separated sources to separate")
    sp.add_argument("--j", default="", help="comma-separated side-information sources")
    sp.add_argument("--aj", default="", help="side-information block, flattened symbols")
    sp.add_argument("--k", type=int, default=1)
    sp.set_defaults(func=_cmd_classes)

    sp = sub.add_parser("chargraph", help="build a characteristic graph")
    sp.add_argument("model")
    sp.add_argument("--cut", required=True, help="comma-separated edge ids")
    sp.add_argument("--blocks", default=None, help="partition blocks, e.g. e5/e6")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--dot", default=None, help="directory for a DOT export")
    sp.set_defaults(func=_cmd_chargraph)

    sp = sub.add_parser("entropy", help="entropies of a probabilistic graph")
    sp.add_argument("graph", help="JSON with vertices, edges, dist")
    sp.set_defaults(func=_cmd_entropy)

    sp = sub.add_parser("bounds", help="computing-rate lower bounds")
    sp.add_argument("model")
    sp.add_argument("--max-cut-size", type=int, default=None)
    sp.add_argument("--pairs", default=None, help="JSON file restricting the pair search")
    sp.add_argument("--csv", action="store_true", help="flatten the per-pair table to CSV")
    _add_opt_flags(sp)
    sp.set_defaults(func=_cmd_bounds)

    sp = sub.add_parser("simulate", help="simulate a concrete code")
    sp.add_argument("model", nargs="?", default=None)
    sp.add_argument("--code", default=None, help="code tables as JSON")
    sp.add_argument("--builtin", default=None, help="built-in scheme name")
    sp.add_argument("--k", type=int, default=2, help="shots per block")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("example", help="built-in example models")
    sp.add_argument("name")
    sp.add_argument("--bounds", action="store_true", help="also compute all bounds")
    sp.add_argument("--max-cut-size", type=int, default=None)
    _add_opt_flags(sp)
    sp.set_defaults(func=_cmd_example)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except NetfuncompError as exc:
        print(f"netfuncomp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"netfuncomp: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"netfuncomp: invalid JSON: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
