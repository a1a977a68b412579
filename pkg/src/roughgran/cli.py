"""Command-line front end.

Every command writes one canonical JSON document (sorted keys, two-space
indent) to ``--out`` or standard output.  Failures print a single JSON
object to standard error and exit with a status from ``EXIT_CODES``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .agrssa import AgrssaConfig, agrssa_lmr, agrssa_m, build_reasoner, explain
from .approximation import approximate, accuracy, rough_pairs
from .chains import ChainBlockSystem, enumerate_chain
from .errors import CapacityError, RoughGranError
from .table import diff_tables, load_table, load_value_order
from .tolerance import BlockSystem, DistanceSpec, Tolerance, blocks
from .validation import SoftClustering, Thresholds, closeness, validate_clusters

EXIT_OK, EXIT_USAGE, EXIT_MARGINAL, EXIT_INVALID, EXIT_CAPACITY = 0, 2, 3, 4, 5
VERDICT_EXIT = {"valid": EXIT_OK, "marginal": EXIT_MARGINAL, "invalid": EXIT_INVALID}

log = logging.getLogger("roughgran")


def dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _table(args, path):
    order = None
    if getattr(args, "value_order", None):
        with open(args.value_order, encoding="utf-8") as fh:
            order = load_value_order(fh)
    with open(path, encoding="utf-8", newline="") as fh:
        return load_table(
            fh,
            delimiter=args.delimiter,
            decision=getattr(args, "decision", None),
            separator=args.separator,
            value_order=order,
        )


def _object_indices(table, spec: str | None) -> list[int] | None:
    if not spec:
        return None
    return [table.index(o.strip()) for o in spec.split(",") if o.strip()]


def _figures(args):
    if not args.figures:
        return None
    from . import plotting

    return plotting


def cmd_validate(args):
    table = _table(args, args.table)
    config = _read_json(args.config)
    clustering = SoftClustering.from_json(_read_json(args.clusters), table.objects)
    th = config.get("thresholds", {})
    report = validate_clusters(
        table,
        clustering,
        [DistanceSpec.from_json(d) for d in config["distances"]],
        config.get("mode", "and"),
        config.get("k"),
        Thresholds(float(th.get("valid", 0.8)), float(th.get("invalid", 0.5))),
        bool(config.get("include_exteriors", False)),
    )
    doc = {"report": report.to_json()}
    plotting = _figures(args)
    if plotting:
        doc["figures"] = plotting.validation_figures(report, table.objects, Path(args.figures))
    text = None
    if args.pretty:
        lines = [f"overall {report.overall:.4f}: {report.verdict}"]
        for i, c in enumerate(report.per_cluster):
            lines.append(f"  cluster {i}: closeness {c.core_closeness:.4f} accuracy {c.core_accuracy:.4f} -> {c.verdict}")
        text = "\n".join(lines)
    return doc, VERDICT_EXIT[report.verdict], text


def _agrssa_config(args):
    data = _read_json(args.config) if args.config else {}
    if getattr(args, "cap", None) is not None:
        data["cap"] = args.cap
    if getattr(args, "sigma", None):
        data["sigma"] = [int(s) for s in args.sigma.split(",")]
    return AgrssaConfig.from_json(data)


def cmd_agrssa_m(args):
    table = _table(args, args.table)
    config = _agrssa_config(args)
    model = agrssa_m(table, config)
    doc = {"config": config.to_json(), "model": model.to_json()}
    query = _object_indices(table, args.explain)
    lines = [f"decision quality {model.decision_quality:.4f}, {len(model.table_blocks)} blocks"]
    if query is not None:
        e = explain(model, query)
        doc["explanation"] = e.to_json(model.objects)
        lines.append(e.render(model.objects))
    plotting = _figures(args)
    if plotting:
        doc["figures"] = plotting.model_figures(model, Path(args.figures))
    return doc, EXIT_OK, "\n".join(lines) if args.pretty else None


def cmd_agrssa_lmr(args):
    table = _table(args, args.table)
    config = _agrssa_config(args)
    psi = build_reasoner(table, config)
    ranked = agrssa_lmr(table, psi, config.delta, config.selection, config.cap)
    doc = {"config": config.to_json(), "result": ranked.to_json()}
    query = _object_indices(table, args.explain)
    lines = []
    if ranked.notice:
        lines.append(ranked.notice)
    if query is not None:
        doc["explanations"] = []
        for m in ranked:
            e = explain(m, query)
            doc["explanations"].append(e.to_json(m.objects))
            lines.append(f"instance {m.provenance['labels']} quality {m.decision_quality:.4f}")
            lines.append(e.render(m.objects))
    else:
        lines.extend(f"instance {m.provenance['labels']} quality {m.decision_quality:.4f}" for m in ranked)
    plotting = _figures(args)
    if plotting and len(ranked):
        figs = plotting.ranking_figure(ranked, Path(args.figures))
        figs += plotting.model_figures(ranked[0], Path(args.figures), prefix="lmr_best")
        doc["figures"] = figs
    return doc, EXIT_OK, "\n".join(lines) if args.pretty else None


def cmd_enumerate(args):
    ubd = enumerate_chain(args.n, args.kind)
    doc = {"enumeration": ubd.to_json()}
    plotting = _figures(args)
    if plotting:
        doc["figures"] = plotting.enumeration_figure(ubd, Path(args.figures))
    text = None
    if args.pretty:
        text = "\n".join(
            f"{i}: " + " ".join(f"[{a},{b}]" for a, b in s.intervals) for i, s in enumerate(ubd)
        )
    return doc, EXIT_OK, text


def _block_system(data) -> BlockSystem:
    if "intervals" in data:
        return ChainBlockSystem.from_json(data).block_system()
    if "blocks" in data:
        return BlockSystem.from_json(data)
    if "pairs" in data:
        return blocks(Tolerance.from_json(data))
    raise RoughGranError("block file needs 'intervals', 'blocks' or 'pairs'")


def cmd_approx(args):
    bs = _block_system(_read_json(args.blocks))
    query = [int(i) for i in args.set.split(",") if i.strip()] if args.set else []
    approx = approximate(bs, query)
    doc = {
        "blocks": bs.to_json(),
        "approximation": approx.to_json(),
        "accuracy": accuracy(bs, query),
        "closeness": closeness(bs, query),
    }
    if args.rough_objects:
        samples = None if bs.universe_size <= args.limit else args.samples
        doc["rough_objects"] = rough_pairs(bs, args.limit, samples, args.seed).to_json()
    text = None
    if args.pretty:
        text = f"lower {sorted(approx.lower)}\nupper {sorted(approx.upper)}"
    return doc, EXIT_OK, text


def cmd_diff(args):
    old, new = _table(args, args.old), _table(args, args.new)
    change = diff_tables(old, new)
    text = None
    if args.pretty:
        text = ", ".join(change.kinds) if change.kinds else "no change"
    return {"changes": change.to_json()}, EXIT_OK, text


def _table_options(p):
    p.add_argument("--delimiter", default=",")
    p.add_argument("--separator", default="|", help="indeterminacy separator inside a cell")
    p.add_argument("--value-order", help="file of 'attr: v1 < v2 < ...' lines")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--figures", help="directory for PNG figures")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pretty", action="store_true", help="print a text rendering to stdout")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="roughgran", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate a clustering")
    p.add_argument("--table", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--decision")
    _table_options(p)
    p.set_defaults(func=cmd_validate)

    for name, func in (("agrssa-m", cmd_agrssa_m), ("agrssa-lmr", cmd_agrssa_lmr)):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--table", required=True)
        p.add_argument("--config")
        p.add_argument("--decision", required=True)
        p.add_argument("--explain", help="comma-separated object ids to explain")
        p.add_argument("--sigma", help="comma-separated candidate index per attribute")
        p.add_argument("--cap", type=int)
        _table_options(p)
        p.set_defaults(func=func)

    p = sub.add_parser("enumerate", parents=[common], help="chain block systems")
    p.add_argument("--kind", choices=("tolerance", "glued", "congruence"), default="tolerance")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("approx", parents=[common], help="approximate a set of indices")
    p.add_argument("--blocks", required=True, help="JSON block system, chain system or tolerance")
    p.add_argument("--set", default="", help="comma-separated element indices")
    p.add_argument("--rough-objects", action="store_true")
    p.add_argument("--limit", type=int, default=16)
    p.add_argument("--samples", type=int, default=4096)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("diff", parents=[common], help="classify changes between two tables")
    p.add_argument("--old", required=True)
    p.add_argument("--new", required=True)
    _table_options(p)
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        doc, status, text = args.func(args)
    except CapacityError as exc:
        sys.stderr.write(json.dumps({"error": "CapacityError", "message": str(exc)}, sort_keys=True) + "\n")
        return EXIT_CAPACITY
    except (RoughGranError, OSError, KeyError, ValueError) as exc:
        message = str(exc) if not isinstance(exc, KeyError) else f"missing key {exc.args[0]!r}"
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": message}, sort_keys=True) + "\n")
        return EXIT_USAGE
    doc = {"command": args.command, "seed": args.seed, "version": __version__, **doc}
    payload = dump(doc)
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    elif text is None:
        sys.stdout.write(payload)
    if text is not None:
        sys.stdout.write(text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
