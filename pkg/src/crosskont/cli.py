"""Command line front end.

Subcommands::

    crosskont eval INSTANCE.json [--trace] [--check] [--jobs N] [--max-nodes N]
    crosskont kontsevich DMAX
    crosskont multcr PROFILE.json
    crosskont mult MAP.json

Instance files use schema ``instance/1``::

    {"schema": "instance/1", "degree": 2, "points": [1, 2, 3],
     "lines": [{"label": 4, "weight": 1}], "free": [],
     "crossratios": [[1, 2, 3, 4]]}

Vertex profile files use schema ``profile/1``::

    {"schema": "profile/1", "slots": [1, 2, 3, 4, 5],
     "crossratios": [[1, 2, 3, 4], [1, 2, 3, 5]]}

Map files use schema ``stablemap/1`` (see :mod:`crosskont.stablemap`).
All output is exact decimal; the count is always the last stdout line.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Mapping, Sequence

from .conditions import Instance, LINE, POINT
from .engine import (
    DEFAULT_MAX_NODES,
    Engine,
    ResourceLimitError,
    TraceNode,
    ValidationError,
    evaluate_invariance_battery,
    kontsevich,
)
from .resolution import StructureError, VertexProfile, cross_ratio_multiplicity
from .splits import Split
from .stablemap import multiplicity, stablemap_from_dict


def instance_from_dict(data: Mapping) -> Instance:
    """Parse an ``instance/1`` document."""
    if data.get("schema") != "instance/1":
        raise ValueError(f"expected schema instance/1, got {data.get('schema')!r}")
    try:
        lines = [(item["label"], item.get("weight", 1)) for item in data.get("lines", [])]
        return Instance.build(
            data["degree"],
            points=data.get("points", []),
            lines=lines,
            free=data.get("free", []),
            crossratios=data.get("crossratios", []),
        )
    except KeyError as missing:
        raise ValueError(f"missing field {missing} in instance file") from None


def profile_from_dict(data: Mapping) -> VertexProfile:
    """Parse a ``profile/1`` document."""
    if data.get("schema") != "profile/1":
        raise ValueError(f"expected schema profile/1, got {data.get('schema')!r}")
    try:
        return VertexProfile.of(data["slots"], data.get("crossratios", []))
    except KeyError as missing:
        raise ValueError(f"missing field {missing} in profile file") from None


def _load(path: str) -> Mapping:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: line {err.lineno}: {err.msg}") from None


def _describe_labels(inst: Instance, labels) -> str:
    marks = {POINT: "p", LINE: "L"}
    return " ".join(
        f"{marks.get(inst.condition(x).kind, 'f')}{x}" for x in sorted(labels)
    )


def _describe_instance(inst: Instance) -> str:
    parts = [f"d={inst.degree}"]
    if inst.labels:
        parts.append(_describe_labels(inst, inst.labels))
    for cr in inst.crossratios:
        parts.append("cr{%s}" % ",".join(str(x) for x in cr))
    return " ".join(parts)


def _describe_split(inst: Instance, split: Split) -> str:
    def side(data) -> str:
        bits = [f"d={data.degree}:"]
        if data.labels:
            bits.append(_describe_labels(inst, data.labels))
        for j in sorted(data.crossratios):
            bits.append("cr{%s}" % ",".join(str(x) for x in inst.crossratios[j]))
        return " ".join(bits)

    return f"split [{split.kind}] ({side(split.side1)} | {side(split.side2)})"


def render_trace(node: TraceNode) -> list[str]:
    """Indented recursion tree, one evaluated instance per block."""
    lines = [_describe_instance(node.instance)]
    if node.rule == "split" and node.pairing is not None:
        a, b = node.pairing.first
        c, d = node.pairing.second
        lines.append(f"  resolve cr ({a} {b} | {c} {d})")
        for term in node.terms:
            lines.append("  " + _describe_split(node.instance, term.split))
            for child, name in ((term.left, "side 1"), (term.right, "side 2")):
                sub = render_trace(child)
                lines.append(f"    {name}: {sub[0]}")
                lines.extend("    " + line for line in sub[1:])
            lines.append(f"  term {term.left.value} * {term.right.value} = {term.term}")
        lines.append(f"  = {node.value}")
    else:
        lines.append(f"  = {node.value} ({node.rule})")
    return lines


def cmd_eval(args: argparse.Namespace) -> int:
    inst = instance_from_dict(_load(args.path))
    engine = Engine(max_nodes=args.max_nodes, jobs=args.jobs)
    if args.trace:
        value, node = engine.evaluate_traced(inst)
        for line in render_trace(node):
            print(line)
    else:
        value = engine.evaluate(inst)
    if args.check:
        report = evaluate_invariance_battery(inst, max_nodes=args.max_nodes)
        if not report.ok:
            for variant in report.mismatches:
                print(
                    f"mismatch: cr {variant.last} pairing "
                    f"({variant.pairing.first[0]} {variant.pairing.first[1]} | "
                    f"{variant.pairing.second[0]} {variant.pairing.second[1]}) "
                    f"gave {variant.value}, expected {report.value}",
                    file=sys.stderr,
                )
            return 1
        print(f"invariance ok over {len(report.variants)} variants")
    print(value)
    return 0


def cmd_kontsevich(args: argparse.Namespace) -> int:
    for d in range(1, args.dmax + 1):
        print(d, kontsevich(d))
    return 0


def cmd_multcr(args: argparse.Namespace) -> int:
    profile = profile_from_dict(_load(args.path))
    print(cross_ratio_multiplicity(profile))
    return 0


def cmd_mult(args: argparse.Namespace) -> int:
    map, crossratios = stablemap_from_dict(_load(args.path))
    print(multiplicity(map, crossratios))
    return 0


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crosskont",
        description="Exact counts of rational plane tropical curves under "
        "point, multi line and cross-ratio conditions.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    eval_parser = commands.add_parser("eval", help="evaluate an instance file")
    eval_parser.add_argument("path", help="instance/1 JSON file")
    eval_parser.add_argument("--trace", action="store_true", help="print the recursion tree")
    eval_parser.add_argument(
        "--check", action="store_true", help="verify invariance under all root resolutions"
    )
    eval_parser.add_argument(
        "--jobs", type=_positive, default=1, metavar="N", help="top-level worker threads"
    )
    eval_parser.add_argument(
        "--max-nodes",
        type=_positive,
        default=DEFAULT_MAX_NODES,
        metavar="N",
        help="recursion node budget",
    )
    eval_parser.set_defaults(run=cmd_eval)

    table_parser = commands.add_parser("kontsevich", help="print the degree count table")
    table_parser.add_argument("dmax", type=_positive, help="largest degree to print")
    table_parser.set_defaults(run=cmd_kontsevich)

    multcr_parser = commands.add_parser(
        "multcr", help="cross-ratio multiplicity of a vertex profile"
    )
    multcr_parser.add_argument("path", help="profile/1 JSON file")
    multcr_parser.set_defaults(run=cmd_multcr)

    mult_parser = commands.add_parser("mult", help="multiplicity of a stable map fixture")
    mult_parser.add_argument("path", help="stablemap/1 JSON file")
    mult_parser.set_defaults(run=cmd_mult)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (ValidationError, StructureError, ResourceLimitError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
