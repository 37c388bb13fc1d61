"""Command-line driver.

    fairdiv solve    --mechanism {se,se-nocap,sec,vcg,wta} FILE
    fairdiv audit    --suite {paper,exchange,fairness,truthfulness} FILE
    fairdiv validate FILE
    fairdiv fixtures [--out DIR] [NAME ...]

Exit status: 0 on success (every audit holds or was skipped), 1 when an audit
finds a violation or validation fails, 2 on usage, parse or input errors.
Trace lines refer to agents and items by 0-based index.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import audit as au
from .allocations import DEFAULT_MAX_ENUM, max_enum
from .envy import build_envy_graph
from .errors import FairDivError, SchemaError
from .fixtures import named_instances
from .instance import Instance, dump_instance, format_number, parse_instance
from .mechanisms import MECHANISMS
from .valuations import ADDITIVE, BINARY_ADDITIVE, SUPERADDITIVE, from_mask, validate_class

logger = logging.getLogger("fairdiv")

SUITES = ("paper", "exchange", "fairness", "truthfulness")
SUPERADDITIVE_TAGS = (ADDITIVE, BINARY_ADDITIVE, SUPERADDITIVE)
# allocations enumerated by the envy-graph check inside the paper suite
ENVY_AUDIT_MAX = 20_000


def _items(inst: Instance, mask: int) -> list:
    return [inst.items[e] for e in sorted(from_mask(mask))]


def outcome_report(inst: Instance, out) -> dict:
    A = out.allocation
    G = build_envy_graph(inst.profile, A)
    return {
        "instance": inst.name,
        "mechanism": out.mechanism,
        "allocation": {a: _items(inst, A.masks[i]) for i, a in enumerate(inst.agents)},
        "unallocated": _items(inst, A.unallocated_mask),
        "subsidies": {a: format_number(out.subsidies[i]) for i, a in enumerate(inst.agents)},
        "utilities": {a: format_number(out.utilities[i]) for i, a in enumerate(inst.agents)},
        "total_subsidy": format_number(out.total_subsidy),
        "envy_matrix": [[format_number(x) for x in row] for row in G.weights],
        "trace": list(out.trace),
    }


def _render_outcome(rep: dict) -> str:
    lines = [f"instance: {rep['instance']}", f"mechanism: {rep['mechanism']}", "allocation:"]
    for a, items in rep["allocation"].items():
        lines.append(f"  {a}: {{{', '.join(items)}}}  subsidy {rep['subsidies'][a]}  utility {rep['utilities'][a]}")
    lines.append(f"unallocated: {{{', '.join(rep['unallocated'])}}}")
    lines.append(f"total subsidy: {rep['total_subsidy']}")
    lines.append("envy matrix:")
    lines.extend("  " + " ".join(str(x) for x in row) for row in rep["envy_matrix"])
    lines.append("trace:")
    lines.extend("  " + t for t in rep["trace"])
    return "\n".join(lines) + "\n"


def run_suite(inst: Instance, suite: str, *, jobs: int = 1, seed: int = 0) -> list:
    """Audit reports for one instance, in a fixed order."""
    P = inst.profile
    name = inst.name or au.describe(P)
    tags = {v.class_tag for v in P}
    reps = []
    matroidal = P.is_matroidal
    superadd = tags <= set(SUPERADDITIVE_TAGS)
    if suite in ("paper", "fairness"):
        if matroidal:
            reps += au.se_reports(P, name) + au.sec_reports(P, name)
            for mech in ("se", "sec"):
                A = MECHANISMS[mech](P).allocation
                reps.append(au.fairness_hierarchy(P, A, name))
        if superadd:
            reps += au.vcg_reports(P, name)
        reps += au.wta_reports(P, name)
    if suite in ("paper", "exchange") and matroidal:
        reps += au.structure_reports(P, name)
    if suite in ("paper", "truthfulness"):
        if matroidal:
            if P.m <= 4:
                reps.append(au.deviation_audit(MECHANISMS["se"], P, "matroids", jobs=jobs, instance=name, name="SE truthfulness (matroids)"))
            reps.append(au.deviation_audit(MECHANISMS["se"], P, "restrictions", jobs=jobs, instance=name, name="SE truthfulness (restrictions)"))
            reps += au.se_restriction_reports(P, name)
        if superadd:
            if tags <= {ADDITIVE, BINARY_ADDITIVE}:
                fam, cov = au.additive_grid_family(P.m, seed=seed)
            else:
                fam, cov = "restrictions", au.EXHAUSTIVE
            reps.append(au.deviation_audit(MECHANISMS["vcg"], P, fam, jobs=jobs, instance=name, coverage=cov, name="VCG truthfulness"))
        reps.append(au.deviation_audit(MECHANISMS["wta"], P, "restrictions", jobs=jobs, instance=name, name="WTA truthfulness (restrictions)"))
    if suite == "paper":
        reps.append(au.audit_envy_theorem(P, instance=name, bound=min(ENVY_AUDIT_MAX, max_enum())))
    return reps


def _render_audit(doc: dict) -> str:
    lines = [f"instance: {doc['instance']}", f"suite: {doc['suite']}"]
    if "seed" in doc:
        lines.append(f"seed: {doc['seed']}")
    for r in doc["audit"]:
        s = f"  [{r['verdict']}] {r['property']} ({r['coverage']}, {r['checked']} checked)"
        if "witness" in r:
            s += f"\n      witness: {json.dumps(r['witness'], sort_keys=True)}"
        lines.append(s)
    c = doc["summary"]
    lines.append(f"summary: {c['holds']} holds, {c['violated']} violated, {c['skipped']} skipped")
    return "\n".join(lines) + "\n"


def _load(path: str, validate: bool = True) -> Instance:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_instance(text, validate=validate, name=Path(path).stem if path != "-" else "stdin")


def _emit(fmt: str, doc: dict, render) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(render(doc))


def cmd_solve(args) -> int:
    inst = _load(args.file)
    out = MECHANISMS[args.mechanism](inst.profile)
    _emit(args.format, outcome_report(inst, out), _render_outcome)
    return 0


def cmd_audit(args) -> int:
    inst = _load(args.file)
    reps = run_suite(inst, args.suite, jobs=args.jobs, seed=args.seed)
    doc = {"instance": inst.name, "suite": args.suite}
    if args.seed_given:
        doc["seed"] = args.seed
    doc["audit"] = [r.to_dict() for r in reps]
    doc["summary"] = {
        "holds": sum(r.verdict == au.HOLDS for r in reps),
        "violated": sum(r.verdict == au.VIOLATED for r in reps),
        "skipped": sum(r.verdict == au.SKIPPED for r in reps),
    }
    _emit(args.format, doc, _render_audit)
    return 1 if doc["summary"]["violated"] else 0


def cmd_validate(args) -> int:
    inst = _load(args.file, validate=False)
    rows = []
    for a, v in zip(inst.agents, inst.profile):
        rep = validate_class(v, seed=args.seed)
        rows.append({
            "agent": a,
            "class": v.class_tag,
            "status": rep.status,
            "coverage": rep.coverage,
            "violations": [[rule, x if not isinstance(x, list) else [inst.items[e] for e in x],
                            y if not isinstance(y, list) else [inst.items[e] for e in y]] for rule, x, y in rep.violations[:5]],
        })
    doc = {"instance": inst.name, "agents": rows}

    def render(d):
        out = [f"instance: {d['instance']}"]
        for r in d["agents"]:
            out.append(f"  {r['agent']}: {r['class']} {r['status']} ({r['coverage']})")
            for rule, x, y in r["violations"]:
                out.append(f"      {rule}: {x} / {y}")
        return "\n".join(out) + "\n"

    _emit(args.format, doc, render)
    return 1 if any(r["status"] == "invalid" for r in rows) else 0


def cmd_fixtures(args) -> int:
    table = named_instances()
    names = args.names or sorted(table)
    unknown = [s for s in names if s not in table]
    if unknown:
        raise SchemaError(f"unknown fixture(s) {unknown}; known: {sorted(table)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for s in names:
            (out / f"{s}.json").write_text(dump_instance(table[s]))
            print(out / f"{s}.json")
    elif len(names) == 1:
        sys.stdout.write(dump_instance(table[names[0]]))
    else:
        for s in names:
            print(s)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairdiv", description="Fair allocation of indivisible goods with subsidies.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--max-enum", type=int, default=None, metavar="N", help=f"brute-force bound (default {DEFAULT_MAX_ENUM})")
        if seed:
            p.add_argument("--seed", type=int, default=None, metavar="S")

    p = sub.add_parser("solve", help="run a mechanism on an instance file")
    p.add_argument("--mechanism", choices=sorted(MECHANISMS), default="se")
    common(p)
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("audit", help="run an audit suite on an instance file")
    p.add_argument("--suite", choices=SUITES, default="paper")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1, metavar="J")
    common(p, seed=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("validate", help="check each valuation against its class tag")
    common(p, seed=True)
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fixtures", help="list or write the named instances")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("names", nargs="*")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    if getattr(args, "max_enum", None) is not None:
        os.environ["FAIRDIV_MAX_ENUM"] = str(args.max_enum)
    if hasattr(args, "seed"):
        args.seed_given = args.seed is not None
        if args.seed is None:
            args.seed = 0
    try:
        return args.func(args)
    except (FairDivError, OSError, NotImplementedError) as exc:
        print(f"fairdiv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
