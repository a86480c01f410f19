"""Command line entry point: ``packlab <command> ...``.

Every command prints one JSON document to stdout.  ``verify`` exits 0 iff
the lemma check reports VERIFIED; ``report`` also renders figures.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from typing import List, Optional, Sequence

from . import constructions as cons
from . import derangement_lab as dl
from . import fractional_lp as flp
from . import lemma_verifier as lv
from .cover_model import BudgetExceeded, cover_from_json
from .graph_core import load_graph
from .packing_search import (INCONCLUSIVE, PackingSearch, corr_packing_upper, count_transversals,
                             env_budget, list_packing_upper)


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _budget(text: Optional[str]) -> Optional[int]:
    return None if text is None else int(float(text))


def _read_cover(path: str):
    with open(path) as fh:
        return cover_from_json(fh.read())


def read_perms(text: str) -> List[tuple]:
    """One permutation per line: digits ('51234786') or whitespace separated
    integers; 1-based input (no 0 present) is shifted to 0-based."""
    rows = []
    for line in text.splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        if "," in line:
            parts = line.split(",")
        elif len(line.split()) > 1:
            parts = line.split()
        else:
            parts = list(line)
        rows.append([int(x) for x in parts])
    if rows and min(min(r) for r in rows) == 1:
        rows = [[x - 1 for x in r] for r in rows]
    k = len(rows[0]) if rows else 0
    for r in rows:
        if sorted(r) != list(range(k)):
            raise ValueError(f"not a permutation of {k} symbols: {r}")
    return [tuple(r) for r in rows]


def read_matrix(text: str) -> List[List[int]]:
    """n on the first line, then n rows of 0/1 (spaces optional)."""
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n = int(lines[0])
    rows = []
    for ln in lines[1:1 + n]:
        vals = ln.split() if " " in ln else list(ln)
        rows.append([int(x) for x in vals])
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of length {n}")
    return rows


# ---------------------------------------------------------------------------
# commands


def cmd_pack(args) -> int:
    c = _read_cover(args.cover)
    t0 = time.time()
    s = PackingSearch(c, budget=env_budget(_budget(args.budget)))
    try:
        p = s.solve()
    except BudgetExceeded:
        _emit({"verdict": INCONCLUSIVE, "nodes_expanded": s.nodes, "elapsed": round(time.time() - t0, 3)})
        return 2
    doc = {"verdict": "PACKING" if p else "NO_PACKING", "nodes_expanded": s.nodes,
           "elapsed": round(time.time() - t0, 3)}
    if p is not None:
        doc["witness"] = {"columns": [list(col) for col in p.columns], "valid": p.is_valid(c)}
    _emit(doc)
    return 0


def cmd_count(args) -> int:
    c = _read_cover(args.cover)
    t0 = time.time()
    n = count_transversals(c)
    _emit({"verdict": "COUNTED", "transversals": n, "elapsed": round(time.time() - t0, 3)})
    return 0


def cmd_upper(args) -> int:
    g = load_graph(args.graph)
    budget = _budget(args.budget)
    if args.mode == "corr":
        v = corr_packing_upper(g, args.k, budget=budget, state_path=args.resume, jobs=args.jobs)
    else:
        v = list_packing_upper(g, args.k, budget=budget)
    _emit(v.to_json())
    return 0


def cmd_derange(args) -> int:
    with open(args.perms) as fh:
        perms = read_perms(fh.read())
    t0 = time.time()
    a = dl.common_derangements(perms)
    doc = {"k": len(perms[0]), "perms": len(perms), "common_derangements": a,
           "elapsed": round(time.time() - t0, 3)}
    if len(perms[0]) <= 9:
        doc["direct_count"] = dl.common_derangements_direct(perms)
    if len(perms) == 4 and len(perms[0]) == 8:
        rep = dl.bad_permutations(perms)
        doc["bad_permutations"] = len(rep.bad)
        doc["bad_by_hall_type"] = dict(Counter(rep.tags.values()))
    _emit(doc)
    return 0


def cmd_permanent(args) -> int:
    with open(args.matrix) as fh:
        m = read_matrix(fh.read())
    t0 = time.time()
    _emit({"n": len(m), "permanent": dl.permanent(m), "ryser": dl.permanent_ryser(m),
           "elapsed": round(time.time() - t0, 3)})
    return 0


def cmd_family(args) -> int:
    rep = dl.min_permanent_family(args.mindeg, budget=env_budget(_budget(args.budget)),
                                  exhaustive=args.exhaustive, seed=args.seed)
    _emit({"d": rep.d, "minimum": rep.minimum, "attaining_classes": len(rep.attaining),
           "family_size": rep.family_size, "exhaustive": rep.exhaustive, "checked": rep.checked,
           "zero_classes": rep.zero_classes, "zero_classes_sides_fixed": rep.zero_classes_no_transpose,
           "augmented_minimum": rep.augmented_minimum, "nonzero_minimum": rep.nonzero_minimum,
           "regular_attaining_classes": rep.regular_attaining_classes, "notes": rep.notes,
           "elapsed": round(rep.elapsed, 3)})
    return 0


def cmd_frac(args) -> int:
    c = _read_cover(args.cover)
    t0 = time.time()
    res = flp.has_fractional_packing(c, certify=args.certify)
    doc = {"feasible": isinstance(res, flp.TransversalDistribution), "certificate": res.to_json(),
           "elapsed": round(time.time() - t0, 3)}
    if isinstance(res, flp.FractionalClique):
        doc["certificate_valid"] = flp.verify_fractional_clique(c, res)[0]
    elif isinstance(res, flp.FarkasCertificate):
        doc["certificate_valid"] = flp.check_certificate(c, res)
    else:
        doc["certificate_valid"] = res.is_valid(c)
    _emit(doc)
    return 0


def cmd_construct(args) -> int:
    if args.name not in cons.CONSTRUCTIONS:
        raise SystemExit(f"unknown construction {args.name!r}; known: {', '.join(cons.CONSTRUCTIONS)}")
    fn = cons.CONSTRUCTIONS[args.name]
    inst = fn(args.g) if args.name == "girth" else fn()
    results = inst.verify(skip=() if args.all_claims else ("unique_bad_class",)) if args.check else None
    paths = inst.write(args.out, results)
    doc = {"name": inst.name, "files": paths, "n": inst.graph.n, "m": inst.graph.m}
    if results is not None:
        doc["claims_ok"] = all(ok for _, _, ok in results.values())
    _emit(doc)
    return 0 if results is None or doc["claims_ok"] else 1


def cmd_verify(args) -> int:
    budget = _budget(args.budget)
    if args.lemma_id == "all":
        reps = lv.run_all(args.tier, jobs=args.jobs, budget=budget, state_dir=args.resume)
        _emit([r.to_json() for r in reps])
        return 0 if all(r.ok for r in reps) else 1
    rep = lv.verify(args.lemma_id, args.tier, budget=budget, state_path=args.resume, jobs=args.jobs)
    _emit(rep.to_json())
    return 0 if rep.ok else 1


def cmd_list(args) -> int:
    _emit({lid: {"summary": e.summary, "fast_tier": e.fast is not None} for lid, e in lv.REGISTRY.items()})
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    reps = lv.run_all(args.tier, jobs=args.jobs, only=args.only or None)
    paths = write_report(reps, args.out)
    _emit({"reports": len(reps), "all_verified": all(r.ok for r in reps), "files": paths})
    return 0 if all(r.ok for r in reps) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="packlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pack", help="search for a packing of a cover")
    s.add_argument("--cover", required=True)
    s.add_argument("--budget")
    s.set_defaults(fn=cmd_pack)

    s = sub.add_parser("count", help="count independent transversals")
    s.add_argument("--cover", required=True)
    s.set_defaults(fn=cmd_count)

    s = sub.add_parser("upper", help="does every k-fold cover of a graph pack?")
    s.add_argument("--graph", required=True, help="graph file or catalog name (K5-, A+, G+(7,3,3), ...)")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=("corr", "list"), default="corr")
    s.add_argument("--budget")
    s.add_argument("--resume", help="state file for checkpoint/resume (corr mode)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(fn=cmd_upper)

    s = sub.add_parser("derange", help="common derangements of permutations in a file")
    s.add_argument("--perms", required=True)
    s.set_defaults(fn=cmd_derange)

    s = sub.add_parser("permanent", help="permanent of a 0/1 matrix file")
    s.add_argument("--matrix", required=True)
    s.set_defaults(fn=cmd_permanent)

    s = sub.add_parser("family", help="min permanent over edge-minimal min-degree-d graphs on 8+8")
    s.add_argument("--mindeg", type=int, required=True, choices=(3, 4, 5, 6))
    s.add_argument("--budget")
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_family)

    s = sub.add_parser("frac", help="fractional packing or infeasibility certificate")
    s.add_argument("--cover", required=True)
    s.add_argument("--certify", action="store_true", help="prefer a fractional clique certificate")
    s.set_defaults(fn=cmd_frac)

    s = sub.add_parser("construct", help="write a named construction to a directory")
    s.add_argument("name", help=", ".join(cons.CONSTRUCTIONS))
    s.add_argument("--g", type=int, default=5, help="girth for the girth construction")
    s.add_argument("--out", required=True)
    s.add_argument("--check", action="store_true", help="evaluate the claims into the manifest")
    s.add_argument("--all-claims", action="store_true", help="include whole-space scans when checking")
    s.set_defaults(fn=cmd_construct)

    s = sub.add_parser("verify", help="re-run a lemma check by ID (or 'all')")
    s.add_argument("lemma_id")
    s.add_argument("--tier", choices=lv.TIERS, default="fast")
    s.add_argument("--resume", help="state file (a directory for 'all')")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--budget")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("lemmas", help="list lemma IDs")
    s.set_defaults(fn=cmd_list)

    s = sub.add_parser("report", help="run checks and write TSV/JSON tables plus figures")
    s.add_argument("--out", required=True)
    s.add_argument("--tier", choices=lv.TIERS, default="fast")
    s.add_argument("--only", nargs="*", help="lemma IDs to include")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(fn=cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except lv.UsageError as exc:
        print(f"packlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
