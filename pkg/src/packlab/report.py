"""Render verification results as TSV/JSON tables and matplotlib figures."""
from __future__ import annotations

import csv
import json
import os
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import derangement_lab as dl  # noqa: E402
from .lemma_verifier import VerificationReport  # noqa: E402


def write_tables(reports: Sequence[VerificationReport], outdir: str) -> List[str]:
    os.makedirs(outdir, exist_ok=True)
    tsv = os.path.join(outdir, "summary.tsv")
    with open(tsv, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t")
        w.writerow(["lemma_id", "status", "cases_checked", "elapsed_s"])
        for r in reports:
            w.writerow([r.lemma_id, r.status, r.cases_checked, f"{r.elapsed:.3f}"])
    js = os.path.join(outdir, "reports.json")
    with open(js, "w") as fh:
        json.dump([r.to_json() for r in reports], fh, indent=2)
    return [tsv, js]


def plot_cases(reports: Sequence[VerificationReport], path: str) -> str:
    fig, ax = plt.subplots(figsize=(8, 0.35 * len(reports) + 1.5))
    ids = [r.lemma_id for r in reports]
    vals = [max(1, r.cases_checked) for r in reports]
    colours = ["tab:green" if r.ok else ("tab:orange" if r.status == "TIMEOUT" else "tab:red") for r in reports]
    ax.barh(ids, vals, color=colours)
    ax.set_xscale("log")
    ax.set_xlabel("cases checked")
    ax.invert_yaxis()
    for y, r in enumerate(reports):
        ax.text(vals[y], y, f"  {r.elapsed:.1f}s", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_histogram(hist: Dict[int, int], path: str, title: str, xlabel: str) -> str:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    xs = sorted(hist)
    ax.bar(xs, [hist[x] for x in xs], width=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_permanent_samples(path: str, samples: int = 4000, seed: int = 0) -> str:
    """Common-derangement counts of random r-tuples over [8] against the
    proven lower bounds."""
    bounds = {2: 4738, 3: 1249, 4: 248, 5: 33}
    fig, axes = plt.subplots(1, 4, figsize=(13, 3.2))
    for ax, r in zip(axes, (2, 3, 4, 5)):
        vals = dl.sample_tuples(r, samples, seed)
        ax.hist(vals, bins=40, color="tab:blue")
        ax.axvline(bounds[r], color="tab:red", linestyle="--", label=f"bound {bounds[r]}")
        ax.set_title(f"{r} permutations")
        ax.legend(fontsize=7)
    axes[0].set_ylabel("samples")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(reports: Sequence[VerificationReport], outdir: str) -> List[str]:
    paths = write_tables(reports, outdir)
    paths.append(plot_cases(reports, os.path.join(outdir, "cases.png")))
    by_id = {r.lemma_id: r for r in reports}
    r5 = by_id.get("derangements-5")
    if r5 is not None and "histogram" in r5.details:
        hist = {int(k): int(v) for k, v in r5.details["histogram"].items()}
        paths.append(plot_histogram(hist, os.path.join(outdir, "triples5.png"),
                                    "triples (id, b, c) over [5]", "common derangements"))
    g = by_id.get("g733")
    if g is not None and "safe_counts" in g.details:
        sc = g.details["safe_counts"]
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.bar(list(sc), list(sc.values()), color="tab:purple")
        ax.set_xlabel("class of the v1v7 matching")
        ax.set_ylabel("safe packings at v7")
        fig.tight_layout()
        p = os.path.join(outdir, "g733_safe.png")
        fig.savefig(p, dpi=120)
        plt.close(fig)
        paths.append(p)
    if "derangements-8" in by_id:
        paths.append(plot_permanent_samples(os.path.join(outdir, "tuples8.png")))
    return paths
