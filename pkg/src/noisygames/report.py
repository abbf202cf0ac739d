"""Verification report rendering: JSON, CSV and summary figures.

The JSON document is the machine-readable source of truth; the CSV is a
flat view of the same rows for spreadsheets, and the two PNG charts give
a one-glance outcome summary. Everything lands inside one directory
chosen by the caller, nothing is written anywhere else.
"""

from __future__ import annotations

import csv
import json
import os

from .gamefiles import frac_str, write_game, write_pomdp, write_strategy1, write_strategy2
from .lemmas import LemmaReport
from .simulate import LemmaInstance

__all__ = ["build_report_doc", "write_report_dir"]


def _check_entry(report: LemmaReport) -> dict:
    entry = {
        "kind": report.kind,
        "verified": report.verified,
        "pairs_checked": report.pairs_checked,
        "counterexample": None,
    }
    if report.counterexample is not None:
        ce = report.counterexample
        entry["counterexample"] = {
            "at": list(ce.prefix_pair),
            "lhs": frac_str(ce.lhs),
            "rhs": frac_str(ce.rhs),
        }
    return entry


def build_report_doc(
    seed: int,
    depth: int,
    results: list[tuple[LemmaInstance, list[LemmaReport]]],
) -> dict:
    by_kind: dict[str, dict[str, int]] = {}
    instances = []
    for inst, reports in results:
        checks = []
        for rep in reports:
            checks.append(_check_entry(rep))
            tally = by_kind.setdefault(rep.kind, {"verified": 0, "failed": 0, "pairs": 0})
            tally["verified" if rep.verified else "failed"] += 1
            tally["pairs"] += rep.pairs_checked
        instances.append(
            {"seed": inst.seed, "description": inst.description, "checks": checks}
        )
    total = sum(t["verified"] + t["failed"] for t in by_kind.values())
    verified = sum(t["verified"] for t in by_kind.values())
    return {
        "seed": seed,
        "depth": depth,
        "instances": instances,
        "summary": {
            "checks": total,
            "verified": verified,
            "failed": total - verified,
            "by_kind": by_kind,
        },
    }


def _write_csv(path: str, doc: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["instance_seed", "kind", "verified", "pairs_checked", "counterexample", "lhs", "rhs"]
        )
        for inst in doc["instances"]:
            for check in inst["checks"]:
                ce = check["counterexample"]
                w.writerow(
                    [
                        inst["seed"],
                        check["kind"],
                        check["verified"],
                        check["pairs_checked"],
                        " | ".join(ce["at"]) if ce else "",
                        ce["lhs"] if ce else "",
                        ce["rhs"] if ce else "",
                    ]
                )


def _write_charts(report_dir: str, doc: dict) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_kind = doc["summary"]["by_kind"]
    kinds = list(by_kind)
    done = []

    fig, ax = plt.subplots(figsize=(9, 4))
    xs = range(len(kinds))
    ax.bar(xs, [by_kind[k]["verified"] for k in kinds], color="#2a7", label="verified")
    ax.bar(
        xs,
        [by_kind[k]["failed"] for k in kinds],
        bottom=[by_kind[k]["verified"] for k in kinds],
        color="#c44",
        label="counterexample",
    )
    ax.set_xticks(list(xs))
    ax.set_xticklabels(kinds, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("instances")
    ax.set_title("check outcomes per kind")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(report_dir, "outcomes.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    done.append(path)

    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bar(xs, [by_kind[k]["pairs"] for k in kinds], color="#47a")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(kinds, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("prefix pairs compared")
    ax.set_title("exact comparisons per kind")
    fig.tight_layout()
    path = os.path.join(report_dir, "pairs.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    done.append(path)
    return done


def write_report_dir(
    report_dir: str,
    doc: dict,
    results: list[tuple[LemmaInstance, list[LemmaReport]]],
) -> list[str]:
    """Write report.json, the CSV, both charts and one directory per instance.

    Instance directories hold the game and decision-process files plus
    every strategy row the checks actually touched, so a counterexample
    can be replayed from files alone.
    """
    os.makedirs(report_dir, exist_ok=True)
    written = []

    path = os.path.join(report_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    written.append(path)

    path = os.path.join(report_dir, "lemma_results.csv")
    _write_csv(path, doc)
    written.append(path)
    written.extend(_write_charts(report_dir, doc))

    for inst, _ in results:
        inst_dir = os.path.join(report_dir, "instances", str(inst.seed))
        os.makedirs(inst_dir, exist_ok=True)
        write_game(os.path.join(inst_dir, "game.json"), inst.game)
        write_pomdp(os.path.join(inst_dir, "pomdp.json"), inst.pomdp)
        write_strategy1(os.path.join(inst_dir, "alpha.json"), inst.alpha)
        write_strategy2(os.path.join(inst_dir, "beta.json"), inst.beta)
        write_strategy1(os.path.join(inst_dir, "alpha_pg.json"), inst.alpha_pg)
        rows = [
            {
                "observation_key": [str(part) for part in key],
                "dist": [
                    {"action": a, "prob": frac_str(p)} for a, p in sorted(dist.items())
                ],
            }
            for key, dist in sorted(
                inst.alpha_m.known_rows().items(), key=lambda kv: str(kv[0])
            )
        ]
        with open(os.path.join(inst_dir, "alpha_m.json"), "w", encoding="utf-8") as fh:
            json.dump({"player": 1, "depth": inst.alpha_m.depth, "rows": rows}, fh, indent=2)
            fh.write("\n")
        with open(os.path.join(inst_dir, "instance.json"), "w", encoding="utf-8") as fh:
            json.dump(
                {"seed": inst.seed, "description": inst.description, "mode": inst.mode},
                fh,
                indent=2,
            )
            fh.write("\n")
        written.append(inst_dir)
    return written
