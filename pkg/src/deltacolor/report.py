"""Round-count sweeps over random regular graphs: CSV rows and a log-log figure."""

from __future__ import annotations

import csv
import io
from typing import Dict, Iterable, List, Optional, Sequence

from .clusters import SCALED_DEFAULT, Params
from .generators import random_regular
from .pipeline import delta_color

PHASES = ("dcc_select", "dcc_mis", "dcc_grow", "flex_mis", "flex_ball", "link_mis", "link_grow",
          "hso", "derive", "layers", "layer0")


def sweep(sizes: Sequence[int], delta: int = 3, seeds: Iterable[int] = (0,),
          p: Params = SCALED_DEFAULT) -> List[Dict[str, object]]:
    """One row per (n, seed) with the phase-split round counts of a full run."""
    rows = []
    for n in sizes:
        for seed in seeds:
            g = random_regular(n, delta, seed)
            _, rep = delta_color(g, p, seed)
            row: Dict[str, object] = {"n": n, "delta": delta, "seed": seed}
            for ph in PHASES:
                row[ph] = rep["rounds_by_phase"].get(ph, 0)
            row["rounds_total"] = rep["rounds_total"]
            for kind, count in rep["clusters"].items():
                row[f"{kind}_clusters"] = count
            row["I"] = rep["flex_sets"]["|I|"]
            row["d_measured"] = rep["flex_sets"]["d_measured"]
            rows.append(row)
    return rows


def rows_to_csv(rows: List[Dict[str, object]]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def plot_sweep(rows: List[Dict[str, object]], path: str, title: Optional[str] = None) -> None:
    """Stacked per-phase rounds against n, averaged over seeds."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sizes = sorted({int(r["n"]) for r in rows})
    mean = {}
    for ph in PHASES + ("rounds_total",):
        mean[ph] = []
        for n in sizes:
            vals = [float(r[ph]) for r in rows if r["n"] == n]
            mean[ph].append(sum(vals) / len(vals))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    bottom = [0.0] * len(sizes)
    xs = list(range(len(sizes)))
    for ph in PHASES:
        if not any(mean[ph]):
            continue
        ax.bar(xs, mean[ph], bottom=bottom, label=ph, width=0.6)
        bottom = [b + v for b, v in zip(bottom, mean[ph])]
    ax.set_xticks(xs)
    ax.set_xticklabels([str(n) for n in sizes])
    ax.set_xlabel("n")
    ax.set_ylabel("rounds")
    ax.set_title(title or "phase-split rounds, random regular graphs")
    ax.legend(fontsize=7, ncol=2, frameon=False)
    fig.tight_layout()
    # no timestamp in the metadata so reruns give identical bytes
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
