"""Figure construction: runtime-vs-mutation-rate boxplots and the runtime
scaling curve with a coeff*lambda*n reference line.

Runtime statistics are computed over hits only; every group is annotated
with its success rate, and groups without any hit get an explicit marker
instead of a box/point. Rendering is deterministic: identical inputs yield
identical vector output (date metadata is stripped).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "plotgen"

CHI_SWEEP = "chi_sweep"
SCALING = "scaling"


@dataclass(frozen=True)
class PlotRequest:
    kind: str  # chi_sweep | scaling
    input: str
    output: str
    reference_coeff: float = 6.0
    log_y: bool = False

    def __post_init__(self):
        if self.kind not in (CHI_SWEEP, SCALING):
            raise ValueError(f"unknown plot kind {self.kind!r}")


@dataclass
class FigureInfo:
    """What got drawn, for callers that want to verify the figure."""

    boxes: int = 0
    points: int = 0
    no_hit_groups: int = 0
    reference_drawn: bool = False
    markers_below_reference: Optional[bool] = None


def _group(rows: List[dict], key: str) -> dict:
    groups: dict = {}
    for r in rows:
        groups.setdefault(r[key], []).append(r)
    return dict(sorted(groups.items()))


def chi_sweep_figure(rows: List[dict], log_y: bool = False):
    """One runtime box per mutation rate (hits only), mean marker included,
    success rate annotated under each group."""
    groups = _group(rows, "chi")
    info = FigureInfo()
    fig, ax = plt.subplots(figsize=(7.2, 4.4))
    data, positions, labels = [], [], []
    for chi, members in groups.items():
        hits = [r["hitting_evals"] for r in members if r["hit"]]
        rate = len(hits) / len(members)
        if hits:
            data.append(hits)
            positions.append(chi)
            info.boxes += 1
        else:
            info.no_hit_groups += 1
            ax.plot([chi], [1.0], marker="x", color="crimson", markersize=9,
                    clip_on=False)
            ax.annotate("no hits", (chi, 1.0), textcoords="offset points",
                        xytext=(0, 10), ha="center", fontsize=8, color="crimson")
        labels.append((chi, rate))
    if data:
        ax.boxplot(
            data, positions=positions, widths=0.12, showmeans=True,
            meanprops={"marker": "D", "markerfacecolor": "tab:orange",
                       "markeredgecolor": "tab:orange", "markersize": 4},
        )
    for chi, rate in labels:
        ax.annotate(f"{rate:.0%}", (chi, 0.02), xycoords=("data", "axes fraction"),
                    ha="center", fontsize=8, color="tab:blue")
    ax.set_xlabel("mutation strength")
    ax.set_ylabel("evaluations to target")
    ax.set_title("runtime vs mutation rate (hits only; success rate per group)")
    all_chis = list(groups)
    ax.set_xticks(all_chis)
    ax.set_xticklabels([f"{c:g}" for c in all_chis])
    ax.set_xlim(min(all_chis) - 0.15, max(all_chis) + 0.15)
    if log_y:
        ax.set_yscale("log")
    fig.tight_layout()
    return fig, info


def scaling_figure(rows: List[dict], reference_coeff: float = 6.0,
                   log_y: bool = False):
    """Mean runtime (hits only) against problem size, with the
    coeff*lambda*n reference curve overlaid (coeff 0 disables it)."""
    groups = _group(rows, "n")
    info = FigureInfo()
    fig, ax = plt.subplots(figsize=(6.8, 4.4))
    xs, means, refs = [], [], []
    for n, members in groups.items():
        lam = members[0]["lambda"]
        hits = [r["hitting_evals"] for r in members if r["hit"]]
        rate = len(hits) / len(members)
        refs.append((n, reference_coeff * lam * n))
        if hits:
            xs.append(n)
            means.append(float(np.mean(hits)))
            info.points += 1
            ax.annotate(f"{rate:.0%}", (n, means[-1]),
                        textcoords="offset points", xytext=(6, -4), fontsize=8)
        else:
            info.no_hit_groups += 1
            ax.plot([n], [1.0], marker="x", color="crimson", markersize=9)
            ax.annotate("no hits", (n, 1.0), textcoords="offset points",
                        xytext=(0, 10), ha="center", fontsize=8, color="crimson")
    if xs:
        ax.plot(xs, means, "o-", color="tab:blue", label="mean evaluations (hits)")
    if reference_coeff:
        rx, ry = zip(*refs)
        ax.plot(rx, ry, "r--", label=f"{reference_coeff:g} * lambda * n")
        info.reference_drawn = True
        if xs:
            ref_at = dict(refs)
            info.markers_below_reference = all(
                m < ref_at[x] for x, m in zip(xs, means)
            )
    ax.set_xlabel("problem size n")
    ax.set_ylabel("evaluations to target")
    ax.set_title("runtime scaling (hits only; success rate per point)")
    ax.legend()
    if log_y:
        ax.set_yscale("log")
    fig.tight_layout()
    return fig, info


def save(fig, path) -> None:
    path = str(path)
    metadata = None
    if path.endswith(".svg"):
        metadata = {"Date": None}
    elif path.endswith(".pdf"):
        metadata = {"CreationDate": None}
    fig.savefig(path, metadata=metadata)
    plt.close(fig)


def plot(req: PlotRequest) -> FigureInfo:
    """Render the requested figure from a results.csv; returns what was
    drawn. Raises SchemaError for malformed inputs."""
    from .results import read_results

    rows = read_results(req.input)
    if req.kind == CHI_SWEEP:
        fig, info = chi_sweep_figure(rows, log_y=req.log_y)
    else:
        fig, info = scaling_figure(rows, reference_coeff=req.reference_coeff,
                                   log_y=req.log_y)
    save(fig, req.output)
    return info
