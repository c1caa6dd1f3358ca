"""Figure builders for the henon artifact bundle.

Three figure kinds, one output file per call:

  scan      eigenvalue curve Lambda_11(p) with the level 1 and any marked
            degeneracy points, above the Morse-index staircase
  branch    bifurcation diagram: asymmetry and sup norm against p for the
            radial curve (from a scan table) and the continued branch
  profiles  convergence panels: normalized profiles against the weighted
            eigenfunction (p -> 1) and the rescaled profile under its
            entire-space barrier (p -> p_alpha)

Rendering is deterministic for fixed inputs: a fixed style, a fixed SVG
hash salt and no embedded timestamps.  Vector (SVG) output is the default;
any extension matplotlib understands works.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    MissingColumnsError,
    file_kind,
    read_document,
    read_table,
    require_columns,
)

# Okabe-Ito palette: distinguishable under the common color-vision deficiencies
PALETTE = (
    "#0072B2",  # blue
    "#D55E00",  # vermillion
    "#009E73",  # green
    "#CC79A7",  # purple
    "#E69F00",  # orange
    "#56B4E9",  # sky
    "#000000",  # black
)

KINDS = ("scan", "branch", "profiles")


@dataclass(frozen=True)
class FigureSpec:
    """What to draw, from which artifacts, into which file."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    dpi: int = 144
    title: str | None = None


def _style():
    plt.rcParams.update(
        {
            "svg.hashsalt": "henon-plots",
            "figure.constrained_layout.use": True,
            "axes.prop_cycle": plt.cycler(color=PALETTE),
            "axes.grid": True,
            "grid.alpha": 0.25,
            "font.size": 10,
        }
    )


def _classify_inputs(paths):
    by_kind = {}
    for path in paths:
        by_kind.setdefault(file_kind(path), []).append(path)
    return by_kind


def render(spec: FigureSpec):
    """Build the figure and write it to spec.out; returns the Figure."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r} (choose from {KINDS})")
    _style()
    by_kind = _classify_inputs(spec.inputs)
    builder = {
        "scan": _render_scan,
        "branch": _render_branch,
        "profiles": _render_profiles,
    }[spec.kind]
    fig = builder(by_kind)
    if spec.title:
        fig.suptitle(spec.title)
    fig.savefig(spec.out, dpi=spec.dpi, metadata=_clean_metadata(spec.out))
    return fig


def _clean_metadata(out):
    suffix = Path(out).suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return None


def _first(by_kind, kind, what):
    if kind not in by_kind:
        raise MissingColumnsError(f"{what}: no input of kind {kind!r} supplied")
    return by_kind[kind][0]


# ---------------------------------------------------------------------------
# scan: eigenvalue curve + Morse staircase
# ---------------------------------------------------------------------------


def _render_scan(by_kind):
    path = _first(by_kind, "scan", "scan figure")
    meta, cols = read_table(path, "scan")
    require_columns(cols, ("p", "lambda11", "morse_index"), path)

    fig, (ax_top, ax_bot) = plt.subplots(
        2, 1, figsize=(6.4, 6.0), sharex=True, height_ratios=[3, 2]
    )
    ax_top.plot(cols["p"], cols["lambda11"], lw=1.5, label=r"$\Lambda_{1,1}(p)$")
    ax_top.axhline(1.0, color=PALETTE[6], lw=0.8, ls="--", label=r"$\Lambda = 1$")
    for doc_path in by_kind.get("degeneracy-points", []):
        doc = read_document(doc_path, "degeneracy-points")
        for pt in doc["points"]:
            marker = "o" if pt["changing"] else "s"
            ax_top.plot(
                [pt["p_bar"]], [1.0], marker, ms=7, color=PALETTE[1],
                label="degeneracy point" if pt["changing"] else "tangency candidate",
            )
    _dedupe_legend(ax_top)
    ax_top.set_ylabel("first mode-1 eigenvalue")

    ax_bot.step(cols["p"], cols["morse_index"], where="mid", lw=1.5,
                color=PALETTE[2])
    ax_bot.set_xlabel(r"exponent $p$")
    ax_bot.set_ylabel("Morse index")
    ticks = sorted(set(int(v) for v in cols["morse_index"]))
    ax_bot.set_yticks(ticks)
    return fig


# ---------------------------------------------------------------------------
# branch: bifurcation diagram
# ---------------------------------------------------------------------------


def _render_branch(by_kind):
    path = _first(by_kind, "branch", "branch figure")
    doc = read_document(path, "branch")
    pts = doc["points"]
    if not pts:
        raise MissingColumnsError(f"{path}: branch manifest has no points")
    p = np.array([q["p"] for q in pts])
    asym = np.array([q["asymmetry"] for q in pts])
    sup = np.array([q["sup_norm"] for q in pts])

    fig, (ax_a, ax_s) = plt.subplots(1, 2, figsize=(9.6, 4.2))
    ax_a.plot(p, asym, "-o", ms=2.5, lw=1.2, label="nonradial branch")
    ax_a.axhline(0.0, color=PALETTE[6], lw=1.0, label="radial family")
    origin = doc.get("origin_p")
    if origin is not None:
        ax_a.plot([origin], [0.0], "o", ms=7, color=PALETTE[1],
                  label=rf"bifurcation $\bar p$ = {origin:.5f}")
    ax_a.set_xlabel(r"exponent $p$")
    ax_a.set_ylabel("asymmetry (mode-1 projection norm)")
    _dedupe_legend(ax_a)

    for scan_path in by_kind.get("scan", []):
        _, cols = read_table(scan_path, "scan")
        require_columns(cols, ("p", "sup_norm"), scan_path)
        ax_s.plot(cols["p"], cols["sup_norm"], lw=1.0, color=PALETTE[6],
                  label="radial family")
    ax_s.plot(p, sup, "-o", ms=2.5, lw=1.2, label="nonradial branch")
    ax_s.set_xlabel(r"exponent $p$")
    ax_s.set_ylabel(r"$\sup u$")
    _dedupe_legend(ax_s)
    return fig


# ---------------------------------------------------------------------------
# profiles: convergence panels
# ---------------------------------------------------------------------------


def _render_profiles(by_kind):
    fig, (ax_one, ax_crit) = plt.subplots(1, 2, figsize=(9.6, 4.2))

    path = _first(by_kind, "p-to-one-profiles", "profile panels")
    _, cols = read_table(path, "p-to-one-profiles")
    require_columns(cols, ("r", "phi_1"), path)
    r = cols["r"]
    for i, name in enumerate(sorted(c for c in cols if c.startswith("ubar_p"))):
        label = rf"$\bar u$, $p$ = {name.removeprefix('ubar_p')}"
        ax_one.plot(r, cols[name], lw=1.1, color=PALETTE[i % 6], label=label)
    ax_one.plot(r, cols["phi_1"], "--", lw=1.6, color=PALETTE[6],
                label=r"weighted eigenfunction $\phi_1$")
    ax_one.set_xlabel(r"$r$")
    ax_one.set_ylabel(r"$u_p / \sup u_p$")
    ax_one.legend(fontsize=8)

    path = _first(by_kind, "rescaled-profile", "profile panels")
    meta, cols = read_table(path, "rescaled-profile")
    require_columns(cols, ("x", "u_tilde", "limit_profile"), path)
    window = cols["x"] <= 8.0
    ax_crit.plot(cols["x"][window], cols["u_tilde"][window], lw=1.2,
                 label=rf"$\tilde u_p$, $p$ = {meta.get('p', '?')}")
    ax_crit.plot(cols["x"][window], cols["limit_profile"][window], "--", lw=1.6,
                 color=PALETTE[6], label=r"limit profile $U$ (upper bound)")
    ax_crit.set_xlabel(r"$x$")
    ax_crit.set_ylabel(r"$\tilde u(x)$")
    ax_crit.legend(fontsize=8)
    return fig


def _dedupe_legend(ax):
    handles, labels = ax.get_legend_handles_labels()
    seen, hs, ls = set(), [], []
    for h, l in zip(handles, labels):
        if l not in seen:
            seen.add(l)
            hs.append(h)
            ls.append(l)
    ax.legend(hs, ls, fontsize=8)
