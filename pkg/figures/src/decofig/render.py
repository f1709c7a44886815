"""Renderers: one figure per spec, deterministic for identical inputs.

The pipeline never computes physics.  Every fitted number drawn on a
figure is read from a summary JSON produced by the simulation side, so
the annotation and the recorded fit cannot disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import schema
from .errors import EmptyInput, SpecError
from .spec import FigureSpec

# Fixed style so byte-identical inputs render byte-identical files.
_RC = {
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.3,
    "svg.hashsalt": "decofig",
    "figure.constrained_layout.use": True,
}

_HEATMAP_CMAP = "RdBu_r"
_SERIES_CMAP = "viridis"


@dataclass(frozen=True)
class RenderResult:
    """Output path plus the numbers drawn on the figure."""

    path: Path
    annotations: Mapping[str, float]


def render(spec: FigureSpec, base_dir=None) -> RenderResult:
    """Render one figure; returns the output path and its annotations."""
    base = Path(base_dir) if base_dir is not None else Path(".")
    inputs = spec.resolve_inputs(base)
    out = spec.out_path()
    if not out.is_absolute():
        out = base / out
    out.parent.mkdir(parents=True, exist_ok=True)
    renderer = _RENDERERS[spec.kind]
    with plt.rc_context(_RC):
        fig = plt.figure()
        try:
            annotations = renderer(fig, spec, inputs, base)
            _dress(fig, spec)
            _save(fig, out, spec)
        finally:
            plt.close(fig)
    return RenderResult(path=out, annotations=annotations)


def _dress(fig, spec: FigureSpec):
    ax = fig.axes[0] if fig.axes else None
    if ax is None:
        return
    if spec.title is not None:
        ax.set_title(spec.title)
    if spec.xlabel is not None:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel is not None:
        ax.set_ylabel(spec.ylabel)
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)


def _save(fig, out: Path, spec: FigureSpec):
    fmt = spec.out_format
    # Strip writer timestamps so reruns are byte-identical.
    metadata = None
    if fmt == "pdf":
        metadata = {"CreationDate": None}
    elif fmt == "svg":
        metadata = {"Date": None}
    fig.savefig(out, format=fmt, dpi=spec.dpi, metadata=metadata)


def _input_label(path: Path, index: int, spec: FigureSpec) -> str:
    labels = spec.options.get("labels")
    if labels is not None:
        if not isinstance(labels, (list, tuple)) or len(labels) <= index:
            raise SpecError("labels must list one entry per resolved input", "options.labels")
        return str(labels[index])
    if path.name in ("series.csv", "summary.json"):
        return path.parent.name
    return path.stem


def _guide_fit(spec: FigureSpec, base: Path):
    guide = spec.options.get("guide")
    if guide is None:
        return None
    if not isinstance(guide, Mapping):
        raise SpecError("guide must be a mapping", "options.guide")
    label = str(guide.get("label", "guide"))
    if "summary" in guide:
        summary_path = base / str(guide["summary"])
        summary = schema.read_summary(summary_path)
        if guide.get("source") == "ks_rate":
            lyap = summary.get("lyapunov")
            if not isinstance(lyap, Mapping) or "ks_rate" not in lyap:
                raise schema.SchemaMismatch(
                    "summary has no lyapunov.ks_rate", summary_path
                )
            slope = float(lyap["ks_rate"])
            return slope, float(guide.get("intercept", 0.0)), guide.get("window"), label
        fit = schema.summary_fit(summary, str(guide.get("fit", "entropy_slope")), summary_path)
        window = fit.get("window")
        return float(fit["slope"]), float(fit["intercept"]), window, label
    if "slope" in guide and "intercept" in guide:
        return float(guide["slope"]), float(guide["intercept"]), guide.get("window"), label
    raise SpecError(
        "guide needs either a summary reference or literal slope and intercept",
        "options.guide",
    )


def _render_series(fig, spec: FigureSpec, inputs, base: Path) -> dict:
    column = str(spec.options.get("column", "entropy_nats"))
    if column not in schema.SERIES_COLUMNS or column == "t":
        raise SpecError(f"unknown series column {column!r}", "options.column")
    ax = fig.add_subplot()
    cmap = plt.get_cmap(_SERIES_CMAP)
    plotted = 0
    for i, path in enumerate(inputs):
        table = schema.read_series(path)
        values = table.column(column)
        mask = ~np.isnan(values)
        if not mask.any():
            continue
        color = cmap(0.1 + 0.8 * i / max(1, len(inputs) - 1))
        ax.plot(table.t[mask], values[mask], color=color, label=_input_label(path, i, spec))
        plotted += 1
    if plotted == 0:
        raise EmptyInput(f"column {column!r} has no values in any input")
    annotations: dict = {}
    guide = _guide_fit(spec, base)
    if guide is not None:
        slope, intercept, window, label = guide
        t0, t1 = (window if window else (ax.get_xlim()))
        tt = np.array([t0, t1], dtype=float)
        ax.plot(tt, slope * tt + intercept, "k--", linewidth=1.0, label=label)
        ax.annotate(
            f"slope = {slope:.12g}",
            xy=(0.02, 0.95),
            xycoords="axes fraction",
            fontsize=8,
            verticalalignment="top",
        )
        annotations["guide_slope"] = slope
    ax.set_xlabel("t")
    ax.set_ylabel(column)
    ax.legend(fontsize=8)
    return annotations


def _render_heatmap(fig, spec: FigureSpec, inputs, base: Path) -> dict:
    if len(inputs) != 1:
        raise SpecError("heatmap takes exactly one snapshot header", "inputs")
    snap = schema.read_snapshot(inputs[0])
    vmax = float(np.max(np.abs(snap.values)))
    if vmax == 0.0:
        raise EmptyInput("snapshot is identically zero", snap.path)
    ax = fig.add_subplot()
    # Array rows index x; transpose so x runs horizontally.
    image = ax.imshow(
        snap.values.T,
        origin="lower",
        extent=(snap.x_min, snap.x_max, snap.p_min, snap.p_max),
        cmap=_HEATMAP_CMAP,
        vmin=-vmax,
        vmax=vmax,
        aspect="auto",
        interpolation="nearest",
    )
    fig.colorbar(image, ax=ax, label="W(x, p)")
    ax.annotate(
        f"t = {snap.t:g}   hbar = {snap.hbar:g}   D = {snap.diffusion:g}",
        xy=(0.02, 0.97),
        xycoords="axes fraction",
        fontsize=8,
        verticalalignment="top",
        bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8},
    )
    inset = spec.options.get("inset")
    if inset is not None:
        if not isinstance(inset, (list, tuple)) or len(inset) != 4:
            raise SpecError("inset needs [x0, x1, p0, p1]", "options.inset")
        x0, x1, p0, p1 = (float(v) for v in inset)
        sub = ax.inset_axes([0.66, 0.62, 0.32, 0.32])
        sub.imshow(
            snap.values.T,
            origin="lower",
            extent=(snap.x_min, snap.x_max, snap.p_min, snap.p_max),
            cmap=_HEATMAP_CMAP,
            vmin=-vmax,
            vmax=vmax,
            aspect="auto",
            interpolation="nearest",
        )
        sub.set_xlim(x0, x1)
        sub.set_ylim(p0, p1)
        sub.set_xticks([])
        sub.set_yticks([])
        ax.indicate_inset_zoom(sub, edgecolor="black")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    return {"t": snap.t, "hbar": snap.hbar, "D": snap.diffusion}


def _render_scaling(fig, spec: FigureSpec, inputs, base: Path) -> dict:
    if len(inputs) != 1:
        raise SpecError("scaling takes exactly one points file", "inputs")
    summary_ref = spec.options.get("summary")
    if summary_ref is None:
        raise SpecError("scaling needs options.summary for the fit", "options.summary")
    table = schema.read_scaling(inputs[0])
    summary_path = base / str(summary_ref)
    summary = schema.read_summary(summary_path)
    fit = schema.summary_fit(summary, str(spec.options.get("fit", "horizon")), summary_path)
    slope = float(fit["slope"])
    intercept = float(fit["intercept"])
    stderr = float(fit["stderr"])
    x = table.column("ln_inv_hbar")
    y = table.column("t_breakdown")
    ax = fig.add_subplot()
    ax.plot(x, y, "o", color="tab:blue", label="breakdown times")
    xx = np.array([float(np.min(x)), float(np.max(x))])
    ax.plot(xx, slope * xx + intercept, "k--", linewidth=1.0, label="fit")
    ax.annotate(
        f"slope = {slope:.12g} +/- {stderr:.3g}\nr^2 = {fit['r_squared']:.4f}",
        xy=(0.03, 0.95),
        xycoords="axes fraction",
        fontsize=8,
        verticalalignment="top",
    )
    ax.set_xlabel("ln(1/hbar)")
    ax.set_ylabel("breakdown time")
    ax.legend(fontsize=8, loc="lower right")
    return {"slope": slope, "stderr": stderr, "r_squared": float(fit["r_squared"])}


_TABLE_HEADINGS = (
    "system",
    "t_hbar [s]",
    "t_r [s]",
    "tau_D [s]",
    "l_c [cm]",
    "sigma_c [g cm/s]",
    "classical",
)


def _cell(value: float) -> str:
    return "" if np.isnan(value) else f"{value:.3g}"


def _render_table(fig, spec: FigureSpec, inputs, base: Path) -> dict:
    if len(inputs) != 1:
        raise SpecError("table takes exactly one timescales file", "inputs")
    _, rows = schema.read_timescales(inputs[0])
    cells = [
        [
            row.name,
            _cell(row.t_hbar_s),
            _cell(row.t_r_s),
            _cell(row.tau_d_s),
            _cell(row.l_c_cm),
            _cell(row.sigma_c_gcm_s),
            "" if row.classical_flag is None else ("yes" if row.classical_flag else "no"),
        ]
        for row in rows
    ]
    fig.set_size_inches(8.0, 0.6 + 0.4 * (len(rows) + 1))
    ax = fig.add_subplot()
    ax.axis("off")
    table = ax.table(cellText=cells, colLabels=list(_TABLE_HEADINGS), loc="center")
    table.auto_set_font_size(False)
    table.set_fontsize(8)
    table.scale(1.0, 1.5)
    return {}


def _render_branches(fig, path: Path) -> dict:
    table = schema.read_branches(path)
    index = np.arange(len(table.records))
    ax = fig.add_subplot()
    ax.bar(index, table.data["z_bits"], color="tab:blue", label="Z")
    ax.bar(index, table.data["k_hat_bits"], color="tab:orange", label="K-hat")
    ax.set_xlabel("branch (record order)")
    ax.set_ylabel("bits")
    ax.legend(fontsize=8, loc="lower right")
    mean_z = float(np.mean(table.data["z_bits"]))
    ax.annotate(
        f"mean Z = {mean_z:.12g} bits over {len(table.records)} branches",
        xy=(0.03, 0.95),
        xycoords="axes fraction",
        fontsize=8,
        verticalalignment="top",
    )
    return {"mean_z_bits": mean_z}


def _render_observer(fig, spec: FigureSpec, inputs, base: Path) -> dict:
    suffixes = {p.suffix for p in inputs}
    if suffixes == {".csv"}:
        if len(inputs) != 1:
            raise SpecError("branch rendering takes exactly one branches file", "inputs")
        return _render_branches(fig, inputs[0])
    if len(inputs) != 1:
        raise SpecError(
            "observer takes one tree summary or one branches CSV", "inputs"
        )
    path = inputs[0]
    summary = schema.read_summary(path)
    tree = summary.get("tree")
    if not isinstance(tree, Mapping):
        raise schema.SchemaMismatch(
            "observer figure needs a full-tree summary with a 'tree' block", path
        )
    try:
        depth = [int(v) for v in tree["depth"]]
        record_bits = [float(v) for v in tree["record_entropy_bits"]]
        k_hat = [float(v) for v in tree["avg_k_hat_bits"]]
        z_bits = [float(v) for v in tree["avg_z_bits"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise schema.SchemaMismatch(f"tree block malformed: {exc}", path)
    if not depth or not (len(depth) == len(record_bits) == len(k_hat) == len(z_bits)):
        raise schema.SchemaMismatch("tree per-level arrays disagree in length", path)
    ax = fig.add_subplot()
    ax.plot(depth, record_bits, "o-", label="record entropy")
    ax.plot(depth, k_hat, "s-", label="avg K-hat")
    ax.plot(depth, z_bits, "^-", label="avg Z")
    final_z = z_bits[-1]
    ax.annotate(
        f"Z = {final_z:.12g} bits at depth {depth[-1]}",
        xy=(0.03, 0.95),
        xycoords="axes fraction",
        fontsize=8,
        verticalalignment="top",
    )
    ax.set_xlabel("measurement depth")
    ax.set_ylabel("bits")
    ax.legend(fontsize=8, loc="lower right")
    return {"avg_z_bits": final_z}


_RENDERERS = {
    "series": _render_series,
    "heatmap": _render_heatmap,
    "scaling": _render_scaling,
    "table": _render_table,
    "observer": _render_observer,
}
