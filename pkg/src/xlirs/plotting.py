"""Figures for sweep tables: matplotlib renders and gnuplot scripts."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

AXIS_LABELS = {
    "surface_size_L": "IRS size L (m)",
    "ula_length_Lz": "ULA length L_z (m)",
    "tx_range_rq": "link distance r_q (m)",
}

# size sweeps span decades and read best on a log axis
LOG_X = {"surface_size_L", "ula_length_Lz"}

STYLE = {
    "exact-sum": dict(color="k", lw=1.8, ls="-"),
    "integral": dict(color="0.4", lw=1.0, ls=":"),
    "bounds": dict(color="tab:blue", lw=1.0, ls="--"),
    "boresight": dict(color="tab:green", lw=1.0, ls="--"),
    "asymptotic": dict(color="tab:red", lw=1.0, ls="-."),
    "ula-integral": dict(color="0.4", lw=1.0, ls=":"),
    "ula-closed": dict(color="tab:green", lw=1.0, ls="--", marker="o", ms=3),
    "ula-asymptotic": dict(color="tab:red", lw=1.0, ls="-."),
    "upw": dict(color="tab:purple", lw=1.2, ls="-"),
}


def _series(table):
    xs = [row[0] for row in table.rows]
    for j, col in enumerate(table.columns):
        ys = [row[1][j] for row in table.rows]
        yield col, xs, ys


def _tag_of(column):
    base = column.rsplit("_", 1)[0]
    for suffix in ("_lower", "_upper"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    return base


def render_sweep(table, path, title=None):
    """Render a sweep table to an image file (format from the extension)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for col, xs, ys in _series(table):
        pts = [(x, y) for x, y in zip(xs, ys) if y is not None]
        if not pts:
            continue
        style = dict(STYLE.get(_tag_of(col), {}))
        if col.endswith(("_upper_db", "_upper_linear")):
            style["ls"] = ":"
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=col, **style)
    if table.variable in LOG_X:
        ax.set_xscale("log")
    ax.set_xlabel(AXIS_LABELS.get(table.variable, table.variable))
    linear = table.columns and table.columns[0].endswith("_linear")
    ax.set_ylabel("SNR (linear)" if linear else "SNR (dB)")
    if linear:
        ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def gnuplot_script(table, csv_path, image_path=None):
    """A gnuplot script that plots every SNR column of ``csv_path``."""
    image_path = image_path or os.path.splitext(csv_path)[0] + ".png"
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        f"set output '{image_path}'",
        f"set xlabel '{AXIS_LABELS.get(table.variable, table.variable)}'",
        "set ylabel 'SNR (dB)'",
        "set grid",
    ]
    if table.variable in LOG_X:
        lines.append("set logscale x")
    # titles come from the CSV header row (autotitle columnhead)
    plots = [f"'{csv_path}' using 1:{j + 2} with linespoints" for j in range(len(table.columns))]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_gnuplot_script(table, csv_path, script_path=None, image_path=None):
    script_path = script_path or os.path.splitext(csv_path)[0] + ".gp"
    with open(script_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(gnuplot_script(table, csv_path, image_path))
    return script_path
