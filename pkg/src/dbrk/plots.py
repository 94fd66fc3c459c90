"""Optional PNG figures for task outputs. Only imported when --figures is given."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _column(output, name):
    i = output.header.index(name)
    return [row[i] for row in output.rows]


def _loglog(ax, xs, ys, label, marker="o"):
    pts = [(float(x), float(y)) for x, y in zip(xs, ys) if float(y) > 0]
    if pts:
        ax.loglog(*zip(*pts), marker=marker, label=label)


def _converge(output, ax):
    ts = _column(output, "t")
    _loglog(ax, ts, _column(output, "diff_norm_sq"), "||k_w - k_x0||^2")
    _loglog(ax, ts, [abs(g) for g in _column(output, "norm_gap")], "| ||k_w||^2 - ||k_x0||^2 |", "s")
    ax.set_xlabel("t")
    ax.legend()


def _taylor(output, ax):
    _loglog(ax, _column(output, "t"), _column(output, "modulus"), "|epsilon(x0 + it)|")
    ax.set_xlabel("t")
    ax.legend()


def _anr(output, ax):
    ns = _column(output, "n")
    rs = _column(output, "r")
    vals = [a / 2**n for a, n in zip(_column(output, "A"), ns)]
    sc = ax.scatter(rs, ns, c=vals, cmap="coolwarm", vmin=-1, vmax=1, s=12)
    ax.set_xlabel("r")
    ax.set_ylabel("n")
    plt.colorbar(sc, ax=ax, label="A_{n,r} / 2^n")


def _residuals(key):
    def draw(output, ax):
        res = [max(float(r), 1e-300) for r in _column(output, "residual" if "residual" in output.header else "rel_error")]
        ax.bar(range(len(res)), res)
        ax.set_yscale("log")
        ax.set_xlabel(key)
        ax.set_ylabel("residual (0 drawn at 1e-300)")

    return draw


_DRAW = {
    "converge": _converge,
    "taylor": _taylor,
    "anr": _anr,
    "identities": _residuals("ell"),
    "lambda": _residuals("s"),
    "represent": _residuals("row"),
    "norm": _residuals("row"),
}


def render_figure(spec, output, directory: Path) -> Path | None:
    draw = _DRAW.get(spec.kind)
    if draw is None or not output.rows:
        return None
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    try:
        draw(output, ax)
        ax.set_title(f"{spec.kind}: {spec.out}")
        fig.tight_layout()
        path = directory / f"{spec.out}.png"
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=100, metadata={"Software": None})
    finally:
        plt.close(fig)
    return path
