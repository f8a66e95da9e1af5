"""Report figures written next to the CLI's delimited output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .circuits import BellLabel  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "savefig.dpi": 150,
}


def plot_sweep(rows, path, width=6.0):
    """Success probability against N, one color per eta.

    Solid lines are the exact products, dashed lines the large-N expansion.
    """
    etas = sorted({r.eta for r in rows})
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(width, width * 0.62))
        for i, eta in enumerate(etas):
            sel = sorted((r for r in rows if r.eta == eta), key=lambda r: r.N)
            ns = [r.N for r in sel]
            color = f"C{i}"
            ax.plot(ns, [r.p_exact for r in sel], "-", color=color, lw=1.3, label=f"$\\eta={eta:g}$")
            ax.plot(ns, [r.p_approx for r in sel], "--", color=color, lw=1.0)
        ax.set_xlabel("number of beam splitters $N$")
        ax.set_ylabel("success probability $P$")
        ax.set_ylim(0, 1.02)
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def plot_bell_confusion(rows, path, width=4.5):
    """Reported-vs-true label frequencies of a Bell-measurement batch."""
    labels = [lab.value for lab in BellLabel]
    counts = [[0] * 4 for _ in labels]
    for r in rows:
        if r.reported_label:
            counts[labels.index(r.true_label)][labels.index(r.reported_label)] += 1
    totals = [max(1, sum(row)) for row in counts]
    freq = [[c / t for c in row] for row, t in zip(counts, totals)]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(width, width))
        im = ax.imshow(freq, vmin=0, vmax=1, cmap="Blues")
        ax.set_xticks(range(4), labels, rotation=30)
        ax.set_yticks(range(4), labels)
        ax.set_xlabel("reported")
        ax.set_ylabel("true")
        for i in range(4):
            for j in range(4):
                ax.text(j, i, f"{freq[i][j]:.2f}", ha="center", va="center",
                        color="white" if freq[i][j] > 0.6 else "black")
        fig.colorbar(im, ax=ax, fraction=0.046)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
