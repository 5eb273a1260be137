"""PNG figures for QQ and power plot data (matplotlib, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (5.0, 4.0),
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 120,
}
# no timestamps or version strings inside the files
_META = {"Software": None}


def qq_figure(series: dict, path, title: str = ""):
    """Empirical against uniform quantiles; ``series`` maps label -> [(theo, emp), ...]."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot([0, 1], [0, 1], color="0.5", lw=0.8, ls="--")
        for label, pts in series.items():
            ax.plot([a for a, _ in pts], [b for _, b in pts], lw=1.2, label=label)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel("uniform quantile")
        ax.set_ylabel("sorted p-value")
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(loc="upper left", frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata=_META)
        plt.close(fig)


def power_figure(curves: dict, path, alpha: float = 0.05, title: str = ""):
    """Rejection rate against delta; ``curves`` maps label -> (deltas, rates)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for label, (deltas, rates) in curves.items():
            ax.plot(deltas, rates, marker="o", ms=3, lw=1.2, label=label)
        ax.axhline(alpha, color="0.3", ls=":", lw=1.0)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("delta")
        ax.set_ylabel("rejection rate")
        if title:
            ax.set_title(title)
        if len(curves) > 1:
            ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata=_META)
        plt.close(fig)
