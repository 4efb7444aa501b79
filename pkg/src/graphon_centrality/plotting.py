"""SVG figures with byte-stable output."""
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fileio import atomic_write  # noqa: E402

_RC = {"svg.hashsalt": "graphon-centrality", "svg.fonttype": "none", "path.simplify": False}


def _save(fig, path):
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return atomic_write(path, buf.getvalue())


def plot_centrality(c, path, n=512, title=None):
    x, y = c.samples(n)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(x, y, color="tab:blue", lw=1.5)
        ax.set_xlim(0, 1)
        ax.set_xlabel("x")
        ax.set_ylabel(f"{c.kind} centrality")
        if title:
            ax.set_title(title)
        fig.tight_layout()
    return _save(fig, path)


def plot_convergence(report, path):
    """Log-log mean error with a one-std band and the fitted bound curve."""
    rows = report.rows
    N = np.array([r["N"] for r in rows], dtype=float)
    mean = np.array([r["mean_error"] for r in rows], dtype=float)
    std = np.array([r["std_error"] for r in rows], dtype=float)
    aligned = [r["aligned"] for r in rows]
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.5, 4))
        branches = [("all", np.ones(len(N), bool), "black")]
        if any(a is not None for a in aligned):
            branches = [
                ("aligned", np.array([a is True for a in aligned]), "tab:red"),
                ("misaligned", np.array([a is False for a in aligned]), "tab:blue"),
            ]
        for label, sel, color in branches:
            if sel.any():
                lo = np.clip(mean[sel] - std[sel], 1e-300, None)
                ax.fill_between(N[sel], lo, mean[sel] + std[sel], color=color, alpha=0.2, lw=0)
                ax.plot(N[sel], mean[sel], "o-", color=color, ms=3, lw=1, label=label)
        sb = np.array([np.nan if r["sampled_bound"] is None else r["sampled_bound"] for r in rows], dtype=float)
        if report.fitted_C is not None and np.isfinite(sb).any():
            ax.plot(N, report.fitted_C * sb, "--", color="gray", lw=1, label="fitted C x bound")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("L2 error")
        ax.set_title(f"{report.graphon_id}: {report.kind}")
        ax.legend(fontsize=8)
        fig.tight_layout()
    return _save(fig, path)
