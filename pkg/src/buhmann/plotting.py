"""Figure rendering for the CLI report paths (matplotlib, Agg backend)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_kernel_panels", "render_curves"]

_STYLES = ["-", "--", "-."]


def render_kernel_panels(path, panels):
    """Render one subplot per panel to ``path``.

    ``panels`` is a list of dicts with keys ``title``, ``x`` and ``curves``
    (an ordered mapping label -> y array).  The first curve of each panel is
    drawn solid, the rest dashed/dash-dotted.
    """
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(4.0 * n, 3.2), squeeze=False)
    for ax, panel in zip(axes[0], panels):
        for style, (label, ys) in zip(_STYLES, panel["curves"].items()):
            ax.plot(panel["x"], ys, style, label=label, linewidth=1.4)
        ax.set_title(panel["title"])
        ax.set_xlabel("x")
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_curves(path, x, curves, title="", xlabel="x", ylabel=""):
    """Render a single set of labeled curves to ``path``."""
    fig, ax = plt.subplots(figsize=(5.0, 3.5))
    for label, ys in curves.items():
        ax.plot(x, ys, label=label, linewidth=1.4)
    if title:
        ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
