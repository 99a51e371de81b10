"""SVG rendering of sweep CSVs."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

from .harness import BerRecord, read_records  # noqa: E402

_AXES = {"snr": ("snr_db", "Eb/N0 (dB)"),
         "iafo": ("iafo_norm", "inter-antenna offset (subcarrier spacings)"),
         "nf": ("nf_half", "half-subblock size N_F/2")}


def group_series(records: list[BerRecord], x: str = "snr"):
    """Map ``(scheme, channel, iafo, nf_half)`` minus the x field to sorted points."""
    if x not in _AXES:
        raise ValueError(f"x must be one of {sorted(_AXES)}")
    attr = _AXES[x][0]
    series = defaultdict(list)
    for r in records:
        key = {"scheme": r.scheme, "channel": r.channel, "snr_db": r.snr_db,
               "iafo_norm": r.iafo_norm, "nf_half": r.nf_half}
        key.pop(attr)
        series[tuple(sorted(key.items()))].append(r)
    return {k: sorted(v, key=lambda r: getattr(r, attr)) for k, v in series.items()}


def _label(key) -> str:
    d = dict(key)
    parts = [d.pop("scheme")]
    if "iafo_norm" in d:
        parts.append(f"iafo={d.pop('iafo_norm'):g}")
    parts += [f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in d.items()
              if k != "channel"]
    return ", ".join(parts)


def plot_records(records: list[BerRecord], out_path, x: str = "snr", title: str | None = None):
    """Write a log-BER plot with Wilson error bars, one line per series."""
    attr, xlabel = _AXES.get(x, (None, None))
    series = group_series(records, x)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for key, recs in series.items():
        xs = [getattr(r, attr) for r in recs]
        # zero-error points cannot sit on a log axis
        ys = [r.ber if r.ber > 0 else float("nan") for r in recs]
        err = [r.ci95 for r in recs]
        ax.errorbar(xs, ys, yerr=err, marker="o", ms=3, capsize=2, label=_label(key))
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.3)
    channels = sorted({r.channel for r in records})
    ax.set_title(title or ", ".join(channels))
    ax.legend(fontsize=7)
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "frac-sim"}):
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_csv(csv_path, out_path, x: str = "snr") -> int:
    """Plot a sweep CSV; returns the number of series drawn."""
    records = read_records(csv_path)
    plot_records(records, out_path, x)
    return len(group_series(records, x))
