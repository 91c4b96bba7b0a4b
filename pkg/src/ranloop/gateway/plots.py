"""Result export: three CSV series files plus three rendered panels.

Panel layout follows the experiment's reporting convention: per-slice
throughput with the throttle overlay, device transmit power with its target
and the guardrail bounds, and device power draw.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scenario import ScenarioResult  # noqa: E402

PANELS = ("throughput", "tx_power", "power_draw")


class ExportError(RuntimeError):
    pass


def _write_series_csv(path: Path, columns: dict[str, list]) -> None:
    """columns: name -> [[t, v], ...]; all series share their time base."""
    names = sorted(columns)
    times = [t for t, _ in columns[names[0]]]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp_s"] + names)
        for i, t in enumerate(times):
            writer.writerow([repr(t)] + [repr(columns[n][i][1]) for n in names])


def read_series_csv(path: Path) -> dict[str, list]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns: dict[str, list] = {name: [] for name in header[1:]}
        for row in reader:
            t = float(row[0])
            for name, value in zip(header[1:], row[1:]):
                columns[name].append([t, float(value)])
    return columns


def export_plots(result: ScenarioResult, out_dir: str | Path) -> list[Path]:
    """Write 3 CSVs + 3 PNGs; validates everything before touching disk so a
    bad result never leaves partial files."""
    series = result.series
    if not series or not any(series.get("throughput_bps", {}).values()):
        raise ExportError("result has no series to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    throughput_cols = {
        f"slice_{sid}_throughput_bps": pts
        for sid, pts in series["throughput_bps"].items()
    } | {
        f"slice_{sid}_throttle_bps": pts
        for sid, pts in series["throttle_bps"].items()
    }
    tx_cols = {
        f"ue_{uid}_tx_power_dbm": pts for uid, pts in series["tx_power_dbm"].items()
    } | {
        f"ue_{uid}_snr_target_db": pts for uid, pts in series["snr_target_db"].items()
    }
    draw_cols = {
        f"ue_{uid}_power_draw_mw": pts for uid, pts in series["power_draw_mw"].items()
    }
    for cols in (throughput_cols, tx_cols, draw_cols):
        lengths = {len(pts) for pts in cols.values()}
        if len(lengths) != 1:
            raise ExportError(f"inconsistent series lengths: {sorted(lengths)}")

    written: list[Path] = []
    _write_series_csv(out / "throughput.csv", throughput_cols)
    written.append(out / "throughput.csv")
    _write_series_csv(out / "tx_power.csv", tx_cols)
    written.append(out / "tx_power.csv")
    _write_series_csv(out / "power_draw.csv", draw_cols)
    written.append(out / "power_draw.csv")

    phase_edges = [p["start_s"] for p in result.phases][1:]

    def mark_phases(ax):
        for edge in phase_edges:
            ax.axvline(edge, color="gray", linestyle=":", linewidth=0.8)

    fig, ax = plt.subplots(figsize=(8, 4))
    for sid, pts in sorted(series["throughput_bps"].items()):
        ax.plot([p[0] for p in pts], [p[1] / 1e6 for p in pts], label=f"slice {sid} throughput")
    for sid, pts in sorted(series["throttle_bps"].items()):
        ax.plot([p[0] for p in pts], [p[1] / 1e6 for p in pts], linestyle="--",
                label=f"slice {sid} throttle")
    mark_phases(ax)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("throughput [Mbit/s]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "throughput.png", dpi=120)
    plt.close(fig)
    written.append(out / "throughput.png")

    fig, ax = plt.subplots(figsize=(8, 4))
    for uid, pts in sorted(series["tx_power_dbm"].items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"ue {uid} tx power")
    for uid, pts in sorted(series["snr_target_db"].items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], linestyle="--", alpha=0.6,
                label=f"ue {uid} SNR target")
    mark_phases(ax)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("dBm / dB")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "tx_power.png", dpi=120)
    plt.close(fig)
    written.append(out / "tx_power.png")

    fig, ax = plt.subplots(figsize=(8, 4))
    for uid, pts in sorted(series["power_draw_mw"].items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"ue {uid} draw")
    mark_phases(ax)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("device draw [mW]")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out / "power_draw.png", dpi=120)
    plt.close(fig)
    written.append(out / "power_draw.png")

    return written
