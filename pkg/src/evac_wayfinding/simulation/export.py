"""Result files: trajectories, metrics, sweep and comparison tables, optional plot."""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Optional, Sequence

import pandas as pd

from ..exceptions import ExportError
from .runner import RunResult, TrajectoryRow, route_shares
from .scenario import Scenario

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["tick", "agent_id", "x", "y", "heading_rad", "pred_route", "pred_conf", "committed_route"]
SWEEP_COLUMNS = ["W", "mean_entropy", "std_entropy", "n_seeds"]
TABLE1_COLUMNS = ["case", "label", "L_pct", "R_pct", "reported_L_pct", "reported_R_pct", "majority_match"]

_FLOAT_FORMAT = "%.6f"


def trajectories_frame(rows: Sequence[TrajectoryRow]) -> pd.DataFrame:
    frame = pd.DataFrame([asdict(r) for r in rows], columns=TRAJECTORY_COLUMNS)
    for column in ("tick", "agent_id", "pred_route", "committed_route"):
        frame[column] = frame[column].astype("int64")
    return frame


def metrics_dict(result: RunResult) -> Dict:
    counts, percent = route_shares(result)
    return {
        "route_counts": {str(k): v for k, v in counts.items()},
        "route_percent": {str(k): round(v, 6) for k, v in percent.items()},
        "evac_time_s": round(result.evac_time_s, 6),
        "mean_prediction_entropy": (
            None if result.mean_prediction_entropy is None else round(result.mean_prediction_entropy, 9)
        ),
        "uncommitted": list(result.uncommitted),
        "seed": result.seed,
        "config_echo": result.config_echo,
    }


def export(result: RunResult, out_dir) -> Dict[str, Path]:
    """Write ``trajectories.csv`` and ``metrics.json`` into ``out_dir``.

    Args:
        result: Finished run
        out_dir: Output directory (created if missing)

    Returns:
        Mapping of file kind to written path

    Raises:
        ExportError: If a file cannot be written
    """
    out = _ensure_dir(out_dir)
    paths = {"trajectories": out / "trajectories.csv", "metrics": out / "metrics.json"}
    _write_csv(trajectories_frame(result.trajectories), paths["trajectories"])
    _write_json(metrics_dict(result), paths["metrics"])
    logger.info(f"💾 Wrote {len(result.trajectories)} trajectory rows to {paths['trajectories']}")
    return paths


def write_sweep(rows: Sequence, out_dir) -> Path:
    """Write ``sweep.csv`` (one row per memory window)."""
    out = _ensure_dir(out_dir)
    path = out / "sweep.csv"
    frame = pd.DataFrame(
        [(r.window, r.mean_entropy, r.std_entropy, r.n_seeds) for r in rows],
        columns=SWEEP_COLUMNS,
    )
    _write_csv(frame, path)
    return path


def write_table1(rows: Sequence, out_dir) -> Path:
    """Write ``table1.csv`` comparing simulated and reported route shares."""
    out = _ensure_dir(out_dir)
    path = out / "table1.csv"
    frame = pd.DataFrame(
        [(r.case, r.label, r.left_pct, r.right_pct, r.reported_left_pct, r.reported_right_pct, r.majority_match)
         for r in rows],
        columns=TABLE1_COLUMNS,
    )
    _write_csv(frame, path, float_format="%.1f")
    return path


def plot_trajectories(result: RunResult, path, scenario: Optional[Scenario] = None) -> Optional[Path]:
    """Save a static plot of the trajectories coloured by predicted route.

    Needs matplotlib (the ``plot`` extra); without it a warning is logged
    and nothing is written.
    """
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib is not installed; skipping trajectory plot (pip install .[plot])")
        return None

    frame = trajectories_frame(result.trajectories)
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 8))
    if scenario is not None:
        for ring in scenario.environment.walls:
            xs = [p.x for p in ring] + [ring[0].x]
            ys = [p.y for p in ring] + [ring[0].y]
            ax.plot(xs, ys, color="black", linewidth=1.0)
        for route in scenario.environment.intersection.routes:
            a, b = route.portal
            ax.plot([a.x, b.x], [a.y, b.y], color="tab:gray", linestyle="--", linewidth=1.0)
    cmap = plt.get_cmap("tab10")
    for route, group in frame.groupby("pred_route"):
        color = "lightgray" if route < 0 else cmap(int(route) % 10)
        label = "no prediction" if route < 0 else f"route {route}"
        ax.scatter(group["x"], group["y"], s=4, color=color, label=label)
    ax.set_aspect("equal")
    ax.set_title(f"{result.scenario_name} (seed {result.seed})")
    ax.legend(loc="best", fontsize="small")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150)
    except OSError as e:
        raise ExportError(path, e.strerror or str(e)) from e
    finally:
        plt.close(fig)
    return path


def _ensure_dir(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(out, e.strerror or str(e)) from e
    return out


def _write_csv(frame: pd.DataFrame, path: Path, float_format: str = _FLOAT_FORMAT) -> None:
    try:
        frame.to_csv(path, index=False, float_format=float_format, lineterminator="\n")
    except OSError as e:
        raise ExportError(path, e.strerror or str(e)) from e


def _write_json(data: Dict, path: Path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2)
            f.write("\n")
    except OSError as e:
        raise ExportError(path, e.strerror or str(e)) from e
