from pathlib import Path
from typing import Sequence

from matplotlib.figure import Figure

from ..models.entities import SweepRow, SymbolCloud


class ScenarioVisualizer:
    """Static PNG figures for the width sweep and phase-space clouds.

    Figures are built on bare Figure objects (no pyplot state), so the report
    runners can plot from several threads at once.
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def plot_width_sweep(self, rows: Sequence[SweepRow], w_o: float, name: str = "width_sweep.png") -> Path:
        """Sideband probabilities against element width normalized to W_o."""
        widths = [row.w / w_o for row in rows]
        fig = Figure(figsize=(8, 5))
        ax = fig.add_subplot()
        ax.plot(widths, [row.P0 for row in rows], label="s = 0")
        ax.plot(widths, [row.P1 for row in rows], label="s = +/-1 (each)")
        ax.plot(widths, [row.P2 for row in rows], label="s = +/-2 (each)")
        ax.set_xlabel("W / W_o")
        ax.set_ylabel("probability")
        ax.set_yscale("log")
        ax.set_ylim(1e-8, 1.5)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)

        output_path = self.output_dir / name
        fig.savefig(output_path, dpi=120)
        return output_path

    def plot_phase_space(self, clouds: Sequence[SymbolCloud], title: str, name: str) -> Path:
        fig = Figure(figsize=(6, 6))
        ax = fig.add_subplot()
        for index, cloud in enumerate(clouds):
            ax.scatter(cloud.samples[:, 0], cloud.samples[:, 1], s=2, alpha=0.3, label=f"symbol {index}")
            ax.plot(cloud.symbol.mean_x, cloud.symbol.mean_p, "k+", markersize=12)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("p")
        ax.set_title(title)
        ax.legend(markerscale=4)

        output_path = self.output_dir / name
        fig.savefig(output_path, dpi=120)
        return output_path
