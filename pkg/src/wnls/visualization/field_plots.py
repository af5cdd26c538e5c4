"""
Field Figures - Plotly Heatmaps and Observable Time Series

Builds interactive figures for intensity snapshots and recorded
observables. The CLI writes them as standalone HTML with --html.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from ..calculations.diagnostics import ObservableSeries
from ..calculations.errors import OutputError
from ..calculations.grid import Field


class FieldFigureBuilder:
    """Plotly figure factory for fields and observable series"""

    INTENSITY_COLORSCALE = "Viridis"

    # Observable panels: (column, label)
    OBSERVABLE_PANELS = [
        ("mass", "Mass M(u)"),
        ("hamiltonian", "Hamiltonian H(u)"),
        ("grad_l2", "‖∇u‖"),
        ("quartic_weighted", "∫ω|u|⁴"),
        ("localized_mass", "Localized mass"),
        ("scattering_cauchy", "Pullback Cauchy difference"),
    ]

    FONT = dict(family="Arial, sans-serif", color="#333333")

    def __init__(self, width: int = 900, height: int = 800):
        self.width = width
        self.height = height

    def _title(self, text: str) -> Dict:
        return dict(
            text=text,
            font=dict(family="Arial, sans-serif", size=20, color="#333333"),
            x=0.5,
            xanchor="center",
        )

    def intensity_heatmap(self, u: Field, title: str = "Intensity |u|²", log_scale: bool = False) -> go.Figure:
        """
        Heatmap of |u|² over the box.

        Args:
            u: Field to display
            title: Chart title
            log_scale: Show log10 of the intensity (floored at 1e-16)

        Returns:
            Plotly Figure object
        """
        x = u.grid.coordinates()
        z = u.intensity()
        if log_scale:
            z = np.log10(np.maximum(z, 1e-16))
        # values[i, j] = u(x_i, y_j): rows are x, so transpose for plotly's (y, x) layout
        fig = go.Figure(go.Heatmap(
            x=x,
            y=x,
            z=z.T,
            colorscale=self.INTENSITY_COLORSCALE,
            colorbar=dict(title="log₁₀|u|²" if log_scale else "|u|²"),
            hovertemplate="x=%{x:.3f}<br>y=%{y:.3f}<br>value=%{z:.4g}<extra></extra>",
        ))
        fig.update_layout(
            title=self._title(title),
            xaxis=dict(title="x", scaleanchor="y"),
            yaxis=dict(title="y"),
            width=self.width,
            height=self.height,
            plot_bgcolor="#FFFFFF",
            paper_bgcolor="#F8F9FA",
            font=self.FONT,
        )
        return fig

    def observables_figure(self, series: ObservableSeries, title: str = "Observables") -> go.Figure:
        """Stacked time series of the main observables"""
        panels = self.OBSERVABLE_PANELS
        fig = make_subplots(
            rows=len(panels),
            cols=1,
            shared_xaxes=True,
            subplot_titles=[label for _, label in panels],
            vertical_spacing=0.04,
        )
        if len(series) == 0:
            fig.add_annotation(
                text="No data available",
                xref="paper", yref="paper",
                x=0.5, y=0.5,
                showarrow=False,
                font=dict(size=20, color="gray"),
            )
        else:
            times = series.times
            for row, (column, label) in enumerate(panels, start=1):
                fig.add_trace(
                    go.Scatter(x=times, y=series.column(column), mode="lines+markers", name=label, showlegend=False),
                    row=row,
                    col=1,
                )
        fig.update_xaxes(title_text="t", row=len(panels), col=1)
        fig.update_layout(
            title=self._title(title),
            width=self.width,
            height=max(self.height, 220 * len(panels)),
            margin=dict(t=80, l=60, r=20, b=40),
            plot_bgcolor="#FFFFFF",
            paper_bgcolor="#F8F9FA",
            font=self.FONT,
        )
        return fig


# Convenience functions
def build_intensity_heatmap(u: Field, title: str = "Intensity |u|²", log_scale: bool = False) -> go.Figure:
    return FieldFigureBuilder().intensity_heatmap(u, title=title, log_scale=log_scale)


def build_observables_figure(series: ObservableSeries, title: str = "Observables") -> go.Figure:
    return FieldFigureBuilder().observables_figure(series, title=title)


def write_figures_html(figures: List[go.Figure], path, title: Optional[str] = None) -> Path:
    """Write one or more figures into a single standalone HTML page"""
    path = Path(path)
    parts = []
    for i, fig in enumerate(figures):
        parts.append(fig.to_html(full_html=False, include_plotlyjs="cdn" if i == 0 else False))
    heading = f"<h1>{title}</h1>" if title else ""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(f"<html><head><meta charset='utf-8'></head><body>{heading}{''.join(parts)}</body></html>", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path
