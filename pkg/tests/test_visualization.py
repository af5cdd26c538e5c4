"""
Tests for src/wnls/visualization/field_plots.py

Test Coverage:
- Intensity heatmap orientation and log scale
- Observables figure panels, including the empty series
- Standalone HTML output

Run with:
    pytest tests/test_visualization.py -v
"""

import numpy as np
import pandas as pd
import pytest

from wnls.calculations.diagnostics import ObservableSeries, record_observables
from wnls.calculations.errors import OutputError
from wnls.calculations.evolve import EvolveConfig, integrate
from wnls.calculations.grid import Field, make_grid, make_singular_weight
from wnls.calculations.nonlinearity import PhysParams
from wnls.calculations.profiles import gaussian
from wnls.visualization.field_plots import (
    FieldFigureBuilder,
    build_intensity_heatmap,
    build_observables_figure,
    write_figures_html,
)


class TestIntensityHeatmap:
    def setup_method(self):
        self.grid = make_grid(16, 2.0)
        self.u = gaussian(self.grid, 1.0, 0.5, (1.0, 0.0))

    def test_orientation(self):
        """z is indexed (y, x): the bump at x = 1 sits in column i = 12"""
        fig = build_intensity_heatmap(self.u)
        z = np.asarray(fig.data[0].z)
        assert z.shape == (16, 16)
        row, col = np.unravel_index(np.argmax(z), z.shape)
        assert (row, col) == (8, 12)

    def test_log_scale_floor(self):
        fig = build_intensity_heatmap(Field.zeros(self.grid), log_scale=True)
        np.testing.assert_allclose(np.asarray(fig.data[0].z, dtype=float), -16.0, rtol=1e-12)

    def test_title(self):
        fig = build_intensity_heatmap(self.u, title="snapshot")
        assert fig.layout.title.text == "snapshot"


class TestObservablesFigure:
    def test_six_panels(self):
        grid = make_grid(32, 4.0)
        p = PhysParams(0.5)
        w = make_singular_weight(grid, 0.5)
        u0 = gaussian(grid, 0.3)
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.003, snapshot_stride=1), w, p)
        fig = build_observables_figure(record_observables(snapshots, u0, w, p))
        assert len(fig.data) == len(FieldFigureBuilder.OBSERVABLE_PANELS) == 6
        assert all(len(trace.x) == 4 for trace in fig.data)

    def test_empty_series(self):
        empty = ObservableSeries(frame=pd.DataFrame(columns=ObservableSeries.COLUMNS), S=2.0, Sp=4.0)
        fig = build_observables_figure(empty)
        assert len(fig.data) == 0
        assert any(a.text == "No data available" for a in fig.layout.annotations)


class TestHtmlOutput:
    def test_write(self, tmp_path):
        u = gaussian(make_grid(16, 2.0))
        path = write_figures_html(
            [build_intensity_heatmap(u), build_intensity_heatmap(u, "again")],
            tmp_path / "figs" / "report.html",
            title="Report",
        )
        html = path.read_text(encoding="utf-8")
        assert "<h1>Report</h1>" in html
        assert html.count("cdn.plot.ly") == 1

    def test_unwritable_target(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        with pytest.raises(OutputError):
            write_figures_html([build_intensity_heatmap(gaussian(make_grid(16, 2.0)))], blocker / "report.html")
