"""
Tests for src/wnls/calculations/diagnostics.py - trajectory monitors

Test Coverage:
- record_observables() / ObservableSeries layout and CSV output
- localized_mass_monitor() at t = 0 and along a free run
- concentration_monitor() on zero and subcritical data
- scattering_diagnostic() on zero and exactly free runs
- strichartz_ratio() plane-wave closed form and invariances
- strichartz_probe() determinism and reseeding stability

Run with:
    pytest tests/test_diagnostics.py -v
"""

import numpy as np
import pandas as pd
import pytest

from wnls.calculations.diagnostics import (
    ObservableSeries,
    ball_mass,
    concentration_monitor,
    localization_cutoff,
    localized_mass_monitor,
    record_observables,
    scattering_diagnostic,
    strichartz_probe,
    strichartz_ratio,
)
from wnls.calculations.errors import ParameterError
from wnls.calculations.evolve import EvolveConfig, integrate
from wnls.calculations.functionals import hamiltonian
from wnls.calculations.grid import Field, make_grid, make_singular_weight
from wnls.calculations.nonlinearity import PhysParams
from wnls.calculations.profiles import gaussian, plane_wave
from wnls.data.exports import write_observables_csv


class TestObservableSeries:
    """Series construction and CSV"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)
        self.u0 = gaussian(self.grid, 0.3)
        cfg = EvolveConfig(dt=1e-3, t_final=0.02, snapshot_stride=5)
        self.snapshots = integrate(self.u0, cfg, self.w, self.p)

    def test_columns_and_rows(self):
        series = record_observables(self.snapshots, self.u0, self.w, self.p)
        assert list(series.frame.columns) == ObservableSeries.COLUMNS
        assert len(series) == len(self.snapshots) == 5
        assert np.isnan(series.column("scattering_cauchy")[0])
        assert np.all(series.column("scattering_cauchy")[1:] >= 0)

    def test_energy_columns_match_report(self):
        series = record_observables(self.snapshots, self.u0, self.w, self.p)
        report = hamiltonian(self.u0, self.w, self.p)
        first = series.frame.iloc[0]
        assert first["hamiltonian"] == pytest.approx(report.hamiltonian, rel=1e-14)
        assert first["grad_l2"] ** 2 == pytest.approx(report.kinetic, rel=1e-12)

    def test_csv_round_trip(self, tmp_path):
        series = record_observables(self.snapshots, self.u0, self.w, self.p)
        path = write_observables_csv(series, tmp_path / "out" / "observables.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ObservableSeries.COLUMNS
        assert len(frame) == 5

    def test_rejects_non_increasing_times(self):
        frame = pd.DataFrame([[0.0] * len(ObservableSeries.COLUMNS)] * 2, columns=ObservableSeries.COLUMNS)
        with pytest.raises(ParameterError):
            ObservableSeries(frame=frame, S=2.0, Sp=4.0)

    def test_rejects_missing_columns(self):
        with pytest.raises(ParameterError):
            ObservableSeries(frame=pd.DataFrame({"time": [0.0]}), S=2.0, Sp=4.0)

    def test_zero_data(self):
        zero = Field.zeros(self.grid)
        snapshots = integrate(zero, EvolveConfig(dt=1e-3, t_final=0.003, snapshot_stride=1), self.w, self.p)
        series = record_observables(snapshots, zero, self.w, self.p)
        for column in ("mass", "hamiltonian", "linf", "grad_l2", "quartic_weighted", "holder_half", "localized_mass"):
            assert np.all(series.column(column) == 0.0), column
        assert np.all(series.column("scattering_cauchy")[1:] == 0.0)


class TestLocalizedMass:
    """∫_{B(S+S')}|u(t)|² >= ∫_{B(S)}|u0|² - 2E t/S'"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)

    def test_cutoff_shape(self):
        psi = localization_cutoff(self.grid, 2.0, 4.0)
        r = self.grid.radius()
        assert np.all(psi[r <= 2.0] == 1.0)
        assert np.all(psi[r >= 6.0] == 0.0)
        assert np.all((psi >= 0) & (psi <= 1))

    def test_initial_time(self):
        u0 = gaussian(self.grid, 0.5, 1.5, (1.0, 0.0))
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.001), self.w, self.p)
        series = record_observables(snapshots[:1], u0, self.w, self.p, S=1.0, Sp=1.0)
        report = localized_mass_monitor(series, u0, 1.0, 1.0, E=1.0)
        assert report.ok
        assert ball_mass(u0, 2.0) >= report.initial_ball_mass

    def test_free_gaussian(self):
        """Free evolution, S = 2, S' = 4, T = 1: no violations"""
        print("\n🧪 Localized mass along a free run")
        u0 = gaussian(self.grid, 0.5)
        free = self.w.scaled(0.0)
        snapshots = integrate(u0, EvolveConfig(dt=1e-2, t_final=1.0, snapshot_stride=10), free, self.p)
        series = record_observables(snapshots, u0, self.w, self.p, S=2.0, Sp=4.0)
        report_h = hamiltonian(u0, self.w, self.p)
        E = report_h.hamiltonian + report_h.mass
        report = localized_mass_monitor(series, u0, 2.0, 4.0, E)
        assert report.ok, report.violations

    def test_radii_must_match_series(self):
        u0 = gaussian(self.grid, 0.5)
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.001), self.w, self.p)
        series = record_observables(snapshots, u0, self.w, self.p, S=2.0, Sp=4.0)
        with pytest.raises(ParameterError):
            localized_mass_monitor(series, u0, 1.0, 4.0, E=1.0)


class TestConcentration:
    """sup ‖∇u‖, min ∫ω|u|⁴, coupled bound"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)

    def test_zero_data(self):
        zero = Field.zeros(self.grid)
        snapshots = integrate(zero, EvolveConfig(dt=1e-3, t_final=0.002, snapshot_stride=1), self.w, self.p)
        report = concentration_monitor(record_observables(snapshots, zero, self.w, self.p))
        assert report.sup_grad == 0.0
        assert report.min_quartic == 0.0
        assert report.coupled_bound_ok

    def test_subcritical(self):
        u0 = gaussian(self.grid, 0.3)
        H0 = hamiltonian(u0, self.w, self.p).hamiltonian
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.1, snapshot_stride=10), self.w, self.p)
        report = concentration_monitor(record_observables(snapshots, u0, self.w, self.p))
        assert report.sup_grad <= np.sqrt(H0) + 1e-6
        assert report.coupled_bound_ok
        assert report.min_quartic > 0


class TestScattering:
    """Pullback Cauchy differences"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)

    def test_zero_data(self):
        zero = Field.zeros(self.grid)
        snapshots = integrate(zero, EvolveConfig(dt=1e-2, t_final=0.05, snapshot_stride=1), self.w, self.p)
        assert scattering_diagnostic(snapshots).cauchy_sequence == [0.0] * 5

    def test_free_run_has_constant_pullback(self):
        u0 = gaussian(self.grid, 0.5, 1.0, (0.5, 0.5))
        snapshots = integrate(u0, EvolveConfig(dt=1e-2, t_final=0.5, snapshot_stride=5), self.w.scaled(0.0), self.p)
        report = scattering_diagnostic(snapshots)
        assert len(report.cauchy_sequence) == len(snapshots) - 1
        assert max(report.cauchy_sequence) <= 1e-12

    def test_decreasing_after(self):
        from wnls.calculations.diagnostics import ScatteringReport

        report = ScatteringReport(times=[0.0, 1.0, 2.0, 3.0, 4.0], cauchy_sequence=[0.1, 0.3, 0.2, 0.1])
        assert report.decreasing_after(1.5)
        assert not report.decreasing_after(0.5)


class TestStrichartz:
    """‖e^{itΔ}u0‖_{L⁴W^{1,4}} / ‖u0‖_{H¹}"""

    def test_zero_ratio(self):
        assert strichartz_ratio(Field.zeros(make_grid(16, 2.0)), 1.0) == 0.0

    def test_plane_wave_closed_form(self):
        """|v| = 1: ratio = T^{1/4} area^{1/4}(1 + |kx| + |ky|) / √(area(1 + |k|²))"""
        grid = make_grid(32, np.pi)
        T = 1.0
        area = grid.area
        expected = T ** 0.25 * area ** 0.25 * (1 + 1 + 2) / np.sqrt(area * (1 + 1 + 4))
        assert strichartz_ratio(plane_wave(grid, 1, 2), T) == pytest.approx(expected, rel=1e-6)

    def test_invariances(self):
        grid = make_grid(64, 8.0)
        u = gaussian(grid, 1.0, 0.8, (0.5, -0.5))
        base = strichartz_ratio(u, 0.5)
        assert strichartz_ratio(u.scaled(np.exp(2.1j)), 0.5) == pytest.approx(base, rel=1e-10)
        assert strichartz_ratio(u.shifted(3, 5), 0.5) == pytest.approx(base, rel=1e-10)

    def test_probe_is_deterministic(self):
        grid = make_grid(32, 4.0)
        a = strichartz_probe(3, grid, 0.5, seed=7)
        b = strichartz_probe(3, grid, 0.5, seed=7)
        assert a.ratios == b.ratios
        assert a.max_ratio == max(a.ratios)

    def test_reseeding_stability(self):
        """32 samples, T = 1, n = 128: max ratio stable within 5% across seeds"""
        print("\n🧪 Strichartz ensemble under two seeds")
        grid = make_grid(128, 10.0)
        first = strichartz_probe(32, grid, 1.0, seed=1)
        second = strichartz_probe(32, grid, 1.0, seed=2)
        assert np.isfinite(first.max_ratio) and first.max_ratio > 0
        assert second.max_ratio == pytest.approx(first.max_ratio, rel=0.05)

    def test_rejects_parameters(self):
        grid = make_grid(16, 2.0)
        with pytest.raises(ParameterError):
            strichartz_probe(0, grid, 1.0)
        with pytest.raises(ParameterError):
            strichartz_probe(2, grid, 0.0)
