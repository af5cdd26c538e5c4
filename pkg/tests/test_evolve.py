"""
Tests for src/wnls/calculations/evolve.py - time integration

Test Coverage:
- EvolveConfig validation
- linear_propagator(): identity, plane waves, group property, free Gaussian
- nonlinear_substep(): modulus preservation and the exact phase
- strang_step(): mass, consistency, degeneration to the free flow, gauge covariance
- picard_solve(): gate, zero data, contraction, cross-check against Strang
- b outside (0, 1) rejected by the substep, the Strang step and the Picard oracle
- integrate(): snapshots, exact end time, warnings and blow-up abort

Run with:
    pytest tests/test_evolve.py -v
"""

import logging

import numpy as np
import pytest

from wnls.calculations.errors import EvolutionError, ParameterError, SmallnessGateError
from wnls.calculations.evolve import (
    EvolveConfig,
    Integrator,
    TrajectoryState,
    integrate,
    linear_propagator,
    nonlinear_substep,
    picard_solve,
    strang_step,
)
from wnls.calculations.functionals import find_critical_amplitude, mass
from wnls.calculations.grid import Field, SingularWeight, gradient_l2, l2_norm, make_grid, make_singular_weight
from wnls.calculations.nonlinearity import PhysParams
from wnls.calculations.profiles import gaussian, plane_wave
from wnls.config import thresholds


def h1_distance(a: Field, b: Field) -> float:
    diff = a - b
    return float(np.sqrt(l2_norm(diff) ** 2 + gradient_l2(diff) ** 2))


class TestEvolveConfig:
    """Validation of the stepping configuration"""

    def test_defaults(self):
        cfg = EvolveConfig()
        assert cfg.integrator is Integrator.STRANG
        assert cfg.n_steps == 1000

    def test_integrator_from_string(self):
        assert EvolveConfig(integrator="picard").integrator is Integrator.PICARD

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"dt": 0.0},
            {"dt": -1e-3},
            {"dt": 1e-2, "t_final": 1e-3},
            {"picard_iters": 1},
            {"snapshot_stride": 0},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ParameterError):
            EvolveConfig(**kwargs)

    def test_step_count_rounds_up(self):
        assert EvolveConfig(dt=1e-3, t_final=0.01).n_steps == 10
        assert EvolveConfig(dt=0.3, t_final=1.0).n_steps == 4


class TestLinearPropagator:
    """e^{itΔ}"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.u = gaussian(self.grid, 1.0, 1.0, (0.5, -0.25)).scaled(np.exp(0.3j))

    def test_identity_at_zero(self):
        assert linear_propagator(self.u, 0.0) is self.u

    def test_plane_wave_eigenfunction(self):
        grid = make_grid(32, np.pi)
        wave = plane_wave(grid, 2, -3)
        evolved = linear_propagator(wave, 0.7)
        expected = np.exp(-1j * 13 * 0.7) * wave.values
        assert np.max(np.abs(evolved.values - expected)) < 1e-12

    def test_group_property(self):
        left = linear_propagator(linear_propagator(self.u, 0.3), 0.45)
        right = linear_propagator(self.u, 0.75)
        assert l2_norm(left - right) <= 1e-12 * l2_norm(self.u)

    def test_reversibility(self):
        back = linear_propagator(linear_propagator(self.u, 1.3), -1.3)
        assert l2_norm(back - self.u) <= 1e-12 * l2_norm(self.u)

    def test_mass_preserved(self):
        assert mass(linear_propagator(self.u, 2.0)) == pytest.approx(mass(self.u), rel=1e-13)

    def test_free_gaussian_law(self):
        """A e^{-|x|²/2} evolves to A/(1+2it) exp(-|x|²/(2(1+2it)))"""
        print("\n🧪 Free Gaussian spreading")
        grid = make_grid(128, 10.0)
        X, Y = grid.mesh()
        A = 0.8
        u0 = gaussian(grid, A)
        peaks = []
        for t in (0.1, 0.25, 0.5):
            z = 1.0 + 2.0j * t
            exact = A / z * np.exp(-(X ** 2 + Y ** 2) / (2.0 * z))
            evolved = linear_propagator(u0, t)
            assert np.max(np.abs(evolved.values - exact)) < 1e-8, f"t={t}"
            peaks.append(np.max(np.abs(evolved.values)))
            assert peaks[-1] == pytest.approx(A / np.sqrt(1 + 4 * t * t), rel=1e-8)
        assert peaks[0] > peaks[1] > peaks[2]


class TestNonlinearSubstep:
    """Exact pointwise phase rotation"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)

    def test_modulus_preserved(self):
        u = gaussian(self.grid, 0.6, 1.0, (1.0, 0.5))
        out = nonlinear_substep(u, self.w, self.p, 0.37)
        np.testing.assert_allclose(np.abs(out.values), np.abs(u.values), rtol=1e-14, atol=1e-300)

    def test_zero_fixed(self):
        out = nonlinear_substep(Field.zeros(self.grid), self.w, self.p, 1.0)
        assert np.all(out.values == 0)

    def test_sign_flip(self):
        """ω = 1, |u|² = ln2/α, t = π: phase -π"""
        grid = make_grid(8, 4.0)
        unit = SingularWeight(grid, 0.5, np.ones((8, 8)))
        values = np.zeros((8, 8), dtype=complex)
        values[3, 5] = np.sqrt(np.log(2.0) / self.p.alpha) * np.exp(0.4j)
        out = nonlinear_substep(Field(grid, values), unit, self.p, np.pi)
        assert abs(out.values[3, 5] + values[3, 5]) < 1e-12


class TestStrangStep:
    """Half linear, full nonlinear, half linear"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)
        self.cfg = EvolveConfig(dt=1e-3, t_final=0.1)
        self.u0 = gaussian(self.grid, 0.4)

    def test_mass_per_step(self):
        state = TrajectoryState(0.0, self.u0)
        before = mass(self.u0)
        for _ in range(20):
            state = strang_step(state, self.cfg, self.w, self.p)
            assert mass(state.u) == pytest.approx(before, rel=1e-13)
        assert state.step_index == 20
        assert state.t == pytest.approx(0.02)

    def test_consistency(self):
        """One step moves the state by O(dt)"""
        state = TrajectoryState(0.0, self.u0)
        moves = [l2_norm(strang_step(state, self.cfg, self.w, self.p, dt=dt).u - self.u0) for dt in (1e-3, 5e-4)]
        assert moves[0] / moves[1] == pytest.approx(2.0, rel=0.2)

    def test_free_limit(self):
        """With ω scaled to 0, N steps equal the free flow over N·dt"""
        free = self.w.scaled(0.0)
        state = TrajectoryState(0.0, self.u0)
        for _ in range(50):
            state = strang_step(state, self.cfg, free, self.p)
        reference = linear_propagator(self.u0, 50 * self.cfg.dt)
        assert l2_norm(state.u - reference) <= 1e-12 * l2_norm(self.u0)

    def test_gauge_covariance(self):
        theta = 1.1
        a = TrajectoryState(0.0, self.u0)
        b = TrajectoryState(0.0, self.u0.scaled(np.exp(1j * theta)))
        for _ in range(10):
            a = strang_step(a, self.cfg, self.w, self.p)
            b = strang_step(b, self.cfg, self.w, self.p)
        assert l2_norm(b.u - a.u.scaled(np.exp(1j * theta))) <= 1e-12 * l2_norm(self.u0)


class TestPicard:
    """Duhamel fixed-point oracle"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)
        self.cfg = EvolveConfig(dt=1e-3, t_final=0.02)

    def test_zero_data(self):
        result = picard_solve(Field.zeros(self.grid), 0.02, self.cfg, self.w, self.p)
        assert result.contraction_ratios == [0.0] * (self.cfg.picard_iters - 1)
        assert np.all(result.u_T.values == 0)

    def test_smallness_gate(self):
        """‖∇u0‖ = √π for the unit Gaussian"""
        with pytest.raises(SmallnessGateError):
            picard_solve(gaussian(self.grid, 1.0), 0.02, self.cfg, self.w, self.p)

    def test_window_limit(self):
        with pytest.raises(ParameterError):
            picard_solve(gaussian(self.grid, 0.1), 0.1, self.cfg, self.w, self.p)

    def test_small_gaussian_contracts(self):
        """Ratios stay below 1/2 and decrease from one iteration to the next"""
        result = picard_solve(gaussian(self.grid, 0.1), 0.02, self.cfg, self.w, self.p)
        ratios = result.contraction_ratios
        assert ratios, "expected at least two iterations"
        assert all(r < 0.5 for r in ratios), ratios
        assert all(b < a for a, b in zip(ratios, ratios[1:])), ratios
        assert result.differences[0] > result.differences[-1]

    def test_agrees_with_strang(self):
        """Endpoints at T = 0.02, dt = 1e-4 agree in H¹"""
        print("\n🧪 Picard vs Strang cross-check")
        u0 = gaussian(self.grid, 0.1)
        cfg = EvolveConfig(dt=1e-4, t_final=0.02, snapshot_stride=1000)
        picard = picard_solve(u0, 0.02, cfg, self.w, self.p)
        strang = integrate(u0, cfg, self.w, self.p)[-1]
        assert strang.t == 0.02
        assert h1_distance(picard.u_T, strang.u) <= 5e-6

    def test_picard_integrator(self):
        """integrate() with the Picard stepper tracks the Strang run"""
        u0 = gaussian(self.grid, 0.1)
        strang = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.01), self.w, self.p)[-1]
        picard = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.01, integrator="picard"), self.w, self.p)[-1]
        assert h1_distance(picard.u, strang.u) <= 1e-5


class TestPdeRange:
    """Every evolution entry point rejects b outside (0, 1)"""

    def setup_method(self):
        self.grid = make_grid(16, 2.0)
        self.w = make_singular_weight(self.grid, 1.5)
        self.p = PhysParams(1.5)
        self.cfg = EvolveConfig(dt=1e-3, t_final=0.01)
        self.u0 = gaussian(self.grid, 0.1)

    def test_nonlinear_substep(self):
        with pytest.raises(ParameterError, match="PDE range"):
            nonlinear_substep(self.u0, self.w, self.p, 1e-3)

    def test_strang_step(self):
        with pytest.raises(ParameterError, match="PDE range"):
            strang_step(TrajectoryState(0.0, self.u0), self.cfg, self.w, self.p)

    def test_picard_solve(self):
        with pytest.raises(ParameterError, match="PDE range"):
            picard_solve(self.u0, 0.01, self.cfg, self.w, self.p)


class TestIntegrate:
    """Trajectory driver"""

    def setup_method(self):
        self.grid = make_grid(64, 8.0)
        self.p = PhysParams(0.5)
        self.w = make_singular_weight(self.grid, 0.5)

    def test_snapshot_schedule(self):
        seen = []
        cfg = EvolveConfig(dt=1e-3, t_final=0.01, snapshot_stride=5)
        snapshots = integrate(gaussian(self.grid, 0.3), cfg, self.w, self.p, observer=seen.append)
        assert [s.step_index for s in snapshots] == [0, 5, 10]
        assert snapshots[-1].t == 0.01
        assert len(seen) == 3

    def test_short_last_step(self):
        cfg = EvolveConfig(dt=0.003, t_final=0.01, snapshot_stride=100)
        snapshots = integrate(gaussian(self.grid, 0.3), cfg, self.w, self.p)
        assert [s.step_index for s in snapshots] == [0, 4]
        assert snapshots[-1].t == 0.01

    def test_mass_drift(self):
        u0 = gaussian(self.grid, 0.4)
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.2, snapshot_stride=50), self.w, self.p)
        m0 = mass(u0)
        assert all(abs(mass(s.u) - m0) <= 1e-10 * m0 for s in snapshots)

    def test_rejects_b_outside_pde_range(self):
        w = make_singular_weight(self.grid, 1.5)
        with pytest.raises(ParameterError, match="PDE range"):
            integrate(gaussian(self.grid, 0.1), EvolveConfig(dt=1e-3, t_final=0.01), w, PhysParams(1.5))

    def test_supercritical_warning(self, caplog):
        profile = gaussian(self.grid, 1.0)
        A_star = find_critical_amplitude(profile, self.w, self.p)
        with caplog.at_level(logging.WARNING):
            integrate(profile.scaled(1.01 * A_star), EvolveConfig(dt=1e-3, t_final=0.005), self.w, self.p)
        assert "Supercritical data accepted" in caplog.text

    def test_blowup_aborts(self, monkeypatch):
        """A gradient above the blow-up threshold ends the run with EvolutionError"""
        monkeypatch.setattr(thresholds, "BLOWUP_GRADIENT", 0.5)
        with pytest.raises(EvolutionError, match="blow-up threshold"):
            integrate(gaussian(self.grid, 1.0), EvolveConfig(dt=1e-3, t_final=0.01), self.w, self.p)

    def test_subcritical_gradient_bound(self):
        """H(u0) <= 1 keeps ‖∇u(t)‖ <= 1 along the run"""
        profile = gaussian(self.grid, 1.0)
        u0 = profile.scaled(0.95 * find_critical_amplitude(profile, self.w, self.p))
        snapshots = integrate(u0, EvolveConfig(dt=1e-3, t_final=0.2, snapshot_stride=10), self.w, self.p)
        assert max(gradient_l2(s.u) for s in snapshots) <= 1.0 + 1e-6

    def test_continuous_dependence(self):
        """Data 1e-10 apart in H¹ stay within 1e-6 over T = 1"""
        u0 = gaussian(self.grid, 0.3)
        bump = gaussian(self.grid, 1.0, 1.0, (1.0, 1.0))
        bump = bump.scaled(1e-10 / np.sqrt(l2_norm(bump) ** 2 + gradient_l2(bump) ** 2))
        cfg = EvolveConfig(dt=2e-3, t_final=1.0, snapshot_stride=100)
        a = integrate(u0, cfg, self.w, self.p)
        b = integrate(u0 + bump, cfg, self.w, self.p)
        assert max(h1_distance(x.u, y.u) for x, y in zip(a, b)) <= 1e-6
