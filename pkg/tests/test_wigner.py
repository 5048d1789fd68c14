import math

import numpy as np
import pytest

from _oracles import free_gaussian_sigma_x, rotated_gaussian_moments
from suvlab.errors import (CflViolationError, GridTooSmallWarning,
                           InvalidStateError, NormalizationError,
                           UnsupportedPotentialError)
from suvlab.wigner import (CrystalParams, PhaseGrid, WignerField, cfl_timestep,
                           compute_wigner, evolve_wigner, gaussian_wigner,
                           limit_experiment, localization_widths, marginals,
                           phase_space_moments, quantum_correction, wigner_mass)


def gaussian_psi(x, center, sigma_x, p_mean=0.0, hbar=1.0):
    envelope = (2 * math.pi * sigma_x**2) ** (-0.25) * np.exp(
        -((x - center) ** 2) / (4 * sigma_x**2))
    return envelope * np.exp(1j * p_mean * x / hbar)


class TestGrid:
    def test_minimum_size_enforced(self):
        with pytest.raises(ValueError):
            PhaseGrid(-1, 1, 8, -1, 1, 64)

    def test_bounds_must_be_ordered(self):
        with pytest.raises(ValueError):
            PhaseGrid(1, -1, 64, -1, 1, 64)

    def test_conjugate_grid_momentum_span(self):
        g = PhaseGrid.conjugate(-8.0, 8.0, 128, 128, hbar=1.0)
        assert g.p_max - g.p_min == pytest.approx(math.pi / g.dx)


class TestComputeWigner:
    def setup_method(self):
        self.grid = PhaseGrid.conjugate(-10.0, 10.0, 256, 256, hbar=1.0)
        self.psi = gaussian_psi(self.grid.x, 0.4, 1.0, p_mean=-0.3)
        self.psi /= math.sqrt(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)
        self.field = compute_wigner(self.psi, self.grid, hbar=1.0)

    def test_matches_analytic_gaussian_transform(self):
        sp = 1.0 / (2 * 1.0)
        x = self.grid.x[:, None]
        p = self.grid.p[None, :]
        analytic = np.exp(-((x - 0.4) ** 2) / 2.0 - (p + 0.3) ** 2 / (2 * sp**2))
        analytic /= math.pi
        assert np.max(np.abs(self.field.values - analytic)) < 1e-8
        # Gaussian transforms are non-negative up to quadrature rounding
        assert self.field.values.min() > -1e-10

    def test_total_mass_is_unit(self):
        assert wigner_mass(self.field) == pytest.approx(1.0, abs=1e-6)

    def test_position_marginal_reproduces_density(self):
        m = marginals(self.field)
        assert np.max(np.abs(m.position - np.abs(self.psi) ** 2)) < 1e-6
        assert m.imag_residual == 0.0

    def test_unnormalized_input_rejected(self):
        with pytest.raises(NormalizationError):
            compute_wigner(self.psi * 1.01, self.grid)


class TestGaussianWigner:
    def test_matches_transform_of_minimum_uncertainty_state(self):
        grid = PhaseGrid.conjugate(-10.0, 10.0, 256, 256, hbar=1.0)
        sigma_x = 0.8
        sigma_p = 1.0 / (2 * sigma_x)
        psi = gaussian_psi(grid.x, 0.0, sigma_x)
        psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
        direct = gaussian_wigner(0.0, 0.0, sigma_x, sigma_p, grid)
        transformed = compute_wigner(psi, grid)
        assert np.max(np.abs(direct.values - transformed.values)) < 1e-8

    def test_second_moments_match_widths(self):
        grid = PhaseGrid(-8, 8, 128, -8, 8, 128)
        field = gaussian_wigner(0.5, -0.25, 1.2, 0.9, grid)
        m = phase_space_moments(field)
        assert m.x_mean == pytest.approx(0.5, abs=1e-8)
        assert m.p_mean == pytest.approx(-0.25, abs=1e-8)
        assert m.sigma_x == pytest.approx(1.2, abs=1e-6)
        assert m.sigma_p == pytest.approx(0.9, abs=1e-6)

    def test_mean_translation_shifts_peak(self):
        grid = PhaseGrid(-8, 8, 161, -8, 8, 64)
        dx = grid.dx
        a = gaussian_wigner(0.0, 0.0, 1.0, 0.8, grid)
        b = gaussian_wigner(3 * dx, 0.0, 1.0, 0.8, grid)
        ia = np.unravel_index(np.argmax(a.values), a.values.shape)
        ib = np.unravel_index(np.argmax(b.values), b.values.shape)
        assert ib[0] - ia[0] == 3 and ib[1] == ia[1]
        assert np.allclose(np.roll(a.values, 3, axis=0)[3:, :], b.values[3:, :],
                           atol=1e-12)

    def test_sub_heisenberg_widths_rejected(self):
        grid = PhaseGrid(-8, 8, 64, -8, 8, 64)
        with pytest.raises(InvalidStateError):
            gaussian_wigner(0.0, 0.0, 0.5, 0.5, grid, hbar=1.0)


class TestQuantumCorrection:
    def test_quadratic_potential_gives_exact_zero(self):
        grid = PhaseGrid(-4, 4, 32, -4, 4, 32)
        field = gaussian_wigner(0.3, 0.0, 1.0, 1.0, grid)
        out = quantum_correction(2.5, field)
        assert out.shape == field.values.shape
        assert np.all(out == 0.0)

    def test_zero_potential_and_zero_field(self):
        grid = PhaseGrid(-4, 4, 32, -4, 4, 32)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        assert np.all(quantum_correction(0.0, field) == 0.0)
        empty = WignerField(grid=grid, values=np.zeros((32, 32)))
        assert np.all(quantum_correction([0.0, 0.0, 1.0], empty) == 0.0)

    def test_cubic_potential_rejected(self):
        grid = PhaseGrid(-4, 4, 32, -4, 4, 32)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        with pytest.raises(UnsupportedPotentialError):
            quantum_correction([0.0, 0.0, 1.0, 0.5], field)


class TestEvolveFree:
    def test_gaussian_spreading_matches_ballistic_law(self):
        grid = PhaseGrid(-4.8, 4.8, 256, -4.5, 4.5, 256)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        m0 = phase_space_moments(field)
        t_star = 1.0 * m0.sigma_x / m0.sigma_p
        dt = cfl_timestep(grid, params)
        steps = int(math.ceil(t_star / dt))
        out = evolve_wigner(field, params, t_star / steps, steps)
        sx = phase_space_moments(out).sigma_x
        expected = free_gaussian_sigma_x(m0.sigma_x, m0.sigma_p, 1.0, t_star)
        assert sx**2 == pytest.approx(expected**2, rel=0.01)

    def test_localized_bump_advects_at_momentum_speed(self):
        grid = PhaseGrid(-6, 6, 192, -4, 4, 64)
        values = np.zeros((192, 64))
        ix, ik = 60, 48  # x ~ -2.23, p ~ +2.03
        values[ix, ik] = 1.0
        field = WignerField(grid=grid, values=values)
        p1 = grid.p[ik]
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        dt = cfl_timestep(grid, params)
        t_end = 1.0
        steps = int(round(t_end / dt))
        out = evolve_wigner(field, params, dt, steps)
        m = phase_space_moments(out)
        assert m.x_mean - grid.x[ix] == pytest.approx(p1 * steps * dt, rel=0.05)
        assert m.p_mean == pytest.approx(p1, abs=1e-9)

    def test_outflow_warns_when_grid_too_small(self):
        grid = PhaseGrid(-3, 3, 64, -4, 4, 64)
        field = gaussian_wigner(1.5, 2.0, 0.5, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        dt = cfl_timestep(grid, params)
        with pytest.warns(GridTooSmallWarning):
            evolve_wigner(field, params, dt, 30)

    def test_momentum_marginal_invariant_without_force(self):
        # momentum support ends well inside the grid, so no slice can reach
        # the x boundary over the run and each fixed-p mass is conserved
        grid = PhaseGrid(-12, 12, 128, -4, 4, 128)
        field = gaussian_wigner(0.0, 0.0, 1.0, 0.8, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        dt = cfl_timestep(grid, params)
        out = evolve_wigner(field, params, dt, 50)
        before = marginals(field).momentum
        after = marginals(out).momentum
        assert np.max(np.abs(after - before)) < 1e-6

    def test_mass_conserved_over_long_free_run(self):
        # wide momentum margin keeps the bulk far from the outflow edge
        grid = PhaseGrid(-16, 16, 256, -40, 40, 256)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        dt = cfl_timestep(grid, params)
        out = evolve_wigner(field, params, dt, 1000)
        assert wigner_mass(out) == pytest.approx(wigner_mass(field), abs=1e-4)

    def test_grid_refinement_halves_width_error(self):
        errors = {}
        for n in (128, 256):
            grid = PhaseGrid(-5.0, 5.0, n, -4.0, 4.0, n)
            field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
            params = CrystalParams(m_tot=1.0, epsilon=0.0)
            m0 = phase_space_moments(field)
            dt = cfl_timestep(grid, params)
            steps = int(math.ceil(1.0 / dt))
            out = evolve_wigner(field, params, 1.0 / steps, steps)
            expected = free_gaussian_sigma_x(m0.sigma_x, m0.sigma_p, 1.0, 1.0)
            errors[n] = abs(phase_space_moments(out).sigma_x**2 - expected**2)
        assert errors[128] / errors[256] >= 2.0

    def test_cfl_violation_rejected_before_stepping(self):
        grid = PhaseGrid(-8, 8, 64, -8, 8, 64)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        with pytest.raises(CflViolationError):
            evolve_wigner(field, params, 10.0 * cfl_timestep(grid, params), 5)


class TestEvolveWithForce:
    def test_second_moment_contracts_toward_center(self):
        # strong effective force, run shorter than a quarter period:
        # the x second moment about x0 decreases monotonically
        grid = PhaseGrid(-6, 8, 192, -24, 24, 192)
        x0 = 0.5
        field = gaussian_wigner(x0 - 0.8, 0.0, 1.0, 0.75, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.5, n_order=16.0, x0=x0)
        omega = math.sqrt(2 * params.epsilon * params.n_order / params.m_tot)
        quarter = 0.5 * math.pi / omega
        dt = cfl_timestep(grid, params)
        steps_per = max(1, int(round(quarter / 8 / dt)))
        second = []
        f = field
        for _ in range(8):
            f = evolve_wigner(f, params, dt, steps_per)
            m = phase_space_moments(f)
            second.append((m.x_mean - x0) ** 2 + m.sigma_x**2)
        assert all(b < a for a, b in zip(second, second[1:]))

    def test_rotation_matches_gaussian_oracle(self):
        grid = PhaseGrid(-6, 8, 256, -12, 12, 256)
        x0, d = 0.5, 0.5
        field = gaussian_wigner(x0 - d, 0.0, 1.0, 0.75, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.5, n_order=4.0, x0=x0)
        omega = math.sqrt(2 * params.epsilon * params.n_order)
        t_end = 0.3
        dt = cfl_timestep(grid, params)
        steps = int(math.ceil(t_end / dt))
        out = evolve_wigner(field, params, t_end / steps, steps)
        m = phase_space_moments(out)
        offset, sigma_x = rotated_gaussian_moments(-d, 1.0, 0.75, 1.0, omega, t_end)
        assert m.x_mean - x0 == pytest.approx(offset, abs=0.02)
        assert m.sigma_x == pytest.approx(sigma_x, abs=0.03)


class TestComplexMode:
    def test_zero_coupling_matches_real_mode_bitwise(self):
        grid = PhaseGrid(-6, 6, 64, -4, 4, 64)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.0)
        dt = cfl_timestep(grid, params)
        a = evolve_wigner(field, params, dt, 25, mode="real_effective")
        b = evolve_wigner(field, params, dt, 25, mode="as_written_complex")
        assert np.array_equal(a.values, b.values)

    def test_imaginary_coefficient_amplifies_mass(self):
        grid = PhaseGrid(-6, 6, 96, -6, 6, 96)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.4, n_order=1.0, x0=1.5)
        dt = cfl_timestep(grid, params)
        with pytest.warns(GridTooSmallWarning):
            out = evolve_wigner(field, params, dt, 200, mode="as_written_complex")
        assert np.iscomplexobj(out.values)
        assert abs(wigner_mass(out)) > 1.001
        assert marginals(out).imag_residual > 0.0

    def test_per_step_renormalization_pins_mass(self):
        grid = PhaseGrid(-6, 6, 96, -6, 6, 96)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        params = CrystalParams(m_tot=1.0, epsilon=0.4, n_order=1.0, x0=1.5)
        dt = cfl_timestep(grid, params)
        out = evolve_wigner(field, params, dt, 200, mode="as_written_complex",
                            renormalize=True)
        assert complex(wigner_mass(out)) == pytest.approx(1.0 + 0.0j, abs=1e-9)


class TestLocalizationWidths:
    def test_gaussian_constructor_widths_recovered(self):
        grid = PhaseGrid(-10, 10, 128, -10, 10, 128)
        field = gaussian_wigner(0.0, 0.0, 1.4, 0.7, grid)
        sx, sp = localization_widths(field)
        assert sx == pytest.approx(1.4, abs=1e-4)
        assert sp == pytest.approx(0.7, abs=1e-4)

    def test_single_cell_field_width_below_cell(self):
        grid = PhaseGrid(-4, 4, 64, -4, 4, 64)
        values = np.zeros((64, 64))
        values[32, 16] = 1.0
        sx, sp = localization_widths(WignerField(grid=grid, values=values))
        assert sx <= grid.dx and sp <= grid.dp


class TestLimitExperiment:
    def test_trivial_sequences_coincide_exactly(self):
        grid = PhaseGrid(-8, 8, 64, -8, 8, 64)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        base = CrystalParams(m_tot=1.0)
        a = limit_experiment("eps_first", [0.0], [1.0], base, field, None, 0.5)
        b = limit_experiment("n_first", [0.0], [1.0], base, field, None, 0.5)
        assert a == b

    def test_monotonicity_precondition(self):
        grid = PhaseGrid(-8, 8, 64, -8, 8, 64)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        base = CrystalParams()
        with pytest.raises(ValueError):
            limit_experiment("eps_first", [0.1, 0.5], [1.0], base, field, None, 0.1)
        with pytest.raises(ValueError):
            limit_experiment("n_first", [0.1], [4.0, 1.0], base, field, None, 0.1)

    def test_row_parameter_assignment(self):
        grid = PhaseGrid(-8, 8, 64, -8, 8, 64)
        field = gaussian_wigner(0.0, 0.0, 1.0, 1.0, grid)
        base = CrystalParams()
        rows = limit_experiment("eps_first", [0.5, 0.05], [2.0, 4.0], base,
                                field, None, 0.05)
        assert [(r.eps, r.n_order) for r in rows] == [(0.5, 2.0), (0.05, 2.0)]
        rows = limit_experiment("n_first", [0.5, 0.05], [2.0, 4.0], base,
                                field, None, 0.05)
        assert [(r.eps, r.n_order) for r in rows] == [(0.5, 2.0), (0.5, 4.0)]
