import numpy as np
import pytest

from platedamp import (DomainError, FrfResult, HarmonicForce, ImpedanceLaw,
                       ShuntTopology, SweepSpec, VelocityObjective,
                       frf_separated, mode_windows, optimize_per_patch,
                       percent_reduction, sweep_resistance)


@pytest.fixture(scope="module")
def ref_sweep(ref_model, point_force, target_point, ref_config):
    grid = ref_config.grid.frequencies()
    return sweep_resistance(ref_model, point_force, target_point, grid,
                            SweepSpec(), topology_mode="separated")


class TestSweep:
    def test_optimum_dominates_endpoints(self, ref_sweep):
        assert ref_sweep.objective_opt <= ref_sweep.objective_values[0]
        assert ref_sweep.objective_opt <= ref_sweep.objective_values[-1]

    def test_optimum_is_interior(self, ref_sweep):
        assert 100.0 < ref_sweep.r_opt < 1e6
        assert ref_sweep.objective_opt < ref_sweep.objective_values[0]
        assert ref_sweep.objective_opt < ref_sweep.objective_values[-1]

    def test_single_mode_tuning_scale(self, k1_model, point_force, target_point):
        """Classic resistive-shunt rule: the optimum sits near 1/(omega_1 * Cp)."""
        grid = np.linspace(30.0, 90.0, 800)
        res = sweep_resistance(k1_model, point_force, target_point, grid,
                               SweepSpec(objective_band=(45.0, 65.0)),
                               topology_mode="separated")
        scale = 1.0 / (k1_model.frequencies[0] * k1_model.capacitances[0])
        assert scale / 3.0 < res.r_opt < scale * 3.0

    def test_optimum_interior_on_coarser_basis(self, ref_model_8, point_force,
                                               target_point, ref_config):
        grid = ref_config.grid.frequencies()
        res = sweep_resistance(ref_model_8, point_force, target_point, grid,
                               SweepSpec(), topology_mode="separated")
        assert 100.0 < res.r_opt < 1e6

    def test_two_point_sweep_returns_better_endpoint(self, ref_model, point_force,
                                                     target_point, ref_config):
        grid = ref_config.grid.frequencies()
        res = sweep_resistance(ref_model, point_force, target_point, grid,
                               SweepSpec(points=2), topology_mode="separated")
        assert res.r_opt in (100.0, 1e6)
        assert res.objective_opt == min(res.objective_values)

    def test_threads_do_not_change_sweep(self, ref_model, point_force,
                                         target_point, ref_config):
        grid = ref_config.grid.frequencies()
        spec = SweepSpec(points=40)
        serial = sweep_resistance(ref_model, point_force, target_point, grid,
                                  spec, "separated", threads=1)
        threaded = sweep_resistance(ref_model, point_force, target_point, grid,
                                    spec, "separated", threads=4)
        assert np.array_equal(serial.objective_values, threaded.objective_values)
        assert serial.r_opt == threaded.r_opt

    def test_repeat_runs_bit_identical(self, ref_model, point_force, target_point,
                                       ref_config):
        grid = ref_config.grid.frequencies()
        spec = SweepSpec(points=25)
        a = sweep_resistance(ref_model, point_force, target_point, grid, spec,
                             "connected")
        b = sweep_resistance(ref_model, point_force, target_point, grid, spec,
                             "connected")
        assert np.array_equal(a.objective_values, b.objective_values)
        assert a.r_opt == b.r_opt and a.objective_opt == b.objective_opt

    def test_band_outside_grid_rejected(self, ref_model, point_force, target_point):
        grid = np.linspace(1.0, 250.0, 100)
        with pytest.raises(DomainError):
            sweep_resistance(ref_model, point_force, target_point, grid,
                             SweepSpec(objective_band=(300.0, 400.0)), "separated")

    def test_invalid_spec_rejected(self):
        with pytest.raises(DomainError):
            SweepSpec(r_min=1e4, r_max=1e3)
        with pytest.raises(DomainError):
            SweepSpec(points=1)


class TestModeWindows:
    def test_windows_contain_their_modes_and_do_not_overlap(self, ref_model):
        grid = np.linspace(1.0, 250.0, 100)
        wins = mode_windows(ref_model, 3, grid)
        f = ref_model.frequencies_hz
        for r, (lo, hi) in enumerate(wins):
            assert lo < f[r] < hi
        for (_, hi), (lo2, _) in zip(wins, wins[1:]):
            assert hi <= lo2


class TestPercentReduction:
    def _fake_frf(self, grid, vel):
        disp = vel / (1j * 2 * np.pi * grid)
        return FrfResult(grid.copy(), disp, vel.astype(complex),
                         np.zeros((grid.size, 0), dtype=complex))

    def test_identical_inputs_give_zero(self, ref_model, point_force, target_point,
                                        grid_500):
        topo = ShuntTopology.separated([ImpedanceLaw.open()] * 3)
        res = frf_separated(ref_model, topo, point_force, target_point, grid_500)
        wins = mode_windows(ref_model, 3, grid_500)
        rep = percent_reduction(res, res, wins)
        assert all(e.reduction_pct == 0.0 for e in rep.entries)

    def test_halved_peak_gives_fifty_percent(self):
        grid = np.linspace(10.0, 30.0, 201)
        bump = 1.0 / (1.0 + ((grid - 20.0) / 2.0) ** 2)
        oc = self._fake_frf(grid, bump)
        half = self._fake_frf(grid, 0.5 * bump)
        rep = percent_reduction(oc, half, [(15.0, 25.0)])
        assert rep.entries[0].reduction_pct == pytest.approx(50.0, abs=1e-12)
        assert not rep.entries[0].flagged

    def test_window_without_interior_maximum_is_flagged(self):
        grid = np.linspace(10.0, 30.0, 201)
        ramp = np.linspace(1.0, 2.0, 201)
        rep = percent_reduction(self._fake_frf(grid, ramp),
                                self._fake_frf(grid, 0.9 * ramp),
                                [(15.0, 25.0)])
        assert rep.entries[0].flagged
        assert rep.entries[0].note

    def test_mismatched_grids_rejected(self):
        g1 = np.linspace(10.0, 30.0, 100)
        g2 = np.linspace(10.0, 30.0, 101)
        with pytest.raises(DomainError):
            percent_reduction(self._fake_frf(g1, np.ones(100)),
                              self._fake_frf(g2, np.ones(101)), [(15.0, 25.0)])

    def test_reduction_bounded_above_by_100(self):
        grid = np.linspace(10.0, 30.0, 201)
        bump = 1.0 / (1.0 + ((grid - 20.0) / 2.0) ** 2)
        rep = percent_reduction(self._fake_frf(grid, bump),
                                self._fake_frf(grid, 1e-8 * bump), [(15.0, 25.0)])
        assert rep.entries[0].reduction_pct <= 100.0


class TestPerPatch:
    def test_single_patch_matches_uniform_sweep(self, k1_model, point_force,
                                                target_point):
        grid = np.linspace(30.0, 90.0, 600)
        spec = SweepSpec(points=60, objective_band=(45.0, 65.0))
        rs, best, base = optimize_per_patch(k1_model, point_force, target_point,
                                            grid, spec)
        assert rs == [base.r_opt]
        assert best == base.objective_opt

    def test_descent_never_worse_than_uniform(self, ref_model, point_force,
                                              target_point, ref_config):
        grid = ref_config.grid.frequencies()
        spec = SweepSpec(points=40)
        rs, best, base = optimize_per_patch(ref_model, point_force, target_point,
                                            grid, spec, max_cycles=2)
        assert best <= base.objective_opt
        assert len(rs) == 3

    def test_deterministic(self, ref_model, point_force, target_point, ref_config):
        grid = ref_config.grid.frequencies()
        spec = SweepSpec(points=25)
        a = optimize_per_patch(ref_model, point_force, target_point, grid, spec,
                               max_cycles=1)
        b = optimize_per_patch(ref_model, point_force, target_point, grid, spec,
                               max_cycles=1, threads=3)
        assert a[0] == b[0] and a[1] == b[1]


class TestSeriesRL:
    def test_tuned_rl_branch_beats_pure_resistor(self, k1_model, point_force,
                                                 target_point):
        """A series RL branch tuned to the first mode forms a resonant
        shunt and outperforms the best pure resistor there."""
        grid = np.linspace(40.0, 70.0, 900)
        band = (45.0, 65.0)
        best_r = sweep_resistance(k1_model, point_force, target_point, grid,
                                  SweepSpec(objective_band=band),
                                  topology_mode="separated").objective_opt
        objective = VelocityObjective(k1_model, point_force, target_point, grid)
        henries = 1.0 / (k1_model.frequencies[0] ** 2 * k1_model.capacitances[0])
        rl_peaks = []
        for ohms in np.geomspace(100.0, 1e5, 40):
            topo = ShuntTopology.separated([ImpedanceLaw.series_rl(ohms, henries)])
            rl_peaks.append(objective.peak_in_band(topo, band)[0])
        assert min(rl_peaks) < best_r


class TestObjectiveEngine:
    def test_batched_evaluator_matches_frf_engine(self, ref_model, point_force,
                                                  target_point, ref_config):
        """The vectorized sweep objective and the per-frequency FRF engine
        are independent code paths; they must agree."""
        grid = ref_config.grid.frequencies()
        objective = VelocityObjective(ref_model, point_force, target_point, grid)
        sub = grid[::137]
        for topo in (ShuntTopology.separated([ImpedanceLaw.resistor(8e3)] * 3),
                     ShuntTopology.connected(ImpedanceLaw.resistor(8e3))):
            batched = objective.velocity_abs(topo, sub)
            if topo.mode == "separated":
                res = frf_separated(ref_model, topo, point_force, target_point, sub)
            else:
                from platedamp import frf_connected
                res = frf_connected(ref_model, topo, point_force, target_point, sub)
            assert np.max(np.abs(batched - np.abs(res.velocity))
                          / np.abs(res.velocity)) < 1e-12


class TestPassivity:
    def test_resistive_peaks_bounded_by_oc_sc_envelope(self, ref_model, point_force,
                                                       target_point, ref_config):
        grid = ref_config.grid.frequencies()
        objective = VelocityObjective(ref_model, point_force, target_point, grid)
        wins = mode_windows(ref_model, 3, grid)
        k = 3

        def peaks(ohms):
            topo = ShuntTopology.separated([ImpedanceLaw.resistor(ohms)] * k)
            return [objective.peak_in_band(topo, w)[0] for w in wins]

        oc = peaks(1e9)
        sc = peaks(1e-3)
        for ohms in (500.0, 5e3, 5e4):
            mid = peaks(ohms)
            for pm, po, ps in zip(mid, oc, sc):
                assert pm <= max(po, ps) * (1 + 1e-9)
