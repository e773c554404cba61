from math import sqrt

import numpy as np
import pytest

from trireduce.dynamics import (
    IntegratorConfig,
    conservation_report,
    detect_collinear_passages,
    integrate,
    total_energy,
)
from trireduce.errors import NumericalBlowup
from trireduce.geometry import CartesianState, MassTriple
from trireduce.potential import builtin_potential

MASSES = MassTriple(1.0, 1.0, 1.0)
FREE = builtin_potential("free")
HARMONIC = builtin_potential("harmonic", k=1.0, rest_length=1.0)


def harmonic_setup():
    """Bound, zero-total-momentum, nonplanar initial data for the harmonic
    potential."""
    rng = np.random.default_rng(7)
    pos = rng.uniform(-1.0, 1.0, size=(3, 3))
    vel = rng.uniform(-0.5, 0.5, size=(3, 3))
    pos -= MASSES.as_array() @ pos / MASSES.total
    vel -= MASSES.as_array() @ vel / MASSES.total
    return CartesianState(pos[0], pos[1], pos[2], vel[0], vel[1], vel[2])


def crossing_setup():
    """Free motion in which the third particle crosses the line of the
    other two once, near t = 0.5."""
    x1 = np.array([0.0, 0.0, 1.0])
    x3 = np.array([0.0, 0.0, -1.0])
    x2 = np.array([-0.5, 0.0, 0.3])
    v2 = np.array([1.0, 0.0, 0.0])
    z = np.zeros(3)
    return CartesianState(x1, x2, x3, z, v2, z)


class TestTotalEnergy:
    def test_free_kinetic_only(self):
        z = np.zeros(3)
        state = CartesianState(
            np.array([0.0, 0.0, 1.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([0.0, 1.0, 0.0]),
            np.array([2.0, 0.0, 0.0]),
            z,
            z,
        )
        assert total_energy(MASSES, state, FREE) == 2.0

    def test_harmonic_equilateral_rest(self):
        z = np.zeros(3)
        state = CartesianState(
            np.array([0.0, 0.0, 0.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([0.5, sqrt(3) / 2, 0.0]),
            z,
            z,
            z,
        )
        assert total_energy(MASSES, state, HARMONIC) == pytest.approx(0.0, abs=1e-15)


class TestIntegrate:
    def test_record_count(self):
        cfg = IntegratorConfig(dt=0.01, steps=100, record_stride=10)
        traj = integrate(MASSES, harmonic_setup(), HARMONIC, cfg)
        assert len(traj) == 11
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(1.0)

    def test_free_motion_is_linear(self):
        state = crossing_setup()
        cfg = IntegratorConfig(dt=0.05, steps=20)
        traj = integrate(MASSES, state, FREE, cfg)
        final = traj.states[-1]
        assert np.allclose(final.x2, state.x2 + 1.0 * state.v2, atol=1e-12)
        assert np.allclose(final.x1, state.x1, atol=1e-12)
        rep = conservation_report(traj)
        assert rep.energy_drift_rel < 1e-14
        assert rep.L_drift_inf < 1e-14

    def test_leapfrog_time_reversal(self):
        cfg = IntegratorConfig(dt=0.01, steps=1000, record_stride=1000)
        fwd = integrate(MASSES, harmonic_setup(), HARMONIC, cfg)
        end = fwd.states[-1]
        back = integrate(
            MASSES,
            CartesianState(end.x1, end.x2, end.x3, -end.v1, -end.v2, -end.v3),
            HARMONIC,
            cfg,
        )
        start = harmonic_setup()
        final = back.states[-1]
        assert np.allclose(final.positions, start.positions, atol=1e-9)
        assert np.allclose(-final.velocities, start.velocities, atol=1e-9)

    def test_energy_drift_scales_as_dt_squared(self):
        drifts = []
        for dt, steps in [(0.01, 2000), (0.005, 4000)]:
            cfg = IntegratorConfig(dt=dt, steps=steps, record_stride=10)
            traj = integrate(MASSES, harmonic_setup(), HARMONIC, cfg)
            drifts.append(conservation_report(traj).energy_drift_rel)
        ratio = drifts[0] / drifts[1]
        assert 3.0 < ratio < 5.0

    def test_angular_momentum_conserved(self):
        cfg = IntegratorConfig(dt=0.01, steps=2000, record_stride=10)
        traj = integrate(MASSES, harmonic_setup(), HARMONIC, cfg)
        assert conservation_report(traj).L_drift_inf < 1e-10

    def test_hamiltonian_tracks_energy_outside_band(self):
        cfg = IntegratorConfig(dt=0.01, steps=2000, record_stride=10)
        traj = integrate(MASSES, harmonic_setup(), HARMONIC, cfg)
        rep = conservation_report(traj)
        assert rep.tracking_error_outside_band < 1e-8

    def test_rk4_agrees_with_leapfrog(self):
        state = harmonic_setup()
        finals = []
        for method in ("leapfrog", "rk4"):
            cfg = IntegratorConfig(method=method, dt=0.001, steps=1000)
            finals.append(integrate(MASSES, state, HARMONIC, cfg).states[-1])
        assert np.allclose(finals[0].positions, finals[1].positions, atol=1e-5)

    def test_blowup_guard(self):
        z = np.zeros(3)
        state = CartesianState(
            np.array([0.0, 0.0, 1.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([0.0, 0.0, -1.0]),
            z,
            np.array([5e11, 0.0, 0.0]),
            z,
        )
        cfg = IntegratorConfig(dt=10.0, steps=5)
        with pytest.raises(NumericalBlowup):
            integrate(MASSES, state, FREE, cfg)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            IntegratorConfig(method="euler")
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0)


class TestPassages:
    def test_constructed_crossing_found(self):
        cfg = IntegratorConfig(dt=0.01, steps=100)
        traj = integrate(MASSES, crossing_setup(), FREE, cfg)
        passages = detect_collinear_passages(traj, threshold=0.5, potential=FREE)
        assert len(passages) == 1
        (p,) = passages
        assert p.t_minus < p.t_star < p.t_plus
        assert 0.0 <= p.sin_phi_min < 0.5
        # free motion: H is constant, so the bracketing values match H_at
        assert p.delta_H < 1e-10 * abs(p.H_at)

    def test_no_crossing_empty(self):
        z = np.zeros(3)
        state = CartesianState(
            np.array([0.0, 0.0, 1.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([0.0, 0.0, -1.0]),
            z,
            z,
            z,
        )
        traj = integrate(MASSES, state, FREE, IntegratorConfig(dt=0.01, steps=20))
        assert all(s.sin_phi >= 0.5 for s in traj.samples)
        assert detect_collinear_passages(traj, threshold=0.5) == []

    def test_zero_threshold_empty(self):
        cfg = IntegratorConfig(dt=0.01, steps=100)
        traj = integrate(MASSES, crossing_setup(), FREE, cfg)
        assert detect_collinear_passages(traj, threshold=0.0) == []

    def test_short_trajectory_empty(self):
        cfg = IntegratorConfig(dt=0.01, steps=1)
        traj = integrate(MASSES, crossing_setup(), FREE, cfg)
        assert detect_collinear_passages(traj, threshold=1.0) == []
