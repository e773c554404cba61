"""Cartesian three-body dynamics: the oracle the reduced quantities are
validated against.

The default integrator is leapfrog (velocity-Verlet), which is symplectic
and time-reversible, so conserved-quantity drift diagnoses formula errors
rather than integrator artifacts.  RK4 is provided for cross-checks.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateShape,
    NumericalBlowup,
    ZeroAngularMomentum,
)
from .geometry import (
    CartesianState,
    MassTriple,
    jacobi_from_cartesian,
    spatial_angular_momentum,
)
from .hamiltonian import evaluate_reduced_jacobi
from .potential import EvalContext, PotentialSpec, eval_potential, forces_cartesian

OVERFLOW_GUARD = 1e12


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "leapfrog"
    dt: float = 1e-3
    steps: int = 1000
    record_stride: int = 1

    def __post_init__(self):
        if self.method not in ("leapfrog", "rk4"):
            raise ValueError(f"unknown method '{self.method}'")
        if not (self.dt > 0.0):
            raise ValueError("dt must be > 0")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass(frozen=True)
class TrajectorySample:
    """Derived quantities recorded alongside each stored state."""

    t: float
    r1: float
    r2: float
    phi: float
    sin_phi: float
    J: np.ndarray
    p: np.ndarray
    H_reduced: float
    E_total: float
    L: np.ndarray
    branch: str


@dataclass
class Trajectory:
    masses: MassTriple
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)


def total_energy(masses: MassTriple, state: CartesianState, potential) -> float:
    """Total Cartesian energy, kinetic plus potential."""
    m = masses.as_array()
    kinetic = 0.5 * float(np.sum(m[:, None] * state.velocities ** 2))
    V = eval_potential(potential, EvalContext.from_positions(masses, state.positions))
    return kinetic + V


def _accelerations(masses, potential, positions):
    forces = forces_cartesian(potential, masses, positions)
    return forces / masses.as_array()[:, None]


def _derived_sample(masses, potential, t, state):
    j = jacobi_from_cartesian(masses, state)
    E = total_energy(masses, state, potential)
    L = spatial_angular_momentum(j)
    try:
        ev = evaluate_reduced_jacobi(masses, j, potential)
        return TrajectorySample(
            t=t,
            r1=ev.q.r1,
            r2=ev.q.r2,
            phi=ev.q.phi,
            sin_phi=ev.sin_phi,
            J=ev.momenta.J,
            p=ev.momenta.p,
            H_reduced=ev.H,
            E_total=E,
            L=L,
            branch=ev.branch,
        )
    except (DegenerateShape, ZeroAngularMomentum):
        r1 = float(np.linalg.norm(j.s1))
        r2 = float(np.linalg.norm(j.s2))
        nan3 = np.full(3, np.nan)
        return TrajectorySample(
            t=t,
            r1=r1,
            r2=r2,
            phi=np.nan,
            sin_phi=np.nan,
            J=nan3,
            p=nan3,
            H_reduced=np.nan,
            E_total=E,
            L=L,
            branch="degenerate",
        )


def _leapfrog_steps(masses, potential, x, v, dt, n, on_step):
    a = _accelerations(masses, potential, x)
    for k in range(n):
        v_half = v + 0.5 * dt * a
        x = x + dt * v_half
        a = _accelerations(masses, potential, x)
        v = v_half + 0.5 * dt * a
        on_step(k, x, v)
    return x, v


def _rk4_steps(masses, potential, x, v, dt, n, on_step):
    def deriv(x, v):
        return v, _accelerations(masses, potential, x)

    for k in range(n):
        k1x, k1v = deriv(x, v)
        k2x, k2v = deriv(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = deriv(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = deriv(x + dt * k3x, v + dt * k3v)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        on_step(k, x, v)
    return x, v


def integrate(
    masses: MassTriple,
    state0: CartesianState,
    potential: PotentialSpec,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Integrate the Cartesian equations of motion and record derived
    reduced quantities every record_stride steps."""
    traj = Trajectory(masses=masses)

    def record(t, x, v):
        state = CartesianState(x[0], x[1], x[2], v[0], v[1], v[2])
        traj.times.append(t)
        traj.states.append(state)
        traj.samples.append(_derived_sample(masses, potential, t, state))

    x = state0.positions
    v = state0.velocities
    record(0.0, x, v)

    def on_step(k, x, v):
        if np.max(np.abs(x)) > OVERFLOW_GUARD or np.max(np.abs(v)) > OVERFLOW_GUARD:
            raise NumericalBlowup(f"coordinate overflow at step {k + 1}")
        if (k + 1) % cfg.record_stride == 0:
            record((k + 1) * cfg.dt, x, v)

    stepper = _leapfrog_steps if cfg.method == "leapfrog" else _rk4_steps
    stepper(masses, potential, x, v, cfg.dt, cfg.steps, on_step)
    return traj


@dataclass(frozen=True)
class ConservationReport:
    energy_drift_rel: float
    L_drift_inf: float
    tracking_error_outside_band: float
    tracking_error_inside_band: float


def conservation_report(traj: Trajectory, band_threshold=1e-3) -> ConservationReport:
    """Drifts of the conserved quantities and the H_reduced-vs-E tracking
    error, split at the collinear conditioning band."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    E = np.array([s.E_total for s in traj.samples])
    L = np.array([s.L for s in traj.samples])
    H = np.array([s.H_reduced for s in traj.samples])
    sin_phi = np.array([s.sin_phi for s in traj.samples])
    E0 = E[0]
    scale = abs(E0) if E0 != 0.0 else 1.0
    energy_drift = float(np.max(np.abs(E - E0)) / scale)
    L_drift = float(np.max(np.abs(L - L[0])))
    diff = np.abs(H - E)
    outside = diff[sin_phi > band_threshold]
    inside = diff[~(sin_phi > band_threshold)]
    return ConservationReport(
        energy_drift_rel=energy_drift,
        L_drift_inf=L_drift,
        tracking_error_outside_band=float(np.max(outside)) if outside.size else 0.0,
        tracking_error_inside_band=float(np.max(inside)) if inside.size else 0.0,
    )


@dataclass(frozen=True)
class CollinearPassage:
    t_minus: float
    t_plus: float
    t_star: float
    sin_phi_min: float
    H_before: float
    H_at: float
    H_after: float
    delta_H: float


def detect_collinear_passages(traj: Trajectory, threshold: float, potential=None):
    """Find local minima of sin(phi) strictly below threshold.

    Passage time by parabolic interpolation through the three samples
    bracketing the minimum.  H_at is the collinear-branch Hamiltonian
    evaluated at the minimum sample; delta_H is the largest deviation of
    the bracketing noncollinear values from it.
    """
    n = len(traj)
    passages = []
    if n < 3:
        return passages
    sin_phi = np.array([s.sin_phi for s in traj.samples])
    times = np.array(traj.times)
    for i in range(1, n - 1):
        y0, y1, y2 = sin_phi[i - 1], sin_phi[i], sin_phi[i + 1]
        if not (np.isfinite(y0) and np.isfinite(y1) and np.isfinite(y2)):
            continue
        if not (y1 < threshold and y1 <= y0 and y1 <= y2):
            continue
        denom = y0 - 2.0 * y1 + y2
        if denom > 0.0:
            offset = 0.5 * (y0 - y2) / denom
        else:
            offset = 0.0
        dt = times[i + 1] - times[i]
        t_star = times[i] + offset * dt
        if potential is not None:
            j = jacobi_from_cartesian(traj.masses, traj.states[i])
            ev = evaluate_reduced_jacobi(
                traj.masses, j, potential, force_collinear=True
            )
            H_at = ev.H
        else:
            H_at = traj.samples[i].H_reduced
        H_before = traj.samples[i - 1].H_reduced
        H_after = traj.samples[i + 1].H_reduced
        delta = max(abs(H_before - H_at), abs(H_after - H_at))
        passages.append(
            CollinearPassage(
                t_minus=times[i - 1],
                t_plus=times[i + 1],
                t_star=float(t_star),
                sin_phi_min=float(y1),
                H_before=H_before,
                H_at=H_at,
                H_after=H_after,
                delta_H=delta,
            )
        )
    return passages
