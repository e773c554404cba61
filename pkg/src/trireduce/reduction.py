"""Shape-dependent tensors of the rotational reduction.

All tensors are expressed in the body frame fixed by the shape: the first
Jacobi vector along axis 1, the second in the 1-2 plane.  Closed forms are
used throughout; generic matrix inversion is avoided so that the quantities
that stay finite at collinear shapes (the connection, the horizontal
metric) are computed without spurious blowup.
"""

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .errors import SingularInertia
from .geometry import BodyVelocityState, ShapeCoordinates, body_jacobi_vectors

SINGULAR_THRESHOLD = 1e-8
CONDITIONING_BAND = 1e-3


@dataclass(frozen=True)
class BodyMomenta:
    """Body angular momentum J and shape momenta p = (p1, p2, p3)."""

    J: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("J", "p"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)


@dataclass(frozen=True)
class ReductionTensors:
    inertia: np.ndarray
    shape_metric: np.ndarray
    gauge: np.ndarray            # rows: a_r1, a_r2, a_phi
    connection: np.ndarray       # rows: A_r1, A_r2, A_phi
    horizontal_metric: np.ndarray
    horizontal_metric_inv: np.ndarray


def inertia_tensor(q: ShapeCoordinates) -> np.ndarray:
    """Moment of inertia tensor of the shape in the body frame."""
    s, c = sin(q.phi), cos(q.phi)
    r1sq, r2sq = q.r1 ** 2, q.r2 ** 2
    return np.array(
        [
            [r2sq * s * s, -r2sq * s * c, 0.0],
            [-r2sq * s * c, r1sq + r2sq * c * c, 0.0],
            [0.0, 0.0, r1sq + r2sq],
        ]
    )


def inertia_inverse(q: ShapeCoordinates, threshold=SINGULAR_THRESHOLD) -> np.ndarray:
    """Closed-form inverse of the inertia tensor.

    Singular at collinear shapes: raises SingularInertia when
    |sin phi| <= threshold.
    """
    s, c = sin(q.phi), cos(q.phi)
    if abs(s) <= threshold or q.r2 == 0.0:
        raise SingularInertia(f"|sin phi| = {abs(s):.3e} at or below {threshold:.3e}")
    r1sq, r2sq = q.r1 ** 2, q.r2 ** 2
    return np.array(
        [
            [(r1sq + r2sq * c * c) / (r1sq * r2sq * s * s), c / (r1sq * s), 0.0],
            [c / (r1sq * s), 1.0 / r1sq, 0.0],
            [0.0, 0.0, 1.0 / (r1sq + r2sq)],
        ]
    )


def shape_metric(q: ShapeCoordinates) -> np.ndarray:
    """Metric of the shape coordinates themselves, diag(1, 1, r2^2)."""
    return np.diag([1.0, 1.0, q.r2 ** 2])


def gauge_potential(q: ShapeCoordinates) -> np.ndarray:
    """Gauge one-form a_mu (rows a_r1, a_r2, a_phi); only a_phi = (0, 0, r2^2)
    is nonzero."""
    a = np.zeros((3, 3))
    a[2, 2] = q.r2 ** 2
    return a


def mechanical_connection(q: ShapeCoordinates) -> np.ndarray:
    """Connection A_mu = I^{-1} a_mu, in closed form.

    Finite for all phi: a_phi lies along the axis on which the inertia
    tensor never degenerates.
    """
    A = np.zeros((3, 3))
    A[2, 2] = q.r2 ** 2 / (q.r1 ** 2 + q.r2 ** 2)
    return A


def horizontal_metric(q: ShapeCoordinates):
    """Horizontal (rotation-subtracted) shape metric g and its inverse."""
    r1sq, r2sq = q.r1 ** 2, q.r2 ** 2
    g33 = r1sq * r2sq / (r1sq + r2sq)
    g = np.diag([1.0, 1.0, g33])
    g_inv = np.diag([1.0, 1.0, 1.0 / g33])
    return g, g_inv


def reduction_tensors(q: ShapeCoordinates) -> ReductionTensors:
    g, g_inv = horizontal_metric(q)
    return ReductionTensors(
        inertia=inertia_tensor(q),
        shape_metric=shape_metric(q),
        gauge=gauge_potential(q),
        connection=mechanical_connection(q),
        horizontal_metric=g,
        horizontal_metric_inv=g_inv,
    )


def shape_partials(q: ShapeCoordinates):
    """Partial derivatives of the body Jacobi vectors with respect to
    (r1, r2, phi); shape (2, 3, 3): [vector, coordinate, component]."""
    s, c = sin(q.phi), cos(q.phi)
    d = np.zeros((2, 3, 3))
    d[0, 0] = [1.0, 0.0, 0.0]
    d[1, 1] = [c, s, 0.0]
    d[1, 2] = [-q.r2 * s, q.r2 * c, 0.0]
    return d


def body_velocities(q: ShapeCoordinates, w: BodyVelocityState):
    """Body-frame velocities of the two Jacobi vectors."""
    b1, b2 = body_jacobi_vectors(q)
    d = shape_partials(q)
    v1 = np.cross(w.omega, b1) + d[0].T @ w.qdot
    v2 = np.cross(w.omega, b2) + d[1].T @ w.qdot
    return v1, v2


def kinetic_energy_body(q: ShapeCoordinates, w: BodyVelocityState) -> float:
    """Kinetic energy from the body decomposition:
    K = w^T I w / 2 + sum_mu (w^T a_mu) qdot^mu + h_{mu nu} qdot qdot / 2."""
    I = inertia_tensor(q)
    a = gauge_potential(q)
    h = shape_metric(q)
    wv, qd = w.omega, w.qdot
    return float(0.5 * wv @ I @ wv + (a @ wv) @ qd + 0.5 * qd @ h @ qd)


def body_angular_momentum(q: ShapeCoordinates, w: BodyVelocityState) -> np.ndarray:
    """Body angular momentum J = I w + sum_mu a_mu qdot^mu."""
    return inertia_tensor(q) @ w.omega + gauge_potential(q).T @ w.qdot


def shape_momenta(q: ShapeCoordinates, w: BodyVelocityState) -> BodyMomenta:
    """Conjugate momenta p_mu = g_{mu nu} qdot^nu + J . A_mu (equivalently
    h_{mu nu} qdot^nu + w . a_mu)."""
    J = body_angular_momentum(q, w)
    g, _ = horizontal_metric(q)
    A = mechanical_connection(q)
    p = g @ w.qdot + A @ J
    return BodyMomenta(J, p)


def velocities_from_momenta(
    q: ShapeCoordinates, m: BodyMomenta, threshold=SINGULAR_THRESHOLD
) -> BodyVelocityState:
    """Invert the Legendre map: recover (omega, qdot) from (J, p).

    Needs the full inertia inverse, so it raises SingularInertia near
    collinear shapes; the collinear branch has its own 2-DOF inverse in the
    hamiltonian module.
    """
    _, g_inv = horizontal_metric(q)
    A = mechanical_connection(q)
    qdot = g_inv @ (m.p - A @ m.J)
    I_inv = inertia_inverse(q, threshold=threshold)
    omega = I_inv @ (m.J - gauge_potential(q).T @ qdot)
    return BodyVelocityState(omega, qdot)
