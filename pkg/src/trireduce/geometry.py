"""Translation reduction, body-frame fitting and angular-velocity kinematics.

Conventions: the body frame is u1 along the first mass-weighted relative
vector, u2 the in-plane unit vector with nonnegative projection on the
second, u3 = u1 x u2 (right-handed).  The rotation matrix R has the body
axes as columns, so body vectors b and space vectors s satisfy s = R b.
"""

from dataclasses import dataclass
from math import atan2, cos, pi, sin

import numpy as np

from .errors import CollinearShape, DegenerateShape

COLLINEAR_THRESHOLD = 1e-8


@dataclass(frozen=True)
class MassTriple:
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        for name in ("m1", "m2", "m3"):
            m = getattr(self, name)
            if not np.isfinite(m) or m <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {m}")

    @property
    def total(self):
        return self.m1 + self.m2 + self.m3

    def as_array(self):
        return np.array([self.m1, self.m2, self.m3])


@dataclass(frozen=True)
class ReducedMasses:
    mu1: float
    mu2: float


@dataclass(frozen=True)
class CartesianState:
    """Positions and velocities of the three bodies in the space frame."""

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    def __post_init__(self):
        for name in ("x1", "x2", "x3", "v1", "v2", "v3"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)

    @property
    def positions(self):
        return np.array([self.x1, self.x2, self.x3])

    @property
    def velocities(self):
        return np.array([self.v1, self.v2, self.v3])


@dataclass(frozen=True)
class JacobiVectors:
    """Mass-weighted Jacobi vectors and their time derivatives."""

    s1: np.ndarray
    s2: np.ndarray
    sdot1: np.ndarray
    sdot2: np.ndarray

    def __post_init__(self):
        for name in ("s1", "s2", "sdot1", "sdot2"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)


@dataclass(frozen=True)
class EulerAngles:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < 2.0 * pi + 1e-15):
            raise ValueError(f"alpha out of [0, 2pi): {self.alpha}")
        if not (0.0 <= self.beta <= pi):
            raise ValueError(f"beta out of [0, pi]: {self.beta}")
        if not (0.0 <= self.gamma < 2.0 * pi + 1e-15):
            raise ValueError(f"gamma out of [0, 2pi): {self.gamma}")


@dataclass(frozen=True)
class ShapeCoordinates:
    """Internal coordinates: Jacobi lengths r1, r2 and the angle phi between
    the Jacobi vectors."""

    r1: float
    r2: float
    phi: float

    def __post_init__(self):
        if not (np.isfinite(self.r1) and self.r1 > 0.0):
            raise ValueError(f"r1 must be > 0, got {self.r1}")
        if not (np.isfinite(self.r2) and self.r2 >= 0.0):
            raise ValueError(f"r2 must be >= 0, got {self.r2}")
        if not (0.0 <= self.phi <= pi):
            raise ValueError(f"phi out of [0, pi]: {self.phi}")


@dataclass(frozen=True)
class BodyVelocityState:
    """Body angular velocity and shape-coordinate rates (r1dot, r2dot, phidot)."""

    omega: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        for name in ("omega", "qdot"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,) or not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, vec)


def reduced_masses(m: MassTriple) -> ReducedMasses:
    """Reduced masses of the (1,3) pair and of body 2 against that pair."""
    mu1 = m.m1 * m.m3 / (m.m1 + m.m3)
    mu2 = m.m2 * (m.m1 + m.m3) / m.total
    return ReducedMasses(mu1, mu2)


def jacobi_from_cartesian(m: MassTriple, state: CartesianState) -> JacobiVectors:
    """Mass-weighted Jacobi vectors of a Cartesian state.

    s1 spans bodies 1 and 3; s2 runs from their center of mass to body 2.
    """
    mu = reduced_masses(m)
    w1, w2 = np.sqrt(mu.mu1), np.sqrt(mu.mu2)
    pair = m.m1 + m.m3

    def _map(a1, a2, a3):
        s1 = w1 * (a1 - a3)
        s2 = w2 * (a2 - (m.m1 * a1 + m.m3 * a3) / pair)
        return s1, s2

    s1, s2 = _map(state.x1, state.x2, state.x3)
    sd1, sd2 = _map(state.v1, state.v2, state.v3)
    return JacobiVectors(s1, s2, sd1, sd2)


def cartesian_from_jacobi(m: MassTriple, j: JacobiVectors) -> CartesianState:
    """Invert the Jacobi map with the center of mass (and its velocity) at
    the origin."""
    mu = reduced_masses(m)
    w1, w2 = np.sqrt(mu.mu1), np.sqrt(mu.mu2)
    pair = m.m1 + m.m3
    M = m.total

    def _unmap(s1, s2):
        # x2 - c13 = s2/w2 with c13 the pair center of mass; total CM at 0.
        rel13 = s1 / w1
        rel2 = s2 / w2
        c13 = -m.m2 / M * rel2
        x2 = c13 + rel2
        x1 = c13 + m.m3 / pair * rel13
        x3 = c13 - m.m1 / pair * rel13
        return x1, x2, x3

    x1, x2, x3 = _unmap(j.s1, j.s2)
    v1, v2, v3 = _unmap(j.sdot1, j.sdot2)
    return CartesianState(x1, x2, x3, v1, v2, v3)


def spatial_angular_momentum(j: JacobiVectors) -> np.ndarray:
    """Total angular momentum about the center of mass, L = s1 x s1dot + s2 x s2dot."""
    return np.cross(j.s1, j.sdot1) + np.cross(j.s2, j.sdot2)


def rotation_from_euler(e: EulerAngles) -> np.ndarray:
    """Rotation matrix whose columns are the body axes u1, u2, u3.

    The chart is orthonormalized and right-handed; at (0, 0, pi/2) it gives
    u1 = e3, u2 = e1, u3 = e2.
    """
    sa, ca = sin(e.alpha), cos(e.alpha)
    sb, cb = sin(e.beta), cos(e.beta)
    sg, cg = sin(e.gamma), cos(e.gamma)
    u1 = np.array([sb * ca, sb * sa, cb])
    u2 = np.array([cb * ca * sg + sa * cg, cb * sa * sg - ca * cg, -sb * sg])
    u3 = np.array([cb * ca * cg - sa * sg, cb * sa * cg + ca * sg, -sb * cg])
    return np.column_stack([u1, u2, u3])


def body_frame_fit(j: JacobiVectors, collinear_threshold=COLLINEAR_THRESHOLD):
    """Fit the body frame and shape coordinates of a noncollinear state.

    Returns (R, ShapeCoordinates) with R s_body = s_space.  Raises
    DegenerateShape when |s1| = 0 or |s2| = 0 and CollinearShape when the
    configuration is collinear within threshold (the in-plane axis is then
    undefined; use the angular-momentum-aligned frame instead).
    """
    r1 = float(np.linalg.norm(j.s1))
    if r1 == 0.0:
        raise DegenerateShape("|s1| = 0: body frame undefined")
    r2 = float(np.linalg.norm(j.s2))
    if r2 == 0.0:
        raise DegenerateShape("r2 = 0: phi undefined")
    normal = np.cross(j.s1, j.s2)
    nn = float(np.linalg.norm(normal))
    if nn / (r1 * r2) < collinear_threshold:
        raise CollinearShape(
            f"|s1 x s2|/(|s1||s2|) = {nn / (r1 * r2):.3e} below threshold"
        )
    u1 = j.s1 / r1
    u3 = normal / nn
    u2 = np.cross(u3, u1)
    phi = atan2(float(np.dot(j.s2, u2)), float(np.dot(j.s2, u1)))
    R = np.column_stack([u1, u2, u3])
    return R, ShapeCoordinates(r1, r2, phi)


def omega_from_rotation_rate(R: np.ndarray, Rdot: np.ndarray) -> np.ndarray:
    """Body angular velocity from R and its time derivative.

    Antisymmetrizes R^T Rdot before reading off the components.
    """
    Om = R.T @ Rdot
    Om = 0.5 * (Om - Om.T)
    return np.array([Om[2, 1], Om[0, 2], Om[1, 0]])


def omega_from_euler_rates(e: EulerAngles, rates) -> np.ndarray:
    """Body angular velocity from Euler angles and their rates.

    Closed form of vee(R^T Rdot) for the chart in rotation_from_euler:
        w1 = alphadot cos(beta) + gammadot
        w2 = -alphadot sin(beta) sin(gamma) - betadot cos(gamma)
        w3 = -alphadot sin(beta) cos(gamma) + betadot sin(gamma)
    """
    ad, bd, gd = rates
    sb, cb = sin(e.beta), cos(e.beta)
    sg, cg = sin(e.gamma), cos(e.gamma)
    return np.array(
        [
            ad * cb + gd,
            -ad * sb * sg - bd * cg,
            -ad * sb * cg + bd * sg,
        ]
    )


def body_jacobi_vectors(q: ShapeCoordinates):
    """Jacobi vectors in the body frame: (r1, 0, 0) and (r2 cos phi, r2 sin phi, 0)."""
    b1 = np.array([q.r1, 0.0, 0.0])
    b2 = np.array([q.r2 * cos(q.phi), q.r2 * sin(q.phi), 0.0])
    return b1, b2


def shape_to_distances(m: MassTriple, q: ShapeCoordinates):
    """Interparticle distances (d12, d13, d23) of a shape."""
    mu = reduced_masses(m)
    b1, b2 = body_jacobi_vectors(q)
    rel13 = b1 / np.sqrt(mu.mu1)
    rel2 = b2 / np.sqrt(mu.mu2)
    pair = m.m1 + m.m3
    d13 = float(np.linalg.norm(rel13))
    d12 = float(np.linalg.norm(rel2 - m.m3 / pair * rel13))
    d23 = float(np.linalg.norm(rel2 + m.m1 / pair * rel13))
    return d12, d13, d23
