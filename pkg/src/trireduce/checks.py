"""Named property suites behind the `check` command.

Each suite re-derives its expected values from an independent route
(brute-force assembly, finite differences, Cartesian oracle) and compares
against the closed forms.  Tolerances can be scaled through the
TRIREDUCE_CHECK_TOL_SCALE environment variable; the default scale is 1.
"""

import os
from math import cos, pi, sin

import numpy as np

from .dynamics import IntegratorConfig, conservation_report, integrate, total_energy
from .geometry import (
    CartesianState,
    EulerAngles,
    JacobiVectors,
    MassTriple,
    ShapeCoordinates,
    body_frame_fit,
    body_jacobi_vectors,
    cartesian_from_jacobi,
    jacobi_from_cartesian,
    rotation_from_euler,
)
from .hamiltonian import collinear_hamiltonian, reduced_hamiltonian, singular_term
from .potential import (
    EvalContext,
    builtin_potential,
    eval_potential,
    forces_cartesian,
    parse_potential,
    print_expression,
)
from .reduction import (
    BodyMomenta,
    BodyVelocityState,
    body_angular_momentum,
    body_velocities,
    gauge_potential,
    horizontal_metric,
    inertia_inverse,
    inertia_tensor,
    kinetic_energy_body,
    mechanical_connection,
    shape_momenta,
    shape_partials,
    velocities_from_momenta,
)

DEFAULT_SEED = 20260824


def _tol(value):
    return value * float(os.environ.get("TRIREDUCE_CHECK_TOL_SCALE", "1"))


def random_rotation(rng):
    qa = rng.normal(size=4)
    qa /= np.linalg.norm(qa)
    w, x, y, z = qa
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_shape(rng, phi_min=0.05):
    return ShapeCoordinates(
        r1=rng.uniform(0.5, 2.0),
        r2=rng.uniform(0.5, 2.0),
        phi=rng.uniform(phi_min, pi - phi_min),
    )


def random_body_state(rng):
    return BodyVelocityState(rng.normal(size=3), rng.normal(size=3))


def cartesian_from_body_state(masses, q, w):
    """Cartesian realization of a body state with the body frame taken as
    the space frame at the evaluation instant."""
    b1, b2 = body_jacobi_vectors(q)
    v1, v2 = body_velocities(q, w)
    return cartesian_from_jacobi(masses, JacobiVectors(b1, b2, v1, v2))


def brute_inertia(q):
    b1, b2 = body_jacobi_vectors(q)
    I = np.zeros((3, 3))
    for k, e in enumerate(np.eye(3)):
        I[:, k] = np.cross(b1, np.cross(e, b1)) + np.cross(b2, np.cross(e, b2))
    return I


def brute_gauge(q):
    b = body_jacobi_vectors(q)
    d = shape_partials(q)
    return np.array(
        [np.cross(b[0], d[0, mu]) + np.cross(b[1], d[1, mu]) for mu in range(3)]
    )


def matrix_form_hamiltonian(q, m, V):
    """Reduced Hamiltonian assembled from the tensor definitions (the
    independent route checked against the expanded closed form)."""
    I_inv = inertia_inverse(q)
    A = mechanical_connection(q)
    _, g_inv = horizontal_metric(q)
    shifted = m.p - A @ m.J
    return float(0.5 * m.J @ I_inv @ m.J + 0.5 * shifted @ g_inv @ shifted + V)


# --------------------------------------------------------------------------
# Suites.  Each returns (ok, detail).


def suite_so3(seed=DEFAULT_SEED, n=2000):
    rng = np.random.default_rng(seed)
    tol = _tol(1e-12)
    worst = 0.0
    for _ in range(n):
        e = EulerAngles(
            rng.uniform(0, 2 * pi), rng.uniform(0, pi), rng.uniform(0, 2 * pi)
        )
        R = rotation_from_euler(e)
        worst = max(
            worst,
            float(np.max(np.abs(R.T @ R - np.eye(3)))),
            abs(float(np.linalg.det(R)) - 1.0),
        )
    return worst < tol, f"max residual {worst:.3e} (tol {tol:.1e})"


def suite_equivariance(seed=DEFAULT_SEED, n=200):
    rng = np.random.default_rng(seed)
    tol = _tol(1e-12)
    worst = 0.0
    for _ in range(n):
        j = JacobiVectors(
            rng.normal(size=3), rng.normal(size=3), rng.normal(size=3), rng.normal(size=3)
        )
        Q = random_rotation(rng)
        R, q = body_frame_fit(j)
        Rq, qq = body_frame_fit(
            JacobiVectors(Q @ j.s1, Q @ j.s2, Q @ j.sdot1, Q @ j.sdot2)
        )
        worst = max(
            worst,
            abs(q.r1 - qq.r1),
            abs(q.r2 - qq.r2),
            abs(q.phi - qq.phi),
            float(np.max(np.abs(Rq - Q @ R))),
        )
    return worst < tol, f"max deviation {worst:.3e} (tol {tol:.1e})"


def suite_tensor_oracle(seed=DEFAULT_SEED, n=300):
    rng = np.random.default_rng(seed)
    tol = _tol(1e-10)
    worst = 0.0
    for _ in range(n):
        q = random_shape(rng, phi_min=1.1e-3)
        I = inertia_tensor(q)
        a = gauge_potential(q)
        A = mechanical_connection(q)
        g, g_inv = horizontal_metric(q)
        I_inv = inertia_inverse(q)
        h = np.diag([1.0, 1.0, q.r2 ** 2])
        A_brute = np.linalg.inv(I) @ brute_gauge(q).T
        g_brute = h - A_brute.T @ I @ A_brute

        def mismatch(closed, brute):
            # relative to the matrix magnitude: the inertia inverse has
            # O(1/sin^2 phi) entries near the band edge
            scale = max(1.0, float(np.max(np.abs(brute))))
            return float(np.max(np.abs(closed - brute))) / scale

        worst = max(
            worst,
            mismatch(I, brute_inertia(q)),
            mismatch(I_inv, np.linalg.inv(I)),
            mismatch(a, brute_gauge(q)),
            mismatch(A, A_brute.T),
            mismatch(g, g_brute),
            mismatch(g_inv, np.linalg.inv(g_brute)),
        )
    return worst < tol, f"max tensor mismatch {worst:.3e} (tol {tol:.1e})"


def suite_energy_identity(seed=DEFAULT_SEED, n=300):
    rng = np.random.default_rng(seed)
    tol_rel = _tol(1e-10)
    tol_matrix = _tol(1e-12)
    masses = MassTriple(1.0, 1.5, 2.0)
    potential = builtin_potential("harmonic", k=0.7)
    worst_rel, worst_matrix = 0.0, 0.0
    for _ in range(n):
        q = random_shape(rng)
        w = random_body_state(rng)
        m = shape_momenta(q, w)
        ctx = EvalContext.from_shape(masses, q)
        V = eval_potential(potential, ctx)
        H = reduced_hamiltonian(q, m, V)
        state = cartesian_from_body_state(masses, q, w)
        E = total_energy(masses, state, potential)
        scale = max(abs(E), 1.0)
        worst_rel = max(worst_rel, abs(H - E) / scale)
        worst_matrix = max(
            worst_matrix, abs(H - matrix_form_hamiltonian(q, m, V)) / scale
        )
    ok = worst_rel < tol_rel and worst_matrix < tol_matrix
    return ok, (
        f"max |H - E|/|E| {worst_rel:.3e} (tol {tol_rel:.1e}), "
        f"matrix-vs-expanded {worst_matrix:.3e} (tol {tol_matrix:.1e})"
    )


def suite_collinear_limit(seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    tol_h0 = _tol(1e-12)
    r1, r2 = 1.3, 0.8
    w3, q3dot = rng.normal(), rng.normal()
    qdot = np.array([rng.normal(), rng.normal(), q3dot])
    omega = np.array([rng.normal(), 0.0, w3])
    phis = [10.0 ** (-k) for k in range(1, 7)]
    diffs = []
    S = r1 ** 2 + r2 ** 2
    J3 = S * w3 + r2 ** 2 * q3dot
    p = np.array([qdot[0], qdot[1], r2 ** 2 * (w3 + q3dot)])
    m0 = BodyMomenta(np.array([0.0, 0.0, J3]), p)
    H0 = collinear_hamiltonian(r1, r2, m0, 0.0)
    q0 = ShapeCoordinates(r1, r2, 0.0)
    K0 = kinetic_energy_body(q0, BodyVelocityState(np.array([0.0, 0.0, w3]), qdot))
    for phi in phis:
        q = ShapeCoordinates(r1, r2, phi)
        w = BodyVelocityState(omega, qdot)
        m = shape_momenta(q, w)
        diffs.append(abs(reduced_hamiltonian(q, m, 0.0) - H0))
    slope = np.polyfit(np.log(phis), np.log(diffs), 1)[0]
    monotone = all(diffs[i] > diffs[i + 1] for i in range(len(diffs) - 1))
    ok = monotone and 1.8 <= slope <= 2.2 and abs(H0 - K0) < tol_h0
    return ok, f"log-log slope {slope:.3f}, |H(0) - K(0)| {abs(H0 - K0):.3e} (tol {tol_h0:.1e})"


def suite_singular_term(seed=DEFAULT_SEED, n=100):
    rng = np.random.default_rng(seed)
    tol = _tol(1e-12)
    worst = 0.0
    for _ in range(n):
        r2 = rng.uniform(0.2, 2.0)
        omega = rng.normal(size=3)
        w = BodyVelocityState(omega, np.zeros(3))
        q0 = ShapeCoordinates(1.0, r2, 0.0)
        if singular_term(q0, w) != -(r2 ** 2) * omega[1]:
            return False, "phi = 0 value is not exactly -r2^2 w2"
        q = ShapeCoordinates(1.0, r2, rng.uniform(0.15, pi - 0.15))
        J1 = body_angular_momentum(q, w)[0]
        worst = max(worst, abs(singular_term(q, w) - J1 / sin(q.phi)))
    return worst < tol, f"max |term - J1/sin(phi)| {worst:.3e} (tol {tol:.1e})"


def suite_legendre_roundtrip(seed=DEFAULT_SEED, n=200):
    rng = np.random.default_rng(seed)
    tol = _tol(1e-10)
    worst = 0.0
    for _ in range(n):
        q = random_shape(rng)
        w = random_body_state(rng)
        m = shape_momenta(q, w)
        back = velocities_from_momenta(q, m)
        worst = max(
            worst,
            float(np.max(np.abs(back.omega - w.omega))),
            float(np.max(np.abs(back.qdot - w.qdot))),
        )
    return worst < tol, f"max round-trip error {worst:.3e} (tol {tol:.1e})"


def _harmonic_setup():
    masses = MassTriple(1.0, 1.0, 1.0)
    potential = builtin_potential("harmonic", k=1.0, rest_length=1.0)
    state = CartesianState(
        np.array([1.1, 0.0, 0.0]),
        np.array([-0.4, 0.9, 0.1]),
        np.array([-0.7, -0.6, 0.0]),
        np.array([0.0, 0.3, 0.0]),
        np.array([0.1, -0.2, 0.05]),
        np.array([-0.1, -0.1, -0.05]),
    )
    return masses, potential, state


def suite_trajectory_conservation(seed=DEFAULT_SEED):
    masses, potential, state = _harmonic_setup()
    cfg = IntegratorConfig(method="leapfrog", dt=0.01, steps=2000, record_stride=10)
    traj = integrate(masses, state, potential, cfg)
    rep = conservation_report(traj)
    L0 = np.linalg.norm(traj.samples[0].L)
    L_rel = rep.L_drift_inf / L0
    ok = L_rel < _tol(1e-10) and rep.tracking_error_outside_band < _tol(1e-8)
    return ok, (
        f"relative L drift {L_rel:.3e} (tol {_tol(1e-10):.1e}), "
        f"H-vs-E tracking {rep.tracking_error_outside_band:.3e} (tol {_tol(1e-8):.1e})"
    )


GOLDEN_EXPRESSIONS = [
    "r1",
    "r2",
    "phi",
    "d12",
    "d13",
    "d23",
    "r1 + r2",
    "r1 - r2",
    "r1 * r2",
    "r1 / r2",
    "r1 ^ 2",
    "r1 ^ 2 + r2 ^ 2",
    "-r1",
    "-(r1 + r2)",
    "-1 / d12 - 1 / d13 - 1 / d23",
    "2 * r1 ^ 2 * sin(phi)",
    "sin(phi) ^ 2 + cos(phi) ^ 2",
    "sqrt(r1 ^ 2 + r2 ^ 2)",
    "exp(-r1)",
    "exp(-(d12 - 1) ^ 2)",
    "log(r1 + 1)",
    "abs(cos(phi))",
    "r1 ^ 2 ^ 3",
    "(r1 ^ 2) ^ 3",
    "r1 ^ -2",
    "1 / (1 + d12)",
    "0.5 * (d12 - 1) ^ 2",
    "0.5 * (d13 - 1) ^ 2 + 0.5 * (d23 - 1) ^ 2",
    "3.25e-2 * r1",
    "1e3 / d13",
    "pi * r2",
    "e ^ r1",
    "r1 * (r2 + phi)",
    "(r1 + r2) * phi",
    "r1 - r2 - phi",
    "r1 - (r2 - phi)",
    "r1 / r2 / 2",
    "r1 / (r2 / 2)",
    "-r1 ^ 2",
    "(-r1) ^ 2",
    "sin(cos(phi))",
    "sqrt(abs(r1 - r2))",
    "4 * ((1 / d12) ^ 12 - (1 / d12) ^ 6)",
    "d12 ^ 2 + d13 ^ 2 + d23 ^ 2",
    "1 / sqrt(d12 ^ 2 + 0.01)",
    "r2 ^ 2 * sin(phi) ^ 2",
    "2 ^ 2 ^ 2",
    "cos(2 * phi)",
    "exp(r1) * exp(-r1)",
    "r1 + r2 + phi + d12 + d13 + d23",
]


def suite_parser(seed=DEFAULT_SEED, n_configs=30):
    rng = np.random.default_rng(seed)
    for text in GOLDEN_EXPRESSIONS:
        ast = parse_potential(text).ast
        printed = print_expression(ast)
        if parse_potential(printed).ast != ast:
            return False, f"round trip failed for {text!r}"
        if print_expression(parse_potential(printed).ast) != printed:
            return False, f"print not idempotent for {text!r}"
    masses = MassTriple(1.0, 2.0, 3.0)
    worst_grad, worst_inv = 0.0, 0.0
    for builtin in ("gravity", "harmonic", "lennard_jones"):
        spec = builtin_potential(builtin)
        for _ in range(n_configs):
            pos = rng.uniform(-1.5, 1.5, size=(3, 3))
            if min(np.linalg.norm(pos[i] - pos[k]) for i, k in [(0, 1), (0, 2), (1, 2)]) < 0.5:
                continue
            F = forces_cartesian(spec, masses, pos)
            step = 1e-4
            for i in range(3):
                for k in range(3):

                    def v_at(offset):
                        shifted = pos.copy()
                        shifted[i, k] += offset
                        return eval_potential(
                            spec, EvalContext.from_positions(masses, shifted)
                        )

                    # fourth-order central stencil
                    fd = -(
                        -v_at(2 * step)
                        + 8 * v_at(step)
                        - 8 * v_at(-step)
                        + v_at(-2 * step)
                    ) / (12 * step)
                    scale = max(abs(fd), 1.0)
                    worst_grad = max(worst_grad, abs(F[i, k] - fd) / scale)
            com = (masses.as_array()[:, None] * pos).sum(axis=0) / masses.total
            torque = np.sum(np.cross(pos - com, F), axis=0)
            worst_inv = max(
                worst_inv,
                float(np.max(np.abs(F.sum(axis=0)))),
                float(np.max(np.abs(torque))),
            )
    ok = worst_grad < _tol(1e-6) and worst_inv < _tol(1e-10)
    return ok, (
        f"max gradient mismatch {worst_grad:.3e} (tol {_tol(1e-6):.1e}), "
        f"max force/torque residual {worst_inv:.3e} (tol {_tol(1e-10):.1e})"
    )


SUITES = [
    ("so3", suite_so3),
    ("equivariance", suite_equivariance),
    ("tensor_oracle", suite_tensor_oracle),
    ("energy_identity", suite_energy_identity),
    ("collinear_limit", suite_collinear_limit),
    ("singular_term", suite_singular_term),
    ("legendre_roundtrip", suite_legendre_roundtrip),
    ("trajectory_conservation", suite_trajectory_conservation),
    ("parser", suite_parser),
]


def run_all(seed=DEFAULT_SEED):
    """Run every suite; yields (name, ok, detail)."""
    for name, fn in SUITES:
        try:
            ok, detail = fn(seed=seed)
        except Exception as exc:  # a crashing suite is a failing suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        yield name, ok, detail
