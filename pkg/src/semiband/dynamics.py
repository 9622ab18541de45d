"""Covariant variables, Berry curvatures and semiclassical ray tracing.

The covariant position and momentum are the canonical variables shifted by
the block-projected connections,

    r = R + hbar A0^R + (hbar^2/2) A1^R,      p likewise,

with A0 = P+ A0^X and A1 twice the projected connection correction plus the
symmetrized self-gradient (A0 . grad) A0 term.  Their commutators define the
curvature set

    Theta^rr_ij =  grad_{P_i} a^R_j - grad_{P_j} a^R_i - i [a^R_i, a^R_j]
    Theta^pp_ij = -(grad_{R_i} a^P_j - grad_{R_j} a^P_i) - i [a^P_i, a^P_j]
    Theta^pr_ij = -(grad_{R_i} a^R_j + grad_{P_j} a^P_i) - i [a^P_i, a^R_j]

where a = A0 + (hbar/2) A1 is the shift per unit hbar.

Rays live on one band group and one helicity; the scalar band curvature that
sources the anomalous velocity is the helicity expectation of the curl of the
band-projected connection, which for the massless model equals
-lambda P / |P|^3.  The ray equations are

    Pdot = -grad_r eps,      rdot = grad_P eps + hbar Pdot x Theta,

which conserve eps exactly in continuum time; the integrator also transports
the band spinor with the momentum-space connection so that the reported
helicity drift measures integrator error only.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from semiband.models import Model, NeutrinoMetric, PhasePoint
from semiband.frames import (
    BandFrame,
    Tolerances,
    DEFAULT_TOL,
    berry_connections,
    classical_frame,
    project,
)
from semiband.energy import (
    connection_component_gradients,
    corrected_connections,
    rotation_generator,
)
from semiband.stencils import FDDiagnostics, derivative_along

__all__ = [
    "CovariantVars",
    "CurvatureSet",
    "TrajectoryState",
    "Trajectory",
    "covariant_variables",
    "berry_curvatures",
    "band_curvature_vector",
    "positive_block_connection",
    "ray_energy",
    "ray_rhs",
    "integrate_ray",
    "rk4_step",
    "integrate_fixed",
]


def _comm(a, b):
    return a @ b - b @ a


def _anticomm(a, b):
    return a @ b + b @ a


@dataclass
class CovariantVars:
    """Matrix-valued covariant coordinates and momenta at one point."""

    r: list                         # 3 Hermitian (n, n) matrices
    p: list
    A0_R: list                      # projected order-0 shifts
    A0_P: list
    A1_R: list                      # order-1 shift coefficients
    A1_P: list
    point: PhasePoint
    hbar: float

    def shift_per_hbar(self, axis: int) -> np.ndarray:
        """a = A0 + (hbar/2) A1 along one phase axis."""
        if axis < 3:
            return self.A0_R[axis] + 0.5 * self.hbar * self.A1_R[axis]
        return self.A0_P[axis - 3] + 0.5 * self.hbar * self.A1_P[axis - 3]


@dataclass
class CurvatureSet:
    """3x3 arrays of matrices for the rr, pp and pr curvature blocks."""

    theta_rr: np.ndarray            # (3, 3, n, n)
    theta_pp: np.ndarray
    theta_pr: np.ndarray
    point: PhasePoint
    hbar: float
    diagnostics: FDDiagnostics = dc_field(default_factory=FDDiagnostics)


def covariant_variables(model: Model, x: PhasePoint, hbar: float,
                        tol: Tolerances = DEFAULT_TOL,
                        frame: BandFrame | None = None) -> CovariantVars:
    """Covariant variables with their order-0 and order-1 shift records."""
    if frame is None:
        frame = classical_frame(model, x, tol)
    conns0 = berry_connections(model, x, hbar, frame=frame, tol=tol)
    diag = FDDiagnostics()
    conn_grads = connection_component_gradients(model, x, hbar, frame, tol, diag)
    B = rotation_generator(model, frame, conns0, tol)
    conns = corrected_connections(model, frame, conns0, B, hbar, tol,
                                  conn_grads, diag)
    g = frame.groups
    A0 = [project(conns0.component(axis), g, "diag") for axis in range(6)]
    A1 = []
    for comp in range(6):
        a1 = 2.0 * project(conns.linear_part[comp], g, "diag")
        for axis in range(6):
            grad_proj = project(conn_grads[axis][comp], g, "diag")
            a1 = a1 + 0.5 * _anticomm(A0[axis], grad_proj)
        A1.append(0.5 * (a1 + a1.conj().T))
    n = frame.n
    r = [x.R[i] * np.eye(n) + hbar * A0[i] + 0.5 * hbar ** 2 * A1[i]
         for i in range(3)]
    p = [x.P[i] * np.eye(n) + hbar * A0[3 + i] + 0.5 * hbar ** 2 * A1[3 + i]
         for i in range(3)]
    return CovariantVars(r, p, A0[:3], A0[3:], A1[:3], A1[3:], x, hbar)


def berry_curvatures(model: Model, x: PhasePoint, hbar: float,
                     tol: Tolerances = DEFAULT_TOL) -> CurvatureSet:
    """Curvature set from the covariant shift field and its commutators."""
    frame = classical_frame(model, x, tol)
    diag = FDDiagnostics()

    def shifts(y: PhasePoint) -> np.ndarray:
        cov = covariant_variables(model, y, hbar, tol)
        return np.stack([cov.shift_per_hbar(axis) for axis in range(6)])

    a0 = shifts(x)
    grads = [derivative_along(shifts, x, axis, tol.fd_base, diag)
             for axis in range(6)]
    n = frame.n
    rr = np.zeros((3, 3, n, n), dtype=complex)
    pp = np.zeros((3, 3, n, n), dtype=complex)
    pr = np.zeros((3, 3, n, n), dtype=complex)
    for i in range(3):
        for j in range(3):
            rr[i, j] = (grads[3 + i][j] - grads[3 + j][i]
                        - 1j * _comm(a0[i], a0[j]))
            pp[i, j] = (-(grads[i][3 + j] - grads[j][3 + i])
                        - 1j * _comm(a0[3 + i], a0[3 + j]))
            pr[i, j] = (-(grads[i][j] + grads[3 + j][3 + i])
                        - 1j * _comm(a0[3 + i], a0[j]))
    return CurvatureSet(rr, pp, pr, x, hbar, diag)


def _helicity_spinor(P: np.ndarray, lam: int) -> np.ndarray:
    """Normalized eigenvector of sigma.Phat with eigenvalue lam (+1 or -1)."""
    phat = P / np.linalg.norm(P)
    sp = np.array([[phat[2], phat[0] - 1j * phat[1]],
                   [phat[0] + 1j * phat[1], -phat[2]]])
    vals, vecs = np.linalg.eigh(sp)
    idx = int(np.argmin(np.abs(vals - lam)))
    return vecs[:, idx]


def positive_block_connection(model: Model, x: PhasePoint,
                              tol: Tolerances = DEFAULT_TOL) -> list:
    """The position connection projected to the positive-energy block (2x2)."""
    frame = classical_frame(model, x, tol)
    conns = berry_connections(model, x, 0.0, frame=frame, tol=tol)
    pos = frame.group_states(0)
    return [project(conns.A_R[l], frame.groups, "diag")[np.ix_(pos, pos)]
            for l in range(3)]


def band_curvature_vector(model: Model, x: PhasePoint, lam: int,
                          tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Scalar band curvature Theta_k on the helicity-lam positive band.

    Helicity expectation of the curl of the band-projected connection; for
    the massless model this equals -lam P / |P|^3 at every P.
    """
    frame = classical_frame(model, x, tol)
    pos = frame.group_states(0)
    diag = FDDiagnostics()

    def proj_conn(y: PhasePoint) -> np.ndarray:
        conns = berry_connections(model, y, 0.0, tol=tol)
        stack = [project(conns.A_R[l], frame.groups, "diag")[np.ix_(pos, pos)]
                 for l in range(3)]
        return np.stack(stack)

    dP = [derivative_along(proj_conn, x, 3 + i, tol.fd_base, diag)
          for i in range(3)]
    chi = _helicity_spinor(x.P, lam)
    theta = np.zeros(3)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        curl = dP[i][j] - dP[j][i]
        theta[k] = float(np.real(chi.conj() @ curl @ chi))
    return theta


# ---------------------------------------------------------------------------
# Ray equations (positive band, fixed helicity)
# ---------------------------------------------------------------------------

def ray_energy(model: NeutrinoMetric, r: np.ndarray, P: np.ndarray,
               hbar: float) -> float:
    """Positive-band scalar energy F(r)|P| - (hbar^2/4|P|) P.grad F."""
    E = float(np.linalg.norm(P))
    if E == 0.0:
        raise ValueError("|P| underflow in ray energy")
    F = model.F.value(r)
    gF = model.F.gradient(r)
    return F * E - (hbar ** 2 / (4 * E)) * float(P @ gF)


def _check_ray_model(model: Model) -> NeutrinoMetric:
    if not isinstance(model, NeutrinoMetric):
        raise NotImplementedError(
            "ray tracing is implemented for the massless graded-index model"
        )
    return model


def ray_rhs(r: np.ndarray, P: np.ndarray, lam: int, model: Model,
            hbar: float):
    """(rdot, Pdot) for the fixed-helicity positive band.

    Pdot carries no anomalous term and is computed first; the anomalous
    velocity is hbar Pdot x Theta with Theta = -lam P/|P|^3.
    """
    model = _check_ray_model(model)
    E = float(np.linalg.norm(P))
    if E < 1e-12:
        raise ValueError("|P| underflow along the ray")
    F = model.F.value(r)
    gF = model.F.gradient(r)
    hF = model.F.hessian(r)
    grad_r = E * gF - (hbar ** 2 / (4 * E)) * (hF @ P)
    Pdot = -grad_r
    grad_P = F * P / E - (hbar ** 2 / 4.0) * (gF / E - float(P @ gF) * P / E ** 3)
    theta = -lam * P / E ** 3
    rdot = grad_P + hbar * np.cross(Pdot, theta)
    return rdot, Pdot


@dataclass
class TrajectoryState:
    t: float
    r: np.ndarray
    P: np.ndarray
    lam: int
    helicity: float
    eps: float
    speed: float


@dataclass
class Trajectory:
    states: list
    lam: int
    hbar: float
    method: str
    helicity_drift: float
    energy_drift: float
    rejected_steps: int = 0

    def final(self) -> TrajectoryState:
        return self.states[-1]


# -- generic fixed-step RK4 -------------------------------------------------

def rk4_step(f, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + dt / 2, y + dt / 2 * k1)
    k3 = f(t + dt / 2, y + dt / 2 * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_fixed(f, t0: float, y0: np.ndarray, dt: float, steps: int):
    """Classic RK4; returns the list of (t, y) including the initial state."""
    out = [(t0, np.asarray(y0, dtype=float).copy())]
    t, y = t0, np.asarray(y0, dtype=float).copy()
    for _ in range(steps):
        y = rk4_step(f, t, y, dt)
        t += dt
        out.append((t, y.copy()))
    return out


# Cash-Karp embedded 5(4) pair.
_CK_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [3 / 10, -9 / 10, 6 / 5],
    [-11 / 54, 5 / 2, -70 / 27, 35 / 27],
    [1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096],
]
_CK_B5 = [37 / 378, 0, 250 / 621, 125 / 594, 0, 512 / 1771]
_CK_B4 = [2825 / 27648, 0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4]


def _rk45_step(f, t, y, dt):
    ks = [f(t, y)]
    for i in range(1, 6):
        yi = y + dt * sum(a * k for a, k in zip(_CK_A[i], ks))
        ks.append(f(t + dt * sum(_CK_A[i]), yi))
    y5 = y + dt * sum(b * k for b, k in zip(_CK_B5, ks))
    y4 = y + dt * sum(b * k for b, k in zip(_CK_B4, ks))
    return y5, float(np.max(np.abs(y5 - y4)))


def _integrate_rk45(f, t0, y0, t_end, rtol=1e-10, atol=1e-12,
                    max_rejections=2000):
    t, y = t0, np.asarray(y0, dtype=float).copy()
    dt = (t_end - t0) / 100
    out = [(t, y.copy())]
    rejected = 0
    while t < t_end - 1e-15 * max(1.0, abs(t_end)):
        dt = min(dt, t_end - t)
        y_new, err = _rk45_step(f, t, y, dt)
        scale = atol + rtol * float(np.max(np.abs(y)))
        if err <= scale or dt <= 1e-14:
            t += dt
            y = y_new
            out.append((t, y.copy()))
            factor = 2.0 if err == 0 else min(2.0, 0.9 * (scale / err) ** 0.2)
            dt *= factor
        else:
            rejected += 1
            if rejected > max_rejections:
                raise RuntimeError("rk45 step rejection overflow")
            dt *= max(0.1, 0.9 * (scale / err) ** 0.25)
    return out, rejected


def integrate_ray(model: Model, r0, P0, lam: int, hbar: float, dt: float,
                  steps: int, method: str = "rk4",
                  rtol: float = 1e-10) -> Trajectory:
    """Integrate the fixed-helicity ray together with the band spinor.

    The state is (r, P, chi); chi is transported with chidot = i Pdot.a chi
    where a is the positive-block momentum-space connection, so the helicity
    expectation <sigma.Phat> is conserved in continuum time.  Its drift and
    the energy drift along the run are reported on the trajectory.
    """
    model = _check_ray_model(model)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if lam not in (+1, -1):
        raise ValueError("lam must be +1 or -1")
    r0 = np.asarray(r0, dtype=float).reshape(3)
    P0 = np.asarray(P0, dtype=float).reshape(3)
    chi0 = _helicity_spinor(P0, lam)

    def pack(r, P, chi):
        return np.concatenate([r, P, chi.real, chi.imag])

    def unpack(y):
        return y[0:3], y[3:6], y[6:8] + 1j * y[8:10]

    def rhs(_t, y):
        r, P, chi = unpack(y)
        rdot, Pdot = ray_rhs(r, P, lam, model, hbar)
        E2 = float(P @ P)
        pxs = _p_cross_sigma(P)
        gen = sum(Pdot[l] * pxs[l] for l in range(3)) / (2 * E2)
        chidot = 1j * gen @ chi
        return pack(rdot, Pdot, chidot)

    y0 = pack(r0, P0, chi0)
    if method == "rk4":
        samples = integrate_fixed(rhs, 0.0, y0, dt, steps)
        rejected = 0
    elif method == "rk45":
        samples, rejected = _integrate_rk45(rhs, 0.0, y0, dt * steps,
                                            rtol=rtol)
    else:
        raise ValueError("method must be 'rk4' or 'rk45'")

    states = []
    for t, y in samples:
        r, P, chi = unpack(y)
        phat = P / np.linalg.norm(P)
        sp = np.array([[phat[2], phat[0] - 1j * phat[1]],
                       [phat[0] + 1j * phat[1], -phat[2]]])
        norm = float(np.real(chi.conj() @ chi))
        hel = float(np.real(chi.conj() @ sp @ chi)) / norm
        eps = ray_energy(model, r, P, hbar)
        rdot, _ = ray_rhs(r, P, lam, model, hbar)
        states.append(TrajectoryState(t, r.copy(), P.copy(), lam, hel, eps,
                                      float(np.linalg.norm(rdot))))
    hel0, eps0 = states[0].helicity, states[0].eps
    drift = max(abs(s.helicity - hel0) for s in states)
    edrift = max(abs(s.eps - eps0) for s in states)
    return Trajectory(states, lam, hbar, method, drift, edrift, rejected)


_SIG = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def _p_cross_sigma(P: np.ndarray) -> list:
    """(P x sigma)_l as 2x2 matrices."""
    return [P[1] * _SIG[2] - P[2] * _SIG[1],
            P[2] * _SIG[0] - P[0] * _SIG[2],
            P[0] * _SIG[1] - P[1] * _SIG[0]]
