"""Covariant variables, curvatures and the ray integrator."""

import numpy as np
import pytest

from semiband.fields import GaussianField, LinearField, UniformField
from semiband.models import BETA, DiracElectric, NeutrinoMetric, PhasePoint
from semiband.dynamics import (
    band_curvature_vector,
    berry_curvatures,
    covariant_variables,
    integrate_fixed,
    integrate_ray,
    positive_block_connection,
    ray_energy,
    ray_rhs,
)
from semiband.oracles import neutrino_velocity_modulus
from tests.test_models import p_cross_sigma

GAUSS = GaussianField(0.8, [0.2, -0.1, 0.3], 1.4)
X = PhasePoint.of([0.1, 0.2, 0.3], [0.4, -0.7, 0.5])


def neutrino(profile=None):
    return NeutrinoMetric(profile=profile or LinearField([0.05, -0.02, 0.03], 1.5))


def test_covariant_vars_neutrino_closed_form():
    model = neutrino()
    hbar = 0.05
    cov = covariant_variables(model, X, hbar)
    E = np.linalg.norm(X.P)
    pxs = p_cross_sigma(X.P)
    for i in range(3):
        assert np.allclose(cov.r[i], X.R[i] * np.eye(4)
                           + hbar * pxs[i] / (2 * E ** 2), atol=1e-12)
        assert np.allclose(cov.p[i], X.P[i] * np.eye(4), atol=1e-12)


def test_covariant_vars_dirac_closed_form():
    model = DiracElectric(m=1.0, e=1.0, field=GAUSS)
    hbar = 0.05
    cov = covariant_variables(model, X, hbar)
    E = model.energy_scale(X)
    gW = model.field.gradient(X.R)
    pxs = p_cross_sigma(X.P)
    for i in range(3):
        shift2 = 0.5 * hbar ** 2 * BETA * (
            E ** 2 * gW[i] - float(X.P @ gW) * X.P[i]) / (4 * E ** 5)
        closed = X.R[i] * np.eye(4) + hbar * pxs[i] / (2 * E * (E + 1)) + shift2
        assert np.max(np.abs(cov.r[i] - closed)) <= 1e-10
        assert np.allclose(cov.p[i], X.P[i] * np.eye(4), atol=1e-12)


def test_covariant_vars_classical_limit():
    cov = covariant_variables(neutrino(), X, 0.0)
    for i in range(3):
        assert np.allclose(cov.r[i], X.R[i] * np.eye(4))
        assert np.allclose(cov.p[i], X.P[i] * np.eye(4))


def test_covariant_vars_hermitian():
    cov = covariant_variables(DiracElectric(m=1.0, e=1.0, field=GAUSS), X, 0.05)
    for comp in cov.r + cov.p:
        assert np.max(np.abs(comp - comp.conj().T)) <= 1e-12


def test_curvature_antisymmetry_and_fd_consistency():
    model = neutrino()
    cs = berry_curvatures(model, X, 0.02)
    assert np.max(np.abs(cs.theta_rr + cs.theta_rr.transpose(1, 0, 2, 3))) <= 1e-14
    assert np.max(np.abs(cs.theta_pp + cs.theta_pp.transpose(1, 0, 2, 3))) <= 1e-14
    # Independent finite-difference evaluation of the same commutator algebra,
    # with plain second-order stencils on the covariant shift components.
    hbar = 0.02
    h = 1e-4

    def shift(y, axis):
        cov = covariant_variables(model, y, hbar)
        return cov.shift_per_hbar(axis)

    for i, j in ((0, 1), (1, 2)):
        dPi_aj = (shift(X.shifted(3 + i, h), j)
                  - shift(X.shifted(3 + i, -h), j)) / (2 * h)
        dPj_ai = (shift(X.shifted(3 + j, h), i)
                  - shift(X.shifted(3 + j, -h), i)) / (2 * h)
        a_i, a_j = shift(X, i), shift(X, j)
        ref = dPi_aj - dPj_ai - 1j * (a_i @ a_j - a_j @ a_i)
        assert np.max(np.abs(cs.theta_rr[i, j] - ref)) <= 1e-6


def test_curvature_free_dirac_pp_vanishes():
    model = DiracElectric(m=1.0, e=1.0, field=UniformField(0.0))
    cs = berry_curvatures(model, PhasePoint.of([0, 0, 0], [0, 0, 0.8]), 0.02)
    assert np.max(np.abs(cs.theta_pp)) <= 1e-10


def test_band_curvature_closed_form():
    model = neutrino(GaussianField(0.4, [0.3, 0.1, -0.2], 2.0))
    rng = np.random.default_rng(31)
    for _ in range(10):
        P = rng.uniform(-1, 1, 3)
        P *= rng.uniform(0.4, 2.5) / np.linalg.norm(P)
        x = PhasePoint.of(rng.uniform(-1, 1, 3), P)
        for lam in (+1, -1):
            theta = band_curvature_vector(model, x, lam)
            ref = -lam * P / np.linalg.norm(P) ** 3
            assert np.max(np.abs(theta - ref)) <= 1e-8 * np.max(np.abs(ref))


def test_positive_block_connection_closed_form():
    model = neutrino()
    a = positive_block_connection(model, X)
    E = np.linalg.norm(X.P)
    pxs = p_cross_sigma(X.P)
    for l in range(3):
        assert np.allclose(a[l], pxs[l][:2, :2] / (2 * E ** 2), atol=1e-12)


def test_ray_rhs_flat_space():
    model = neutrino(UniformField(1.0))
    rdot, Pdot = ray_rhs(np.zeros(3), np.array([0, 0, 2.0]), +1, model, 1e-3)
    assert np.allclose(Pdot, 0.0)
    assert np.allclose(rdot, [0, 0, 1.0])


def test_ray_rhs_rejects_other_models():
    with pytest.raises(NotImplementedError):
        ray_rhs(np.zeros(3), np.array([0, 0, 1.0]), 1,
                DiracElectric(m=1.0, e=1.0), 1e-3)


def test_ray_rhs_momentum_underflow():
    with pytest.raises(ValueError):
        ray_rhs(np.zeros(3), np.zeros(3), 1, neutrino(), 1e-3)


def test_flat_ray_is_exact():
    model = neutrino(UniformField(1.0))
    traj = integrate_ray(model, [0, 0, 0], [0, 0, 2.0], +1, 1e-3, 1e-3,
                         10000, "rk4")
    fin = traj.final()
    assert np.max(np.abs(fin.r - np.array([0, 0, 10.0]))) <= 1e-10
    assert traj.helicity_drift <= 1e-12
    assert traj.energy_drift <= 1e-12


def test_spin_hall_antisymmetry_and_conservation():
    model = neutrino(LinearField([0.05, 0.0, 0.0], 1.5))
    hbar = 1e-3
    up = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, hbar, 1e-2, 2000)
    dn = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], -1, hbar, 1e-2, 2000)
    # Transverse (y) displacement flips sign with the helicity.
    assert abs(up.final().r[1] + dn.final().r[1]) <= 1e-9
    assert abs(up.final().r[1]) > 1e-5  # and is actually nonzero
    assert up.helicity_drift <= 1e-9
    assert up.energy_drift <= 1e-8


def test_velocity_modulus_along_path():
    model = neutrino(LinearField([0.05, 0.0, 0.0], 1.5))
    hbar = 1e-3
    traj = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, hbar, 1e-2, 500)
    for s in traj.states[::50]:
        ref = neutrino_velocity_modulus(s.r, s.P, model, hbar, s.lam)
        assert abs(s.speed - ref) <= 1e-8


def test_rk45_matches_rk4():
    model = neutrino(GaussianField(0.3, [2.0, 0.5, 0.0], 2.5))
    t_rk4 = integrate_ray(model, [0, 0, 0], [0.2, 0, 1.0], +1, 1e-3, 1e-2,
                          500, "rk4")
    t_rk45 = integrate_ray(model, [0, 0, 0], [0.2, 0, 1.0], +1, 1e-3, 1e-2,
                           500, "rk45")
    assert np.max(np.abs(t_rk45.final().r - t_rk4.final().r)) <= 1e-7
    assert t_rk45.final().t == pytest.approx(5.0, abs=1e-12)


def test_integrate_validation():
    model = neutrino()
    with pytest.raises(ValueError):
        integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, 1e-3, -0.1, 10)
    with pytest.raises(ValueError):
        integrate_ray(model, [0, 0, 0], [0, 0, 1.0], 2, 1e-3, 0.1, 10)
    with pytest.raises(ValueError):
        integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, 1e-3, 0.1, 10,
                      "euler")


def test_rk4_convergence_order():
    omega = np.array([0.3, -0.2, 0.7])

    def rot(_t, y):
        return np.cross(omega, y)

    y0 = np.array([1.0, 0.2, -0.4])
    T = 2.0
    errs, dts = [], []
    for nsteps in (50, 100, 200, 400):
        dt = T / nsteps
        yT = integrate_fixed(rot, 0.0, y0, dt, nsteps)[-1][1]
        w = np.linalg.norm(omega)
        k = omega / w
        ang = w * T
        exact = (y0 * np.cos(ang) + np.cross(k, y0) * np.sin(ang)
                 + k * (k @ y0) * (1 - np.cos(ang)))
        errs.append(np.linalg.norm(yT - exact))
        dts.append(dt)
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 4.0) <= 0.2


def test_trajectory_self_convergence():
    model = neutrino(GaussianField(0.3, [2.0, 0.5, 0.0], 2.5))

    def final_r(nsteps):
        dt = 2.0 / nsteps
        return integrate_ray(model, [0, 0, 0], [0.2, 0, 1.0], +1, 1e-3,
                             dt, nsteps).final().r

    ref = final_r(3200)
    errs = [np.max(np.abs(final_r(n) - ref)) for n in (50, 100, 200)]
    slope = np.polyfit(np.log([2.0 / n for n in (50, 100, 200)]),
                       np.log(errs), 1)[0]
    assert abs(slope - 4.0) <= 0.3


def test_energy_record_matches_ray_energy():
    model = neutrino(LinearField([0.05, 0.0, 0.0], 1.5))
    traj = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, 1e-3, 1e-2, 50)
    s = traj.states[25]
    assert s.eps == pytest.approx(ray_energy(model, s.r, s.P, 1e-3), abs=1e-14)
