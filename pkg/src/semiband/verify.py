"""Verification suites: oracle comparisons, invariants and scaling checks.

Each suite returns a `SuiteResult` with measured metrics and a pass flag at
its contract tolerance; the `verify` CLI subcommand and the acceptance test
module both run these.  All randomness is drawn from a caller-supplied seed so
reports are reproducible bit for bit.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from semiband import weyl
from semiband.fields import GaussianField, LinearField, UniformField
from semiband.models import DiracElectric, NeutrinoMetric, PhasePoint
from semiband.frames import (
    ConnectionSet,
    berry_connections,
    classical_frame,
    connections_fd,
    invert_band_commutator,
    project,
)
from semiband.energy import (
    apply_energy_flow_operator,
    band_energy,
    connection_component_gradients,
    corrected_connections,
    frame_first_order,
    rotation_generator,
)
from semiband.dynamics import (
    band_curvature_vector,
    integrate_fixed,
    integrate_ray,
)
from semiband.oracles import (
    dirac_energy_canonical_oracle,
    dirac_energy_covariant_oracle,
    neutrino_energy_canonical_oracle,
    neutrino_energy_oracle,
    neutrino_velocity_modulus,
    pauli_energy_oracle,
)
from semiband.stencils import FDDiagnostics, derivative_along
from semiband.frames import DEFAULT_TOL as DEFAULT_TOL_REF

__all__ = ["SuiteResult", "ALL_SUITES", "run_suites", "ACCEPTANCE_ORDER",
           "covariant_reexpansion"]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = dc_field(default_factory=dict)
    details: str = ""

    # Wall-clock measurements stay out of the serialized report so identical
    # config and seed produce byte-identical files.
    _EXCLUDED = ("runtime_s",)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "metrics": {k: float(v) for k, v in self.metrics.items()
                            if k not in self._EXCLUDED},
                "details": self.details}


def _dirac_model(amplitude: float = 0.8) -> DiracElectric:
    field = GaussianField(amplitude=amplitude, center=[0.2, -0.1, 0.3], width=1.4)
    return DiracElectric(m=1.0, e=1.0, field=field)


def _random_points(rng: np.random.Generator, count: int, pmin: float,
                   pmax: float):
    pts = []
    for _ in range(count):
        R = rng.uniform(-1.0, 1.0, 3)
        P = rng.uniform(-1.0, 1.0, 3)
        P *= rng.uniform(pmin, pmax) / np.linalg.norm(P)
        pts.append(PhasePoint.of(R, P))
    return pts


def _rel_err(got: np.ndarray, ref: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(ref))), 1e-300)
    return float(np.max(np.abs(got - ref))) / scale


# ---------------------------------------------------------------------------
# Symbolic calculus (criterion: exact residuals on random cases)
# ---------------------------------------------------------------------------

def suite_bracket_product_rule(seed: int = 1, cases: int = 200,
                               max_degree: int = 6, **_cfg) -> SuiteResult:
    """Product rule of the ordering bracket: residual exactly zero."""
    failures = 0
    for dim in (1, 2):
        rng = random.Random(seed + dim)
        for _ in range(cases // 2):
            f = weyl.random_factorization(rng, n=dim, max_degree=max_degree)
            g = weyl.random_factorization(rng, n=dim, max_degree=max_degree)
            if not weyl.bracket_product_residual(f, g).is_zero():
                failures += 1
    return SuiteResult("bracket-product-rule", failures == 0,
                       {"cases": cases, "failures": failures})


def suite_bracket_invariance(seed: int = 2, cases: int = 200,
                             max_degree: int = 5, **_cfg) -> SuiteResult:
    """Symmetrization invariance of d/dhbar F + <F>: residual exactly zero."""
    failures = 0
    for dim in (1, 2):
        rng = random.Random(seed + dim)
        for _ in range(cases // 2):
            f = weyl.random_factorization(rng, n=dim, max_degree=max_degree)
            g = weyl.random_resymmetrization(rng, f)
            if not weyl.invariant_derivative_residual(f, g).is_zero():
                failures += 1
    return SuiteResult("bracket-invariance", failures == 0,
                       {"cases": cases, "failures": failures})


def suite_symmetrized_bracket(seed: int = 3, **_cfg) -> SuiteResult:
    """Bracket of fully symmetrized monomials vanishes exactly (degree <= 5)."""
    rng = random.Random(seed)
    failures = 0
    cases = 0
    for _ in range(25):
        exps = [0] * 6
        for _ in range(rng.randint(2, 5)):
            exps[rng.randrange(6)] += 1
        r_exp, p_exp = tuple(exps[:3]), tuple(exps[3:])
        if sum(r_exp) == 0 or sum(p_exp) == 0:
            continue
        cases += 1
        if not weyl.symmetrized_bracket(r_exp, p_exp).is_zero():
            failures += 1
    return SuiteResult("symmetrized-bracket", failures == 0,
                       {"cases": cases, "failures": failures})


# ---------------------------------------------------------------------------
# Oracle equivalence
# ---------------------------------------------------------------------------

def suite_dirac_canonical(seed: int = 10, points: int = 100,
                          hbar: float = 0.01, tolerance: float = 1e-8,
                          **_cfg) -> SuiteResult:
    """Generic pipeline vs the closed-form block energy, canonical variables."""
    model = _dirac_model()
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for x in _random_points(rng, points, 0.1, 10.0):
        rep = band_energy(model, x, hbar, order=2, representation="canonical")
        ref = dirac_energy_canonical_oracle(x, model.m, model.e, model.field, hbar)
        worst = max(worst, _rel_err(rep.eps, ref))
    elapsed = time.perf_counter() - start
    return SuiteResult("dirac-canonical-oracle",
                       worst <= tolerance and elapsed < 10.0,
                       {"points": points, "max_rel_err": worst,
                        "runtime_s": elapsed,
                        "runtime_within_budget": float(elapsed < 10.0),
                        "tolerance": tolerance})


def suite_dirac_covariant(seed: int = 11, points: int = 100,
                          hbar: float = 0.01, tolerance: float = 1e-8,
                          **_cfg) -> SuiteResult:
    """Pipeline in covariant variables vs the relativistic closed form."""
    model = _dirac_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in _random_points(rng, points, 0.1, 10.0):
        rep = band_energy(model, x, hbar, order=2, representation="covariant")
        ref = dirac_energy_covariant_oracle(x, model.m, model.e, model.field, hbar)
        worst = max(worst, _rel_err(rep.eps, ref))
    return SuiteResult("dirac-covariant-oracle", worst <= tolerance,
                       {"points": points, "max_rel_err": worst,
                        "tolerance": tolerance})


def suite_pauli_limit(seed: int = 12, hbar: float = 1e-3,
                      tolerance: float = 1e-4, **_cfg) -> SuiteResult:
    """Low-momentum limit: contact (hbar^2 lap W) and spin-orbit coefficients.

    Coefficients are extracted from the positive block of the pipeline energy
    on a |P|/m sweep in [1e-3, 1e-2] and extrapolated to P = 0 with a
    quadratic fit; the references are hbar^2/(8 m^2) and hbar/(4 m^2).
    """
    m, e = 1.0, 1.0
    rng = np.random.default_rng(seed)
    ts = np.linspace(1e-3, 1e-2, 6)
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)

    # Contact coefficient: evaluate at the field maximum where grad W = 0.
    center = np.array([0.1, -0.2, 0.25])
    field_c = GaussianField(amplitude=0.05, center=center, width=1.2)
    model_c = DiracElectric(m=m, e=e, field=field_c)
    lap = e * field_c.laplacian(center)
    darwin = []
    for t in ts:
        x = PhasePoint.of(center, t * m * direction)
        rep = band_energy(model_c, x, hbar, order=2)
        block = rep.second[:2, :2]
        darwin.append(float(np.real(np.trace(block)) / 2.0) / (hbar ** 2 * lap))
    fit = np.polyfit(ts ** 2, darwin, 1)
    darwin_coef = fit[1] * hbar ** 2
    darwin_ref = hbar ** 2 / (8 * m ** 2)
    darwin_err = abs(darwin_coef - darwin_ref) / darwin_ref

    # Spin-orbit coefficient against the sigma.(grad W x P) structure.
    field_s = GaussianField(amplitude=0.05, center=[1.0, 0.4, -0.3], width=1.5)
    model_s = DiracElectric(m=m, e=e, field=field_s)
    R0 = np.zeros(3)
    gW = e * field_s.gradient(R0)
    sig = [np.array([[0, 1], [1, 0]], complex),
           np.array([[0, -1j], [1j, 0]], complex),
           np.array([[1, 0], [0, -1]], complex)]
    so = []
    for t in ts:
        P = t * m * direction
        x = PhasePoint.of(R0, P)
        rep = band_energy(model_s, x, hbar, order=1)
        block = rep.first[:2, :2]
        M = sum(np.cross(gW, P)[k] * sig[k] for k in range(3))
        so.append(float(np.real(np.trace(block @ M.conj().T)
                                / np.trace(M @ M.conj().T))))
    fit = np.polyfit(ts ** 2, so, 1)
    so_coef = fit[1]
    so_ref = hbar / (4 * m ** 2)
    so_err = abs(so_coef - so_ref) / so_ref

    # The same limit, checked once against the dedicated low-momentum oracle
    # (rest mass subtracted; the residual gap is higher order in |P|/m and
    # quadratic in the field).
    x = PhasePoint.of(R0, 5e-3 * m * direction)
    rep = band_energy(model_s, x, hbar, order=2)
    pauli = pauli_energy_oracle(x, m, e, field_s, hbar)
    block = rep.eps[:2, :2] - m * np.eye(2)
    pauli_gap = float(np.max(np.abs(block - pauli)))

    passed = darwin_err <= tolerance and so_err <= tolerance
    return SuiteResult("pauli-darwin-limit", passed,
                       {"darwin_rel_err": darwin_err,
                        "spin_orbit_rel_err": so_err,
                        "pauli_oracle_gap": pauli_gap,
                        "tolerance": tolerance})


def _neutrino_profiles():
    return {
        "linear": NeutrinoMetric(profile=LinearField([0.05, -0.02, 0.03], 1.5)),
        "gaussian": NeutrinoMetric(profile=GaussianField(
            amplitude=0.4, center=[0.3, 0.1, -0.2], width=2.0,
        )),
    }


def suite_neutrino_energy(seed: int = 13, points: int = 100,
                          hbar: float = 0.01, tolerance: float = 1e-8,
                          **_cfg) -> SuiteResult:
    """Pipeline vs the covariant closed form and its canonical re-expansion."""
    rng = np.random.default_rng(seed)
    worst_cov = worst_can = 0.0
    for label, model in _neutrino_profiles().items():
        for x in _random_points(rng, points // 2, 0.3, 5.0):
            rep = band_energy(model, x, hbar, order=2,
                              representation="covariant")
            ref = neutrino_energy_oracle(x, model, hbar)
            worst_cov = max(worst_cov, _rel_err(rep.eps, ref))
            rep = band_energy(model, x, hbar, order=2,
                              representation="canonical")
            ref = neutrino_energy_canonical_oracle(x, model, hbar)
            worst_can = max(worst_can, _rel_err(rep.eps, ref))
    passed = worst_cov <= tolerance and worst_can <= tolerance
    return SuiteResult("neutrino-energy-oracle", passed,
                       {"points": points, "max_rel_err_covariant": worst_cov,
                        "max_rel_err_canonical": worst_can,
                        "tolerance": tolerance})


def suite_neutrino_curvature(seed: int = 14, points: int = 50,
                             tolerance: float = 1e-8, **_cfg) -> SuiteResult:
    """Band curvature against -lambda P / |P|^3 at random momenta."""
    model = _neutrino_profiles()["gaussian"]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in _random_points(rng, points, 0.3, 3.0):
        for lam in (+1, -1):
            theta = band_curvature_vector(model, x, lam)
            ref = -lam * x.P / np.linalg.norm(x.P) ** 3
            worst = max(worst, float(np.max(np.abs(theta - ref))
                                     / np.max(np.abs(ref))))
    return SuiteResult("neutrino-curvature", worst <= tolerance,
                       {"points": points, "max_rel_err": worst,
                        "tolerance": tolerance})


def suite_trajectory(seed: int = 15, steps: int = 10000, hbar: float = 1e-3,
                     dt: float = 1e-2, **_cfg) -> SuiteResult:
    """Ray-tracing physics: conservation, spin-Hall antisymmetry, speed."""
    model = NeutrinoMetric(profile=LinearField([0.05, 0.0, 0.0], 1.5))
    up = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], +1, hbar, dt, steps, "rk4")
    dn = integrate_ray(model, [0, 0, 0], [0, 0, 1.0], -1, hbar, dt, steps, "rk4")
    d_up, d_dn = up.final().r[1], dn.final().r[1]
    antisym = abs(d_up + d_dn)
    speed_err = max(
        abs(s.speed - neutrino_velocity_modulus(s.r, s.P, model, hbar, s.lam))
        for s in up.states[::100]
    )
    passed = (up.helicity_drift <= 1e-9 and antisym <= 1e-9
              and up.energy_drift <= 1e-8 and speed_err <= 1e-8)
    return SuiteResult("trajectory-physics", passed,
                       {"helicity_drift": up.helicity_drift,
                        "energy_drift": up.energy_drift,
                        "spin_hall_antisymmetry": antisym,
                        "spin_hall_displacement": d_up,
                        "speed_vs_modulus": speed_err})


# ---------------------------------------------------------------------------
# Structural scaling and degeneracy
# ---------------------------------------------------------------------------

def suite_residual_scaling(seed: int = 16, slope_tol: float = 0.1,
                           **_cfg) -> SuiteResult:
    """Unitarity defect of (1 + hbar U1) U0 and the flow-equation residual
    both scale as hbar^2 (log-log slope 2)."""
    model = _dirac_model()
    x = PhasePoint.of([0.3, 0.5, -0.2], [0.7, -0.4, 1.1])
    frame = classical_frame(model, x)
    conns0 = berry_connections(model, x, 1.0)
    hbars = np.array([1e-1, 1e-2, 1e-3])

    defects = []
    for hb in hbars:
        U, _U1, _B, _hr = frame_first_order(model, frame, conns0, hb)
        defects.append(np.linalg.norm(U @ U.conj().T - np.eye(frame.n)))
    slope_u = float(np.polyfit(np.log(hbars), np.log(defects), 1)[0])

    def eps_at(hb, pt=x):
        return band_energy(model, pt, hb, order=2).eps

    residuals = []
    for hb in hbars:
        dh = hb * 1e-2
        deps = (8 * (eps_at(hb + dh) - eps_at(hb - dh))
                - (eps_at(hb + 2 * dh) - eps_at(hb - 2 * dh))) / (12 * dh)
        c0 = berry_connections(model, x, hb)
        diag = FDDiagnostics()
        grads = connection_component_gradients(model, x, hb, frame,
                                               diagnostics=diag)
        B = rotation_generator(model, frame, c0)
        cc = corrected_connections(model, frame, c0, B, hb,
                                   conn_grads=grads, diagnostics=diag)
        # Flow operator needs the scale-hbar connections A0 + 2 hbar A1 (the
        # corrected set is the running average, with half that correction).
        A_flow = [c0.component(k) + 2 * hb * cc.linear_part[k]
                  for k in range(6)]
        flow = ConnectionSet(A_flow[:3], A_flow[3:], "corrected", x, hb)

        def efield(y, hb=hb):
            return band_energy(model, y, hb, order=2).eps

        egrads = [derivative_along(efield, x, ax) for ax in range(6)]
        Oeps = apply_energy_flow_operator(eps_at(hb), egrads, flow,
                                          frame.groups)
        residuals.append(float(np.max(np.abs(deps - Oeps))))
    slope_f = float(np.polyfit(np.log(hbars), np.log(residuals), 1)[0])

    passed = abs(slope_u - 2.0) <= slope_tol and abs(slope_f - 2.0) <= slope_tol
    return SuiteResult("residual-scaling", passed,
                       {"unitarity_slope": slope_u, "flow_slope": slope_f,
                        "slope_tolerance": slope_tol})


def suite_free_field(seed: int = 17, points: int = 20,
                     tolerance: float = 1e-12, **_cfg) -> SuiteResult:
    """Uniform potential / flat metric: all corrections vanish."""
    rng = np.random.default_rng(seed)
    models = [DiracElectric(m=1.0, e=1.0, field=UniformField(0.3)),
              NeutrinoMetric(profile=UniformField(1.0))]
    worst = 0.0
    for model in models:
        for x in _random_points(rng, points, 0.3, 3.0):
            rep = band_energy(model, x, 0.1, order=2)
            corr = np.max(np.abs(rep.first)) + np.max(np.abs(rep.second)) \
                + np.max(np.abs(rep.bracket_term))
            worst = max(worst, float(corr))
    return SuiteResult("free-field-degeneracy", worst <= tolerance,
                       {"max_correction": worst, "tolerance": tolerance})


def suite_numerical_plumbing(seed: int = 18, **_cfg) -> SuiteResult:
    """FD connections vs closed forms, commutator inversion, RK4 order."""
    rng = np.random.default_rng(seed)
    models = [_dirac_model(), _neutrino_profiles()["linear"]]
    conn_err = 0.0
    for model in models:
        for x in _random_points(rng, 5, 0.5, 3.0):
            an = berry_connections(model, x, 0.0)
            fd = connections_fd(model, x, 0.0)
            for l in range(3):
                conn_err = max(conn_err,
                               float(np.max(np.abs(an.A_R[l] - fd.A_R[l]))),
                               float(np.max(np.abs(an.A_P[l] - fd.A_P[l]))))

    model = _dirac_model()
    x = PhasePoint.of([0.1, 0.2, 0.3], [0.5, -0.6, 0.7])
    frame = classical_frame(model, x)
    round_trip = 0.0
    for _ in range(20):
        M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        M = project(M, frame.groups, "offdiag")
        V = invert_band_commutator(M, frame)
        eps_mat = np.diag(frame.eps0)
        round_trip = max(round_trip,
                         float(np.max(np.abs(V @ eps_mat - eps_mat @ V - M))))

    # RK4 order on a rotating linear system with a closed-form solution.
    omega = np.array([0.3, -0.2, 0.7])

    def rot(_t, y):
        return np.cross(omega, y)

    y0 = np.array([1.0, 0.2, -0.4])
    T = 2.0
    errs, dts = [], []
    for nsteps in (50, 100, 200, 400):
        dt = T / nsteps
        path = integrate_fixed(rot, 0.0, y0, dt, nsteps)
        yT = path[-1][1]
        # Rodrigues rotation of y0 about omega by |omega| T.
        w = np.linalg.norm(omega)
        k = omega / w
        ang = w * T
        exact = (y0 * np.cos(ang) + np.cross(k, y0) * np.sin(ang)
                 + k * (k @ y0) * (1 - np.cos(ang)))
        errs.append(float(np.linalg.norm(yT - exact)))
        dts.append(dt)
    slope = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])

    passed = conn_err <= 1e-6 and round_trip <= 1e-12 and abs(slope - 4) <= 0.2
    return SuiteResult("numerical-plumbing", passed,
                       {"fd_connection_err": conn_err,
                        "commutator_round_trip": round_trip,
                        "rk4_slope": slope})


def covariant_reexpansion(model, x: PhasePoint, hbar: float) -> np.ndarray:
    """The covariant-form energy with the covariant arguments re-expanded.

    Substitutes the shifts S = hbar A0 + (hbar^2/2) A1 into the band-energy
    field and Taylor expands through second order with symmetrized products;
    equals the canonical-variable energy up to O(hbar^3).
    """
    from semiband.dynamics import covariant_variables
    from semiband.frames import eps0_gradients
    from semiband.energy import _light_frame

    frame = classical_frame(model, x)
    cov = covariant_variables(model, x, hbar, frame=frame)
    rep_cov = band_energy(model, x, hbar, order=2, representation="covariant")

    shifts = []
    for axis in range(3):
        shifts.append(hbar * cov.A0_R[axis]
                      + 0.5 * hbar ** 2 * cov.A1_R[axis])
    for axis in range(3):
        shifts.append(hbar * cov.A0_P[axis]
                      + 0.5 * hbar ** 2 * cov.A1_P[axis])

    grads = eps0_gradients(model, frame)

    def grad_field(y: PhasePoint) -> np.ndarray:
        fr = _light_frame(model, y, frame, DEFAULT_TOL_REF)
        return np.stack(eps0_gradients(model, fr))

    out = rep_cov.eps.copy()
    for a in range(6):
        out = out + 0.5 * (grads[a] @ shifts[a] + shifts[a] @ grads[a])
    for a in range(6):
        hess_row = derivative_along(grad_field, x, a)
        for b in range(6):
            sym = 0.5 * (shifts[a] @ shifts[b] + shifts[b] @ shifts[a])
            hval = hess_row[b]
            out = out + 0.25 * (hval @ sym + sym @ hval)
    return out


def suite_consistency(seed: int = 19, **_cfg) -> SuiteResult:
    """Covariant energy, re-expanded through hbar^2, equals the canonical one
    to O(hbar^3); Hermiticity/block invariants hold on random points.

    Runs on the four-band model and on a generic two-level configuration whose
    frame depends on both position and momentum (nonzero momentum connection),
    which exercises the second-order commutator strings that vanish for the
    four-band applications.
    """
    rng = np.random.default_rng(seed)
    model = _dirac_model()
    from semiband.models import make_model

    two_level = make_model({
        "model": "two_level",
        "h0": [{"coef": "1/10", "r_exp": [1, 0, 0], "p_exp": [0, 1, 0]}],
        "h": [[{"coef": "1/4", "p_exp": [1, 0, 0]}],
              [{"coef": "1/5", "r_exp": [0, 1, 0]}],
              [{"coef": "1"}, {"coef": "1/10", "r_exp": [0, 0, 2]}]],
    })
    x = PhasePoint.of([0.3, 0.5, -0.2], [0.7, -0.4, 1.1])
    ratios = []
    bounded = True
    for mdl in (model, two_level):
        per_model = []
        for hb in (1e-1, 1e-2, 1e-3):
            can = band_energy(mdl, x, hb, order=2).eps
            reexp = covariant_reexpansion(mdl, x, hb)
            per_model.append(float(np.max(np.abs(can - reexp))) / hb ** 3)
        # Bounded as hbar -> 0: no blow-up relative to the largest-hbar ratio
        # (a small floor absorbs rounding noise when the difference vanishes).
        bounded = bounded and per_model[-1] <= 10.0 * per_model[0] + 1e-6
        ratios.extend(per_model)
    ratios = ratios[:3]  # report the four-band sweep

    herm = offb = 0.0
    for mdl in [model, _neutrino_profiles()["gaussian"]]:
        for x in _random_points(rng, 25, 0.3, 3.0):
            rep = band_energy(mdl, x, 0.02, order=2)
            herm = max(herm, float(np.max(np.abs(rep.eps - rep.eps.conj().T))))
            offb = max(offb, rep.diagnostics["offblock_norm"])
    passed = bounded and herm <= 1e-12 and offb <= 1e-10
    return SuiteResult("canonical-covariant-consistency", passed,
                       {"ratio_large_hbar": ratios[0],
                        "ratio_small_hbar": ratios[-1],
                        "hermiticity": herm, "offblock": offb})


ALL_SUITES = {
    "bracket-product-rule": suite_bracket_product_rule,
    "bracket-invariance": suite_bracket_invariance,
    "symmetrized-bracket": suite_symmetrized_bracket,
    "dirac-canonical-oracle": suite_dirac_canonical,
    "dirac-covariant-oracle": suite_dirac_covariant,
    "pauli-darwin-limit": suite_pauli_limit,
    "neutrino-energy-oracle": suite_neutrino_energy,
    "neutrino-curvature": suite_neutrino_curvature,
    "trajectory-physics": suite_trajectory,
    "residual-scaling": suite_residual_scaling,
    "free-field-degeneracy": suite_free_field,
    "numerical-plumbing": suite_numerical_plumbing,
    "canonical-covariant-consistency": suite_consistency,
}

# The order in which the acceptance criteria are reported.
ACCEPTANCE_ORDER = [
    "dirac-canonical-oracle",
    "dirac-covariant-oracle",
    "pauli-darwin-limit",
    "neutrino-energy-oracle",
    "neutrino-curvature",
    "trajectory-physics",
    "bracket-product-rule",
    "bracket-invariance",
    "residual-scaling",
    "free-field-degeneracy",
    "numerical-plumbing",
]

BRACKET_SUITES = ["bracket-product-rule", "bracket-invariance",
                  "symmetrized-bracket"]


def run_suites(names=None, seed: int = 0, overrides: dict | None = None):
    """Run the requested suites (all by default) and collect a report dict."""
    if names is None:
        names = list(ALL_SUITES)
    overrides = overrides or {}
    results = []
    for name in names:
        if name not in ALL_SUITES:
            raise ValueError(f"unknown suite {name!r}")
        cfg = dict(overrides.get(name, {}))
        # Deterministic per-suite seed offset (hash() is process randomized).
        cfg.setdefault("seed", seed + sum(name.encode()) % 1000)
        results.append(ALL_SUITES[name](**cfg))
    return {
        "schema_version": 1,
        "seed": seed,
        "all_passed": all(r.passed for r in results),
        "suites": [r.to_json() for r in results],
    }
