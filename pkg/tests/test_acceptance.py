"""Acceptance criteria, one test per criterion at its contract tolerance.

Each test prints a PASS/FAIL line with the measured figures (run pytest with
-s to see them all); the assertions pin the tolerances.  The same suites back
the `semiband verify` subcommand.
"""

from semiband.verify import ALL_SUITES


def _run(name: str, **cfg):
    result = ALL_SUITES[name](**cfg)
    status = "PASS" if result.passed else "FAIL"
    metrics = ", ".join(f"{k}={v:.3g}" for k, v in result.metrics.items())
    print(f"ACCEPTANCE {name}: {status} ({metrics})")
    return result


def test_criterion_01_dirac_order2_equivalence():
    # Pipeline vs closed-form block energy: 100 random points, m = e = 1,
    # gaussian potential, |P| in [0.1, 10]; <= 1e-8 relative, < 10 s.
    r = _run("dirac-canonical-oracle", points=100, tolerance=1e-8)
    assert r.metrics["max_rel_err"] <= 1e-8
    assert r.metrics["runtime_s"] < 10.0
    assert r.passed


def test_criterion_02_relativistic_covariant_form():
    r = _run("dirac-covariant-oracle", points=100, tolerance=1e-8)
    assert r.metrics["max_rel_err"] <= 1e-8
    assert r.passed


def test_criterion_03_pauli_darwin_limit():
    # Contact coefficient hbar^2/(8 m^2) and spin-orbit hbar/(4 m^2),
    # fitted over |P|/m in [1e-3, 1e-2]: <= 1e-4 relative.
    r = _run("pauli-darwin-limit", tolerance=1e-4)
    assert r.metrics["darwin_rel_err"] <= 1e-4
    assert r.metrics["spin_orbit_rel_err"] <= 1e-4
    assert r.passed


def test_criterion_04_neutrino_energy():
    # Pipeline vs the covariant closed form (and its canonical re-expansion),
    # linear and gaussian index profiles, 100 points: <= 1e-8 relative.
    r = _run("neutrino-energy-oracle", points=100, tolerance=1e-8)
    assert r.metrics["max_rel_err_covariant"] <= 1e-8
    assert r.metrics["max_rel_err_canonical"] <= 1e-8
    assert r.passed


def test_criterion_05_neutrino_curvature():
    r = _run("neutrino-curvature", points=50, tolerance=1e-8)
    assert r.metrics["max_rel_err"] <= 1e-8
    assert r.passed


def test_criterion_06_trajectory_physics():
    # Helicity drift <= 1e-9 over 1e4 RK4 steps; opposite-helicity transverse
    # displacements antisymmetric to 1e-9; energy conserved to 1e-8; the speed
    # matches the velocity-modulus formula to 1e-8 along the path.
    r = _run("trajectory-physics", steps=10000)
    assert r.metrics["helicity_drift"] <= 1e-9
    assert r.metrics["spin_hall_antisymmetry"] <= 1e-9
    assert r.metrics["energy_drift"] <= 1e-8
    assert r.metrics["speed_vs_modulus"] <= 1e-8
    assert r.passed


def test_criterion_07_symbolic_calculus():
    # Product rule and symmetrization invariance: exactly zero residuals on
    # 200 random cases each, degree <= 6 resp. 5, internal dims 1 and 2.
    r1 = _run("bracket-product-rule", cases=200, max_degree=6)
    assert r1.metrics["failures"] == 0
    r2 = _run("bracket-invariance", cases=200)
    assert r2.metrics["failures"] == 0
    assert r1.passed and r2.passed


def test_criterion_08_structural_residual_scaling():
    # Unitarity defect of (1 + hbar U1) U0 and the flow-equation residual both
    # scale as hbar^2: log-log slope 2 +- 0.1 over hbar in {1e-1, 1e-2, 1e-3}.
    r = _run("residual-scaling", slope_tol=0.1)
    assert abs(r.metrics["unitarity_slope"] - 2.0) <= 0.1
    assert abs(r.metrics["flow_slope"] - 2.0) <= 0.1
    assert r.passed


def test_criterion_09_free_field_degeneracy():
    r = _run("free-field-degeneracy", tolerance=1e-12)
    assert r.metrics["max_correction"] <= 1e-12
    assert r.passed


def test_criterion_10_numerical_plumbing():
    # Analytic vs finite-difference connections <= 1e-6; commutator-inverse
    # round trip <= 1e-12; RK4 global convergence slope 4 +- 0.2.
    r = _run("numerical-plumbing")
    assert r.metrics["fd_connection_err"] <= 1e-6
    assert r.metrics["commutator_round_trip"] <= 1e-12
    assert abs(r.metrics["rk4_slope"] - 4.0) <= 0.2
    assert r.passed


def test_supporting_consistency_invariant():
    # Canonical/covariant consistency: the re-expanded covariant energy
    # differs from the canonical one by a bounded multiple of hbar^3.
    r = _run("canonical-covariant-consistency")
    assert r.passed
