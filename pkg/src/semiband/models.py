"""Matrix-valued Hamiltonians with analytic frames and connections.

Three built-in models (units c = 1, hbar is a run parameter):

* ``dirac_electric``  -- H = alpha.P + beta m + e V(R), four components,
  band groups {+E, -E} with E = sqrt(P^2 + m^2).
* ``neutrino_metric`` -- H = (alpha.P F(R) + F(R) alpha.P)/2 with
  F = 1/n(R) for a refractive-index-like profile n; massless, |P| > 0.
* ``two_level``       -- H = h0(R,P) 1 + h(R,P).sigma with polynomial
  components declared term by term (the declaration doubles as the symbolic
  decomposition used for the exact ordering bracket).

Dirac representation throughout: beta = diag(1,1,-1,-1), alpha_i with
off-diagonal Pauli blocks, Sigma = 1 (x) sigma.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from semiband.fields import ScalarField, ReciprocalField, UniformField, make_field
from semiband import weyl

__all__ = [
    "PhasePoint",
    "Model",
    "DiracElectric",
    "NeutrinoMetric",
    "TwoLevel",
    "make_model",
    "SX", "SY", "SZ", "S0", "BETA", "ALPHA", "SIGMA",
]


SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
S0 = np.eye(2, dtype=complex)

BETA = np.kron(SZ, S0)                       # diag(1, 1, -1, -1)
ALPHA = [np.kron(SX, s) for s in (SX, SY, SZ)]
SIGMA = [np.kron(S0, s) for s in (SX, SY, SZ)]


@dataclass(frozen=True)
class PhasePoint:
    """Classical phase-space point (R, P), both real 3-vectors."""

    R: np.ndarray
    P: np.ndarray

    @staticmethod
    def of(R, P) -> "PhasePoint":
        R = np.asarray(R, dtype=float).reshape(3)
        P = np.asarray(P, dtype=float).reshape(3)
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(P))):
            raise ValueError("phase point must have finite components")
        return PhasePoint(R, P)

    def shifted(self, axis: int, delta: float) -> "PhasePoint":
        """New point displaced along one of the six phase axes (0-2: R, 3-5: P)."""
        R, P = self.R.copy(), self.P.copy()
        if axis < 3:
            R[axis] += delta
        else:
            P[axis - 3] += delta
        return PhasePoint(R, P)

    def coord(self, axis: int) -> float:
        return self.R[axis] if axis < 3 else self.P[axis - 3]


class Model:
    """Shared interface of the built-in Hamiltonians."""

    name = "abstract"
    n = 0
    band_groups: tuple = ()
    groups: np.ndarray = np.array([], dtype=int)
    massless = False
    has_analytic_frame = False
    has_analytic_connections = False
    bracket_closed_form = False
    # The applications all satisfy <H> = 0 (pure-R plus pure-P splitting or
    # scalar cross factors); the energy assembly asserts this flag.
    bracket_h_vanishes = True

    def hamiltonian(self, x: PhasePoint) -> np.ndarray:
        raise NotImplementedError

    def d_hamiltonian(self, x: PhasePoint, axis: int) -> np.ndarray:
        """Analytic dH along phase axis (0-2: R components, 3-5: P)."""
        raise NotImplementedError

    def analytic_frame(self, x: PhasePoint):
        raise NotImplementedError(f"model {self.name} has no analytic frame")

    def analytic_connections(self, x: PhasePoint):
        raise NotImplementedError(f"model {self.name} has no analytic connections")

    def ordering_bracket_term(self, x: PhasePoint, hbar: float) -> np.ndarray:
        """The -(hbar/2) <eps0> energy contribution, from the declared form."""
        raise NotImplementedError(
            "bracket term unavailable: no closed form or factorization declared"
        )

    def check_point(self, x: PhasePoint) -> None:
        if self.massless and np.linalg.norm(x.P) == 0.0:
            raise ValueError(f"|P| = 0 is not allowed for massless model {self.name}")

    def to_config(self) -> dict:
        raise NotImplementedError


class DiracElectric(Model):
    """Relativistic four-component electron in a static electric potential."""

    name = "dirac_electric"
    n = 4
    band_groups = (2, 2)
    groups = np.array([0, 0, 1, 1])
    has_analytic_frame = True
    has_analytic_connections = True
    bracket_closed_form = True   # eps0 = beta E(P) + e V(R) is a pure sum

    def __init__(self, m: float = 1.0, e: float = 1.0,
                 field: ScalarField | None = None):
        if m <= 0:
            raise ValueError("mass must be positive")
        self.m = float(m)
        self.e = float(e)
        self.field = field if field is not None else UniformField(0.0)

    def energy_scale(self, x: PhasePoint) -> float:
        return float(np.sqrt(x.P @ x.P + self.m ** 2))

    def hamiltonian(self, x: PhasePoint) -> np.ndarray:
        self.check_point(x)
        H = self.m * BETA + self.e * self.field.value(x.R) * np.eye(4)
        for i in range(3):
            H = H + x.P[i] * ALPHA[i]
        return H

    def d_hamiltonian(self, x: PhasePoint, axis: int) -> np.ndarray:
        if axis >= 3:
            return ALPHA[axis - 3].copy()
        return self.e * self.field.gradient(x.R)[axis] * np.eye(4)

    def analytic_frame(self, x: PhasePoint):
        # Free-particle Foldy-Wouthuysen rotation; the scalar potential rides along.
        E = self.energy_scale(x)
        bap = BETA @ sum(x.P[i] * ALPHA[i] for i in range(3))
        U0 = (((E + self.m) * np.eye(4) + bap)
              / np.sqrt(2 * E * (E + self.m)))
        W = self.e * self.field.value(x.R)
        eps0 = np.array([E + W, E + W, -E + W, -E + W])
        return eps0, U0

    def analytic_connections(self, x: PhasePoint):
        # i U0 grad_P U0^+ for the free-particle rotation; the block-diagonal
        # part is (P x Sigma)/(2E(E+m)).
        E = self.energy_scale(x)
        m = self.m
        ap = sum(x.P[i] * ALPHA[i] for i in range(3))
        A_R = []
        for l in range(3):
            pxs = sum(
                _eps_ijk(l, j, k) * x.P[j] * SIGMA[k]
                for j in range(3) for k in range(3)
            )
            num = (BETA @ ap * x.P[l] - E * (E + m) * BETA @ ALPHA[l]
                   - 1j * E * pxs)
            A_R.append(1j * num / (2 * E ** 2 * (E + m)))
        A_P = [np.zeros((4, 4), dtype=complex) for _ in range(3)]
        return A_R, A_P

    def ordering_bracket_term(self, x: PhasePoint, hbar: float) -> np.ndarray:
        return np.zeros((4, 4), dtype=complex)

    def to_config(self) -> dict:
        return {"model": self.name, "m": self.m, "e": self.e,
                "field": self.field.to_config()}


class NeutrinoMetric(Model):
    """Massless four-component particle in an isotropic static metric.

    The metric enters through F(R) = 1/n(R); H is the symmetrized product of
    alpha.P and F, which at a classical point is just F(R) alpha.P.
    """

    name = "neutrino_metric"
    n = 4
    band_groups = (2, 2)
    groups = np.array([0, 0, 1, 1])
    massless = True
    has_analytic_frame = True
    has_analytic_connections = True
    bracket_closed_form = True

    def __init__(self, profile: ScalarField | None = None):
        self.profile = profile if profile is not None else UniformField(1.0)
        self.F = ReciprocalField(self.profile)

    def index_value(self, r) -> float:
        return self.profile.value(r)

    def hamiltonian(self, x: PhasePoint) -> np.ndarray:
        self.check_point(x)
        return self.F.value(x.R) * sum(x.P[i] * ALPHA[i] for i in range(3))

    def d_hamiltonian(self, x: PhasePoint, axis: int) -> np.ndarray:
        if axis >= 3:
            return self.F.value(x.R) * ALPHA[axis - 3]
        ap = sum(x.P[i] * ALPHA[i] for i in range(3))
        return self.F.gradient(x.R)[axis] * ap

    def analytic_frame(self, x: PhasePoint):
        self.check_point(x)
        E = float(np.linalg.norm(x.P))
        bap = BETA @ sum(x.P[i] * ALPHA[i] for i in range(3))
        U0 = (E * np.eye(4) + bap) / np.sqrt(2 * E ** 2)
        Fv = self.F.value(x.R)
        eps0 = np.array([Fv * E, Fv * E, -Fv * E, -Fv * E])
        return eps0, U0

    def analytic_connections(self, x: PhasePoint):
        # Massless limit of the free-particle rotation connection.
        self.check_point(x)
        E = float(np.linalg.norm(x.P))
        ap = sum(x.P[i] * ALPHA[i] for i in range(3))
        A_R = []
        for l in range(3):
            pxs = sum(
                _eps_ijk(l, j, k) * x.P[j] * SIGMA[k]
                for j in range(3) for k in range(3)
            )
            num = BETA @ ap * x.P[l] - E ** 2 * BETA @ ALPHA[l] - 1j * E * pxs
            A_R.append(1j * num / (2 * E ** 3))
        A_P = [np.zeros((4, 4), dtype=complex) for _ in range(3)]
        return A_R, A_P

    def ordering_bracket_term(self, x: PhasePoint, hbar: float) -> np.ndarray:
        # Closed form declared by the model: -(hbar^2 / 4|P|) P.grad F, times 1.
        E = float(np.linalg.norm(x.P))
        val = -(hbar ** 2) / (4 * E) * float(x.P @ self.F.gradient(x.R))
        return val * np.eye(4, dtype=complex)

    def to_config(self) -> dict:
        return {"model": self.name, "field": self.profile.to_config()}


@dataclass(frozen=True)
class ComponentTerm:
    """One product term c * R^r_exp P^p_exp of a two-level component.

    ``sym`` fixes the operator ordering the term stands for: "half" is the
    half-symmetrized product (A B + B A)/2, "rp" the normally ordered A(R)B(P).
    Classically both evaluate to the same number; they differ in the exact
    ordering bracket.
    """

    coef: Fraction
    r_exp: tuple
    p_exp: tuple
    sym: str = "half"

    def value(self, x: PhasePoint) -> float:
        v = float(self.coef)
        for i in range(3):
            v *= x.R[i] ** self.r_exp[i] * x.P[i] ** self.p_exp[i]
        return v

    def gradient(self, x: PhasePoint, axis: int) -> float:
        exps = list(self.r_exp) + list(self.p_exp)
        if exps[axis] == 0:
            return 0.0
        coords = list(x.R) + list(x.P)
        v = float(self.coef) * exps[axis]
        for i in range(6):
            e = exps[i] - (1 if i == axis else 0)
            v *= coords[i] ** e
        return v

    def factorizations(self, n: int = 1) -> list:
        """The declared ordering as weyl factorizations (sum of products)."""
        c = weyl.QC.of(self.coef)
        A = weyl.WeylExpr.monomial(self.r_exp, (0, 0, 0), n=n)
        B = weyl.WeylExpr.monomial((0, 0, 0), self.p_exp, n=n)
        if self.sym == "rp":
            return [weyl.Factorization([("R", A.scaled(c)), ("P", B)])]
        half = weyl.QC.of(Fraction(1, 2)) * c
        return [
            weyl.Factorization([("R", A.scaled(half)), ("P", B)]),
            weyl.Factorization([("P", B.scaled(half)), ("R", A)]),
        ]


def _terms_from_config(terms_cfg) -> tuple:
    out = []
    for t in terms_cfg:
        out.append(ComponentTerm(
            coef=Fraction(str(t["coef"])),
            r_exp=tuple(int(v) for v in t.get("r_exp", [0, 0, 0])),
            p_exp=tuple(int(v) for v in t.get("p_exp", [0, 0, 0])),
            sym=t.get("sym", "half"),
        ))
    return tuple(out)


DEFAULT_TWO_LEVEL = {
    "h0": [{"coef": "3/10", "r_exp": [1, 0, 0], "p_exp": [0, 1, 0]}],
    "h": [
        [],
        [],
        [{"coef": "1"},
         {"coef": "1/5", "r_exp": [2, 0, 0]},
         {"coef": "1/10", "p_exp": [0, 0, 2]}],
    ],
}


class TwoLevel(Model):
    """Generic two-level Hamiltonian h0(R,P) 1 + h(R,P).sigma."""

    name = "two_level"
    n = 2
    band_groups = (1, 1)
    groups = np.array([0, 1])
    has_analytic_frame = True

    def __init__(self, h0_terms=None, h_terms=None):
        cfg = DEFAULT_TWO_LEVEL
        self.h0 = _terms_from_config(cfg["h0"] if h0_terms is None else h0_terms)
        raw_h = cfg["h"] if h_terms is None else h_terms
        self.h = tuple(_terms_from_config(part) for part in raw_h)
        if len(self.h) != 3:
            raise ValueError("two_level needs exactly three sigma components")
        # eps0 = h0 +/- h3 stays polynomial only when h is purely along z.
        self.z_only = not self.h[0] and not self.h[1]
        self.bracket_closed_form = self.z_only

    def _component(self, terms, x: PhasePoint) -> float:
        return sum(t.value(x) for t in terms)

    def _component_grad(self, terms, x: PhasePoint, axis: int) -> float:
        return sum(t.gradient(x, axis) for t in terms)

    def h_vector(self, x: PhasePoint) -> np.ndarray:
        return np.array([self._component(part, x) for part in self.h])

    def hamiltonian(self, x: PhasePoint) -> np.ndarray:
        h = self.h_vector(x)
        return (self._component(self.h0, x) * S0
                + h[0] * SX + h[1] * SY + h[2] * SZ)

    def d_hamiltonian(self, x: PhasePoint, axis: int) -> np.ndarray:
        dh0 = self._component_grad(self.h0, x, axis)
        dh = [self._component_grad(part, x, axis) for part in self.h]
        return dh0 * S0 + dh[0] * SX + dh[1] * SY + dh[2] * SZ

    def analytic_frame(self, x: PhasePoint):
        h = self.h_vector(x)
        hn = float(np.linalg.norm(h))
        if hn == 0.0:
            raise ValueError("two_level bands are degenerate where |h| = 0")
        h0 = self._component(self.h0, x)
        eps0 = np.array([h0 + hn, h0 - hn])
        ct = h[2] / hn                       # cos(theta)
        hp = float(np.hypot(h[0], h[1]))
        phase = (h[0] + 1j * h[1]) / hp if hp > 0 else 1.0 + 0j
        c2 = np.sqrt((1.0 + ct) / 2.0)
        s2 = np.sqrt((1.0 - ct) / 2.0)
        plus = np.array([c2, s2 * phase])
        minus = np.array([-s2 * np.conj(phase), c2])
        V = np.column_stack([plus, minus])
        return eps0, V.conj().T

    def ordering_bracket_term(self, x: PhasePoint, hbar: float) -> np.ndarray:
        if not self.bracket_closed_form:
            raise NotImplementedError(
                "bracket term unavailable: h is not purely along sigma_z"
            )
        # eps0 bands are h0 +/- h3; the bracket acts on the declared forms and
        # is evaluated exactly through the symbolic module, then numerically.
        out = np.zeros((2, 2), dtype=complex)
        for band, sign in ((0, 1.0), (1, -1.0)):
            expr = weyl.WeylExpr.zero(1)
            for term in self.h0:
                for f in term.factorizations():
                    expr = expr + f.bracket()
            for term in self.h[2]:
                for f in term.factorizations():
                    b = f.bracket()
                    expr = expr + (b if sign > 0 else -b)
            out[band, band] = complex(expr.evaluate(x.R, x.P, hbar)[0, 0])
        return -(hbar / 2.0) * out

    def to_config(self) -> dict:
        def dump(terms):
            return [{"coef": str(t.coef), "r_exp": list(t.r_exp),
                     "p_exp": list(t.p_exp), "sym": t.sym} for t in terms]
        return {"model": self.name, "h0": dump(self.h0),
                "h": [dump(part) for part in self.h]}


def _eps_ijk(i: int, j: int, k: int) -> float:
    return float((i - j) * (j - k) * (k - i)) / 2.0


def make_model(cfg: dict) -> Model:
    """Build a model from its JSON configuration (see README for the schema)."""
    if not isinstance(cfg, dict) or "model" not in cfg:
        raise ValueError("model config must be a dict with a 'model' key")
    name = cfg["model"]
    if name == "dirac_electric":
        field = make_field(cfg["field"]) if "field" in cfg else None
        return DiracElectric(m=cfg.get("m", 1.0), e=cfg.get("e", 1.0), field=field)
    if name == "neutrino_metric":
        profile = make_field(cfg["field"]) if "field" in cfg else None
        return NeutrinoMetric(profile=profile)
    if name == "two_level":
        return TwoLevel(h0_terms=cfg.get("h0"), h_terms=cfg.get("h"))
    raise ValueError(f"unknown model {name!r}")
