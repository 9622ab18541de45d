"""Scalar background fields with analytic derivatives.

Every field exposes value/gradient/hessian/laplacian at a 3-point; the
analytic derivatives are validated against central finite differences in the
test suite (1e-6 relative).  `ReciprocalField` wraps a positive profile n(R)
as F = 1/n, which is how a refractive-index profile enters the massless
model.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "ScalarField",
    "PolynomialField",
    "GaussianField",
    "CoulombRegularizedField",
    "LinearField",
    "UniformField",
    "ReciprocalField",
    "make_field",
]


class ScalarField:
    """Contract: value, gradient (3,), hessian (3,3), laplacian at a 3-point."""

    kind = "abstract"

    def value(self, r: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def laplacian(self, r: np.ndarray) -> float:
        return float(np.trace(self.hessian(r)))

    def to_config(self) -> dict:
        raise NotImplementedError


class UniformField(ScalarField):
    kind = "uniform"

    def __init__(self, value: float = 0.0):
        self.c = float(value)

    def value(self, r):
        return self.c

    def gradient(self, r):
        return np.zeros(3)

    def hessian(self, r):
        return np.zeros((3, 3))

    def to_config(self):
        return {"kind": "uniform", "value": self.c}


class LinearField(ScalarField):
    """g . r + c"""

    kind = "linear"

    def __init__(self, gradient, offset: float = 0.0):
        self.g = np.asarray(gradient, dtype=float)
        self.c = float(offset)

    def value(self, r):
        return float(self.g @ np.asarray(r, dtype=float) + self.c)

    def gradient(self, r):
        return self.g.copy()

    def hessian(self, r):
        return np.zeros((3, 3))

    def to_config(self):
        return {"kind": "linear", "gradient": list(self.g), "offset": self.c}


class PolynomialField(ScalarField):
    """Sum of monomial terms c * x^a y^b z^c, degree per term unrestricted."""

    kind = "polynomial"

    def __init__(self, terms):
        # terms: list of (coefficient, (a, b, c))
        self.terms = [(float(c), tuple(int(e) for e in exps)) for c, exps in terms]

    def value(self, r):
        x, y, z = np.asarray(r, dtype=float)
        return float(sum(c * x ** a * y ** b * z ** d for c, (a, b, d) in self.terms))

    def gradient(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(3)
        for c, exps in self.terms:
            for axis in range(3):
                if exps[axis] == 0:
                    continue
                e = list(exps)
                e[axis] -= 1
                out[axis] += c * exps[axis] * np.prod(r ** np.array(e))
        return out

    def hessian(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros((3, 3))
        for c, exps in self.terms:
            for i in range(3):
                for j in range(3):
                    e = list(exps)
                    f = c
                    if e[i] == 0:
                        continue
                    f *= e[i]
                    e[i] -= 1
                    if e[j] == 0:
                        continue
                    f *= e[j]
                    e[j] -= 1
                    out[i, j] += f * np.prod(r ** np.array(e))
        return out

    def to_config(self):
        return {"kind": "polynomial",
                "terms": [[c, list(e)] for c, e in self.terms]}


class GaussianField(ScalarField):
    """A exp(-|r - r0|^2 / (2 s^2))"""

    kind = "gaussian"

    def __init__(self, amplitude: float = 1.0, center=(0.0, 0.0, 0.0),
                 width: float = 1.0):
        self.A = float(amplitude)
        self.r0 = np.asarray(center, dtype=float)
        self.s = float(width)
        if self.s <= 0:
            raise ValueError("gaussian width must be positive")

    def value(self, r):
        d = np.asarray(r, dtype=float) - self.r0
        return float(self.A * np.exp(-(d @ d) / (2 * self.s ** 2)))

    def gradient(self, r):
        d = np.asarray(r, dtype=float) - self.r0
        return -self.value(r) * d / self.s ** 2

    def hessian(self, r):
        d = np.asarray(r, dtype=float) - self.r0
        v = self.value(r)
        return v * (np.outer(d, d) / self.s ** 4 - np.eye(3) / self.s ** 2)

    def to_config(self):
        return {"kind": "gaussian", "amplitude": self.A,
                "center": list(self.r0), "width": self.s}


class CoulombRegularizedField(ScalarField):
    """q / sqrt(|r|^2 + a^2); a > 0 removes the singularity."""

    kind = "coulomb"

    def __init__(self, charge: float = 1.0, softening: float = 0.5):
        self.q = float(charge)
        self.a = float(softening)
        if self.a <= 0:
            raise ValueError("softening length must be positive")

    def _s(self, r):
        r = np.asarray(r, dtype=float)
        return np.sqrt(r @ r + self.a ** 2)

    def value(self, r):
        return float(self.q / self._s(r))

    def gradient(self, r):
        r = np.asarray(r, dtype=float)
        return -self.q * r / self._s(r) ** 3

    def hessian(self, r):
        r = np.asarray(r, dtype=float)
        s = self._s(r)
        return self.q * (3 * np.outer(r, r) / s ** 5 - np.eye(3) / s ** 3)

    def to_config(self):
        return {"kind": "coulomb", "charge": self.q, "softening": self.a}


class ReciprocalField(ScalarField):
    """F = 1/n for a strictly positive profile n(r)."""

    kind = "reciprocal"

    def __init__(self, base: ScalarField):
        self.base = base

    def value(self, r):
        n = self.base.value(r)
        if n <= 0:
            raise ValueError("profile must stay positive")
        return 1.0 / n

    def gradient(self, r):
        n = self.base.value(r)
        return -self.base.gradient(r) / n ** 2

    def hessian(self, r):
        n = self.base.value(r)
        g = self.base.gradient(r)
        return -self.base.hessian(r) / n ** 2 + 2 * np.outer(g, g) / n ** 3

    def to_config(self):
        return {"kind": "reciprocal", "base": self.base.to_config()}


_FIELD_KINDS = {
    "uniform": lambda cfg: UniformField(cfg.get("value", 0.0)),
    "linear": lambda cfg: LinearField(cfg.get("gradient", [0, 0, 0]),
                                      cfg.get("offset", 0.0)),
    "polynomial": lambda cfg: PolynomialField(
        [(t[0], t[1]) for t in cfg["terms"]]),
    "gaussian": lambda cfg: GaussianField(cfg.get("amplitude", 1.0),
                                          cfg.get("center", [0, 0, 0]),
                                          cfg.get("width", 1.0)),
    "coulomb": lambda cfg: CoulombRegularizedField(cfg.get("charge", 1.0),
                                                   cfg.get("softening", 0.5)),
}
_FIELD_KINDS["coulomb-regularized"] = _FIELD_KINDS["coulomb"]


def make_field(cfg: dict) -> ScalarField:
    """Build a field from its JSON configuration ({"kind": ..., ...})."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ValueError("field config must be a dict with a 'kind' key")
    kind = cfg["kind"]
    if kind == "reciprocal":
        return ReciprocalField(make_field(cfg["base"]))
    if kind not in _FIELD_KINDS:
        raise ValueError(f"unknown field kind {kind!r}")
    return _FIELD_KINDS[kind](cfg)


def fd_gradient(field: ScalarField, r, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient, used to validate the analytic one."""
    r = np.asarray(r, dtype=float)
    out = np.zeros(3)
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        out[axis] = (field.value(r + e) - field.value(r - e)) / (2 * h)
    return out


def fd_hessian(field: ScalarField, r, h: float = 1e-4) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros((3, 3))
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        out[:, axis] = (field.gradient(r + e) - field.gradient(r - e)) / (2 * h)
    return 0.5 * (out + out.T)
