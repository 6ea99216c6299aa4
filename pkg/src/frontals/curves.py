"""Parametric curves evaluable to points or to jets.

A curve is a map from a closed interval into R^dim with dim = 1 + p >= 2.
Most curves come from parsed component expressions; built-in demo curves
may override evaluation (the flat piecewise curve cannot be expressed in
the expression grammar).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, MathPreconditionError
from .expressions import eval_jet, eval_real, parse, to_source
from .jets import Jet


class CurveDefinitionError(ConfigError):
    pass


class Curve:
    """Base class: a named map [t_lo, t_hi] -> R^dim."""

    def __init__(self, name: str, dim: int, domain: tuple):
        if dim < 2:
            raise CurveDefinitionError(f"curve dimension must be >= 2, got {dim}")
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise CurveDefinitionError(f"empty domain [{lo}, {hi}]")
        self.name = name
        self.dim = dim
        self.domain = (lo, hi)

    @property
    def codim(self) -> int:
        """Normal-bundle rank p = dim - 1."""
        return self.dim - 1

    def point(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def jets(self, t0: float, order: int) -> list:
        """Component jets of the given order about t0."""
        raise NotImplementedError

    def points(self, ts) -> np.ndarray:
        return np.array([self.point(t) for t in np.asarray(ts, dtype=float)])

    def derivative(self, t: float, k: int = 1) -> np.ndarray:
        from .jets import derivative as jet_derivative

        js = self.jets(t, k)
        return np.array([jet_derivative(j, k) for j in js])

    def grid(self, steps: int) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], steps)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} dim={self.dim}>"


class ExprCurve(Curve):
    """Curve whose components are parsed expressions in t."""

    def __init__(self, name, components, domain, sources=None):
        super().__init__(name, len(components), domain)
        self.components = tuple(components)
        self.sources = (
            tuple(sources)
            if sources is not None
            else tuple(to_source(c) for c in components)
        )
        self._validate()

    @classmethod
    def from_sources(cls, name: str, sources, domain) -> "ExprCurve":
        components = tuple(parse(s) for s in sources)
        return cls(name, components, domain, sources=tuple(sources))

    def _validate(self):
        lo, hi = self.domain
        for frac in (0.5, 0.25, 0.75):
            t = lo + frac * (hi - lo)
            try:
                self.point(t)
            except MathPreconditionError as exc:
                raise CurveDefinitionError(
                    f"component not evaluable at interior point t={t}: {exc}"
                ) from exc

    def point(self, t: float) -> np.ndarray:
        return np.array([eval_real(c, t) for c in self.components])

    def jets(self, t0: float, order: int) -> list:
        return [eval_jet(c, t0, order) for c in self.components]


class CallableCurve(Curve):
    """Curve defined by explicit point/jet callables (built-in corpus use)."""

    def __init__(self, name, dim, domain, point_fn, jets_fn):
        super().__init__(name, dim, domain)
        self._point_fn = point_fn
        self._jets_fn = jets_fn

    def point(self, t: float) -> np.ndarray:
        return np.asarray(self._point_fn(float(t)), dtype=float)

    def jets(self, t0: float, order: int) -> list:
        js = self._jets_fn(float(t0), int(order))
        if len(js) != self.dim or any(not isinstance(j, Jet) for j in js):
            raise RuntimeError("jet callable returned malformed jets")
        return js
