"""One-dimensional jump-size laws used for the radial (log scale) and angular jump parts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats


@dataclass(frozen=True)
class JumpLaw:
    """A probability law for jump sizes.

    kinds and params:
      ``point``   atoms (list of values), weights (list, normalized)
      ``uniform`` low, high
      ``normal``  mean, std (std > 0)
      ``beta``    a, b, scale: law of ``scale * B`` with B ~ Beta(a, b)
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        p = dict(self.params)
        if self.kind == "point":
            atoms = np.atleast_1d(np.asarray(p["atoms"], dtype=float))
            w = np.asarray(p.get("weights", np.ones(len(atoms))), dtype=float)
            if len(atoms) == 0 or w.shape != atoms.shape or np.any(w < 0) or w.sum() <= 0:
                raise ValueError("point law needs atoms and nonnegative weights of the same length")
            p = {"atoms": atoms.tolist(), "weights": (w / w.sum()).tolist()}
        elif self.kind == "uniform":
            p = {"low": float(p["low"]), "high": float(p["high"])}
            if not p["low"] < p["high"]:
                raise ValueError("uniform law needs low < high")
        elif self.kind == "normal":
            p = {"mean": float(p.get("mean", 0.0)), "std": float(p["std"])}
            if not p["std"] > 0:
                raise ValueError("normal law needs std > 0")
        elif self.kind == "beta":
            p = {"a": float(p["a"]), "b": float(p["b"]), "scale": float(p.get("scale", np.pi))}
            if not (p["a"] > 0 and p["b"] > 0 and p["scale"] > 0):
                raise ValueError("beta law needs a, b, scale > 0")
        else:
            raise ValueError(f"unknown jump law kind {self.kind!r}")
        object.__setattr__(self, "params", p)

    def support(self) -> tuple[float, float]:
        p = self.params
        if self.kind == "point":
            return min(p["atoms"]), max(p["atoms"])
        if self.kind == "uniform":
            return p["low"], p["high"]
        if self.kind == "normal":
            return -np.inf, np.inf
        return 0.0, p["scale"]

    def has_atom_at(self, x: float) -> bool:
        return self.kind == "point" and any(a == x and w > 0 for a, w in zip(self.params["atoms"], self.params["weights"]))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        p = self.params
        if self.kind == "point":
            return rng.choice(np.asarray(p["atoms"]), size=size, p=np.asarray(p["weights"]))
        if self.kind == "uniform":
            return rng.uniform(p["low"], p["high"], size=size)
        if self.kind == "normal":
            return rng.normal(p["mean"], p["std"], size=size)
        return p["scale"] * rng.beta(p["a"], p["b"], size=size)

    def expect(self, fn, epsabs: float = 1e-11) -> tuple[float, float]:
        """E[fn(U)] and an absolute error bound for the quadrature."""
        p = self.params
        if self.kind == "point":
            return float(sum(w * fn(a) for a, w in zip(p["atoms"], p["weights"]))), 0.0
        if self.kind == "uniform":
            val, err = integrate.quad(fn, p["low"], p["high"], epsabs=epsabs, epsrel=0, limit=200)
            width = p["high"] - p["low"]
            return val / width, err / width
        if self.kind == "normal":
            dist = stats.norm(p["mean"], p["std"])
            # 12 standard deviations: the discarded tail mass is below 1e-32.
            lo, hi = p["mean"] - 12 * p["std"], p["mean"] + 12 * p["std"]
            return integrate.quad(lambda u: fn(u) * dist.pdf(u), lo, hi, epsabs=epsabs, epsrel=0, limit=200)
        dist = stats.beta(p["a"], p["b"], scale=p["scale"])
        return integrate.quad(lambda u: fn(u) * dist.pdf(u), 0.0, p["scale"], epsabs=epsabs, epsrel=0, limit=200)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "JumpLaw":
        d = dict(d)
        return cls(d.pop("kind"), d)
