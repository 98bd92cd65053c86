"""Activity duration distributions.

Each distribution knows its closed-form mean/variance, its quantile
function (used for inverse-CDF sampling so that matched uniforms give
comonotone draws across scenarios), and how to apply an affine transform
``shift + scale * X``.  Every supported family is closed under positive
affine transforms, which is what lets partially executed activities be
re-expressed in-family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaincinv, ndtri

PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "deterministic": ("value",),
    "normal": ("mean", "sd"),
    "triangular": ("min", "mode", "max"),
    "uniform": ("min", "max"),
    "beta": ("min", "max", "alpha", "beta"),
    "twopoint": ("low", "high", "p_low"),
}


@dataclass(frozen=True)
class DurationDistribution:
    kind: str
    params: dict[str, float]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def deterministic(value: float) -> "DurationDistribution":
        return DurationDistribution("deterministic", {"value": float(value)})

    @staticmethod
    def normal(mean: float, sd: float) -> "DurationDistribution":
        return DurationDistribution("normal", {"mean": float(mean), "sd": float(sd)})

    @staticmethod
    def triangular(minimum: float, mode: float, maximum: float) -> "DurationDistribution":
        return DurationDistribution(
            "triangular", {"min": float(minimum), "mode": float(mode), "max": float(maximum)}
        )

    @staticmethod
    def uniform(minimum: float, maximum: float) -> "DurationDistribution":
        return DurationDistribution("uniform", {"min": float(minimum), "max": float(maximum)})

    @staticmethod
    def beta(minimum: float, maximum: float, alpha: float, beta: float) -> "DurationDistribution":
        return DurationDistribution(
            "beta",
            {"min": float(minimum), "max": float(maximum), "alpha": float(alpha), "beta": float(beta)},
        )

    @staticmethod
    def two_point(low: float, high: float, p_low: float) -> "DurationDistribution":
        return DurationDistribution(
            "twopoint", {"low": float(low), "high": float(high), "p_low": float(p_low)}
        )

    # -- validation --------------------------------------------------------

    def check(self) -> list[str]:
        """Parameter violations as human-readable strings; empty when valid."""
        p = self.params
        problems: list[str] = []
        if self.kind not in PARAM_NAMES:
            return [f"unknown distribution kind '{self.kind}'"]
        missing = [n for n in PARAM_NAMES[self.kind] if n not in p]
        if missing:
            return [f"{self.kind} distribution missing parameter(s): {', '.join(missing)}"]
        for name in PARAM_NAMES[self.kind]:
            v = p[name]
            if not math.isfinite(v):
                problems.append(f"{self.kind} parameter '{name}' is not finite")
        if problems:
            return problems
        if self.kind == "normal":
            if p["sd"] < 0:
                problems.append(f"normal sd must be >= 0, got {p['sd']}")
        elif self.kind == "triangular":
            if not (p["min"] <= p["mode"] <= p["max"]):
                problems.append("triangular requires min <= mode <= max")
            if p["min"] >= p["max"]:
                problems.append("triangular requires min < max")
        elif self.kind == "uniform":
            if p["min"] >= p["max"]:
                problems.append("uniform requires min < max")
        elif self.kind == "beta":
            if p["min"] >= p["max"]:
                problems.append("beta requires min < max")
            if p["alpha"] <= 0 or p["beta"] <= 0:
                problems.append("beta requires alpha > 0 and beta > 0")
        elif self.kind == "twopoint":
            if p["low"] > p["high"]:
                problems.append("twopoint requires low <= high")
            if not (0.0 <= p["p_low"] <= 1.0):
                problems.append("twopoint requires 0 <= p_low <= 1")
        return problems

    # -- moments -----------------------------------------------------------

    @property
    def is_deterministic(self) -> bool:
        return self.kind == "deterministic" or self.variance() == 0.0

    def mean(self) -> float:
        p = self.params
        if self.kind == "deterministic":
            return p["value"]
        if self.kind == "normal":
            return p["mean"]
        if self.kind == "triangular":
            return (p["min"] + p["mode"] + p["max"]) / 3.0
        if self.kind == "uniform":
            return (p["min"] + p["max"]) / 2.0
        if self.kind == "beta":
            a, b = p["alpha"], p["beta"]
            return p["min"] + (p["max"] - p["min"]) * a / (a + b)
        if self.kind == "twopoint":
            return p["p_low"] * p["low"] + (1.0 - p["p_low"]) * p["high"]
        raise ValueError(f"unknown distribution kind '{self.kind}'")

    def variance(self) -> float:
        p = self.params
        if self.kind == "deterministic":
            return 0.0
        if self.kind == "normal":
            return p["sd"] ** 2
        if self.kind == "triangular":
            a, c, b = p["min"], p["mode"], p["max"]
            return (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0
        if self.kind == "uniform":
            return (p["max"] - p["min"]) ** 2 / 12.0
        if self.kind == "beta":
            a, b = p["alpha"], p["beta"]
            return (p["max"] - p["min"]) ** 2 * a * b / ((a + b) ** 2 * (a + b + 1.0))
        if self.kind == "twopoint":
            q = p["p_low"]
            return q * (1.0 - q) * (p["high"] - p["low"]) ** 2
        raise ValueError(f"unknown distribution kind '{self.kind}'")

    def sd(self) -> float:
        return math.sqrt(self.variance())

    def mode(self) -> float:
        """Most likely value; falls back to the mean where no unique mode exists."""
        p = self.params
        if self.kind == "triangular":
            return p["mode"]
        if self.kind == "beta":
            a, b = p["alpha"], p["beta"]
            if a > 1.0 and b > 1.0:
                return p["min"] + (p["max"] - p["min"]) * (a - 1.0) / (a + b - 2.0)
            if a <= 1.0 < b:
                return p["min"]
            if b <= 1.0 < a:
                return p["max"]
            return self.mean()
        if self.kind == "twopoint":
            return p["low"] if p["p_low"] >= 0.5 else p["high"]
        return self.mean()

    def central(self, which: str = "mean") -> float:
        if which == "mean":
            return self.mean()
        if which == "mode":
            return self.mode()
        raise ValueError(f"central value must be 'mean' or 'mode', got '{which}'")

    def lower_bound(self) -> float:
        """Infimum of the support (-inf for normal)."""
        p = self.params
        if self.kind == "deterministic":
            return p["value"]
        if self.kind == "normal":
            return -math.inf if p["sd"] > 0 else p["mean"]
        if self.kind == "twopoint":
            return p["low"]
        return p["min"]

    # -- sampling ----------------------------------------------------------

    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Quantile function, vectorized over uniforms in (0, 1)."""
        p = self.params
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "deterministic":
            return np.full_like(u, p["value"])
        if self.kind == "normal":
            return p["mean"] + p["sd"] * ndtri(u)
        if self.kind == "uniform":
            return p["min"] + (p["max"] - p["min"]) * u
        if self.kind == "triangular":
            a, c, b = p["min"], p["mode"], p["max"]
            span = b - a
            fc = (c - a) / span
            left = a + np.sqrt(u * span * (c - a))
            right = b - np.sqrt((1.0 - u) * span * (b - c))
            return np.where(u < fc, left, right)
        if self.kind == "beta":
            x = betaincinv(p["alpha"], p["beta"], u)
            return p["min"] + (p["max"] - p["min"]) * x
        if self.kind == "twopoint":
            return np.where(u < p["p_low"], p["low"], p["high"])
        raise ValueError(f"unknown distribution kind '{self.kind}'")

    # -- transforms --------------------------------------------------------

    def affine(self, shift: float, scale: float) -> "DurationDistribution":
        """Distribution of ``shift + scale * X`` (scale >= 0); stays in-family."""
        if scale < 0:
            raise ValueError("affine scale must be >= 0")
        p = self.params
        if scale == 0.0:
            return DurationDistribution.deterministic(shift)
        if self.kind == "deterministic":
            return DurationDistribution.deterministic(shift + scale * p["value"])
        if self.kind == "normal":
            return DurationDistribution.normal(shift + scale * p["mean"], scale * p["sd"])
        if self.kind == "triangular":
            return DurationDistribution.triangular(
                shift + scale * p["min"], shift + scale * p["mode"], shift + scale * p["max"]
            )
        if self.kind == "uniform":
            return DurationDistribution.uniform(shift + scale * p["min"], shift + scale * p["max"])
        if self.kind == "beta":
            return DurationDistribution.beta(
                shift + scale * p["min"], shift + scale * p["max"], p["alpha"], p["beta"]
            )
        if self.kind == "twopoint":
            return DurationDistribution.two_point(
                shift + scale * p["low"], shift + scale * p["high"], p["p_low"]
            )
        raise ValueError(f"unknown distribution kind '{self.kind}'")
