"""
Application utility functions.
Sigmoidal (real-time) and logarithmic (delay-tolerant) satisfaction curves, their
logarithms and log-slopes, in scalar and vectorized (UtilityBank) form.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Union

import numpy as np
from scipy.special import expit, log_expit

from src.utils.errors import UtilityDomainError


@dataclass(frozen=True)
class SigmoidParams:
    """
    Sigmoidal utility U(r) = c * (1 / (1 + exp(-a (r - b))) - d).

    c and d are derived from a and b so that U(0) = 0 and U(inf) = 1.
    """

    a: float
    b: float
    c: float = field(init=False)
    d: float = field(init=False)

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0) or not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise UtilityDomainError(f"Sigmoid parameters must be positive, got a={self.a}, b={self.b}")
        object.__setattr__(self, "c", 1.0 + math.exp(-self.a * self.b))
        object.__setattr__(self, "d", float(expit(-self.a * self.b)))

    # The closed forms below are algebraic rewrites of c * (sigma(a(r-b)) - d) that stay
    # accurate near r = 0 and far past the inflection point.
    def value(self, r):
        with np.errstate(over="ignore"):
            return -np.expm1(-self.a * r) * expit(self.a * (r - self.b))

    def log_value(self, r):
        with np.errstate(divide="ignore"):
            return np.log(-np.expm1(-self.a * r)) + log_expit(self.a * (r - self.b))

    def log_slope(self, r):
        with np.errstate(over="ignore", divide="ignore"):
            return self.a / np.expm1(self.a * r) + self.a * expit(self.a * (self.b - r))


@dataclass(frozen=True)
class LogParams:
    """Logarithmic utility U(r) = log(1 + k r) / log(1 + k r_max)."""

    k: float
    r_max: float = 100.0

    def __post_init__(self):
        if not (self.k > 0 and self.r_max > 0) or not (math.isfinite(self.k) and math.isfinite(self.r_max)):
            raise UtilityDomainError(f"Log parameters must be positive, got k={self.k}, r_max={self.r_max}")

    @property
    def norm(self):
        return math.log1p(self.k * self.r_max)

    def value(self, r):
        return np.log1p(self.k * r) / self.norm

    def log_value(self, r):
        with np.errstate(divide="ignore"):
            return np.log(np.log1p(self.k * r)) - math.log(self.norm)

    def log_slope(self, r):
        with np.errstate(divide="ignore"):
            return self.k / ((1.0 + self.k * r) * np.log1p(self.k * r))


UtilityFunction = Union[SigmoidParams, LogParams]

# Application presets. VoIP/video/FTP parameter values are the usual QoS examples.
PRESETS: Dict[str, UtilityFunction] = {
    "voip": SigmoidParams(a=5.0, b=10.0),
    "video": SigmoidParams(a=0.5, b=20.0),
    "ftp": LogParams(k=15.0),
}


def _check_utility(u):
    if not isinstance(u, (SigmoidParams, LogParams)):
        raise UtilityDomainError(f"Unsupported utility function: {u!r}")


def eval_utility(u: UtilityFunction, r):
    """
    Evaluate the satisfaction U(r).

    Args:
        u: Sigmoid or logarithmic parameters
        r: Nonnegative rate (scalar or array)

    Returns:
        Satisfaction in [0, 1] (log utilities may exceed 1 above r_max)
    """
    _check_utility(u)
    if np.any(np.asarray(r) < 0):
        raise UtilityDomainError(f"Rate must be nonnegative, got {r}")
    result = u.value(r)
    return float(result) if np.ndim(result) == 0 else result


def log_utility(u: UtilityFunction, r):
    """Natural logarithm of U(r); -inf at r = 0."""
    _check_utility(u)
    if np.any(np.asarray(r) < 0):
        raise UtilityDomainError(f"Rate must be nonnegative, got {r}")
    result = u.log_value(r)
    return float(result) if np.ndim(result) == 0 else result


def log_utility_slope(u: UtilityFunction, r):
    """
    Derivative of ln U at r, i.e. U'(r) / U(r).

    Args:
        u: Sigmoid or logarithmic parameters
        r: Strictly positive rate (scalar or array)

    Returns:
        Positive, strictly decreasing slope
    """
    _check_utility(u)
    if np.any(np.asarray(r) <= 0):
        raise UtilityDomainError(f"Log-slope needs a positive rate, got {r}")
    result = u.log_slope(r)
    return float(result) if np.ndim(result) == 0 else result


def utility_from_dict(data, default_r_max=100.0):
    """
    Build a utility from its document form.

    Args:
        data: Mapping with 'type' ('sigmoid' or 'log') and its parameters
        default_r_max: r_max used when a log utility does not set one

    Returns:
        UtilityFunction
    """
    kind = data.get("type")
    if kind == "sigmoid":
        return SigmoidParams(a=float(data["a"]), b=float(data["b"]))
    if kind == "log":
        return LogParams(k=float(data["k"]), r_max=float(data.get("r_max", default_r_max)))
    raise UtilityDomainError(f"Unknown utility type: {kind!r}")


def utility_to_dict(u: UtilityFunction, default_r_max=100.0):
    """Document form of a utility; r_max is omitted when it equals the default."""
    if isinstance(u, SigmoidParams):
        return {"type": "sigmoid", "a": u.a, "b": u.b}
    data = {"type": "log", "k": u.k}
    if u.r_max != default_r_max:
        data["r_max"] = u.r_max
    return data


def describe_utility(u: UtilityFunction):
    if isinstance(u, SigmoidParams):
        return f"sigmoid(a={u.a:g},b={u.b:g})"
    return f"log(k={u.k:g},r_max={u.r_max:g})"


class UtilityBank:
    """Vectorized view of a UE roster's utilities, indexed like the roster."""

    def __init__(self, utilities: Iterable[UtilityFunction]):
        self.utilities = tuple(utilities)
        for u in self.utilities:
            _check_utility(u)

        self.sigmoid_idx = np.array(
            [i for i, u in enumerate(self.utilities) if isinstance(u, SigmoidParams)], dtype=int
        )
        self.log_idx = np.array([i for i, u in enumerate(self.utilities) if isinstance(u, LogParams)], dtype=int)

        self._a = np.array([self.utilities[i].a for i in self.sigmoid_idx], dtype=float)
        self._b = np.array([self.utilities[i].b for i in self.sigmoid_idx], dtype=float)
        self._k = np.array([self.utilities[i].k for i in self.log_idx], dtype=float)
        self._norm = np.array([self.utilities[i].norm for i in self.log_idx], dtype=float)

    def __len__(self):
        return len(self.utilities)

    def subset(self, indices):
        return UtilityBank(self.utilities[i] for i in indices)

    def log_value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty(len(self.utilities))
        with np.errstate(divide="ignore"):
            rs = r[self.sigmoid_idx]
            out[self.sigmoid_idx] = np.log(-np.expm1(-self._a * rs)) + log_expit(self._a * (rs - self._b))
            rl = r[self.log_idx]
            out[self.log_idx] = np.log(np.log1p(self._k * rl)) - np.log(self._norm)
        return out

    def log_slope(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty(len(self.utilities))
        with np.errstate(over="ignore", divide="ignore"):
            rs = r[self.sigmoid_idx]
            out[self.sigmoid_idx] = self._a / np.expm1(self._a * rs) + self._a * expit(self._a * (self._b - rs))
            rl = r[self.log_idx]
            out[self.log_idx] = self._k / ((1.0 + self._k * rl) * np.log1p(self._k * rl))
        return out
