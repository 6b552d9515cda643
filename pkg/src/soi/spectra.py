"""Eigenvalue spectra on the probability simplex and their entropy functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SUM_TOL = 1e-12
RENORM_TOL = 1e-9


class SpectrumError(ValueError):
    """Raised when values do not describe a point of the probability simplex."""


@dataclass(frozen=True)
class Spectrum:
    """Ordered eigenvalues ``(l1, ..., lN)`` of a diagonal density operator.

    Inputs that sum to one within ``RENORM_TOL`` are renormalized; anything
    further off, negative, or shorter than two entries is rejected.
    """

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        vals = np.asarray(list(values), dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise SpectrumError("a spectrum needs at least two eigenvalues")
        if not np.all(np.isfinite(vals)):
            raise SpectrumError("eigenvalues must be finite")
        if np.any(vals < -SUM_TOL) or np.any(vals > 1 + SUM_TOL):
            raise SpectrumError(f"eigenvalues must lie in [0, 1], got {vals.tolist()}")
        vals = np.clip(vals, 0.0, 1.0)
        total = math.fsum(vals)
        if abs(total - 1.0) > RENORM_TOL:
            raise SpectrumError(f"eigenvalues sum to {total!r}, not 1")
        if abs(total - 1.0) > 0.0:
            vals = vals / total
        object.__setattr__(self, "values", tuple(float(v) for v in vals))

    @property
    def dim(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    @classmethod
    def maximally_mixed(cls, n: int) -> "Spectrum":
        return cls([1.0 / n] * n)

    @classmethod
    def pure(cls, n: int, index: int = 0) -> "Spectrum":
        vals = [0.0] * n
        vals[index] = 1.0
        return cls(vals)

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.values)


def as_spectrum(s: Spectrum | Sequence[float]) -> Spectrum:
    return s if isinstance(s, Spectrum) else Spectrum(s)


def _log(base) -> float:
    if base in ("e", None) or base == math.e:
        return 1.0
    if base in (2, "2", "bits"):
        return math.log(2.0)
    raise ValueError(f"unsupported log base {base!r}; use 'e' or 2")


def von_neumann_entropy(s: Spectrum | Sequence[float], base="e") -> float:
    """``-sum(l * log l)`` with ``0 log 0 = 0``; ``base`` is ``'e'`` or ``2``."""
    lam = as_spectrum(s).as_array()
    nz = lam[lam > 0]
    h = -math.fsum(nz * np.log(nz))
    return max(h, 0.0) / _log(base)


def linear_entropy(s: Spectrum | Sequence[float]) -> float:
    lam = as_spectrum(s).as_array()
    return 1.0 - math.fsum(lam * lam)


def purity(s: Spectrum | Sequence[float]) -> float:
    lam = as_spectrum(s).as_array()
    return math.fsum(lam * lam)


def negentropy(s: Spectrum | Sequence[float], base="e") -> float:
    """Entropy deficit relative to the maximally mixed state of equal dimension."""
    s = as_spectrum(s)
    gap = math.log(s.dim) / _log(base) - von_neumann_entropy(s, base)
    return max(gap, 0.0)


def max_entropy(n: int, kind: str = "von_neumann", base="e") -> float:
    if kind == "von_neumann":
        return math.log(n) / _log(base)
    if kind == "linear":
        return 1.0 - 1.0 / n
    raise ValueError(f"unknown entropy kind {kind!r}")


def normalize_entropy(value: float, s: Spectrum | Sequence[float], kind: str = "von_neumann",
                      base="e") -> float:
    """Divide an entropy of ``s`` by its maximum over the simplex of the same dimension.

    ``base`` only matters for von Neumann values and must match the base the
    value was computed in.
    """
    top = max_entropy(as_spectrum(s).dim, kind, base)
    if value > top + 1e-9:
        raise ValueError(f"{kind} entropy {value!r} exceeds its maximum {top!r}")
    return min(max(value / top, 0.0), 1.0)


def normalized_von_neumann(s: Spectrum | Sequence[float]) -> float:
    return normalize_entropy(von_neumann_entropy(s), s, "von_neumann")


def normalized_linear(s: Spectrum | Sequence[float]) -> float:
    return normalize_entropy(linear_entropy(s), s, "linear")


@dataclass(frozen=True)
class EntropyReport:
    von_neumann_nats: float
    von_neumann_bits: float
    linear: float
    purity: float
    normalized_von_neumann: float
    normalized_linear: float
    negentropy_nats: float


def entropy_report(s: Spectrum | Sequence[float]) -> EntropyReport:
    s = as_spectrum(s)
    svn = von_neumann_entropy(s)
    p = purity(s)
    return EntropyReport(
        von_neumann_nats=svn,
        von_neumann_bits=svn / math.log(2.0),
        linear=1.0 - p,
        purity=p,
        normalized_von_neumann=normalize_entropy(svn, s, "von_neumann"),
        normalized_linear=normalize_entropy(1.0 - p, s, "linear"),
        negentropy_nats=negentropy(s),
    )


# Vectorized forms for grids of spectra (rows sum to one).

def batch_von_neumann(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=-1), 0.0)


def batch_normalized_von_neumann(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return np.clip(batch_von_neumann(lam) / math.log(lam.shape[-1]), 0.0, 1.0)


def batch_normalized_linear(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    return np.clip((1.0 - (lam * lam).sum(axis=-1)) / (1.0 - 1.0 / n), 0.0, 1.0)
