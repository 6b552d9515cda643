"""Volumes of purification manifolds: closed forms, Gauss-Legendre, Monte Carlo."""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .purification import batch_sqrt_det
from .spectra import Spectrum, as_spectrum
from .unitary import UnitaryFamily

CLOSED_FORM_GROUPS = ("SU_2", "SO_2", "SO_3", "SO_N_product")
MAX_QUADRATURE_PARAMS = 4
DEFAULT_NODES = 32
# samples per Monte Carlo work unit; a multiple of 4 keeps Philox blocks aligned
MC_CHUNK = 4096


@dataclass(frozen=True)
class VolumeResult:
    value: float
    method: str
    std_error: float = 0.0
    samples_or_nodes: int = 0
    seed: int | None = None


def _group_tag(group: str) -> str:
    g = group.strip().upper().replace("(", "_").replace(")", "")
    aliases = {"SU2": "SU_2", "SU_2": "SU_2", "SO2": "SO_2", "SO_2": "SO_2",
               "SO3": "SO_3", "SO_3": "SO_3", "SON": "SO_N_product",
               "SO_N": "SO_N_product", "SO_N_PRODUCT": "SO_N_product"}
    if g in aliases:
        return aliases[g]
    raise ValueError(f"no closed form for group {group!r}; choose from {CLOSED_FORM_GROUPS}")


def pair_sum_product(lam: np.ndarray) -> np.ndarray:
    """``prod_{i<j} sqrt(l_i + l_j)`` along the last axis."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.ones(lam.shape[:-1])
    for i, j in itertools.combinations(range(n), 2):
        out = out * np.sqrt(lam[..., i] + lam[..., j])
    return out


def _closed_value(tag: str, lam: np.ndarray) -> np.ndarray:
    n = lam.shape[-1]
    expected = {"SU_2": 2, "SO_2": 2, "SO_3": 3}.get(tag)
    if expected is not None and n != expected:
        raise ValueError(f"{tag} needs a spectrum of dimension {expected}, got {n}")
    if tag == "SU_2":
        return 4.0 * math.pi**2 * np.sqrt(np.maximum(lam[..., 0] * lam[..., 1], 0.0))
    if tag == "SO_2":
        return 0.5 * math.pi * np.sqrt(lam[..., 0] + lam[..., 1])
    if tag == "SO_3":
        return 0.25 * math.pi**2 * pair_sum_product(lam)
    return pair_sum_product(lam)


def closed_form_volume(group: str, s: Spectrum | Sequence[float]) -> VolumeResult:
    """Exact volume for SU(2), SO(2), SO(3), or the SO(N) pair-sum product.

    The SO(N) product drops all factors of pi, so only its normalized value is
    comparable with the other methods.
    """
    s = as_spectrum(s)
    value = float(_closed_value(_group_tag(group), s.as_array()))
    return VolumeResult(value, "closed_form")


def batch_normalized_volume(group: str, lam: np.ndarray) -> np.ndarray:
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    tag = _group_tag(group)
    n = lam.shape[-1]
    top = _closed_value(tag, np.full(n, 1.0 / n))
    return np.clip(_closed_value(tag, lam) / top, 0.0, 1.0)


def normalized_volume(group: str, s: Spectrum | Sequence[float]) -> float:
    """Volume relative to the maximally mixed spectrum of the same dimension."""
    return float(batch_normalized_volume(group, as_spectrum(s).as_array()))


def quadrature_volume(s: Spectrum | Sequence[float], f: UnitaryFamily,
                      nodes_per_axis: int = DEFAULT_NODES) -> VolumeResult:
    """Tensor-product Gauss-Legendre integral of the volume element over the chart box."""
    s = as_spectrum(s)
    if s.dim != f.dim:
        raise ValueError(f"spectrum has dimension {s.dim} but the unitary acts on {f.dim}")
    if f.n_params > MAX_QUADRATURE_PARAMS:
        raise ValueError(f"{f.n_params} parameters is too many for a tensor grid; "
                         "use monte_carlo_volume")
    if nodes_per_axis < 1:
        raise ValueError("nodes_per_axis must be positive")
    x, w = np.polynomial.legendre.leggauss(nodes_per_axis)
    axes, weights = [], []
    for lo, hi in f.bounds:
        half = 0.5 * (hi - lo)
        axes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.n_params)
    wgrid = np.ones(1)
    for wa in weights:
        wgrid = np.multiply.outer(wgrid, wa).reshape(-1)
    vals = batch_sqrt_det(f, grid, s.as_array()[None, :])[0]
    value = math.fsum(vals * wgrid)
    return VolumeResult(max(value, 0.0), "quadrature", 0.0, nodes_per_axis)


def thread_count() -> int:
    env = os.environ.get("SOI_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def uniform_draws(f: UnitaryFamily, seed: int, start: int, count: int) -> np.ndarray:
    """Parameter draws ``start .. start + count - 1`` of the stream keyed by ``seed``.

    Sample ``s`` always consumes Philox outputs ``s*n .. s*n + n - 1``, so any
    slice of the stream can be regenerated on its own.
    """
    n = f.n_params
    offset = start * n
    bitgen = np.random.Philox(key=int(seed) % 2**64)
    skip, rem = divmod(offset, 4)
    gen = np.random.Generator(bitgen.advance(skip) if skip else bitgen)
    u = gen.random(rem + count * n)[rem:].reshape(count, n)
    lo = np.array([b[0] for b in f.bounds])
    hi = np.array([b[1] for b in f.bounds])
    return lo + (hi - lo) * u


def monte_carlo_volumes(spectra: Sequence[Spectrum | Sequence[float]], f: UnitaryFamily,
                        samples: int, seed: int, threads: int | None = None) -> list[VolumeResult]:
    """Monte Carlo volumes for many spectra sharing one stream of parameter draws.

    Each entry is bit-identical to ``monte_carlo_volume`` on that spectrum
    alone: work is cut into fixed chunks, each chunk summed with ``fsum`` and
    the chunk sums combined in chunk order, whatever the thread count.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    lam = np.array([as_spectrum(s).as_array() for s in spectra])
    if lam.shape[1] != f.dim:
        raise ValueError(f"spectra have dimension {lam.shape[1]} but the unitary acts on {f.dim}")
    starts = list(range(0, samples, MC_CHUNK))

    def work(start: int) -> np.ndarray:
        count = min(MC_CHUNK, samples - start)
        vals = batch_sqrt_det(f, uniform_draws(f, seed, start, count), lam)
        return np.array([[math.fsum(row), math.fsum(row * row)] for row in vals])

    workers = threads or thread_count()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(work, starts))
    else:
        partials = [work(start) for start in starts]
    partials = np.array(partials)  # (chunks, spectra, 2)

    box = f.box_volume
    out = []
    for k in range(lam.shape[0]):
        total = math.fsum(partials[:, k, 0])
        total_sq = math.fsum(partials[:, k, 1])
        mean = total / samples
        if samples > 1:
            var = max((total_sq - total * mean) / (samples - 1), 0.0)
            err = box * math.sqrt(var / samples)
        else:
            err = 0.0
        out.append(VolumeResult(box * mean, "monte_carlo", err, samples, int(seed)))
    return out


def monte_carlo_volume(s: Spectrum | Sequence[float], f: UnitaryFamily, samples: int,
                       seed: int, threads: int | None = None) -> VolumeResult:
    """Box volume times the sample mean of the volume element under uniform draws."""
    return monte_carlo_volumes([s], f, samples, seed, threads)[0]
