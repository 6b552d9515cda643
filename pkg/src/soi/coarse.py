"""Equal-area discretization of the 3-level simplex and macrostate binning.

Cells are squares of an ``ell x ell`` grid in the ``(eta1, eta2)`` unit
square, pushed onto the simplex by::

    l1 = 1 - sqrt(eta1),  l2 = sqrt(eta1) (1 - eta2),  l3 = sqrt(eta1) eta2

which carries the uniform measure on the square to the uniform measure on the
simplex. Each cell takes the observable value at its eta-center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import Spectrum, batch_normalized_linear, batch_normalized_von_neumann
from .volume import batch_normalized_volume

OBSERVABLES = ("volume", "von_neumann", "linear")

WEYL_ETA1 = 0.25
WEYL_ETA2 = 0.5


def eta_to_lambda(eta: np.ndarray) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    r = np.sqrt(eta[..., 0])
    return np.stack([1.0 - r, r * (1.0 - eta[..., 1]), r * eta[..., 1]], axis=-1)


def stick_breaking(u: np.ndarray) -> np.ndarray:
    """Map uniforms of shape ``(..., N-1)`` onto the ``(N-1)``-simplex.

    ``l_k = r_{k-1} (1 - u_k ** (1 / (N - k)))`` with ``r_0 = 1`` and the last
    component taking the remainder; for ``N = 3`` this is ``eta_to_lambda``.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1] + 1
    out = np.empty(u.shape[:-1] + (n,))
    rest = np.ones(u.shape[:-1])
    for k in range(1, n):
        keep = rest * u[..., k - 1] ** (1.0 / (n - k))
        out[..., k - 1] = rest - keep
        rest = keep
    out[..., n - 1] = rest
    return out


def sample_simplex(n: int, count: int, seed: int) -> list[Spectrum]:
    """``count`` uniform spectra of dimension ``n`` from a seeded Philox stream."""
    return [Spectrum(row) for row in sample_simplex_array(n, count, seed)]


def sample_simplex_array(n: int, count: int, seed: int) -> np.ndarray:
    if n < 2:
        raise ValueError("dimension must be at least 2")
    gen = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
    lam = stick_breaking(gen.random((count, n - 1)))
    return lam / lam.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class SimplexGrid:
    ell: int
    eta: np.ndarray       # (cells, 2) square centers
    lam: np.ndarray       # (cells, 3) spectra at those centers
    cell_ids: np.ndarray  # 1-based ids in [1, ell**2], row-major in (eta1, eta2)
    weyl_filter: bool

    def __len__(self) -> int:
        return len(self.cell_ids)


def build_grid(ell: int, weyl_filter: bool = False) -> SimplexGrid:
    """Cell centers of the ``ell x ell`` eta grid, optionally restricted to
    ``eta1 > 1/4, eta2 > 1/2`` to drop the triangular cells."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    centers = (np.arange(ell) + 0.5) / ell
    e1, e2 = np.meshgrid(centers, centers, indexing="ij")
    eta = np.stack([e1.ravel(), e2.ravel()], axis=1)
    ids = np.arange(1, ell * ell + 1)
    if weyl_filter:
        keep = (eta[:, 0] > WEYL_ETA1) & (eta[:, 1] > WEYL_ETA2)
        eta, ids = eta[keep], ids[keep]
    lam = eta_to_lambda(eta)
    lam = lam / lam.sum(axis=1, keepdims=True)
    return SimplexGrid(ell, eta, lam, ids, weyl_filter)


def observable_values(lam: np.ndarray, observable: str) -> np.ndarray:
    """Normalized SO(3) volume, von Neumann or linear entropy for each row."""
    if observable == "volume":
        return batch_normalized_volume("SO_3", lam)
    if observable == "von_neumann":
        return batch_normalized_von_neumann(lam)
    if observable == "linear":
        return batch_normalized_linear(lam)
    raise ValueError(f"unknown observable {observable!r}; choose from {OBSERVABLES}")


def segment_index(values: np.ndarray, k: int) -> np.ndarray:
    """Segment ``a`` in ``1..k`` whose interval ``((a-1)/k, a/k]`` holds each value; 0 goes to 1."""
    return np.clip(np.ceil(np.asarray(values) * k), 1, k).astype(int)


@dataclass(frozen=True)
class MacrostateBinning:
    k: int
    observable: str
    values: np.ndarray       # observable per cell
    assignments: np.ndarray  # segment per cell, 1-based
    counts: np.ndarray       # |L_a|
    fractions: np.ndarray    # |L_a| / |rho_l|
    avg_svn: np.ndarray      # mean normalized von Neumann entropy per segment; nan if empty


def bin_cells(grid: SimplexGrid, observable: str, k: int) -> MacrostateBinning:
    if k < 1:
        raise ValueError("k must be at least 1")
    values = observable_values(grid.lam, observable)
    seg = segment_index(values, k)
    svn = batch_normalized_von_neumann(grid.lam)
    counts = np.bincount(seg, minlength=k + 1)[1:]
    sums = np.bincount(seg, weights=svn, minlength=k + 1)[1:]
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return MacrostateBinning(k, observable, values, seg, counts, counts / len(grid), avg)
