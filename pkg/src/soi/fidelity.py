"""Purifications over rotated eigenbases and Uhlmann-Jozsa fidelity two ways.

``fidelity_closed`` is the analytic optimum ``(sum of singular values of
sqrt(rho) sqrt(sigma))**2``. ``fidelity_soi_maximize`` searches the two
purification manifolds directly for the largest squared overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectra import Spectrum, as_spectrum
from .unitary import UnitaryFamily, realize_batch, unitary_group

PSD_TOL = 1e-12


@dataclass(frozen=True)
class RotatedState:
    """``sigma = U_S diag(spectrum) U_S^dagger``."""

    spectrum: Spectrum
    basis_rotation: np.ndarray = field(repr=False)

    def __init__(self, spectrum: Spectrum | Sequence[float], basis_rotation: np.ndarray | None = None):
        spectrum = as_spectrum(spectrum)
        u = np.eye(spectrum.dim, dtype=complex) if basis_rotation is None else \
            np.asarray(basis_rotation, dtype=complex)
        if u.shape != (spectrum.dim, spectrum.dim):
            raise ValueError(f"basis rotation of shape {u.shape} does not match dimension {spectrum.dim}")
        if np.abs(u.conj().T @ u - np.eye(spectrum.dim)).max() > 1e-10:
            raise ValueError("basis rotation is not unitary")
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "basis_rotation", u)

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def density(self) -> np.ndarray:
        u = self.basis_rotation
        return (u * np.array(self.spectrum.values)[None, :]) @ u.conj().T

    def purification_matrix(self) -> np.ndarray:
        """``P`` with the purification at ``U_E`` equal to ``(U_E @ P)`` flattened."""
        u = self.basis_rotation
        return (u * np.sqrt(np.array(self.spectrum.values))[None, :]) @ u.T


def purify_rotated(r: RotatedState, f: UnitaryFamily, xi: Sequence[float]) -> np.ndarray:
    """``sum_i sqrt(l_i) (U_E(xi) U_S |i>) (x) (U_S |i>)``; environment index major."""
    if f.dim != r.dim:
        raise ValueError(f"state has dimension {r.dim} but the unitary acts on {f.dim}")
    u_e = f.realize(xi)
    return (u_e @ r.purification_matrix()).reshape(-1)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w.min()!r})")
    return (v * np.sqrt(np.clip(w, 0.0, None))[None, :]) @ v.conj().T


def _density(x: RotatedState | np.ndarray) -> np.ndarray:
    return x.density() if isinstance(x, RotatedState) else np.asarray(x, dtype=complex)


def fidelity_closed(rho: RotatedState | np.ndarray, sigma: RotatedState | np.ndarray) -> float:
    a, b = _density(rho), _density(sigma)
    if a.shape != b.shape:
        raise ValueError("states have different dimensions")
    sv = np.linalg.svd(psd_sqrt(a) @ psd_sqrt(b), compute_uv=False)
    return float(min(max(sv.sum() ** 2, 0.0), 1.0))


def soi_overlap(rho: RotatedState, sigma: RotatedState, f: UnitaryFamily,
                xi_rho: Sequence[float], xi_sigma: Sequence[float]) -> float:
    """``|<Gamma_rho(xi_rho) | Gamma_sigma(xi_sigma)>|**2``."""
    return float(abs(np.vdot(purify_rotated(rho, f, xi_rho), purify_rotated(sigma, f, xi_sigma))) ** 2)


@dataclass(frozen=True)
class SoiFidelity:
    value: float
    xi_rho: np.ndarray
    xi_sigma: np.ndarray
    evaluations: int


def fidelity_soi_maximize(rho: RotatedState, sigma: RotatedState, budget: int = 20, seed: int = 0,
                          sweeps: int = 200, family: UnitaryFamily | None = None,
                          one_sided: bool = False) -> SoiFidelity:
    """Multi-start coordinate search for the best overlap of two purification manifolds.

    Each of ``budget`` random starts takes up to ``sweeps`` passes over the
    coordinates, trying ``+/- step`` per coordinate and halving a coordinate's
    step whenever neither move helps. Periodic angles wrap; ``phi`` angles are
    clipped to their interval. With ``one_sided`` the rho-side parameters stay
    at zero.
    """
    if rho.dim != sigma.dim:
        raise ValueError("states have different dimensions")
    f = family or unitary_group(rho.dim)
    n = f.n_params
    p_rho, p_sigma = rho.purification_matrix(), sigma.purification_matrix()
    lo = np.array([b[0] for b in f.bounds])
    hi = np.array([b[1] for b in f.bounds])
    periodic = np.array([not name.startswith("phi") for name in f.names])
    lo2, hi2, per2 = np.tile(lo, 2), np.tile(hi, 2), np.tile(periodic, 2)
    active = np.ones(2 * n, dtype=bool)
    if one_sided:
        active[:n] = False

    def score(x: np.ndarray) -> np.ndarray:
        u_r = realize_batch(f, x[:, :n])
        u_s = realize_batch(f, x[:, n:])
        ov = np.einsum("bij,bij->b", (u_r @ p_rho).conj(), u_s @ p_sigma)
        return np.abs(ov) ** 2

    def clamp(x: np.ndarray) -> np.ndarray:
        wrapped = lo2 + np.mod(x - lo2, hi2 - lo2)
        return np.where(per2, wrapped, np.clip(x, lo2, hi2))

    gen = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
    x = lo2 + (hi2 - lo2) * gen.random((budget, 2 * n))
    x[:, ~active] = 0.0
    best = score(x)
    steps = np.tile(0.25 * (hi2 - lo2), (budget, 1))
    evaluations = budget
    coords = np.flatnonzero(active)
    for _ in range(sweeps):
        if steps[:, coords].max() < 1e-12:
            break
        for c in coords:
            up, down = x.copy(), x.copy()
            up[:, c] += steps[:, c]
            down[:, c] -= steps[:, c]
            cand = clamp(np.concatenate([up, down]))
            vals = score(cand)
            evaluations += 2 * budget
            v_up, v_down = vals[:budget], vals[budget:]
            take_up = (v_up > best) & (v_up >= v_down)
            take_down = (v_down > best) & ~take_up
            x[take_up] = cand[:budget][take_up]
            x[take_down] = cand[budget:][take_down]
            best = np.where(take_up, v_up, np.where(take_down, v_down, best))
            stuck = ~(take_up | take_down)
            steps[stuck, c] *= 0.5
    winner = int(np.argmax(best))  # first maximum: lowest start index wins ties
    return SoiFidelity(float(best[winner]), x[winner, :n].copy(), x[winner, n:].copy(), evaluations)
