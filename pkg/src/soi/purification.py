"""Purifications of a diagonal density operator and the metric they induce.

Composite vectors live in ``H_E (x) H_S`` with component ``(e, s)`` stored at
flat position ``e * N + s``. A purification of ``diag(l)`` generated by the
environment unitary ``U`` is then just the matrix ``U @ diag(sqrt(l))``
flattened row-major.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectra import Spectrum, as_spectrum
from .unitary import UnitaryFamily, derivatives_batch

DET_CLAMP = 1e-12
DET_IMAG_TOL = 1e-10
# below this the LU determinant is re-derived from the tangent frame's singular values
DET_REFINE = 1e-8


class MetricError(ArithmeticError):
    """The Gram matrix is inconsistent (non-Hermitian or clearly negative determinant)."""


@dataclass(frozen=True)
class PurificationPoint:
    state: np.ndarray
    spectrum: Spectrum
    family: UnitaryFamily
    xi: np.ndarray

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def reduced_state(self) -> np.ndarray:
        return partial_trace_E(self.state, self.dim)


@dataclass(frozen=True)
class GramMetric:
    g: np.ndarray
    det: float
    sqrt_det: float


def bell_state(n: int) -> np.ndarray:
    """Unnormalized maximally entangled vector ``sum_i |i>_E |i>_S``."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    return np.eye(n, dtype=complex).reshape(-1)


def _check_dims(s: Spectrum, f: UnitaryFamily) -> None:
    if s.dim != f.dim:
        raise ValueError(f"spectrum has dimension {s.dim} but the unitary acts on {f.dim}")


def purify(s: Spectrum | Sequence[float], f: UnitaryFamily, xi: Sequence[float]) -> PurificationPoint:
    """``(U_E(xi) (x) sqrt(rho_S)) |Gamma>`` for ``rho_S = diag(s)``."""
    s = as_spectrum(s)
    _check_dims(s, f)
    xi = f.check(xi)
    u = f.realize(xi)
    state = (u * np.sqrt(s.as_array())[None, :]).astype(complex).reshape(-1)
    return PurificationPoint(state, s, f, xi)


def canonical_purification(s: Spectrum | Sequence[float]) -> np.ndarray:
    s = as_spectrum(s)
    return (np.sqrt(s.as_array()).astype(complex)[:, None] * np.eye(s.dim)).reshape(-1)


def partial_trace_E(p: np.ndarray, n: int | None = None) -> np.ndarray:
    """Reduced density matrix on S: ``rho[s, t] = sum_e p[e, s] conj(p[e, t])``."""
    p = np.asarray(p)
    if n is None:
        n = int(round(np.sqrt(p.size)))
    if p.ndim != 1 or p.size % n:
        raise ValueError(f"vector of length {p.size} is not a composite of S with dimension {n}")
    m = p.reshape(-1, n)
    return m.T @ m.conj()


def embed_environment(p: PurificationPoint | np.ndarray, m: int, n: int | None = None) -> np.ndarray:
    """Push a purification into a larger environment of dimension ``m`` via
    ``sum_i |i>_Ebar <i|_E``; the new environment levels stay empty."""
    state = p.state if isinstance(p, PurificationPoint) else np.asarray(p)
    if n is None:
        n = p.dim if isinstance(p, PurificationPoint) else int(round(np.sqrt(state.size)))
    env = state.size // n
    if m < env:
        raise ValueError(f"target environment dimension {m} is smaller than {env}")
    out = np.zeros((m, n), dtype=complex)
    out[:env] = state.reshape(env, n)
    return out.reshape(-1)


def tangent_frame(s: Spectrum | Sequence[float], f: UnitaryFamily, xi: Sequence[float]) -> list[np.ndarray]:
    """Partial derivatives of the purification, one composite vector per parameter."""
    s = as_spectrum(s)
    _check_dims(s, f)
    xi = f.check(xi)
    _, d = derivatives_batch(f, xi[None, :])
    root = np.sqrt(s.as_array())[None, None, :]
    return list((d[0] * root).reshape(f.n_params, -1))


def _finish(g: np.ndarray, frame: np.ndarray | None = None) -> GramMetric:
    if np.abs(g - g.conj().T).max() > 1e-12:
        raise MetricError("Gram matrix is not Hermitian")
    g = 0.5 * (g + g.conj().T)
    det = complex(np.linalg.det(g))
    if abs(det.imag) > DET_IMAG_TOL:
        raise MetricError(f"Gram determinant has imaginary part {det.imag!r}")
    value = det.real
    if value < -DET_CLAMP:
        raise MetricError(f"Gram determinant {value!r} is negative")
    if frame is None:
        root = float(np.sqrt(max(value, 0.0)))
    else:
        # product of singular values of the frame: no squaring of rounding errors
        root = float(np.prod(np.linalg.svd(frame, compute_uv=False)))
    return GramMetric(g, root * root, root)


def gram_metric(s: Spectrum | Sequence[float], f: UnitaryFamily, xi: Sequence[float]) -> GramMetric:
    """``g_ij = <Gamma_,i | Gamma_,j>`` as a full Hermitian matrix.

    The determinant is taken of the complex Hermitian matrix itself; dropping
    the imaginary off-diagonals would lose the spectrum dependence for SU(2).
    ``sqrt_det`` is computed as the product of the tangent frame's singular
    values, which stays accurate to rounding level on degenerate spectra.
    """
    frame = np.array(tangent_frame(s, f, xi))
    return _finish(frame.conj() @ frame.T, frame)


def batch_sqrt_det(f: UnitaryFamily, xi: np.ndarray, spectra: np.ndarray) -> np.ndarray:
    """Volume element for every (spectrum, xi) pair: shape ``(S, B)``.

    The derivative overlaps ``A[b, i, j, k] = sum_m conj(dU_i[m, k]) dU_j[m, k]``
    are computed once per parameter draw and contracted with each spectrum.
    """
    spectra = np.atleast_2d(np.asarray(spectra, dtype=float))
    _, d = derivatives_batch(f, xi)
    if f.is_real:
        d = d.real
        a = np.einsum("bimk,bjmk->bijk", d, d)
    else:
        a = np.einsum("bimk,bjmk->bijk", d.conj(), d)
    out = np.empty((spectra.shape[0], xi.shape[0]))
    for row, lam in enumerate(spectra):
        g = a @ lam
        det = np.linalg.det(g)
        if np.iscomplexobj(det):
            det = det.real
        out[row] = np.sqrt(np.maximum(det, 0.0))
        small = np.flatnonzero(det < DET_REFINE)
        if small.size:
            frames = (d[small] * np.sqrt(lam)[None, None, None, :]).reshape(small.size, f.n_params, -1)
            out[row, small] = np.prod(np.linalg.svd(frames, compute_uv=False), axis=-1)
    return out
