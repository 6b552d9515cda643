"""Unitaries built from two-dimensional plane rotations, with analytic derivatives.

A U(N) element is written as ``exp(i alpha) E1 E2 ... E_{N-1}`` where
``E_{m-1} = E(m-1, m) E(m-2, m) ... E(1, m)`` and each ``E(i, j)`` acts on
the ``(i, j)`` plane only::

    E_ii = exp(i psi) cos(phi)      E_ij = exp(i chi) sin(phi)
    E_ji = -exp(-i chi) sin(phi)    E_jj = exp(-i psi) cos(phi)

Only the ``E(1, m)`` factors carry a ``chi`` angle. Plane indices are 1-based
in names (``phi_12``) and 0-based in code.

All heavy lifting happens on batches of parameter vectors, shape ``(B, n)``;
the scalar helpers wrap those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

GROUPS = ("U_N", "SU_2", "SO_N")


class ParameterRangeError(ValueError):
    """A parameter lies outside its chart domain."""


@dataclass(frozen=True)
class PlaneRotation:
    """Descriptor of one factor ``E(i, j)``; indices are 0-based, ``i < j``.

    The ``*_index`` fields point into the family's parameter vector, or are
    ``None`` when that angle is pinned to zero.
    """

    i: int
    j: int
    phi_index: int
    psi_index: int | None = None
    chi_index: int | None = None


def plane_rotation(n: int, i: int, j: int, phi: float, psi: float = 0.0,
                   chi: float = 0.0) -> np.ndarray:
    """Dense ``E(i, j)`` for 0-based plane indices."""
    if not 0 <= i < j < n:
        raise ValueError(f"bad plane ({i}, {j}) for dimension {n}")
    e = np.eye(n, dtype=complex)
    c, s = math.cos(phi), math.sin(phi)
    e[i, i] = np.exp(1j * psi) * c
    e[i, j] = np.exp(1j * chi) * s
    e[j, i] = -np.exp(-1j * chi) * s
    e[j, j] = np.exp(-1j * psi) * c
    return e


@dataclass(frozen=True)
class UnitaryFamily:
    """A chart ``xi -> U(xi)`` on U(N), SU(2) or SO(N)."""

    group: str
    dim: int
    names: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    factors: tuple[PlaneRotation, ...]
    alpha_index: int | None = None

    @property
    def n_params(self) -> int:
        return len(self.names)

    @property
    def is_real(self) -> bool:
        return self.group == "SO_N"

    @property
    def box_volume(self) -> float:
        return math.prod(hi - lo for lo, hi in self.bounds)

    def parameter_domain(self) -> list[tuple[str, float, float]]:
        return [(name, lo, hi) for name, (lo, hi) in zip(self.names, self.bounds)]

    def check(self, xi: Sequence[float]) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.n_params,):
            raise ValueError(f"{self.group}({self.dim}) takes {self.n_params} parameters, "
                             f"got shape {xi.shape}")
        for value, name, (lo, hi) in zip(xi, self.names, self.bounds):
            if not lo <= value <= hi:
                raise ParameterRangeError(f"{name}={value!r} outside [{lo}, {hi}]")
        return xi

    def realize(self, xi: Sequence[float]) -> np.ndarray:
        """The matrix ``U(xi)``; real-valued for SO(N)."""
        xi = self.check(xi)
        u = realize_batch(self, xi[None, :])[0]
        return u.real.copy() if self.is_real else u

    def derivative(self, xi: Sequence[float], k: int) -> np.ndarray:
        """``dU/dxi_k`` by the product rule over factors."""
        xi = self.check(xi)
        if not 0 <= k < self.n_params:
            raise IndexError(f"parameter index {k} out of range for {self.n_params} parameters")
        d = derivatives_batch(self, xi[None, :])[1][0, k]
        return d.real.copy() if self.is_real else d

    def derivatives(self, xi: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """``U(xi)`` together with all parameter derivatives, shape ``(n, N, N)``."""
        xi = self.check(xi)
        u, d = derivatives_batch(self, xi[None, :])
        if self.is_real:
            return u[0].real.copy(), d[0].real.copy()
        return u[0], d[0]


def _factor_planes(n: int) -> list[tuple[int, int]]:
    # E1 E2 ... E_{N-1}, block m-1 being E(m-1, m) ... E(1, m)
    return [(i, m) for m in range(1, n) for i in range(m - 1, -1, -1)]


def unitary_group(n: int) -> UnitaryFamily:
    """Full U(N) chart with ``n**2`` parameters: per plane ``phi``, ``psi``
    (and ``chi`` on ``(1, m)`` planes) in lexicographic plane order, then ``alpha``."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    names: list[str] = []
    bounds: list[tuple[float, float]] = []
    slots: dict[tuple[int, int], tuple[int, int, int | None]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            tag = f"{i + 1}{j + 1}" if n < 10 else f"{i + 1},{j + 1}"
            phi = len(names)
            names.append(f"phi_{tag}")
            bounds.append((0.0, HALF_PI))
            psi = len(names)
            names.append(f"psi_{tag}")
            bounds.append((0.0, TWO_PI))
            chi = None
            if i == 0:
                chi = len(names)
                names.append(f"chi_{tag}")
                bounds.append((0.0, TWO_PI))
            slots[(i, j)] = (phi, psi, chi)
    alpha = len(names)
    names.append("alpha")
    bounds.append((0.0, TWO_PI))
    factors = tuple(PlaneRotation(i, j, *slots[(i, j)]) for i, j in _factor_planes(n))
    return UnitaryFamily("U_N", n, tuple(names), tuple(bounds), factors, alpha)


def special_unitary_2() -> UnitaryFamily:
    """SU(2) chart ``(phi, psi, chi)``."""
    return UnitaryFamily(
        "SU_2", 2, ("phi", "psi", "chi"),
        ((0.0, HALF_PI), (0.0, TWO_PI), (0.0, TWO_PI)),
        (PlaneRotation(0, 1, 0, 1, 2),),
    )


def special_orthogonal(n: int) -> UnitaryFamily:
    """SO(N) chart: one angle ``phi_ij`` per plane, lexicographic in ``(i, j)``."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {p: k for k, p in enumerate(pairs)}
    names = tuple(f"phi_{i + 1}{j + 1}" if n < 10 else f"phi_{i + 1},{j + 1}" for i, j in pairs)
    bounds = tuple((0.0, HALF_PI) for _ in pairs)
    factors = tuple(PlaneRotation(i, j, index[(i, j)]) for i, j in _factor_planes(n))
    return UnitaryFamily("SO_N", n, names, bounds, factors)


def family(group: str, n: int | None = None) -> UnitaryFamily:
    """Look a chart up by name: ``'su2'``, ``'so3'``, ``'so4'``, ``'u2'``, ... or
    by group tag plus dimension."""
    g = group.strip().lower().replace("(", "").replace(")", "").replace("_", "")
    if g in ("su2",):
        return special_unitary_2()
    if g.startswith("son") or g.startswith("un"):
        if n is None:
            raise ValueError(f"group {group!r} needs a dimension")
        return special_orthogonal(n) if g.startswith("so") else unitary_group(n)
    if g.startswith("so") and g[2:].isdigit():
        return special_orthogonal(int(g[2:]))
    if g.startswith("u") and g[1:].isdigit():
        return unitary_group(int(g[1:]))
    raise ValueError(f"unknown group {group!r}")


def _factor_batch(f: UnitaryFamily, fac: PlaneRotation, xi: np.ndarray):
    """Entries ``(a, b, c, d)`` of the 2x2 block of one factor and their
    derivatives w.r.t. phi, psi, chi; each of shape ``(B,)``."""
    phi = xi[:, fac.phi_index]
    zero = np.zeros_like(phi)
    psi = xi[:, fac.psi_index] if fac.psi_index is not None else zero
    chi = xi[:, fac.chi_index] if fac.chi_index is not None else zero
    c, s = np.cos(phi), np.sin(phi)
    ep, ec = np.exp(1j * psi), np.exp(1j * chi)
    block = (ep * c, ec * s, -np.conj(ec) * s, np.conj(ep) * c)
    d_phi = (-ep * s, ec * c, -np.conj(ec) * c, -np.conj(ep) * s)
    d_psi = (1j * ep * c, zero, zero, -1j * np.conj(ep) * c)
    d_chi = (zero, 1j * ec * s, 1j * np.conj(ec) * s, zero)
    return block, d_phi, d_psi, d_chi


def _embed(n: int, i: int, j: int, block, fill_identity: bool) -> np.ndarray:
    bsz = block[0].shape[0]
    if fill_identity:
        m = np.broadcast_to(np.eye(n, dtype=complex), (bsz, n, n)).copy()
    else:
        m = np.zeros((bsz, n, n), dtype=complex)
    m[:, i, i], m[:, i, j], m[:, j, i], m[:, j, j] = block
    return m


def realize_batch(f: UnitaryFamily, xi: np.ndarray) -> np.ndarray:
    """``U`` for each row of ``xi``, shape ``(B, N, N)``; no domain checks."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    n = f.dim
    u = np.broadcast_to(np.eye(n, dtype=complex), (xi.shape[0], n, n)).copy()
    for fac in f.factors:
        block = _factor_batch(f, fac, xi)[0]
        u = u @ _embed(n, fac.i, fac.j, block, True)
    if f.alpha_index is not None:
        u = u * np.exp(1j * xi[:, f.alpha_index])[:, None, None]
    return u


def derivatives_batch(f: UnitaryFamily, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``U`` and ``dU/dxi_k`` for all ``k``: shapes ``(B, N, N)`` and ``(B, n, N, N)``.

    Uses prefix/suffix products so each derivative costs two matrix products.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    bsz, n = xi.shape[0], f.dim
    parts = [_factor_batch(f, fac, xi) for fac in f.factors]
    mats = [_embed(n, fac.i, fac.j, p[0], True) for fac, p in zip(f.factors, parts)]
    eye = np.broadcast_to(np.eye(n, dtype=complex), (bsz, n, n))
    prefix = [eye]
    for m in mats:
        prefix.append(prefix[-1] @ m)
    suffix = [eye]
    for m in reversed(mats):
        suffix.append(m @ suffix[-1])
    suffix.reverse()  # suffix[k] = mats[k] @ ... @ mats[-1]
    u = prefix[-1]
    phase = None
    if f.alpha_index is not None:
        phase = np.exp(1j * xi[:, f.alpha_index])[:, None, None]
        u = u * phase

    d = np.zeros((bsz, f.n_params, n, n), dtype=complex)
    for k, (fac, part) in enumerate(zip(f.factors, parts)):
        left, right = prefix[k], suffix[k + 1]
        for slot, dblock in zip((fac.phi_index, fac.psi_index, fac.chi_index), part[1:]):
            if slot is None:
                continue
            dm = _embed(n, fac.i, fac.j, dblock, False)
            d[:, slot] = left @ dm @ right
    if phase is not None:
        d *= phase[:, None]
        d[:, f.alpha_index] = 1j * u
    return u, d
