"""Tabular and scalar results behind each CLI command.

Every function here is pure given its arguments; the CLI layer only handles
argument parsing, configs and files.
"""

from __future__ import annotations

import math
from dataclasses import asdict
from typing import Sequence

import numpy as np

from . import asymptotics as asy
from .coarse import OBSERVABLES, bin_cells, build_grid, sample_simplex_array
from .fidelity import RotatedState, fidelity_closed, fidelity_soi_maximize
from .spectra import Spectrum, batch_normalized_linear, batch_normalized_von_neumann
from .unitary import family, special_orthogonal, unitary_group
from .volume import (batch_normalized_volume, closed_form_volume, monte_carlo_volume,
                     monte_carlo_volumes, quadrature_volume)

Table = tuple[list[str], list[list]]


def _closed_group(group: str) -> str:
    g = group.lower()
    if g == "su2":
        return "SU_2"
    if g in ("so2", "so3"):
        return g.upper()[:2] + "_" + g[2:]
    if g.startswith("so"):
        return "SO_N_product"
    raise ValueError(f"no closed form for group {group!r}")


def cmd_volume(group: str, spectrum: Sequence[float], method: str = "closed", samples: int = 100_000,
               nodes: int = 32, seed: int = 0) -> dict:
    s = Spectrum(spectrum)
    if method == "closed":
        tag = _closed_group(group)
        res = closed_form_volume(tag, s)
    elif method == "quadrature":
        res = quadrature_volume(s, family(group), nodes)
    elif method == "mc":
        res = monte_carlo_volume(s, family(group), samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}; use closed, quadrature or mc")
    record = {"group": group, "spectrum": list(s.values)}
    record.update(asdict(res))
    return record


def cmd_curves(group: str, resolution: int | None = None) -> Table:
    """Normalized volume and entropies on a lattice over the simplex.

    ``resolution`` is the number of divisions of the unit interval: SU(2) rows
    are ``l1 = i / resolution``; SO(3) rows are ``(i, j) / resolution`` with
    ``i + j <= resolution``.
    """
    g = group.lower()
    if g == "su2":
        res = resolution or 100
        l1 = np.arange(res + 1) / res
        lam = np.stack([l1, 1.0 - l1], axis=1)
        header = ["lambda1", "v_norm", "svn_norm", "sl_norm"]
        vol = batch_normalized_volume("SU_2", lam)
        coords = lam[:, :1]
    elif g == "so3":
        res = resolution or 30
        pts = [(i, j) for i in range(res + 1) for j in range(res + 1 - i)]
        ij = np.array(pts, dtype=float) / res
        lam = np.column_stack([ij, np.clip(1.0 - ij.sum(axis=1), 0.0, None)])
        header = ["lambda1", "lambda2", "v_norm", "svn_norm", "sl_norm"]
        vol = batch_normalized_volume("SO_3", lam)
        coords = lam[:, :2]
    else:
        raise ValueError("curves are available for su2 and so3")
    svn = batch_normalized_von_neumann(lam)
    sl = batch_normalized_linear(lam)
    rows = [list(c) + [v, a, b] for c, v, a, b in zip(coords.tolist(), vol, svn, sl)]
    return header, rows


def cmd_coarse_grain(ell: int = 300, k: int = 10, observables: Sequence[str] = OBSERVABLES,
                     weyl_filter: bool = True) -> tuple[Table, Table]:
    """Per-cell table (coordinates, observable values, segments) and per-segment summary."""
    grid = build_grid(ell, weyl_filter)
    binnings = [bin_cells(grid, obs, k) for obs in observables]
    cell_header = ["cell_id", "eta1", "eta2", "lambda1", "lambda2", "lambda3"]
    for b in binnings:
        cell_header += [f"{b.observable}_value", f"{b.observable}_segment"]
    cells = []
    for idx in range(len(grid)):
        row = [int(grid.cell_ids[idx]), *grid.eta[idx].tolist(), *grid.lam[idx].tolist()]
        for b in binnings:
            row += [float(b.values[idx]), int(b.assignments[idx])]
        cells.append(row)
    seg_header = ["observable", "segment", "lower", "upper", "count", "fraction", "avg_svn"]
    segs = []
    for b in binnings:
        for a in range(1, k + 1):
            segs.append([b.observable, a, (a - 1) / k, a / k, int(b.counts[a - 1]),
                         float(b.fractions[a - 1]), float(b.avg_svn[a - 1])])
    return (cell_header, cells), (seg_header, segs)


def cmd_so4_compare(count: int = 1000, samples: int = 100_000, seed: int = 0) -> Table:
    """Normalized pair-sum product vs normalized Monte Carlo SO(4) volume.

    Spectra come from the Philox stream keyed by ``seed``; the Monte Carlo
    draws use ``seed + 1``. Rows are sorted by the product value, largest first.
    """
    lam = sample_simplex_array(4, count, seed)
    prod = batch_normalized_volume("SO_N_product", lam)
    mc = np.array([r.value for r in monte_carlo_volumes(lam, special_orthogonal(4), samples, seed + 1)])
    prod = prod / prod.max()
    mc = mc / mc.max()
    order = np.argsort(-prod, kind="stable")
    header = ["rank", "v_norm_product", "v_norm_mc", "lambda1", "lambda2", "lambda3", "lambda4"]
    rows = [[rank + 1, float(prod[i]), float(mc[i]), *lam[i].tolist()]
            for rank, i in enumerate(order)]
    return header, rows


def cmd_asymptotics(n_list: Sequence[int] = (3, 5, 7, 11, 30), level: float = asy.DEFAULT_LEVEL,
                    weighting: str = "uniform", resolution: int = 200) -> tuple[Table, Table]:
    """Threshold table plus the normalized volume curves they come from."""
    if weighting not in asy.WEIGHTINGS:
        raise ValueError(f"weighting must be one of {asy.WEIGHTINGS}")
    header = ["N", "lambda1_star", "mass_ratio", "avg_svn"]
    rows, curve_rows = [], []
    for n in n_list:
        star = asy.find_lambda1_star(n, level)
        rows.append([n, star, asy.mass_ratio(n, star), asy.avg_svn_tail(n, star, weighting)])
        for x in np.linspace(1.0 / n, 1.0, resolution + 1):
            curve_rows.append([n, float(x), asy.vnorm_marginal(n, float(x))])
    return (header, rows), (["N", "lambda1", "v_norm"], curve_rows)


def rotated_state(spectrum: Sequence[float], basis: Sequence[float] | None = None) -> RotatedState:
    """State with eigenbasis ``U(basis)`` from the full U(N) chart (identity if omitted)."""
    s = Spectrum(spectrum)
    u = None if basis is None else unitary_group(s.dim).realize(basis)
    return RotatedState(s, u)


def cmd_fidelity(rho: Sequence[float], sigma: Sequence[float], method: str = "closed",
                 budget: int = 20, seed: int = 0, rho_basis: Sequence[float] | None = None,
                 sigma_basis: Sequence[float] | None = None) -> dict:
    r, s = rotated_state(rho, rho_basis), rotated_state(sigma, sigma_basis)
    record = {"rho": list(r.spectrum.values), "sigma": list(s.spectrum.values), "method": method}
    if method == "closed":
        record["value"] = fidelity_closed(r, s)
    elif method == "soi":
        res = fidelity_soi_maximize(r, s, budget=budget, seed=seed)
        record.update(value=res.value, xi_rho=res.xi_rho.tolist(), xi_sigma=res.xi_sigma.tolist(),
                      evaluations=res.evaluations, budget=budget, seed=seed)
    else:
        raise ValueError(f"unknown method {method!r}; use closed or soi")
    if not math.isfinite(record["value"]):
        raise ArithmeticError("fidelity is not finite")
    return record
