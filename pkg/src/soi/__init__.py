"""Surfaces of ignorance: purification manifolds of density operators, their
volumes, and entanglement coarse-graining of the probability simplex."""

from .spectra import (EntropyReport, Spectrum, SpectrumError, entropy_report, linear_entropy,
                      negentropy, normalize_entropy, von_neumann_entropy)
from .unitary import (ParameterRangeError, PlaneRotation, UnitaryFamily, family, special_orthogonal,
                      special_unitary_2, unitary_group)
from .purification import (GramMetric, PurificationPoint, bell_state, embed_environment, gram_metric,
                           partial_trace_E, purify, tangent_frame)
from .volume import (VolumeResult, closed_form_volume, monte_carlo_volume, monte_carlo_volumes,
                     normalized_volume, quadrature_volume)
from .coarse import MacrostateBinning, SimplexGrid, bin_cells, build_grid, sample_simplex
from .asymptotics import (AsymptoticsReport, avg_svn_tail, find_lambda1_star, mass_ratio,
                          vnorm_marginal)
from .fidelity import RotatedState, fidelity_closed, fidelity_soi_maximize, purify_rotated

__version__ = "0.1.0"
