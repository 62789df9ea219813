"""Quadratic-phase interference: Gauss sums, Talbot and box propagators,
fractional revivals, and factorization from revival and curlicue signals."""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, ResourceError
from .factoring import (FactorReport, ScanRecord, confirm_and_recurse, curlicue_factor,
                        detect_candidates, factorize, scan_revival, trial_division)
from .phase import (CurlicueSeries, GaussSumTable, ReducedFraction, curlicue_series,
                    decompose_real_time, gauss_sum_table, phase_sum, reduce_time)
from .propagators import (BoxCoefficients, PropagatorConfig, WavePacket, WavePacketGrid,
                          box_expand, box_via_talbot, carpet_grid, propagate_box,
                          propagate_talbot)
from .revivals import (RevivalParams, ShapeEval, WeightTable, autocorrelation,
                       decomposition_sum, gaussian_weights, shape_function_closed,
                       shape_function_quadrature)
