"""Band structure of a harmonic well repeated with the period of a price limit.

A price bounded by daily limits is modelled as a quantum oscillator confined
to one cell ``|x| <= d/2`` and continued periodically. The allowed energies
form bands; each Bloch state gives a price density whose variance plays the
role of volatility and whose edge value measures the chance of a limit hit.
"""
from .errors import DomainError, NumericalError, ValidationError
from .model import DEFAULT_ALPHA, DEFAULT_LIMIT, ModelParams, barrier_top, make_params
from .cells import CellSolution, edge_values, eval_at_edge, solve_cell
from .bands import (Band, DispersionSample, band_gaps, dispersion, find_bands, half_trace,
                    solve_dispersion, state_count)
from .observables import (BlochState, bloch_state, bloch_states, harmonic_sigma2, limit_hit_curve,
                          observable_table, volatility_curve)
from .approx import (FourierCoefficient, TightBindingBand, fourier_coefficients, free_electron_correction,
                     gap_at_boundary, hermite_function, overlap_integral, tight_binding_band,
                     tight_binding_wavefunction)
from .market import (Bar, BarFormatError, Cluster, ScanReport, VolVolPoint, band_signature_scan, format_bars,
                     parse_bars, realized_volvol)

__version__ = "0.1.0"
