"""Continuous-time quantum walks on glued binary trees with static disorder.

Spectrum and localization diagnostics, walk dynamics with a reduced
local-decay model, plane-wave transmission, and classical diffusive
transport, all reproducible from explicit seeds.
"""

from .classical import (
    analytic_transmission,
    build_master,
    steady_state,
    transmission_vs_disorder,
)
from .dynamics import (
    clean_peak,
    column_space_walk_series,
    default_time_grid,
    hit_decay_prediction,
    hitting_time_estimate,
    max_depth_sweep,
    walk_ensemble,
    walk_series,
)
from .graph import (
    MGT,
    SGT,
    Coord,
    Graph,
    build_mgt,
    build_sgt,
    column_size,
    column_state,
    coord_to_vertex,
    n_columns,
    to_edgelist_text,
    vertex_to_coord,
)
from .hamiltonian import (
    DisorderSpec,
    assemble_h,
    assemble_h0,
    column_basis,
    column_hamiltonian,
    sample_disorder,
    scattering_hamiltonian,
)
from .localdecay import (
    column_decay_rates,
    decay_generator,
    evolve_local_decay,
    model_walk_series,
    short_time_column_probability,
)
from .numerics import (
    PropagationError,
    Propagator,
    SingularSystemError,
    Spectrum,
    eigh,
    propagate,
    propagate_nonhermitian,
    solve_complex,
)
from .scattering import (
    analytic_halfpi_amplitude,
    classical_fit_curve,
    clean_transmission_general_k,
    transmission,
    transmission_amplitudes,
    transmission_sweep,
)
from .spectral import (
    averaged_ipr,
    band_center_ipr_sweep,
    closed_form_spectrum,
    crossing_points,
    gap_ratio,
    inverse_participation_ratio,
    ipr_phase_diagram,
)

__version__ = "0.1.0"
