"""Discrete Dirac operators on 2D square lattices with an exact FFT symbol calculus.

Lattice fields are identified with step functions on a centered periodic
box, which puts the discrete and continuum operators in one Hilbert space;
the package provides the grid transfers, the discrete Fourier transform
pair, the closed-form 2x2 symbol algebra, position-space operators with
free and perturbed resolvents, and a convergence laboratory that measures
the continuum limit on dyadic mesh sweeps.
"""

from . import errors
from .errors import LatticeDiracError
from .fourier import (
    FrequencyGrid,
    SpectralField,
    a_factor,
    continuum_ft_of_step,
    dft,
    idft,
    inverse_ft_error,
    sample_spectrum,
    spectral_norm,
    weighted_ft_error,
)
from .grid import (
    ContinuumFunction,
    LatticeField,
    Mesh,
    evaluate_step,
    function_catalog,
    inner,
    l2_error_vs_continuum,
    norm_l2,
    norm_little_l2,
    project,
    sample,
)
from .lab import (
    ConvergenceReport,
    Series,
    Sweep,
    exp_ft,
    exp_ift,
    exp_projection,
    exp_resolvent_free,
    exp_resolvent_potential,
    fit_rate,
)
from .operators import (
    PotentialSpec,
    ResolventQuery,
    apply_dirac,
    block_average,
    dense_matrix,
    diff_backward,
    diff_forward,
    potential_catalog,
    resolvent_continuum,
    resolvent_free,
    resolvent_with_potential,
    sample_potential,
    spectra_strip_check,
    split_hermitian,
)
from .symbols import (
    SIGMA1,
    SIGMA2,
    SIGMA3,
    CriticalPoint,
    DiracParams,
    critical_points,
    fwt_unitary,
    lambda_mh,
    omega,
    spectrum_bounds,
    symbol_continuum,
    symbol_discrete,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
