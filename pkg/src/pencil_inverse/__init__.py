"""Inverse spectral reconstruction for energy-dependent Sturm-Liouville pencils.

The pencil ``-y'' + q y + 2 lam p y = lam^2 y`` with Dirichlet conditions is
reduced to a Dirac system; spectral data are inverted with a Gelfand-Levitan
solver for the shifted-AKNS normal form and rotated back to the pencil form.
"""

from .commutation import (
    CommutationParams,
    IndependenceReport,
    commute_general,
    commute_pencil_form,
    verify_alpha0_independence,
)
from .dirac import DiracPotential, Eigenpair, dirac_ivp, dirac_spectral_data, eigenvalue, zero_mode
from .errors import PencilError
from .gauge import GaugeAngle, check_quantization, extract_pq, q_to_p, solve_theta
from .gelfand_levitan import build_gl_kernel, refine, solve_gl
from .grid import Grid, GridFn, MatrixGridFn, antiderivative, integrate, interpolate
from .pencil import PencilPotentials, assemble_pencil_dirac, check_positivity, miura_field, quasi_ivp
from .pipeline import PipelineConfig, forward, inverse, synthetic_potentials
from .spectral import AugmentedSpectralData, SpectralData, augment, estimate_shift, validate

__version__ = "0.1.0"
