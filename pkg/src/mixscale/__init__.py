"""Geometric and analytic mixing scales of scalar fields.

Subpackages:

* :mod:`mixscale.fields` -- sampled fields, Fourier calculus, Sobolev norms,
  ball averaging and large-scale removal;
* :mod:`mixscale.dyadic_walsh` -- the dyadic tile model on [0, 1): wave
  packets, fast coefficient transform, scale seminorms;
* :mod:`mixscale.mixing_scales` -- continuous geometric functionals and
  scales, example field families, comparison estimates;
* :mod:`mixscale.transport` -- exact free transport on a periodic channel
  and its decay-rate experiments;
* :mod:`mixscale.mixing_cost` -- semi-Lagrangian advection under prescribed
  flows and the Gronwall mixing-cost bounds;
* :mod:`mixscale.cli` -- the ``mixscale`` experiment runner.
"""

from .fields import (
    GridFunction,
    Spectrum,
    ball_average_field,
    ball_symbol,
    bessel_j1,
    fourier_transform,
    inverse_transform,
    large_scale_removal,
    sobolev_norm,
)
from .dyadic_walsh import (
    DyadicSignal,
    Tile,
    dyadic_analytic,
    dyadic_geometric,
    haar_averages,
    make_packet_sum,
    project,
    tile_overlap,
    walsh_coefficients,
    walsh_synthesize,
    wave_packet,
)
from .mixing_scales import (
    MixingReport,
    RadiusGrid,
    analytic_from_geometric,
    fit_exponent,
    geometric_functional,
    geometric_scale,
    make_oscillating_sign,
    make_sawtooth,
    make_two_scale,
    verify_upper_estimate,
)
from .transport import (
    ChannelField,
    decay_curve,
    evolve_free,
    geometric_lower_check,
    make_geometric_lower_data,
    make_resonant_data,
    mixed_norm,
)
from .mixing_cost import (
    VelocityField,
    advect,
    gronwall_check,
    mixing_cost_curve,
    strain_linfty,
)

__version__ = "0.1.0"
