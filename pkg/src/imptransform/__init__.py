"""Reflection data from layered acoustic media and impedance recovery from it."""
from ._version import __version__
from .forward import (DeltaTrain, SampledTrace, add_noise, antiderivative, convolve,
                      greens_function, to_pressure, total_reflection)
from .media import (ImpedanceProfile, LayerStack, discretize, reflectivity_function,
                    scale_dilate, stack_profile, to_stack)
from .transforms import (ImpedanceEstimate, accumulate, classical_estimate, energy_lag,
                         greens_approximations, modified_transform, pressure_classical,
                         pressure_refined, refined_transform)
from .wavelets import (UnusableWaveletError, Wavelet, builtin, first_nonzero_moment,
                       moment, virtual_wavelet)

__all__ = [
    "__version__",
    "DeltaTrain", "SampledTrace", "add_noise", "antiderivative", "convolve",
    "greens_function", "to_pressure", "total_reflection",
    "ImpedanceProfile", "LayerStack", "discretize", "reflectivity_function",
    "scale_dilate", "stack_profile", "to_stack",
    "ImpedanceEstimate", "accumulate", "classical_estimate", "energy_lag",
    "greens_approximations", "modified_transform", "pressure_classical",
    "pressure_refined", "refined_transform",
    "UnusableWaveletError", "Wavelet", "builtin", "first_nonzero_moment", "moment",
    "virtual_wavelet",
]
