"""Spatially constrained Bayesian unmixing of hyperspectral images.

Thin wrapper around the C++ core: linear-mixing forward model, Potts-MRF
label sampling, the hybrid Metropolis-within-Gibbs chain, FCLS baseline and
synthetic scene generation.
"""

from spatial_unmix._core import (  # noqa: F401
    LabelField,
    NeighborhoodOrder,
    PosteriorSamples,
    estimate_map_labels,
    estimate_mmse_abundances,
    fcls_unmix_image,
    fcls_unmix_pixel,
    forward,
    generate_scene,
    global_mse,
    homogeneity,
    log_likelihood_pixel,
    procedural_endmembers,
    run_chain,
    sample_field,
    softmax_abundances,
)

__all__ = [
    "LabelField",
    "NeighborhoodOrder",
    "PosteriorSamples",
    "estimate_map_labels",
    "estimate_mmse_abundances",
    "fcls_unmix_image",
    "fcls_unmix_pixel",
    "forward",
    "generate_scene",
    "global_mse",
    "homogeneity",
    "log_likelihood_pixel",
    "procedural_endmembers",
    "run_chain",
    "sample_field",
    "softmax_abundances",
]
