"""Python bindings for the spinchain state-transfer library."""

from ._spinchain import (  # noqa: F401
    ChainSpec,
    __version__,
    box_count,
    compare_perturbation,
    eigenvalues,
    ensemble_fidelity,
    eta,
    fidelity_series,
    fit_scaling,
    fractal_dimension,
    hamiltonian,
    perturbation_coefficients,
    sample_disorder,
    scan_fidelity,
    set_threads,
    spacings,
    transfer_time,
)
