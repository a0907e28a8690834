from ._core import (
    EventSequence,
    HawkesParams,
    Hyperparams,
    InsufficientData,
    NumericalError,
    SdeSpec,
    branching_probabilities,
    em_responsibilities,
    integrated_intensity,
    log_likelihood,
    run_mcmc,
    simulate,
    time_rescaling_test,
)

__version__ = "0.1.0"
