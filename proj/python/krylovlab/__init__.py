"""GUE spread-complexity laboratory: python bindings for the C++ core."""

from ._core import (
    FormatError,
    Network,
    NumericalError,
    Rng,
    build_dataset_file,
    complexity_curve,
    conv1d_forward,
    eigh,
    evaluate,
    evolve_eigenbasis,
    global_average_pool,
    gue_ensemble,
    haar_unitary,
    lanczos,
    load_network,
    make_cnn,
    make_fcn,
    mse_loss,
    read_dataset,
    read_ensemble,
    relu,
    sample_gue,
    spread_complexity,
    tfd_state,
    train_on_dataset,
    write_ensemble,
)

__all__ = [
    "FormatError",
    "Network",
    "NumericalError",
    "Rng",
    "build_dataset_file",
    "complexity_curve",
    "conv1d_forward",
    "eigh",
    "evaluate",
    "evolve_eigenbasis",
    "global_average_pool",
    "gue_ensemble",
    "haar_unitary",
    "lanczos",
    "load_network",
    "make_cnn",
    "make_fcn",
    "mse_loss",
    "read_dataset",
    "read_ensemble",
    "relu",
    "sample_gue",
    "spread_complexity",
    "tfd_state",
    "train_on_dataset",
    "write_ensemble",
]
