"""Reservoir computing with co-evolving Kuramoto oscillator networks."""

from .network import (
    OscillatorNetwork,
    SpectralRadiusSettings,
    coupling_step,
    init_network,
    order_parameter,
    phase_step,
    reinitialize_weights,
    rescale_to_radius,
    spectral_radius,
)
from .reservoir import (
    PipelineResult,
    Readout,
    ReservoirConfig,
    StateTrace,
    TaskData,
    develop_and_collect,
    predict,
    run_pipeline,
    train_readout,
)
from .tasks import (
    MackeyGlassParams,
    MsoParams,
    MSO12_FREQUENCIES,
    gen_mackey_glass,
    gen_mso,
    gen_narma10,
    load_series,
    make_task,
    spectrum,
)
from .metrics import (
    BetaFit,
    McCurve,
    beta_fit,
    matrix_distance,
    memory_capacity,
    mse,
    weight_histogram,
)
from .experiments import (
    ExperimentResult,
    SweepSpec,
    derive_seed,
    run_astringency,
    run_beta_sweep,
    run_grid_sweep,
    run_mc_study,
    run_sparsity_sweep,
    run_weight_distribution_study,
)

__all__ = [
    "OscillatorNetwork",
    "SpectralRadiusSettings",
    "coupling_step",
    "init_network",
    "order_parameter",
    "phase_step",
    "reinitialize_weights",
    "rescale_to_radius",
    "spectral_radius",
    "PipelineResult",
    "Readout",
    "ReservoirConfig",
    "StateTrace",
    "TaskData",
    "develop_and_collect",
    "predict",
    "run_pipeline",
    "train_readout",
    "MackeyGlassParams",
    "MsoParams",
    "MSO12_FREQUENCIES",
    "gen_mackey_glass",
    "gen_mso",
    "gen_narma10",
    "load_series",
    "make_task",
    "spectrum",
    "BetaFit",
    "McCurve",
    "beta_fit",
    "matrix_distance",
    "memory_capacity",
    "mse",
    "weight_histogram",
    "ExperimentResult",
    "SweepSpec",
    "derive_seed",
    "run_astringency",
    "run_beta_sweep",
    "run_grid_sweep",
    "run_mc_study",
    "run_sparsity_sweep",
    "run_weight_distribution_study",
]

__version__ = "0.1.0"
