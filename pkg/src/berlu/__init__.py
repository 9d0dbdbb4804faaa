"""BerLU: Bernstein-polynomial smoothing of piecewise-linear activations."""

from .activations import (
    ActivationSpec,
    BerLUParams,
    berlu_dalpha,
    berlu_dx,
    berlu_forward,
    eval_dx,
    eval_forward,
)
from .analysis import (
    CorrelationTrace,
    DecayFit,
    GradCheckReport,
    LipschitzReport,
    correlation_probe,
    estimate_lipschitz,
    find_critical_init,
    fit_decay,
    grad_check,
)
from .bench import BenchResult, bench_activation, bench_suite
from .bernstein import (
    BernsteinTransition,
    PiecewiseLinear,
    SmoothedActivation,
    bernstein_basis,
    eval_transition,
    mollify,
    solve_transition,
)
from .data import Dataset, gen_spirals, gen_two_moons, load_csv, load_idx, save_csv
from .trainer import (
    DenseNet,
    RunReport,
    TrainConfig,
    adamw_step,
    clip_gradients,
    forward_backward,
    init_net,
    lr_at,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec",
    "BerLUParams",
    "berlu_forward",
    "berlu_dx",
    "berlu_dalpha",
    "eval_forward",
    "eval_dx",
    "bernstein_basis",
    "PiecewiseLinear",
    "BernsteinTransition",
    "SmoothedActivation",
    "solve_transition",
    "eval_transition",
    "mollify",
    "LipschitzReport",
    "GradCheckReport",
    "CorrelationTrace",
    "DecayFit",
    "estimate_lipschitz",
    "grad_check",
    "find_critical_init",
    "correlation_probe",
    "fit_decay",
    "Dataset",
    "gen_two_moons",
    "gen_spirals",
    "load_idx",
    "save_csv",
    "load_csv",
    "DenseNet",
    "TrainConfig",
    "RunReport",
    "init_net",
    "forward_backward",
    "adamw_step",
    "lr_at",
    "clip_gradients",
    "train",
    "BenchResult",
    "bench_activation",
    "bench_suite",
]
