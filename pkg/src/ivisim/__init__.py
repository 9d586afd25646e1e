"""Monte Carlo engine for square-root diffusions and the Heston model.

The variance scheme samples the integrated variance directly from inverse
Gaussian increments, which preserves nonnegativity and matches the first
conditional moments exactly; an analytical layer supplies reference values
(characteristic functions, swap formulas, Fourier prices) and the experiment
harness benchmarks schemes against them.
"""
from .analytics import (
    FrequencyPair,
    OneStepCharCoefficients,
    QuadratureError,
    RiccatiValue,
    bs_call_price,
    bs_implied_vol,
    fourier_call,
    fourier_put,
    heston_cf,
    laplace_u,
    one_step_cf,
    one_step_char,
    riccati_closed_form,
    riccati_rk4,
    variance_swap,
    volatility_swap,
)
from .baselines import QeConfig, cir_cond_mean, cir_cond_var, euler_ft_step, qe_step
from .cases import CASE_IDS, builtin_case
from .cir import (
    CirParams,
    CirPath,
    StepCoefficients,
    StepOutput,
    TimeGrid,
    ivi_simple_step,
    ivi_step,
    phi1,
    phi2,
    simulate_cir_path,
    step_coefficients,
)
from .engine import BatchResult, PathBatch, simulate_batch, simulate_path_batch
from .experiments import (
    CSV_COLUMNS,
    ConfigError,
    ExperimentConfig,
    ResultRecord,
    read_records,
    run_convergence,
    run_paths_sweep,
    run_reference,
    run_smile,
    write_records,
)
from .heston import (
    HestonParams,
    HestonPath,
    McEstimate,
    Payoff,
    heston_step,
    mc_price,
    simulate_heston,
)
from .invgauss import IgParams, ig_char, ig_mean, ig_pdf, ig_variance, sample_ig
from .rng import RngStream

__version__ = "0.1.0"
