"""Experiment harness: convergence sweeps, smile slices, path-count sweeps,
reference-only runs, and the CSV record format they all share.

Records are deterministic functions of the configuration seed (wall time
aside): cell entropy tuples derive from (seed, step count, scheme tag), and
the engine's chunked streams do the rest.
"""
from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    QuadratureError,
    bs_implied_vol,
    fourier_call,
    laplace_u,
    variance_swap,
    volatility_swap,
)
from .baselines import QeConfig
from .cases import builtin_case
from .cir import TimeGrid
from .engine import simulate_batch, simulate_path_batch
from .heston import VARIANCE_SCHEMES, HestonParams, Payoff, mc_price

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRecord",
    "CSV_COLUMNS",
    "QUANTITIES",
    "write_records",
    "read_records",
    "run_convergence",
    "run_smile",
    "run_paths_sweep",
    "run_reference",
    "sample_path_rows",
    "write_sample_paths",
    "records_to_csv",
    "SAMPLE_PATH_COLUMNS",
]

QUANTITIES = ("variance_swap", "vol_swap", "laplace", "call")

CSV_COLUMNS = (
    "scheme",
    "case",
    "quantity",
    "n_steps",
    "n_paths",
    "estimate",
    "std_error",
    "reference",
    "abs_error",
    "wall_time_ms",
)


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 1)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment description; either a built-in case id or explicit params."""

    case: int | None = None
    params: HestonParams | None = None
    schemes: tuple[str, ...] = ("ivi",)
    quantities: tuple[str, ...] = ("variance_swap",)
    steps: tuple[int, ...] = (1,)
    n_paths: int = 200_000
    seed: int = 1
    horizon: float = 1.0
    strikes: tuple[float, ...] = (0.8, 1.0, 1.2)
    laplace_q: float = 1.0
    matched_seeds: bool = True
    qe: QeConfig = field(default_factory=QeConfig)
    threads: int | None = None

    def validate(self) -> None:
        if (self.case is None) == (self.params is None):
            raise ConfigError("exactly one of case id or explicit params is required")
        if self.case is not None and self.case not in (1, 2, 3):
            raise ConfigError(f"unknown case {self.case}")
        if not self.schemes:
            raise ConfigError("at least one scheme required")
        for s in self.schemes:
            if s not in VARIANCE_SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; choose from {sorted(VARIANCE_SCHEMES)}")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ConfigError(f"unknown quantity {q!r}; choose from {QUANTITIES}")
        if not self.steps or any(n < 1 for n in self.steps):
            raise ConfigError("steps must all be >= 1")
        if self.n_paths < 2:
            raise ConfigError("n_paths must be >= 2")
        if self.horizon <= 0:
            raise ConfigError("horizon must be positive")
        if self.laplace_q <= 0:
            raise ConfigError("laplace_q must be positive")
        if any(k <= 0 for k in self.strikes):
            raise ConfigError("strikes must be positive")

    def resolved_params(self) -> tuple[HestonParams, str]:
        if self.case is not None:
            return builtin_case(self.case), str(self.case)
        return self.params, "custom"


@dataclass(frozen=True)
class ResultRecord:
    scheme: str
    case: str
    quantity: str
    n_steps: int
    n_paths: int
    estimate: float
    std_error: float
    reference: float
    abs_error: float
    wall_time_ms: float


def _fmt(x: float) -> str:
    return repr(float(x))


def write_records(records: list[ResultRecord], seed: int, out) -> None:
    """Write records in the fixed column order; `out` is a path or text buffer.

    Floats use shortest round-trip formatting; the seed rides in a leading
    metadata comment.
    """
    own = isinstance(out, (str, bytes))
    f = open(out, "w", encoding="utf-8", newline="\n") if own else out
    try:
        f.write(f"# seed={int(seed)}\n")
        f.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            f.write(
                ",".join(
                    (
                        r.scheme,
                        r.case,
                        r.quantity,
                        str(r.n_steps),
                        str(r.n_paths),
                        _fmt(r.estimate),
                        _fmt(r.std_error),
                        _fmt(r.reference),
                        _fmt(r.abs_error),
                        _fmt(r.wall_time_ms),
                    )
                )
                + "\n"
            )
    finally:
        if own:
            f.close()


def records_to_csv(records: list[ResultRecord], seed: int) -> str:
    buf = io.StringIO()
    write_records(records, seed, buf)
    return buf.getvalue()


def read_records(path) -> tuple[list[ResultRecord], int | None]:
    """Parse a records CSV; returns (records, seed from the metadata comment)."""
    seed = None
    records: list[ResultRecord] = []
    with open(path, "r", encoding="utf-8") as f:
        header_seen = False
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("seed="):
                    seed = int(body[5:])
                continue
            if not header_seen:
                if tuple(line.split(",")) != CSV_COLUMNS:
                    raise ValueError(f"unexpected CSV header: {line!r}")
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise ValueError(f"malformed CSV row: {line!r}")
            records.append(
                ResultRecord(
                    scheme=parts[0],
                    case=parts[1],
                    quantity=parts[2],
                    n_steps=int(parts[3]),
                    n_paths=int(parts[4]),
                    estimate=float(parts[5]),
                    std_error=float(parts[6]),
                    reference=float(parts[7]),
                    abs_error=float(parts[8]),
                    wall_time_ms=float(parts[9]),
                )
            )
    return records, seed


def _cell_entropy(cfg: ExperimentConfig, steps_tag: int, scheme_index: int) -> tuple[int, ...]:
    scheme_tag = 0 if cfg.matched_seeds else 1000 + scheme_index
    return (cfg.seed, steps_tag, scheme_tag)


def _expand_quantities(cfg: ExperimentConfig, s0: float) -> list[tuple[str, Payoff]]:
    out: list[tuple[str, Payoff]] = []
    for q in cfg.quantities:
        if q == "variance_swap":
            out.append((q, Payoff("u_total")))
        elif q == "vol_swap":
            out.append((q, Payoff("sqrt_u_total")))
        elif q == "laplace":
            out.append((q, Payoff("exp_neg_u", q=cfg.laplace_q)))
        elif q == "call":
            for m in cfg.strikes:
                out.append((f"call({m:g})", Payoff("call", strike=m * s0)))
    return out


def _reference_for(label: str, cfg: ExperimentConfig, params: HestonParams) -> float:
    cir = params.cir
    T = cfg.horizon
    if label == "variance_swap":
        return variance_swap(T, cir)
    if label == "vol_swap":
        return volatility_swap(T, cir)
    if label == "laplace":
        return laplace_u(T, cfg.laplace_q, cir.v0, cir)
    if label.startswith("call(") or label.startswith("iv("):
        m = float(label[label.index("(") + 1 : -1])
        price = fourier_call(m * params.s0, T, params)
        if label.startswith("call("):
            return price
        return bs_implied_vol(price, params.s0, m * params.s0, T)
    raise ValueError(f"no reference for quantity {label!r}")


def _safe_references(labels: list[str], cfg: ExperimentConfig, params: HestonParams) -> tuple[dict, int]:
    refs: dict[str, float] = {}
    failures = 0
    for label in labels:
        try:
            refs[label] = _reference_for(label, cfg, params)
        except (QuadratureError, ArithmeticError, ValueError):
            refs[label] = math.nan
            failures += 1
    return refs, failures


def run_convergence(cfg: ExperimentConfig) -> tuple[list[ResultRecord], int]:
    """One record per (scheme, quantity, step count); returns (records, n_reference_failures)."""
    cfg.validate()
    params, case_label = cfg.resolved_params()
    quantities = _expand_quantities(cfg, params.s0)
    refs, failures = _safe_references([label for label, _ in quantities], cfg, params)
    needs_price = any(p.needs_price() for _, p in quantities)

    records: list[ResultRecord] = []
    for n_steps in cfg.steps:
        grid = TimeGrid.uniform(cfg.horizon, n_steps)
        for si, scheme in enumerate(cfg.schemes):
            t0 = time.perf_counter()
            batch = simulate_batch(
                params,
                grid,
                scheme,
                cfg.n_paths,
                _cell_entropy(cfg, n_steps, si),
                price_layer=needs_price,
                qe_cfg=cfg.qe,
                threads=cfg.threads,
            )
            wall_ms = (time.perf_counter() - t0) * 1e3
            for label, payoff in quantities:
                est = mc_price(payoff, batch)
                ref = refs[label]
                records.append(
                    ResultRecord(
                        scheme=scheme,
                        case=case_label,
                        quantity=label,
                        n_steps=n_steps,
                        n_paths=cfg.n_paths,
                        estimate=est.mean,
                        std_error=est.std_error,
                        reference=ref,
                        abs_error=abs(est.mean - ref),
                        wall_time_ms=wall_ms,
                    )
                )
    return records, failures


def _bs_vega(s0: float, strike: float, T: float, vol: float) -> float:
    st = vol * math.sqrt(T)
    d1 = (math.log(s0 / strike) + 0.5 * vol * vol * T) / st
    return s0 * math.sqrt(T) * math.exp(-0.5 * d1 * d1) / math.sqrt(2.0 * math.pi)


def run_smile(cfg: ExperimentConfig) -> tuple[list[ResultRecord], int]:
    """Implied-vol slice records, one per strike, plus a per-cell `iv_mae` summary.

    MC prices outside the no-arbitrage inversion range produce a flagged
    record with NaN estimate columns.  Implied-vol standard errors come from
    the delta method (price standard error over Black-Scholes vega).
    """
    cfg.validate()
    params, case_label = cfg.resolved_params()
    iv_labels = [f"iv({m:g})" for m in cfg.strikes]
    refs, failures = _safe_references(iv_labels, cfg, params)

    records: list[ResultRecord] = []
    for n_steps in cfg.steps:
        grid = TimeGrid.uniform(cfg.horizon, n_steps)
        for si, scheme in enumerate(cfg.schemes):
            t0 = time.perf_counter()
            batch = simulate_batch(
                params,
                grid,
                scheme,
                cfg.n_paths,
                _cell_entropy(cfg, n_steps, si),
                price_layer=True,
                qe_cfg=cfg.qe,
                threads=cfg.threads,
            )
            wall_ms = (time.perf_counter() - t0) * 1e3
            errors: list[float] = []
            for m, label in zip(cfg.strikes, iv_labels):
                strike = m * params.s0
                est = mc_price(Payoff("call", strike=strike), batch)
                ref_iv = refs[label]
                try:
                    iv = bs_implied_vol(est.mean, params.s0, strike, cfg.horizon)
                    se_iv = est.std_error / _bs_vega(params.s0, strike, cfg.horizon, iv) if iv > 0 else math.nan
                except ValueError:
                    iv = math.nan
                    se_iv = math.nan
                abs_err = abs(iv - ref_iv)
                if not math.isnan(abs_err):
                    errors.append(abs_err)
                records.append(
                    ResultRecord(
                        scheme=scheme,
                        case=case_label,
                        quantity=label,
                        n_steps=n_steps,
                        n_paths=cfg.n_paths,
                        estimate=iv,
                        std_error=se_iv,
                        reference=ref_iv,
                        abs_error=abs_err,
                        wall_time_ms=wall_ms,
                    )
                )
            mae = float(np.mean(errors)) if errors else math.nan
            records.append(
                ResultRecord(
                    scheme=scheme,
                    case=case_label,
                    quantity="iv_mae",
                    n_steps=n_steps,
                    n_paths=cfg.n_paths,
                    estimate=mae,
                    std_error=0.0,
                    reference=0.0,
                    abs_error=mae,
                    wall_time_ms=wall_ms,
                )
            )
    return records, failures


def run_paths_sweep(cfg: ExperimentConfig, path_counts: tuple[int, ...]) -> tuple[list[ResultRecord], int]:
    """Call-price stability sweep over path counts at a fixed step count.

    Path batches share the cell entropy, so a smaller count is a prefix of a
    larger one; the sweep shows how the estimate settles as paths accumulate.
    """
    cfg.validate()
    if not path_counts or any(n < 2 for n in path_counts):
        raise ConfigError("path counts must all be >= 2")
    if len(cfg.steps) != 1:
        raise ConfigError("paths sweep uses exactly one step count")
    params, case_label = cfg.resolved_params()
    quantities = _expand_quantities(cfg, params.s0)
    refs, failures = _safe_references([label for label, _ in quantities], cfg, params)
    needs_price = any(p.needs_price() for _, p in quantities)
    n_steps = cfg.steps[0]
    grid = TimeGrid.uniform(cfg.horizon, n_steps)

    records: list[ResultRecord] = []
    for n_paths in path_counts:
        for si, scheme in enumerate(cfg.schemes):
            t0 = time.perf_counter()
            batch = simulate_batch(
                params,
                grid,
                scheme,
                n_paths,
                _cell_entropy(cfg, n_steps, si),
                price_layer=needs_price,
                qe_cfg=cfg.qe,
                threads=cfg.threads,
            )
            wall_ms = (time.perf_counter() - t0) * 1e3
            for label, payoff in quantities:
                est = mc_price(payoff, batch)
                ref = refs[label]
                records.append(
                    ResultRecord(
                        scheme=scheme,
                        case=case_label,
                        quantity=label,
                        n_steps=n_steps,
                        n_paths=n_paths,
                        estimate=est.mean,
                        std_error=est.std_error,
                        reference=ref,
                        abs_error=abs(est.mean - ref),
                        wall_time_ms=wall_ms,
                    )
                )
    return records, failures


def run_reference(cfg: ExperimentConfig) -> tuple[list[ResultRecord], int]:
    """Analytics-only records (scheme column `reference`, no simulation)."""
    cfg.validate()
    params, case_label = cfg.resolved_params()
    labels = [label for label, _ in _expand_quantities(cfg, params.s0)]
    labels += [f"iv({m:g})" for m in cfg.strikes if "call" in cfg.quantities]
    refs, failures = _safe_references(labels, cfg, params)
    records = [
        ResultRecord(
            scheme="reference",
            case=case_label,
            quantity=label,
            n_steps=0,
            n_paths=0,
            estimate=refs[label],
            std_error=0.0,
            reference=refs[label],
            abs_error=0.0,
            wall_time_ms=0.0,
        )
        for label in labels
    ]
    return records, failures


SAMPLE_PATH_COLUMNS = ("scheme", "case", "path", "t", "v", "u_cum", "z_cum")


def sample_path_rows(cfg: ExperimentConfig, n_paths: int = 5) -> list[tuple]:
    """Long-format sample paths (cumulative U and Z at each knot) for plotting."""
    cfg.validate()
    params, case_label = cfg.resolved_params()
    n_steps = cfg.steps[0]
    grid = TimeGrid.uniform(cfg.horizon, n_steps)
    rows: list[tuple] = []
    for si, scheme in enumerate(cfg.schemes):
        batch = simulate_path_batch(
            params, grid, scheme, n_paths, _cell_entropy(cfg, n_steps, si), qe_cfg=cfg.qe
        )
        u_cum = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(batch.u_incs, axis=1)], axis=1)
        z_cum = np.concatenate([np.zeros((n_paths, 1)), np.cumsum(batch.z_incs, axis=1)], axis=1)
        for pidx in range(n_paths):
            for j, t in enumerate(grid.knots):
                rows.append(
                    (
                        scheme,
                        case_label,
                        pidx,
                        float(t),
                        float(batch.v[pidx, j]),
                        float(u_cum[pidx, j]),
                        float(z_cum[pidx, j]),
                    )
                )
    return rows


def write_sample_paths(rows: list[tuple], seed: int, out) -> None:
    own = isinstance(out, (str, bytes))
    f = open(out, "w", encoding="utf-8", newline="\n") if own else out
    try:
        f.write(f"# seed={int(seed)}\n")
        f.write(",".join(SAMPLE_PATH_COLUMNS) + "\n")
        for row in rows:
            scheme, case_label, pidx, t, v, u, z = row
            f.write(f"{scheme},{case_label},{pidx},{_fmt(t)},{_fmt(v)},{_fmt(u)},{_fmt(z)}\n")
    finally:
        if own:
            f.close()
