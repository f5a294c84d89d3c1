"""End-to-end inversion: gather plus background in, impedances and metrics out."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .elastic import AngleSet, ElasticModel, Mode, to_impedances
from .encoding import SpinEncoding
from .errors import ValidationError
from .forward import SeismicGather, assemble_operator
from .qubo import assemble_quadratic, compile_to_ising, evaluate_objective
from .solvers import EXACT_SPIN_CAP, AnnealSchedule, SolverId, run_epochs


@dataclass(frozen=True)
class InversionConfig:
    """Knobs of the inversion pipeline with their standing defaults.

    Weights use 5 spins each on an initial scale of 0.1 centered on the
    background logs; the scale shrinks by shrink_factor per epoch.
    """

    mode: Mode = Mode.POST_STACK
    lambda_: float = 0.05
    n_spins: int = 5
    initial_scale: float = 0.1
    shrink_factor: float = 0.5
    n_epochs: int = 1
    solver: SolverId = SolverId.SIMULATED_ANNEALING
    t_initial: float | None = None
    t_final: float | None = None
    n_sweeps: int = 200
    moves_per_sweep: int | None = None
    restarts: int = 8
    seed: int = 0
    smoothing_window: int = 11
    exact_cap: int = EXACT_SPIN_CAP

    def __post_init__(self):
        if not (self.lambda_ >= 0 and np.isfinite(self.lambda_)):
            raise ValidationError("lambda must be finite and non-negative")
        if self.n_spins < 1:
            raise ValidationError("n_spins must be at least 1")
        if self.n_epochs < 1:
            raise ValidationError("n_epochs must be at least 1")
        if not (self.initial_scale > 0):
            raise ValidationError("initial_scale must be positive")
        if not (0.0 < self.shrink_factor < 1.0):
            raise ValidationError("shrink_factor must lie in (0, 1)")
        if self.smoothing_window < 1 or self.smoothing_window % 2 == 0:
            raise ValidationError("smoothing_window must be a positive odd count")

    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(
            t_initial=self.t_initial,
            t_final=self.t_final,
            n_sweeps=self.n_sweeps,
            moves_per_sweep=self.moves_per_sweep,
            restarts=self.restarts,
            seed=self.seed,
        )

    def with_(self, **changes) -> "InversionConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class InversionReport:
    """Predicted model, impedance profiles, error metrics, and run accounting."""

    predicted_model: ElasticModel
    predicted_ip: np.ndarray
    predicted_is: np.ndarray | None
    rms_ip: float | None
    rms_is: float | None
    data_misfit_initial: float
    data_misfit_final: float
    objective_per_epoch: tuple
    timings: dict = field(default_factory=dict)
    epochs: tuple = ()
    solver_time: float = 0.0


def rms_error(predicted, truth) -> float:
    """Root-mean-square difference between two profiles."""
    p = np.asarray(predicted, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape:
        raise ValidationError("profiles must have equal length")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def _check_inputs(gather: SeismicGather, m_lf: ElasticModel, wavelets: AngleSet,
                  config: InversionConfig, truth: ElasticModel | None) -> None:
    if m_lf.mode is not config.mode:
        raise ValidationError("background model mode does not match configuration")
    if gather.axis != m_lf.axis:
        raise ValidationError("gather axis does not match background model")
    if gather.angles != wavelets.angles:
        raise ValidationError("gather angles do not match wavelet angles")
    wavelets.validate_for_mode(config.mode)
    if truth is not None:
        if truth.mode is not config.mode:
            raise ValidationError("truth model mode does not match configuration")
        if truth.axis != m_lf.axis:
            raise ValidationError("truth axis does not match background model")


def invert(gather: SeismicGather, m_lf: ElasticModel, wavelets: AngleSet,
           config: InversionConfig,
           truth: ElasticModel | None = None) -> InversionReport:
    """Run the full pipeline: operator, quadratic, spin compile, solve, decode.

    The spin encoding is centered on the stacked background logs with the
    configured initial scale. RMS errors appear only when a truth model is
    supplied; data misfits are reported for the background (initial) and the
    prediction (final), both without the regularization term.
    """
    _check_inputs(gather, m_lf, wavelets, config, truth)
    timings = {}

    t0 = time.perf_counter()
    op = assemble_operator(config.mode, m_lf.axis, wavelets, m_lf)
    m_lf_vec = m_lf.stacked_logs()
    timings["assemble_operator"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    quad = assemble_quadratic(gather, op, m_lf_vec, config.lambda_)
    timings["assemble_quadratic"] = time.perf_counter() - t0

    enc0 = SpinEncoding(
        n_weights=m_lf_vec.size,
        n_spins=config.n_spins,
        centers=m_lf_vec,
        scales=np.full(m_lf_vec.size, config.initial_scale),
        shrink_factor=config.shrink_factor,
    )

    t0 = time.perf_counter()
    weights, records = run_epochs(
        lambda enc: compile_to_ising(quad, enc),
        enc0,
        config.n_epochs,
        solver=config.solver,
        schedule=config.schedule(),
        exact_cap=config.exact_cap,
    )
    timings["solve_epochs"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    predicted = ElasticModel.from_stacked(config.mode, m_lf.axis, weights)
    predicted_ip, predicted_is = to_impedances(predicted)
    rms_ip = rms_is = None
    if truth is not None:
        truth_ip, truth_is = to_impedances(truth)
        rms_ip = rms_error(predicted_ip, truth_ip)
        if predicted_is is not None and truth_is is not None:
            rms_is = rms_error(predicted_is, truth_is)
    misfit_initial = evaluate_objective(gather, op, m_lf_vec, m_lf_vec, 0.0)
    misfit_final = evaluate_objective(gather, op, weights, m_lf_vec, 0.0)
    objective_per_epoch = tuple(
        evaluate_objective(gather, op, record.weights, m_lf_vec, config.lambda_)
        for record in records
    )
    timings["report"] = time.perf_counter() - t0

    return InversionReport(
        predicted_model=predicted,
        predicted_ip=predicted_ip,
        predicted_is=predicted_is,
        rms_ip=rms_ip,
        rms_is=rms_is,
        data_misfit_initial=misfit_initial,
        data_misfit_final=misfit_final,
        objective_per_epoch=objective_per_epoch,
        timings=timings,
        epochs=records,
        solver_time=sum(record.result.elapsed for record in records),
    )


@dataclass(frozen=True)
class SweepRow:
    """One spin-count setting of the resolution sweep."""

    n_spins: int
    runtime_s: float
    solver_time_s: float
    objective: float
    rms_ip: float | None
    rms_is: float | None


def spin_sweep(base_config: InversionConfig, gather: SeismicGather,
               m_lf: ElasticModel, wavelets: AngleSet,
               truth: ElasticModel | None, spin_counts) -> list[SweepRow]:
    """Re-run the inversion across spins-per-weight settings with shared seeds.

    The solver-time column is local solver wall time; there is no hardware
    in this pipeline to attribute it to.
    """
    counts = [int(c) for c in spin_counts]
    if not counts or any(c < 1 for c in counts):
        raise ValidationError("spin_counts must be a non-empty list of counts >= 1")
    rows = []
    for count in counts:
        config = base_config.with_(n_spins=count)
        t0 = time.perf_counter()
        report = invert(gather, m_lf, wavelets, config, truth=truth)
        runtime = time.perf_counter() - t0
        rows.append(
            SweepRow(
                n_spins=count,
                runtime_s=runtime,
                solver_time_s=report.solver_time,
                objective=min(report.objective_per_epoch),
                rms_ip=report.rms_ip,
                rms_is=report.rms_is,
            )
        )
    return rows
