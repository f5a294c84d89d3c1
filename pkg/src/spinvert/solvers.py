"""Ising minimizers: exhaustive enumeration, simulated annealing, and the
multi-epoch encoding-refinement driver.

All randomness flows through explicitly seeded generators; identical seeds
and schedules reproduce identical results bit for bit.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass

import numpy as np

from .encoding import SpinAssignment, SpinEncoding
from .errors import SolverError, ValidationError
from .qubo import IsingProblem

EXACT_SPIN_CAP = 24
_ENUM_CHUNK = 1 << 16


class SolverId(enum.Enum):
    EXACT = "exact"
    SIMULATED_ANNEALING = "sa"
    IMPORTED = "imported"


@dataclass(frozen=True)
class AnnealSchedule:
    """Simulated-annealing controls.

    Temperatures follow a geometric ladder from t_initial down to t_final
    over n_sweeps. Leaving t_initial/t_final as None derives them from the
    instance: t_initial becomes the standard deviation of 100 random
    assignment energies and t_final 1e-3 of that. moves_per_sweep defaults
    to the spin count. Restart r uses generator seed `seed + r`.
    """

    t_initial: float | None = None
    t_final: float | None = None
    n_sweeps: int = 200
    moves_per_sweep: int | None = None
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.t_initial is not None and not (self.t_initial > 0):
            raise ValidationError("t_initial must be positive")
        if self.t_final is not None:
            if not (self.t_final > 0):
                raise ValidationError("t_final must be positive")
            if self.t_initial is not None and self.t_final >= self.t_initial:
                raise ValidationError("t_final must be below t_initial")
        if self.n_sweeps < 1 or self.restarts < 1:
            raise ValidationError("n_sweeps and restarts must be at least 1")
        if self.moves_per_sweep is not None and self.moves_per_sweep < 1:
            raise ValidationError("moves_per_sweep must be at least 1")


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Best assignment found, its total energy, and per-restart progress."""

    best_assignment: SpinAssignment
    best_energy: float
    energy_trace: tuple
    elapsed: float
    solver_id: SolverId


def _spins_from_indices(indices: np.ndarray, n: int) -> np.ndarray:
    """Map enumeration indices to +-1 rows; spin 0 is the most significant bit,
    so ascending index order is lexicographic order with -1 < +1."""
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = (indices[:, None] >> shifts[None, :]) & np.uint64(1)
    return 2.0 * bits.astype(np.float64) - 1.0


def _batch_energies(spins: np.ndarray, j: np.ndarray, h: np.ndarray) -> np.ndarray:
    return 0.5 * np.einsum("bi,bi->b", spins @ j, spins) + spins @ h


def solve_exact(ising: IsingProblem, cap: int = EXACT_SPIN_CAP) -> SolveResult:
    """Global minimum by exhaustive enumeration of all 2^n assignments.

    Ties resolve to the lexicographically smallest assignment (-1 before +1).
    Instances above `cap` spins are refused.
    """
    n = ising.n_spins_total
    if n > cap:
        raise SolverError(
            f"exact enumeration refused: {n} spins exceeds the cap of {cap}"
        )
    start = time.perf_counter()
    total = 1 << n
    best_energy = math.inf
    best_index = 0
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        indices = np.arange(lo, hi, dtype=np.uint64)
        spins = _spins_from_indices(indices, n)
        energies = _batch_energies(spins, ising.J, ising.h)
        k = int(np.argmin(energies))  # first occurrence keeps lex order
        if energies[k] < best_energy:
            best_energy = float(energies[k])
            best_index = lo + k
    best_spins = _spins_from_indices(np.array([best_index], dtype=np.uint64), n)[0]
    assignment = SpinAssignment(best_spins.astype(np.int8))
    total_energy = best_energy + ising.constant
    return SolveResult(
        best_assignment=assignment,
        best_energy=total_energy,
        energy_trace=((total_energy,),),
        elapsed=time.perf_counter() - start,
        solver_id=SolverId.EXACT,
    )


def _derive_temperatures(ising: IsingProblem, schedule: AnnealSchedule):
    t_initial = schedule.t_initial
    if t_initial is None:
        rng = np.random.default_rng(schedule.seed)
        samples = rng.integers(0, 2, size=(100, ising.n_spins_total)) * 2.0 - 1.0
        t_initial = float(np.std(_batch_energies(samples, ising.J, ising.h)))
        if not (t_initial > 0 and math.isfinite(t_initial)):
            t_initial = 1.0
    t_final = schedule.t_final
    if t_final is None:
        t_final = 1e-3 * t_initial
    return t_initial, t_final


def solve_sa(ising: IsingProblem, schedule: AnnealSchedule | None = None) -> SolveResult:
    """Single-spin-flip Metropolis annealing over a geometric temperature ladder.

    Each restart draws a fresh random start, proposes moves_per_sweep uniform
    spin flips per sweep, and accepts a flip when its energy change dH is
    non-positive or with probability exp(-dH / T). Energy changes are applied
    incrementally through cached local fields.
    """
    if schedule is None:
        schedule = AnnealSchedule()
    start = time.perf_counter()
    n = ising.n_spins_total
    j = ising.J
    h = ising.h
    t_initial, t_final = _derive_temperatures(ising, schedule)
    if schedule.n_sweeps == 1:
        temperatures = np.array([t_initial])
    else:
        temperatures = t_initial * (t_final / t_initial) ** (
            np.arange(schedule.n_sweeps) / (schedule.n_sweeps - 1)
        )
    moves = schedule.moves_per_sweep if schedule.moves_per_sweep is not None else n
    exp = math.exp

    best_energy = math.inf
    best_spins = None
    traces = []
    for restart in range(schedule.restarts):
        rng = np.random.default_rng(schedule.seed + restart)
        sigma = (rng.integers(0, 2, size=n) * 2.0 - 1.0).astype(np.float64)
        local = j @ sigma + h
        energy = float(0.5 * sigma @ (local - h) + h @ sigma + ising.constant)
        restart_best = energy
        restart_best_spins = sigma.copy()
        trace = np.empty(schedule.n_sweeps)
        for sweep_idx in range(schedule.n_sweeps):
            temperature = temperatures[sweep_idx]
            picks = rng.integers(0, n, size=moves)
            uniforms = rng.random(moves)
            for m_idx in range(moves):
                p = picks[m_idx]
                delta = -2.0 * sigma[p] * local[p]
                if delta <= 0.0 or uniforms[m_idx] < exp(-delta / temperature):
                    sigma[p] = -sigma[p]
                    local += (2.0 * sigma[p]) * j[p]  # symmetric J: row == column
                    energy += delta
                    if energy < restart_best:
                        restart_best = energy
                        restart_best_spins = sigma.copy()
            trace[sweep_idx] = restart_best
        traces.append(tuple(float(v) for v in trace))
        if restart_best < best_energy:
            best_energy = restart_best
            best_spins = restart_best_spins
    assignment = SpinAssignment(best_spins.astype(np.int8))
    return SolveResult(
        best_assignment=assignment,
        best_energy=best_energy,
        energy_trace=tuple(traces),
        elapsed=time.perf_counter() - start,
        solver_id=SolverId.SIMULATED_ANNEALING,
    )


def solve(ising: IsingProblem, solver: SolverId | str,
          schedule: AnnealSchedule | None = None,
          exact_cap: int = EXACT_SPIN_CAP) -> SolveResult:
    """Dispatch to the named solver."""
    solver = SolverId(solver) if not isinstance(solver, SolverId) else solver
    if solver is SolverId.EXACT:
        return solve_exact(ising, cap=exact_cap)
    if solver is SolverId.SIMULATED_ANNEALING:
        return solve_sa(ising, schedule)
    raise ValidationError(f"cannot dispatch to solver {solver}")


@dataclass(frozen=True, eq=False)
class EpochRecord:
    """Snapshot of one compile-solve-decode-refine cycle."""

    encoding: SpinEncoding
    result: SolveResult
    weights: np.ndarray
    objective: float


def run_epochs(problem_builder, enc0: SpinEncoding, n_epochs: int,
               solver: SolverId | str = SolverId.SIMULATED_ANNEALING,
               schedule: AnnealSchedule | None = None,
               exact_cap: int = EXACT_SPIN_CAP):
    """Iterative refinement: compile, solve, decode, recenter-and-shrink.

    Returns (final_weights, records) where final_weights belong to the epoch
    with the lowest recorded objective (solver energies can regress after a
    re-grid, so this is not necessarily the last epoch).
    """
    if n_epochs < 1:
        raise ValidationError("n_epochs must be at least 1")
    enc = enc0
    records = []
    for _ in range(n_epochs):
        ising = problem_builder(enc)
        result = solve(ising, solver, schedule=schedule, exact_cap=exact_cap)
        weights = enc.decode(result.best_assignment)
        records.append(
            EpochRecord(encoding=enc, result=result, weights=weights,
                        objective=result.best_energy)
        )
        enc = enc.refine(weights)
    best = records[0]
    for record in records[1:]:
        if record.objective < best.objective:
            best = record
    return best.weights.copy(), tuple(records)
