"""Exponential time differencing for the parabolic-elliptic Keller-Segel system.

    u_t = Laplacian u - div(u grad psi),   psi - Laplacian psi = u.

Writing u = A + v gives v_t = Lv - div(v grad K*v) with L the generator of
the linearized semigroup. Both formulations are stepped with the same
splitting: the multiplier -h_A is integrated exactly, everything else is
explicit. The flux is split about the spatial mean. Its linear part is kept
on every mode, so the two formulations agree for any data. The quadratic
remainder is formed in physical space from 2/3-rule truncated factors and
its divergence is truncated again.

Public API (the "studs"):
    nonlinear_rhs, perturbation_rhs: right-hand sides as fields
    EtdStepper: one ETD1 or ETD-RK2 step on Fourier coefficients
    evolve: full run with norm series, saved fields and halting rules
    Trajectory, TrajectoryStatus: run results
    stability_dt_max, convergence_order, mean_drift: step-size tools
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..analysis.norms import local_norms
from ..analysis.semigroup import lattice_max_rate, semigroup_symbol
from ..errors import PreconditionError
from ..models.config import Formulation, NormSpec, Scheme, SolverConfig, StopNorm
from ..spectral.grid import Grid, RealField, physical_array, spectral_array
from ..spectral.kernels import grad_kernel_multipliers, neg_laplace_kernel_multiplier

logger = logging.getLogger(__name__)

TAYLOR_CUTOFF = 1e-2


def phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z with the removable singularity filled in."""
    z = np.asarray(z, dtype=np.float64)
    out = np.ones_like(z)
    nonzero = z != 0
    out[nonzero] = np.expm1(z[nonzero]) / z[nonzero]
    return out


def phi2(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z^2, by its Taylor series near zero."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = np.abs(z) < TAYLOR_CUTOFF
    zs = z[small]
    out[small] = 0.5 + zs / 6.0 + zs**2 / 24.0 + zs**3 / 120.0
    zl = z[~small]
    out[~small] = (np.expm1(zl) - zl) / zl**2
    return out


def stability_dt_max(grid: Grid, A: float) -> float:
    """0.5 * min(1 / (max lattice growth rate + 1), spacing^2)."""
    growth = max(lattice_max_rate(A, grid), 0.0)
    return 0.5 * min(1.0 / (growth + 1.0), min(grid.spacing) ** 2)


def resolve_dt(grid: Grid, config: SolverConfig) -> float:
    """The configured step, or a quarter of the stability bound when unset."""
    dt_max = stability_dt_max(grid, config.A)
    if config.dt is None:
        return 0.25 * dt_max
    if config.dt > dt_max:
        raise PreconditionError(f"dt={config.dt:g} exceeds the stability bound dt_max={dt_max:g}")
    return config.dt


def flux_divergence(coefficients: np.ndarray, grid: Grid, dealias: bool = True) -> np.ndarray:
    """Fourier coefficients of div(v grad K*v).

    With v = m + w and w of zero mean this is m Laplacian K*w + div(w grad K*w).
    The linear part acts on every mode; only the quadratic part is dealiased.
    """
    origin = (0,) * grid.dim
    mean = coefficients[origin].real / grid.size
    fluctuation = np.array(coefficients, dtype=np.complex128)
    fluctuation[origin] = 0.0
    linear = -mean * neg_laplace_kernel_multiplier(grid) * fluctuation

    mask = grid.dealias_mask
    trimmed = fluctuation * mask if dealias else fluctuation
    density = physical_array(trimmed)
    total = np.zeros(grid.shape, dtype=np.complex128)
    for k, symbol in zip(grid.derivative_k, grad_kernel_multipliers(grid)):
        total += 1j * k * spectral_array(density * physical_array(symbol * trimmed))
    return linear + (total * mask if dealias else total)


def nonlinear_rhs(u: RealField, dealias: bool = True, chemotaxis: bool = True) -> RealField:
    """Laplacian u - div(u grad K*u); chemotaxis=False leaves the heat part only."""
    coefficients = spectral_array(u.values)
    rhs = -u.grid.k_squared * coefficients
    if chemotaxis:
        rhs = rhs - flux_divergence(coefficients, u.grid, dealias)
    return RealField(u.grid, physical_array(rhs))


def perturbation_rhs(A: float, v: RealField, dealias: bool = True) -> RealField:
    """Laplacian v - A Laplacian K*v - div(v grad K*v)."""
    coefficients = spectral_array(v.values)
    rhs = -semigroup_symbol(A, v.grid).h_table * coefficients
    rhs = rhs - flux_divergence(coefficients, v.grid, dealias)
    return RealField(v.grid, physical_array(rhs))


class EtdStepper:
    """Exponential integrator for c_t = -h_A c + N(c) on Fourier coefficients.

    ETD1:    c+ = e^{-dt h} c + dt phi1 N(c)
    ETD-RK2: a  = e^{-dt h} c + dt phi1 N(c)
             c+ = a + dt phi2 (N(a) - N(c))
    """

    def __init__(
        self,
        grid: Grid,
        A: float,
        dt: float,
        scheme: Scheme = Scheme.ETD_RK2,
        formulation: Formulation = Formulation.PERTURBATION,
        dealias: bool = True,
    ) -> None:
        self.grid = grid
        self.A = A
        self.dt = dt
        self.scheme = scheme
        self.formulation = formulation
        self.dealias = dealias

        z = -dt * semigroup_symbol(A, grid).h_table
        self._propagator = np.exp(z)
        self._phi1 = dt * phi1(z)
        self._phi2 = dt * phi2(z)
        # h_A differs from the raw Laplacian by A |k|^2/(1+|k|^2); that part is explicit
        self._raw_offset = (
            A * neg_laplace_kernel_multiplier(grid) if formulation is Formulation.RAW else None
        )

    def explicit_term(self, coefficients: np.ndarray) -> np.ndarray:
        term = -flux_divergence(coefficients, self.grid, self.dealias)
        if self._raw_offset is not None:
            term = term - self._raw_offset * coefficients
        return term

    def step(self, coefficients: np.ndarray) -> np.ndarray:
        current = self.explicit_term(coefficients)
        predictor = self._propagator * coefficients + self._phi1 * current
        if self.scheme is Scheme.ETD1:
            return predictor
        return predictor + self._phi2 * (self.explicit_term(predictor) - current)


class TrajectoryStatus(str, Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"
    STOPPED = "stopped"  # stop_amplitude reached


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time series of one evolution.

    Norms are recorded at every step; fields only every save_every steps
    and at the final time. saved_indices point into times.
    """

    grid: Grid
    A: float
    formulation: Formulation
    times: np.ndarray
    l1: np.ndarray
    l2: np.ndarray
    linf: np.ndarray
    minimum: np.ndarray
    mean: np.ndarray
    saved_indices: np.ndarray
    fields: tuple[RealField, ...]
    status: TrajectoryStatus
    halt_time: float | None = None
    uloc: np.ndarray | None = None
    message: str = ""

    @property
    def final(self) -> RealField:
        return self.fields[-1]

    @property
    def initial(self) -> RealField:
        return self.fields[0]

    @property
    def saved_times(self) -> np.ndarray:
        return self.times[self.saved_indices]

    def field_at(self, time: float) -> RealField:
        """The saved field closest to the given time."""
        index = int(np.argmin(np.abs(self.saved_times - time)))
        return self.fields[index]

    def first_time_reaching(self, level: float, norm: StopNorm = StopNorm.L2) -> float | None:
        series = self.l2 if norm is StopNorm.L2 else self.linf
        hits = np.flatnonzero(series >= level)
        return float(self.times[hits[0]]) if hits.size else None


@dataclass
class _Recorder:
    grid: Grid
    uloc: NormSpec | None
    times: list[float] = field(default_factory=list)
    l1: list[float] = field(default_factory=list)
    l2: list[float] = field(default_factory=list)
    linf: list[float] = field(default_factory=list)
    minimum: list[float] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    uloc_values: list[float] = field(default_factory=list)
    saved_indices: list[int] = field(default_factory=list)
    fields: list[RealField] = field(default_factory=list)

    def record(self, t: float, values: np.ndarray) -> None:
        magnitude = np.abs(values)
        cell = self.grid.cell_volume
        self.times.append(t)
        self.l1.append(float(np.sum(magnitude) * cell))
        self.l2.append(float(np.sqrt(np.sum(magnitude**2) * cell)))
        self.linf.append(float(np.max(magnitude)))
        self.minimum.append(float(np.min(values)))
        self.mean.append(float(np.mean(values)))
        if self.uloc is not None:
            windows = local_norms(RealField(self.grid, values), self.uloc)
            self.uloc_values.append(float(np.max(windows)))

    def save(self, values: np.ndarray) -> None:
        self.saved_indices.append(len(self.times) - 1)
        self.fields.append(RealField(self.grid, values))

    def build(
        self, A: float, formulation: Formulation, status: TrajectoryStatus,
        halt_time: float | None, message: str,
    ) -> Trajectory:
        return Trajectory(
            grid=self.grid,
            A=A,
            formulation=formulation,
            times=np.asarray(self.times),
            l1=np.asarray(self.l1),
            l2=np.asarray(self.l2),
            linf=np.asarray(self.linf),
            minimum=np.asarray(self.minimum),
            mean=np.asarray(self.mean),
            saved_indices=np.asarray(self.saved_indices, dtype=np.int64),
            fields=tuple(self.fields),
            status=status,
            halt_time=halt_time,
            uloc=np.asarray(self.uloc_values) if self.uloc is not None else None,
            message=message,
        )


def _step_plan(horizon: float, dt: float) -> tuple[int, float]:
    """Number of full steps and the length of a final partial step (0 if none)."""
    full = int(math.floor(horizon / dt + 1e-9))
    remainder = horizon - full * dt
    if remainder <= 1e-12 * horizon:
        return full, 0.0
    return full, remainder


def evolve(
    initial: RealField, config: SolverConfig, uloc: NormSpec | None = None
) -> Trajectory:
    """Run the solver from an initial field over config.horizon.

    Args:
        initial: u0 for the raw formulation, v0 for the perturbation one
        config: Solver settings; config.A is the background constant
        uloc: Also record the uniformly local norm at every step

    Returns:
        The trajectory. A crossed blow-up threshold or a non-finite state ends
        the run with BLOWUP status; a reached stop_amplitude with STOPPED.

    Raises:
        PreconditionError: dt above the stability bound.
    """
    grid = initial.grid
    dt = resolve_dt(grid, config)
    stepper = EtdStepper(grid, config.A, dt, config.scheme, config.formulation, config.dealias)
    full_steps, remainder = _step_plan(config.horizon, dt)
    last_stepper = (
        EtdStepper(grid, config.A, remainder, config.scheme, config.formulation, config.dealias)
        if remainder
        else None
    )

    initial_sup = initial.max_abs()
    if config.blowup_threshold is not None:
        threshold = config.blowup_threshold
    else:
        threshold = config.blowup_factor * initial_sup if initial_sup > 0 else math.inf

    recorder = _Recorder(grid, uloc)
    recorder.record(0.0, initial.values)
    recorder.save(initial.values)

    coefficients = spectral_array(initial.values)
    status, halt_time, message = TrajectoryStatus.COMPLETED, None, ""
    total_steps = full_steps + (1 if last_stepper else 0)
    recorded = initial.values
    for n in range(1, total_steps + 1):
        active = stepper if n <= full_steps else last_stepper
        coefficients = active.step(coefficients)
        t = n * dt if n <= full_steps else config.horizon
        values = physical_array(coefficients)

        if not np.all(np.isfinite(values)):
            status, halt_time = TrajectoryStatus.BLOWUP, t
            message = f"non-finite state at t={t:g}"
            break
        recorder.record(t, values)
        recorded = values
        sup = recorder.linf[-1]
        if sup >= threshold:
            status, halt_time = TrajectoryStatus.BLOWUP, t
            message = f"sup-norm {sup:.3g} crossed threshold {threshold:.3g} at t={t:g}"
            break
        if config.stop_amplitude is not None:
            level = recorder.l2[-1] if config.stop_norm is StopNorm.L2 else sup
            if level >= config.stop_amplitude:
                status, halt_time = TrajectoryStatus.STOPPED, t
                message = (
                    f"{config.stop_norm.value} norm reached {config.stop_amplitude:g} at t={t:g}"
                )
                break
        if n % config.save_every == 0:
            recorder.save(values)

    if recorder.saved_indices[-1] != len(recorder.times) - 1:
        recorder.save(recorded)

    if status is TrajectoryStatus.BLOWUP:
        logger.info(f"evolution halted: {message}")
    return recorder.build(config.A, config.formulation, status, halt_time, message)


@dataclass(frozen=True)
class ConvergenceReport:
    """Terminal L2 errors at dt and dt/2 against a dt/8 reference."""

    scheme: Scheme
    dts: tuple[float, float]
    errors: tuple[float, float]
    ratio: float
    expected_ratio: float


def convergence_order(initial: RealField, config: SolverConfig, base_dt: float) -> ConvergenceReport:
    """Observed error ratio e(dt)/e(dt/2); about 2 for ETD1 and 4 for ETD-RK2."""
    runs = {}
    for divisor in (1, 2, 8):
        step_config = config.model_copy(
            update={"dt": base_dt / divisor, "stop_amplitude": None, "save_every": 10**9}
        )
        trajectory = evolve(initial, step_config)
        if trajectory.status is not TrajectoryStatus.COMPLETED:
            raise PreconditionError(f"convergence run at dt={base_dt / divisor:g} did not complete")
        runs[divisor] = trajectory.final.values
    cell = initial.grid.cell_volume
    errors = tuple(
        float(np.sqrt(np.sum((runs[d] - runs[8]) ** 2) * cell)) for d in (1, 2)
    )
    ratio = errors[0] / errors[1] if errors[1] > 0 else math.inf
    order = 1 if config.scheme is Scheme.ETD1 else 2
    return ConvergenceReport(
        scheme=config.scheme,
        dts=(base_dt, base_dt / 2),
        errors=errors,
        ratio=ratio,
        expected_ratio=float(2**order),
    )


def mean_drift(trajectory: Trajectory) -> float:
    """Largest change of the spatial mean from its initial value."""
    return float(np.max(np.abs(trajectory.mean - trajectory.mean[0])))
