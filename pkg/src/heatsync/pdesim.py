"""Closed-loop simulation of the follower/leader heat-equation network.

Method of lines on a uniform grid over [0, 1]: second-order central
differences with ghost-point elimination at the Neumann rows, so the whole
closed loop (including the nonlocal boundary feedback, which couples the
x=0 node of an agent to the trapezoid weights of that agent and the leader)
is one constant linear operator.  Time stepping is Crank-Nicolson by
default (unconditionally stable, second order, source at the half step);
backward Euler is available for stiff debugging.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .certify import NetworkConfig
from .errors import DimensionMismatch, Divergence, NoConvergence, NonPositiveSeries
from .graph import laplacian, leader_mask
from .matrixkit import power_dominant
from .scenarios import demo_initial_profiles, forcing_profile

_DIVERGENCE_LIMIT = 1e12

SOURCE_SELECTORS = ("off", "paper")
SCHEMES = ("crank_nicolson", "backward_euler")


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Discretization and scenario data for one simulation run.

    ``initial_conditions`` is either a preset token ("sectionV"), a pair of
    arrays (followers (N, nx), leader (nx,)), or None for all-zero fields.
    ``source`` selects the forcing term: "off" or "paper" (the demo forcing
    (1 + cos(2 pi x)) sin(pi t), applied to every agent and the leader).
    """

    nx: int = 101
    dt: float = 1e-3
    t_end: float = 2.5
    source: str = "paper"
    scheme: str = "crank_nicolson"
    output_stride: int = 10
    initial_conditions: object = None
    leader_seventh_harmonic: bool = False

    def __post_init__(self):
        if self.nx < 16:
            raise ValueError(f"nx must be >= 16, got {self.nx}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end <= 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.source not in SOURCE_SELECTORS:
            raise ValueError(f"source must be one of {SOURCE_SELECTORS}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def dx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Spatially discretized closed-loop generator.

    ``full`` acts on the stacked state (z_1 .. z_N, z_leader) of size
    (N+1) * nx; ``error_subsystem`` acts on the stacked follower errors
    (size N * nx) and is what the spectral diagnostics use.  ``weights``
    are the trapezoid quadrature weights of the grid.
    """

    full: np.ndarray
    error_subsystem: np.ndarray
    grid: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled space-time fields of one run."""

    times: np.ndarray  # (n_frames,)
    grid: np.ndarray  # (nx,)
    z: np.ndarray  # (n_agents, n_frames, nx)
    z_leader: np.ndarray  # (n_frames, nx)

    @property
    def n_agents(self) -> int:
        return self.z.shape[0]

    def errors(self) -> np.ndarray:
        """Follower error fields z_i - z_leader, shape (n_agents, n_frames, nx)."""
        return self.z - self.z_leader[np.newaxis, :, :]


@dataclass(frozen=True, eq=False)
class ErrorSeries:
    """L2 error diagnostics derived from a trajectory."""

    times: np.ndarray  # (n_frames,)
    grid: np.ndarray  # (nx,)
    per_agent_l2: np.ndarray  # (n_agents, n_frames)
    total_l2: np.ndarray  # (n_frames,)
    avg_error_field: np.ndarray  # (n_frames, nx), sum of the error fields
    pairwise_max: np.ndarray  # (n_frames,), max_{i<j} ||z_i - z_j||_L2


def trapezoid_weights(nx: int) -> np.ndarray:
    dx = 1.0 / (nx - 1)
    w = np.full(nx, dx)
    w[0] = w[-1] = dx / 2.0
    return w


def _neumann_heat_block(nx: int, dx: float, beta: float, alpha: float) -> np.ndarray:
    # Second difference with ghost elimination at both Neumann rows.
    t = np.zeros((nx, nx))
    t[0, 0], t[0, 1] = -2.0, 2.0
    idx = np.arange(1, nx - 1)
    t[idx, idx - 1] = 1.0
    t[idx, idx] = -2.0
    t[idx, idx + 1] = 1.0
    t[nx - 1, nx - 2], t[nx - 1, nx - 1] = 2.0, -2.0
    return (beta / dx**2) * t + alpha * np.eye(nx)


def assemble_operator(net: NetworkConfig, sim: SimConfig) -> DiscreteOperator:
    """Build the discrete closed-loop generator for a scenario.

    Every agent block is the Neumann heat stencil; follower x=0 rows pick up
    the boundary feedback flux -(2 beta / dx) * k_i m_i * trapezoid(z_i - z_l)
    from eliminating the ghost node against the prescribed boundary slope,
    and the in-domain coupling adds g_i * l_ij pointwise across agent blocks.
    The leader block is pure Neumann and feeds back to nothing.
    """
    n, nx = net.n, sim.nx
    dx = sim.dx
    w = trapezoid_weights(nx)
    heat = _neumann_heat_block(nx, dx, net.beta, net.alpha)
    lap = laplacian(net.graph).astype(float)
    mask = leader_mask(net.graph).astype(float).diagonal()
    k_vec = net.k_vector
    g_vec = net.g_vector

    def fill_common(a: np.ndarray, n_blocks: int) -> None:
        for b in range(n_blocks):
            a[b * nx : (b + 1) * nx, b * nx : (b + 1) * nx] = heat
        idx = np.arange(nx)
        for i in range(n):
            for j in range(n):
                if lap[i, j] != 0.0:
                    a[i * nx + idx, j * nx + idx] += g_vec[i] * lap[i, j]

    full = np.zeros(((n + 1) * nx, (n + 1) * nx))
    fill_common(full, n + 1)
    err = np.zeros((n * nx, n * nx))
    fill_common(err, n)

    flux = 2.0 * net.beta / dx
    for i in range(n):
        kappa = k_vec[i] * mask[i]
        if kappa != 0.0:
            row = i * nx
            full[row, i * nx : (i + 1) * nx] += -flux * kappa * w
            full[row, n * nx : (n + 1) * nx] += +flux * kappa * w
            err[row, i * nx : (i + 1) * nx] += -flux * kappa * w
    return DiscreteOperator(
        full=full, error_subsystem=err, grid=sim.grid, weights=w
    )


def _resolve_initial_conditions(
    net: NetworkConfig, sim: SimConfig
) -> tuple[np.ndarray, np.ndarray]:
    x = sim.grid
    ic = sim.initial_conditions
    if ic is None:
        return np.zeros((net.n, sim.nx)), np.zeros(sim.nx)
    if isinstance(ic, str):
        if ic != "sectionV":
            raise ValueError(f"unknown initial-condition preset {ic!r}")
        if net.n != 5:
            raise DimensionMismatch(
                f"the sectionV profiles define 5 followers, config has {net.n}"
            )
        return demo_initial_profiles(x, sim.leader_seventh_harmonic)
    followers, leader = ic
    followers = np.asarray(followers, dtype=float)
    leader = np.asarray(leader, dtype=float)
    if followers.shape != (net.n, sim.nx) or leader.shape != (sim.nx,):
        raise DimensionMismatch(
            f"initial conditions must have shapes ({net.n}, {sim.nx}) and "
            f"({sim.nx},), got {followers.shape} and {leader.shape}"
        )
    return followers, leader


def _check_finite(y: np.ndarray, n: int, nx: int, step: int, dt: float) -> None:
    bad = ~np.isfinite(y) | (np.abs(y) > _DIVERGENCE_LIMIT)
    if bad.any():
        block = int(np.argmax(bad.reshape(-1, nx).any(axis=1)))
        agent = "leader" if block == n else block + 1
        raise Divergence(step=step, t=step * dt, agent=agent)


def simulate(net: NetworkConfig, sim: SimConfig) -> Trajectory:
    """Run the closed loop and sample every ``output_stride`` steps.

    Crank-Nicolson: (I - dt/2 A) y_{n+1} = (I + dt/2 A) y_n + dt f(t_n + dt/2);
    backward Euler uses the source at the step end.  The implicit matrix is
    factored once.  Raises Divergence (with step and agent) if the state
    leaves the finite range.
    """
    n, nx = net.n, sim.nx
    op = assemble_operator(net, sim)
    a = op.full
    size = (n + 1) * nx
    eye = np.eye(size)
    crank = sim.scheme == "crank_nicolson"
    m_implicit = eye - (sim.dt / 2.0) * a if crank else eye - sim.dt * a
    m_explicit = eye + (sim.dt / 2.0) * a if crank else None
    lu = lu_factor(m_implicit)

    followers0, leader0 = _resolve_initial_conditions(net, sim)
    y = np.concatenate([followers0.reshape(-1), leader0])
    x = sim.grid
    source_on = sim.source == "paper"

    frames = [y.copy()]
    times = [0.0]
    n_steps = sim.n_steps
    for step in range(1, n_steps + 1):
        t_src = (step - 1) * sim.dt + sim.dt / 2.0 if crank else step * sim.dt
        rhs = m_explicit @ y if crank else y.copy()
        if source_on:
            rhs += sim.dt * np.tile(forcing_profile(x, t_src), n + 1)
        y = lu_solve(lu, rhs)
        _check_finite(y, n, nx, step, sim.dt)
        if step % sim.output_stride == 0 or step == n_steps:
            frames.append(y.copy())
            times.append(step * sim.dt)
    stacked = np.array(frames)
    return Trajectory(
        times=np.array(times),
        grid=x,
        z=stacked[:, : n * nx].reshape(len(times), n, nx).transpose(1, 0, 2),
        z_leader=stacked[:, n * nx :],
    )


def l2_norm(field: np.ndarray, dx: float) -> float:
    """Trapezoid-rule L2 norm of a sampled field on a uniform grid."""
    field = np.asarray(field, dtype=float)
    w = np.full(field.shape[-1], dx)
    w[0] = w[-1] = dx / 2.0
    return float(np.sqrt(field**2 @ w))


def sync_errors(traj: Trajectory) -> ErrorSeries:
    """Per-agent L2 errors, total error, summed error field and disagreement.

    The total is the root of the summed squared per-agent errors, and the
    summed error field is the plain sum of the error fields over agents.
    """
    n = traj.n_agents
    nx = traj.grid.size
    w = trapezoid_weights(nx)
    e = traj.errors()
    per_sq = np.einsum("atx,x->at", e**2, w)
    per = np.sqrt(per_sq)
    total = np.sqrt(per_sq.sum(axis=0))
    avg_field = e.sum(axis=0)
    n_frames = traj.times.size
    pair = np.zeros(n_frames)
    for i in range(n):
        for j in range(i + 1, n):
            diff = traj.z[i] - traj.z[j]
            pair = np.maximum(pair, np.sqrt(np.einsum("tx,x->t", diff**2, w)))
    return ErrorSeries(
        times=traj.times.copy(),
        grid=traj.grid.copy(),
        per_agent_l2=per,
        total_l2=total,
        avg_error_field=avg_field,
        pairwise_max=pair,
    )


def fit_decay_rate(series: ErrorSeries, window: tuple[float, float]) -> float:
    """Least-squares slope of log total error over a time window.

    Negative means decay.  Raises NonPositiveSeries when the total error is
    not strictly positive somewhere in the window (nothing to fit there).
    """
    t0, t1 = window
    sel = (series.times >= t0) & (series.times <= t1)
    if sel.sum() < 2:
        raise ValueError(f"window {window} covers fewer than two samples")
    values = series.total_l2[sel]
    if (values <= 0.0).any():
        raise NonPositiveSeries(
            f"total error reaches zero inside window {window}; no rate to fit"
        )
    slope, _ = np.polyfit(series.times[sel], np.log(values), 1)
    return float(slope)


def spectral_abscissa(
    net: NetworkConfig,
    sim: SimConfig,
    iters: int = 20000,
    tol: float = 1e-9,
) -> float:
    """Decay/growth exponent estimate of the discrete error subsystem.

    Power iteration estimates the spectral radius rho of the one-step
    propagator of the error subsystem (leader and source excluded); the
    returned value is log(rho)/dt.  Note the estimate is floored by the
    time discretization: very stiff spatial modes keep |one-step factor|
    close to 1, so dt must be small enough for the physical slow mode to
    dominate.  Raises NoConvergence if the power iteration does not settle.
    """
    if net.n < 1:
        raise DimensionMismatch("spectral abscissa needs at least one follower")
    a = assemble_operator(net, sim).error_subsystem
    size = a.shape[0]
    eye = np.eye(size)
    lu = lu_factor(eye - (sim.dt / 2.0) * a)
    propagator = lu_solve(lu, eye + (sim.dt / 2.0) * a)
    rho, converged = power_dominant(propagator, iters=iters, tol=tol)
    if not converged:
        raise NoConvergence(
            f"power iteration did not converge in {iters} iterations"
        )
    if rho <= 0.0:
        raise NoConvergence("propagator radius estimate collapsed to zero")
    return float(np.log(rho) / sim.dt)


def analytic_open_loop_spectrum(
    alpha: float, beta: float, n_modes: int
) -> list[float]:
    """Eigenvalues alpha - beta j^2 pi^2, j = 0 .. n_modes-1, of the
    uncontrolled error dynamics (pure Neumann heat plus reaction).

    The j = 0 constant mode is included: it is what conservation of the
    spatial mean (alpha = 0) and open-loop instability (alpha > 0) live on.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return [float(alpha - beta * j**2 * np.pi**2) for j in range(n_modes)]
