"""Fixed-step integration of the master equation and the weak-invariant flow.

The state obeys drho/dt = -i L(rho); a weak invariant obeys dI/dt = +i L*(I),
the rearranged form of the defining equation i dI/dt + L*(I) = 0. The same
equation propagated backward from a final condition yields the auxiliary
operator of the action principle, which is why ``integrate_invariant``
supports seeding at either end of the grid.

Only deterministic one-step methods are offered (classic RK4 and explicit
midpoint, both sampling schedules at step midpoints); the action module
needs ρ and Λ on exactly the same nodes, which rules out adaptive stepping.
Each step re-symmetrizes the iterate to (A + A†)/2, which suppresses
Hermiticity drift without touching the order of accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BlowupError, IntegrationError, ModelValidationError
from .model import LindbladModel
from .superop import apply_adjoint, apply_liouvillian

STATE = "state"
INVARIANT = "invariant"

METHODS = ("rk4", "midpoint")

# Hard cap on iterate magnitude; the dissipative adjoint flow may grow
# exponentially, which is legitimate, but overflow must be loud.
BLOWUP_CAP = 1e12

__all__ = [
    "TimeGrid",
    "Trajectory",
    "MonitorReport",
    "integrate_state",
    "integrate_invariant",
    "conservation_series",
    "write_trajectory_csv",
    "STATE",
    "INVARIANT",
    "METHODS",
]


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = t_start + k * dt, k = 0..n_steps."""

    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    def nodes(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps + 1)

    def node(self, k: int) -> float:
        return self.t_start + self.dt * k

    def midpoint(self, k: int) -> float:
        return self.t_start + self.dt * (k + 0.5)

    def to_dict(self) -> dict:
        return {"t_start": self.t_start, "t_end": self.t_end, "n_steps": self.n_steps}


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    samples: list  # one operator per node, n_steps + 1 in total
    kind: str

    def __post_init__(self):
        if len(self.samples) != self.grid.n_steps + 1:
            raise ValueError(
                f"{len(self.samples)} samples for {self.grid.n_steps + 1} nodes"
            )
        if self.kind not in (STATE, INVARIANT):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.samples[0].shape[0]


@dataclass(frozen=True)
class MonitorReport:
    """Numerical health of a state trajectory.

    ``max_leakage`` is the largest population seen on the designated top
    basis level and is 0.0 when no truncation level was given.
    """

    max_trace_drift: float
    max_hermiticity_defect: float
    min_eigenvalue: float
    max_leakage: float

    def to_dict(self) -> dict:
        return {
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_defect": self.max_hermiticity_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "max_leakage": self.max_leakage,
        }


def _validate_model_on_grid(model: LindbladModel, grid: TimeGrid) -> None:
    if model.is_constant:
        times = [grid.t_start]
    else:
        times = list(grid.nodes()) + [grid.midpoint(k) for k in range(grid.n_steps)]
    issues = model.validate(times)
    if issues:
        first = issues[0]
        raise ModelValidationError(
            f"model invalid on grid: {len(issues)} issue(s), first: {first.kind} "
            f"at t={first.t}"
            + (f" (channel {first.channel})" if first.channel is not None else "")
        )


def _step(model, sign, t, y, h, method):
    """One step of y' = sign * i * generator(y), sampling schedules at t, t+h/2, t+h."""

    def rhs(snap, v):
        if sign < 0:
            return -1j * apply_liouvillian(snap, v)
        return 1j * apply_adjoint(snap, v)

    s0 = model.snapshot(t)
    sm = model.snapshot(t + 0.5 * h)
    if method == "rk4":
        s1 = model.snapshot(t + h)
        k1 = rhs(s0, y)
        k2 = rhs(sm, y + (0.5 * h) * k1)
        k3 = rhs(sm, y + (0.5 * h) * k2)
        k4 = rhs(s1, y + h * k3)
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    k1 = rhs(s0, y)
    return y + h * rhs(sm, y + (0.5 * h) * k1)


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def integrate_state(
    model: LindbladModel,
    rho0,
    grid: TimeGrid,
    method: str = "rk4",
    *,
    leakage_index: int | None = None,
) -> tuple[Trajectory, MonitorReport]:
    """Propagate a density operator over the grid.

    ``rho0`` must be Hermitian, unit trace (within 1e-10) and positive
    semi-definite (min eigenvalue >= -1e-10). Returns the trajectory and a
    monitor report; pass ``leakage_index`` (the top retained basis level) to
    have truncation leakage tracked.
    """
    _check_method(method)
    rho0 = linalg.require_hermitian(rho0, rtol=1e-10, what="rho0")
    if rho0.shape != (model.dim, model.dim):
        raise ValueError(f"rho0 dimension {rho0.shape[0]} != model dim {model.dim}")
    tr0 = linalg.trace(rho0)
    if abs(tr0 - 1.0) > 1e-10:
        raise ValueError(f"rho0 trace {tr0} is not 1 within 1e-10")
    min_eig0 = float(linalg.hermitian_eigenvalues(rho0)[0])
    if min_eig0 < -1e-10:
        raise ValueError(f"rho0 has negative eigenvalue {min_eig0}")
    _validate_model_on_grid(model, grid)

    dt = grid.dt
    samples = [rho0]
    y = rho0
    max_herm = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(grid.n_steps):
            y = _step(model, -1, grid.node(k), y, dt, method)
            if not np.all(np.isfinite(y)):
                raise IntegrationError(f"non-finite state at step {k + 1}", step=k + 1)
            max_herm = max(max_herm, linalg.hermiticity_defect(y))
            y = linalg.hermitize(y)
            samples.append(y)

    traj = Trajectory(grid=grid, samples=samples, kind=STATE)
    trace0 = linalg.trace(rho0).real
    drift = max(abs(linalg.trace(s).real - trace0) for s in samples)
    min_eig = min(float(linalg.hermitian_eigenvalues(s)[0]) for s in samples)
    if leakage_index is not None:
        leak = max(float(s[leakage_index, leakage_index].real) for s in samples)
    else:
        leak = 0.0
    report = MonitorReport(
        max_trace_drift=drift,
        max_hermiticity_defect=max_herm,
        min_eigenvalue=min_eig,
        max_leakage=leak,
    )
    return traj, report


def integrate_invariant(
    model: LindbladModel,
    seed,
    seed_time: str,
    grid: TimeGrid,
    method: str = "rk4",
) -> Trajectory:
    """Propagate dI/dt = +i L*(I) across the grid.

    ``seed_time`` is "start" (forward from t_start) or "end" (backward from
    t_end, the direction the action principle fixes for the auxiliary
    operator). Non-Hermitian seeds are rejected rather than symmetrized.
    """
    _check_method(method)
    if seed_time not in ("start", "end"):
        raise ValueError(f"seed_time must be 'start' or 'end', got {seed_time!r}")
    seed = linalg.require_hermitian(seed, what="invariant seed")
    if seed.shape != (model.dim, model.dim):
        raise ValueError(f"seed dimension {seed.shape[0]} != model dim {model.dim}")
    _validate_model_on_grid(model, grid)

    n = grid.n_steps
    dt = grid.dt
    samples: list = [None] * (n + 1)
    if seed_time == "start":
        order = range(n)  # computes node k+1 from node k
        h = dt
        samples[0] = seed
    else:
        order = range(n, 0, -1)  # computes node k-1 from node k
        h = -dt
        samples[n] = seed

    with np.errstate(over="ignore", invalid="ignore"):
        for k in order:
            dst = k + 1 if seed_time == "start" else k - 1
            y = _step(model, +1, grid.node(k), samples[k], h, method)
            if not np.all(np.isfinite(y)):
                raise IntegrationError(f"non-finite invariant at node {dst}", step=dst)
            mag = linalg.maxabs(y)
            if mag > BLOWUP_CAP:
                raise BlowupError(
                    f"invariant magnitude {mag:.3e} exceeded cap {BLOWUP_CAP:.1e} at node {dst}",
                    step=dst,
                    magnitude=mag,
                )
            samples[dst] = linalg.hermitize(y)

    return Trajectory(grid=grid, samples=samples, kind=INVARIANT)


def conservation_series(inv: Trajectory, state: Trajectory) -> np.ndarray:
    """<I>(t_k) = Re tr(I(t_k) rho(t_k)) per node.

    The imaginary parts must be roundoff-level (both trajectories Hermitian);
    anything larger raises.
    """
    if inv.kind != INVARIANT or state.kind != STATE:
        raise ValueError("expected an invariant trajectory and a state trajectory")
    if inv.grid != state.grid:
        raise ValueError("trajectories live on different grids")
    if inv.dim != state.dim:
        raise ValueError(f"dimension mismatch: {inv.dim} vs {state.dim}")
    values = np.empty(inv.grid.n_steps + 1)
    for k, (a, rho) in enumerate(zip(inv.samples, state.samples)):
        v = complex(np.einsum("jk,kj->", a, rho))
        if abs(v.imag) > 1e-10 * max(1.0, abs(v)):
            raise ValueError(f"expectation at node {k} has imaginary part {v.imag:.3e}")
        values[k] = v.real
    return values


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV export: t, then re_j_k / im_j_k for the row-major operator entries."""
    d = traj.dim
    header = ["t"]
    for j in range(d):
        for k in range(d):
            header += [f"re_{j}_{k}", f"im_{j}_{k}"]
    nodes = traj.grid.nodes()
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for t, s in zip(nodes, traj.samples):
            cells = [f"{t:.17g}"]
            for v in s.reshape(-1):
                cells += [f"{v.real:.17g}", f"{v.imag:.17g}"]
            f.write(",".join(cells) + "\n")
