"""Discretized auxiliary-operator action and its exact node gradients.

Continuum functional, over paths (rho(t), Lam(t)) on [t_i, t_f]:

    S = - integral tr[(dLam/dt - i L*(Lam)) rho] dt - tr(Lam(t_i) rho(t_i))

Discretization (midpoint rule): with node values rho_k, Lam_k on a uniform
grid, cell averages X̄_k = (X_k + X_{k+1})/2 and cell midtimes t̄_k,

    S_disc = - sum_k dt * tr[G_k ρ̄_k] - tr(Lam_0 rho_0),
    G_k = (Lam_{k+1} - Lam_k)/dt - i L*(Λ̄_k at t̄_k).

S_disc is bilinear in the node values, so its node gradients are exact
operators (finite differences reproduce them to roundoff):

    d S / d rho_k : -(dt/2) G_0 - Lam_0         at k = 0
                    -(dt/2) (G_{k-1} + G_k)      interior
                    -(dt/2) G_{N-1}              at k = N

    d S / d Lam_k : (rho_1 - rho_0)/2 + (i dt/2) B_0                  at k = 0
                    (rho_{k+1} - rho_{k-1})/2 + (i dt/2)(B_{k-1}+B_k) interior
                    -ρ̄_{N-1} + (i dt/2) B_{N-1}                       at k = N
    B_k = L(ρ̄_k at t̄_k)

where the Lam gradient uses the pairing tr(L*(X) Y) = tr(X L(Y)). On a
solution pair the interior gradients divided by dt approximate the continuum
integrands and shrink as O(dt²); the boundary nodes reduce to -Lam(t_i) and
-rho(t_f) (the initial-node Lam term cancels against the explicit boundary
term of S, to the same O(dt²) accuracy in the density sense).

This midpoint pairing also makes the Lagrange-multiplier shift identity
exact at the discrete level: shifting Lam_k by (suffix midpoint quadrature
of a scalar rate lambda) times the identity changes S_disc by exactly the
same quadrature applied to lambda(t) (tr rho(t) - tr rho(t_0)), up to
roundoff, while leaving Lam at the final node untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import TimeGrid, Trajectory, integrate_invariant, integrate_state
from .model import LindbladModel, Schedule
from .superop import apply_adjoint, apply_liouvillian

# Tolerance on the (discarded) imaginary part of the action value.
ACTION_IMAG_RTOL = 1e-10

__all__ = [
    "DiscretizedPath",
    "ActionReport",
    "evaluate_action",
    "grad_rho",
    "grad_lam",
    "stationarity_check",
    "auxiliary_trajectory",
    "gauge_shift_check",
]


@dataclass(frozen=True)
class DiscretizedPath:
    """Paired (rho, Lam) node values on a grid.

    Both lists must hold Hermitian operators of equal dimension, one per
    node. The state nodes of a solution path keep a constant trace, but that
    is not enforced here: the gauge-shift check deliberately evaluates the
    action on synthetic non-normalized paths.
    """

    grid: TimeGrid
    rho: list
    lam: list

    def __post_init__(self):
        n_nodes = self.grid.n_steps + 1
        if len(self.rho) != n_nodes or len(self.lam) != n_nodes:
            raise ValueError(
                f"path needs {n_nodes} nodes, got {len(self.rho)} rho / {len(self.lam)} lam"
            )
        shape = self.rho[0].shape
        for label, ops in (("rho", self.rho), ("lam", self.lam)):
            for k, op in enumerate(ops):
                if op.shape != shape:
                    raise ValueError(f"{label}[{k}]: dimension mismatch")
                linalg.require_hermitian(op, rtol=1e-10, what=f"{label}[{k}]")

    @property
    def dim(self) -> int:
        return self.rho[0].shape[0]


@dataclass(frozen=True)
class ActionReport:
    """Action value and stationarity diagnostics.

    Gradient residuals are interior node gradients divided by dt (the
    functional-derivative density), so they shrink as O(dt²) on solution
    pairs. Boundary terms measure the pairing defects
    ||grad_rho[0] + Lam(t_0)|| and ||grad_lam[N] + rho(t_N)||.
    """

    action_value: float
    grad_rho_residual: float
    grad_lam_residual: float
    boundary_rho_term: float
    boundary_lam_term: float
    grid: TimeGrid

    def to_dict(self) -> dict:
        return {
            "action": self.action_value,
            "grad_rho_residual": self.grad_rho_residual,
            "grad_lam_residual": self.grad_lam_residual,
            "boundary_rho": self.boundary_rho_term,
            "boundary_lam": self.boundary_lam_term,
            "grid": self.grid.to_dict(),
        }


def _cell_snapshots(path: DiscretizedPath, model: LindbladModel):
    return [model.snapshot(path.grid.midpoint(k)) for k in range(path.grid.n_steps)]


def _cell_generators(path: DiscretizedPath, snaps) -> list:
    """G_k = (Lam_{k+1} - Lam_k)/dt - i L*(Λ̄_k) per cell."""
    dt = path.grid.dt
    lam = path.lam
    return [
        (lam[k + 1] - lam[k]) / dt
        - 1j * apply_adjoint(snaps[k], 0.5 * (lam[k] + lam[k + 1]))
        for k in range(path.grid.n_steps)
    ]


def evaluate_action(path: DiscretizedPath, model: LindbladModel) -> float:
    """S_disc for the path; raises if the imaginary residue is not roundoff."""
    snaps = _cell_snapshots(path, model)
    gens = _cell_generators(path, snaps)
    rho = path.rho
    s = 0.0 + 0.0j
    dt = path.grid.dt
    for k, g in enumerate(gens):
        rho_mid = 0.5 * (rho[k] + rho[k + 1])
        s -= dt * np.einsum("jk,kj->", g, rho_mid)
    s -= np.einsum("jk,kj->", path.lam[0], rho[0])
    if abs(s.imag) > ACTION_IMAG_RTOL * (1.0 + abs(s.real)):
        raise ValueError(
            f"action has imaginary part {s.imag:.3e}; non-Hermitian path or model defect"
        )
    return float(s.real)


def grad_rho(path: DiscretizedPath, model: LindbladModel) -> list:
    """Exact node gradients of S_disc with respect to the rho nodes."""
    snaps = _cell_snapshots(path, model)
    gens = _cell_generators(path, snaps)
    dt = path.grid.dt
    n = path.grid.n_steps
    grads = [-(0.5 * dt) * gens[0] - path.lam[0]]
    for k in range(1, n):
        grads.append(-(0.5 * dt) * (gens[k - 1] + gens[k]))
    grads.append(-(0.5 * dt) * gens[n - 1])
    return grads


def grad_lam(path: DiscretizedPath, model: LindbladModel) -> list:
    """Exact node gradients of S_disc with respect to the Lam nodes."""
    snaps = _cell_snapshots(path, model)
    rho = path.rho
    dt = path.grid.dt
    n = path.grid.n_steps
    b = [
        apply_liouvillian(snaps[k], 0.5 * (rho[k] + rho[k + 1]))
        for k in range(n)
    ]
    grads = [0.5 * (rho[1] - rho[0]) + (0.5j * dt) * b[0]]
    for k in range(1, n):
        grads.append(0.5 * (rho[k + 1] - rho[k - 1]) + (0.5j * dt) * (b[k - 1] + b[k]))
    grads.append(-0.5 * (rho[n] + rho[n - 1]) + (0.5j * dt) * b[n - 1])
    return grads


def _interior_residual(grads, dt: float) -> float:
    if len(grads) <= 2:
        return 0.0
    return max(linalg.maxabs(g) for g in grads[1:-1]) / dt


def auxiliary_trajectory(
    model: LindbladModel, lam_final, grid: TimeGrid, method: str = "rk4"
) -> Trajectory:
    """Auxiliary-operator path of the stationary action: the equation of
    motion obtained by varying rho is exactly the weak-invariant flow, so
    this backward propagation shares the invariant integrator."""
    return integrate_invariant(model, lam_final, "end", grid, method)


def stationarity_check(
    model: LindbladModel,
    rho0,
    lam_final,
    grid: TimeGrid,
    method: str = "rk4",
) -> ActionReport:
    """Integrate rho forward and Lam backward, then report how stationary the
    discrete action is on the pair."""
    state, _ = integrate_state(model, rho0, grid, method)
    lam = auxiliary_trajectory(model, lam_final, grid, method)
    path = DiscretizedPath(grid=grid, rho=state.samples, lam=lam.samples)
    action = evaluate_action(path, model)
    gr = grad_rho(path, model)
    gl = grad_lam(path, model)
    return ActionReport(
        action_value=action,
        grad_rho_residual=_interior_residual(gr, grid.dt),
        grad_lam_residual=_interior_residual(gl, grid.dt),
        boundary_rho_term=linalg.maxabs(gr[0] + path.lam[0]),
        boundary_lam_term=linalg.maxabs(gl[-1] + path.rho[-1]),
        grid=grid,
    )


def gauge_shift_check(
    path: DiscretizedPath, model: LindbladModel, lambda_schedule: Schedule
) -> float:
    """Lagrange-multiplier identity defect for a scalar rate schedule.

    Shifts Lam_k by phi_k * identity with phi_k the suffix midpoint
    quadrature of lambda (phi at the final node is exactly zero, so the
    final condition is untouched), re-evaluates the action, and compares the
    change against the same quadrature of lambda(t) (tr rho(t) - tr rho(t_0)).
    Returns the absolute difference, which is roundoff-level by construction.
    """
    if lambda_schedule.is_operator_valued:
        raise ValueError("gauge shift needs a scalar rate schedule")
    grid = path.grid
    n = grid.n_steps
    dt = grid.dt
    lam_mid = [float(lambda_schedule(grid.midpoint(k))) for k in range(n)]

    phi = [0.0] * (n + 1)
    for k in range(n - 1, -1, -1):
        phi[k] = phi[k + 1] + dt * lam_mid[k]

    eye = linalg.identity(path.dim)
    shifted = [path.lam[k] + phi[k] * eye for k in range(n + 1)]
    if not np.array_equal(shifted[n], path.lam[n]):
        raise AssertionError("gauge shift moved the final auxiliary node")
    shifted_path = DiscretizedPath(grid=grid, rho=path.rho, lam=shifted)

    delta_s = evaluate_action(shifted_path, model) - evaluate_action(path, model)

    trace0 = linalg.trace(path.rho[0]).real
    rhs = 0.0
    for k in range(n):
        tr_mid = 0.5 * (linalg.trace(path.rho[k]).real + linalg.trace(path.rho[k + 1]).real)
        rhs += dt * lam_mid[k] * (tr_mid - trace0)
    return abs(delta_s - rhs)
