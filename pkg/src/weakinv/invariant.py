"""Analysis of invariant trajectories.

A weak invariant conserves its expectation value along the state trajectory
while its spectrum may move; a strong invariant keeps its spectrum fixed
(the unitary limit). ``analyze`` quantifies both: the worst expectation
drift and the per-eigenvalue total variation, with a threshold-based
weak/strong-like classification.

Eigenvalue curves are matched by sorted index, not by continuity tracking;
sorted-index total variation lower-bounds any matched variation, which is
all the dichotomy needs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dynamics import INVARIANT, TimeGrid, Trajectory, conservation_series, integrate_invariant
from .errors import NotHermitianError
from .model import LindbladModel

# Classification threshold, relative to maxabs of the seed sample.
STRONG_THRESHOLD = 1e-6

__all__ = [
    "SpectrumSeries",
    "InvariantReport",
    "spectrum_series",
    "analyze",
    "shift_check",
    "write_spectrum_csv",
    "write_expectation_csv",
]


@dataclass(frozen=True)
class SpectrumSeries:
    grid: TimeGrid
    eigenvalues: np.ndarray  # (n_nodes, dim), each row ascending
    total_variation: np.ndarray  # (dim,), per sorted eigenvalue index


@dataclass(frozen=True)
class InvariantReport:
    max_expectation_drift: float
    spectrum_total_variation: np.ndarray
    classification: str  # "strong-like" | "weak"

    def to_dict(self) -> dict:
        return {
            "max_expectation_drift": self.max_expectation_drift,
            "spectrum_total_variation": [float(v) for v in self.spectrum_total_variation],
            "classification": self.classification,
        }


def spectrum_series(inv: Trajectory) -> SpectrumSeries:
    """Sorted eigenvalues per node plus per-index total variation."""
    if inv.kind != INVARIANT:
        raise ValueError("expected an invariant trajectory")
    rows = []
    for k, s in enumerate(inv.samples):
        try:
            rows.append(linalg.hermitian_eigenvalues(s))
        except NotHermitianError as e:
            raise NotHermitianError(f"node {k}: {e}") from None
    eig = np.vstack(rows)
    tv = np.sum(np.abs(np.diff(eig, axis=0)), axis=0)
    return SpectrumSeries(grid=inv.grid, eigenvalues=eig, total_variation=tv)


def analyze(
    inv: Trajectory,
    state: Trajectory,
    strong_threshold: float = STRONG_THRESHOLD,
) -> InvariantReport:
    """Conservation drift plus spectrum variation, with classification.

    ``strong_threshold`` is relative to maxabs of the invariant's seed
    sample: trajectories whose largest per-eigenvalue total variation stays
    below it classify "strong-like", everything else "weak".
    """
    series = conservation_series(inv, state)
    drift = float(np.max(np.abs(series - series[0])))
    spec = spectrum_series(inv)
    scale = linalg.maxabs(inv.samples[0])
    strong = float(np.max(spec.total_variation)) <= strong_threshold * scale
    return InvariantReport(
        max_expectation_drift=drift,
        spectrum_total_variation=spec.total_variation,
        classification="strong-like" if strong else "weak",
    )


def shift_check(model: LindbladModel, inv: Trajectory, c: float, method: str = "rk4") -> float:
    """Propagate the shifted seed I(t_0) + c*identity and measure the defect
    max_k ||I_shifted(t_k) - (I(t_k) + c*identity)||_max.

    The identity component of the flow is stationary (the adjoint generator
    annihilates the identity), so the defect is roundoff-level.
    """
    c = float(c)
    eye = linalg.identity(inv.dim)
    shifted_seed = inv.samples[0] + c * eye
    shifted = integrate_invariant(model, shifted_seed, "start", inv.grid, method)
    defect = 0.0
    for s_shift, s in zip(shifted.samples, inv.samples):
        defect = max(defect, linalg.maxabs(s_shift - (s + c * eye)))
    return defect


def write_spectrum_csv(series: SpectrumSeries, path) -> None:
    """CSV export: t, lambda_1 .. lambda_dim (ascending per node)."""
    dim = series.eigenvalues.shape[1]
    header = ["t"] + [f"lambda_{j + 1}" for j in range(dim)]
    nodes = series.grid.nodes()
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for t, row in zip(nodes, series.eigenvalues):
            f.write(",".join([f"{t:.17g}"] + [f"{v:.17g}" for v in row]) + "\n")


def write_expectation_csv(grid: TimeGrid, values, path) -> None:
    """CSV export of a conservation series: t, expectation."""
    nodes = grid.nodes()
    with open(path, "w") as f:
        f.write("t,expectation\n")
        for t, v in zip(nodes, values):
            f.write(f"{t:.17g},{v:.17g}\n")
