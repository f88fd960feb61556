"""Dense complex operator algebra for small quantum systems.

Operators are plain square ``complex128`` numpy arrays (row-major). Every
function here is pure and never mutates its arguments, so operators can be
shared freely between threads once built.

Hermitian eigenvalues are computed with a cyclic Jacobi iteration using
complex plane rotations. That keeps the package dependency-free below numpy
array arithmetic and is entirely adequate for the dimensions targeted here
(Fock truncations of a few dozen levels at most). Rotations whose pivot is
already below the convergence threshold are skipped, which makes the solver
cheap on the near-diagonal matrices produced by the integrators.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NotHermitianError

# Tolerances are relative to maxabs of the input with an absolute floor.
HERMITICITY_RTOL = 1e-12
TOLERANCE_FLOOR = 1e-14

__all__ = [
    "as_operator",
    "identity",
    "maxabs",
    "dagger",
    "commutator",
    "trace",
    "hs_inner",
    "expectation",
    "hermitize",
    "hermiticity_defect",
    "require_hermitian",
    "hermitian_eigenvalues",
    "hermitian_basis",
    "parse_matrix_literal",
    "matrix_literal",
]


def as_operator(a) -> np.ndarray:
    """Coerce ``a`` to a square complex matrix, validating the shape."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"operator must be a square matrix, got shape {m.shape}")
    return m


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def maxabs(a) -> float:
    m = np.asarray(a)
    return float(np.max(np.abs(m))) if m.size else 0.0


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.asarray(a, dtype=complex)).T


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def commutator(a, b) -> np.ndarray:
    """``a @ b - b @ a``."""
    a = as_operator(a)
    b = as_operator(b)
    _same_dim(a, b)
    return a @ b - b @ a


def trace(a) -> complex:
    return complex(np.trace(as_operator(a)))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(a† b)``.

    Linear in ``b``, conjugate-linear in ``a``.
    """
    a = as_operator(a)
    b = as_operator(b)
    _same_dim(a, b)
    return complex(np.sum(np.conj(a) * b))


def expectation(a, rho) -> complex:
    """``tr(a rho)``; real up to roundoff when both arguments are Hermitian."""
    a = as_operator(a)
    rho = as_operator(rho)
    _same_dim(a, rho)
    return complex(np.einsum("jk,kj->", a, rho))


def hermitize(a) -> np.ndarray:
    """Hermitian part ``(a + a†) / 2``; exactly Hermitian in floating point."""
    a = as_operator(a)
    return (a + dagger(a)) / 2.0


def hermiticity_defect(a) -> float:
    """``max |a - a†|`` entrywise."""
    a = as_operator(a)
    return maxabs(a - dagger(a))


def require_hermitian(a, rtol: float = HERMITICITY_RTOL, what: str = "operator") -> np.ndarray:
    """Return the Hermitian part of ``a``, or raise if the defect is too large."""
    a = as_operator(a)
    defect = hermiticity_defect(a)
    tol = max(rtol * max(1.0, maxabs(a)), TOLERANCE_FLOOR)
    if defect > tol:
        raise NotHermitianError(
            f"{what} is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}"
        )
    return hermitize(a)


def _off_norm(m: np.ndarray) -> float:
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def hermitian_eigenvalues(a, *, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi sweeps.

    The input is symmetrized to ``(a + a†)/2`` first; a Hermiticity defect
    beyond ``rtol * max(1, maxabs)`` raises :class:`NotHermitianError` naming
    the defect norm. Sweeps run until the off-diagonal Frobenius norm drops
    below ``1e-13`` of its initial value (with an absolute floor), so the
    returned values carry an off-diagonal residual well under ``1e-11`` of
    the matrix scale.
    """
    m = require_hermitian(a, rtol=rtol, what="eigensolver input")
    n = m.shape[0]
    if n == 1:
        return np.array([m[0, 0].real])
    m = np.array(m, dtype=complex)
    off0 = _off_norm(m)
    target = max(1e-13 * off0, TOLERANCE_FLOOR * max(1.0, maxabs(m)))
    if off0 <= target:
        return np.sort(np.diag(m).real)
    # Pivots below `skip` leave the final off-norm under `target` even if
    # every remaining pair sits exactly at the threshold.
    skip = target / (2.0 * n)
    for _ in range(60):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                piv = m[p, q]
                apiv = abs(piv)
                if apiv <= skip:
                    continue
                rotated = True
                theta = (m[q, q].real - m[p, p].real) / (2.0 * apiv)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                phase = piv / apiv
                rot = np.array([[c, s * phase], [-s * phase.conjugate(), c]])
                idx = [p, q]
                m[idx, :] = rot.conj().T @ m[idx, :]
                m[:, idx] = m[:, idx] @ rot
        if _off_norm(m) <= target or not rotated:
            break
    else:
        raise RuntimeError(
            f"Jacobi iteration stalled: off-diagonal norm {_off_norm(m):.3e} "
            f"above target {target:.3e} after 60 sweeps"
        )
    return np.sort(np.diag(m).real)


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Basis of the dim² real vector space of Hermitian dim×dim matrices.

    Diagonal units, symmetric pairs, and antisymmetric (i-weighted) pairs;
    unnormalized.
    """
    basis = []
    for j in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    for j in range(dim):
        for k in range(j + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[j, k] = 1.0
            e[k, j] = 1.0
            basis.append(e)
            e = np.zeros((dim, dim), dtype=complex)
            e[j, k] = 1.0j
            e[k, j] = -1.0j
            basis.append(e)
    return basis


def parse_matrix_literal(obj) -> np.ndarray:
    """Parse the matrix literal format: a row-major list of ``[re, im]`` pairs.

    The dimension is inferred from the length, which must be a perfect square.
    """
    if not isinstance(obj, (list, tuple)):
        raise ValueError("matrix literal must be a list of [re, im] pairs")
    n2 = len(obj)
    dim = math.isqrt(n2)
    if dim * dim != n2 or dim < 1:
        raise ValueError(f"matrix literal length {n2} is not a perfect square")
    flat = np.empty(n2, dtype=complex)
    for i, entry in enumerate(obj):
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise ValueError(f"matrix literal entry {i} is not an [re, im] pair")
        re, im = entry
        if not (isinstance(re, (int, float)) and isinstance(im, (int, float))):
            raise ValueError(f"matrix literal entry {i} has non-numeric parts")
        flat[i] = complex(re, im)
    if not np.all(np.isfinite(flat)):
        raise ValueError("matrix literal contains non-finite values")
    return flat.reshape(dim, dim)


def matrix_literal(a) -> list[list[float]]:
    """Inverse of :func:`parse_matrix_literal` (row-major ``[re, im]`` pairs)."""
    m = as_operator(a)
    return [[float(v.real), float(v.imag)] for v in m.reshape(-1)]
