"""Shared constants and independent closed-form oracles for the test suite.

The oracles here are derived by hand from the scalar ODEs of the two qubit
models and from exact unitary conjugation; they never call the integrators
they are used to check.
"""

import math

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SMINUS = np.array([[0, 1], [0, 0]], dtype=complex)
PLUS_STATE = 0.5 * np.ones((2, 2), dtype=complex)  # |+><+|


def random_hermitian(rng, dim, amp=1.0):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (m + m.conj().T) / 2.0
    return amp * h / np.max(np.abs(h))


def random_density(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = m @ m.conj().T
    rho = rho / np.trace(rho).real
    return (rho + rho.conj().T) / 2.0


def amp_damp_state(t, omega, gamma, rho0):
    """Amplitude-damping qubit, H = omega*diag(0,1), channel (sigma_-, gamma).

    Scalar ODEs: p11' = -2 gamma p11, rho01' = (i omega - gamma) rho01.
    """
    p11 = rho0[1, 1] * math.exp(-2.0 * gamma * t)
    r01 = rho0[0, 1] * np.exp((1j * omega - gamma) * t)
    return np.array([[rho0[0, 0] + rho0[1, 1] - p11, r01], [np.conj(r01), p11]])


def amp_damp_invariant(t, gamma):
    """Weak invariant seeded at sigma_z: stays diagonal, diag(1, 1 - 2 e^{2 gamma t})."""
    return np.diag([1.0, 1.0 - 2.0 * math.exp(2.0 * gamma * t)]).astype(complex)


def dephasing_state(t, omega, gamma, rho0):
    """Dephasing qubit, H = (omega/2) sigma_z, channel (sigma_z, gamma).

    Populations frozen; rho01' = (-i omega - 4 gamma) rho01.
    """
    r01 = rho0[0, 1] * np.exp((-1j * omega - 4.0 * gamma) * t)
    return np.array([[rho0[0, 0], r01], [np.conj(r01), rho0[1, 1]]])


def unitary_conjugation(t, h_diag, op):
    """exp(-iHt) op exp(+iHt) for diagonal H (exact phases)."""
    phases = np.exp(-1j * np.asarray(h_diag) * t)
    return (phases[:, None] * op) * np.conj(phases)[None, :]
