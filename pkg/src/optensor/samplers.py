"""Random quantum objects for property tests and sweeps."""
from __future__ import annotations

import numpy as np


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(d_in: int, d_out: int, rng) -> np.ndarray:
    """``d_out x d_in`` matrix with orthonormal columns."""
    q, r = np.linalg.qr(_ginibre(rng, d_out, d_in))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rng, rank: int | None = None, trace: float = 1.0) -> np.ndarray:
    g = _ginibre(rng, d, rank or d)
    rho = g @ g.conj().T
    return trace * rho / np.trace(rho).real


def random_hermitian(d: int, rng) -> np.ndarray:
    g = _ginibre(rng, d, d)
    return (g + g.conj().T) / 2


def random_kraus(d_in: int, d_out: int, rng, n_kraus: int = 2,
                 scale: float = 1.0) -> np.ndarray:
    """Kraus operators of a random channel (trace preserving when ``scale == 1``).

    ``n_kraus`` is raised to ``ceil(d_in / d_out)`` when smaller, since no
    trace-preserving map has fewer.
    """
    n_kraus = max(n_kraus, -(-d_in // d_out))
    v = random_isometry(d_in, d_out * n_kraus, rng)
    return np.sqrt(scale) * v.reshape(n_kraus, d_out, d_in)


def random_instrument(d_in: int, d_out: int, n_outcomes: int, rng,
                      kraus_per_outcome: int = 1) -> list[np.ndarray]:
    """Kraus sets, one per outcome, jointly completing to a trace-preserving map.

    ``kraus_per_outcome`` is raised when the outcomes alone cannot carry enough
    Kraus operators for ``d_in > d_out``.
    """
    need = -(-d_in // d_out)
    kraus_per_outcome = max(kraus_per_outcome, -(-need // n_outcomes))
    ks = random_kraus(d_in, d_out, rng, n_outcomes * kraus_per_outcome)
    return [ks[i * kraus_per_outcome:(i + 1) * kraus_per_outcome] for i in range(n_outcomes)]


def random_povm(d: int, n: int, rng) -> list[np.ndarray]:
    ks = random_kraus(d, d, rng, n)
    return [k.conj().T @ k for k in ks]
