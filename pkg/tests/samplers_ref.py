"""Random quantum objects for the oracles, drawn without the package's samplers."""
from __future__ import annotations

import numpy as np
import scipy.linalg


def density(d: int, rng) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def kraus(d: int, rng, n: int = 2, scale: float = 1.0) -> list[np.ndarray]:
    """``n`` Kraus operators of a channel scaled by ``scale`` (trace preserving at 1)."""
    g = rng.normal(size=(n * d, d)) + 1j * rng.normal(size=(n * d, d))
    q, _ = np.linalg.qr(g)
    return [np.sqrt(scale) * q[i * d:(i + 1) * d] for i in range(n)]


def unitary(d: int, rng) -> np.ndarray:
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scipy.linalg.expm(1j * (h + h.conj().T) / 2)


def povm_element(d: int, rng) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    e = g @ g.conj().T
    return e / (np.linalg.eigvalsh(e)[-1] * rng.uniform(1.0, 2.0))
