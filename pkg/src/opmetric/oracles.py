"""Independent ground truth for tests and the ``check`` suite.

Nothing here calls the distance code in :mod:`opmetric.ball` or
:mod:`opmetric.chk`; the scalar and diagonal oracles work entrywise with
the disc formula, and the random factory does its own bounded transform.

Random streams use numpy's ``PCG64`` bit generator (64-bit, algorithm id
``"PCG64"``) seeded directly with the integer seed, so corpora are
reproducible across runs and platforms.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .chk import ClosedOperator
from .errors import LengthMismatch

PRNG_ALGORITHM = "PCG64"


def _disc(a: complex, b: complex) -> float:
    return math.atanh(abs(a - b) / abs(1 - a.conjugate() * b))


def _scalar_hat(t: complex) -> complex:
    t = complex(t)
    return t.conjugate() / math.sqrt(1.0 + abs(t) ** 2)


def scalar_distance(t: complex, s: complex) -> float:
    """Distance between 1 x 1 operators, via the disc metric of their hats."""
    return _disc(_scalar_hat(t), _scalar_hat(s))


def diagonal_distance(t_diag: Sequence[complex], s_diag: Sequence[complex]) -> float:
    """Distance between ``diag(t)`` and ``diag(s)``: the largest entrywise disc distance."""
    if len(t_diag) != len(s_diag):
        raise LengthMismatch(f"diagonals of length {len(t_diag)} and {len(s_diag)}")
    if len(t_diag) == 0:
        raise LengthMismatch("empty diagonals")
    return max(scalar_distance(a, b) for a, b in zip(t_diag, s_diag))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _adj(a):
    return a.conj().T


def _herm_power(p: np.ndarray, power: float) -> np.ndarray:
    lam, w = np.linalg.eigh(0.5 * (p + _adj(p)))
    return (w * lam**power) @ _adj(w)


def _hat(t: np.ndarray) -> np.ndarray:
    return _adj(t) @ _herm_power(np.eye(t.shape[0]) + t @ _adj(t), -0.5)


def _unhat(a: np.ndarray) -> np.ndarray:
    return _herm_power(np.eye(a.shape[1]) - _adj(a) @ a, -0.5) @ _adj(a)


class InstanceFactory:
    """Seeded source of random operators, ball points, unitaries and automorphism parameters.

    Operators come back as :class:`~opmetric.chk.ClosedOperator`; ball
    matrices and unitaries as raw arrays.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = make_rng(seed)

    def gaussian(self, rows: int, cols: int) -> np.ndarray:
        g = self.rng.standard_normal((rows, cols, 2))
        return (g[..., 0] + 1j * g[..., 1]) / math.sqrt(2.0)

    def ball_matrix(self, m: int, n: int, max_norm: float = 0.95) -> np.ndarray:
        """``m x n`` matrix with norm uniform in ``(0, max_norm]``."""
        z = self.gaussian(m, n)
        r = max_norm * (1.0 - self.rng.random())
        return r * z / np.linalg.norm(z, 2)

    def operator(self, m: int, n: int, max_hat_norm: float = 0.95) -> ClosedOperator:
        """``n x m`` operator whose hat has norm uniform in ``(0, max_hat_norm]``."""
        if not 0.0 < max_hat_norm <= 0.95:
            raise ValueError("max_hat_norm must lie in (0, 0.95]")
        g = self.gaussian(n, m)
        h = _hat(g)
        r = max_hat_norm * (1.0 - self.rng.random())
        return ClosedOperator(_unhat(r * h / np.linalg.norm(h, 2)))

    def scalar(self, max_hat_norm: float = 0.95) -> complex:
        return complex(self.operator(1, 1, max_hat_norm).mat[0, 0])

    def diagonal(self, k: int, max_hat_norm: float = 0.95) -> np.ndarray:
        return np.array([self.scalar(max_hat_norm) for _ in range(k)])

    def unitary(self, k: int) -> np.ndarray:
        """Haar unitary from the QR decomposition of a Gaussian matrix."""
        q, r = np.linalg.qr(self.gaussian(k, k))
        d = np.diag(r)
        return q * (d / np.abs(d))

    def automorphism_params(self, m: int, n: int, max_norm: float = 0.9):
        return self.ball_matrix(m, n, max_norm), self.unitary(m), self.unitary(n)

    def dims(self, max_m: int = 8, max_n: int = 3) -> tuple[int, int]:
        return int(self.rng.integers(1, max_m + 1)), int(self.rng.integers(1, max_n + 1))


def random_operator(seed: int, m: int, n: int, max_hat_norm: float = 0.95) -> ClosedOperator:
    """Deterministic random ``n x m`` operator with hat norm at most ``max_hat_norm``."""
    return InstanceFactory(seed).operator(m, n, max_hat_norm)
