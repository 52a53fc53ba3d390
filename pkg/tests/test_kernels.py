"""The compiled and numpy kernels must agree; both are checked against dense references."""
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import inv, sqrtm

from opmetric import kernels
from opmetric.oracles import InstanceFactory

BACKENDS = kernels.available_backends()


def _stack(f, k, m, n, max_norm=0.95):
    return np.stack([f.ball_matrix(m, n, max_norm) for _ in range(k)])


def _dense_transport_norm(x, y):
    m, n = x.shape
    left = inv(sqrtm(np.eye(m) - x @ x.conj().T))
    right = sqrtm(np.eye(n) - x.conj().T @ x)
    mx = left @ (y - x) @ inv(np.eye(n) - x.conj().T @ y) @ right
    return np.linalg.norm(mx, 2)


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in BACKENDS


@pytest.mark.parametrize("backend", sorted(BACKENDS))
@pytest.mark.parametrize("m,n", [(1, 1), (3, 2), (8, 3), (2, 3)])
def test_kob_norm_pairs_matches_dense(backend, m, n):
    f = InstanceFactory(m * 10 + n)
    x, y = _stack(f, 5, m, n), _stack(f, 5, m, n)
    ref = [_dense_transport_norm(a, b) for a, b in zip(x, y)]
    np.testing.assert_allclose(BACKENDS[backend].kob_norm_pairs(x, y), ref, atol=1e-12)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_kob_norm_cross_matches_pairs(backend):
    f = InstanceFactory(7)
    x, y = _stack(f, 4, 5, 2), _stack(f, 3, 5, 2)
    k = BACKENDS[backend]
    cross = k.kob_norm_cross(x, y)
    assert cross.shape == (4, 3)
    for i in range(4):
        np.testing.assert_allclose(cross[i], k.kob_norm_pairs(np.repeat(x[i:i + 1], 3, 0), y), atol=1e-14)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_hat_batch_matches_dense(backend):
    f = InstanceFactory(11)
    t = np.stack([f.gaussian(2, 6) * 3 for _ in range(4)])
    ref = [inv(sqrtm(np.eye(6) + a.conj().T @ a)) @ a.conj().T for a in t]
    np.testing.assert_allclose(BACKENDS[backend].hat_batch(t), ref, atol=1e-12)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
@pytest.mark.parametrize("m,n", [(1, 1), (4, 3), (2, 3)])
def test_eta_batch_matches_dense(backend, m, n):
    f = InstanceFactory(100 + m + n)
    a, z = _stack(f, 4, m, n, 0.9), _stack(f, 4, m, n)
    ref = [
        inv(sqrtm(np.eye(m) - p @ p.conj().T)) @ (w + p) @ inv(np.eye(n) + p.conj().T @ w)
        @ sqrtm(np.eye(n) - p.conj().T @ p)
        for p, w in zip(a, z)
    ]
    np.testing.assert_allclose(BACKENDS[backend].eta_batch(a, z), ref, atol=1e-12)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_empty_stacks(backend):
    k = BACKENDS[backend]
    e = np.zeros((0, 3, 2), dtype=complex)
    assert k.kob_norm_pairs(e, e).shape == (0,)
    assert k.kob_norm_cross(e, e).shape == (0, 0)
    assert k.hat_batch(np.zeros((0, 2, 3), dtype=complex)).shape == (0, 3, 2)
    assert k.eta_batch(e, e).shape == (0, 3, 2)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    f = InstanceFactory(5)
    x, y = _stack(f, 30, 7, 3), _stack(f, 30, 7, 3)
    c, p = BACKENDS["cython"], BACKENDS["python"]
    np.testing.assert_allclose(c.kob_norm_cross(x, y), p.kob_norm_cross(x, y), atol=1e-13)
    np.testing.assert_allclose(c.eta_batch(x, y), p.eta_batch(x, y), atol=1e-13)


def test_pure_python_fallback_end_to_end():
    env = dict(os.environ, OPMETRIC_PURE_PYTHON="1")
    code = "import opmetric, sys; print(opmetric.BACKEND); sys.exit(0)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    out = subprocess.run(
        [sys.executable, "-m", "opmetric", "check", "--suite", "all", "--samples", "3", "--seed", "5"],
        env=env,
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0, out.stderr
