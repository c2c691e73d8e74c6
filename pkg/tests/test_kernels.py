import numpy as np
import pytest

from nordial import kernels


def random_problem(seed, n=40, n_features=12, density=0.4):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        nnz = max(1, rng.binomial(n_features, density))
        idx = np.sort(rng.choice(n_features, size=nnz, replace=False))
        vals = rng.random(nnz) + 0.1
        rows.append((idx.astype(np.int64), vals))
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, (idx, _) in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(idx)
    data = np.concatenate([v for _, v in rows])
    indices = np.concatenate([i for i, _ in rows])
    y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    orders = np.stack([rng.permutation(n) for _ in range(8)]).astype(np.int64)
    return data, indices, indptr, y, orders, n_features


def test_numpy_path_runs():
    data, indices, indptr, y, orders, nf = random_problem(0)
    w, b, obj = kernels.pegasos_numpy(data, indices, indptr, y, 0.5, orders, nf)
    assert w.shape == (nf,)
    assert np.all(np.isfinite(w)) and np.isfinite(b)
    assert np.all(np.isfinite(obj)) and len(obj) == 8


def test_numpy_path_deterministic():
    data, indices, indptr, y, orders, nf = random_problem(1)
    r1 = kernels.pegasos_numpy(data, indices, indptr, y, 0.5, orders, nf)
    r2 = kernels.pegasos_numpy(data, indices, indptr, y, 0.5, orders, nf)
    assert np.array_equal(r1[0], r2[0])
    assert r1[1] == r2[1]
    assert np.array_equal(r1[2], r2[2])


@pytest.mark.skipif(not kernels.USING_NUMBA, reason="numba path disabled or unavailable")
class TestNumbaPath:
    def test_jit_path_deterministic(self):
        data, indices, indptr, y, orders, nf = random_problem(2)
        r1 = kernels.pegasos_jit(data, indices, indptr, y, 0.5, orders, nf)
        r2 = kernels.pegasos_jit(data, indices, indptr, y, 0.5, orders, nf)
        assert np.array_equal(r1[0], r2[0])
        assert r1[1] == r2[1]

    def test_paths_agree(self):
        for seed in range(4):
            data, indices, indptr, y, orders, nf = random_problem(seed, n=60, n_features=20)
            wj, bj, oj = kernels.pegasos_jit(data, indices, indptr, y, 0.5, orders, nf)
            wn, bn, on = kernels.pegasos_numpy(data, indices, indptr, y, 0.5, orders, nf)
            np.testing.assert_allclose(wj, wn, rtol=1e-9, atol=1e-12)
            assert bj == pytest.approx(bn, rel=1e-9, abs=1e-12)
            np.testing.assert_allclose(oj, on, rtol=1e-9, atol=1e-12)

    def test_active_path_is_jitted(self):
        assert kernels.pegasos is kernels.pegasos_jit
        assert kernels.using_numba()


def test_env_flag_reflected():
    import os
    expected = os.environ.get("NORDIAL_NUMBA", "1").strip().lower() not in ("0", "false", "no")
    # numba is installed in this environment, so the flag alone decides
    assert kernels.USING_NUMBA == expected
