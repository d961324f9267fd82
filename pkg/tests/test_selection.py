import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsepce.selection import (
    CvSpec,
    DegenerateLeverageError,
    correction_factor,
    fold_assignment,
    kfold_cv,
    loo_ols,
    modified_loo,
    relmse,
)
from sparsepce.solvers import RegressionProblem, ols


def refit_loo(psi, y):
    """Oracle: N explicit refits."""
    N = len(y)
    res = np.empty(N)
    for i in range(N):
        keep = np.arange(N) != i
        c = np.linalg.lstsq(psi[keep], y[keep], rcond=None)[0]
        res[i] = y[i] - psi[i] @ c
    return np.mean(res**2) / np.var(y, ddof=1)


def test_intercept_only_loo():
    y = np.array([1.0, 4.0, 2.0, 7.0, 3.0])
    N = y.size
    expected = np.mean(((y - y.mean()) * N / (N - 1)) ** 2) / np.var(y, ddof=1)
    assert loo_ols(np.ones((N, 1)), y) == pytest.approx(expected, rel=1e-12)


def test_interpolation_is_degenerate():
    psi = np.random.default_rng(0).standard_normal((4, 4))
    with pytest.raises(DegenerateLeverageError):
        loo_ols(psi, np.ones(4))
    with pytest.raises(DegenerateLeverageError):
        correction_factor(4, 4, 1.0)


def test_loo_matches_refit_12x3():
    rng = np.random.default_rng(11)
    psi = rng.standard_normal((12, 3))
    y = rng.standard_normal(12)
    assert loo_ols(psi, y) == pytest.approx(refit_loo(psi, y), rel=1e-10)


@given(seed=st.integers(0, 2**31), n=st.integers(6, 20), pa=st.integers(1, 5))
def test_loo_oracle_and_modified_bound(seed, n, pa):
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal((n, pa))
    y = rng.standard_normal(n)
    loo = loo_ols(psi, y)
    assert loo == pytest.approx(refit_loo(psi, y), rel=1e-9)
    assert modified_loo(psi, y) >= loo


def test_correction_factor_orthonormal():
    N, Pa = 40, 4
    q, _ = np.linalg.qr(np.random.default_rng(2).standard_normal((N, Pa)))
    psi = np.sqrt(N) * q
    trace = np.trace(np.linalg.inv(psi.T @ psi))
    assert correction_factor(N, Pa, trace) == pytest.approx(N / (N - Pa) * (1 + Pa / N))
    assert correction_factor(10, 1, 0.1) > 1


def test_correction_factor_tends_to_one():
    rng = np.random.default_rng(3)
    prev = np.inf
    for N in (20, 200, 2000, 20000):
        psi = rng.uniform(-1, 1, (N, 3))
        T = correction_factor(N, 3, np.trace(np.linalg.inv(psi.T @ psi)))
        assert T < prev
        prev = T
    assert prev < 1.002


def _ols_fit(tr):
    return ols(tr)


def test_kfold_n_equals_loo():
    rng = np.random.default_rng(4)
    prob = RegressionProblem(rng.standard_normal((15, 3)), rng.standard_normal(15))
    a = kfold_cv(_ols_fit, prob, CvSpec.kfold(15))
    b = kfold_cv(_ols_fit, prob, CvSpec.loo())
    assert a == b
    assert a == pytest.approx(loo_ols(prob.psi, prob.y), rel=1e-10)


def test_constant_closure_cv_near_one():
    y = np.random.default_rng(5).standard_normal(400)
    prob = RegressionProblem(np.ones((400, 1)), y)
    err = kfold_cv(_ols_fit, prob, CvSpec.kfold(10))
    assert err == pytest.approx(1.0, abs=0.05)


def test_kfold_deterministic_and_validated():
    folds1 = fold_assignment(23, 4, 9)
    folds2 = fold_assignment(23, 4, 9)
    assert all(np.array_equal(a, b) for a, b in zip(folds1, folds2))
    assert sorted(np.concatenate(folds1)) == list(range(23))
    with pytest.raises(ValueError):
        fold_assignment(5, 6, 0)
    with pytest.raises(ValueError):
        CvSpec.kfold(1)


def test_relmse_examples():
    y = np.array([1.0, 2.0, 3.0])
    assert relmse(y, y) == 0.0
    assert relmse(y, np.full(3, y.mean())) == pytest.approx(1.0)
    assert relmse(y, [1.0, 2.0, 4.0]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        relmse([2.0, 2.0], [1.0, 3.0])


@given(a=st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-3), b=st.floats(-1e3, 1e3))
def test_relmse_affine_invariant(a, b):
    rng = np.random.default_rng(6)
    y = rng.standard_normal(50)
    yh = y + 0.1 * rng.standard_normal(50)
    assert relmse(a * y + b, a * yh + b) == pytest.approx(relmse(y, yh), rel=1e-8)
