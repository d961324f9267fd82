import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsepce.basis import (
    MultiIndexSet,
    TruncationSpec,
    assemble,
    empirical_coherence,
    enumerate_truncation,
    tight_bound,
    univariate_eval,
    univariate_table,
)


def test_univariate_examples():
    assert univariate_eval("legendre", 0, 0.37) == 1.0
    assert univariate_eval("legendre", 1, 1.0) == pytest.approx(math.sqrt(3), abs=1e-12)
    assert univariate_eval("hermite", 2, 0.0) == pytest.approx(-1 / math.sqrt(2), abs=1e-12)
    with pytest.raises(ValueError):
        univariate_table("chebyshev", 2, 0.0)


@pytest.mark.parametrize("family", ["legendre", "hermite"])
def test_orthonormality_quadrature(family):
    if family == "legendre":
        x, w = np.polynomial.legendre.leggauss(30)
        w = w / 2.0
    else:
        x, w = np.polynomial.hermite_e.hermegauss(30)
        w = w / math.sqrt(2 * math.pi)
    T = univariate_table(family, 10, x)
    G = T.T @ (w[:, None] * T)
    np.testing.assert_allclose(G, np.eye(11), atol=1e-10)


def test_high_degree_recurrence_stable():
    x, w = np.polynomial.legendre.leggauss(40)
    T = univariate_table("legendre", 30, x)
    np.testing.assert_allclose(T.T @ (w[:, None] / 2 * T), np.eye(31), atol=1e-9)


def test_truncation_examples():
    s = enumerate_truncation(2, TruncationSpec(2, 1.0))
    assert [tuple(a) for a in s.alphas] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    s = enumerate_truncation(2, TruncationSpec(2, 0.5))
    assert len(s) == 5 and (1, 1) not in s
    assert len(enumerate_truncation(3, TruncationSpec(14, 1.0))) == 680


def test_interaction_order():
    s = enumerate_truncation(3, TruncationSpec(3, 1.0, r=1))
    assert np.all((s.alphas > 0).sum(axis=1) <= 1)
    assert len(s) == 1 + 3 * 3


def _brute(d, spec):
    return {a for a in itertools.product(range(spec.p + 1), repeat=d) if spec.admits(a)}


@given(d=st.integers(1, 8), p=st.integers(0, 8))
def test_total_degree_cardinality(d, p):
    assert len(enumerate_truncation(d, TruncationSpec(p, 1.0))) == math.comb(d + p, p)


@given(d=st.integers(1, 3), p=st.integers(0, 6), q=st.floats(0.2, 1.0))
def test_enumeration_matches_brute_force(d, p, q):
    spec = TruncationSpec(p, q)
    assert enumerate_truncation(d, spec).as_set() == _brute(d, spec)


@given(d=st.integers(1, 4), p=st.integers(0, 6), q1=st.floats(0.2, 1.0), q2=st.floats(0.2, 1.0))
def test_truncation_monotone(d, p, q1, q2):
    lo, hi = sorted((q1, q2))
    a = enumerate_truncation(d, TruncationSpec(p, lo)).as_set()
    assert a <= enumerate_truncation(d, TruncationSpec(p, hi)).as_set()
    assert a <= enumerate_truncation(d, TruncationSpec(p + 1, lo)).as_set()


def test_graded_order():
    s = enumerate_truncation(3, TruncationSpec(4, 0.7))
    deg = s.total_degrees()
    assert np.all(np.diff(deg) >= 0)


def test_multiindex_validation_and_json():
    with pytest.raises(ValueError):
        MultiIndexSet([[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        MultiIndexSet([[0, -1]])
    s = enumerate_truncation(3, TruncationSpec(3))
    assert np.array_equal(MultiIndexSet.from_json(s.to_json()).alphas, s.alphas)


def test_assemble_examples():
    s = enumerate_truncation(2, TruncationSpec(1))
    np.testing.assert_allclose(assemble(["legendre"] * 2, s, [[0.0, 0.0]]), [[1, 0, 0]])
    u = np.random.default_rng(0).uniform(-1, 1, (7, 2))
    assert np.all(assemble(["legendre"] * 2, s, u)[:, 0] == 1)
    with pytest.raises(ValueError):
        assemble(["legendre"] * 2, s, np.zeros((3, 3)))


def test_monte_carlo_gram():
    s = enumerate_truncation(2, TruncationSpec(3))
    rng = np.random.default_rng(1)
    u = rng.uniform(-1, 1, (100_000, 2))
    psi = assemble(["legendre", "legendre"], s, u)
    np.testing.assert_allclose(psi.T @ psi / len(u), np.eye(len(s)), atol=0.05)


@given(seed=st.integers(0, 10_000), n=st.integers(1, 20))
def test_assemble_permutation_equivariant(seed, n):
    rng = np.random.default_rng(seed)
    s = enumerate_truncation(3, TruncationSpec(3, 0.8))
    u = rng.uniform(-1, 1, (n, 3))
    perm = rng.permutation(n)
    fams = ["legendre", "hermite", "legendre"]
    np.testing.assert_array_equal(assemble(fams, s, u[perm]), assemble(fams, s, u)[perm])


def test_bound_and_coherence_examples():
    zero = MultiIndexSet([[0]])
    u = np.linspace(-1, 1, 11)[:, None]
    np.testing.assert_array_equal(tight_bound(["legendre"], zero, u), 1.0)
    assert empirical_coherence(["legendre"], zero, u) == 1.0
    one = enumerate_truncation(1, TruncationSpec(1))
    assert tight_bound(["legendre"], one, [[1.0]])[0] == pytest.approx(math.sqrt(3))
    assert empirical_coherence(["legendre"], one, [[0.0], [1.0]]) == pytest.approx(3.0)
    big = enumerate_truncation(2, TruncationSpec(5))
    v = np.random.default_rng(3).standard_normal((50, 2))
    assert np.all(tight_bound(["hermite"] * 2, big, v) >= 1.0)
