import math

import numpy as np
import pytest

from tensorwick.graphs import (
    disjoint_union,
    new_dipole,
    random_colored_graph,
)
from tensorwick.numeric import (
    TensorData,
    evaluate_trace_invariant,
    mc_moment,
    orthogonal_invariance_check,
    sample_gaussian_tensor,
)
from tensorwick.partitions import cumulants_from_moments
from tensorwick.wick import cumulant_poly, expectation_poly

from helpers import naive_trace, random_connected_graph, spec_quartic_melon, two_color_cycle


def test_sampling_deterministic_and_shaped():
    a = sample_gaussian_tensor(3, 4, 2, seed=5)
    b = sample_gaussian_tensor(3, 4, 2, seed=5)
    assert a.entries.shape == (3, 3, 3, 3)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, sample_gaussian_tensor(3, 4, 2, seed=6).entries)
    with pytest.raises(ValueError):
        sample_gaussian_tensor(0, 3, 2, seed=1)


def test_sampling_variance_and_independence():
    # variance of entries must be N**-nu = 1/16; distinct entries uncorrelated
    N, D, nu, count = 4, 3, 2, 25_000
    flat = np.stack(
        [sample_gaussian_tensor(N, D, nu, seed).entries.ravel() for seed in range(count)]
    )
    sigma2 = 1 / 16
    var = flat.var()
    se_var = sigma2 * math.sqrt(2 / (flat.size - 1))
    assert abs(var - sigma2) < 5 * se_var
    assert abs(flat.mean()) < 5 * math.sqrt(sigma2 / flat.size)
    cov = (flat[:, 3] * flat[:, 40]).mean()
    assert abs(cov) < 5 * sigma2 / math.sqrt(count)


def test_dipole_trace_is_squared_norm():
    for seed in range(5):
        T = sample_gaussian_tensor(3, 3, 2, seed)
        got = evaluate_trace_invariant(new_dipole(3), T)
        assert got == pytest.approx(float((T.entries**2).sum()), rel=1e-13)
        assert got >= 0.0


def test_trace_multiplicative_over_components():
    g1 = spec_quartic_melon()
    g2 = random_connected_graph(3, 3, seed=2)
    T = sample_gaussian_tensor(2, 3, 1, seed=3)
    lhs = evaluate_trace_invariant(disjoint_union(g1, g2), T)
    rhs = evaluate_trace_invariant(g1, T) * evaluate_trace_invariant(g2, T)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_trace_against_naive_index_sum():
    cases = [
        (spec_quartic_melon(), 4),
        (random_colored_graph(3, 2, seed=7), 5),
        (random_colored_graph(2, 3, seed=8), 6),
    ]
    for g, seed in cases:
        T = sample_gaussian_tensor(2, g.D, 0, seed)
        fast = evaluate_trace_invariant(g, T)
        slow = naive_trace(g, T.entries)
        assert fast == pytest.approx(slow, rel=1e-12)


def test_trace_order_mismatch():
    T = sample_gaussian_tensor(2, 2, 1, seed=0)
    with pytest.raises(ValueError):
        evaluate_trace_invariant(new_dipole(3), T)


def test_orthogonal_invariance():
    assert orthogonal_invariance_check(new_dipole(3), 3, seed=0) < 1e-9
    assert orthogonal_invariance_check(spec_quartic_melon(), 3, seed=1) < 1e-9
    for seed in range(4):
        g = random_connected_graph(3, 3, seed)
        assert orthogonal_invariance_check(g, 3, seed=seed) < 1e-9


def test_identity_rotation_changes_nothing():
    g = spec_quartic_melon()
    T = sample_gaussian_tensor(3, 3, 2, seed=4)
    rotated = T.entries
    for axis in range(3):
        rotated = np.moveaxis(
            np.tensordot(np.eye(3), rotated, axes=(1, axis)), 0, axis
        )
    before = evaluate_trace_invariant(g, T)
    after = evaluate_trace_invariant(g, TensorData(3, 3, rotated))
    assert before == after  # exactly, multiplication by 1.0 is lossless


def _within_5se(est, exact):
    return abs(est.mean - exact) <= 5 * est.standard_error


def test_mc_moment_matches_exact_polynomials():
    samples = 200_000
    dipole = new_dipole(3)
    melon = spec_quartic_melon()
    cycle = two_color_cycle(2)
    cases = [
        (dipole, 2, 2, 1),
        (dipole, 3, 2, 2),
        (melon, 2, 2, 3),
        (melon, 3, 2, 4),
        (cycle, 2, 1, 5),
        (cycle, 3, 1, 6),
    ]
    for g, N, nu, seed in cases:
        est = mc_moment([g], N, nu, samples, seed)
        exact = float(expectation_poly(g, nu=nu).evaluate(N))
        assert _within_5se(est, exact), (g, N, est.mean, exact)
        assert est.sample_count == samples


def test_mc_joint_moment():
    melon = spec_quartic_melon()
    est = mc_moment([melon, melon], 2, 2, 200_000, seed=21)
    exact = float(
        expectation_poly(disjoint_union(melon, melon), nu=2).evaluate(2)
    )
    assert _within_5se(est, exact)


def test_mc_cumulant_via_mobius():
    # common random numbers: the same seed drives all three estimates
    d = new_dipole(3)
    dd = disjoint_union(d, d)
    samples, seed = 400_000, 31
    m1 = mc_moment([d], 2, 2, samples, seed)
    m12 = mc_moment([d, d], 2, 2, samples, seed)
    cums = cumulants_from_moments({0b01: m1.mean, 0b10: m1.mean, 0b11: m12.mean})
    exact = float(cumulant_poly(dd, nu=2).evaluate(2))
    tol = 5 * (m12.standard_error + 2 * abs(m1.mean) * m1.standard_error)
    assert abs(cums[0b11] - exact) <= tol


def test_mc_moment_deterministic():
    g = spec_quartic_melon()
    a = mc_moment([g], 2, 2, 50_000, seed=9)
    b = mc_moment([g], 2, 2, 50_000, seed=9)
    assert a == b
    assert a != mc_moment([g], 2, 2, 50_000, seed=10)


def test_mc_moment_validation():
    with pytest.raises(ValueError):
        mc_moment([], 2, 2, 100, seed=0)
    with pytest.raises(ValueError):
        mc_moment([new_dipole(2), new_dipole(3)], 2, 2, 100, seed=0)
    with pytest.raises(ValueError):
        mc_moment([new_dipole(3)], 2, 2, 1, seed=0)
