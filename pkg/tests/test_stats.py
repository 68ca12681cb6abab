import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from hypertest.hypercore import Hypergraph
from hypertest import motifs, stats
from hypertest.stats import (
    AllZeroDeltas,
    AlphaOutOfRange,
    DegenerateRate,
    DenseRegimeParams,
    InvalidOrder,
    MissingKappa,
    SparseRegimeParams,
    WeightNormViolation,
    ZeroDensity,
    combined_test,
    contiguity_constants,
    cycle_null_moments,
    cycle_test,
    dense_test,
    estimate_ab,
    lambda_m,
    normal_quantile,
    optimal_weights,
    regime_classify,
    select_kn,
    snr_kappa,
    suggest_overlap,
    theoretical_evt,
    trace_m0_power,
)


def sp(a, b, m, k):
    return SparseRegimeParams(a=a, b=b, m=m, k=k)


# ---------------------------------------------------------------------------
# closed forms


def test_snr_examples():
    assert snr_kappa(sp(4, 1, 2, 2)) == pytest.approx(0.9)
    assert snr_kappa(sp(3, 3, 2, 2)) == 0.0
    assert snr_kappa(sp(5, 1, 3, 2)) == pytest.approx(0.5)


def test_lambda_examples():
    assert lambda_m(sp(4, 1, 2, 2)) == pytest.approx(2.5)
    assert lambda_m(sp(5, 1, 3, 2)) == pytest.approx(2.0)
    for m, c in ((2, 3.0), (3, 3.0), (4, 1.5)):
        assert lambda_m(sp(c * math.factorial(m - 2), c * math.factorial(m - 2), m, 2)) == pytest.approx(c)


def test_cycle_moments():
    mu0, mu1 = cycle_null_moments(sp(4, 1, 2, 2), 4)
    assert mu0 == pytest.approx(4.8828125)
    assert mu1 == pytest.approx(5.515625)
    mu0e, mu1e = cycle_null_moments(sp(2, 2, 2, 2), 3)
    assert mu0e == mu1e
    assert cycle_null_moments(sp(2, 2, 2, 2), 2)[0] == pytest.approx(1.0)


def test_select_kn():
    assert select_kn(100, 10.0) == 5
    assert select_kn(26, 10.0) == 5  # attained in the mid-20s
    assert select_kn(3, 10.0) >= 2
    with pytest.raises(DegenerateRate):
        select_kn(100, 1.0)


def test_cycle_test_statistic_values():
    p = sp(4, 1, 2, 2)
    g = Hypergraph(30, [], uniform_size=2)
    rep = cycle_test(g, p, k_n=4, alpha=0.05)
    # empty graph: statistic -sqrt(mu0)
    assert rep.statistic == pytest.approx(-math.sqrt(4.8828125))
    assert rep.statistic == pytest.approx(-2.2097, abs=1e-4)
    assert rep.reject  # |stat| > 1.96


def test_cycle_test_at_null_mean():
    # construct X exactly mu0 via report arithmetic: statistic 0 -> no reject
    p = sp(2, 2, 2, 2)  # lambda = 2, k_n=2 -> mu0 = 1
    g = Hypergraph(4, [[0, 1], [1, 2], [2, 0]])  # one triangle = one 3-cycle
    rep = cycle_test(g, sp(2, 2, 2, 2), k_n=3, alpha=0.05)
    mu0 = 2 ** 3 / 6
    assert rep.statistic == pytest.approx((1 - mu0) / math.sqrt(mu0))


def test_cycle_test_null_rejection_rate():
    # single-probability model tuned to normalized rate 2 at m=3: the
    # two-sided rejection rate stays modest (Poisson-vs-normal slack)
    from hypertest.genmodel import sample_uniform_er

    rng = np.random.default_rng(404)
    n, d, reps = 400, 2.0, 1000
    params = sp(d, d, 3, 2)
    rejects = 0
    for _ in range(reps):
        g = sample_uniform_er(n, 3, d / n ** 2, rng)
        rejects += cycle_test(g, params, k_n=3, alpha=0.05).reject
    assert rejects / reps <= 0.10


def test_estimate_exact_inversion():
    # lambda_hat = 2.5 and X = mu_n1 invert to (a, b) = (4, 1)
    n = 101
    e = int(2.5 * (n - 1) / 2)
    rep = estimate_ab(e, 5.515625, n, 2, 2, 4)
    assert rep.lambda_hat == pytest.approx(2.5)
    assert rep.f_hat == pytest.approx(1.5)
    assert rep.a_hat == pytest.approx(4.0)
    assert rep.b_hat == pytest.approx(1.0)


def test_estimate_zero_signal():
    n = 101
    e = int(2.5 * (n - 1) / 2)
    x = 2.5 ** 4 / 8  # lambda^k / (2 k)
    rep = estimate_ab(e, x, n, 2, 2, 4)
    assert rep.f_hat == pytest.approx(0.0)
    assert rep.a_hat == pytest.approx(rep.b_hat) == pytest.approx(2.5)


def test_estimate_negative_radicand():
    rep = estimate_ab(edge_count=500, cycle_count=0, n=101, m=2, k=2, k_n=4)
    assert not rep.ok
    assert rep.f_hat is None and rep.a_hat is None and rep.b_hat is None
    assert rep.radicand < 0


def test_estimate_round_trip_grid():
    # feeding exact expectations returns (a, b) to 1e-10 relative error
    grid = [
        (m, k, a, b, kn)
        for m in (2, 3, 4)
        for k in (2, 3)
        for a, b in ((4.0, 1.0), (9.0, 1.0), (6.0, 2.0))
        for kn in (3, 5)
    ]
    n = 500
    for m, k, a, b, kn in grid:
        p = sp(a, b, m, k)
        lam = lambda_m(p)
        _, mu1 = cycle_null_moments(p, kn)
        # edge count with lambda_hat = lam exactly
        e_count = lam * math.factorial(m - 2) * math.comb(n, m) / n ** (m - 1)
        rep = estimate_ab(e_count, mu1, n, m, k, kn)
        assert rep.ok
        assert abs(rep.a_hat - a) <= 1e-10 * a
        assert abs(rep.b_hat - b) <= 1e-10 * b


def test_contiguity_constants():
    t1, t2 = contiguity_constants(3, 2)
    assert t1 == pytest.approx(1 / 6)
    assert t2 == pytest.approx(13 / 12)
    assert 1 / (t2 * (2 ** 2 - 1)) == pytest.approx(4 / 13)
    for k in (2, 3, 4, 7):
        assert contiguity_constants(3, k)[0] == pytest.approx(1 / (3 * k))
        assert contiguity_constants(4, k)[0] == pytest.approx(2 / (3 * k))
        assert contiguity_constants(5, k)[0] == pytest.approx(1 / k + 1 / (2 * k ** 3))
        assert contiguity_constants(6, k)[0] == pytest.approx(4 / (3 * k) + 1 / k ** 3)
        assert contiguity_constants(3, k)[0] < 1
        assert contiguity_constants(6, k)[0] < 1
    with pytest.raises(InvalidOrder):
        contiguity_constants(2, 2)


def test_trace_power():
    assert trace_m0_power(3, 2, 4, 1, 2) == pytest.approx(58)
    assert trace_m0_power(3, 2, 1, 1, 3) == pytest.approx((2 ** 2 * 1) ** 3)
    # j = 1 equals the direct matrix trace k (a + (k^(m-2)-1) b)
    for m in (2, 3, 4):
        for k in (2, 3):
            a, b = 5.0, 2.0
            direct = k * (a + (k ** (m - 2) - 1) * b)
            assert trace_m0_power(m, k, a, b, 1) == pytest.approx(direct)


def test_trace_power_matches_matrix():
    # explicit matrix power over a grid of shapes and rates
    for m in range(2, 7):
        for k in range(2, 6):
            for a, b in ((3.0, 1.0), (7.5, 2.5)):
                m0 = np.full((k, k), k ** (m - 2) * b)
                np.fill_diagonal(m0, a + (k ** (m - 2) - 1) * b)
                acc = np.eye(k)
                for j in range(1, 7):
                    acc = acc @ m0
                    assert trace_m0_power(m, k, a, b, j) == pytest.approx(
                        np.trace(acc), rel=1e-12
                    )


# ---------------------------------------------------------------------------
# dense-regime theory


def test_theoretical_null_is_flat():
    for m, l, k in ((2, 1, 2), (3, 1, 2), (4, 2, 3), (6, 3, 2)):
        p = DenseRegimeParams(a_n=5.0, b_n=5.0, m=m, k=k, l=l)
        ev = theoretical_evt(p, 60)
        assert ev.curvature == pytest.approx(0.0, abs=1e-18)
        assert ev.delta == pytest.approx(0.0, abs=1e-9)


def test_theoretical_l1_closed_form():
    # overlap 1: curvature reduces to (k-1)(a1-b1)^3 / k^(3(m-1))
    for m, k in ((2, 2), (3, 2), (3, 3), (4, 2)):
        n = 50
        p = DenseRegimeParams.from_probabilities(0.09, 0.04, n, m, k, 1)
        ev = theoretical_evt(p, n)
        expected = (k - 1) * (0.09 - 0.04) ** 3 / k ** (3 * (m - 1))
        assert ev.curvature == pytest.approx(expected, rel=1e-12)


def test_theoretical_positive_above_null():
    p = DenseRegimeParams.from_probabilities(0.08, 0.05, 40, 4, 2, 2)
    assert theoretical_evt(p, 40).curvature > 0


def test_theoretical_weight_scaling():
    # mean-weight powers scale each moment; null curvature stays zero
    p = DenseRegimeParams(a_n=4.0, b_n=4.0, m=3, k=2, l=1, mean_weight=0.8)
    ev = theoretical_evt(p, 30)
    base = 4.0 / 30 ** 2
    assert ev.e == pytest.approx(0.8 ** 3 * base)
    assert ev.v == pytest.approx(0.8 ** 4 * base ** 2)
    assert ev.t == pytest.approx(0.8 ** 3 * base ** 3)


def test_dense_test_zero_statistic_on_complete():
    g = Hypergraph(6, list(combinations(range(6), 3)))
    rep = dense_test(g, 1, density_correction=False)
    # complete hypergraph: t_hat = (v_hat / e_hat)^3 = 1; both forms vanish
    assert rep.statistic == pytest.approx(0.0)
    assert rep.statistic_prime == pytest.approx(0.0)
    assert rep.reject is False and rep.reject_prime is False


def test_dense_test_errors_and_notes():
    empty = Hypergraph(8, [], uniform_size=3)
    with pytest.raises(ZeroDensity):
        dense_test(empty, 1)
    # edges but no aligned triangles: prime form only
    g = Hypergraph(9, [[0, 1, 2], [3, 4, 5]])
    rep = dense_test(g, 1)
    assert rep.statistic is None and rep.reject is None
    assert math.isfinite(rep.statistic_prime)
    assert "undefined" in rep.note


def test_dense_test_matches_oracle_composition():
    g = Hypergraph(6, [[0, 1, 2], [2, 3, 4], [4, 5, 0], [0, 2, 4]])
    rep = dense_test(g, 1, density_correction=False)
    orc = motifs.tensor_sum_oracle(g, 1)
    scale = math.sqrt(math.comb(6, 6) * 2)
    prime = 2 * scale * (math.sqrt(orc.t_hat) - (orc.v_hat / orc.e_hat) ** 1.5)
    assert rep.statistic_prime == pytest.approx(prime, rel=1e-12)
    st_full = scale * (orc.t_hat - (orc.v_hat / orc.e_hat) ** 3) / math.sqrt(orc.t_hat)
    assert rep.statistic == pytest.approx(st_full, rel=1e-12)


def test_dense_test_m4_both_overlaps(rng):
    from hypertest.genmodel import sample_uniform_er

    g = sample_uniform_er(12, 4, 0.3, rng)
    for l in (1, 2):
        raw = dense_test(g, l, density_correction=False)
        rep = dense_test(g, l)
        orc = motifs.tensor_sum_oracle(g, l)
        scale = math.sqrt(math.comb(12, 3 * (4 - l)) * (4 - l))
        expected = 2 * scale * (
            math.sqrt(orc.t_hat) - (orc.v_hat / orc.e_hat) ** 1.5
        )
        assert raw.statistic_prime == pytest.approx(expected, rel=1e-12)
        # fallback correction divides by (1 - e_hat)^{3/2}
        assert rep.statistic_prime == pytest.approx(
            expected / (1 - orc.e_hat) ** 1.5, rel=1e-12
        )


def test_dense_test_relabel_invariance_m2(rng):
    # the classic graph case: statistics invariant under vertex relabeling
    from hypertest.genmodel import sample_uniform_er

    g = sample_uniform_er(12, 2, 0.4, rng)
    base = dense_test(g, 1)
    for _ in range(10):
        perm = list(rng.permutation(12))
        rep = dense_test(g.relabel(perm), 1)
        assert rep.statistic_prime == pytest.approx(base.statistic_prime, rel=1e-12)


def test_combined_test():
    g2 = Hypergraph(20, [[i, i + 1] for i in range(0, 18, 2)] + [[0, 5], [1, 7], [3, 9]])
    g3 = Hypergraph(20, [[0, 1, 2], [2, 3, 4], [4, 5, 0], [6, 7, 8]])
    r2 = dense_test(g2, 1)
    r3 = dense_test(g3, 1)
    comb_rep = combined_test([r2, r3])
    expected = (r2.statistic_prime + r3.statistic_prime) / math.sqrt(2)
    assert comb_rep.statistic == pytest.approx(expected, rel=1e-12)
    single = combined_test([r3], weights=[1.0])
    assert single.statistic == pytest.approx(r3.statistic_prime)
    ok = combined_test([r2, r3], weights=[0.6, 0.8])
    assert ok.weights == (0.6, 0.8)
    with pytest.raises(WeightNormViolation):
        combined_test([r2, r3], weights=[1.0, 1.0])


def test_optimal_weights():
    w = optimal_weights([3.0, 4.0])
    assert w == pytest.approx([0.6, 0.8])
    assert optimal_weights([2.5, 0.0]) == pytest.approx([1.0, 0.0])
    with pytest.raises(AllZeroDeltas):
        optimal_weights([0.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(0.0, 10.0), min_size=2, max_size=5).filter(
        lambda d: sum(d) > 0.1
    )
)
def test_optimal_weights_maximize(deltas):
    d = np.asarray(deltas)
    w_star = optimal_weights(d)
    assert np.dot(w_star, w_star) == pytest.approx(1.0)
    best = float(np.dot(w_star, d))
    rng = np.random.default_rng(0)
    for _ in range(25):
        w = rng.normal(size=d.size)
        w /= np.linalg.norm(w)
        assert np.dot(w, d) <= best + 1e-9


# ---------------------------------------------------------------------------
# regime classification and quantiles


def test_regime_examples():
    assert regime_classify(3, 2, 2.5).describe() == "indistinguishable (contiguous)"
    assert regime_classify(3, 2, 2.0, kappa=1.2).describe() == "distinguishable"
    v = regime_classify(3, 2, 2.0, kappa=0.2)
    assert v.describe() == "contiguous band"
    assert v.kappa_threshold == pytest.approx(4 / 13)
    assert regime_classify(3, 2, 1.8).l == 1
    assert regime_classify(3, 2, 1.5).regime == "unknown_band"
    assert regime_classify(2, 2, 1.0, kappa=0.5).verdict == "contiguous_band"
    assert regime_classify(3, 3, 2.0, kappa=0.5).verdict == "unknown"
    with pytest.raises(MissingKappa):
        regime_classify(3, 2, 2.0)


def test_regime_total_over_grid():
    for m in (2, 3, 4, 5, 6):
        for k in (2, 3, 4):
            for ae in np.linspace(0.25, m + 0.5, 18):
                if abs(ae - (m - 1)) < 1e-12:
                    v = regime_classify(m, k, float(ae), kappa=0.7)
                else:
                    v = regime_classify(m, k, float(ae), kappa=0.7)
                assert v.regime in (
                    "indistinguishable", "bounded_degree",
                    "dense_testable", "unknown_band",
                )


def test_normal_quantile():
    assert normal_quantile(0.05) == pytest.approx(1.95996398, abs=1e-8)
    from statistics import NormalDist

    phi1 = NormalDist().cdf(1.0)
    assert normal_quantile(2 * (1 - phi1)) == pytest.approx(1.0, abs=1e-12)
    assert normal_quantile(0.3173) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(AlphaOutOfRange):
        normal_quantile(0.0)
    with pytest.raises(AlphaOutOfRange):
        normal_quantile(1.5)


def test_suggest_overlap():
    # n=100: rate proxy inside (1, n^(1/3)) suggests l=1
    assert suggest_overlap(3.0 / 100 ** 2, 100, 3) == 1
    assert suggest_overlap(0.01, 100, 3) is None  # rate 100 outside every band
    assert suggest_overlap(120.0 / 100 ** 3, 100, 4) == 2  # rate 120 in (n, n^(4/3))
    assert suggest_overlap(0.0, 100, 3) is None
