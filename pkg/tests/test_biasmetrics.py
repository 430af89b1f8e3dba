"""Tests for Wasserstein-1, lead bias, and Spearman correlation.

Wasserstein values check against a scipy linear-program transport oracle;
exact permutation p-values check against an independent enumeration that
computes rho per permutation from scratch.
"""

import itertools
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from posbias.biasmetrics import (
    BiasReport,
    CorrelationResult,
    average_ranks,
    correlate_models,
    lead_bias_fraction,
    spearman,
    wasserstein1,
)
from posbias.errors import DataError
from posbias.posmap import (
    MappedSentence,
    PositionalDistribution,
    SentenceMapping,
    support_positions,
)
from posbias.simmetrics import RougeScores


def _dist(mass, mode="normalized"):
    k = len(mass)
    return PositionalDistribution(
        k=k, mass=tuple(mass), support_positions=support_positions(k, mode)
    )


def transport_cost_lp(p, q):
    """Independent minimum-cost transport oracle via linear programming."""
    k = p.k
    positions = np.asarray(p.support_positions)
    cost = np.abs(positions[:, None] - positions[None, :]).ravel()
    a_eq = []
    b_eq = []
    for i in range(k):
        row = np.zeros((k, k))
        row[i, :] = 1.0
        a_eq.append(row.ravel())
        b_eq.append(p.mass[i])
    for j in range(k - 1):  # drop one redundant marginal constraint
        col = np.zeros((k, k))
        col[:, j] = 1.0
        a_eq.append(col.ravel())
        b_eq.append(q.mass[j])
    result = linprog(cost, A_eq=np.array(a_eq), b_eq=np.array(b_eq), method="highs")
    assert result.success
    return result.fun


def test_wasserstein_identity():
    p = _dist([0.3, 0.3, 0.4])
    assert wasserstein1(p, p) == 0.0


def test_wasserstein_opposite_point_masses():
    p = _dist([1.0] + [0.0] * 9)
    q = _dist([0.0] * 9 + [1.0])
    assert wasserstein1(p, q) == pytest.approx(0.9, abs=1e-12)


def test_wasserstein_uniform_vs_lead_point_mass():
    p = _dist([0.1] * 10)
    q = _dist([1.0] + [0.0] * 9)
    assert wasserstein1(p, q) == pytest.approx(0.45, abs=1e-12)


def test_wasserstein_mismatched_support():
    p = _dist([0.5, 0.5])
    q = _dist([0.5, 0.5], mode="index")
    with pytest.raises(ValueError):
        wasserstein1(p, q)
    with pytest.raises(ValueError):
        wasserstein1(p, _dist([0.3, 0.3, 0.4]))


def test_wasserstein_index_mode_scales_by_k():
    rng = np.random.default_rng(7)
    for _ in range(20):
        k = int(rng.integers(2, 11))
        a = rng.random(k) + 1e-9
        b = rng.random(k) + 1e-9
        a /= a.sum()
        b /= b.sum()
        norm = wasserstein1(_dist(a), _dist(b))
        index = wasserstein1(_dist(a, "index"), _dist(b, "index"))
        assert index == pytest.approx(k * norm, rel=1e-12, abs=1e-12)


def test_wasserstein_matches_lp_oracle_sample():
    rng = np.random.default_rng(42)
    for _ in range(25):
        k = int(rng.integers(2, 11))
        a = rng.random(k)
        b = rng.random(k)
        a /= a.sum()
        b /= b.sum()
        p, q = _dist(a), _dist(b)
        assert wasserstein1(p, q) == pytest.approx(transport_cost_lp(p, q), abs=1e-9)


def test_wasserstein_metric_axioms_sample():
    rng = np.random.default_rng(3)
    for _ in range(60):
        k = int(rng.integers(2, 11))
        dists = []
        for _ in range(3):
            v = rng.random(k)
            dists.append(_dist(v / v.sum()))
        p, q, r = dists
        assert wasserstein1(p, q) == pytest.approx(wasserstein1(q, p), abs=1e-15)
        assert wasserstein1(p, q) >= 0.0
        assert wasserstein1(p, q) + wasserstein1(q, r) >= wasserstein1(p, r) - 1e-12
    # bounded by the support span
    assert wasserstein1(_dist([1.0] + [0.0] * 9), _dist([0.0] * 9 + [1.0])) <= 0.9 + 1e-12


def _mapping(*indices, unmapped=0):
    entries = [MappedSentence((i,), (1.0,), False) for i in indices]
    entries.extend(MappedSentence((), (), True) for _ in range(unmapped))
    return SentenceMapping(entries=tuple(entries))


def test_lead_bias_all_lead():
    assert lead_bias_fraction([_mapping(0, 1, 2)], 3) == 1.0


def test_lead_bias_direct_count():
    assert lead_bias_fraction([_mapping(0, 5, 9)], 3) == pytest.approx(1 / 3)


def test_lead_bias_errors():
    with pytest.raises(DataError):
        lead_bias_fraction([_mapping(unmapped=2)], 3)
    with pytest.raises(ValueError):
        lead_bias_fraction([_mapping(0)], 0)


def test_lead_bias_monotone_in_k_prime():
    mappings = [_mapping(0, 2, 4, 8, 15)]
    values = [lead_bias_fraction(mappings, kp) for kp in range(1, 20)]
    assert values == sorted(values)
    assert values[-1] == 1.0


def test_average_ranks_with_ties():
    assert average_ranks([10.0, 20.0, 20.0, 30.0]) == [1.0, 2.5, 2.5, 4.0]
    assert average_ranks([3.0, 1.0, 2.0]) == [3.0, 1.0, 2.0]


def _oracle_exact_p(xs, ys):
    """Independent oracle: rho per permutation computed from scratch."""
    rx = average_ranks(xs)
    ry = average_ranks(ys)

    def rho_of(rank_x, rank_y):
        n = len(rank_x)
        mx = sum(rank_x) / n
        my = sum(rank_y) / n
        num = sum((a - mx) * (b - my) for a, b in zip(rank_x, rank_y))
        den = math.sqrt(
            sum((a - mx) ** 2 for a in rank_x) * sum((b - my) ** 2 for b in rank_y)
        )
        return num / den

    observed = rho_of(rx, ry)
    perms = list(itertools.permutations(ry))
    if observed >= 0:
        hits = sum(1 for perm in perms if rho_of(rx, list(perm)) >= observed - 1e-12)
    else:
        hits = sum(1 for perm in perms if rho_of(rx, list(perm)) <= observed + 1e-12)
    return observed, hits / len(perms)


def test_spearman_perfect_order_n5():
    result = spearman([1, 2, 3, 4, 5], [10, 20, 30, 40, 50])
    assert result.rho == 1.0
    assert result.p_value == pytest.approx(1 / 120, abs=1e-15)
    assert result.stars == "**"
    assert result.method == "exact_permutation"


def test_spearman_adjacent_swap_n5():
    # sum of squared rank differences 2 -> rho = 0.9, p = 5/120
    result = spearman([1, 2, 3, 4, 5], [2, 1, 3, 4, 5])
    assert result.rho == 0.9
    assert result.p_value == pytest.approx(5 / 120, abs=1e-15)
    assert result.stars == "**"


def test_spearman_two_disjoint_swaps_n5():
    # sum of squared rank differences 4 -> rho = 0.8, p = 8/120
    result = spearman([1, 2, 3, 4, 5], [2, 1, 3, 5, 4])
    assert result.rho == 0.8
    assert result.p_value == pytest.approx(8 / 120, abs=1e-15)
    assert result.stars == "*"


def test_spearman_matches_independent_enumeration():
    cases = [
        ([1, 2, 3], [0.5, 0.4, 0.6]),
        ([1, 2, 3, 4], [4, 1, 3, 2]),
        ([1, 2, 3, 4, 5], [3, 2, 1, 5, 4]),
        ([0.1, 0.2, 0.3], [0.5, 0.4, 0.6]),
        ([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]),
        ([1, 2, 2, 4, 5], [2, 2, 3, 4, 5]),  # ties on both sides
    ]
    for xs, ys in cases:
        expected_rho, expected_p = _oracle_exact_p(xs, ys)
        result = spearman(xs, ys)
        assert result.rho == pytest.approx(expected_rho, abs=1e-12)
        assert result.p_value == pytest.approx(expected_p, abs=1e-12)


def test_spearman_negative_direction_one_sided():
    result = spearman([1, 2, 3, 4, 5], [5, 4, 3, 2, 1])
    assert result.rho == -1.0
    assert result.p_value == pytest.approx(1 / 120, abs=1e-15)
    assert result.stars == "**"


def test_spearman_errors():
    with pytest.raises(ValueError):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(DataError):
        spearman([1, 2], [1, 2])
    with pytest.raises(DataError):
        spearman([1, 1, 1], [1, 2, 3])


def test_spearman_t_approximation_matches_scipy():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(9, 30))
        xs = rng.random(n).tolist()
        ys = rng.random(n).tolist()
        result = spearman(xs, ys)
        assert result.method == "t_approximation"
        alternative = "greater" if result.rho >= 0 else "less"
        reference = scipy.stats.spearmanr(xs, ys, alternative=alternative)
        assert result.rho == pytest.approx(reference.statistic, abs=1e-12)
        assert result.p_value == pytest.approx(reference.pvalue, abs=1e-10)


@given(
    st.lists(
        st.integers(min_value=-100, max_value=100),
        min_size=3,
        max_size=7,
        unique=True,
    ),
    st.data(),
)
@settings(max_examples=60, deadline=None)
def test_spearman_rank_invariance(xs, data):
    # integer inputs keep the increasing transforms injective in floats
    ys = data.draw(
        st.lists(
            st.integers(min_value=-100, max_value=100),
            min_size=len(xs),
            max_size=len(xs),
            unique=True,
        ),
        label="ys",
    )
    base = spearman(xs, ys)
    transformed = spearman(
        [3.0 * x + 7.0 for x in xs], [math.exp(y / 50.0) for y in ys]
    )
    assert transformed.rho == pytest.approx(base.rho, abs=1e-9)
    assert transformed.p_value == pytest.approx(base.p_value, abs=1e-9)


def test_n5_rho_lattice_exhaustive():
    # untied n=5 rho always lies on {1 - m/20 : m in 0, 2, ..., 40}
    lattice = {1 - m / 20 for m in range(0, 41, 2)}
    for perm in itertools.permutations([1, 2, 3, 4, 5]):
        rho = spearman([1, 2, 3, 4, 5], list(perm)).rho
        assert any(abs(rho - value) < 1e-12 for value in lattice), rho


def test_stars_thresholds():
    assert CorrelationResult(0.5, 0.05, 5, "exact_permutation", "**").stars == "**"
    assert CorrelationResult(0.5, 0.1, 5, "exact_permutation", "*").stars == "*"
    assert CorrelationResult(0.5, 0.11, 5, "exact_permutation", "").stars == ""
    with pytest.raises(ValueError):
        CorrelationResult(0.5, 0.5, 5, "exact_permutation", "**")


def _report(name, w, r1=0.0, r2=0.0, rl=0.0):
    dist = _dist([1.0])
    return BiasReport(
        model_name=name,
        wasserstein=w,
        rouge=RougeScores(r1, r2, rl),
        lead_bias_fraction=0.0,
        unmapped_fraction=0.0,
        skipped_short_articles=0,
        gold_distribution=dist,
        model_distribution=dist,
    )


def test_correlate_models_rank_aligned():
    reports = [
        _report("a", 0.1, r2=0.1),
        _report("b", 0.2, r2=0.2),
        _report("c", 0.3, r2=0.3),
        _report("d", 0.4, r2=0.4),
        _report("e", 0.5, r2=0.5),
    ]
    result = correlate_models(reports, "r2")
    assert result.rho == 1.0
    assert result.stars == "**"


def test_correlate_models_reversed():
    reports = [
        _report(f"m{i}", w, r1=r)
        for i, (w, r) in enumerate(zip([0.1, 0.2, 0.3, 0.4, 0.5], [0.9, 0.7, 0.5, 0.3, 0.1]))
    ]
    result = correlate_models(reports, "r1")
    assert result.rho == -1.0
    assert result.stars == "**"


def test_correlate_models_three_models_enumeration():
    reports = [
        _report("a", 0.1, r1=0.5),
        _report("b", 0.2, r1=0.4),
        _report("c", 0.3, r1=0.6),
    ]
    result = correlate_models(reports, "r1")
    expected_rho, expected_p = _oracle_exact_p([0.1, 0.2, 0.3], [0.5, 0.4, 0.6])
    assert result.rho == pytest.approx(expected_rho, abs=1e-15)
    assert result.rho == 0.5
    assert result.p_value == pytest.approx(expected_p, abs=1e-15)


def test_correlate_models_needs_three():
    with pytest.raises(DataError):
        correlate_models([_report("a", 0.1), _report("b", 0.2)], "r1")
    with pytest.raises(ValueError):
        correlate_models([_report("a", 0.1)] * 3, "f1")
