"""
Tests for lag sequential analysis and the permutation test
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from dialoglens.core.exceptions import InvalidAlpha, LagTooLarge
from dialoglens.models.lag import CategorySequence, LsaFinding, SequenceLevel
from dialoglens.seqstats import (
    EXACT_LIMIT,
    arrangement_count,
    critical_value,
    extract_sequence,
    lag_table,
    lsa,
    pattern_graph,
    permutation_pvalue,
    permutation_test,
    permutation_tests,
    transition_counts,
)

ABAB = CategorySequence.from_labels("ABABABAB")


def _finding(findings, given, target):
    return next(f for f in findings if (f.given, f.target) == (given, target))


def test_extract_sequences(trm_sample):
    """Test label sequences at each level"""
    top = extract_sequence(trm_sample, SequenceLevel.TOP)
    assert len(top) == 256
    assert top.alphabet == ("MNG", "READ", "RQST", "DCSS")
    assert top.labels[:4] == ("MNG", "MNG", "READ", "RQST")

    discuss = extract_sequence(trm_sample, SequenceLevel.DISCUSS)
    assert len(discuss) == 228
    assert discuss.labels[:2] == ("inform", "reject")

    dialog = extract_sequence(trm_sample, SequenceLevel.DIALOG)
    assert dialog.alphabet == ("REV", "ALT", "SYNC", "MNG")
    assert len(dialog) == 38
    assert dialog.labels[:4] == ("MNG", "SYNC", "ALT", "REV")


def test_sequence_rejects_stray_labels():
    """Test labels must come from the alphabet"""
    with pytest.raises(ValueError):
        CategorySequence(labels=("A", "C"), alphabet=("A", "B"))
    with pytest.raises(ValueError):
        CategorySequence(labels=("A",), alphabet=("A", "A"))


def test_transition_counts():
    """Test lag 1 and lag 2 counts of an alternating sequence"""
    one = transition_counts(ABAB, 1)
    assert one.count("A", "B") == 4
    assert one.count("B", "A") == 3
    assert one.count("A", "A") == 0
    assert one.given_counts == (4, 3)
    assert one.target_counts == (3, 4)
    assert one.valid_positions == 7

    two = transition_counts(ABAB, 2)
    assert two.count("A", "A") == 3
    assert two.count("B", "B") == 3
    assert two.count("A", "B") == 0


def test_transition_counts_sum_to_valid_positions(trm_sample):
    """Test every lag-k position is counted once"""
    seq = extract_sequence(trm_sample, SequenceLevel.DISCUSS)
    for k in (1, 2, 5):
        table = transition_counts(seq, k)
        assert sum(map(sum, table.observed)) == len(seq) - k
        assert sum(table.given_counts) == sum(table.target_counts) == len(seq) - k


@pytest.mark.parametrize("labels", ["ABABABAB", "AABBBCACDDAB", "DCBAABCDDDAC", "AAAAB"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_marginal_consistency(labels, k):
    """Test row and column sums equal the position-restricted label counts"""
    seq = CategorySequence.from_labels(labels)
    table = transition_counts(seq, k)
    for a, label in enumerate(table.alphabet):
        assert sum(table.observed[a]) == table.given_counts[a] == labels[:len(labels) - k].count(label)
        assert sum(row[a] for row in table.observed) == table.target_counts[a] == labels[k:].count(label)


@pytest.mark.parametrize("labels", ["ABABABAB", "AABBBCACDDAB", "ABCCCDA", "CACBC"])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_expected_counts_sum_to_valid_positions(labels, k):
    """Test exact expected counts add up to N - k"""
    table = lag_table(CategorySequence.from_labels(labels), k)
    total = sum(table.expected_fraction(a, b) for a in table.alphabet for b in table.alphabet)
    assert total == Fraction(len(labels) - k)
    assert sum(map(sum, table.expected)) == pytest.approx(len(labels) - k)


def test_adjusted_residual_of_alternation():
    """Test z for A->B in ABABABAB is the square root of 7"""
    table = lag_table(ABAB, 1)
    assert table.expected[0][1] == pytest.approx(16 / 7)
    assert table.residual[0][1] == pytest.approx(math.sqrt(7))

    findings = lsa(ABAB, 1, 0.05)
    ab = _finding(findings, "A", "B")
    assert ab.significant
    assert ab.z == pytest.approx(2.6458, abs=1e-4)
    assert _finding(findings, "A", "A").z < 0


def test_include_self():
    """Test a->a pairs can be left out"""
    assert len(lsa(ABAB)) == 4
    assert [(f.given, f.target) for f in lsa(ABAB, include_self=False)] == [("A", "B"), ("B", "A")]


def test_degenerate_pairs():
    """Test zero expectation or zero variance gives an undefined residual"""
    seq = CategorySequence.from_labels("AAAB")
    findings = lsa(seq)
    assert all(f.degenerate and f.z is None and not f.significant for f in findings)


def test_degenerate_finding_cannot_be_significant():
    """Test the finding model enforces its flags"""
    with pytest.raises(ValueError):
        LsaFinding(given="A", target="B", lag=1, observed=0, expected=0.0, significant=True, degenerate=True)


def test_lag_bounds():
    """Test lag must lie in 1..N-1"""
    with pytest.raises(ValueError):
        transition_counts(ABAB, 0)
    with pytest.raises(LagTooLarge):
        transition_counts(ABAB, 8)
    assert transition_counts(ABAB, 7).valid_positions == 1


def test_critical_value():
    """Test alpha must lie strictly between 0 and 1"""
    assert critical_value(0.05) == pytest.approx(1.959964, abs=1e-6)
    for alpha in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(InvalidAlpha):
            critical_value(alpha)


def test_exact_permutation_pvalue():
    """Test the exact p-value of A->B in ABABABAB is 1/70"""
    result = permutation_test(ABAB, "A", "B", 1)
    assert result.exact
    assert result.arrangements == 70
    assert result.iterations == 70
    assert result.observed == 4
    assert result.p_value == pytest.approx(1 / 70)
    assert permutation_pvalue(ABAB, "A", "B") == result.p_value


def test_lower_tail():
    """Test a count below the mean is tested on the lower tail"""
    result = permutation_test(ABAB, "A", "A", 1)
    assert result.observed == 0
    assert 0.0 < result.p_value < 1.0


def test_sampled_permutation_pvalue():
    """Test sampling kicks in above the exact limit and is reproducible"""
    first = permutation_test(ABAB, "A", "B", 1, iterations=5000, seed=3, exact_limit=1)
    again = permutation_test(ABAB, "A", "B", 1, iterations=5000, seed=3, exact_limit=1)
    assert not first.exact
    assert first.iterations == 5000
    assert first.p_value == again.p_value
    assert 0.005 < first.p_value < 0.03


def test_sampled_seeds_agree_within_sampling_error():
    """Test two seeds give p-values within three binomial standard errors"""
    iterations = 20_000
    p = permutation_pvalue(ABAB, "A", "B")
    first = permutation_pvalue(ABAB, "A", "B", iterations=iterations, seed=1, exact_limit=1)
    second = permutation_pvalue(ABAB, "A", "B", iterations=iterations, seed=2, exact_limit=1)
    assert first != second
    assert abs(first - second) <= 3 * math.sqrt(p * (1 - p) / iterations)


def test_absent_label():
    """Test a pair with a label that never occurs"""
    seq = CategorySequence.from_labels("ABAB", alphabet="ABC")
    result = permutation_test(seq, "C", "A")
    assert result.p_value == 1.0
    assert result.iterations == 0


def test_arrangement_count():
    """Test multinomial arrangement counts"""
    assert arrangement_count(ABAB) == 70
    assert arrangement_count(CategorySequence.from_labels("AAB")) == 3
    assert arrangement_count(CategorySequence.from_labels("ABCD")) == 24


def test_relabelling_keeps_residuals():
    """Test renaming categories does not change any residual"""
    labels = list("ABCABBCACBAABCCA")
    rename = {"A": "X", "B": "Z", "C": "Y"}
    original = lsa(CategorySequence.from_labels(labels))
    renamed = lsa(CategorySequence.from_labels([rename[x] for x in labels]))
    for f in original:
        g = _finding(renamed, rename[f.given], rename[f.target])
        assert g.observed == f.observed
        assert g.z == pytest.approx(f.z)


def _exact_mode_sequences(count: int, seed: int):
    """Random sequences (N <= 30, up to 4 labels, lag <= 3) small enough to enumerate"""
    rng = np.random.default_rng(seed)
    drawn = 0
    while drawn < count:
        n = int(rng.integers(4, 31))
        alphabet = "ABCD"[:int(rng.integers(2, 5))]
        weights = rng.dirichlet(np.full(len(alphabet), 0.5))
        labels = rng.choice(list(alphabet), size=n, p=weights).tolist()
        seq = CategorySequence.from_labels(labels, alphabet=alphabet)
        k = int(rng.integers(1, 4))
        if len(set(labels)) < 2 or k >= n or arrangement_count(seq) > EXACT_LIMIT:
            continue
        drawn += 1
        yield seq, k


@pytest.mark.slow
def test_residual_decisions_against_exact_permutation():
    """Test z decisions against exact p-values: small p is always flagged, large p only on sparse cells"""
    alpha = 0.05
    checked = middle = 0
    for seq, k in _exact_mode_sequences(200, seed=11):
        findings = [f for f in lsa(seq, k, alpha) if not f.degenerate]
        results = permutation_tests(seq, [(f.given, f.target) for f in findings], k)
        for finding, result in zip(findings, results):
            assert result.exact
            if result.p_value <= alpha / 4:
                assert finding.significant, (seq.labels, k, finding, result.p_value)
            elif result.p_value >= 2 * alpha:
                assert not finding.significant or finding.sparse, (seq.labels, k, finding, result.p_value)
            else:
                middle += 1
            checked += 1
    assert checked > 1000
    assert middle < checked


def test_sparse_cells_are_marked():
    """Test a flagged pair with a tiny expectation is marked sparse"""
    seq = CategorySequence.from_labels("ABCCCDA")
    ab = _finding(lsa(seq, 1, 0.05), "A", "B")
    assert ab.expected == pytest.approx(1 / 6)
    assert ab.z == pytest.approx(2.449, abs=1e-3)
    assert ab.significant
    assert ab.sparse
    assert permutation_pvalue(seq, "A", "B") > 0.1

    long = CategorySequence.from_labels("AB" * 20)
    assert not _finding(lsa(long), "A", "B").sparse
    assert _finding(lsa(long, min_expected=100.0), "A", "B").sparse


def test_permutation_tests_share_arrangements():
    """Test scoring several pairs at once matches scoring them one by one"""
    pairs = [("A", "B"), ("B", "A"), ("A", "A"), ("C", "A")]
    together = permutation_tests(ABAB, pairs, 1)
    assert [(r.given, r.target) for r in together] == pairs
    for result, (given, target) in zip(together, pairs):
        assert result == permutation_test(ABAB, given, target, 1)
    assert together[-1].p_value == 1.0


def test_type_one_error_rate():
    """Test random sequences are flagged close to alpha"""
    started = time.perf_counter()
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(1000):
        labels = rng.choice(["A", "B", "C", "D"], size=100).tolist()
        seq = CategorySequence.from_labels(labels, alphabet="ABCD")
        hits += _finding(lsa(seq, 1, 0.05), "A", "B").significant
    assert 0.02 <= hits / 1000 <= 0.08
    assert time.perf_counter() - started < 30.0


def _significant(given, target, z):
    return LsaFinding(given=given, target=target, lag=1, observed=1, expected=1.0, z=z, significant=True)


def test_pattern_graph_chains():
    """Test chains follow positive significant successions"""
    findings = [
        _significant("A", "B", 3.0),
        _significant("B", "C", 2.5),
        _significant("D", "D", 4.0),
        _significant("X", "Y", -3.0),
        LsaFinding(given="C", target="A", lag=1, observed=1, expected=1.0, z=1.0),
    ]
    graph = pattern_graph(findings)
    assert graph.nodes == ("A", "B", "C", "D", "X", "Y")
    assert graph.edges == (("A", "B"), ("B", "C"), ("D", "D"))
    assert graph.chains == (("A", "B", "C"),)


def test_pattern_graph_cycle():
    """Test a two-label cycle yields both rotations"""
    graph = pattern_graph([_significant("A", "B", 3.0), _significant("B", "A", 3.0)])
    assert graph.chains == (("A", "B"), ("B", "A"))


def test_pattern_graph_of_alternation():
    """Test ABABABAB gives the A <-> B cycle"""
    graph = pattern_graph(lsa(ABAB))
    assert ("A", "B") in graph.edges
    assert ("B", "A") in graph.edges
