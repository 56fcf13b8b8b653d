"""
Lag sequential analysis

Counts how often category b follows category a at lag k, compares the count
with its expectation under independence through adjusted residuals, and
offers a permutation test as an independent check of single pairs.
"""
import logging
import math
from fractions import Fraction
from itertools import islice
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.stats import norm

from dialoglens.analysis import DISCUSS_BUCKETS, TOP_BUCKETS, bucket_of
from dialoglens.core.exceptions import InvalidAlpha, LagTooLarge
from dialoglens.dialogs import detect_dialogs
from dialoglens.models.dialog import TOP_LEVEL_TYPES, DialogSpan
from dialoglens.models.distribution import Level
from dialoglens.models.lag import (
    CategorySequence,
    LagTable,
    LsaFinding,
    PatternGraph,
    PermutationResult,
    SequenceLevel,
)
from dialoglens.models.protocol import Protocol

logger = logging.getLogger(__name__)

EXACT_LIMIT = 10_000
# below this expected count the normal approximation behind z is unreliable
MIN_EXPECTED = 5.0
_CHUNK = 2_000


def extract_sequence(
    protocol: Protocol,
    level: SequenceLevel = SequenceLevel.TOP,
    spans: Optional[Sequence[DialogSpan]] = None,
) -> CategorySequence:
    """
    Category labels in episode order

    At the dialog level there is one label per top-level span; spans are
    detected with default rules when not given.
    """
    level = SequenceLevel(level)
    if level == SequenceLevel.DIALOG:
        spans = spans if spans is not None else detect_dialogs(protocol)
        return CategorySequence(
            labels=tuple(s.type.value for s in spans),
            alphabet=tuple(t.value for t in TOP_LEVEL_TYPES),
        )
    bucket_level = Level(level.value)
    labels = (bucket_of(e.code, bucket_level) for e in protocol.episodes)
    return CategorySequence(
        labels=tuple(label for label in labels if label is not None),
        alphabet=TOP_BUCKETS if bucket_level == Level.TOP else DISCUSS_BUCKETS,
    )


def _check_lag(seq: CategorySequence, k: int):
    if k < 1:
        raise ValueError(f"lag must be at least 1, got {k}")
    if k >= len(seq):
        raise LagTooLarge(k, len(seq))


def _encode(seq: CategorySequence) -> np.ndarray:
    index = {label: i for i, label in enumerate(seq.alphabet)}
    return np.fromiter((index[label] for label in seq.labels), dtype=np.int64, count=len(seq))


def transition_counts(seq: CategorySequence, k: int = 1) -> LagTable:
    """Observed lag-k transitions with their position-restricted marginals"""
    _check_lag(seq, k)
    codes = _encode(seq)
    size = len(seq.alphabet)
    observed = np.zeros((size, size), dtype=np.int64)
    np.add.at(observed, (codes[:-k], codes[k:]), 1)
    return LagTable(
        lag=k,
        alphabet=seq.alphabet,
        observed=tuple(tuple(int(v) for v in row) for row in observed),
        given_counts=tuple(int(v) for v in np.bincount(codes[:-k], minlength=size)),
        target_counts=tuple(int(v) for v in np.bincount(codes[k:], minlength=size)),
        valid_positions=len(seq) - k,
    )


def _adjusted_residual(observed: int, expected: Fraction, given: int, target: int, valid: int) -> Optional[float]:
    variance = expected * (1 - Fraction(given, valid)) * (1 - Fraction(target, valid))
    if expected == 0 or variance == 0:
        return None
    return float(observed - expected) / math.sqrt(variance)


def lag_table(seq: CategorySequence, k: int = 1) -> LagTable:
    """Transition table with expected counts and adjusted residuals filled in"""
    table = transition_counts(seq, k)
    expected, residual = [], []
    for a, given in enumerate(table.alphabet):
        e_row, z_row = [], []
        for b, target in enumerate(table.alphabet):
            e = table.expected_fraction(given, target)
            e_row.append(float(e))
            z_row.append(_adjusted_residual(
                table.observed[a][b], e, table.given_counts[a], table.target_counts[b], table.valid_positions,
            ))
        expected.append(tuple(e_row))
        residual.append(tuple(z_row))
    return table.model_copy(update={"expected": tuple(expected), "residual": tuple(residual)})


def critical_value(alpha: float) -> float:
    """Two-sided standard normal critical value"""
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(alpha)
    return float(norm.ppf(1.0 - alpha / 2.0))


def lsa(
    seq: CategorySequence,
    k: int = 1,
    alpha: float = 0.05,
    include_self: bool = True,
    min_expected: float = MIN_EXPECTED,
) -> list[LsaFinding]:
    """
    One finding per (given, target) pair in alphabet order

    A pair is significant when |z| reaches the critical value for `alpha`.
    Pairs with a zero expectation or zero variance are degenerate. A pair
    whose expected count is below `min_expected` keeps its z decision but is
    marked sparse: on such cells the residual test can flag counts the exact
    permutation test finds unremarkable, so confirm them with
    permutation_tests before reading them as patterns.
    """
    z_crit = critical_value(alpha)
    table = lag_table(seq, k)
    findings = []
    for a, given in enumerate(table.alphabet):
        for b, target in enumerate(table.alphabet):
            if a == b and not include_self:
                continue
            z = table.residual[a][b]
            findings.append(LsaFinding(
                given=given,
                target=target,
                lag=k,
                observed=table.observed[a][b],
                expected=table.expected[a][b],
                z=z,
                significant=z is not None and abs(z) >= z_crit,
                degenerate=z is None,
                sparse=z is not None and table.expected[a][b] < min_expected,
            ))
    logger.debug(f"lsa lag {k}: {sum(f.significant for f in findings)} of {len(findings)} pair(s) significant")
    return findings


def arrangement_count(seq: CategorySequence) -> int:
    """Distinct orderings of the sequence's multiset of labels"""
    count = math.factorial(len(seq))
    for label in set(seq.labels):
        count //= math.factorial(seq.labels.count(label))
    return count


def _distinct_permutations(items: list[int]) -> Iterator[list[int]]:
    """Lexicographic distinct permutations of a multiset"""
    current = sorted(items)
    while True:
        yield list(current)
        i = len(current) - 2
        while i >= 0 and current[i] >= current[i + 1]:
            i -= 1
        if i < 0:
            return
        j = len(current) - 1
        while current[j] <= current[i]:
            j -= 1
        current[i], current[j] = current[j], current[i]
        current[i + 1:] = reversed(current[i + 1:])


def _pair_counts(block: np.ndarray, given: int, target: int, k: int) -> np.ndarray:
    return ((block[:, :-k] == given) & (block[:, k:] == target)).sum(axis=1)


def _arrangement_blocks(codes: np.ndarray, exact: bool, iterations: int, seed: int) -> Iterator[np.ndarray]:
    """Every distinct arrangement, or `iterations` seeded shuffles, in chunks"""
    if exact:
        permutations = _distinct_permutations(codes.tolist())
        while block := list(islice(permutations, _CHUNK)):
            yield np.array(block, dtype=np.int64)
        return
    rng = np.random.default_rng(seed)
    drawn = 0
    while drawn < iterations:
        size = min(_CHUNK, iterations - drawn)
        yield rng.permuted(np.tile(codes, (size, 1)), axis=1)
        drawn += size


def permutation_tests(
    seq: CategorySequence,
    pairs: Sequence[tuple[str, str]],
    k: int = 1,
    iterations: int = 10_000,
    seed: int = 0,
    exact_limit: int = EXACT_LIMIT,
) -> list[PermutationResult]:
    """
    P-values of several (given, target) counts among reorderings of seq

    All distinct arrangements are scored when there are at most
    `exact_limit` of them; otherwise `iterations` random shuffles drawn from
    a generator seeded with `seed`. Every pair is scored against the same
    arrangements. The tail is taken on the side of the observed count
    relative to the permutation mean.
    """
    _check_lag(seq, k)
    if iterations < 1:
        raise ValueError(f"iterations must be at least 1, got {iterations}")
    arrangements = arrangement_count(seq)
    n = len(seq)
    codes = _encode(seq)
    present = set(seq.labels)

    scored_pairs = []
    for given, target in pairs:
        if given not in present or target not in present:
            continue
        g, t = seq.alphabet.index(given), seq.alphabet.index(target)
        observed = int(_pair_counts(codes[np.newaxis, :], g, t, k)[0])
        n_given, n_target = int((codes == g).sum()), int((codes == t).sum())
        mean = Fraction((n - k) * n_given * (n_target - (g == t)), n * (n - 1))
        scored_pairs.append((given, target, g, t, observed, observed >= mean))

    exact = arrangements <= exact_limit
    tails = [0] * len(scored_pairs)
    scored = 0
    if scored_pairs:
        for block in _arrangement_blocks(codes, exact, iterations, seed):
            for i, (_, _, g, t, observed, upper) in enumerate(scored_pairs):
                counts = _pair_counts(block, g, t, k)
                tails[i] += int((counts >= observed).sum() if upper else (counts <= observed).sum())
            scored += len(block)

    tested = {(given, target): i for i, (given, target, *_) in enumerate(scored_pairs)}
    results = []
    for given, target in pairs:
        i = tested.get((given, target))
        if i is None:
            results.append(PermutationResult(
                given=given, target=target, lag=k, observed=0, p_value=1.0,
                exact=True, arrangements=arrangements, iterations=0,
            ))
            continue
        observed = scored_pairs[i][4]
        p_value = tails[i] / scored
        logger.debug(
            f"permutation {given}->{target} lag {k}: O={observed}, p={p_value:.6f} "
            f"({'exact' if exact else 'sampled'}, {scored} arrangement(s))"
        )
        results.append(PermutationResult(
            given=given, target=target, lag=k, observed=observed, p_value=p_value,
            exact=exact, arrangements=arrangements, iterations=scored,
        ))
    return results


def permutation_test(
    seq: CategorySequence,
    given: str,
    target: str,
    k: int = 1,
    iterations: int = 10_000,
    seed: int = 0,
    exact_limit: int = EXACT_LIMIT,
) -> PermutationResult:
    """P-value of the observed (given, target) count; see permutation_tests"""
    return permutation_tests(seq, [(given, target)], k, iterations, seed, exact_limit)[0]


def permutation_pvalue(
    seq: CategorySequence,
    given: str,
    target: str,
    k: int = 1,
    iterations: int = 10_000,
    seed: int = 0,
    exact_limit: int = EXACT_LIMIT,
) -> float:
    return permutation_test(seq, given, target, k, iterations, seed, exact_limit).p_value


def pattern_graph(findings: Sequence[LsaFinding]) -> PatternGraph:
    """
    Directed graph of significant successions

    Edges are significant pairs with a positive residual. Chains are the
    maximal simple paths of two or more labels: they cannot be extended at
    either end without revisiting a label.
    """
    significant = [f for f in findings if f.significant]
    nodes = sorted({f.given for f in significant} | {f.target for f in significant})
    edges = sorted({(f.given, f.target) for f in significant if f.z > 0})

    successors: dict[str, list[str]] = {node: [] for node in nodes}
    predecessors: dict[str, set[str]] = {node: set() for node in nodes}
    for a, b in edges:
        if a != b:
            successors[a].append(b)
            predecessors[b].add(a)

    chains: set[tuple[str, ...]] = set()

    def walk(path: list[str]):
        extended = False
        for nxt in successors[path[-1]]:
            if nxt not in path:
                extended = True
                walk(path + [nxt])
        if not extended and len(path) > 1 and predecessors[path[0]] <= set(path):
            chains.add(tuple(path))

    for node in nodes:
        walk([node])

    return PatternGraph(nodes=tuple(nodes), edges=tuple(edges), chains=tuple(sorted(chains)))
