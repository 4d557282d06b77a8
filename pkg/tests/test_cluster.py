"""Batch clustering and sliding-window label propagation."""

import random
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from newslens.cluster import (
    Cluster,
    ClusterParams,
    LabelState,
    WindowConfig,
    assign_final_labels,
    cluster_batch,
    initial_clusters,
    iter_window_batches,
    merge_to_fixpoint,
    overlap_ratio,
    run_windows,
    slide_and_label,
)
from newslens.vectorize import embed, fit

import oracles
from helpers import grid_vocab_corpus, make_article


def _sims(pairs: dict[tuple[int, int], float], n: int) -> np.ndarray:
    sims = np.eye(n)
    for (i, j), value in pairs.items():
        sims[i, j] = sims[j, i] = value
    return sims


# -- initial clusters ---------------------------------------------------------


def test_every_doc_in_its_own_ball():
    ids = ["a", "b", "c"]
    clusters = initial_clusters(ids, _sims({}, 3), t1=1.0)
    for i, c in enumerate(clusters):
        assert ids[i] in c.members


def test_identical_docs_make_identical_balls():
    ids = [f"d{i}" for i in range(4)]
    sims = np.ones((4, 4))
    clusters = initial_clusters(ids, sims, t1=0.9)
    assert len(clusters) == 4
    assert all(c.members == frozenset(ids) for c in clusters)


def test_three_doc_fixture():
    ids = ["1", "2", "3"]
    sims = _sims({(0, 1): 0.8, (0, 2): 0.2, (1, 2): 0.3}, 3)
    clusters = initial_clusters(ids, sims, t1=0.5)
    assert [c.members for c in clusters] == [
        frozenset({"1", "2"}),
        frozenset({"1", "2"}),
        frozenset({"3"}),
    ]


def test_threshold_boundary_is_inclusive():
    ids = ["1", "2"]
    clusters = initial_clusters(ids, _sims({(0, 1): 0.5}, 2), t1=0.5)
    assert clusters[0].members == frozenset({"1", "2"})


def test_raising_t1_never_grows_balls():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(2, 8)
        sims = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                sims[i, j] = sims[j, i] = rng.random()
        ids = [str(i) for i in range(n)]
        low = initial_clusters(ids, sims, t1=0.3)
        high = initial_clusters(ids, sims, t1=0.6)
        for lo_c, hi_c in zip(low, high):
            assert hi_c.members <= lo_c.members


# -- overlap + merge ----------------------------------------------------------


def test_overlap_ratio_examples():
    a = Cluster(members=frozenset("abc"), created_from=0)
    b = Cluster(members=frozenset("bcd"), created_from=1)
    disjoint = Cluster(members=frozenset("xy"), created_from=2)
    assert overlap_ratio(a, a) == 1.0
    assert overlap_ratio(a, disjoint) == 0.0
    assert overlap_ratio(a, b) == pytest.approx(2 / 3)


def test_overlap_ratio_rejects_empty():
    with pytest.raises(ValueError):
        overlap_ratio(frozenset(), frozenset("a"))


def _clusters(*member_sets) -> list[Cluster]:
    return [Cluster(members=frozenset(m), created_from=i) for i, m in enumerate(member_sets)]


def test_merge_no_pairs_above_threshold_is_identity():
    clusters = _clusters("ab", "cd")
    merged = merge_to_fixpoint(clusters, t2=0.4)
    assert {c.members for c in merged} == {frozenset("ab"), frozenset("cd")}


def test_merge_hand_traced_pair():
    merged = merge_to_fixpoint(_clusters("ab", "bc"), t2=0.4)
    assert {c.members for c in merged} == {frozenset("abc")}


def test_merge_chain_collapses():
    merged = merge_to_fixpoint(_clusters("ab", "bc", "cd"), t2=0.4)
    assert {c.members for c in merged} == {frozenset("abcd")}


def test_merge_threshold_is_strict():
    # f = 1/2 exactly; "> t2" must not fire at equality
    merged = merge_to_fixpoint(_clusters("ab", "bc"), t2=0.5)
    assert {c.members for c in merged} == {frozenset("ab"), frozenset("bc")}


def test_fixpoint_property_random():
    rng = random.Random(23)
    letters = "abcdefghij"
    for _ in range(50):
        sets = [
            frozenset(rng.sample(letters, rng.randint(1, 5)))
            for _ in range(rng.randint(1, 8))
        ]
        t2 = rng.choice([0.3, 0.5, 0.7])
        merged = merge_to_fixpoint(
            [Cluster(members=s, created_from=i) for i, s in enumerate(sets)], t2
        )
        for i, ci in enumerate(merged):
            for cj in merged[i + 1:]:
                assert overlap_ratio(ci, cj) <= t2
        # merging only unions members; the covered universe is preserved
        assert frozenset().union(*(c.members for c in merged)) == frozenset().union(*sets)


# -- final label assignment ---------------------------------------------------


def test_largest_cluster_wins():
    clusters = _clusters("abcde", "abc")
    assignment = assign_final_labels(["a"], clusters)
    assert assignment["a"].members == frozenset("abcde")


def test_singleton_membership():
    clusters = _clusters("ab", "cd")
    assert assign_final_labels(["c"], clusters)["c"].members == frozenset("cd")


def test_size_tie_breaks_lexicographically():
    clusters = _clusters("abcz", "abcy")
    # sorted member tuples: (a,b,c,y) < (a,b,c,z)
    assert assign_final_labels(["a"], clusters)["a"].members == frozenset("abcy")


# -- batch partition vs oracle -------------------------------------------------


def test_cluster_batch_is_a_partition():
    rng = random.Random(5)
    docs = grid_vocab_corpus(rng, 10)
    model = fit(docs, min_df=1)
    vectors = [embed(model, d) for d in docs]
    groups = cluster_batch([d.id for d in docs], vectors, ClusterParams(t1=0.5, t2=0.5))
    seen = [i for group in groups for i in group]
    assert sorted(seen) == sorted(d.id for d in docs)


def test_cluster_batch_matches_bruteforce_oracle():
    rng = random.Random(99)
    for trial in range(60):
        docs = grid_vocab_corpus(rng, rng.randint(2, 12))
        t1 = rng.choice([0.3, 0.5, 0.7])
        t2 = rng.choice([0.3, 0.5])
        model = fit(docs, min_df=1)
        vectors = [embed(model, d) for d in docs]
        ids = [d.id for d in docs]
        got = set(cluster_batch(ids, vectors, ClusterParams(t1=t1, t2=t2)))
        rows = []
        for vec in vectors:
            row = [0.0] * len(model.vocabulary)
            for dim, w in vec.weights.items():
                row[dim] = w
            rows.append(row)
        expected = oracles.batch_partition(ids, oracles.cosine_matrix(rows), t1, t2)
        assert got == expected, f"trial {trial}: {got} != {expected}"


# -- windows and label propagation ----------------------------------------------


def _labeled_state(**labels_first_seen):
    state = LabelState()
    for label, (article_ids, hours) in labels_first_seen.items():
        event = state.mint(make_article("x", hours=hours).published_at)
        for article_id in article_ids:
            state.labels[article_id] = event
    return state


def test_fresh_cluster_mints_one_label():
    docs = [make_article(f"n{i}", title="same topic words here", content="same topic")
            for i in range(3)]
    model = fit(docs, min_df=1)
    vectors = [embed(model, d) for d in docs]
    state = LabelState()
    assigned = slide_and_label(state, docs, vectors, ClusterParams(t1=0.5, t2=0.5))
    assert len({e.label for e in assigned.values()}) == 1
    assert set(assigned) == {"n0", "n1", "n2"}


def test_majority_label_propagates():
    docs = [make_article(f"m{i}", title="alpha beta gamma", content="alpha beta")
            for i in range(5)]
    model = fit(docs, min_df=1)
    vectors = [embed(model, d) for d in docs]
    state = LabelState()
    ev_a = state.mint(docs[0].published_at)
    ev_b = state.mint(docs[1].published_at)
    state.labels["m0"] = ev_a
    state.labels["m1"] = ev_a
    state.labels["m2"] = ev_b
    assigned = slide_and_label(state, docs, vectors, ClusterParams(t1=0.5, t2=0.5))
    assert assigned["m3"].label == ev_a.label
    assert assigned["m4"].label == ev_a.label
    # prior labels untouched
    assert state.labels["m2"] is ev_b


def test_majority_tie_prefers_earlier_first_seen():
    docs = [make_article(f"t{i}", title="omega psi chi", content="omega psi")
            for i in range(3)]
    model = fit(docs, min_df=1)
    vectors = [embed(model, d) for d in docs]
    state = LabelState()
    older = state.mint(make_article("x", hours=0.0).published_at)
    newer = state.mint(make_article("y", hours=5.0).published_at)
    state.labels["t0"] = newer
    state.labels["t1"] = older
    assigned = slide_and_label(state, docs, vectors, ClusterParams(t1=0.5, t2=0.5))
    assert assigned["t2"].label == older.label


def test_window_config_validation():
    with pytest.raises(ValueError):
        WindowConfig(window=timedelta(hours=8), stride=timedelta(hours=9))
    cfg = WindowConfig.from_hours(72, 8)
    assert cfg.window == timedelta(hours=72)


def test_window_batches_sit_on_epoch_grid():
    docs = [make_article(f"w{i}", hours=float(i) * 10) for i in range(10)]
    cfg = WindowConfig.from_hours(72, 8)
    starts = [start for start, _ in iter_window_batches(docs, cfg)]
    assert starts == sorted(starts)
    for start in starts:
        assert int(start.timestamp()) % (8 * 3600) == 0
    batches = dict(iter_window_batches(docs, cfg))
    for start, batch in batches.items():
        for article in batch:
            assert start <= article.published_at < start + cfg.window


def test_labels_never_reassigned_across_strides():
    rng = random.Random(3)
    docs = []
    for i in range(40):
        topic = i % 4
        words = " ".join(f"topic{topic}w{k}" for k in range(6))
        docs.append(make_article(f"s{i:02d}", title=words, content=words,
                                 hours=rng.uniform(0, 200)))
    model = fit(docs, min_df=1)
    vectors = {d.id: embed(model, d) for d in docs}

    seen: dict[str, str] = {}

    def observer(_start, labels):
        for article_id, event in labels.items():
            if article_id in seen:
                assert seen[article_id] == event.label
            else:
                seen[article_id] = event.label

    state = run_windows(docs, vectors, ClusterParams(t1=0.5, t2=0.5),
                        WindowConfig.from_hours(72, 8), observer=observer)
    assert set(state.labels) == {d.id for d in docs}


def test_run_windows_deterministic():
    rng = random.Random(8)
    docs = grid_vocab_corpus(rng, 12)
    model = fit(docs, min_df=1)
    vectors = {d.id: embed(model, d) for d in docs}
    params = ClusterParams(t1=0.5, t2=0.5)
    cfg = WindowConfig.from_hours(72, 8)
    first = run_windows(docs, vectors, params, cfg).labels
    second = run_windows(docs, vectors, params, cfg).labels
    assert {k: v.label for k, v in first.items()} == {k: v.label for k, v in second.items()}


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_oracle_equivalence_property(seed):
    rng = random.Random(seed)
    docs = grid_vocab_corpus(rng, rng.randint(2, 10))
    t1 = rng.choice([0.3, 0.5, 0.7])
    t2 = rng.choice([0.3, 0.5])
    model = fit(docs, min_df=1)
    vectors = [embed(model, d) for d in docs]
    ids = [d.id for d in docs]
    rows = []
    for vec in vectors:
        row = [0.0] * len(model.vocabulary)
        for dim, w in vec.weights.items():
            row[dim] = w
        rows.append(row)
    got = set(cluster_batch(ids, vectors, ClusterParams(t1=t1, t2=t2)))
    expected = oracles.batch_partition(ids, oracles.cosine_matrix(rows), t1, t2)
    assert got == expected
