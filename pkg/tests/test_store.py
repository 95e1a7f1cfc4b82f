import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgforge.rdf import IRI, Dataset, Graph, Literal
from kgforge.store import DEFAULT_GRAPH, INDEXES, TripleStore


def ex(local):
    return IRI("http://ex.org/" + local)


a, b, c, d, p, q = (ex(x) for x in "abcdpq")


@pytest.fixture
def small_store():
    st_ = TripleStore()
    st_.import_(Graph([(a, p, b), (a, q, c), (d, p, b)]))
    return st_


def test_import_counts_and_idempotence():
    store = TripleStore()
    g = Graph([(a, p, b), (a, q, c), (d, p, b)])
    assert store.import_(g) == 3
    assert store.import_(g) == 0


def test_import_two_graphs_sharing_a_triple_adds_union_size():
    g1 = Graph([(a, p, b), (a, q, c)])
    g2 = Graph([(a, q, c), (d, p, b)])
    store = TripleStore()
    added = store.import_(g1, ex("target")) + store.import_(g2, ex("target"))
    assert added == len(set(g1) | set(g2)) == 3


def test_import_dataset_keeps_graph_names():
    ds = Dataset()
    ds.add((a, p, b))
    ds.add((a, p, c), ex("g"))
    store = TripleStore()
    assert store.import_(ds) == 2
    assert list(store.match((None, None, None), DEFAULT_GRAPH)) == [(a, p, b)]
    assert list(store.match((None, None, None), ex("g"))) == [(a, p, c)]
    assert store.graph_names() == [ex("g")]


def test_wildcard_on_empty_store():
    assert list(TripleStore().match((None, None, None))) == []


def test_subject_pattern(small_store):
    linear = [t for t in [(a, p, b), (a, q, c), (d, p, b)] if t[0] == a]
    assert sorted(small_store.match((a, None, None)), key=repr) == sorted(linear, key=repr)


def test_fully_ground_pattern(small_store):
    assert list(small_store.match((a, p, b))) == [(a, p, b)]


def test_unknown_graph_is_empty_not_error(small_store):
    assert list(small_store.match((None, None, None), ex("nope"))) == []


def test_same_triple_in_two_graphs_matched_once():
    store = TripleStore()
    store.add((a, p, b), ex("g1"))
    store.add((a, p, b), ex("g2"))
    assert list(store.match((None, None, None))) == [(a, p, b)]
    assert len(store) == 1
    store.remove((a, p, b), ex("g1"))
    assert len(store) == 1
    store.remove((a, p, b), ex("g2"))
    assert len(store) == 0


def test_stats_empty():
    s = TripleStore().stats()
    assert s.to_dict() == {
        "triple_count": 0,
        "graph_count": 0,
        "distinct_subjects": 0,
        "distinct_predicates": 0,
        "distinct_objects": 0,
    }


def test_stats_counts(small_store):
    triples = [(a, p, b), (a, q, c), (d, p, b)]
    s = small_store.stats()
    assert s.distinct_predicates == len({t[1] for t in triples}) == 2
    assert s.distinct_subjects == 2 and s.distinct_objects == 2
    assert s.triple_count == 3 and s.graph_count == 1


def test_stats_unchanged_after_duplicate_import(small_store):
    before = small_store.stats()
    small_store.import_(Graph([(a, p, b)]))
    assert small_store.stats() == before


def test_literal_subject_rejected():
    with pytest.raises(ValueError):
        TripleStore().add((Literal("x"), p, b))


def _random_store(rng, n):
    subjects = [ex(f"s{i}") for i in range(rng.randint(1, 40))]
    preds = [ex(f"p{i}") for i in range(rng.randint(1, 8))]
    objects = subjects[:10] + [Literal(str(i)) for i in range(20)]
    triples = {(rng.choice(subjects), rng.choice(preds), rng.choice(objects)) for _ in range(n)}
    store = TripleStore()
    graphs = [None, ex("g1"), ex("g2")]
    for t in triples:
        store.add(t, rng.choice(graphs))
    return store, triples, subjects, preds, objects


@pytest.mark.parametrize("seed", range(8))
def test_match_equals_linear_scan(seed):
    rng = random.Random(seed)
    store, triples, subjects, preds, objects = _random_store(rng, rng.choice([10, 500, 10_000]))
    candidates = [None]
    for _ in range(30):
        s = rng.choice([None, rng.choice(subjects)])
        pr = rng.choice([None, rng.choice(preds)])
        o = rng.choice([None, rng.choice(objects)])
        expected = {t for t in triples if (s is None or t[0] == s) and (pr is None or t[1] == pr) and (o is None or t[2] == o)}
        got = list(store.match((s, pr, o)))
        assert len(got) == len(set(got))
        assert set(got) == expected
        candidates.append(s)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_indexes_agree(seed):
    rng = random.Random(seed)
    store, triples, subjects, preds, objects = _random_store(rng, rng.randint(0, 300))
    for s, pr, o in itertools.product([None, rng.choice(subjects)], [None, rng.choice(preds)], [None, rng.choice(objects)]):
        results = [store.match_via(index, (s, pr, o)) for index in INDEXES]
        assert results[0] == results[1] == results[2] == set(store.match((s, pr, o)))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 2), st.integers(0, 5)), max_size=40), st.randoms())
def test_import_is_commutative(rows, rnd):
    graphs = [Graph((ex(f"s{s}"), ex(f"p{pr}"), ex(f"o{o}")) for s, pr, o in rows[i::3]) for i in range(3)]
    first, second = TripleStore(), TripleStore()
    for g in graphs:
        first.import_(g)
    shuffled = graphs[:]
    rnd.shuffle(shuffled)
    for g in shuffled:
        second.import_(g)
        second.import_(g)
    assert set(first.match()) == set(second.match())
