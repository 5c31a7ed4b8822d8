"""
Testes das quase-ordens ≼ e ≼_r
"""

import sys
from itertools import combinations

from src.data.generate_random_nets import antichain_state
from src.rpn.model import Marking, TreeState
from src.rpn.order import Embedding, equivalent, is_embedding, leq, leq_rooted


def test_embedding_embeds_but_not_rooted(embedding):
    s, sprime = embedding.state('s'), embedding.state('sprime')
    emb = leq(s.state, sprime.state)
    assert emb is not None
    assert is_embedding(s.state, sprime.state, emb)
    assert emb.map == {s.names['a']: sprime.names['y'], s.names['b']: sprime.names['z']}
    assert leq_rooted(s.state, sprime.state) is None


def test_reverse_direction_fails(embedding):
    assert leq(embedding.state('sprime').state, embedding.state('s').state) is None


def test_empty_state_is_below_everything(embedding):
    empty = TreeState.empty()
    s = embedding.state('s').state
    assert leq(empty, s) == Embedding({})
    assert leq(s, empty) is None
    assert leq_rooted(empty, empty) == Embedding({})
    assert leq_rooted(empty, s) is None


def test_reflexive_with_identity(embedding):
    s = embedding.state('sprime').state
    emb = leq_rooted(s, s)
    assert emb is not None and emb.map == {v: v for v in s.vertices}


def test_children_need_distinct_images():
    parent_two = TreeState.build(0, {0: Marking.zero(), 1: Marking.unit('p'), 2: Marking.unit('p')},
                                 {1: 0, 2: 0}, {1: Marking.zero(), 2: Marking.zero()})
    parent_one = TreeState.build(0, {0: Marking.zero(), 1: Marking.unit('p', 'p')},
                                 {1: 0}, {1: Marking.zero()})
    assert leq(parent_two, parent_one) is None
    assert leq(parent_one, parent_two) is None


def test_three_states_are_incomparable(antichain):
    states = [antichain.state(name).state for name in ('s1', 's2', 's3')]
    for a, b in combinations(states, 2):
        assert leq(a, b) is None
        assert leq(b, a) is None


def test_generated_family_matches_fixture(antichain):
    assert equivalent(antichain_state(1), antichain.state('s1').state)
    assert equivalent(antichain_state(3), antichain.state('s3').state)
    for i, j in combinations(range(1, 7), 2):
        assert leq(antichain_state(i), antichain_state(j)) is None


def test_is_embedding_rejects_broken_maps(embedding):
    s, sprime = embedding.state('s'), embedding.state('sprime')
    a, b = s.names['a'], s.names['b']
    y, z, w = sprime.names['y'], sprime.names['z'], sprime.names['w']
    assert not is_embedding(s.state, sprime.state, Embedding({a: y, b: w}))
    assert not is_embedding(s.state, sprime.state, Embedding({a: y}))
    assert is_embedding(s.state, sprime.state, Embedding({a: y, b: z}))


def _chain(n):
    markings = {v: Marking.zero() for v in range(n)}
    markings[n - 1] = Marking.unit('p')
    parent = {v: v - 1 for v in range(1, n)}
    edge = {v: Marking.unit('p') for v in range(1, n)}
    return TreeState.build(0, markings, parent, edge)


def test_long_chains():
    short, long = _chain(100), _chain(200)
    emb = leq(short, long)
    assert emb is not None and is_embedding(short, long, emb)
    assert emb[0] == 100
    assert leq(long, short) is None
    assert leq_rooted(short, long) is None


def test_chains_deeper_than_recursion_limit():
    n = max(sys.getrecursionlimit(), 1000) + 100
    s = _chain(n)
    emb = leq(s, s)
    assert emb is not None and emb.map == {v: v for v in range(n)}
    assert leq_rooted(s, s) is not None
    assert equivalent(s, _chain(n))
    longer = _chain(n + 100)
    emb = leq(s, longer)
    assert emb is not None and emb[0] == 100 and is_embedding(s, longer, emb)
    assert leq(longer, s) is None
