"""
Exemplos de referência: sequência de disparos, ordem, grafo abstrato,
quádrupla de decisões, transições que retornam e a rede contadora
"""

from itertools import permutations, product

from src.cli.rpnfile import parse_script
from src.data.generate_random_nets import antichain_state
from src.rpn.absgraph import build_abstract_graph
from src.rpn.decide import decide_boundedness, decide_cut, decide_finiteness, decide_termination
from src.rpn.explore import language_sample
from src.rpn.model import FiringEvent, Marking, TreeState, fire_script, fire_sequence, trace
from src.rpn.order import leq, leq_rooted
from src.rpn.petri import PetriNet, PetriTransition, pn_bounded, pn_coverable, pn_terminates
from src.rpn.reduce import returning_transitions

U = Marking.unit
Z = Marking.zero()


def _shape(s):
    """(marcação, pai, rótulo da aresta) por vértice"""
    return {v: (s.markings[v], s.parent.get(v), s.edge.get(v)) for v in s.vertices}


def test_phases_script_replay(phases, fixtures_dir):
    named = phases.state('sIni')
    steps = parse_script((fixtures_dir / 'phases.script').read_text(encoding='utf-8'))
    final, events, scope = fire_script(phases.net, named.state, named.names, steps)
    states = trace(phases.net, named.state, events)

    assert [s.size for s in states] == [1, 2, 2, 3, 3, 2, 2, 1]
    assert scope == {'r': 0, 'v': 1, 'w': 2}
    expected = [
        {0: (U('p_ini'), None, None)},
        {0: (Z, None, None), 1: (U('p_beg'), 0, U('p_fin'))},
        {0: (Z, None, None), 1: (U('p_b1'), 0, U('p_fin'))},
        {0: (Z, None, None), 1: (Z, 0, U('p_fin')), 2: (U('p_beg'), 1, U('p_b2'))},
        {0: (Z, None, None), 1: (Z, 0, U('p_fin')), 2: (U('p_end'), 1, U('p_b2'))},
        {0: (Z, None, None), 1: (U('p_b2'), 0, U('p_fin'))},
        {0: (Z, None, None), 1: (U('p_end'), 0, U('p_fin'))},
        {0: (U('p_fin'), None, None)},
    ]
    assert [_shape(s) for s in states] == expected
    assert final.markings == {0: U('p_fin')}


def test_embedding_order(embedding):
    s, sprime = embedding.state('s').state, embedding.state('sprime').state
    assert leq(s, sprime) is not None
    assert leq_rooted(s, sprime) is None


def test_antichain_thirty_checks():
    family = {n: antichain_state(n) for n in range(1, 7)}
    pairs = list(permutations(family, 2))
    assert len(pairs) == 30
    for i, j in pairs:
        assert leq(family[i], family[j]) is None


def test_phases_abstract_graph(phases):
    g = build_abstract_graph(phases.net, U('p_ini'))
    assert len(g.vertices) == 4
    assert set(g.edges) == {
        ('r', 'v_t_beg'),
        ('v_t_beg', 'v_t_a2'), ('v_t_beg', 'v_t_b2'),
        ('v_t_a2', 'v_t_a2'), ('v_t_a2', 'v_t_b2'),
        ('v_t_b2', 'v_t_a2'), ('v_t_b2', 'v_t_b2'),
    }


def test_bounded_yet_infinite(phases):
    s = TreeState.single(U('p_ini'))
    termination = decide_termination(phases.net, s)
    assert not termination.answer and termination.witness.kind == 'cycle'
    assert decide_boundedness(phases.net, s).answer
    assert not decide_finiteness(phases.net, s).answer
    assert not decide_cut(phases.net, s).answer


def test_phases_returning_witnesses(phases):
    returning, witnesses = returning_transitions(phases.net)
    assert returning == {'t_beg', 't_a2', 't_b2'}
    for tid in returning:
        s = TreeState.single(phases.net.transition(tid).start)
        assert fire_sequence(phases.net, s, witnesses[tid]).is_empty
        assert all(isinstance(e, FiringEvent) for e in witnesses[tid])


def test_counter_net_language(counter):
    net = PetriNet(counter.net.places, tuple(PetriTransition(t.id, t.pre, t.output, t.label)
                                          for t in counter.net.transitions))
    assert pn_coverable(net, U('p1'), U('p3'))
    assert not pn_bounded(net, U('p1'))
    assert not pn_terminates(net, U('p1'))

    sample = language_sample(counter.net, counter.state('s0').state, counter.target('final').states, 5)
    expected = {
        ('a',) * m + ('b',) * n + ('c',) * p
        for m, n, p in product(range(6), repeat=3)
        if m >= n >= p and m + n + p <= 5
    }
    assert sample.words == expected
