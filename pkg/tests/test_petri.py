"""
Testes do motor de Redes de Petri: cobertura, Karp–Miller e auto-cobertura
"""

import logging

import numpy as np
import pytest

from src.rpn.errors import CapExceededError
from src.rpn.model import Marking
from src.rpn.petri import (
    OMEGA,
    AnalysisStats,
    OmegaMarking,
    PetriNet,
    PetriTransition,
    UpwardClosedSet,
    backward_coverability,
    find_self_covering,
    karp_miller,
    karp_miller_frame,
    km_coverable,
    pn_bounded,
    pn_cover_witness,
    pn_coverable,
    pn_reach_bounded,
    pn_terminates,
)

U = Marking.unit


def _petri(defn):
    return PetriNet(defn.places, tuple(PetriTransition(t.id, t.pre, t.output, t.label)
                                       for t in defn.transitions))


@pytest.fixture(scope='module')
def counter_net(counter):
    return _petri(counter.net)


@pytest.fixture
def chain_net():
    return PetriNet(('p1', 'p2', 'p3'), (
        PetriTransition('t1', U('p1'), U('p2')),
        PetriTransition('t2', U('p2'), U('p3')),
    ))


def _random_petri(rng, places=None, transitions=None):
    """Rede aleatória com até 5 lugares, até 7 transições e pesos até 2"""
    places = places or int(rng.integers(1, 6))
    transitions = transitions or int(rng.integers(1, 8))
    names = tuple(f'p{i}' for i in range(places))

    def bag():
        return Marking.of({p: int(rng.integers(0, 3)) for p in names})

    ts = []
    for i in range(transitions):
        pre = bag()
        if pre.is_zero:
            pre = U(names[int(rng.integers(places))])
        ts.append(PetriTransition(f't{i}', pre, bag()))
    return PetriNet(names, tuple(ts))


class TestCoverability:
    def test_counter_target_is_coverable(self, counter_net):
        assert pn_coverable(counter_net, U('p1'), U('p3'))
        witness = pn_cover_witness(counter_net, U('p1'), U('p3'))
        assert witness is not None
        assert counter_net.fire_all(U('p1'), witness) >= U('p3')

    def test_unreachable_place(self, counter_net):
        assert not pn_coverable(counter_net, U('p2'), U('p4'))
        assert pn_cover_witness(counter_net, U('p2'), U('p4')) is None

    def test_start_already_covers(self, counter_net):
        result = backward_coverability(counter_net, U('p3', 'p5'), U('p3'), witness_cap=10)
        assert result.coverable and result.witness == ()

    def test_witness_cap(self, counter_net):
        result = backward_coverability(counter_net, U('p1'), Marking.of(p4=3), witness_cap=1)
        assert result.coverable
        assert result.witness is None and result.witness_truncated

    def test_stats_count_calls(self, counter_net):
        stats = AnalysisStats()
        pn_coverable(counter_net, U('p1'), U('p3'), stats=stats)
        pn_coverable(counter_net, U('p1'), U('p5'), stats=stats)
        assert stats.coverability_calls == 2
        doc = stats.as_dict()
        assert doc['coverability_calls'] == 2 and doc['km_nodes'] == 0
        assert doc['backward_elements'] > 0
        assert doc['largest_basis'] >= 1

    def test_plain_query_does_not_log_truncation(self, counter_net, caplog):
        with caplog.at_level(logging.INFO, logger='src.rpn.petri'):
            assert pn_coverable(counter_net, U('p1'), Marking.of(p4=3))
        assert not caplog.records
        with caplog.at_level(logging.INFO, logger='src.rpn.petri'):
            backward_coverability(counter_net, U('p1'), Marking.of(p4=3), witness_cap=1)
        assert len(caplog.records) == 1

    def test_agrees_with_karp_miller(self, rng):
        compared = 0
        for _ in range(200):
            net = _random_petri(rng)
            m0 = Marking.of({p: int(rng.integers(0, 2)) for p in net.places})
            target = Marking.of({p: int(rng.integers(0, 3)) for p in net.places})
            try:
                expected = km_coverable(net, m0, target, node_cap=5_000)
            except CapExceededError:
                continue
            assert pn_coverable(net, m0, target) == expected
            compared += 1
        assert compared >= 100


def test_upward_closed_basis_stays_an_antichain():
    ucs = UpwardClosedSet()
    assert ucs.add(np.array([2, 1]))
    assert ucs.add(np.array([1, 2]))
    assert not ucs.add(np.array([2, 2]))
    assert ucs.add(np.array([1, 1]))
    assert len(ucs) == 1
    assert ucs.is_antichain()
    assert ucs.contains(np.array([5, 1]))
    assert not ucs.contains(np.array([0, 7]))


class TestKarpMiller:
    def test_counter_is_unbounded(self, counter_net):
        assert not pn_bounded(counter_net, U('p1'))
        frame = karp_miller_frame(counter_net, U('p1'))
        assert (frame['p4'] == 'w').any()
        assert frame.loc[0, 'p1'] == 1
        assert frame['parent'].isna().sum() == 1

    def test_chain_is_bounded(self, chain_net):
        assert pn_bounded(chain_net, U('p1'))
        nodes = karp_miller(chain_net, U('p1'))
        assert [n.transition for n in nodes] == [None, 't1', 't2']

    def test_node_cap(self, counter_net):
        with pytest.raises(CapExceededError) as err:
            karp_miller(counter_net, U('p1'), node_cap=2)
        assert err.value.cap == 'km_nodes'


class TestTermination:
    def test_counter_has_self_covering_loop(self, counter_net):
        found = find_self_covering(counter_net, U('p1'))
        assert found is not None and found.loop
        m = counter_net.fire_all(U('p1'), found.prefix)
        assert counter_net.fire_all(m, found.loop) >= m
        assert not pn_terminates(counter_net, U('p1'))

    def test_chain_terminates(self, chain_net):
        assert pn_terminates(chain_net, U('p1'))
        assert pn_terminates(chain_net, U('p1', 'p1', 'p2'))

    def test_zero_guard_loops(self):
        net = PetriNet(('p',), (PetriTransition('t', Marking.zero(), U('p')),))
        found = find_self_covering(net, Marking.zero())
        assert found is not None and found.prefix == () and found.loop == ('t',)


class TestBoundedReach:
    def test_exhausts_finite_space(self, chain_net):
        reached, exhausted = pn_reach_bounded(chain_net, U('p1'), cap_steps=10, cap_states=10)
        assert exhausted
        assert reached == frozenset({U('p1'), U('p2'), U('p3')})

    def test_step_cap(self, chain_net):
        reached, exhausted = pn_reach_bounded(chain_net, U('p1'), cap_steps=1, cap_states=10)
        assert not exhausted
        assert reached == frozenset({U('p1'), U('p2')})

    def test_state_cap(self, counter_net):
        reached, exhausted = pn_reach_bounded(counter_net, U('p1'), cap_steps=100, cap_states=5)
        assert not exhausted and len(reached) == 5


class TestOmegaMarking:
    def test_omega_absorbs_arithmetic(self):
        m = OmegaMarking(np.array([OMEGA, 2.0]))
        fired = m.fire(np.array([5.0, 1.0]), np.array([3.0, 0.0]))
        assert fired[0] == OMEGA and fired[1] == 1.0
        assert fired.has_omega and not OmegaMarking(np.array([1.0, 0.0])).has_omega

    def test_omega_dominates_every_count(self):
        m = OmegaMarking(np.array([OMEGA, 0.0]))
        assert m.covers(np.array([10**9, 0]))
        assert not m.covers(np.array([0, 1]))
        assert OmegaMarking(np.array([10**9, 0.0])) <= m

    def test_acceleration_only_on_strictly_increased_places(self):
        ancestor = OmegaMarking(np.array([1.0, 2.0, 0.0]))
        grown = OmegaMarking(np.array([1.0, 3.0, 1.0]))
        assert grown.accelerate(ancestor) == OmegaMarking(np.array([1.0, OMEGA, OMEGA]))
        equal = OmegaMarking(np.array([1.0, 2.0, 0.0]))
        assert equal.accelerate(ancestor) is equal
        incomparable = OmegaMarking(np.array([0.0, 5.0, 5.0]))
        assert incomparable.accelerate(ancestor) is incomparable

    def test_row_rendering(self, counter_net):
        m = OmegaMarking.of(counter_net, U('p1', 'p1'))
        row = m.accelerate(OmegaMarking.of(counter_net, U('p1'))).as_row(counter_net.places)
        assert row == {'p1': 'w', 'p2': 0, 'p3': 0, 'p4': 0, 'p5': 0}
