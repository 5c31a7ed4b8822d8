"""
Testes das transformações: enraizamento, T_ret, N̂ e normalização onisciente
"""

import pytest

from src.rpn.errors import ConstructionError
from src.rpn.model import (
    FiringEvent,
    Marking,
    RpnDef,
    TransitionKind,
    TreeState,
    abstraction,
    fire_sequence,
)
from src.rpn.reduce import (
    build_hat,
    build_hat_el,
    created_vertices,
    expand_hat_sequence,
    is_omniscient,
    make_rooted,
    omniscient_normalize,
    returning_transitions,
    root_sequence,
    shortcut_id,
    translate_rooted_sequence,
    unfold_initial_state,
)

U = Marking.unit
E = FiringEvent


@pytest.fixture(scope='module')
def phases_hat(phases):
    return build_hat(phases.net)


class TestMakeRooted:
    def test_single_vertex_is_unchanged(self, phases):
        s = phases.state('sIni').state
        rooted = make_rooted(phases.net, s)
        assert rooted.net is phases.net
        assert rooted.initial_marking == U('p_ini')

    def test_three_vertex_state(self, phases):
        s = phases.state('sRight').state
        rooted = make_rooted(phases.net, s)
        assert len(rooted.net.places) == len(phases.net.places) + 2
        assert len(rooted.net.abstract) == len(phases.net.abstract) + 2
        assert rooted.initial_marking == U(rooted.vertex_place[1])
        spawner = rooted.net.transition(rooted.vertex_transition[1])
        assert spawner.kind is TransitionKind.ABSTRACT
        assert spawner.post == U('p_fin')
        assert spawner.start == U(rooted.vertex_place[2])

    def test_unfold_rebuilds_initial_state(self, phases):
        s = phases.state('sRight').state
        rooted = make_rooted(phases.net, s)
        events, vmap = unfold_initial_state(rooted)
        assert len(events) == 2
        rebuilt = fire_sequence(rooted.net, rooted.initial_state, events)
        assert abstraction(rebuilt) == abstraction(s)
        assert set(vmap) == set(s.vertices)

    def test_empty_state_is_rejected(self, phases):
        with pytest.raises(ConstructionError) as err:
            make_rooted(phases.net, TreeState.empty())
        assert err.value.code == 'empty-initial-state'

    def test_translate_drops_spawners(self, phases):
        s = phases.state('sRight').state
        rooted = make_rooted(phases.net, s)
        unfold, vmap = unfold_initial_state(rooted)
        tail = [E(vmap[2], 't_tau2'), E(vmap[1], 't_b3'), E(vmap[1], 't_tau2')]
        translated = translate_rooted_sequence(rooted, phases.net, unfold + tail)
        assert translated == [E(2, 't_tau2'), E(1, 't_b3'), E(1, 't_tau2')]
        assert fire_sequence(phases.net, s, translated).markings == {0: U('p_fin')}


class TestReturning:
    def test_phases_returning_set(self, phases):
        returning, witnesses = returning_transitions(phases.net)
        assert returning == frozenset({'t_beg', 't_a2', 't_b2'})
        for tid in returning:
            start = phases.net.transition(tid).start
            final = fire_sequence(phases.net, TreeState.single(start), witnesses[tid])
            assert final.is_empty

    def test_no_cuts_means_nothing_returns(self, antichain):
        kept = RpnDef(antichain.net.places, tuple(t for t in antichain.net.transitions
                                             if t.kind is not TransitionKind.CUT))
        assert returning_transitions(kept)[0] == frozenset()

    def test_antichain_returning_set(self, antichain):
        assert returning_transitions(antichain.net)[0] == frozenset({'t_r', 't_l'})


class TestHat:
    def test_shortcuts(self, phases_hat):
        assert phases_hat.shortcut == {t: shortcut_id(t) for t in ('t_beg', 't_a2', 't_b2')}
        short = phases_hat.net.transition('t_beg^r')
        assert short.kind is TransitionKind.ELEMENTARY
        assert short.pre == U('p_ini') and short.post == U('p_fin')
        assert phases_hat.original_of['t_b2^r'] == 't_b2'

    def test_hat_el_has_no_cuts_and_zeroed_outputs(self, phases_hat):
        el = build_hat_el(phases_hat)
        ids = [t.id for t in el.transitions]
        assert 't_tau1' not in ids and 't_tau2' not in ids
        assert el.transition('t_beg').post.is_zero
        assert el.transition('t_beg^r').post == U('p_fin')
        assert len(el.transitions) == 9 + 3

    def test_expand_shortcut_sequence(self, phases, phases_hat):
        s = phases.state('sIni').state
        expanded = expand_hat_sequence(phases_hat, s, [E(0, 't_beg^r')])
        assert expanded[0] == E(0, 't_beg')
        final = fire_sequence(phases.net, s, expanded)
        assert final.markings == {0: U('p_fin')}

    def test_root_sequence_from_petri_steps(self, phases, phases_hat):
        s = phases.state('sBeg').state
        seq = root_sequence(phases_hat, s, ['t_b1', 't_b2^r', 't_b3'])
        final = fire_sequence(phases.net, s, seq)
        assert final.markings[0] == U('p_end')
        assert final.size == 1

    def test_expand_rejects_disabled_step(self, phases, phases_hat):
        with pytest.raises(ConstructionError) as err:
            expand_hat_sequence(phases_hat, phases.state('sIni').state, [E(0, 't_a1')])
        assert err.value.code == 'sequence-not-fireable'


class TestOmniscient:
    def test_script_sequence_is_normalized(self, phases, phases_hat):
        s = phases.state('sIni').state
        seq = [E(0, 't_beg'), E(1, 't_b1'), E(1, 't_b2'), E(2, 't_sa'), E(2, 't_tau2'),
               E(1, 't_b3'), E(1, 't_tau2')]
        assert not is_omniscient(phases.net, s, seq)
        normalized = omniscient_normalize(phases_hat, s, seq)
        assert normalized == [E(0, 't_beg^r')]
        final = fire_sequence(phases_hat.net, s, normalized)
        assert abstraction(final) == abstraction(fire_sequence(phases.net, s, seq))

    def test_surviving_threads_are_kept(self, phases, phases_hat):
        s = phases.state('sIni').state
        seq = [E(0, 't_beg'), E(1, 't_a1'), E(1, 't_a2'), E(2, 't_tau1')]
        normalized = omniscient_normalize(phases_hat, s, seq)
        assert normalized == [E(0, 't_beg'), E(1, 't_a1'), E(1, 't_a2^r')]
        assert is_omniscient(phases_hat.net, s, normalized)
        final, created = created_vertices(phases_hat.net, s, normalized)
        assert created == {1}
        assert final.markings[1] == U('p_a2')
