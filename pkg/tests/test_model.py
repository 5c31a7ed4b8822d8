import sys

import pytest

from src.rpn.errors import FiringError
from src.rpn.model import (
    EMPTY_ABSTRACT,
    FiringEvent,
    Marking,
    RpnDef,
    ScriptStep,
    Transition,
    TransitionKind,
    TreeState,
    abstraction,
    canonical_vertices,
    enabled,
    fire,
    fire_script,
    fire_sequence,
)
from src.rpn.validation import validate, validate_all, validate_state

U = Marking.unit


class TestMarking:
    def test_zero_entries_are_dropped(self):
        assert Marking.of({'p': 0, 'q': 2}) == Marking.of(q=2)
        assert Marking.of({'p': 0}).is_zero

    def test_pointwise_order(self):
        assert U('p') <= U('p', 'q')
        assert not U('p', 'p') <= U('p', 'q')
        assert Marking.zero() <= U('p')

    def test_arithmetic(self):
        m = U('p') + Marking.of(p=1, q=2)
        assert m['p'] == 2 and m['q'] == 2 and m['r'] == 0
        assert m - U('q') == Marking.of(p=2, q=1)
        with pytest.raises(ValueError):
            U('p') - U('q')

    def test_text(self):
        assert str(Marking.zero()) == '0'
        assert str(Marking.of(p=1, q=2)) == 'p+2q'
        assert Marking.of(q=2, p=1).key() == 'p:1,q:2'


class TestValidate:
    def test_phases_is_valid(self, phases):
        assert validate(phases.net) == []

    def test_missing_start(self):
        net = RpnDef(('p',), (Transition('t', TransitionKind.ABSTRACT, U('p'), U('p')),))
        assert [str(v) for v in validate(net)] == ['missing-start(t)']

    def test_cut_with_post(self):
        net = RpnDef(('p',), (Transition('tau', TransitionKind.CUT, U('p'), U('p')),))
        assert [v.code for v in validate(net)] == ['cut-has-post']

    def test_undeclared_and_duplicate(self):
        net = RpnDef(('p', 'p'), (Transition('t', TransitionKind.ELEMENTARY, U('q'), U('p')),))
        codes = sorted(v.code for v in validate(net))
        assert codes == ['duplicate-place', 'undeclared-place']

    def test_state_edge_must_be_abstract_post(self, phases):
        s = TreeState.build(0, {0: Marking.zero(), 1: U('p_beg')}, {1: 0}, {1: U('p_beg')})
        assert [v.code for v in validate_state(phases.net, s)] == ['edge-not-abstract-post']

    def test_validate_all_summary(self, phases):
        states = {name: st.state for name, st in phases.states.items()}
        assert validate_all(phases.net, states) == {'valid': True, 'messages': []}


class TestFiring:
    def test_enabled(self, phases):
        s = phases.state('sIni').state
        assert enabled(phases.net, s, FiringEvent(0, 't_beg'))
        assert not enabled(phases.net, s, FiringEvent(0, 't_b1'))

    def test_unknown_vertex_and_transition(self, phases):
        s = phases.state('sIni').state
        with pytest.raises(FiringError) as err:
            enabled(phases.net, s, FiringEvent(7, 't_beg'))
        assert err.value.code == 'unknown-vertex'
        with pytest.raises(FiringError) as err:
            enabled(phases.net, s, FiringEvent(0, 'nope'))
        assert err.value.code == 'unknown-transition'

    def test_abstract_creates_child(self, phases):
        s = phases.state('sIni').state
        after, created = fire(phases.net, s, FiringEvent(0, 't_beg'))
        assert created == 1
        assert after.markings[0].is_zero
        assert after.markings[1] == U('p_beg')
        assert after.edge[1] == U('p_fin')
        assert after.parent[1] == 0

    def test_cut_refunds_parent(self, phases):
        named = phases.state('sRight')
        w, v = named.names['w'], named.names['v']
        after, created = fire(phases.net, named.state, FiringEvent(w, 't_tau2'))
        assert created is None
        assert w not in after.markings
        assert after.markings[v] == U('p_b2')
        assert after.size == 2

    def test_cut_at_root_empties_tree(self, phases):
        s = phases.state('sBeg').state
        after, _ = fire(phases.net, s, FiringEvent(0, 't_tau1'))
        assert after.is_empty
        assert after.next_id == s.next_id

    def test_not_enabled(self, phases):
        s = phases.state('sIni').state
        with pytest.raises(FiringError) as err:
            fire(phases.net, s, FiringEvent(0, 't_tau1'))
        assert err.value.code == 'not-enabled'

    def test_fire_does_not_mutate_input(self, phases):
        s = phases.state('sRight').state
        before = (dict(s.markings), dict(s.parent), dict(s.edge), s.next_id)
        fire(phases.net, s, FiringEvent(2, 't_tau2'))
        assert (dict(s.markings), dict(s.parent), dict(s.edge), s.next_id) == before

    def test_vertex_count_changes(self, phases):
        s = phases.state('sRight').state
        assert fire(phases.net, s, FiringEvent(2, 't_tau2'))[0].size == s.size - 1
        s2 = fire(phases.net, phases.state('sIni').state, FiringEvent(0, 't_beg'))[0]
        assert s2.size == 2
        assert fire(phases.net, s2, FiringEvent(1, 't_a1'))[0].size == 2


class TestSequences:
    def test_empty_sequence_is_identity(self, phases):
        s = phases.state('sIni').state
        assert fire_sequence(phases.net, s, []) == s

    def test_create_then_cut(self, phases):
        s = phases.state('sIni').state
        final = fire_sequence(phases.net, s, [FiringEvent(0, 't_beg'), FiringEvent(1, 't_tau1')])
        assert final.vertices == (0,)
        assert final.markings[0] == U('p_fin')

    def test_error_carries_step(self, phases):
        s = phases.state('sIni').state
        with pytest.raises(FiringError) as err:
            fire_sequence(phases.net, s, [FiringEvent(0, 't_beg'), FiringEvent(0, 't_beg')])
        assert err.value.code == 'not-enabled-at-step(1)'
        assert err.value.step == 1

    def test_script_aliases(self, phases):
        named = phases.state('sIni')
        steps = [ScriptStep('r', 't_beg', 'v'), ScriptStep('v', 't_tau1')]
        final, events, scope = fire_script(phases.net, named.state, named.names, steps)
        assert scope['v'] == 1
        assert events == [FiringEvent(0, 't_beg'), FiringEvent(1, 't_tau1')]
        assert final.markings == {0: U('p_fin')}

    def test_script_unknown_alias(self, phases):
        named = phases.state('sIni')
        with pytest.raises(FiringError) as err:
            fire_script(phases.net, named.state, named.names, [ScriptStep('x', 't_beg')])
        assert err.value.code == 'unknown-vertex'


class TestAbstraction:
    def test_renamed_copy(self):
        a = TreeState.build(0, {0: U('p'), 1: U('q')}, {1: 0}, {1: U('p')})
        b = TreeState.build(5, {5: U('p'), 9: U('q')}, {9: 5}, {9: U('p')})
        assert abstraction(a) == abstraction(b)

    def test_sibling_order(self):
        a = TreeState.build(0, {0: Marking.zero(), 1: U('p'), 2: U('q')}, {1: 0, 2: 0},
                            {1: U('p'), 2: U('p')})
        b = TreeState.build(0, {0: Marking.zero(), 1: U('q'), 2: U('p')}, {1: 0, 2: 0},
                            {1: U('p'), 2: U('p')})
        assert abstraction(a).key == abstraction(b).key

    def test_phases_right_state(self, phases):
        a = abstraction(phases.state('sRight').state)
        assert a.marking.is_zero
        (edge, child), = a.children
        assert edge == U('p_fin')
        (edge2, leaf), = child.children
        assert edge2 == U('p_b2')
        assert leaf.marking == U('p_end') and leaf.children == ()

    def test_empty(self):
        assert abstraction(TreeState.empty()) == EMPTY_ABSTRACT
        assert EMPTY_ABSTRACT.concretize().is_empty

    def test_concretize_round_trip(self, phases):
        s = phases.state('sRight').state
        a = abstraction(s)
        assert abstraction(a.concretize()) == a
        order = canonical_vertices(s)
        concrete = a.concretize()
        for i, v in enumerate(order):
            assert concrete.markings[i] == s.markings[v]

    def test_chain_deeper_than_recursion_limit(self):
        n = max(sys.getrecursionlimit(), 1000) + 500
        # raiz n-1, cada vértice v pendurado em v+1
        markings = {v: Marking.zero() for v in range(n)}
        markings[0] = U('p')
        s = TreeState.build(n - 1, markings, {v: v + 1 for v in range(n - 1)},
                            {v: U('q') for v in range(n - 1)})
        a = abstraction(s)
        assert a.size == n
        assert a.key.count('(') == n
        assert hash(a) == hash(abstraction(s))
        assert canonical_vertices(s) == list(range(n - 1, -1, -1))
        concrete = a.concretize()
        assert concrete.size == n and concrete.markings[n - 1] == U('p')
        assert abstraction(concrete) == a

    def test_cut_in_deep_chain(self):
        n = 1500
        s = TreeState.build(0, {v: Marking.zero() for v in range(n)},
                            {v: v - 1 for v in range(1, n)}, {v: U('p') for v in range(1, n)})
        net = RpnDef(('p',), (Transition('c', TransitionKind.CUT, Marking.zero()),))
        after, _ = fire(net, s, FiringEvent(1, 'c'))
        assert after.size == 1 and after.markings[0] == U('p')
