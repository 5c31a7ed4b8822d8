"""
Testes dos limites configuráveis
"""

import pytest

from src.cli.config import CAPS_ENV_VAR, DEFAULT_CAPS, ID_PREFIXES, ConfigError, parse_caps, resolve_caps
from src.rpn.constructions import cut_to_cover_construct
from src.rpn.reduce import make_rooted


def test_parse_caps():
    assert parse_caps('eps_budget=3, km_nodes=10') == {'eps_budget': 3, 'km_nodes': 10}
    assert parse_caps('') == {}
    assert parse_caps(' , ') == {}


@pytest.mark.parametrize('text', ['foo=1', 'eps_budget', 'eps_budget=x', 'eps_budget=-1'])
def test_bad_caps(text):
    with pytest.raises(ConfigError) as err:
        parse_caps(text)
    assert err.value.code == 'bad-caps'


def test_precedence():
    environ = {CAPS_ENV_VAR: 'eps_budget=3,km_nodes=7'}
    caps = resolve_caps({'eps_budget': 5, 'witness_steps': None}, environ)
    assert caps['eps_budget'] == 5
    assert caps['km_nodes'] == 7
    assert caps['witness_steps'] == DEFAULT_CAPS['witness_steps']


def test_defaults_without_environment():
    assert resolve_caps(environ={}) == DEFAULT_CAPS


def test_constructions_use_configured_prefixes(phases):
    s0 = phases.state('sRight').state
    rooted = make_rooted(phases.net, s0)
    added = {t.id for t in rooted.net.transitions} - {t.id for t in phases.net.transitions}
    assert added and all(tid.startswith(ID_PREFIXES['rooted']) for tid in added)
    net, _, _ = cut_to_cover_construct(phases.net, phases.state('sBeg').state)
    assert net.has_transition(ID_PREFIXES['cut_to_cover'] + 'start')
