"""
Funções de validação de redes e estados

Violações são dados: ``validate`` devolve a lista (vazia quando a rede é
válida) e ``require_valid`` levanta ``ValidationError`` com todas elas.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from src.rpn.errors import ValidationError
from src.rpn.model import Marking, RpnDef, TransitionKind, TreeState


@dataclass(frozen=True)
class Violation:
    code: str
    item: str
    detail: str = ''

    def __str__(self) -> str:
        text = f'{self.code}({self.item})'
        return f'{text}: {self.detail}' if self.detail else text


def _undeclared(marking: Optional[Marking], declared: set) -> List[str]:
    if marking is None:
        return []
    return [p for p in marking.support if p not in declared]


def validate(defn: RpnDef) -> List[Violation]:
    """
    Valida os invariantes de RpnDef

    Args:
        defn: Rede a validar

    Returns:
        Lista de violações, vazia se a rede for válida
    """
    violations: List[Violation] = []

    for place, n in Counter(defn.places).items():
        if n > 1:
            violations.append(Violation('duplicate-place', place))
    for tid, n in Counter(t.id for t in defn.transitions).items():
        if n > 1:
            violations.append(Violation('duplicate-transition', tid))

    declared = set(defn.places)
    for t in defn.transitions:
        if t.kind is TransitionKind.ABSTRACT and t.start is None:
            violations.append(Violation('missing-start', t.id))
        if t.kind is not TransitionKind.ABSTRACT and t.start is not None:
            violations.append(Violation('unexpected-start', t.id))
        if t.kind is TransitionKind.CUT and t.post is not None:
            violations.append(Violation('cut-has-post', t.id))
        if t.kind is not TransitionKind.CUT and t.post is None:
            violations.append(Violation('missing-post', t.id))
        for place in _undeclared(t.pre, declared) + _undeclared(t.post, declared) + \
                _undeclared(t.start, declared):
            violations.append(Violation('undeclared-place', t.id, place))

    return violations


def require_valid(defn: RpnDef) -> RpnDef:
    violations = validate(defn)
    if violations:
        raise ValidationError(violations)
    return defn


def validate_state(defn: RpnDef, s: TreeState, name: str = 'state') -> List[Violation]:
    """
    Valida um estado contra a rede: lugares declarados, árvore conexa e
    rótulos de aresta iguais a algum W+(t) de transição abstrata
    """
    if s.is_empty:
        return []
    violations: List[Violation] = []
    declared = set(defn.places)
    posts = {t.output for t in defn.abstract}

    if s.root not in s.markings or s.root in s.parent:
        violations.append(Violation('bad-root', name))
        return violations

    for v in s.vertices:
        for place in _undeclared(s.markings[v], declared):
            violations.append(Violation('undeclared-place', f'{name}.{v}', place))
        if v == s.root:
            continue
        if v not in s.parent or s.parent[v] not in s.markings:
            violations.append(Violation('disconnected-vertex', f'{name}.{v}'))
            continue
        if s.edge.get(v) not in posts:
            violations.append(Violation('edge-not-abstract-post', f'{name}.{v}', str(s.edge.get(v))))

    reachable = set(s.descendants(s.root)) if not violations else set(s.vertices)
    for v in s.vertices:
        if v not in reachable:
            violations.append(Violation('disconnected-vertex', f'{name}.{v}'))
    return violations


def validate_all(defn: RpnDef, states: Mapping[str, TreeState]) -> Dict[str, Any]:
    """
    Valida rede e estados de uma vez

    Returns:
        Dicionário com 'valid' e 'messages'
    """
    messages = [str(v) for v in validate(defn)]
    for name, s in states.items():
        messages.extend(str(v) for v in validate_state(defn, s, name))
    return {'valid': not messages, 'messages': messages}


def fresh_ids_clash(defn: RpnDef, places: Iterable[str], transitions: Iterable[str]) -> Tuple[str, ...]:
    """Ids novos de uma construção que já existem na rede de origem"""
    taken = set(defn.places) | {t.id for t in defn.transitions}
    return tuple(i for i in list(places) + list(transitions) if i in taken)
