"""
Explorador limitado do espaço de estados de uma RPN

Oráculo independente das decisões (busca em largura sobre estados abstratos)
e motor de pertinência e amostragem de linguagens de cobertura.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from src.rpn.model import (
    AbstractState,
    FiringEvent,
    RpnDef,
    Transition,
    TreeState,
    abstraction,
    canonical_vertices,
    fire,
)
from src.rpn.order import leq

logger = logging.getLogger(__name__)

STEP_CAP = 'step cap'
STATE_CAP = 'state cap'

Word = Tuple[str, ...]


@dataclass(frozen=True)
class ExploreResult:
    states: FrozenSet[AbstractState]
    transitions: FrozenSet[Tuple[AbstractState, Optional[str], AbstractState]]
    exhausted: bool
    frontier_cut: Optional[str] = None

    @property
    def contains_empty(self) -> bool:
        return any(a.is_empty for a in self.states)


def successors(defn: RpnDef, a: AbstractState) -> Iterator[Tuple[int, Transition, AbstractState]]:
    """
    Sucessores de um estado abstrato, disparando cada (v, t) habilitado numa
    concretização canônica: vértices em ordem de criação, transições na
    ordem de declaração
    """
    s = a.concretize()
    for v in s.vertices:
        m = s.markings[v]
        for t in defn.transitions:
            if t.pre <= m:
                after, _ = fire(defn, s, FiringEvent(v, t.id))
                yield v, t, abstraction(after)


def explore(defn: RpnDef, s0: TreeState, cap_steps: int, cap_states: int) -> ExploreResult:
    """
    Busca em largura sobre Reach(N, s0) com deduplicação pela forma canônica

    Args:
        defn: Rede
        s0: Estado inicial
        cap_steps: Profundidade máxima
        cap_states: Número máximo de estados guardados
    """
    start = abstraction(s0)
    states = {start}
    edges = set()
    frontier = [start]
    depth = 0
    while frontier:
        if depth >= cap_steps:
            for a in frontier:
                for _, t, b in successors(defn, a):
                    if b not in states:
                        return ExploreResult(frozenset(states), frozenset(edges), False, STEP_CAP)
                    edges.add((a, t.label, b))
            return ExploreResult(frozenset(states), frozenset(edges), True)
        nxt: List[AbstractState] = []
        for a in frontier:
            for _, t, b in successors(defn, a):
                if b not in states:
                    if len(states) >= cap_states:
                        logger.info('exploração parou no limite de %d estados', cap_states)
                        return ExploreResult(frozenset(states), frozenset(edges), False, STATE_CAP)
                    states.add(b)
                    nxt.append(b)
                edges.add((a, t.label, b))
        frontier = nxt
        depth += 1
    return ExploreResult(frozenset(states), frozenset(edges), True)


def covers(a: AbstractState, target: Sequence[TreeState]) -> bool:
    """Algum s_f ≼ a"""
    concrete = a.concretize()
    return any(leq(sf, concrete) is not None for sf in target)


def replay_path(defn: RpnDef, s0: TreeState,
                path: Sequence[Tuple[int, str]]) -> List[FiringEvent]:
    """
    Converte passos (índice canônico do vértice, transição) de uma busca
    abstrata em eventos concretos a partir de s0
    """
    state = s0
    events: List[FiringEvent] = []
    for index, tid in path:
        e = FiringEvent(canonical_vertices(state)[index], tid)
        state, _ = fire(defn, state, e)
        events.append(e)
    return events


def _unwind(parents: Dict, key) -> List[Tuple[int, str]]:
    path: List[Tuple[int, str]] = []
    while parents[key] is not None:
        key, v, tid = parents[key]
        path.append((v, tid))
    path.reverse()
    return path


def find_cover(defn: RpnDef, s0: TreeState, target: Sequence[TreeState],
               cap_steps: int, cap_states: int) -> Optional[List[FiringEvent]]:
    """Sequência de s0 até um estado que cobre algum s_f, por busca em largura limitada"""
    start = abstraction(s0)
    parents: Dict[AbstractState, Optional[Tuple[AbstractState, int, str]]] = {start: None}
    queue = deque([(start, 0)])
    while queue:
        a, depth = queue.popleft()
        if covers(a, target):
            return replay_path(defn, s0, _unwind(parents, a))
        if depth >= cap_steps:
            continue
        for v, t, b in successors(defn, a):
            if b in parents:
                continue
            if len(parents) >= cap_states:
                return None
            parents[b] = (a, v, t.id)
            queue.append((b, depth + 1))
    return None


@dataclass(frozen=True)
class MemberResult:
    answer: str
    witness: Optional[Tuple[FiringEvent, ...]] = None


YES = 'yes'
NO_WITHIN_BOUND = 'no-within-bound'
UNKNOWN = 'unknown'


def member(defn: RpnDef, s0: TreeState, target: Sequence[TreeState], word: Sequence[str],
           cap_steps: int, *, eps_budget: int = 64, cap_states: int = 200_000) -> MemberResult:
    """
    Pertinência limitada de ``word`` à linguagem de cobertura

    Transições sem rótulo leem ε. A profundidade máxima é ``cap_steps``;
    estourar o orçamento de ε por letra ou o limite de estados dá 'unknown',
    nunca um 'não' errado.
    """
    word = tuple(word)
    start = (abstraction(s0), 0)
    parents: Dict = {start: None}
    best_eps = {start: 0}
    queue = deque([(start, 0, 0)])
    truncated = False
    while queue:
        key, eps, depth = queue.popleft()
        a, pos = key
        if pos == len(word) and covers(a, target):
            path = replay_path(defn, s0, _unwind(parents, key))
            return MemberResult(YES, tuple(path))
        if depth >= cap_steps:
            continue
        for v, t, b in successors(defn, a):
            if t.label is None:
                if eps >= eps_budget:
                    truncated = True
                    continue
                nxt, neps = (b, pos), eps + 1
            elif pos < len(word) and word[pos] == t.label:
                nxt, neps = (b, pos + 1), 0
            else:
                continue
            if best_eps.get(nxt, neps + 1) <= neps:
                continue
            if len(parents) >= cap_states:
                truncated = True
                break
            best_eps[nxt] = neps
            parents.setdefault(nxt, (key, v, t.id))
            queue.append((nxt, neps, depth + 1))
    return MemberResult(UNKNOWN if truncated else NO_WITHIN_BOUND)


@dataclass(frozen=True)
class LanguageSample:
    words: FrozenSet[Word]
    complete: bool


def language_sample(defn: RpnDef, s0: TreeState, target: Sequence[TreeState], max_len: int, *,
                    eps_budget: int = 64, cap_states: int = 200_000) -> LanguageSample:
    """
    Todas as palavras de comprimento ≤ max_len da linguagem de cobertura

    Configurações dominadas (≼) por outra já vista com a mesma palavra e
    orçamento de ε não menor são descartadas: pela compatibilidade forte,
    a outra simula todas as suas continuações.

    Returns:
        LanguageSample; ``complete`` é falso quando o orçamento de ε ou o limite
        de estados cortou a busca (as palavras encontradas continuam corretas)
    """
    words = set()
    truncated = False
    seen: Dict[Word, List[Tuple[TreeState, int]]] = {}
    best: Dict[Tuple[AbstractState, Word], int] = {}
    start = abstraction(s0)
    queue = deque([(start, (), 0)])
    best[(start, ())] = 0
    while queue:
        a, w, eps = queue.popleft()
        concrete = a.concretize()
        if w not in words and any(leq(sf, concrete) is not None for sf in target):
            words.add(w)
        for _, t, b in successors(defn, a):
            if t.label is None:
                if eps >= eps_budget:
                    truncated = True
                    continue
                nw, neps = w, eps + 1
            elif len(w) < max_len:
                nw, neps = w + (t.label,), 0
            else:
                continue
            if best.get((b, nw), neps + 1) <= neps:
                continue
            candidate = b.concretize()
            bucket = seen.setdefault(nw, [])
            if any(e <= neps and leq(candidate, other) is not None for other, e in bucket):
                continue
            if len(best) >= cap_states:
                truncated = True
                continue
            best[(b, nw)] = neps
            bucket.append((candidate, neps))
            queue.append((b, nw, neps))
    logger.debug('amostra de linguagem: %d palavras, completa=%s', len(words), not truncated)
    return LanguageSample(frozenset(words), not truncated)
