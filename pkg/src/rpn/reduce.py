"""
Transformações de redes

- ``make_rooted``: codifica o estado inicial em lugares p_v e transições
  abstratas t_v, de modo que o estado inicial vire um único vértice;
- ``returning_transitions``: ponto fixo das transições que retornam
  (s[r, Ω(t)] →σ ∅), com sequências testemunhas;
- ``build_hat`` / ``build_hat_el``: N̂ com atalhos t^r e a rede de Petri N̂_el;
- ``omniscient_normalize`` e ``expand_hat_sequence``: ida e volta entre
  sequências de N e de N̂.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from src.cli.config import ID_PREFIXES
from src.rpn.errors import ConstructionError, FiringError
from src.rpn.model import (
    FiringEvent,
    Marking,
    RpnDef,
    Transition,
    TransitionKind,
    TreeState,
    fire,
)
from src.rpn.petri import AnalysisStats, PetriNet, PetriTransition, backward_coverability
from src.rpn.validation import fresh_ids_clash

logger = logging.getLogger(__name__)

ROOTED_PREFIX = ID_PREFIXES['rooted']
SHORTCUT_SUFFIX = '^r'


@dataclass(frozen=True)
class RootedResult:
    """(N̊, m̊0) e a correspondência vértice original → lugar p_v / transição t_v"""

    net: RpnDef
    initial_marking: Marking
    vertex_place: Mapping[int, str]
    vertex_transition: Mapping[int, str]
    source: TreeState

    @property
    def initial_state(self) -> TreeState:
        return TreeState.single(self.initial_marking)

    @cached_property
    def spawned_vertex(self) -> Dict[str, int]:
        return {tid: v for v, tid in self.vertex_transition.items()}


def make_rooted(defn: RpnDef, s0: TreeState) -> RootedResult:
    """
    Constrói (N̊, s[r, m̊0]) equivalente a (N, s0)

    Raises:
        ConstructionError: s0 vazio ou ids novos colidem com a rede
    """
    if s0.is_empty:
        raise ConstructionError('o estado inicial é vazio', 'empty-initial-state')
    if s0.size == 1:
        return RootedResult(defn, s0.markings[s0.root], {}, {}, s0)

    others = [v for v in s0.vertices if v != s0.root]
    places = {v: f'{ROOTED_PREFIX}p{v}' for v in others}
    names = {v: f'{ROOTED_PREFIX}t{v}' for v in others}
    clash = fresh_ids_clash(defn, places.values(), names.values())
    if clash:
        raise ConstructionError(f'ids já usados: {", ".join(clash)}', 'id-collision')

    def child_tokens(v: int) -> Marking:
        return Marking.unit(*(places[c] for c in s0.children(v)))

    spawners = [
        Transition(names[v], TransitionKind.ABSTRACT, Marking.unit(places[v]), s0.edge[v],
                   s0.markings[v] + child_tokens(v))
        for v in others
    ]
    net = defn.extend(places=[places[v] for v in others], transitions=spawners)
    m0 = s0.markings[s0.root] + child_tokens(s0.root)
    logger.debug('rede enraizada: %d lugares e %d transições novas', len(others), len(others))
    return RootedResult(net, m0, places, names, s0)


def unfold_initial_state(rooted: RootedResult) -> Tuple[List[FiringEvent], Dict[int, int]]:
    """
    Sequência σᵉ que reconstrói s0 dentro de N̊ a partir de s[r, m̊0]

    Returns:
        Tupla (sequência, mapa vértice de s0 → vértice criado em N̊)
    """
    s0 = rooted.source
    state = rooted.initial_state
    vmap = {s0.root: state.root}
    events: List[FiringEvent] = []
    queue = deque([s0.root])
    while queue:
        v = queue.popleft()
        for c in s0.children(v):
            e = FiringEvent(vmap[v], rooted.vertex_transition[c])
            state, created = fire(rooted.net, state, e)
            vmap[c] = created
            events.append(e)
            queue.append(c)
    return events, vmap


def translate_rooted_sequence(rooted: RootedResult, defn: RpnDef,
                              sequence: Sequence[FiringEvent]) -> List[FiringEvent]:
    """
    Traduz uma sequência de N̊ (a partir de s[r, m̊0]) para N (a partir de s0)
    por replay simultâneo. Disparos de t_v não têm contrapartida: o vértice
    criado passa a representar o vértice original v.
    """
    state_r = rooted.initial_state
    state_n = rooted.source
    vmap = {state_r.root: rooted.source.root}
    out: List[FiringEvent] = []
    for e in sequence:
        spawned = rooted.spawned_vertex.get(e.transition)
        state_r, created_r = fire(rooted.net, state_r, e)
        if spawned is not None:
            vmap[created_r] = spawned
            continue
        ev = FiringEvent(vmap[e.vertex], e.transition)
        state_n, created_n = fire(defn, state_n, ev)
        if created_r is not None:
            vmap[created_r] = created_n
        out.append(ev)
    return out


@dataclass(frozen=True)
class HatNet:
    """
    N̂: a rede base com um atalho elementar t^r para cada transição que retorna.
    ``witnesses`` guarda, para cada t que retorna, uma sequência da rede base de
    s[0, Ω(t)] até ∅ (vértice 0 = raiz do estado isolado).
    """

    base: RpnDef
    returning: FrozenSet[str]
    shortcut: Mapping[str, str]
    witnesses: Mapping[str, Tuple[FiringEvent, ...]] = field(default_factory=dict)

    @cached_property
    def net(self) -> RpnDef:
        extra = []
        for t in self.base.abstract:
            if t.id in self.shortcut:
                extra.append(Transition(self.shortcut[t.id], TransitionKind.ELEMENTARY,
                                        t.pre, t.output, None, t.label))
        return self.base.extend(transitions=extra)

    @cached_property
    def original_of(self) -> Dict[str, str]:
        return {short: t for t, short in self.shortcut.items()}

    def witness(self, tid: str) -> Tuple[FiringEvent, ...]:
        try:
            return self.witnesses[tid]
        except KeyError:
            raise ConstructionError(f"sem testemunha de retorno para '{tid}'",
                                    'missing-witness') from None


def shortcut_id(tid: str) -> str:
    return f'{tid}{SHORTCUT_SUFFIX}'


def _hat_el(base: RpnDef, returning: Set[str] | FrozenSet[str]) -> PetriNet:
    transitions: List[PetriTransition] = []
    for t in base.transitions:
        if t.kind is TransitionKind.ELEMENTARY:
            transitions.append(PetriTransition(t.id, t.pre, t.output, t.label))
        elif t.kind is TransitionKind.ABSTRACT:
            transitions.append(PetriTransition(t.id, t.pre, Marking.zero(), t.label))
    for t in base.abstract:
        if t.id in returning:
            transitions.append(PetriTransition(shortcut_id(t.id), t.pre, t.output, t.label))
    return PetriNet(base.places, tuple(transitions))


def _partial_hat(base: RpnDef, returning: Set[str],
                 witnesses: Mapping[str, Tuple[FiringEvent, ...]]) -> HatNet:
    return HatNet(base, frozenset(returning), {t: shortcut_id(t) for t in returning},
                  dict(witnesses))


def _relocate(defn: RpnDef, state: TreeState, anchor: int, start: Marking,
              template: Sequence[FiringEvent]) -> Tuple[TreeState, List[FiringEvent]]:
    """Executa a testemunha ``template`` na subárvore de ``anchor``"""
    local = TreeState.single(start)
    tmap = {local.root: anchor}
    events: List[FiringEvent] = []
    for e in template:
        ev = FiringEvent(tmap[e.vertex], e.transition)
        local, created_local = fire(defn, local, e)
        state, created = fire(defn, state, ev)
        if created_local is not None:
            tmap[created_local] = created
        events.append(ev)
    return state, events


def expand_hat_sequence(hat: HatNet, s: TreeState,
                        sequence: Sequence[FiringEvent]) -> List[FiringEvent]:
    """
    Troca cada (v, t^r) por (v, t) seguido da testemunha de t executada no
    filho recém-criado. O resultado é uma sequência da rede base.

    Raises:
        ConstructionError: sequência não disparável em N̂ ou testemunha ausente
    """
    cur_hat = s
    cur = s
    vmap = {v: v for v in s.vertices}
    out: List[FiringEvent] = []
    for i, e in enumerate(sequence):
        try:
            v = vmap[e.vertex]
            cur_hat, created_hat = fire(hat.net, cur_hat, e)
            original = hat.original_of.get(e.transition)
            if original is None:
                ev = FiringEvent(v, e.transition)
                cur, created = fire(hat.base, cur, ev)
                if created_hat is not None:
                    vmap[created_hat] = created
                out.append(ev)
                continue
            ev = FiringEvent(v, original)
            cur, child = fire(hat.base, cur, ev)
            out.append(ev)
            cur, steps = _relocate(hat.base, cur, child, hat.base.transition(original).start,
                                   hat.witness(original))
            out.extend(steps)
        except (FiringError, KeyError) as exc:
            raise ConstructionError(f'passo {i} não disparável: {exc}',
                                    'sequence-not-fireable') from exc
    return out


def root_sequence(hat: HatNet, s: TreeState, petri_steps: Sequence[str]) -> List[FiringEvent]:
    """Sequência de N̂_el disparada na raiz de s, expandida para a rede base"""
    return expand_hat_sequence(hat, s, [FiringEvent(s.root, tid) for tid in petri_steps])


def returning_transitions(defn: RpnDef, *, witness_cap: int = 10_000,
                          stats: Optional[AnalysisStats] = None
                          ) -> Tuple[FrozenSet[str], Dict[str, Tuple[FiringEvent, ...]]]:
    """
    Menor ponto fixo de T_ret

    A cada rodada, t entra se alguma guarda de corte W−(τ) é cobrível a partir
    de Ω(t) em N̂_el construída com os atalhos já conhecidos no início da rodada.

    Returns:
        Tupla (transições que retornam, testemunhas). Uma testemunha falta
        apenas quando passa de ``witness_cap`` passos.
    """
    returning: Set[str] = set()
    witnesses: Dict[str, Tuple[FiringEvent, ...]] = {}
    rounds = 0
    while True:
        rounds += 1
        el = _hat_el(defn, returning)
        hat = _partial_hat(defn, returning, witnesses)
        joined: List[str] = []
        for t in defn.abstract:
            if t.id in returning:
                continue
            for tau in defn.cut:
                result = backward_coverability(el, t.start, tau.pre, witness_cap=witness_cap,
                                               stats=stats)
                if not result.coverable:
                    continue
                joined.append(t.id)
                if result.witness is not None:
                    local = TreeState.single(t.start)
                    try:
                        seq = root_sequence(hat, local, result.witness)
                    except ConstructionError:
                        logger.info("testemunha de '%s' depende de atalho sem testemunha", t.id)
                        break
                    seq.append(FiringEvent(local.root, tau.id))
                    if len(seq) <= witness_cap:
                        witnesses[t.id] = tuple(seq)
                break
        logger.debug('rodada %d de T_ret: entram %s', rounds, joined)
        if not joined:
            break
        returning.update(joined)
    return frozenset(returning), witnesses


def build_hat(defn: RpnDef, *, witness_cap: int = 10_000,
              stats: Optional[AnalysisStats] = None) -> HatNet:
    returning, witnesses = returning_transitions(defn, witness_cap=witness_cap, stats=stats)
    shortcuts = {t.id: shortcut_id(t.id) for t in defn.abstract if t.id in returning}
    clash = fresh_ids_clash(defn, (), shortcuts.values())
    if clash:
        raise ConstructionError(f'ids já usados: {", ".join(clash)}', 'id-collision')
    return HatNet(defn, returning, shortcuts, witnesses)


def build_hat_el(hat: HatNet) -> PetriNet:
    """N̂_el: sem cortes, saídas das abstratas zeradas, atalhos intactos"""
    return _hat_el(hat.base, hat.returning)


def omniscient_normalize(hat: HatNet, s0: TreeState,
                         sequence: Sequence[FiringEvent]) -> List[FiringEvent]:
    """
    Transforma σ da rede base em σ̂ de N̂ onde toda thread criada sobrevive

    Cada thread criada e depois removida cujo pai não foi removido é tratada
    assim: se foi cortada por um corte nela mesma, a criação vira (u, t^r);
    se sumiu junto com um ancestral, a criação é descartada. Disparos dentro
    dessas subárvores somem.

    Raises:
        ConstructionError: σ não é disparável a partir de s0
    """
    base = hat.base
    state = s0
    created_at: Dict[int, int] = {}
    parent_of: Dict[int, int] = {}
    cut_here: Set[int] = set()
    for i, e in enumerate(sequence):
        try:
            t = base.transition(e.transition)
            state, created = fire(base, state, e)
        except FiringError as exc:
            raise ConstructionError(f'passo {i} não disparável: {exc}',
                                    'sequence-not-fireable') from exc
        if created is not None:
            created_at[i] = created
            parent_of[created] = e.vertex
        if t.kind is TransitionKind.CUT:
            cut_here.add(e.vertex)

    doomed = {c for c in parent_of if c not in state.markings}
    out: List[FiringEvent] = []
    cur = s0
    vmap = {v: v for v in s0.vertices}
    for i, e in enumerate(sequence):
        if e.vertex in doomed:
            continue
        child = created_at.get(i)
        if child is not None and child in doomed:
            if child not in cut_here:
                continue
            if e.transition not in hat.shortcut:
                raise ConstructionError(f"'{e.transition}' retorna mas não tem atalho",
                                        'missing-witness')
            step = FiringEvent(vmap[e.vertex], hat.shortcut[e.transition])
            cur, _ = fire(hat.net, cur, step)
            out.append(step)
            continue
        step = FiringEvent(vmap[e.vertex], e.transition)
        cur, created = fire(hat.net, cur, step)
        if created is not None:
            vmap[child] = created
        out.append(step)
    return out


def created_vertices(defn: RpnDef, s0: TreeState,
                     sequence: Sequence[FiringEvent]) -> Tuple[TreeState, Set[int]]:
    """Estado final e vértices criados ao longo de σ"""
    state = s0
    created_ids: Set[int] = set()
    for e in sequence:
        state, created = fire(defn, state, e)
        if created is not None:
            created_ids.add(created)
    return state, created_ids


def is_omniscient(defn: RpnDef, s0: TreeState, sequence: Sequence[FiringEvent]) -> bool:
    final, created_ids = created_vertices(defn, s0, sequence)
    return created_ids <= set(final.markings)
