"""
Procedimentos de decisão: corte, cobertura, terminação, limitação e finitude

Todos reduzem a RPN a consultas sobre N̂_el (rede de Petri de uma thread),
depois de enraizar o estado inicial.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional, Tuple

from src.rpn.absgraph import AbstractGraph, build_abstract_graph, has_cycle, vertex_name
from src.rpn.constructions import CoverTarget, cover_to_cut_construct
from src.rpn.errors import ConstructionError
from src.rpn.explore import find_cover
from src.rpn.model import FiringEvent, RpnDef, TreeState
from src.rpn.petri import (
    AnalysisStats,
    backward_coverability,
    find_self_covering,
    pn_bounded,
)
from src.rpn.reduce import (
    HatNet,
    RootedResult,
    build_hat,
    build_hat_el,
    make_rooted,
    root_sequence,
    translate_rooted_sequence,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    """
    Testemunha de um veredito. ``kind`` é 'sequence' (eventos de disparo),
    'cycle' (vértices do grafo abstrato), 'self-covering' (prefixo e laço em
    N̂_el a partir de M_a(vertex)) ou 'vertex' (vértice do grafo abstrato)
    """

    kind: str
    events: Tuple[FiringEvent, ...] = ()
    cycle: Tuple[str, ...] = ()
    vertex: Optional[str] = None
    prefix: Tuple[str, ...] = ()
    loop: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Verdict:
    problem: str
    answer: bool
    method: str
    witness: Optional[Witness] = None
    stats: AnalysisStats = field(default_factory=AnalysisStats)
    wallclock_ms: float = 0.0


@dataclass(frozen=True)
class Caps:
    """Limites das buscas auxiliares; nenhum deles muda a resposta booleana"""

    witness_steps: int = 10_000
    km_nodes: int = 200_000
    explore_steps: int = 64
    explore_states: int = 10_000


class _Run:
    """Contexto de uma decisão: cronômetro e contadores"""

    def __init__(self, problem: str):
        self.problem = problem
        self.stats = AnalysisStats()
        self.started = time.perf_counter()

    def verdict(self, answer: bool, method: str, witness: Optional[Witness] = None) -> Verdict:
        elapsed = (time.perf_counter() - self.started) * 1000.0
        logger.info('%s: %s via %s', self.problem, answer, method)
        return Verdict(self.problem, answer, method, witness, self.stats, elapsed)


def _prepare(defn: RpnDef, s0: TreeState, run: _Run,
             caps: Caps) -> Tuple[RootedResult, HatNet]:
    rooted = make_rooted(defn, s0)
    hat = build_hat(rooted.net, witness_cap=caps.witness_steps, stats=run.stats)
    return rooted, hat


def decide_cut(defn: RpnDef, s0: TreeState, *, witness: bool = False,
               caps: Caps = Caps()) -> Verdict:
    """
    ∅ é alcançável a partir de s0?

    Sim sse alguma guarda de corte W−(τ) é cobrível a partir de m̊0 em N̂_el.
    A testemunha é a sequência de cobertura expandida pelos atalhos, seguida
    de (r, τ) e traduzida de volta para N.
    """
    run = _Run('cut')
    if s0.is_empty:
        return run.verdict(True, 'empty-initial-state', Witness('sequence') if witness else None)
    rooted, hat = _prepare(defn, s0, run, caps)
    el = build_hat_el(hat)
    method = 'backward-coverability'
    for tau in rooted.net.cut:
        result = backward_coverability(el, rooted.initial_marking, tau.pre,
                                       witness_cap=caps.witness_steps if witness else 0,
                                       stats=run.stats)
        if not result.coverable:
            continue
        found = None
        if witness and result.witness is not None:
            try:
                start = rooted.initial_state
                seq = root_sequence(hat, start, result.witness)
                seq.append(FiringEvent(start.root, tau.id))
                seq = translate_rooted_sequence(rooted, defn, seq)
                if len(seq) <= caps.witness_steps:
                    found = Witness('sequence', tuple(seq))
            except ConstructionError as exc:
                logger.info('testemunha de corte indisponível: %s', exc)
        return run.verdict(True, method, found)
    return run.verdict(False, method)


def decide_cover(defn: RpnDef, s0: TreeState, target: CoverTarget, *, witness: bool = False,
                 caps: Caps = Caps()) -> Verdict:
    """
    Algum s_f ∈ S_f é coberto a partir de s0?

    A resposta sai sempre da construção cobertura → corte; a testemunha,
    quando pedida, vem do explorador limitado.
    """
    run = _Run('cover')
    if s0.is_empty:
        return run.verdict(target.has_empty, 'empty-initial-state',
                           Witness('sequence') if witness and target.has_empty else None)
    net, state = cover_to_cut_construct(defn, s0, target)
    inner = decide_cut(net, state, caps=caps)
    run.stats.absorb(inner.stats)
    found = None
    if witness and inner.answer:
        seq = find_cover(defn, s0, target.states, caps.explore_steps, caps.explore_states)
        if seq is not None:
            found = Witness('sequence', tuple(seq))
    return run.verdict(inner.answer, 'cover-to-cut', found)


def _graph(defn: RpnDef, s0: TreeState, run: _Run,
           caps: Caps) -> Tuple[RootedResult, HatNet, AbstractGraph]:
    rooted, hat = _prepare(defn, s0, run, caps)
    graph = build_abstract_graph(rooted.net, rooted.initial_marking, hat=hat, stats=run.stats)
    return rooted, hat, graph


def abstract_graph_of(defn: RpnDef, s0: TreeState, *, caps: Caps = Caps()) -> AbstractGraph:
    """Grafo abstrato de (N̊, s[r, m̊0])"""
    return _graph(defn, s0, _Run('graph'), caps)[2]


def decide_termination(defn: RpnDef, s0: TreeState, *, caps: Caps = Caps()) -> Verdict:
    """
    Toda execução a partir de s0 é finita?

    Não termina se o grafo abstrato tem ciclo (threads em profundidade
    ilimitada) ou se N̂_el tem sequência auto-cobridora a partir de algum M_a(v).
    """
    run = _Run('terminate')
    if s0.is_empty:
        return run.verdict(True, 'empty-initial-state')
    _, hat, graph = _graph(defn, s0, run, caps)
    cycle = has_cycle(graph)
    if cycle is not None:
        return run.verdict(False, 'abstract-graph-cycle', Witness('cycle', cycle=tuple(cycle)))
    el = build_hat_el(hat)
    for v in graph.vertices:
        loop = find_self_covering(el, graph.marking_of[v], node_cap=caps.km_nodes, stats=run.stats)
        if loop is not None:
            return run.verdict(False, 'self-covering',
                               Witness('self-covering', vertex=v, prefix=loop.prefix, loop=loop.loop))
    return run.verdict(True, 'abstract-graph+self-covering')


def decide_boundedness(defn: RpnDef, s0: TreeState, *, caps: Caps = Caps()) -> Verdict:
    """As marcações de todas as threads alcançáveis são limitadas?"""
    run = _Run('bounded')
    if s0.is_empty:
        return run.verdict(True, 'empty-initial-state')
    _, hat, graph = _graph(defn, s0, run, caps)
    el = build_hat_el(hat)
    for v in graph.vertices:
        if not pn_bounded(el, graph.marking_of[v], node_cap=caps.km_nodes, stats=run.stats):
            return run.verdict(False, 'karp-miller', Witness('vertex', vertex=v))
    return run.verdict(True, 'karp-miller')


def decide_finiteness(defn: RpnDef, s0: TreeState, *, caps: Caps = Caps()) -> Verdict:
    """
    O conjunto de estados alcançáveis é finito?

    Finito sse o grafo abstrato não tem ciclo e N̂_el é limitada a partir de
    cada M_a(v), exceto nos dois casos diretos: s0 = ∅ (finito) e abstrata
    com W−(t) = 0 (infinito).
    """
    run = _Run('finite')
    if s0.is_empty:
        return run.verdict(True, 'empty-initial-state')
    for t in defn.abstract:
        if t.pre.is_zero:
            return run.verdict(False, 'zero-guard-abstract', Witness('vertex', vertex=vertex_name(t.id)))
    _, hat, graph = _graph(defn, s0, run, caps)
    cycle = has_cycle(graph)
    if cycle is not None:
        return run.verdict(False, 'abstract-graph-cycle', Witness('cycle', cycle=tuple(cycle)))
    el = build_hat_el(hat)
    for v in graph.vertices:
        if not pn_bounded(el, graph.marking_of[v], node_cap=caps.km_nodes, stats=run.stats):
            return run.verdict(False, 'karp-miller', Witness('vertex', vertex=v))
    return run.verdict(True, 'abstract-graph+karp-miller')
