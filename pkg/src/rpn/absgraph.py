"""
Grafo abstrato G_{N,s0}

Vértices: a raiz ``r`` e um ``v_<t>`` por transição abstrata disparável.
Há aresta u → v_t quando W−(t) é cobrível a partir de M_a(u) em N̂_el.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx

from src.rpn.model import FiringEvent, Marking, RpnDef, TreeState
from src.rpn.petri import AnalysisStats, PetriNet, pn_coverable, pn_cover_witness
from src.rpn.reduce import HatNet, build_hat, build_hat_el, root_sequence

logger = logging.getLogger(__name__)

ROOT = 'r'


def vertex_name(tid: str) -> str:
    return f'v_{tid}'


@dataclass(frozen=True)
class AbstractGraph:
    vertices: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    marking_of: Mapping[str, Marking]
    transition_of: Mapping[str, str]

    @cached_property
    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.vertices))
        g.add_edges_from(sorted(self.edges))
        return g


class _CoverCache:
    def __init__(self, el: PetriNet, stats: Optional[AnalysisStats]):
        self.el = el
        self.stats = stats
        self.answers: Dict[Tuple[Marking, Marking], bool] = {}

    def __call__(self, m: Marking, target: Marking) -> bool:
        key = (m, target)
        if key not in self.answers:
            self.answers[key] = pn_coverable(self.el, m, target, stats=self.stats)
        return self.answers[key]


def build_abstract_graph(defn: RpnDef, m0: Marking, *, hat: Optional[HatNet] = None,
                         stats: Optional[AnalysisStats] = None) -> AbstractGraph:
    """
    Ponto fixo do grafo abstrato a partir de s[r, m0]

    Args:
        defn: Rede (o estado inicial deve ter um único vértice)
        m0: Marcação da raiz
        hat: N̂ já construída, para não refazer o ponto fixo de T_ret
        stats: Contadores a atualizar
    """
    hat = hat or build_hat(defn, stats=stats)
    covers = _CoverCache(build_hat_el(hat), stats)
    marking_of: Dict[str, Marking] = {ROOT: m0}
    transition_of: Dict[str, str] = {}
    edges = set()
    queue = deque([ROOT])
    while queue:
        u = queue.popleft()
        for t in defn.abstract:
            if not covers(marking_of[u], t.pre):
                continue
            v = vertex_name(t.id)
            edges.add((u, v))
            if v not in marking_of:
                marking_of[v] = t.start
                transition_of[v] = t.id
                queue.append(v)
    vertices = tuple([ROOT] + sorted(v for v in marking_of if v != ROOT))
    logger.debug('grafo abstrato: %d vértices, %d arestas', len(vertices), len(edges))
    return AbstractGraph(vertices, frozenset(edges), marking_of, transition_of)


def _rotate(cycle: List[str]) -> Tuple[str, ...]:
    i = cycle.index(min(cycle))
    return tuple(cycle[i:] + cycle[:i])


def has_cycle(g: AbstractGraph) -> Optional[List[str]]:
    """
    Um ciclo do grafo, se houver. Laços contam. Entre os ciclos mais curtos
    que passam por cada vértice, devolve o menor em (comprimento, ordem lexicográfica).
    """
    dg = g.digraph
    best: Optional[Tuple[str, ...]] = None
    for v in sorted(dg.nodes):
        for w in sorted(dg.successors(v)):
            if w == v:
                candidate: Tuple[str, ...] = (v,)
            elif nx.has_path(dg, w, v):
                candidate = _rotate([v] + nx.shortest_path(dg, w, v)[:-1])
            else:
                continue
            if best is None or (len(candidate), candidate) < (len(best), best):
                best = candidate
    return list(best) if best is not None else None


def justify_edge(hat: HatNet, g: AbstractGraph, u: str, tid: str, *,
                 cap: int = 10_000) -> Optional[List[FiringEvent]]:
    """
    Sequência concreta a partir de s[r, M_a(u)] que termina disparando t na raiz,
    ou None se a testemunha de cobertura passar do limite
    """
    t = hat.base.transition(tid)
    el = build_hat_el(hat)
    steps = pn_cover_witness(el, g.marking_of[u], t.pre, cap)
    if steps is None:
        return None
    s = TreeState.single(g.marking_of[u])
    seq = root_sequence(hat, s, steps)
    seq.append(FiringEvent(s.root, tid))
    return seq


def to_dot(g: AbstractGraph, name: str = 'abstract_graph') -> str:
    """Texto DOT com M_a anotado em cada vértice"""
    lines = [f'digraph {name} {{']
    for v in g.vertices:
        lines.append(f'  "{v}" [label="{v}\\n{g.marking_of[v]}"];')
    for u, v in sorted(g.edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append('}')
    return '\n'.join(lines) + '\n'
