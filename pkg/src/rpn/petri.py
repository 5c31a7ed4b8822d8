"""
Motor de Redes de Petri

Três oráculos usados por todas as decisões sobre RPNs:

- cobertura (``pn_coverable``) por alcançabilidade para trás sobre bases de
  conjuntos fechados para cima, com a árvore de Karp–Miller como caminho
  secundário;
- limitação (``pn_bounded``) pela árvore de Karp–Miller (ω = ``numpy.inf``);
- terminação (``pn_terminates``) pela busca de sequências auto-cobridoras.

A ordem de exploração é determinística: transições na ordem de declaração,
fronteira FIFO.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.rpn.errors import CapExceededError
from src.rpn.model import Marking

logger = logging.getLogger(__name__)

OMEGA = np.inf


@dataclass
class AnalysisStats:
    """Contadores acumulados durante uma decisão"""

    coverability_calls: int = 0
    km_nodes: int = 0
    backward_elements: int = 0
    largest_basis: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {'coverability_calls': self.coverability_calls, 'km_nodes': self.km_nodes,
                'backward_elements': self.backward_elements, 'largest_basis': self.largest_basis}

    def absorb(self, other: 'AnalysisStats') -> None:
        self.coverability_calls += other.coverability_calls
        self.km_nodes += other.km_nodes
        self.backward_elements += other.backward_elements
        self.largest_basis = max(self.largest_basis, other.largest_basis)


@dataclass(frozen=True)
class PetriTransition:
    id: str
    pre: Marking
    post: Marking
    label: Optional[str] = None


@dataclass(frozen=True)
class PetriNet:
    places: Tuple[str, ...]
    transitions: Tuple[PetriTransition, ...]

    @cached_property
    def index(self) -> Dict[str, int]:
        return {p: i for i, p in enumerate(self.places)}

    def vector(self, m: Marking) -> np.ndarray:
        vec = np.zeros(len(self.places), dtype=np.int64)
        for place, n in m.items:
            if place not in self.index:
                raise ValueError(f"lugar '{place}' não pertence à rede")
            vec[self.index[place]] = n
        return vec

    def marking(self, vec: np.ndarray) -> Marking:
        return Marking.of({p: int(vec[i]) for i, p in enumerate(self.places) if vec[i] > 0})

    @cached_property
    def pre_matrix(self) -> np.ndarray:
        return self._matrix('pre')

    @cached_property
    def post_matrix(self) -> np.ndarray:
        return self._matrix('post')

    def _matrix(self, side: str) -> np.ndarray:
        rows = [self.vector(getattr(t, side)) for t in self.transitions]
        if not rows:
            return np.zeros((0, len(self.places)), dtype=np.int64)
        return np.vstack(rows)

    def transition(self, tid: str) -> PetriTransition:
        for t in self.transitions:
            if t.id == tid:
                return t
        raise KeyError(tid)

    def successors(self, m: Marking) -> Iterator[Tuple[PetriTransition, Marking]]:
        for t in self.transitions:
            if t.pre <= m:
                yield t, m - t.pre + t.post

    def fire_all(self, m: Marking, sequence: Sequence[str]) -> Marking:
        """Dispara uma sequência de ids; ValueError se algum passo não estiver habilitado"""
        for tid in sequence:
            t = self.transition(tid)
            if not t.pre <= m:
                raise ValueError(f"'{tid}' não habilitada em {m}")
            m = m - t.pre + t.post
        return m


@dataclass(frozen=True, eq=False)
class OmegaMarking:
    """
    Marcação estendida com ω sobre os lugares de uma rede, como vetor de floats
    com ω = ``numpy.inf``. ω absorve soma e subtração (ω ± n = ω) e domina
    qualquer inteiro.
    """

    values: np.ndarray

    @classmethod
    def of(cls, net: PetriNet, m: Marking) -> 'OmegaMarking':
        return cls(net.vector(m).astype(float))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OmegaMarking):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __getitem__(self, i: int) -> float:
        return float(self.values[i])

    def __le__(self, other: 'OmegaMarking') -> bool:
        return bool((self.values <= other.values).all())

    def __lt__(self, other: 'OmegaMarking') -> bool:
        return self <= other and bool((self.values < other.values).any())

    def covers(self, vec: np.ndarray) -> bool:
        return bool((self.values >= vec).all())

    def fire(self, pre: np.ndarray, post: np.ndarray) -> 'OmegaMarking':
        """Disparo sem checar habilitação; lugares em ω continuam em ω"""
        return OmegaMarking(self.values - pre + post)

    def accelerate(self, ancestor: 'OmegaMarking') -> 'OmegaMarking':
        """Se ancestor < self, os lugares que cresceram estritamente viram ω"""
        if not ancestor < self:
            return self
        return OmegaMarking(np.where(ancestor.values < self.values, OMEGA, self.values))

    @property
    def has_omega(self) -> bool:
        return bool(np.isinf(self.values).any())

    def as_row(self, places: Sequence[str]) -> Dict[str, object]:
        """Contagens por lugar, com ω como 'w'"""
        return {p: 'w' if np.isinf(v) else int(v) for p, v in zip(places, self.values)}


class UpwardClosedSet:
    """
    Conjunto fechado para cima representado pela base de elementos minimais.
    A base é mantida como antichain a cada inserção.
    """

    def __init__(self) -> None:
        self.basis: Dict[bytes, np.ndarray] = {}

    def contains(self, vec: np.ndarray) -> bool:
        return any((b <= vec).all() for b in self.basis.values())

    def add(self, vec: np.ndarray) -> bool:
        if self.contains(vec):
            return False
        dominated = [k for k, b in self.basis.items() if (vec <= b).all()]
        for k in dominated:
            del self.basis[k]
        self.basis[vec.tobytes()] = vec
        return True

    def __contains__(self, key: bytes) -> bool:
        return key in self.basis

    def __len__(self) -> int:
        return len(self.basis)

    def is_antichain(self) -> bool:
        items = list(self.basis.values())
        for i, a in enumerate(items):
            for j, b in enumerate(items):
                if i != j and (a <= b).all():
                    return False
        return True


@dataclass(frozen=True)
class CoverResult:
    coverable: bool
    witness: Optional[Tuple[str, ...]] = None
    witness_truncated: bool = False


def backward_coverability(net: PetriNet, m0: Marking, target: Marking, *,
                          witness_cap: Optional[int] = None,
                          stats: Optional[AnalysisStats] = None) -> CoverResult:
    """
    Cobertura por alcançabilidade para trás

    Cada elemento da base guarda a transição e o elemento de onde foi derivado,
    então a testemunha sai direto da cadeia de derivação quando m0 domina
    algum elemento.

    Args:
        net: Rede de Petri
        m0: Marcação inicial
        target: Marcação a cobrir
        witness_cap: Comprimento máximo da testemunha (None = sem limite)
        stats: Contadores a atualizar

    Returns:
        CoverResult com a resposta e, se couber no limite, a sequência
    """
    if stats is not None:
        stats.coverability_calls += 1
    start = net.vector(m0)
    goal = net.vector(target)
    derivation: Dict[bytes, Optional[Tuple[int, bytes]]] = {goal.tobytes(): None}

    def unwind(key: bytes) -> CoverResult:
        steps: List[str] = []
        while derivation[key] is not None:
            i, key = derivation[key]
            steps.append(net.transitions[i].id)
            if witness_cap is not None and len(steps) > witness_cap:
                if witness_cap > 0:
                    logger.info('testemunha de cobertura excede o limite de %d passos', witness_cap)
                return CoverResult(True, None, True)
        return CoverResult(True, tuple(steps))

    ucs = UpwardClosedSet()
    ucs.add(goal)
    if stats is not None:
        stats.largest_basis = max(stats.largest_basis, 1)
    if (start >= goal).all():
        return unwind(goal.tobytes())

    pre, post = net.pre_matrix, net.post_matrix
    frontier = deque([goal])
    while frontier:
        b = frontier.popleft()
        key = b.tobytes()
        if key not in ucs:
            continue
        preds = np.maximum(b - post, 0) + pre
        for i, p in enumerate(preds):
            if not ucs.add(p):
                continue
            pkey = p.tobytes()
            derivation.setdefault(pkey, (i, key))
            if stats is not None:
                stats.backward_elements += 1
                stats.largest_basis = max(stats.largest_basis, len(ucs))
            if (start >= p).all():
                return unwind(pkey)
            frontier.append(p)
    return CoverResult(False)


def pn_coverable(net: PetriNet, m0: Marking, target: Marking, *,
                 stats: Optional[AnalysisStats] = None) -> bool:
    return backward_coverability(net, m0, target, witness_cap=0, stats=stats).coverable


def pn_cover_witness(net: PetriNet, m0: Marking, target: Marking,
                     cap: int = 10_000) -> Optional[Tuple[str, ...]]:
    """Sequência σ com m0 →σ m ≥ target, ou None se não cobrível ou longa demais"""
    return backward_coverability(net, m0, target, witness_cap=cap).witness


@dataclass
class KMNode:
    id: int
    marking: OmegaMarking
    parent: Optional[int]
    transition: Optional[str]


def _ancestors(nodes: List[KMNode], node: KMNode) -> Iterator[KMNode]:
    cur: Optional[KMNode] = node
    while cur is not None:
        yield cur
        cur = nodes[cur.parent] if cur.parent is not None else None


def karp_miller(net: PetriNet, m0: Marking, *, node_cap: int = 200_000,
                stop_on_omega: bool = False,
                stats: Optional[AnalysisStats] = None) -> List[KMNode]:
    """
    Árvore de Karp–Miller com aceleração contra os ancestrais do ramo

    Args:
        net: Rede de Petri
        m0: Marcação inicial
        node_cap: Número máximo de nós
        stop_on_omega: Para no primeiro nó com ω (basta para decidir limitação)
        stats: Contadores a atualizar

    Returns:
        Nós em ordem de criação; o nó 0 é a raiz

    Raises:
        CapExceededError: a árvore passou de ``node_cap`` nós
    """
    root = KMNode(0, OmegaMarking.of(net, m0), None, None)
    nodes = [root]
    queue = deque([root])
    pre = net.pre_matrix.astype(float)
    post = net.post_matrix.astype(float)

    while queue:
        node = queue.popleft()
        if node.parent is not None and any(
                a.marking == node.marking for a in _ancestors(nodes, nodes[node.parent])):
            continue
        for i, t in enumerate(net.transitions):
            if not node.marking.covers(pre[i]):
                continue
            m2 = node.marking.fire(pre[i], post[i])
            changed = True
            while changed:
                changed = False
                for a in _ancestors(nodes, node):
                    accelerated = m2.accelerate(a.marking)
                    if accelerated != m2:
                        m2 = accelerated
                        changed = True
            child = KMNode(len(nodes), m2, node.id, t.id)
            nodes.append(child)
            if stats is not None:
                stats.km_nodes += 1
            if len(nodes) > node_cap:
                raise CapExceededError(f'árvore de Karp–Miller passou de {node_cap} nós', 'km_nodes')
            if stop_on_omega and m2.has_omega:
                return nodes
            queue.append(child)
    return nodes


def pn_bounded(net: PetriNet, m0: Marking, *, node_cap: int = 200_000,
               stats: Optional[AnalysisStats] = None) -> bool:
    nodes = karp_miller(net, m0, node_cap=node_cap, stop_on_omega=True, stats=stats)
    return not any(n.marking.has_omega for n in nodes)


def km_coverable(net: PetriNet, m0: Marking, target: Marking, *,
                 node_cap: int = 200_000) -> bool:
    """Cobertura pela árvore de Karp–Miller (caminho de conferência)"""
    goal = net.vector(target).astype(float)
    return any(n.marking.covers(goal) for n in karp_miller(net, m0, node_cap=node_cap))


def karp_miller_frame(net: PetriNet, m0: Marking, *, node_cap: int = 200_000) -> pd.DataFrame:
    """Árvore de Karp–Miller em tabela; ω aparece como 'w'"""
    rows = [{'node': n.id, 'parent': n.parent, 'transition': n.transition,
             **n.marking.as_row(net.places)}
            for n in karp_miller(net, m0, node_cap=node_cap)]
    frame = pd.DataFrame(rows, columns=['node', 'parent', 'transition', *net.places])
    frame['parent'] = frame['parent'].astype('Int64')
    return frame


@dataclass(frozen=True)
class SelfCovering:
    """m0 →prefix m →loop m′ com m ≤ m′ e loop não vazio"""

    prefix: Tuple[str, ...]
    loop: Tuple[str, ...]


def find_self_covering(net: PetriNet, m0: Marking, *, node_cap: int = 200_000,
                       stats: Optional[AnalysisStats] = None) -> Optional[SelfCovering]:
    """
    Busca em profundidade com teste de dominação contra o ramo atual.
    Marcações cuja subárvore foi esgotada sem achar dominação terminam e
    não são exploradas de novo.
    """
    pre, post = net.pre_matrix, net.post_matrix
    terminating: set = set()
    path: List[np.ndarray] = [net.vector(m0)]
    fired: List[str] = []
    cursors: List[int] = [0]
    explored = 0

    while path:
        cur = path[-1]
        i = cursors[-1]
        while i < len(net.transitions) and not (cur >= pre[i]).all():
            i += 1
        if i == len(net.transitions):
            terminating.add(cur.tobytes())
            path.pop()
            cursors.pop()
            if fired:
                fired.pop()
            continue
        cursors[-1] = i + 1
        nxt = cur - pre[i] + post[i]
        tid = net.transitions[i].id
        for j, a in enumerate(path):
            if (a <= nxt).all():
                return SelfCovering(tuple(fired[:j]), tuple(fired[j:]) + (tid,))
        if nxt.tobytes() in terminating:
            continue
        explored += 1
        if stats is not None:
            stats.km_nodes += 1
        if explored > node_cap:
            raise CapExceededError(f'busca de auto-cobertura passou de {node_cap} nós', 'km_nodes')
        path.append(nxt)
        fired.append(tid)
        cursors.append(0)
    return None


def pn_terminates(net: PetriNet, m0: Marking, *, node_cap: int = 200_000,
                  stats: Optional[AnalysisStats] = None) -> bool:
    return find_self_covering(net, m0, node_cap=node_cap, stats=stats) is None


def pn_reach_bounded(net: PetriNet, m0: Marking, cap_steps: int,
                     cap_states: int) -> Tuple[FrozenSet[Marking], bool]:
    """
    Busca em largura limitada por profundidade e por número de marcações

    Returns:
        Tupla (marcações alcançadas, esgotou o conjunto de alcançáveis)
    """
    seen = {m0}
    frontier = [m0]
    depth = 0
    while frontier:
        if depth >= cap_steps:
            for m in frontier:
                for _, succ in net.successors(m):
                    if succ not in seen:
                        return frozenset(seen), False
            return frozenset(seen), True
        nxt: List[Marking] = []
        for m in frontier:
            for _, succ in net.successors(m):
                if succ in seen:
                    continue
                if len(seen) >= cap_states:
                    return frozenset(seen), False
                seen.add(succ)
                nxt.append(succ)
        frontier = nxt
        depth += 1
    return frozenset(seen), True
