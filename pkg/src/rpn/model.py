"""
Modelo de Redes de Petri Recursivas (RPN)

Contém as marcações esparsas, a definição da rede, os estados em árvore
(concretos e abstratos) e a regra de disparo com seus três casos
(elementar, abstrato e corte).

Todos os valores são imutáveis: disparar uma transição devolve um novo estado.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from src.rpn.errors import FiringError


@dataclass(frozen=True)
class Marking:
    """
    Multiconjunto de lugares. ``items`` fica sempre ordenado e sem zeros,
    então igualdade estrutural coincide com igualdade de marcações.
    """

    items: Tuple[Tuple[str, int], ...] = ()

    @classmethod
    def of(cls, counts: Optional[Mapping[str, int]] = None, **extra: int) -> 'Marking':
        merged: Dict[str, int] = {}
        for source in (counts or {}, extra):
            for place, n in source.items():
                if n < 0:
                    raise ValueError(f"contagem negativa para '{place}': {n}")
                merged[place] = merged.get(place, 0) + int(n)
        return cls(tuple(sorted((p, n) for p, n in merged.items() if n > 0)))

    @classmethod
    def unit(cls, *places: str) -> 'Marking':
        """Um token por ocorrência de cada lugar: ``unit('p', 'p', 'q')`` = 2p + q."""
        counts: Dict[str, int] = {}
        for place in places:
            counts[place] = counts.get(place, 0) + 1
        return cls.of(counts)

    @classmethod
    def zero(cls) -> 'Marking':
        return _ZERO

    @cached_property
    def counts(self) -> Dict[str, int]:
        return dict(self.items)

    @property
    def support(self) -> Tuple[str, ...]:
        return tuple(p for p, _ in self.items)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.items)

    @property
    def is_zero(self) -> bool:
        return not self.items

    def __getitem__(self, place: str) -> int:
        return self.counts.get(place, 0)

    def __add__(self, other: 'Marking') -> 'Marking':
        if not other.items:
            return self
        if not self.items:
            return other
        merged = dict(self.counts)
        for place, n in other.items:
            merged[place] = merged.get(place, 0) + n
        return Marking(tuple(sorted(merged.items())))

    def __sub__(self, other: 'Marking') -> 'Marking':
        if not other.items:
            return self
        merged = dict(self.counts)
        for place, n in other.items:
            left = merged.get(place, 0) - n
            if left < 0:
                raise ValueError(f'subtração negativa em {place}: {self} - {other}')
            merged[place] = left
        return Marking(tuple(sorted((p, n) for p, n in merged.items() if n > 0)))

    def __le__(self, other: 'Marking') -> bool:
        counts = other.counts
        return all(counts.get(place, 0) >= n for place, n in self.items)

    def __ge__(self, other: 'Marking') -> bool:
        return other <= self

    def scale(self, k: int) -> 'Marking':
        if k <= 0:
            return _ZERO
        return Marking(tuple((p, n * k) for p, n in self.items))

    def key(self) -> str:
        """Serialização canônica usada na ordem dos estados abstratos"""
        return ','.join(f'{p}:{n}' for p, n in self.items)

    def __str__(self) -> str:
        if not self.items:
            return '0'
        return '+'.join(p if n == 1 else f'{n}{p}' for p, n in self.items)


_ZERO = Marking()


class TransitionKind(str, Enum):
    ELEMENTARY = 'elem'
    ABSTRACT = 'abs'
    CUT = 'cut'


@dataclass(frozen=True)
class Transition:
    id: str
    kind: TransitionKind
    pre: Marking
    post: Optional[Marking] = None
    start: Optional[Marking] = None
    label: Optional[str] = None

    @property
    def output(self) -> Marking:
        """W+(t), com zero para transições de corte"""
        return self.post if self.post is not None else _ZERO

    @property
    def places(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for m in (self.pre, self.post, self.start):
            if m is not None:
                seen.extend(m.support)
        return tuple(dict.fromkeys(seen))


@dataclass(frozen=True)
class RpnDef:
    """Rede ⟨P, T, W−, W+, Ω⟩ com rótulos opcionais guardados em cada transição"""

    places: Tuple[str, ...]
    transitions: Tuple[Transition, ...]

    @cached_property
    def _by_id(self) -> Dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    def transition(self, tid: str) -> Transition:
        try:
            return self._by_id[tid]
        except KeyError:
            raise FiringError(f"transição desconhecida '{tid}'", 'unknown-transition') from None

    def has_transition(self, tid: str) -> bool:
        return tid in self._by_id

    def of_kind(self, kind: TransitionKind) -> Tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.kind is kind)

    @property
    def elementary(self) -> Tuple[Transition, ...]:
        return self.of_kind(TransitionKind.ELEMENTARY)

    @property
    def abstract(self) -> Tuple[Transition, ...]:
        return self.of_kind(TransitionKind.ABSTRACT)

    @property
    def cut(self) -> Tuple[Transition, ...]:
        return self.of_kind(TransitionKind.CUT)

    @property
    def labels(self) -> Dict[str, str]:
        return {t.id: t.label for t in self.transitions if t.label is not None}

    @property
    def alphabet(self) -> frozenset:
        return frozenset(self.labels.values())

    def extend(self, places: Iterable[str] = (),
               transitions: Iterable[Transition] = ()) -> 'RpnDef':
        return RpnDef(self.places + tuple(places), self.transitions + tuple(transitions))


@dataclass(frozen=True)
class FiringEvent:
    vertex: int
    transition: str

    def __str__(self) -> str:
        return f'({self.vertex},{self.transition})'


@dataclass(frozen=True)
class TreeState:
    """
    Estado concreto: árvore de threads. Os ids de vértice vêm de um contador
    monotônico (``next_id``), então a ordem crescente dos ids é a ordem de criação.
    """

    root: Optional[int]
    markings: Mapping[int, Marking] = field(default_factory=dict)
    parent: Mapping[int, int] = field(default_factory=dict)
    edge: Mapping[int, Marking] = field(default_factory=dict)
    next_id: int = 0

    @classmethod
    def empty(cls, next_id: int = 0) -> 'TreeState':
        return cls(None, {}, {}, {}, next_id)

    @classmethod
    def single(cls, marking: Marking, vertex: int = 0) -> 'TreeState':
        return cls(vertex, {vertex: marking}, {}, {}, vertex + 1)

    @classmethod
    def build(cls, root: Optional[int], markings: Mapping[int, Marking],
              parent: Mapping[int, int], edge: Mapping[int, Marking]) -> 'TreeState':
        next_id = max(markings, default=-1) + 1
        return cls(root, dict(markings), dict(parent), dict(edge), next_id)

    @property
    def is_empty(self) -> bool:
        return self.root is None

    @property
    def vertices(self) -> Tuple[int, ...]:
        return tuple(sorted(self.markings))

    @property
    def size(self) -> int:
        return len(self.markings)

    @cached_property
    def _children(self) -> Dict[int, Tuple[int, ...]]:
        index: Dict[int, List[int]] = {v: [] for v in self.markings}
        for child in sorted(self.parent):
            index[self.parent[child]].append(child)
        return {v: tuple(kids) for v, kids in index.items()}

    def children(self, v: int) -> Tuple[int, ...]:
        return self._children[v]

    def marking(self, v: int) -> Marking:
        try:
            return self.markings[v]
        except KeyError:
            raise FiringError(f'vértice desconhecido {v}', 'unknown-vertex') from None

    def descendants(self, v: int) -> List[int]:
        """Des_s(v) em pré-ordem, incluindo o próprio v"""
        out: List[int] = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self._children[u]))
        return out


@dataclass(frozen=True, eq=False)
class AbstractState:
    """
    Estado abstrato: marcação da raiz e multiconjunto de (rótulo da aresta, filho),
    em ordem canônica. ``marking`` é None apenas para o estado vazio.

    Todas as travessias usam pilha explícita: cadeias de vértices mais fundas
    que o limite de recursão do interpretador são estados válidos.
    """

    marking: Optional[Marking]
    children: Tuple[Tuple[Marking, 'AbstractState'], ...] = ()

    @classmethod
    def make(cls, marking: Marking,
             children: Iterable[Tuple[Marking, 'AbstractState']]) -> 'AbstractState':
        ordered = sorted(children, key=lambda pair: (pair[0].key(), pair[1].key))
        return cls(marking, tuple(ordered))

    @property
    def is_empty(self) -> bool:
        return self.marking is None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AbstractState):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def key(self) -> str:
        """Serialização canônica; calculada de baixo para cima e guardada em cada nó"""
        cached = self.__dict__.get('_key')
        if cached is None:
            _fill_keys(self)
            cached = self.__dict__['_key']
        return cached

    def nodes(self) -> List['AbstractState']:
        """Nós da árvore em pré-ordem canônica"""
        if self.marking is None:
            return []
        out: List[AbstractState] = []
        stack: List[AbstractState] = [self]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(child for _, child in reversed(node.children))
        return out

    @property
    def size(self) -> int:
        return len(self.nodes())

    def concretize(self) -> TreeState:
        """Árvore concreta com ids 0..n-1 em pré-ordem canônica"""
        if self.marking is None:
            return TreeState.empty()
        markings: Dict[int, Marking] = {}
        parent: Dict[int, int] = {}
        edge: Dict[int, Marking] = {}
        stack: List[Tuple[AbstractState, Optional[int], Optional[Marking]]] = [(self, None, None)]
        while stack:
            node, up, label = stack.pop()
            vid = len(markings)
            markings[vid] = node.marking
            if up is not None:
                parent[vid] = up
                edge[vid] = label
            stack.extend((child, vid, lab) for lab, child in reversed(node.children))
        return TreeState(0, markings, parent, edge, len(markings))


def _fill_keys(top: AbstractState) -> None:
    pending: List[AbstractState] = []
    stack = [top]
    while stack:
        node = stack.pop()
        if '_key' in node.__dict__:
            continue
        pending.append(node)
        stack.extend(child for _, child in node.children)
    # filhos aparecem depois dos pais em ``pending``
    for node in reversed(pending):
        if node.marking is None:
            key = '~'
        else:
            inner = ';'.join(f'{edge.key()}>{child.__dict__["_key"]}' for edge, child in node.children)
            key = f'({node.marking.key()}|{inner})'
        object.__setattr__(node, '_key', key)


EMPTY_ABSTRACT = AbstractState(None)


def _abstract_all(s: TreeState) -> Tuple[Dict[int, AbstractState], Dict[int, List[int]]]:
    """
    Subárvore abstrata de cada vértice, de baixo para cima, e os filhos de cada
    vértice na ordem canônica (rótulo, subárvore, id).
    """
    nodes: Dict[int, AbstractState] = {}
    ordered: Dict[int, List[int]] = {}
    for v in reversed(s.descendants(s.root)):
        pairs = sorted(((s.edge[c], nodes[c], c) for c in s.children(v)),
                       key=lambda item: (item[0].key(), item[1].key, item[2]))
        nodes[v] = AbstractState(s.markings[v], tuple((edge, node) for edge, node, _ in pairs))
        ordered[v] = [c for _, _, c in pairs]
    return nodes, ordered


def abstraction(s: TreeState) -> AbstractState:
    """s̄: esquece as identidades dos vértices"""
    if s.is_empty:
        return EMPTY_ABSTRACT
    nodes, _ = _abstract_all(s)
    return nodes[s.root]


def canonical_vertices(s: TreeState) -> List[int]:
    """
    Vértices de s na pré-ordem canônica: o i-ésimo da lista corresponde ao
    vértice i de ``abstraction(s).concretize()``.
    """
    if s.is_empty:
        return []
    _, ordered = _abstract_all(s)
    order: List[int] = []
    stack = [s.root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(ordered[v]))
    return order


def _lookup(defn: RpnDef, s: TreeState, e: FiringEvent) -> Tuple[Transition, Marking]:
    t = defn.transition(e.transition)
    return t, s.marking(e.vertex)


def enabled(defn: RpnDef, s: TreeState, e: FiringEvent) -> bool:
    t, m = _lookup(defn, s, e)
    return t.pre <= m


def fire(defn: RpnDef, s: TreeState, e: FiringEvent) -> Tuple[TreeState, Optional[int]]:
    """
    Dispara (v, t) e devolve o novo estado e o vértice criado (só no caso abstrato).

    Raises:
        FiringError: vértice/transição desconhecidos ou transição não habilitada
    """
    t, m = _lookup(defn, s, e)
    v = e.vertex
    if not t.pre <= m:
        raise FiringError(f'{e} não está habilitado (precisa {t.pre}, tem {m})', 'not-enabled')

    if t.kind is TransitionKind.ELEMENTARY:
        markings = dict(s.markings)
        markings[v] = m - t.pre + t.output
        return replace(s, markings=markings), None

    if t.kind is TransitionKind.ABSTRACT:
        child = s.next_id
        markings = dict(s.markings)
        markings[v] = m - t.pre
        markings[child] = t.start
        parent = dict(s.parent)
        parent[child] = v
        edge = dict(s.edge)
        edge[child] = t.output
        return TreeState(s.root, markings, parent, edge, s.next_id + 1), child

    if v == s.root:
        return TreeState.empty(s.next_id), None
    doomed = set(s.descendants(v))
    up = s.parent[v]
    markings = {u: mm for u, mm in s.markings.items() if u not in doomed}
    markings[up] = markings[up] + s.edge[v]
    parent = {u: p for u, p in s.parent.items() if u not in doomed}
    edge = {u: lab for u, lab in s.edge.items() if u not in doomed}
    return TreeState(s.root, markings, parent, edge, s.next_id), None


def trace(defn: RpnDef, s: TreeState, sequence: Sequence[FiringEvent]) -> List[TreeState]:
    """Todos os estados visitados, começando por s"""
    states = [s]
    for i, e in enumerate(sequence):
        try:
            s, _ = fire(defn, s, e)
        except FiringError as exc:
            raise FiringError(f'passo {i}: {exc}', f'not-enabled-at-step({i})', step=i) from exc
        states.append(s)
    return states


def fire_sequence(defn: RpnDef, s: TreeState, sequence: Sequence[FiringEvent]) -> TreeState:
    return trace(defn, s, sequence)[-1]


@dataclass(frozen=True)
class ScriptStep:
    """Passo de roteiro com nomes: ``vertex transition [as alias]``"""

    vertex: str
    transition: str
    alias: Optional[str] = None


def fire_script(defn: RpnDef, s: TreeState, names: Mapping[str, int],
                steps: Sequence[ScriptStep]) -> Tuple[TreeState, List[FiringEvent], Dict[str, int]]:
    """
    Executa um roteiro nomeado. Vértices criados por disparos abstratos ficam
    acessíveis pelo alias declarado com ``as``.
    """
    scope = dict(names)
    events: List[FiringEvent] = []
    for i, step in enumerate(steps):
        if step.vertex not in scope:
            raise FiringError(f"passo {i}: vértice '{step.vertex}' não declarado",
                              'unknown-vertex', step=i)
        e = FiringEvent(scope[step.vertex], step.transition)
        try:
            s, created = fire(defn, s, e)
        except FiringError as exc:
            raise FiringError(f'passo {i}: {exc}', f'not-enabled-at-step({i})', step=i) from exc
        events.append(e)
        if step.alias is not None:
            if created is None:
                raise FiringError(f"passo {i}: '{step.transition}' não cria vértice para '{step.alias}'",
                                  'not-abstract', step=i)
            scope[step.alias] = created
    return s, events, scope
