"""
Construções sobre linguagens de cobertura e de corte

- ``cut_to_cover_construct``: corte em (N, s0) vira cobertura de s[r, done];
- ``cover_to_cut_construct``: cobertura de S_f vira corte, pela rede estrela
  (lugares start/run) seguida dos palpites t_Br, t_{r_s}, t_v;
- ``union_construct``: união de duas linguagens de cobertura rotuladas.

Ids novos usam os prefixos ``__cov.``, ``__cut.`` e ``__un.``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.cli.config import ID_PREFIXES
from src.rpn.errors import ConstructionError
from src.rpn.model import Marking, RpnDef, Transition, TransitionKind, TreeState
from src.rpn.reduce import make_rooted
from src.rpn.validation import fresh_ids_clash

logger = logging.getLogger(__name__)

COVER_TO_CUT = ID_PREFIXES['cover_to_cut']
CUT_TO_COVER = ID_PREFIXES['cut_to_cover']
UNION = ID_PREFIXES['union']


@dataclass(frozen=True)
class CoverTarget:
    """Conjunto finito S_f de estados finais"""

    states: Tuple[TreeState, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise ConstructionError('o alvo de cobertura não tem estados', 'malformed-target')

    @classmethod
    def single(cls, s: TreeState) -> 'CoverTarget':
        return cls((s,))

    @property
    def has_empty(self) -> bool:
        return any(s.is_empty for s in self.states)


@dataclass(frozen=True)
class LabeledInstance:
    """Rede rotulada com estado inicial, alvo e alfabeto (inferido dos rótulos se None)"""

    net: RpnDef
    state: TreeState
    target: CoverTarget
    alphabet: Optional[FrozenSet[str]] = None

    @property
    def letters(self) -> FrozenSet[str]:
        return self.alphabet if self.alphabet is not None else self.net.alphabet


def _checked(defn: RpnDef, places: Sequence[str], transitions: Sequence[Transition]) -> RpnDef:
    clash = fresh_ids_clash(defn, places, [t.id for t in transitions])
    if clash:
        raise ConstructionError(f'ids já usados: {", ".join(clash)}', 'id-collision')
    return defn.extend(places, transitions)


def _rooted(defn: RpnDef, s0: TreeState) -> Tuple[RpnDef, Marking]:
    rooted = make_rooted(defn, s0)
    return rooted.net, rooted.initial_marking


def cut_to_cover_construct(defn: RpnDef, s0: TreeState) -> Tuple[RpnDef, TreeState, CoverTarget]:
    """
    Acrescenta todo, done e a abstrata start (todo → done, Ω = m0).
    O corte é alcançável na origem sse s[r, done] é cobrível no resultado.
    """
    net, m0 = _rooted(defn, s0)
    todo, done = f'{CUT_TO_COVER}todo', f'{CUT_TO_COVER}done'
    start = Transition(f'{CUT_TO_COVER}start', TransitionKind.ABSTRACT, Marking.unit(todo),
                       Marking.unit(done), m0)
    result = _checked(net, [todo, done], [start])
    return (result, TreeState.single(Marking.unit(todo)),
            CoverTarget.single(TreeState.single(Marking.unit(done))))


def _star(t: Transition, run: Marking) -> Transition:
    if t.kind is TransitionKind.ABSTRACT:
        return replace(t, pre=t.pre + run, post=t.output + run, start=t.start + run)
    return replace(t, pre=t.pre + run)


def _with_run(s: TreeState, run: Marking) -> TreeState:
    return replace(s, markings={v: m + run for v, m in s.markings.items()})


def cover_to_cut_construct(defn: RpnDef, s0: TreeState,
                           target: CoverTarget) -> Tuple[RpnDef, TreeState]:
    """
    Constrói (N′, s′0) com ∅ alcançável em N′ sse algum s_f ∈ S_f é coberto em N

    Estados não enraizados passam antes por ``make_rooted``. Com ∅ ∈ S_f basta
    um lugar root e um corte que o consome.
    """
    net, m0 = _rooted(defn, s0)
    p = COVER_TO_CUT

    if target.has_empty:
        root = f'{p}root'
        t_root = Transition(f'{p}t_root', TransitionKind.CUT, Marking.unit(root))
        return _checked(net, [root], [t_root]), TreeState.single(m0 + Marking.unit(root))

    start, run = f'{p}start', f'{p}run'
    one_run = Marking.unit(run)
    star_transitions = [_star(t, one_run) for t in net.transitions]
    star_transitions.append(Transition(f'{p}t_run', TransitionKind.ELEMENTARY, one_run,
                                       one_run.scale(2)))
    star_transitions.append(Transition(f'{p}t_start', TransitionKind.ABSTRACT, Marking.unit(start),
                                       Marking.zero(), m0 + one_run))
    star = _checked(net, [start, run], star_transitions[len(net.transitions):])
    star = RpnDef(star.places, tuple(star_transitions))
    finals = [_with_run(sf, one_run) for sf in target.states]

    todo, done, cut = f'{p}todo', f'{p}done', f'{p}cut'
    place_v: Dict[Tuple[int, int], str] = {}
    place_uv: Dict[Tuple[int, int], str] = {}
    for k, sf in enumerate(finals):
        for v in sf.vertices:
            place_v[k, v] = f'{p}p.s{k}.{v}'
            if v != sf.root:
                place_uv[k, v] = f'{p}p.s{k}.{sf.parent[v]}.{v}'

    def tokens(place: str, n: int = 1) -> Marking:
        return Marking.unit(place).scale(n)

    kept: List[Transition] = []
    for t in star.transitions:
        if t.kind is TransitionKind.ABSTRACT:
            kept.append(replace(t, start=t.start + tokens(cut)))
        elif t.kind is TransitionKind.CUT:
            kept.append(replace(t, pre=t.pre + tokens(cut)))
        else:
            kept.append(t)

    guesses: List[Transition] = []
    for t in star.abstract:
        guesses.append(Transition(f'{p}{t.id}.br', TransitionKind.ABSTRACT, t.pre + tokens(todo),
                                  tokens(done), t.start + tokens(todo), t.label))
        for k, sf in enumerate(finals):
            r = sf.root
            guesses.append(Transition(
                f'{p}{t.id}.s{k}.{r}', TransitionKind.ABSTRACT, t.pre + tokens(todo), tokens(done),
                t.start + tokens(place_v[k, r], len(sf.children(r)) + 1), t.label))
            for v in sf.vertices:
                if v == r or not sf.edge[v] <= t.output:
                    continue
                guesses.append(Transition(
                    f'{p}{t.id}.s{k}.{v}', TransitionKind.ABSTRACT,
                    t.pre + tokens(place_v[k, sf.parent[v]]), tokens(place_uv[k, v]),
                    t.start + tokens(place_v[k, v], len(sf.children(v)) + 1), t.label))

    cuts = [Transition(f'{p}tau_done', TransitionKind.CUT, tokens(done))]
    for k, sf in enumerate(finals):
        for v in sf.vertices:
            guard = sf.markings[v] + tokens(place_v[k, v])
            for w in sf.children(v):
                guard = guard + tokens(place_uv[k, w])
            cuts.append(Transition(f'{p}tau.s{k}.{v}', TransitionKind.CUT, guard))

    new_places = [todo, done, cut, *place_v.values(), *place_uv.values()]
    result = _checked(RpnDef(star.places, tuple(kept)), new_places, guesses + cuts)
    logger.debug('cobertura → corte: %d transições, %d lugares',
                 len(result.transitions), len(result.places))
    return result, TreeState.single(Marking.unit(start, todo))


def _rename(m: Optional[Marking], prefix: str) -> Optional[Marking]:
    if m is None:
        return None
    return Marking.of({f'{prefix}{place}': n for place, n in m.items})


def _lift(t: Transition, prefix: str, branch: Marking) -> Transition:
    start = _rename(t.start, prefix)
    return Transition(f'{prefix}{t.id}', t.kind, _rename(t.pre, prefix) + branch,
                      _rename(t.post, prefix), start + branch if start is not None else None,
                      t.label)


def _lift_state(s: TreeState, prefix: str, branch: Marking) -> TreeState:
    if s.is_empty:
        return s
    return replace(s, markings={v: _rename(m, prefix) + branch for v, m in s.markings.items()},
                   edge={v: _rename(m, prefix) for v, m in s.edge.items()})


def union_construct(a: LabeledInstance, b: LabeledInstance) -> LabeledInstance:
    """
    Linguagem de cobertura da união

    As duas redes são copiadas com prefixos ``__un.l.`` e ``__un.r.``; t_b e
    t′_b escolhem o lado, t_c e t′_c geram os tokens de orçamento p e p′
    consumidos a cada disparo.

    Raises:
        ConstructionError: alfabetos declarados diferentes ('alphabet-mismatch')
    """
    for inst in (a, b):
        if inst.alphabet is not None and not inst.net.alphabet <= inst.alphabet:
            raise ConstructionError('rótulos fora do alfabeto declarado', 'alphabet-mismatch')
    if a.alphabet is not None and b.alphabet is not None and a.alphabet != b.alphabet:
        raise ConstructionError('as linguagens não compartilham o alfabeto', 'alphabet-mismatch')

    p0 = f'{UNION}p0'
    sides = []
    for inst, tag in ((a, 'l'), (b, 'r')):
        net, m0 = _rooted(inst.net, inst.state)
        prefix = f'{UNION}{tag}.'
        budget = f'{UNION}p.{tag}'
        branch = Marking.unit(budget)
        lifted = [_lift(t, prefix, branch) for t in net.transitions]
        lifted.append(Transition(f'{UNION}tb.{tag}', TransitionKind.ELEMENTARY, Marking.unit(p0),
                                 _rename(m0, prefix) + branch))
        lifted.append(Transition(f'{UNION}tc.{tag}', TransitionKind.ELEMENTARY, branch,
                                 branch.scale(2)))
        places = [f'{prefix}{place}' for place in net.places] + [budget]
        targets = [_lift_state(sf, prefix, branch) for sf in inst.target.states]
        sides.append((places, lifted, targets))

    places = [p0] + sides[0][0] + sides[1][0]
    transitions = tuple(sides[0][1] + sides[1][1])
    alphabet = a.alphabet if a.alphabet is not None else b.alphabet
    if alphabet is None:
        alphabet = a.net.alphabet | b.net.alphabet
    return LabeledInstance(RpnDef(tuple(places), transitions),
                           TreeState.single(Marking.unit(p0)),
                           CoverTarget(tuple(sides[0][2] + sides[1][2])), alphabet)
