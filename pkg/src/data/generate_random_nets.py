"""
Gerador de RPNs aleatórias para testes e experimentos

Redes pequenas (poucos lugares, poucas transições, pesos ≤ 2) com estados
iniciais e alvos. O modo ``conservative`` limita o total de tokens: nenhuma
elementar aumenta tokens e cada abstrata consome mais do que entrega
(|Ω(t)| + |W+(t)| < |W−(t)|), então o espaço de estados é finito.
"""

import argparse
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.cli.rpnfile import NamedState, SourceFile, format_source
from src.rpn.model import Marking, RpnDef, Transition, TransitionKind, TreeState

KIND_WEIGHTS = {
    TransitionKind.ELEMENTARY: 0.5,
    TransitionKind.ABSTRACT: 0.3,
    TransitionKind.CUT: 0.2,
}


def random_bag(rng: np.random.Generator, places: Sequence[str], max_weight: int = 2,
               density: float = 0.4, nonzero: bool = False) -> Marking:
    counts = {}
    for p in places:
        if rng.random() < density:
            counts[p] = int(rng.integers(1, max_weight + 1))
    if nonzero and not counts:
        counts[places[int(rng.integers(len(places)))]] = 1
    return Marking.of(counts)


def _shrink(rng: np.random.Generator, m: Marking, budget: int) -> Marking:
    """Remove tokens ao acaso até o total caber em ``budget``"""
    counts = dict(m.counts)
    while sum(counts.values()) > budget:
        p = sorted(counts)[int(rng.integers(len(counts)))]
        counts[p] -= 1
        if counts[p] == 0:
            del counts[p]
    return Marking.of(counts)


def random_net(rng: np.random.Generator, max_places: int = 4, max_transitions: int = 6,
               max_weight: int = 2, labels: Optional[Sequence[str]] = None,
               conservative: bool = False) -> RpnDef:
    """
    Rede aleatória válida

    Args:
        rng: Gerador numpy (``np.random.default_rng(seed)``)
        max_places: Máximo de lugares
        max_transitions: Máximo de transições
        max_weight: Peso máximo de cada arco
        labels: Se dado, toda transição recebe um rótulo deste alfabeto
        conservative: Garante espaço de estados finito
    """
    n_places = int(rng.integers(1, max_places + 1))
    n_transitions = int(rng.integers(1, max_transitions + 1))
    places = [f'p{i}' for i in range(n_places)]
    kinds = list(KIND_WEIGHTS)
    weights = np.array(list(KIND_WEIGHTS.values()))
    transitions: List[Transition] = []
    for i in range(n_transitions):
        kind = kinds[int(rng.choice(len(kinds), p=weights / weights.sum()))]
        pre = random_bag(rng, places, max_weight, nonzero=conservative or rng.random() < 0.8)
        label = str(labels[int(rng.integers(len(labels)))]) if labels else None
        if kind is TransitionKind.CUT:
            transitions.append(Transition(f't{i}', kind, pre, None, None, label))
            continue
        post = random_bag(rng, places, max_weight)
        if kind is TransitionKind.ELEMENTARY:
            if conservative:
                post = _shrink(rng, post, pre.total)
            transitions.append(Transition(f't{i}', kind, pre, post, None, label))
            continue
        start = random_bag(rng, places, max_weight, nonzero=not conservative)
        if conservative:
            if pre.total < 2:
                pre = pre + Marking.unit(places[int(rng.integers(n_places))])
            post = _shrink(rng, post, pre.total - 1)
            start = _shrink(rng, start, pre.total - 1 - post.total)
        transitions.append(Transition(f't{i}', kind, pre, post, start, label))
    return RpnDef(tuple(places), tuple(transitions))


def random_state(rng: np.random.Generator, defn: RpnDef, max_vertices: int = 3,
                 max_tokens: int = 2, density: float = 0.5) -> TreeState:
    """Estado aleatório válido; arestas rotuladas por W+ de abstratas da rede"""
    posts = sorted({t.output for t in defn.abstract}, key=Marking.key)
    n = int(rng.integers(1, max_vertices + 1)) if posts else 1
    markings: Dict[int, Marking] = {}
    parent: Dict[int, int] = {}
    edge: Dict[int, Marking] = {}
    for v in range(n):
        markings[v] = random_bag(rng, defn.places, max_tokens, density)
        if v > 0:
            parent[v] = int(rng.integers(v))
            edge[v] = posts[int(rng.integers(len(posts)))]
    return TreeState.build(0, markings, parent, edge)


def random_instance(rng: np.random.Generator, conservative: bool = True,
                    **kwargs) -> Tuple[RpnDef, TreeState, TreeState]:
    """Rede, estado inicial e estado alvo"""
    defn = random_net(rng, conservative=conservative, **kwargs)
    s0 = random_state(rng, defn)
    target = random_state(rng, defn, max_vertices=2, max_tokens=1, density=0.3)
    return defn, s0, target


def antichain_state(n: int) -> TreeState:
    """
    s_n da família de estados dois a dois incomparáveis: raiz 0, aresta p_r,
    n arestas p_l em cadeia e folha marcada p_l
    """
    if n < 1:
        raise ValueError('n deve ser ≥ 1')
    markings = {v: Marking.zero() for v in range(n + 2)}
    markings[n + 1] = Marking.unit('p_l')
    parent = {v: v - 1 for v in range(1, n + 2)}
    edge = {v: Marking.unit('p_l') for v in range(2, n + 2)}
    edge[1] = Marking.unit('p_r')
    return TreeState.build(0, markings, parent, edge)


def write_random_nets(out_dir: Path, count: int = 10, seed: int = 42,
                      conservative: bool = True) -> List[Path]:
    rng = np.random.default_rng(seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(count):
        defn, s0, target = random_instance(rng, conservative=conservative)
        source = SourceFile(defn, {'s0': NamedState(s0), 'sf': NamedState(target)},
                            {'final': ('sf',)})
        path = out_dir / f'random_{k:03d}.rpn'
        path.write_text(format_source(source), encoding='utf-8')
        paths.append(path)
    return paths


def main():
    """Gera arquivos .rpn aleatórios com semente fixa"""
    parser = argparse.ArgumentParser(description='Gera RPNs aleatórias no formato .rpn')
    parser.add_argument('--output', type=str, required=True, help='Diretório de saída')
    parser.add_argument('--count', type=int, default=10, help='Quantidade de redes (padrão: 10)')
    parser.add_argument('--seed', type=int, default=42, help='Seed para reprodutibilidade (padrão: 42)')
    parser.add_argument('--unbounded', action='store_true',
                        help='Permite redes com espaço de estados infinito')
    args = parser.parse_args()

    print("=" * 70)
    print("🎲 rpnkit - Geração de RPNs aleatórias")
    print("=" * 70)
    print()

    try:
        paths = write_random_nets(Path(args.output), args.count, args.seed,
                                  conservative=not args.unbounded)
        for path in paths:
            print(f"   💾 {path}")
        print()
        print("=" * 70)
        print(f"✅ {len(paths)} redes geradas (seed {args.seed})")
        print("=" * 70)
        return 0
    except OSError as e:
        print(f"\n❌ Erro durante geração: {str(e)}")
        return 1


if __name__ == '__main__':
    exit(main())
