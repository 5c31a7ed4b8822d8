"""
Quase-ordens ≼ e ≼_r sobre estados

s ≼ s′ quando existe uma injeção f dos vértices de s nos de s′ que preserva
arestas imediatas, com marcações e rótulos de aresta dominados. A busca ancora
a raiz de s em cada vértice de s′ e resolve os filhos por emparelhamento
bipartido máximo, com memoização por par de vértices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from src.rpn.model import TreeState, abstraction


@dataclass(frozen=True)
class Embedding:
    map: Mapping[int, int]

    def __getitem__(self, v: int) -> int:
        return self.map[v]


def is_embedding(s: TreeState, s2: TreeState, emb: Embedding) -> bool:
    """
    Confere os invariantes de um Embedding independentemente da busca

    Args:
        s: Estado de origem
        s2: Estado de destino
        emb: Mapa candidato de vértices de s em vértices de s′

    Returns:
        True se o mapa é injetivo, preserva arestas e domina marcações e rótulos
    """
    f = emb.map
    if s.is_empty:
        return not f
    if set(f) != set(s.vertices) or len(set(f.values())) != len(f):
        return False
    for v, image in f.items():
        if image not in s2.markings or not s.markings[v] <= s2.markings[image]:
            return False
        if v == s.root:
            continue
        w = s.parent[v]
        if s2.parent.get(image) != f[w] or not s.edge[v] <= s2.edge[image]:
            return False
    return True


class _Embedder:
    """
    Tabela de memo local a uma comparação. Os pares (u, u′) são resolvidos com
    pilha explícita, filhos antes do pai, então a profundidade das árvores não
    esbarra no limite de recursão.
    """

    def __init__(self, s: TreeState, s2: TreeState):
        self.s = s
        self.s2 = s2
        self.memo: Dict[Tuple[int, int], Optional[Dict[int, int]]] = {}

    def embed(self, u: int, u2: int) -> bool:
        stack = [(u, u2)]
        while stack:
            pair = stack[-1]
            if pair in self.memo:
                stack.pop()
                continue
            missing = self._pending(*pair)
            if missing:
                stack.extend(missing)
            else:
                stack.pop()
                self.memo[pair] = self._match(*pair)
        return self.memo[(u, u2)] is not None

    def _viable(self, u: int, u2: int) -> bool:
        s, s2 = self.s, self.s2
        return s.markings[u] <= s2.markings[u2] and len(s.children(u)) <= len(s2.children(u2))

    def _pending(self, u: int, u2: int) -> List[Tuple[int, int]]:
        """Pares filho × filho ainda sem resposta de que (u, u′) depende"""
        if not self._viable(u, u2):
            return []
        s, s2 = self.s, self.s2
        return [(c, d) for c in s.children(u) for d in s2.children(u2)
                if s.edge[c] <= s2.edge[d] and (c, d) not in self.memo]

    def _match(self, u: int, u2: int) -> Optional[Dict[int, int]]:
        if not self._viable(u, u2):
            return None
        s, s2 = self.s, self.s2
        kids = s.children(u)
        if not kids:
            return {}
        kids2 = s2.children(u2)
        adjacency = np.zeros((len(kids), len(kids2)), dtype=np.int8)
        for i, c in enumerate(kids):
            for j, d in enumerate(kids2):
                if s.edge[c] <= s2.edge[d] and self.memo[(c, d)] is not None:
                    adjacency[i, j] = 1
            if not adjacency[i].any():
                return None
        matching = maximum_bipartite_matching(csr_matrix(adjacency), perm_type='column')
        if (matching < 0).any():
            return None
        return {kids[i]: kids2[j] for i, j in enumerate(matching)}

    def unfold(self, u: int, u2: int) -> Dict[int, int]:
        out: Dict[int, int] = {}
        stack = [(u, u2)]
        while stack:
            a, b = stack.pop()
            out[a] = b
            stack.extend(self.memo[(a, b)].items())
        return out


def leq(s: TreeState, s2: TreeState) -> Optional[Embedding]:
    """
    Decide s ≼ s′

    A raiz de s é ancorada em cada vértice de s′, em ordem crescente de id;
    a primeira âncora que funciona dá a testemunha.

    Args:
        s: Estado menor (o que precisa mergulhar)
        s2: Estado maior

    Returns:
        Um Embedding testemunha, ou None se s ⋠ s′
    """
    if s.is_empty:
        return Embedding({})
    if s2.is_empty or s.size > s2.size:
        return None
    emb = _Embedder(s, s2)
    for anchor in s2.vertices:
        if emb.embed(s.root, anchor):
            return Embedding(emb.unfold(s.root, anchor))
    return None


def leq_rooted(s: TreeState, s2: TreeState) -> Optional[Embedding]:
    """
    Decide s ≼_r s′: a raiz de s vai obrigatoriamente na raiz de s′

    Args:
        s: Estado menor
        s2: Estado maior

    Returns:
        Um Embedding que leva raiz em raiz, ou None. O estado vazio só fica
        abaixo de outro estado vazio.
    """
    if s.is_empty:
        return Embedding({}) if s2.is_empty else None
    if s2.is_empty or s.size > s2.size:
        return None
    emb = _Embedder(s, s2)
    if emb.embed(s.root, s2.root):
        return Embedding(emb.unfold(s.root, s2.root))
    return None


def equivalent(s: TreeState, s2: TreeState) -> bool:
    """s ≃ s′: iguais a menos de renomeação de vértices"""
    return abstraction(s) == abstraction(s2)
