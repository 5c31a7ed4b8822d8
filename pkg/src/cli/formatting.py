"""
Funções de formatação da saída do rpnkit (texto, JSON e DOT)
"""

import json
from typing import Any, Dict, List, Mapping, Optional, Sequence

from src.cli.config import VERDICT_LABELS
from src.rpn.decide import Verdict, Witness
from src.rpn.explore import ExploreResult, LanguageSample, MemberResult
from src.rpn.model import FiringEvent
from src.rpn.order import Embedding
from src.rpn.petri import AnalysisStats


def vertex_label(v: int, names: Optional[Mapping[int, str]] = None) -> str:
    """Nome do vértice no arquivo; vértices criados durante a execução viram ``#<id>``"""
    if names and v in names:
        return names[v]
    return f'#{v}'


def format_events(events: Sequence[FiringEvent], names: Optional[Mapping[int, str]] = None) -> str:
    return ' '.join(f'({vertex_label(e.vertex, names)},{e.transition})' for e in events)


def events_document(events: Sequence[FiringEvent],
                    names: Optional[Mapping[int, str]] = None) -> List[Dict[str, str]]:
    return [{'vertex': vertex_label(e.vertex, names), 'transition': e.transition} for e in events]


def witness_document(w: Witness, names: Optional[Mapping[int, str]] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {'kind': w.kind}
    if w.kind == 'sequence':
        doc['events'] = events_document(w.events, names)
    elif w.kind == 'cycle':
        doc['cycle'] = list(w.cycle)
    elif w.kind == 'self-covering':
        doc.update(vertex=w.vertex, prefix=list(w.prefix), loop=list(w.loop))
    else:
        doc['vertex'] = w.vertex
    return doc


def stats_document(stats: AnalysisStats, wallclock_ms: Optional[float] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = stats.as_dict()
    if wallclock_ms is not None:
        doc['wallclock_ms'] = round(wallclock_ms, 3)
    return doc


def verdict_document(v: Verdict, names: Optional[Mapping[int, str]] = None,
                     timing: bool = False) -> Dict[str, Any]:
    """
    Documento JSON de um veredito

    Args:
        v: Veredito
        names: Nomes dos vértices do estado inicial
        timing: Inclui ``stats.wallclock_ms``
    """
    doc: Dict[str, Any] = {'problem': v.problem, 'answer': v.answer, 'method': v.method}
    if v.witness is not None:
        doc['witness'] = witness_document(v.witness, names)
    doc['stats'] = stats_document(v.stats, v.wallclock_ms if timing else None)
    return doc


def verdict_text(v: Verdict, names: Optional[Mapping[int, str]] = None,
                 show_witness: bool = False) -> str:
    """
    Resposta em uma linha (YES/NO, TERMINATING/NONTERMINATING, ...) e,
    com ``show_witness``, a testemunha na linha seguinte
    """
    yes, no = VERDICT_LABELS[v.problem]
    line = yes if v.answer else no
    w = v.witness
    if w is not None and w.kind == 'cycle':
        line += f' (cycle: {" -> ".join(w.cycle)})'
    elif w is not None and w.kind == 'self-covering':
        line += f' (self-covering at {w.vertex})'
    elif w is not None and w.kind == 'vertex' and not v.answer:
        line += f' (at {w.vertex})'
    if not show_witness or w is None:
        return line
    if w.kind == 'sequence':
        return f'{line}\nwitness: {format_events(w.events, names) or "(vazia)"}'
    if w.kind == 'self-covering':
        return f'{line}\nprefix: {" ".join(w.prefix) or "(vazio)"}\nloop: {" ".join(w.loop)}'
    return line


def embedding_document(answer: Optional[Embedding], rooted: bool,
                       names_a: Mapping[int, str], names_b: Mapping[int, str]) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        'problem': 'order',
        'answer': answer is not None,
        'method': 'rooted-tree-embedding' if rooted else 'tree-embedding',
    }
    if answer is not None:
        doc['witness'] = {
            'kind': 'embedding',
            'map': {vertex_label(u, names_a): vertex_label(u2, names_b)
                    for u, u2 in sorted(answer.map.items())},
        }
    return doc


def explore_document(result: ExploreResult) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        'problem': 'explore',
        'answer': result.exhausted,
        'method': 'bfs',
        'states': sorted(a.key for a in result.states),
        'transitions': len(result.transitions),
        'contains_empty': result.contains_empty,
    }
    if result.frontier_cut is not None:
        doc['frontier_cut'] = result.frontier_cut
    return doc


def member_document(result: MemberResult, word: Sequence[str],
                    names: Optional[Mapping[int, str]] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {'problem': 'member', 'answer': result.answer, 'method': 'bounded-bfs',
                           'word': list(word)}
    if result.witness is not None:
        doc['witness'] = {'kind': 'sequence', 'events': events_document(result.witness, names)}
    return doc


def format_word(word: Sequence[str]) -> str:
    if not word:
        return 'ε'
    if all(len(letter) == 1 for letter in word):
        return ''.join(word)
    return ' '.join(word)


def sample_document(sample: LanguageSample, max_len: int) -> Dict[str, Any]:
    words = sorted(sample.words, key=lambda w: (len(w), w))
    return {'problem': 'sample', 'answer': sample.complete, 'method': 'bounded-bfs',
            'max_len': max_len, 'words': [format_word(w) for w in words]}


def dumps(doc: Mapping[str, Any]) -> str:
    """JSON estável: chaves ordenadas, indentação fixa"""
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2)
