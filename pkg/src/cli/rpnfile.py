"""
Formato texto .rpn: leitor e impressor canônico

    net {
      places p_ini p_fin;
      abs t_beg { in: p_ini; out: p_fin; start: p_beg; label: a; }
      cut t_tau { in: p_beg; }
    }
    state sIni { node r marking p_ini; }
    target fim { sFin }

Bolsas são ``p q:2`` ou ``0``; comentários começam com ``#``. Um bloco
``state`` sem nós denota o estado vazio ∅.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from src.rpn.constructions import CoverTarget
from src.rpn.errors import ParseError, ValidationError
from src.rpn.model import Marking, RpnDef, ScriptStep, Transition, TransitionKind, TreeState
from src.rpn.validation import validate, validate_state

IDENT = r"[A-Za-z_][A-Za-z0-9_.^'-]*"

_TOKEN = re.compile(rf"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
                    rf"|(?P<num>\d+)|(?P<id>{IDENT})|(?P<sym>[{{}};:])")

_KINDS = {'elem': TransitionKind.ELEMENTARY, 'abs': TransitionKind.ABSTRACT, 'cut': TransitionKind.CUT}
_KEYWORDS = frozenset({'net', 'places', 'state', 'target', 'node', 'parent', 'edge', 'marking',
                       'in', 'out', 'start', 'label', *_KINDS})


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """
    Quebra o texto em tokens com linha e coluna (a partir de 1)

    Args:
        text: Conteúdo de um arquivo .rpn

    Returns:
        Lista de tokens terminada por um token 'eof'

    Raises:
        ParseError: caractere fora do alfabeto do formato
    """
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"caractere inesperado '{text[pos]}'", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'nl':
            line, line_start = line + 1, match.end()
        elif kind not in ('ws', 'comment'):
            tokens.append(Token(kind, match.group(), line, pos - line_start + 1))
        pos = match.end()
    tokens.append(Token('eof', '', line, pos - line_start + 1))
    return tokens


@dataclass(frozen=True)
class NamedState:
    """Estado com os nomes dados aos vértices no arquivo"""

    state: TreeState
    names: Mapping[str, int] = field(default_factory=dict)

    @property
    def vertex_names(self) -> Dict[int, str]:
        return {v: name for name, v in self.names.items()}


@dataclass(frozen=True)
class SourceFile:
    """Conteúdo de um arquivo .rpn: a rede e os blocos state e target, na ordem do arquivo"""

    net: RpnDef
    states: Mapping[str, NamedState] = field(default_factory=dict)
    targets: Mapping[str, Tuple[str, ...]] = field(default_factory=dict)

    def state(self, name: Optional[str] = None) -> NamedState:
        """Estado pelo nome; sem nome, o primeiro declarado"""
        if name is None:
            if not self.states:
                raise ParseError('o arquivo não declara nenhum state', 1, 1)
            return next(iter(self.states.values()))
        if name not in self.states:
            raise ParseError(f"state '{name}' não declarado", 1, 1)
        return self.states[name]

    def target(self, name: Optional[str] = None) -> CoverTarget:
        """Alvo pelo nome de um bloco target ou de um state (alvo unitário)"""
        if name is None:
            if not self.targets:
                raise ParseError('o arquivo não declara nenhum target', 1, 1)
            name = next(iter(self.targets))
        if name in self.targets:
            return CoverTarget(tuple(self.states[ref].state for ref in self.targets[name]))
        return CoverTarget.single(self.state(name).state)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        found = token.text or 'fim do arquivo'
        return ParseError(f"{message}, encontrado '{found}'", token.line, token.column)

    def accept(self, text: str) -> bool:
        if self.current.kind in ('id', 'sym', 'num') and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.current
        if not self.accept(text):
            raise self.fail(f"esperado '{text}'")
        return token

    def ident(self, what: str) -> str:
        token = self.current
        if token.kind != 'id' or token.text in _KEYWORDS:
            raise self.fail(f'esperado {what}')
        self.pos += 1
        return token.text

    def field_name(self, name: str) -> bool:
        if self.current.kind == 'id' and self.current.text == name \
                and self.tokens[self.pos + 1].text == ':':
            self.pos += 2
            return True
        return False

    def bag(self) -> Marking:
        if self.current.kind == 'num' and self.current.text == '0':
            self.pos += 1
            return Marking.zero()
        counts: Dict[str, int] = {}
        while self.current.kind == 'id' and self.current.text not in _KEYWORDS:
            place = self.ident('lugar')
            n = 1
            if self.accept(':'):
                if self.current.kind != 'num':
                    raise self.fail('esperada uma contagem')
                n = int(self.current.text)
                self.pos += 1
            counts[place] = counts.get(place, 0) + n
        if not counts:
            raise self.fail("esperada uma bolsa de lugares ou '0'")
        return Marking.of(counts)

    def transition(self) -> Transition:
        kind = _KINDS[self.current.text]
        self.pos += 1
        tid = self.ident('id de transição')
        self.expect('{')
        if not self.field_name('in'):
            raise self.fail("esperado 'in:'")
        pre = self.bag()
        self.expect(';')
        post = start = label = None
        if self.field_name('out'):
            post = self.bag()
            self.expect(';')
        if self.field_name('start'):
            start = self.bag()
            self.expect(';')
        if self.field_name('label'):
            label = self.ident('símbolo')
            self.expect(';')
        self.expect('}')
        return Transition(tid, kind, pre, post, start, label)

    def net(self) -> RpnDef:
        self.expect('net')
        self.expect('{')
        self.expect('places')
        places: List[str] = []
        while self.current.text != ';':
            places.append(self.ident('lugar'))
        if not places:
            raise self.fail('esperado ao menos um lugar')
        self.expect(';')
        transitions: List[Transition] = []
        while self.current.text in _KINDS and self.current.kind == 'id':
            transitions.append(self.transition())
        self.expect('}')
        return RpnDef(tuple(places), tuple(transitions))

    def state(self) -> Tuple[str, NamedState]:
        self.expect('state')
        name = self.ident('nome de state')
        self.expect('{')
        names: Dict[str, int] = {}
        markings: Dict[int, Marking] = {}
        parent: Dict[int, int] = {}
        edge: Dict[int, Marking] = {}
        root: Optional[int] = None
        while self.current.text == 'node':
            self.pos += 1
            token = self.current
            node = self.ident('id de nó')
            if node in names:
                raise self.fail(f"nó '{node}' repetido", token)
            v = len(names)
            names[node] = v
            if self.accept('parent'):
                ptoken = self.current
                pname = self.ident('nó pai')
                if pname not in names or names[pname] == v:
                    raise self.fail(f"pai '{pname}' não declarado antes", ptoken)
                parent[v] = names[pname]
                self.expect('edge')
                edge[v] = self.bag()
            elif root is not None:
                raise self.fail('o state já tem raiz', token)
            else:
                root = v
            self.expect('marking')
            markings[v] = self.bag()
            self.expect(';')
        self.expect('}')
        if not names:
            return name, NamedState(TreeState.empty())
        return name, NamedState(TreeState.build(root, markings, parent, edge), names)

    def target(self) -> Tuple[str, Tuple[str, ...]]:
        self.expect('target')
        name = self.ident('nome de target')
        self.expect('{')
        refs: List[str] = []
        while self.current.text != '}':
            refs.append(self.ident('nome de state'))
        self.expect('}')
        return name, tuple(refs)

    def file(self) -> SourceFile:
        net = self.net()
        states: Dict[str, NamedState] = {}
        targets: Dict[str, Tuple[str, ...]] = {}
        while self.current.kind != 'eof':
            token = self.current
            if token.text == 'state':
                name, st = self.state()
                if name in states:
                    raise self.fail(f"state '{name}' repetido", token)
                states[name] = st
            elif token.text == 'target':
                name, refs = self.target()
                missing = [r for r in refs if r not in states]
                if missing or not refs:
                    raise self.fail(f"target '{name}' referencia states inexistentes", token)
                targets[name] = refs
            else:
                raise self.fail("esperado 'state' ou 'target'")
        return SourceFile(net, states, targets)


def parse(text: str) -> SourceFile:
    """
    Lê um arquivo .rpn e valida a rede e os estados

    Raises:
        ParseError: erro de sintaxe, com linha e coluna
        ValidationError: violações de ``validate`` e ``validate_state``
    """
    source = _Parser(text).file()
    violations = validate(source.net)
    for name, st in source.states.items():
        violations.extend(validate_state(source.net, st.state, name))
    if violations:
        raise ValidationError(violations)
    return source


def load(path: Path | str) -> SourceFile:
    """
    Lê e valida um arquivo .rpn do disco

    Args:
        path: Caminho do arquivo (UTF-8)

    Returns:
        SourceFile com a rede, os states e os targets declarados
    """
    return parse(Path(path).read_text(encoding='utf-8'))


def format_bag(m: Marking) -> str:
    """Bolsa no formato do arquivo: ``p q:2``, ou ``0`` se vazia"""
    if m.is_zero:
        return '0'
    return ' '.join(p if n == 1 else f'{p}:{n}' for p, n in m.items)


def _format_transition(t: Transition) -> str:
    parts = [f'in: {format_bag(t.pre)};']
    if t.post is not None:
        parts.append(f'out: {format_bag(t.post)};')
    if t.start is not None:
        parts.append(f'start: {format_bag(t.start)};')
    if t.label is not None:
        parts.append(f'label: {t.label};')
    return f'  {t.kind.value} {t.id} {{ {" ".join(parts)} }}'


def format_net(defn: RpnDef) -> str:
    """
    Bloco ``net`` canônico

    Args:
        defn: Rede a imprimir

    Returns:
        Texto com lugares e transições ordenados por id
    """
    lines = ['net {', f'  places {" ".join(sorted(defn.places))};']
    lines.extend(_format_transition(t) for t in sorted(defn.transitions, key=lambda t: t.id))
    lines.append('}')
    return '\n'.join(lines)


def _node_names(s: TreeState, names: Optional[Mapping[int, str]]) -> Dict[int, str]:
    names = dict(names or {})
    return {v: names.get(v, f'n{v}') for v in s.vertices}


def format_state(name: str, s: TreeState, names: Optional[Mapping[int, str]] = None) -> str:
    """
    Bloco ``state`` com os nós em pré-ordem, de modo que todo pai vem antes

    Args:
        name: Nome do bloco
        s: Estado
        names: Nomes dos vértices; os que faltam viram ``n<id>``

    Returns:
        Texto do bloco
    """
    if s.is_empty:
        return f'state {name} {{ }}'
    label = _node_names(s, names)
    lines = [f'state {name} {{']
    for v in s.descendants(s.root):
        link = ''
        if v != s.root:
            link = f' parent {label[s.parent[v]]} edge {format_bag(s.edge[v])}'
        lines.append(f'  node {label[v]}{link} marking {format_bag(s.markings[v])};')
    lines.append('}')
    return '\n'.join(lines)


def format_source(source: SourceFile) -> str:
    """Forma canônica: lugares e transições ordenados por id, contagens 1 omitidas"""
    blocks = [format_net(source.net)]
    for name, st in source.states.items():
        blocks.append(format_state(name, st.state, st.vertex_names))
    for name, refs in source.targets.items():
        blocks.append(f'target {name} {{ {" ".join(refs)} }}')
    return '\n'.join(blocks) + '\n'


def _script_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        words = raw.split('#', 1)[0].split()
        if words:
            yield number, words


def parse_script(text: str) -> List[ScriptStep]:
    """Roteiro de disparos, um por linha: ``vertice transicao [as alias]``"""
    steps: List[ScriptStep] = []
    for number, words in _script_lines(text):
        if len(words) == 2:
            steps.append(ScriptStep(words[0], words[1]))
        elif len(words) == 4 and words[2] == 'as':
            steps.append(ScriptStep(words[0], words[1], words[3]))
        else:
            raise ParseError("esperado 'vertice transicao [as alias]'", number, 1)
    return steps
