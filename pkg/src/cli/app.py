"""
Interface de linha de comando do rpnkit

Subcomandos: check, graph, order, sim, build e oracle. Códigos de saída:
0 = decidido, 2 = erro de entrada, 3 = limite atingido ou resposta desconhecida.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from src.cli.config import EXIT_CODES, HELP_TEXTS, VERDICT_LABELS, resolve_caps
from src.cli.formatting import (
    dumps,
    embedding_document,
    events_document,
    explore_document,
    format_events,
    member_document,
    sample_document,
    verdict_document,
    verdict_text,
)
from src.cli.rpnfile import NamedState, SourceFile, format_source, format_state, load, parse_script
from src.rpn.absgraph import to_dot
from src.rpn.constructions import (
    LabeledInstance,
    cover_to_cut_construct,
    cut_to_cover_construct,
    union_construct,
)
from src.rpn.decide import (
    Caps,
    abstract_graph_of,
    decide_boundedness,
    decide_cover,
    decide_cut,
    decide_finiteness,
    decide_termination,
)
from src.rpn.errors import CapExceededError, RpnError
from src.rpn.explore import UNKNOWN, explore, language_sample, member
from src.rpn.model import RpnDef, Transition, TransitionKind, TreeState, fire_script
from src.rpn.order import leq, leq_rooted
from src.rpn.petri import PetriNet, karp_miller_frame
from src.rpn.reduce import build_hat, build_hat_el, make_rooted

logger = logging.getLogger(__name__)

PROBLEMS = ('cut', 'cover', 'terminate', 'bounded', 'finite')
BUILDS = ('rooted', 'hat', 'hatel', 'cov2cut', 'cut2cov', 'union')
ORACLES = ('explore', 'member', 'sample', 'km')


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument('--json', action='store_true', help=HELP_TEXTS['json'])
    p.add_argument('--log-level', default='WARNING',
                   choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Nível de log em stderr')
    p.add_argument('--cap-steps', type=int, default=None, help=HELP_TEXTS['caps'])
    p.add_argument('--cap-states', type=int, default=None)
    p.add_argument('--eps-budget', type=int, default=None)
    p.add_argument('--witness-cap', type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    """Parser com os subcomandos check, graph, order, sim, build e oracle"""
    parser = argparse.ArgumentParser(
        prog='rpnkit',
        description='Análise de Redes de Petri Recursivas (RPN)',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemplos de uso:

  # Terminação a partir do primeiro state do arquivo
  python rpnkit_cli.py check terminate src/data/fixtures/phases.rpn

  # Corte com testemunha, em JSON
  python rpnkit_cli.py check cut src/data/fixtures/phases.rpn --state sBeg --witness --json

  # Grafo abstrato em DOT
  python rpnkit_cli.py graph src/data/fixtures/phases.rpn --dot grafo.dot
        """
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check', help='Decide corte, cobertura, terminação, limitação ou finitude')
    p.add_argument('problem', choices=PROBLEMS)
    p.add_argument('file')
    p.add_argument('--state', help=HELP_TEXTS['state'])
    p.add_argument('--target', help=HELP_TEXTS['target'])
    p.add_argument('--witness', action='store_true', help=HELP_TEXTS['witness'])
    p.add_argument('--timing', action='store_true', help=HELP_TEXTS['timing'])
    _add_common(p)

    p = sub.add_parser('graph', help='Grafo abstrato G_{N,s0}')
    p.add_argument('file')
    p.add_argument('--state', help=HELP_TEXTS['state'])
    p.add_argument('--dot', required=True, help="Arquivo DOT de saída ('-' para stdout)")
    _add_common(p)

    p = sub.add_parser('order', help='Compara dois states por ≼ (ou ≼_r com --rooted)')
    p.add_argument('file')
    p.add_argument('a')
    p.add_argument('b')
    p.add_argument('--rooted', action='store_true')
    p.add_argument('--witness', action='store_true', help=HELP_TEXTS['witness'])
    _add_common(p)

    p = sub.add_parser('sim', help='Executa um roteiro de disparos')
    p.add_argument('file')
    p.add_argument('--state', help=HELP_TEXTS['state'])
    p.add_argument('--fire', required=True, help="Roteiro: 'vertice transicao [as alias]' por linha")
    _add_common(p)

    p = sub.add_parser('build', help='Emite a rede transformada no formato .rpn')
    p.add_argument('kind', choices=BUILDS)
    p.add_argument('file')
    p.add_argument('--state', help=HELP_TEXTS['state'])
    p.add_argument('--target', help=HELP_TEXTS['target'])
    p.add_argument('--with', dest='other', help='Segundo arquivo (union)')
    p.add_argument('-o', '--output', help='Arquivo de saída (padrão: stdout)')
    _add_common(p)

    p = sub.add_parser('oracle', help='Explorador limitado, pertinência, amostragem e Karp–Miller')
    p.add_argument('kind', choices=ORACLES)
    p.add_argument('file')
    p.add_argument('--state', help=HELP_TEXTS['state'])
    p.add_argument('--target', help=HELP_TEXTS['target'])
    p.add_argument('--word', default='', help='Palavra; letras separadas por espaço ou caracteres')
    p.add_argument('--max-len', type=int, default=3)
    _add_common(p)
    return parser


def _caps(args: argparse.Namespace) -> Dict[str, int]:
    """Flags de linha de comando sobre RPNKIT_CAPS e DEFAULT_CAPS"""
    return resolve_caps({
        'explore_steps': args.cap_steps,
        'member_steps': args.cap_steps,
        'explore_states': args.cap_states,
        'sample_states': args.cap_states,
        'eps_budget': args.eps_budget,
        'witness_steps': args.witness_cap,
    })


def _decision_caps(caps: Mapping[str, int]) -> Caps:
    return Caps(witness_steps=caps['witness_steps'], km_nodes=caps['km_nodes'],
                explore_steps=caps['explore_steps'], explore_states=caps['explore_states'])


def _emit(text: str, output: Optional[str] = None) -> None:
    if output and output != '-':
        Path(output).write_text(text, encoding='utf-8')
    else:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')


def parse_word(text: str) -> Tuple[str, ...]:
    """``'a b c'`` ou ``'abc'`` viram ('a', 'b', 'c')"""
    text = text.strip()
    if not text:
        return ()
    if any(ch.isspace() for ch in text):
        return tuple(text.split())
    return tuple(text)


def cmd_check(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """
    check: decide cut, cover, terminate, bounded ou finite

    Args:
        args: Argumentos do subcomando
        source: Arquivo .rpn já validado
        caps: Limites resolvidos (flags, ambiente e padrões)

    Returns:
        0; estouros de limite sobem como CapExceededError
    """
    named = source.state(args.state)
    dcaps = _decision_caps(caps)
    if args.problem == 'cut':
        verdict = decide_cut(source.net, named.state, witness=args.witness, caps=dcaps)
    elif args.problem == 'cover':
        verdict = decide_cover(source.net, named.state, source.target(args.target),
                               witness=args.witness, caps=dcaps)
    elif args.problem == 'terminate':
        verdict = decide_termination(source.net, named.state, caps=dcaps)
    elif args.problem == 'bounded':
        verdict = decide_boundedness(source.net, named.state, caps=dcaps)
    else:
        verdict = decide_finiteness(source.net, named.state, caps=dcaps)
    names = named.vertex_names
    if args.json:
        _emit(dumps(verdict_document(verdict, names, timing=args.timing)))
    else:
        _emit(verdict_text(verdict, names, show_witness=args.witness))
    return EXIT_CODES['decided']


def cmd_graph(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """graph: grafo abstrato em DOT (arquivo ou stdout) e resumo"""
    g = abstract_graph_of(source.net, source.state(args.state).state, caps=_decision_caps(caps))
    _emit(to_dot(g), args.dot)
    if args.dot == '-':
        return EXIT_CODES['decided']
    if args.json:
        _emit(dumps({'problem': 'graph', 'answer': True, 'method': 'abstract-graph-fixpoint',
                     'vertices': list(g.vertices), 'edges': [list(e) for e in sorted(g.edges)],
                     'markings': {v: str(g.marking_of[v]) for v in g.vertices}}))
    else:
        _emit(f'{len(g.vertices)} vértices, {len(g.edges)} arestas -> {args.dot}')
    return EXIT_CODES['decided']


def cmd_order(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """order: compara dois states por ≼ (ou ≼_r com --rooted)"""
    a, b = source.state(args.a), source.state(args.b)
    answer = (leq_rooted if args.rooted else leq)(a.state, b.state)
    doc = embedding_document(answer, args.rooted, a.vertex_names, b.vertex_names)
    if args.json:
        _emit(dumps(doc))
    else:
        yes, no = VERDICT_LABELS['order']
        text = yes if answer is not None else no
        if args.witness and answer is not None:
            text += '\n' + json.dumps(doc['witness']['map'], sort_keys=True, ensure_ascii=False)
        _emit(text)
    return EXIT_CODES['decided']


def cmd_sim(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """
    sim: executa um roteiro de disparos e imprime o estado final

    Args:
        args: Argumentos do subcomando
        source: Arquivo .rpn já validado
        caps: Limites resolvidos (flags, ambiente e padrões)

    Returns:
        0; passos não habilitados sobem como FiringError
    """
    named = source.state(args.state)
    steps = parse_script(Path(args.fire).read_text(encoding='utf-8'))
    final, events, scope = fire_script(source.net, named.state, named.names, steps)
    names = {v: n for n, v in scope.items()}
    state_text = format_state('final', final, names)
    if args.json:
        _emit(dumps({'problem': 'sim', 'answer': True, 'method': 'fire-script',
                     'events': events_document(events, names), 'final': state_text}))
    else:
        _emit(f'{format_events(events, names)}\n{state_text}')
    return EXIT_CODES['decided']


def _hat_el_as_net(el: PetriNet) -> RpnDef:
    return RpnDef(el.places, tuple(Transition(t.id, TransitionKind.ELEMENTARY, t.pre, t.post,
                                              None, t.label) for t in el.transitions))


def _target_states(prefix: str, states: Sequence[TreeState]) -> Tuple[Dict[str, NamedState], Tuple[str, ...]]:
    named = {f'{prefix}{k}': NamedState(s) for k, s in enumerate(states)}
    return named, tuple(named)


def cmd_build(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """
    build: aplica uma construção e imprime o resultado como .rpn

    Args:
        args: Argumentos do subcomando
        source: Arquivo .rpn já validado
        caps: Limites resolvidos (flags, ambiente e padrões)

    Returns:
        0
    """
    named = source.state(args.state)
    if args.kind == 'rooted':
        rooted = make_rooted(source.net, named.state)
        result = SourceFile(rooted.net, {'s0': NamedState(rooted.initial_state)})
    elif args.kind == 'hat':
        hat = build_hat(source.net, witness_cap=caps['witness_steps'])
        result = SourceFile(hat.net, dict(source.states), dict(source.targets))
    elif args.kind == 'hatel':
        hat = build_hat(source.net, witness_cap=caps['witness_steps'])
        result = SourceFile(_hat_el_as_net(build_hat_el(hat)))
    elif args.kind == 'cov2cut':
        net, s0 = cover_to_cut_construct(source.net, named.state, source.target(args.target))
        result = SourceFile(net, {'s0': NamedState(s0)})
    elif args.kind == 'cut2cov':
        net, s0, target = cut_to_cover_construct(source.net, named.state)
        finals, refs = _target_states('f', target.states)
        result = SourceFile(net, {'s0': NamedState(s0), **finals}, {'done': refs})
    else:
        if not args.other:
            raise RpnError("build union precisa de --with ARQUIVO", 'missing-argument')
        other = load(args.other)
        left = LabeledInstance(source.net, named.state, source.target(args.target))
        right = LabeledInstance(other.net, other.state().state, other.target())
        union = union_construct(left, right)
        finals, refs = _target_states('f', union.target.states)
        result = SourceFile(union.net, {'s0': NamedState(union.state), **finals}, {'union': refs})
    _emit(format_source(result), args.output)
    return EXIT_CODES['decided']


def cmd_oracle(args: argparse.Namespace, source: SourceFile, caps: Mapping[str, int]) -> int:
    """
    oracle: explorador limitado, pertinência, amostragem e Karp–Miller

    Args:
        args: Argumentos do subcomando
        source: Arquivo .rpn já validado
        caps: Limites resolvidos (flags, ambiente e padrões)

    Returns:
        0 quando a resposta é completa, 3 quando um limite a truncou
    """
    named = source.state(args.state)
    if args.kind == 'explore':
        result = explore(source.net, named.state, caps['explore_steps'], caps['explore_states'])
        doc = explore_document(result)
        if args.json:
            _emit(dumps(doc))
        else:
            cut = f' ({result.frontier_cut})' if result.frontier_cut else ''
            _emit(f'{len(result.states)} estados, exhausted={str(result.exhausted).lower()}{cut}')
        return EXIT_CODES['decided'] if result.exhausted else EXIT_CODES['cap_or_unknown']

    if args.kind == 'km':
        rooted = make_rooted(source.net, named.state)
        el = build_hat_el(build_hat(rooted.net, witness_cap=caps['witness_steps']))
        frame = karp_miller_frame(el, rooted.initial_marking, node_cap=caps['km_nodes'])
        if args.json:
            _emit(dumps({'problem': 'km', 'answer': True, 'method': 'karp-miller',
                         'nodes': json.loads(frame.to_json(orient='records'))}))
        else:
            _emit(frame.to_string(index=False))
        return EXIT_CODES['decided']

    target = source.target(args.target)
    if args.kind == 'member':
        word = parse_word(args.word)
        result = member(source.net, named.state, target.states, word, caps['member_steps'],
                        eps_budget=caps['eps_budget'], cap_states=caps['sample_states'])
        if args.json:
            _emit(dumps(member_document(result, word, named.vertex_names)))
        else:
            _emit(result.answer)
        return EXIT_CODES['cap_or_unknown'] if result.answer == UNKNOWN else EXIT_CODES['decided']

    sample = language_sample(source.net, named.state, target.states, args.max_len,
                             eps_budget=caps['eps_budget'], cap_states=caps['sample_states'])
    doc = sample_document(sample, args.max_len)
    if args.json:
        _emit(dumps(doc))
    else:
        _emit(' '.join(doc['words']) + ('' if sample.complete else '  (incompleta)'))
    return EXIT_CODES['decided'] if sample.complete else EXIT_CODES['cap_or_unknown']


COMMANDS = {
    'check': cmd_check,
    'graph': cmd_graph,
    'order': cmd_order,
    'sim': cmd_sim,
    'build': cmd_build,
    'oracle': cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Função principal: lê o arquivo .rpn, executa o subcomando e devolve o
    código de saída. Erros de entrada viram ``❌ Erro: ...`` em stderr.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        caps = _caps(args)
        source = load(args.file)
        return COMMANDS[args.command](args, source, caps)
    except CapExceededError as e:
        print(f'❌ Erro: {e} (limite {e.cap})', file=sys.stderr)
        return EXIT_CODES['cap_or_unknown']
    except RpnError as e:
        print(f'❌ Erro: {e}', file=sys.stderr)
        return EXIT_CODES['input_error']
    except OSError as e:
        print(f'❌ Erro: {e}', file=sys.stderr)
        return EXIT_CODES['input_error']


if __name__ == '__main__':
    sys.exit(main())
