"""
Configurações centralizadas do rpnkit
"""
import os
from typing import Dict, Mapping, Optional

from src.rpn.errors import RpnError

DEFAULT_CAPS = {
    'witness_steps': 10_000,    # passos da testemunha expandida
    'eps_budget': 64,           # disparos ε por letra emitida
    'explore_steps': 64,        # profundidade do explorador
    'explore_states': 10_000,   # estados guardados pelo explorador
    'member_steps': 256,        # profundidade da pertinência
    'km_nodes': 200_000,        # nós de Karp–Miller e da busca auto-cobridora
    'sample_states': 200_000,   # configurações da amostragem de linguagem
}

EXIT_CODES = {
    'decided': 0,
    'input_error': 2,
    'cap_or_unknown': 3,
}

ID_PREFIXES = {
    'rooted': '__rt.',
    'cover_to_cut': '__cov.',
    'cut_to_cover': '__cut.',
    'union': '__un.',
}

VERDICT_LABELS = {
    'cut': ('YES', 'NO'),
    'cover': ('YES', 'NO'),
    'terminate': ('TERMINATING', 'NONTERMINATING'),
    'bounded': ('BOUNDED', 'UNBOUNDED'),
    'finite': ('FINITE', 'INFINITE'),
    'order': ('YES', 'NO'),
}

CAPS_ENV_VAR = 'RPNKIT_CAPS'

HELP_TEXTS = {
    'state': 'Nome do bloco state usado como estado inicial (padrão: o primeiro do arquivo)',
    'target': 'Nome do bloco target (ou de um state, tomado como alvo unitário)',
    'witness': 'Inclui a testemunha na saída',
    'json': 'Saída em JSON (validável por schemas/verdict.schema.json)',
    'timing': 'Inclui stats.wallclock_ms (quebra a estabilidade byte a byte)',
    'caps': f'Limites também aceitos em {CAPS_ENV_VAR}=chave=valor,...',
}


class ConfigError(RpnError):
    code = 'bad-caps'


def parse_caps(text: str) -> Dict[str, int]:
    """
    Lê pares ``chave=valor`` separados por vírgula

    Raises:
        ConfigError: chave desconhecida ou valor não inteiro
    """
    caps: Dict[str, int] = {}
    for chunk in text.split(','):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, sep, value = chunk.partition('=')
        key = key.strip()
        if not sep or key not in DEFAULT_CAPS:
            raise ConfigError(f"limite desconhecido em {CAPS_ENV_VAR}: '{chunk}'")
        try:
            number = int(value)
        except ValueError:
            raise ConfigError(f"valor não inteiro para '{key}': '{value.strip()}'") from None
        if number < 0:
            raise ConfigError(f"valor negativo para '{key}'")
        caps[key] = number
    return caps


def resolve_caps(overrides: Optional[Mapping[str, Optional[int]]] = None,
                 environ: Optional[Mapping[str, str]] = None) -> Dict[str, int]:
    """Padrões, depois a variável de ambiente, depois as flags da linha de comando"""
    environ = os.environ if environ is None else environ
    caps = dict(DEFAULT_CAPS)
    caps.update(parse_caps(environ.get(CAPS_ENV_VAR, '')))
    for key, value in (overrides or {}).items():
        if value is not None:
            caps[key] = value
    return caps
