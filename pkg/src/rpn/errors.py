"""
Exceções do rpnkit
"""

from __future__ import annotations

from typing import Optional


class RpnError(Exception):
    """Erro base de todas as operações sobre RPNs"""

    code = 'rpn-error'

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(RpnError):
    """Exceção customizada para erros de validação"""

    code = 'validation'

    def __init__(self, violations: list):
        self.violations = list(violations)
        text = '; '.join(str(v) for v in self.violations) or 'definição inválida'
        super().__init__(text)


class FiringError(RpnError):
    """Disparo impossível: vértice ou transição desconhecidos, ou guarda não satisfeita"""

    def __init__(self, message: str, code: str, step: Optional[int] = None):
        super().__init__(message, code)
        self.step = step


class ParseError(RpnError):
    """Erro de sintaxe em arquivo .rpn"""

    code = 'syntax-error'

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f'{line}:{column}: {message}')
        self.line = line
        self.column = column


class ConstructionError(RpnError):
    """Entrada inadequada para uma construção ou redução"""


class CapExceededError(RpnError):
    """Um limite de busca (nós, passos, testemunha) foi atingido"""

    code = 'cap-exceeded'

    def __init__(self, message: str, cap: str):
        super().__init__(message)
        self.cap = cap
