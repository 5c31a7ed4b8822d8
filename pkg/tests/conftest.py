"""
Fixtures compartilhadas dos testes do rpnkit
"""

import sys
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT))

from src.cli.rpnfile import load  # noqa: E402

FIXTURES = REPO_ROOT / 'src' / 'data' / 'fixtures'
SCHEMA_PATH = REPO_ROOT / 'schemas' / 'verdict.schema.json'


@pytest.fixture(scope='session')
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope='session')
def phases():
    return load(FIXTURES / 'phases.rpn')


@pytest.fixture(scope='session')
def embedding():
    return load(FIXTURES / 'embedding.rpn')


@pytest.fixture(scope='session')
def counter():
    return load(FIXTURES / 'counter.rpn')


@pytest.fixture(scope='session')
def antichain():
    return load(FIXTURES / 'antichain.rpn')


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
