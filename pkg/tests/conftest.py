import os

import pytest
from hypothesis import HealthCheck, settings

import cert.corpus as corpus
import cert.syntax as S

PROGRAMS = os.path.join(corpus.DEFAULT_DIR, 'programs')

settings.register_profile('cert', deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('cert')

def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: statistical or deep checks taking more than a few seconds')

@pytest.fixture(scope='session')
def entries():
    return {e.name: e for e in corpus.load()}

@pytest.fixture(scope='session')
def program(entries):
    def get(name):
        return corpus.program(entries[name])
    return get

@pytest.fixture
def path():
    def get(name):
        return os.path.join(PROGRAMS, f'{name}.cert')
    return get

@pytest.fixture
def geometric(program):
    return program('geometric_charge')

@pytest.fixture
def diverge():
    return S.parse('fix x : F unit . force x')
