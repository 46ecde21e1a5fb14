import os
import shutil
from fractions import Fraction

import pytest
import yaml
from natsort import natsorted

import cert.corpus as corpus
import cert.syntax as S
from cert.exceptions import CorpusError

NAMES = [e.name for e in corpus.load()]

def test_entries_are_sorted():
    assert NAMES == natsorted(NAMES)
    assert len(NAMES) == len(set(NAMES))
    assert 'ill_typed_app' not in NAMES

@pytest.mark.parametrize('name', NAMES)
def test_entry_checks(entries, name):
    assert corpus.check(entries[name]) == entries[name].type

def test_get():
    entry = corpus.get('geometric_charge')
    assert entry.oracle == 'geometric'
    assert entry.params == {'p': '1/2'}
    with pytest.raises(CorpusError):
        corpus.get('nope')

def test_args_are_parsed(entries):
    assert entries['random_walk'].args == (S.NatLit(2), S.NatLit(1))
    assert entries['random_walk'].diverges
    assert entries['qck_nat'].range == (0, 10)

def test_sampler_only_entries(entries):
    assert entries['uniform_mean'].support == 'sampler'
    assert not corpus.is_discrete(entries['uniform_mean'])
    assert corpus.is_discrete(entries['quicksort'])

def test_with_arg(entries):
    assert corpus.with_arg(entries['random_walk'], 5) == (S.NatLit(5), S.NatLit(1))

@pytest.mark.parametrize('n,expected', [
    (0, Fraction(0)),
    (1, Fraction(0)),
    (2, Fraction(1)),
    (3, Fraction(8, 3)),
    (4, Fraction(29, 6)),
])
def test_qck_cost(n, expected):
    assert corpus.qck_cost(n) == expected

def test_oracles(entries):
    assert corpus.oracle(entries['geometric_quarter']) == 4
    assert corpus.oracle(entries['coin_tosses'], 3) == 14
    assert corpus.oracle(entries['factorial'], 7) == 7
    with pytest.raises(CorpusError):
        corpus.oracle(entries['mixed'])

def manifest(tmp_path, entries):
    programs = tmp_path / 'programs'
    programs.mkdir()
    shutil.copy(os.path.join(corpus.DEFAULT_DIR, 'programs', 'mixed.cert'), programs)
    with open(tmp_path / corpus.MANIFEST, 'w') as fo:
        yaml.dump({'entries': entries}, fo)
    return str(tmp_path)

def test_custom_directory(tmp_path):
    directory = manifest(tmp_path, [{'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F nat'}])
    entry, = corpus.load(directory)
    assert entry.support == 'all'
    assert corpus.check(entry) == S.F(S.Nat())

@pytest.mark.parametrize('item', [
    {'name': 'm', 'file': 'programs/mixed.cert'},
    {'name': 'm', 'file': 'programs/missing.cert', 'type': 'F nat'},
    {'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F nat', 'support': 'some'},
    {'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F nat', 'oracle': 'psychic'},
    {'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F (nat'},
])
def test_malformed_entries(tmp_path, item):
    directory = manifest(tmp_path, [item])
    with pytest.raises(CorpusError):
        corpus.load(directory)

def test_duplicate_names(tmp_path):
    item = {'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F nat'}
    with pytest.raises(CorpusError):
        corpus.load(manifest(tmp_path, [item, item]))

def test_wrong_documented_type(tmp_path):
    directory = manifest(tmp_path, [{'name': 'm', 'file': 'programs/mixed.cert', 'type': 'F unit'}])
    entry, = corpus.load(directory)
    with pytest.raises(CorpusError):
        corpus.check(entry)

def test_missing_manifest(tmp_path):
    with pytest.raises(CorpusError):
        corpus.load(str(tmp_path))
