import os
import logging
import collections as col
from fractions import Fraction

import yaml
from natsort import natsorted

import cert.syntax as S
import cert.commons as commons
from cert.functools import memoize
from cert.typecheck import check_program
from cert.exceptions import CorpusError, ParseError, CertTypeError

logger = logging.getLogger(__name__)

DEFAULT_DIR = os.path.dirname(os.path.abspath(__file__))
MANIFEST = 'corpus.yaml'

SUPPORT = ('all', 'sampler')

CorpusEntry = col.namedtuple('CorpusEntry', [
    'name',
    'path',
    'type',
    'support',
    'args',
    'oracle',
    'params',
    'range',
    'diverges'
])
'''
One example program. ``type`` is the documented computation type of the
program text, ``args`` the value terms supplied before running, ``oracle``
the name of a closed-form expected cost in ``ORACLES`` (or None), ``range``
the inclusive argument range the oracle is checked over.
'''

# --- oracles -------------------------------------------------------------

def geometric_cost(n=None, p=Fraction(1, 2)):
    '''
    Expected cost of the charged geometric program with stopping
    probability ``p``: the solution of ``E = 1 + (1 - p) E``.
    '''
    return 1 / commons.rational(p)

def factorial_cost(n, **params):
    return Fraction(n)

def coin_tosses_cost(n, **params):
    '''
    Expected tosses until ``n`` heads in a row: ``2 (2**n - 1)``.
    '''
    return Fraction(2 * (2**n - 1))

@memoize
def qck_cost(n):
    '''
    Expected comparisons of randomized quicksort on ``n`` distinct keys, by
    the recurrence ``T(0) = 0``, ``T(n) = n - 1 + (2/n) sum(T(i) for i < n)``.

    Example::
        >>> qck_cost(3)
        Fraction(8, 3)
    '''
    if n == 0:
        return Fraction(0)
    total = Fraction(0)
    for i in range(n):
        total += qck_cost(i)
    return n - 1 + Fraction(2, n) * total

ORACLES = {
    'geometric': geometric_cost,
    'factorial': factorial_cost,
    'coin_tosses': coin_tosses_cost,
    'qck': lambda n, **params: qck_cost(n),
}

def oracle(entry, n=None):
    '''
    Closed-form expected cost of ``entry`` at integer argument ``n``.
    '''
    if entry.oracle is None:
        raise CorpusError(f'{entry.name} has no oracle')
    return ORACLES[entry.oracle](n, **entry.params)

# --- manifest ------------------------------------------------------------

def load(directory=None):
    '''
    Load the corpus manifest from ``directory`` (default: the bundled
    corpus). Entries are returned in natural order of their names.

    Example::
        >>> import cert.corpus
        >>> entry = cert.corpus.get('geometric_charge')
        >>> entry.oracle
        'geometric'

    :param directory: Directory containing ``corpus.yaml``
    :type directory: str
    :returns: Corpus entries
    :rtype: list
    :raises cert.exceptions.CorpusError: on a malformed manifest
    '''
    directory = os.path.expanduser(directory or DEFAULT_DIR)
    manifest = os.path.join(directory, MANIFEST)
    if not os.path.exists(manifest):
        raise CorpusError(f'no {MANIFEST} in {directory}')
    with open(manifest, 'r') as fo:
        config = yaml.load(fo, Loader=yaml.FullLoader)
    if not isinstance(config, dict) or 'entries' not in config:
        raise CorpusError(f'{manifest} has no entries')
    entries = [_entry(directory, item) for item in config['entries']]
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise CorpusError(f'duplicate entry names in {manifest}')
    logger.debug('loaded %s corpus entries from %s', len(entries), manifest)
    return natsorted(entries, key=lambda e: e.name)

def _entry(directory, item):
    for key in ('name', 'file', 'type'):
        if key not in item:
            raise CorpusError(f'corpus entry is missing {key!r}: {item}')
    name = item['name']
    support = item.get('support', 'all')
    if support not in SUPPORT:
        raise CorpusError(f'{name}: support must be one of {SUPPORT}, got {support!r}')
    oracle_name = item.get('oracle')
    if oracle_name is not None and oracle_name not in ORACLES:
        raise CorpusError(f'{name}: unknown oracle {oracle_name!r}')
    path = os.path.join(directory, item['file'])
    if not os.path.exists(path):
        raise CorpusError(f'{name}: no such file {path}')
    try:
        ty = S.parse_type(str(item['type']))
        args = tuple(S.parse_value(str(a)) for a in item.get('args', []))
    except ParseError as e:
        raise CorpusError(f'{name}: {e}') from e
    params = {k: str(v) for k, v in (item.get('params') or {}).items()}
    span = item.get('range')
    if span is not None:
        span = (int(span[0]), int(span[1]))
    return CorpusEntry(name, path, ty, support, args, oracle_name, params, span,
                       bool(item.get('diverges', False)))

def get(name, directory=None):
    '''
    Look up one entry by name.
    '''
    for entry in load(directory):
        if entry.name == name:
            return entry
    raise CorpusError(f'no corpus entry named {name!r}')

@memoize
def _parsed(path):
    return S.parse_file(path)

def clear_cache():
    _parsed.cache.clear()

def program(entry):
    '''
    The parsed program of an entry.

    :returns: Computation
    :rtype: cert.syntax.CompTerm
    '''
    term, _ = _parsed(entry.path)
    return term

def check(entry):
    '''
    Type check an entry against its documented type.

    :raises cert.exceptions.CorpusError: when the types disagree
    '''
    term, spans = _parsed(entry.path)
    try:
        ty = check_program(term, spans)
    except CertTypeError as e:
        raise CorpusError(f'{entry.name}: {e.render()}') from e
    if ty != entry.type:
        raise CorpusError(f'{entry.name}: documented type {entry.type}, found {ty}')
    if entry.oracle is not None and not is_discrete(entry):
        raise CorpusError(f'{entry.name}: oracle given for a continuous program')
    return ty

def is_discrete(entry):
    return S.is_discrete(program(entry))

def with_arg(entry, n):
    '''
    Argument list for the oracle argument ``n``: ``n`` replaces the first
    argument.
    '''
    return (S.NatLit(n),) + tuple(entry.args[1:])
