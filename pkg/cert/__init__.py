import os
import logging
import collections as col
from fractions import Fraction

from cert.__version__ import __version__
from cert.exceptions import ( CertError, ParseError, CertTypeError, EvaluationError,
                              StuckTerm, CertArithmeticError, ContinuousUnsupported,
                              FuelError, NoMatch, TypeRegression, CorpusError,
                              UsageError )
from cert.syntax import ( parse, parse_file, parse_value, parse_type, pretty_print,
                          desugar, substitute, alpha_equal, free_vars )
from cert.typecheck import check_program
from cert.dist import SubDist
from cert.sampler import RngState, run_once, estimate, estimate_parallel
from cert.costdist import eval_cost, expected_of_marginal
from cert.expected import ( eval_ec, analyze, eval_pre, check_factorization,
                            check_commutation, monad_law_suite )
from cert.rewrite import apply_rule, normalize, replay, check_preservation, RULES
from cert.harness import crosscheck, oracle_suite, divergence_check
import cert.corpus as corpus
from cert.session import Session

logger = logging.getLogger(__name__)

Settings = col.namedtuple('Settings', [
    'seed',
    'fuel',
    'depth',
    'samples',
    'tol',
    'max_depth',
    'lower'
])
'''
Engine defaults carried by a ``Session``.
'''

DEFAULTS = Settings(
    seed=0,
    fuel=10000,
    depth=12,
    samples=10000,
    tol=Fraction(1, 10**6),
    max_depth=2**20,
    lower=False
)

def settings(**kwargs):
    '''
    Build engine settings from keyword arguments, the ``CERT_SEED``
    environment variable, and the defaults, in that order.

    Example::
        >>> import cert
        >>> cert.settings(fuel=500).fuel
        500

    :returns: Settings
    :rtype: Settings
    '''
    unknown = set(kwargs) - set(Settings._fields)
    if unknown:
        raise UsageError(f'unknown settings: {", ".join(sorted(unknown))}')
    values = DEFAULTS._asdict()
    env = os.environ.get('CERT_SEED')
    if env is not None:
        try:
            values['seed'] = int(env)
        except ValueError:
            raise UsageError(f'CERT_SEED must be an integer, got {env!r}') from None
        logger.debug('seed %s from CERT_SEED', values['seed'])
    for key, value in kwargs.items():
        if value is not None:
            values[key] = value
    values['tol'] = Fraction(values['tol'])
    return Settings(**values)

def session(**kwargs):
    '''
    Create a session context to avoid passing engine defaults to every
    function.

    Example::
        >>> import cert
        >>> with cert.session(depth=20) as ses:
        ...   r = ses.eval_ec(cert.parse('charge(1); produce ()'))
        ...   print(r.ec)
        1

    :returns: Session object
    :rtype: :mod:`cert.session.Session`
    '''
    return Session(settings(**kwargs))
