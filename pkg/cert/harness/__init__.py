import json
import math
import logging
import collections as col
from fractions import Fraction

import arrow
import numpy as np

import cert.syntax as S
import cert.corpus as corpus
import cert.commons as commons
from cert.costdist import eval_cost, expected_of_marginal
from cert.expected import eval_ec, analyze, ECEvaluator
from cert.sampler import estimate, frequency_table, BatchStats
from cert.dist import value_of
from cert.exceptions import CertError

logger = logging.getLogger(__name__)

DEFAULT_TOL = Fraction(1, 10**6)
Z99 = 2.576
SIGMAS = 4

# --- cross-semantics check -----------------------------------------------

class CrossCheckReport(col.namedtuple('CrossCheckReport', [
        'name',
        'depth',
        'ec',
        'cost_expectation',
        'mass_cost',
        'mass_ec',
        'inequality_holds',
        'recursion_free_equality',
        'limit',
        'sample_mean',
        'sample_ci',
        'terminated',
        'exhausted',
        'ci_consistent',
        'adequacy_consistent',
        'errors'])):
    '''
    Cross-semantics report for one program. Exact fields are rationals.
    Checks that do not apply to the program are None: the recursion-free
    equality for programs with ``fix``, the denotational fields for
    sampler-only programs, the interval check when no run terminated.
    '''
    __slots__ = ()

    @property
    def passed(self):
        checks = [self.inequality_holds, self.recursion_free_equality,
                  self.ci_consistent, self.adequacy_consistent]
        return not self.errors and all(c is not False for c in checks)

    def as_dict(self):
        def q(x):
            return None if x is None else commons.rational_json(x)
        return {
            'name': self.name,
            'depth': self.depth,
            'ec': q(self.ec),
            'cost_expectation': q(self.cost_expectation),
            'mass_cost': q(self.mass_cost),
            'mass_ec': q(self.mass_ec),
            'inequality_holds': self.inequality_holds,
            'recursion_free_equality': self.recursion_free_equality,
            'limit': q(self.limit),
            'sample_mean': _finite(self.sample_mean),
            'sample_ci': None if self.sample_ci is None else [_finite(x) for x in self.sample_ci],
            'terminated': self.terminated,
            'exhausted': self.exhausted,
            'ci_consistent': self.ci_consistent,
            'adequacy_consistent': self.adequacy_consistent,
            'errors': list(self.errors),
            'passed': self.passed
        }

def _finite(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x

def _resolve(entry, args):
    if isinstance(entry, corpus.CorpusEntry):
        return entry.name, corpus.program(entry), tuple(entry.args) if args is None else tuple(args), entry
    return '<program>', entry, tuple(args or ()), None

def crosscheck(entry, depth=12, samples=10000, seed=0, fuel=10000, args=None,
               tol=DEFAULT_TOL, limit_depth=2**10):
    '''
    Run every engine on one program and compare them.

    * exact: the expected cost of the cost distribution's marginal is at
      most the expected-cost component, with equality when the program has
      no ``fix``
    * statistical: the 99% interval of the sample mean meets the range
      between the depth-bounded expectation and the ``analyze`` limit
    * adequacy: no ``(cost, value)`` outcome is sampled more often than its
      exact probability allows, within four standard deviations

    :param entry: Corpus entry or closed program
    :type entry: cert.corpus.CorpusEntry|cert.syntax.CompTerm
    :param depth: Depth for the exact comparison
    :type depth: int
    :param samples: Sampler runs; 0 skips the statistical checks
    :type samples: int
    :param seed: Sampler seed
    :type seed: int
    :param fuel: Sampler fuel
    :type fuel: int
    :param args: Arguments, default the entry's own
    :type args: sequence
    :returns: Report; failures are recorded, not raised
    :rtype: CrossCheckReport
    '''
    name, t, args, meta = _resolve(entry, args)
    logger.debug('crosscheck %s at depth %s', name, depth)
    errors = []
    ec = cost_exp = mass_cost = mass_ec = ineq = rf_eq = limit = None
    reference = None
    exact = S.is_discrete(t) and (meta is None or meta.support == 'all')
    if exact:
        try:
            d = eval_cost(t, depth, args)
            r = eval_ec(t, depth, args)
            ec, cost_exp = r.ec, expected_of_marginal(d)
            mass_cost, mass_ec = d.mass(), r.dist.mass()
            ineq = cost_exp <= ec
            if S.is_fix_free(t):
                rf_eq = cost_exp == ec
            reference = d
            if meta is None or not meta.diverges:
                report = analyze(t, tol, limit_depth, args)
                if report.converged:
                    limit = report.ec
                    if report.depth > depth:
                        reference = eval_cost(t, report.depth, args)
        except CertError as e:
            errors.append(f'{type(e).__name__}: {e}')
    sample_mean = sample_ci = terminated = exhausted = ci_ok = adequacy = None
    if samples:
        try:
            counts, exhausted = frequency_table(t, samples, fuel, seed, args)
            costs = [cost for (cost, _), k in counts.items() for _ in range(k)]
            est = BatchStats.of(costs, exhausted).estimate(seed, fuel)
            terminated = est.terminated
            if est.terminated:
                sample_mean = est.mean
                sample_ci = est.interval(Z99)
                if cost_exp is not None:
                    upper = math.inf if limit is None else float(limit)
                    ci_ok = sample_ci[0] <= upper and sample_ci[1] >= float(cost_exp)
            if reference is not None:
                adequacy = adequate(counts, samples, reference)
        except CertError as e:
            errors.append(f'{type(e).__name__}: {e}')
    result = CrossCheckReport(name, depth, ec, cost_exp, mass_cost, mass_ec, ineq, rf_eq, limit,
                              sample_mean, sample_ci, terminated, exhausted, ci_ok, adequacy,
                              tuple(errors))
    if not result.passed:
        logger.warning('crosscheck failed for %s', name)
    return result

def adequate(counts, samples, reference, sigmas=SIGMAS):
    '''
    True when every empirical outcome frequency stays below its exact
    probability plus the reference's unresolved mass plus ``sigmas``
    binomial standard deviations.

    :param counts: Outcome counts from the sampler
    :type counts: collections.Counter
    :param samples: Total number of runs
    :type samples: int
    :param reference: Exact cost distribution
    :type reference: cert.dist.SubDist
    '''
    deficit = float(reference.deficit())
    for outcome, count in counts.items():
        p = float(reference.weight(outcome))
        sd = math.sqrt(max(p * (1 - p), 1.0 / samples) / samples)
        if count / samples > p + deficit + sigmas * sd:
            logger.info('outcome %s sampled at %.4f, exact %.4f', outcome, count / samples, p)
            return False
    return True

def crosscheck_corpus(entries=None, depth=12, samples=10000, seed=0, fuel=10000):
    '''
    ``crosscheck`` every entry of the corpus.
    '''
    entries = corpus.load() if entries is None else entries
    return [crosscheck(e, depth, samples, seed, fuel) for e in entries]

# --- closed forms --------------------------------------------------------

OracleRow = col.namedtuple('OracleRow', [
    'name',
    'n',
    'expected',
    'found',
    'ok'
])

OracleReport = col.namedtuple('OracleReport', [
    'passed',
    'rows'
])

def qck_bound_holds(n):
    '''
    ``T(n) <= 2 n ln n`` for the quicksort recurrence.
    '''
    return float(corpus.qck_cost(n)) <= 2 * n * math.log(n)

def oracle_suite(entries=None, tol=DEFAULT_TOL, accuracy=Fraction(1, 10**4),
                 max_depth=2**12, bound_range=(2, 64)):
    '''
    Compare ``analyze`` with the closed-form expected cost of every corpus
    entry that has one, over the entry's argument range, and check the
    ``2 n ln n`` bound of the quicksort recurrence.

    :returns: Report with one row per comparison
    :rtype: OracleReport
    '''
    entries = corpus.load() if entries is None else entries
    rows = []
    for entry in entries:
        if entry.oracle is None:
            continue
        t = corpus.program(entry)
        arguments = [None]
        if entry.range is not None:
            arguments = range(entry.range[0], entry.range[1] + 1)
        for n in arguments:
            args = entry.args if n is None else corpus.with_arg(entry, n)
            expected = corpus.oracle(entry, n)
            report = analyze(t, tol, max_depth, args)
            ok = report.converged and abs(report.ec - expected) <= accuracy
            logger.debug('%s(%s): expected %s, found %s', entry.name, n, float(expected), float(report.ec))
            rows.append(OracleRow(entry.name, n, expected, report.ec, ok))
    for n in range(bound_range[0], bound_range[1] + 1):
        bound = Fraction(2 * n * math.log(n))
        rows.append(OracleRow('qck_bound', n, bound, corpus.qck_cost(n), qck_bound_holds(n)))
    passed = all(row.ok for row in rows)
    if not passed:
        logger.warning('oracle suite failed: %s', [r for r in rows if not r.ok])
    return OracleReport(passed, rows)

# --- divergence ----------------------------------------------------------

DivergenceReport = col.namedtuple('DivergenceReport', [
    'exceeded',
    'depth',
    'ec',
    'history'
])
'''
Result of ``divergence_check``: whether the approximants passed the
threshold, the depth reached and its expected cost.
'''

def divergence_check(entry, threshold=100, max_depth=2**20, args=None):
    '''
    Double the depth until the expected-cost approximant exceeds
    ``threshold`` or ``max_depth`` is reached. Exceeding the threshold is
    the finite witness of an infinite expected cost.

    :returns: Divergence report
    :rtype: DivergenceReport
    '''
    name, t, args, _ = _resolve(entry, args)
    values = [value_of(a) for a in args]
    evaluator = ECEvaluator()
    history = []
    warmed = 0
    depth = 1
    while True:
        # ascending warm-up keeps the recursion of each evaluation shallow
        for d in range(warmed, depth):
            evaluator.evaluate(t, d, values)
        warmed = depth
        r = eval_ec(t, depth, args, evaluator=evaluator)
        history.append((depth, r.ec))
        logger.debug('%s: depth=%s ec=%s', name, depth, float(r.ec))
        if r.ec > threshold:
            return DivergenceReport(True, depth, r.ec, history)
        if depth >= max_depth:
            return DivergenceReport(False, depth, r.ec, history)
        depth = min(2 * depth, max_depth)

# --- list quicksort against its counting program -------------------------

AgreementRow = col.namedtuple('AgreementRow', [
    'n',
    'quicksort_mean',
    'qck_mean',
    'expected',
    'ok'
])

def quicksort_length_agreement(samples=2000, seed=0, sizes=range(2, 7), fuel=10000):
    '''
    Sample list quicksort on random lists of distinct naturals and the
    counting program at the list's length; both means must agree with each
    other and with the recurrence within four pooled standard errors.

    :returns: One row per list size
    :rtype: list
    '''
    sort = corpus.program(corpus.get('quicksort'))
    count = corpus.program(corpus.get('qck_nat'))
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        keys = [int(k) for k in rng.choice(10 * max(n, 1), size=n, replace=False)]
        lst = S.Nil()
        for k in reversed(keys):
            lst = S.Cons(S.NatLit(k), lst)
        a = estimate(sort, samples, fuel, seed + n, [lst])
        b = estimate(count, samples, fuel, seed + n, [S.NatLit(n)])
        expected = float(corpus.qck_cost(n))
        pooled = math.sqrt(a.stderr ** 2 + b.stderr ** 2)
        margin = SIGMAS * pooled
        ok = abs(a.mean - b.mean) <= margin and abs(a.mean - expected) <= SIGMAS * a.stderr + 1e-12
        rows.append(AgreementRow(n, a.mean, b.mean, expected, ok))
    return rows

# --- reports -------------------------------------------------------------

def timestamp():
    return arrow.utcnow().isoformat()

def render_json(reports):
    '''
    JSON document for a list of reports that provide ``as_dict``.
    '''
    return json.dumps({
        'timestamp': timestamp(),
        'reports': [r.as_dict() for r in reports]
    }, indent=2)

def write_report(reports, filename):
    '''
    Write ``reports`` as JSON atomically.
    '''
    commons.atomic_write(filename, render_json(reports))
    logger.info('report written to %s', filename)
