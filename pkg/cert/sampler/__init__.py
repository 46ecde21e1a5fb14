import math
import logging
import collections as col
import concurrent.futures as cf
from fractions import Fraction

import numpy as np

import cert.syntax as S
from cert.typecheck import check_program, check_arguments
from cert.dist import value_of, quote, apply_op, numeric, NatV, CostV, RealV, UNIT
from cert.exceptions import StuckTerm, CertArithmeticError

logger = logging.getLogger(__name__)

DYADIC_BITS = 53
EXHAUSTION_WARNING = 0.001

TERMINATED = 'terminated'
EXHAUSTED = 'exhausted'

class RngState(object):
    '''
    Seeded random stream for the sampler. Identical seeds replay identical
    draws; ``position`` counts the draws taken so far.

    :param seed: Seed
    :type seed: int
    '''
    def __init__(self, seed=0):
        self.seed = int(seed)
        self.position = 0
        self._generator = np.random.default_rng(self.seed)

    def uniform(self):
        '''
        A dyadic rational ``k / 2**53`` drawn uniformly from [0, 1).
        '''
        self.position += 1
        k = int(self._generator.integers(0, 2**DYADIC_BITS))
        return Fraction(k, 2**DYADIC_BITS)

    def below(self, n):
        '''
        A natural drawn uniformly from ``{0, ..., n - 1}``.
        '''
        self.position += 1
        return int(self._generator.integers(0, n))

    def coin(self, p):
        '''
        True with probability ``p``.
        '''
        return self.uniform() < p

    def __repr__(self):
        return f'RngState(seed={self.seed}, position={self.position})'

RunOutcome = col.namedtuple('RunOutcome', [
    'status',
    'cost',
    'terminal',
    'steps'
])
'''
One sampled run: ``status`` is ``'terminated'`` or ``'exhausted'``,
``cost`` the sum of all charges met on the way, ``terminal`` the final
``produce V`` or ``\\x. t`` (None when exhausted), ``steps`` the number of
machine transitions.
'''

BindFrame = col.namedtuple('BindFrame', ['x', 'cont', 'fuel'])
ArgFrame = col.namedtuple('ArgFrame', ['value', 'fuel'])

def run_once(t, fuel, rng, args=()):
    '''
    Sample one run of the big-step semantics with the given fuel.

    The machine keeps a stack of pending binds and arguments. Each frame
    remembers the fuel its continuation runs with. Application, bind,
    ``fix``, ``unpair`` and the cons branch of ``case`` consume one unit of
    fuel; reaching one of them at fuel 0 ends the run as exhausted.

    Example::
        >>> from cert.syntax import parse
        >>> run_once(parse('charge(2); produce 0'), 10, RngState(0)).cost
        2

    :param t: Closed, well-typed computation
    :type t: cert.syntax.CompTerm
    :param fuel: Fuel
    :type fuel: int
    :param rng: Random stream
    :type rng: RngState
    :param args: Values applied to ``t`` before running
    :type args: sequence
    :returns: Outcome of the run
    :rtype: RunOutcome
    :raises cert.exceptions.StuckTerm: on an ill-typed state
    :raises cert.exceptions.CertArithmeticError: on an operator domain error
    '''
    if fuel < 0:
        raise ValueError(f'fuel must be nonnegative, got {fuel}')
    for a in args:
        t = S.App(t, a if isinstance(a, S.ValueTerm) else quote(a))
    n = fuel
    cost = 0
    steps = 0
    stack = []

    def exhausted():
        return RunOutcome(EXHAUSTED, cost, None, steps)

    while True:
        steps += 1
        value = None
        if isinstance(t, S.Produce):
            value = value_of(t.v)
        elif isinstance(t, S.Bind):
            if n == 0:
                return exhausted()
            n -= 1
            stack.append(BindFrame(t.x, t.cont, n))
            t = t.bound
            continue
        elif isinstance(t, S.App):
            if n == 0:
                return exhausted()
            n -= 1
            stack.append(ArgFrame(t.arg, n))
            t = t.fn
            continue
        elif isinstance(t, S.Lam):
            if not stack:
                return RunOutcome(TERMINATED, cost, t, steps)
            frame = stack.pop()
            if not isinstance(frame, ArgFrame):
                raise StuckTerm('a function was returned to a bind')
            t = S.substitute(t.body, t.x, frame.value)
            n = frame.fuel
            continue
        elif isinstance(t, S.Force):
            if not isinstance(t.v, S.Thunk):
                raise StuckTerm(f'force of a non-thunk: {t.v}')
            t = t.v.body
            continue
        elif isinstance(t, S.Fix):
            if n == 0:
                return exhausted()
            n -= 1
            t = S.unfold(t)
            continue
        elif isinstance(t, S.IfZero):
            guard = value_of(t.guard)
            if not isinstance(guard, NatV):
                raise StuckTerm(f'if0 guard is not a natural: {guard}')
            t = t.zero if guard.n == 0 else t.succ
            continue
        elif isinstance(t, S.LetVal):
            t = S.substitute(t.body, t.x, t.v)
            continue
        elif isinstance(t, S.Unpair):
            if not isinstance(t.v, S.Pair):
                raise StuckTerm(f'unpair of a non-pair: {t.v}')
            if n == 0:
                return exhausted()
            n -= 1
            t = S.subst_many(t.body, {t.x: t.v.left, t.y: t.v.right})
            continue
        elif isinstance(t, S.CaseList):
            if isinstance(t.v, S.Nil):
                t = t.nil
                continue
            if not isinstance(t.v, S.Cons):
                raise StuckTerm(f'case of a non-list: {t.v}')
            if n == 0:
                return exhausted()
            n -= 1
            t = S.subst_many(t.cons, {t.hd: t.v.head, t.tl: t.v.tail})
            continue
        elif isinstance(t, S.Choose):
            t = t.left if rng.coin(t.p) else t.right
            continue
        elif isinstance(t, S.Charge):
            amount = value_of(t.c)
            if not isinstance(amount, CostV):
                raise StuckTerm(f'charge of a non-cost: {amount}')
            cost += amount.c
            value = UNIT
        elif isinstance(t, S.Uniform):
            value = RealV(rng.uniform())
        elif isinstance(t, S.RandNat):
            bound = value_of(t.n)
            if not isinstance(bound, NatV):
                raise StuckTerm(f'rand of a non-natural: {bound}')
            if bound.n == 0:
                raise CertArithmeticError('rand 0 has no outcomes')
            value = NatV(rng.below(bound.n))
        elif isinstance(t, S.PrimOp):
            value = apply_op(t.op, [value_of(a) for a in t.args])
        elif isinstance(t, S.Var):
            raise StuckTerm(f'free variable {t.name}')
        else:
            raise StuckTerm(f'not a computation: {t!r}')

        # a value was returned
        if not stack:
            return RunOutcome(TERMINATED, cost, S.Produce(quote(value)), steps)
        frame = stack.pop()
        if not isinstance(frame, BindFrame):
            raise StuckTerm(f'value {value} applied as a function')
        t = S.substitute(frame.cont, frame.x, quote(value))
        n = frame.fuel

def result_value(outcome):
    '''
    Runtime value returned by a terminated run, or None.
    '''
    if outcome.status != TERMINATED or not isinstance(outcome.terminal, S.Produce):
        return None
    return value_of(outcome.terminal.v)

class CostEstimate(col.namedtuple('CostEstimate', [
        'mean',
        'stddev',
        'terminated',
        'exhausted',
        'seed',
        'fuel',
        'value_mean'])):
    '''
    Monte-Carlo estimate of the expected cost. ``mean`` and ``stddev`` range
    over terminated runs only; exhausted runs are counted but excluded.
    ``value_mean`` is the mean of numeric results, when every result is
    numeric.
    '''
    __slots__ = ()

    @property
    def samples(self):
        return self.terminated + self.exhausted

    @property
    def stderr(self):
        if self.terminated < 1:
            return math.nan
        return self.stddev / math.sqrt(self.terminated)

    @property
    def exhaustion_rate(self):
        return self.exhausted / self.samples if self.samples else 0.0

    def interval(self, z=2.576):
        '''
        Normal confidence interval for the mean, 99% by default.
        '''
        return (self.mean - z * self.stderr, self.mean + z * self.stderr)

    def as_dict(self):
        return {
            'mean': self.mean,
            'stddev': self.stddev,
            'terminated': self.terminated,
            'exhausted': self.exhausted,
            'seed': self.seed,
            'fuel': self.fuel,
            'value_mean': self.value_mean
        }

class BatchStats(col.namedtuple('BatchStats', [
        'count',
        'mean',
        'm2',
        'exhausted',
        'value_count',
        'value_sum',
        'numeric'])):
    '''
    Mergeable summary of one batch of runs: count, mean and sum of squared
    deviations of the cost over terminated runs, plus value statistics.
    '''
    __slots__ = ()

    @classmethod
    def of(cls, costs, exhausted=0, values=(), numeric=True):
        costs = np.asarray(costs, dtype=float)
        values = np.asarray(values, dtype=float)
        if costs.size:
            mean = float(np.mean(costs))
            m2 = float(np.sum((costs - mean) ** 2))
        else:
            mean, m2 = 0.0, 0.0
        return cls(int(costs.size), mean, m2, exhausted, int(values.size), float(np.sum(values)), numeric)

    def merge(self, other):
        '''
        Pooled statistics of two batches (Chan et al. parallel update).
        '''
        count = self.count + other.count
        if count == 0:
            mean, m2 = 0.0, 0.0
        else:
            delta = other.mean - self.mean
            mean = self.mean + delta * other.count / count
            m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return BatchStats(count, mean, m2,
                          self.exhausted + other.exhausted,
                          self.value_count + other.value_count,
                          self.value_sum + other.value_sum,
                          self.numeric and other.numeric)

    def estimate(self, seed, fuel):
        if self.count == 0:
            mean, stddev = math.nan, math.nan
        else:
            mean = self.mean
            stddev = math.sqrt(self.m2 / (self.count - 1)) if self.count > 1 else 0.0
        value_mean = None
        if self.numeric and self.value_count:
            value_mean = self.value_sum / self.value_count
        return CostEstimate(mean, stddev, self.count, self.exhausted, seed, fuel, value_mean)

def sample_batch(t, samples, fuel, seed, args=()):
    '''
    Run ``samples`` independent runs from one stream and summarize them.

    :returns: Batch summary
    :rtype: BatchStats
    '''
    rng = RngState(seed)
    costs = []
    values = []
    exhausted = 0
    numeric_values = True
    for _ in range(samples):
        outcome = run_once(t, fuel, rng, args)
        if outcome.status == EXHAUSTED:
            exhausted += 1
            continue
        costs.append(outcome.cost)
        rv = result_value(outcome)
        q = numeric(rv) if rv is not None else None
        if q is None:
            numeric_values = False
        else:
            values.append(float(q))
    stats = BatchStats.of(costs, exhausted, values if numeric_values else (), numeric_values)
    logger.debug('batch seed=%s: %s terminated, %s exhausted', seed, stats.count, exhausted)
    return stats

def _check(t, args):
    ty = check_program(t)
    terms = [a if isinstance(a, S.ValueTerm) else quote(a) for a in args]
    remaining = check_arguments(ty, terms)
    if not isinstance(remaining, S.F):
        raise StuckTerm(f'estimation needs a returner type after arguments, found {remaining}')
    return terms

def _warn_exhaustion(result):
    if result.samples and result.exhaustion_rate > EXHAUSTION_WARNING:
        logger.warning('%.2f%% of runs ran out of fuel (fuel=%s); the mean is biased low',
                       100 * result.exhaustion_rate, result.fuel)

def estimate(t, samples, fuel, seed=0, args=()):
    '''
    Monte-Carlo estimate of the expected cost of a closed program of returner
    type. Runs that exhaust their fuel are excluded from the mean and
    reported separately.

    :param t: Closed computation
    :type t: cert.syntax.CompTerm
    :param samples: Number of runs
    :type samples: int
    :param fuel: Fuel per run
    :type fuel: int
    :param seed: Seed
    :type seed: int
    :param args: Arguments for a program of arrow type
    :type args: sequence
    :returns: Estimate
    :rtype: CostEstimate
    '''
    if samples < 1:
        raise ValueError(f'need at least one sample, got {samples}')
    terms = _check(t, args)
    result = sample_batch(t, samples, fuel, seed, terms).estimate(seed, fuel)
    _warn_exhaustion(result)
    return result

def partition(samples, parts):
    '''
    Split ``samples`` into ``parts`` near-equal batch sizes.
    '''
    base, extra = divmod(samples, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]

def estimate_parallel(t, samples, fuel, seeds, workers=1, args=()):
    '''
    Split ``samples`` across independent streams, one per seed, and pool the
    results. With ``workers > 1`` the batches run in separate processes.

    :param seeds: Pairwise distinct seeds
    :type seeds: sequence
    :param workers: Number of worker processes
    :type workers: int
    :returns: Pooled estimate; ``seed`` holds the tuple of seeds
    :rtype: CostEstimate
    '''
    seeds = list(seeds)
    if not seeds:
        raise ValueError('no seeds given')
    if len(set(seeds)) != len(seeds):
        raise ValueError(f'seeds must be pairwise distinct: {seeds}')
    if samples < 1:
        raise ValueError(f'need at least one sample, got {samples}')
    terms = _check(t, args)
    sizes = partition(samples, len(seeds))
    if workers > 1:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(sample_batch, t, n, fuel, s, terms) for n, s in zip(sizes, seeds)]
            batches = [f.result() for f in futures]
    else:
        batches = [sample_batch(t, n, fuel, s, terms) for n, s in zip(sizes, seeds)]
    pooled = batches[0]
    for b in batches[1:]:
        pooled = pooled.merge(b)
    result = pooled.estimate(seeds[0] if len(seeds) == 1 else tuple(seeds), fuel)
    _warn_exhaustion(result)
    return result

def frequency_table(t, samples, fuel, seed=0, args=()):
    '''
    Empirical counts of ``(cost, value)`` over terminated runs, plus the
    number of exhausted runs.

    :returns: ``(counter, exhausted)``
    :rtype: tuple
    '''
    rng = RngState(seed)
    counts = col.Counter()
    exhausted = 0
    for _ in range(samples):
        outcome = run_once(t, fuel, rng, args)
        if outcome.status == EXHAUSTED:
            exhausted += 1
            continue
        counts[(outcome.cost, result_value(outcome))] += 1
    return counts, exhausted
