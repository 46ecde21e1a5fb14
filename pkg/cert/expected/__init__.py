import logging
import collections as col
from fractions import Fraction

import cert.syntax as S
import cert.commons as commons
from cert.functools import memoize_method
from cert.typecheck import check_program, check_arguments
from cert.semantics import Evaluator, run, quoted, RECURSION_LIMIT
from cert.dist import SubDist, UNIT, EMPTY, ZERO, NatV, CostV, value_of, quote, apply_op
from cert.exceptions import StuckTerm, CertArithmeticError, ContinuousUnsupported

logger = logging.getLogger(__name__)

ECResult = col.namedtuple('ECResult', [
    'ec',
    'dist'
])
'''
Element of the expected-cost monad at a returner type: the expected cost
``ec`` (exact rational) and the output subdistribution ``dist`` over runtime
values.
'''

def unit(value):
    return ECResult(ZERO, SubDist.point(value))

def bind(m, kernel):
    '''
    Kleisli extension of the expected-cost monad: the input's cost plus the
    average cost of the continuation, and the usual bind of distributions.
    '''
    if not isinstance(m, ECResult):
        raise TypeError(f'bind expects an ECResult, got {m!r}')
    ec = m.ec
    acc = dict()
    for value, w in m.dist.items():
        r = kernel(value)
        ec += w * r.ec
        for value2, w2 in r.dist.items():
            acc[value2] = acc.get(value2, ZERO) + w * w2
    return ECResult(ec, SubDist(acc))

def charge(amount):
    return ECResult(Fraction(amount), SubDist.point(UNIT))

def mix(branches):
    branches = [(Fraction(p), r) for p, r in branches]
    ec = sum((p * r.ec for p, r in branches), ZERO)
    return ECResult(ec, SubDist.mixture((p, r.dist) for p, r in branches))

BOTTOM = ECResult(ZERO, EMPTY)

class ECEvaluator(Evaluator):
    '''
    Expected-cost semantics over the shared depth-bounded evaluator.
    '''
    def unit(self, value):
        return unit(value)

    def bind(self, m, kernel):
        return bind(m, kernel)

    def charge(self, amount):
        return charge(amount)

    def mix(self, branches):
        return mix(branches)

    def bottom(self):
        return BOTTOM

def eval_ec(t, depth, args=(), ty=None, evaluator=None):
    '''
    Depth-bounded expected-cost semantics of a closed discrete program.

    Example::
        >>> from cert.syntax import parse
        >>> eval_ec(parse('charge(2); charge(3); produce ()'), 1).ec
        Fraction(5, 1)

    :param t: Closed computation without ``uniform``
    :type t: cert.syntax.CompTerm
    :param depth: Number of ``fix`` unfoldings allowed
    :type depth: int
    :param args: Arguments for a program of arrow type
    :type args: sequence
    :param evaluator: Evaluator whose memo table should be reused
    :type evaluator: ECEvaluator
    :returns: Expected cost and output distribution
    :rtype: ECResult
    '''
    return run(evaluator or ECEvaluator(), t, depth, args, ty)

AnalysisReport = col.namedtuple('AnalysisReport', [
    'ec',
    'mass',
    'depth',
    'converged',
    'history'
])
'''
Outcome of ``analyze``. ``ec`` and ``mass`` are exact lower bounds of the
limit at ``depth``; ``history`` lists ``(depth, ec, mass)`` for every depth
visited by the doubling loop.
'''

def analyze(t, tol=Fraction(1, 10**6), max_depth=2**20, args=(), ty=None):
    '''
    Approximate the expected cost by doubling the depth from 1 until both the
    expected cost and the termination mass move by less than ``tol``, or
    ``max_depth`` is reached.

    :param t: Closed discrete program
    :type t: cert.syntax.CompTerm
    :param tol: Tolerance
    :type tol: Fraction|float
    :param max_depth: Largest depth to try
    :type max_depth: int
    :param args: Arguments for a program of arrow type
    :type args: sequence
    :returns: Analysis report
    :rtype: AnalysisReport
    '''
    tol = Fraction(tol)
    if ty is None:
        ty = check_program(t)
    terms = quoted(args)
    remaining = check_arguments(ty, terms)
    if not isinstance(remaining, S.F):
        raise StuckTerm(f'analyze needs a returner type after arguments, found {remaining}')
    values = tuple(value_of(a) for a in terms)
    evaluator = ECEvaluator()
    history = list()

    def at(depth):
        # warm the memo table bottom-up so recursion stays shallow
        start = history[-1][0] + 1 if history else 0
        for d in range(start, depth):
            evaluator.evaluate(t, d, values)
        r = evaluator.evaluate(t, depth, values)
        history.append((depth, r.ec, r.dist.mass()))
        logger.debug('depth=%s ec=%s mass=%s', depth, float(r.ec), float(r.dist.mass()))
        return r

    depth = 1
    previous = at(depth)
    converged = False
    while depth < max_depth:
        depth = min(depth * 2, max_depth)
        current = at(depth)
        if abs(current.ec - previous.ec) < tol and abs(current.dist.mass() - previous.dist.mass()) < tol:
            converged = True
            previous = current
            break
        previous = current
    if not converged:
        logger.warning('no convergence by depth %s (ec=%s)', depth, float(previous.ec))
    return AnalysisReport(previous.ec, previous.dist.mass(), depth, converged, history)

# --- pre-expectations ----------------------------------------------------

BindFrame = col.namedtuple('BindFrame', ['x', 'cont', 'n'])
ArgFrame = col.namedtuple('ArgFrame', ['value'])

class PreEvaluator(object):
    '''
    Pre-expectation semantics computed on a continuation machine. The stack
    of pending binds and arguments is the continuation; reaching ``produce v``
    with an empty stack yields ``reward(v)``. ``charge c`` adds ``c`` to the
    continuation's value and ``fix`` at budget 0 is the zero pre-expectation.
    '''
    def __init__(self, reward):
        self.reward = reward

    def run(self, t, depth, args=()):
        stack = tuple(ArgFrame(a) for a in args)
        with commons.recursion_limit(RECURSION_LIMIT):
            return self.pre(t, depth, stack)

    def pre(self, t, n, stack):
        while True:
            if isinstance(t, S.Produce):
                return self.ret(value_of(t.v), stack)
            if isinstance(t, S.App):
                stack = (ArgFrame(value_of(t.arg)),) + stack
                t = t.fn
                continue
            if isinstance(t, S.Lam):
                if not stack or not isinstance(stack[0], ArgFrame):
                    raise StuckTerm('lambda reached without an argument')
                t = S.substitute(t.body, t.x, quote(stack[0].value))
                stack = stack[1:]
                continue
            if isinstance(t, S.Bind):
                stack = (BindFrame(t.x, t.cont, n),) + stack
                t = t.bound
                continue
            if isinstance(t, S.Force):
                if not isinstance(t.v, S.Thunk):
                    raise StuckTerm(f'force of a non-thunk: {t.v}')
                t = t.v.body
                continue
            if isinstance(t, S.IfZero):
                guard = value_of(t.guard)
                if not isinstance(guard, NatV):
                    raise StuckTerm(f'if0 guard is not a natural: {guard}')
                t = t.zero if guard.n == 0 else t.succ
                continue
            if isinstance(t, S.LetVal):
                t = S.substitute(t.body, t.x, quote(value_of(t.v)))
                continue
            if isinstance(t, S.Unpair):
                if not isinstance(t.v, S.Pair):
                    raise StuckTerm(f'unpair of a non-pair: {t.v}')
                t = S.subst_many(t.body, {t.x: t.v.left, t.y: t.v.right})
                continue
            if isinstance(t, S.CaseList):
                if isinstance(t.v, S.Nil):
                    t = t.nil
                elif isinstance(t.v, S.Cons):
                    t = S.subst_many(t.cons, {t.hd: t.v.head, t.tl: t.v.tail})
                else:
                    raise StuckTerm(f'case of a non-list: {t.v}')
                continue
            if isinstance(t, S.Charge):
                amount = value_of(t.c)
                if not isinstance(amount, CostV):
                    raise StuckTerm(f'charge of a non-cost: {amount}')
                return amount.c + self.ret(UNIT, stack)
            if isinstance(t, S.Choose):
                if t.p == 1:
                    t = t.left
                    continue
                if t.p == 0:
                    t = t.right
                    continue
                return t.p * self.pre(t.left, n, stack) + (1 - t.p) * self.pre(t.right, n, stack)
            if isinstance(t, S.RandNat):
                bound = value_of(t.n)
                if not isinstance(bound, NatV):
                    raise StuckTerm(f'rand of a non-natural: {bound}')
                if bound.n == 0:
                    raise CertArithmeticError('rand 0 has no outcomes')
                total = sum((self.ret(NatV(i), stack) for i in range(bound.n)), ZERO)
                return total / bound.n
            if isinstance(t, S.PrimOp):
                return self.ret(apply_op(t.op, [value_of(a) for a in t.args]), stack)
            if isinstance(t, S.Fix):
                return self.unfold(t, n, stack)
            if isinstance(t, S.Uniform):
                raise ContinuousUnsupported('uniform has no finite pre-expectation')
            if isinstance(t, S.Var):
                raise StuckTerm(f'free variable {t.name}')
            raise StuckTerm(f'not a computation: {t!r}')

    def ret(self, value, stack):
        if not stack:
            return Fraction(self.reward(value))
        frame = stack[0]
        if not isinstance(frame, BindFrame):
            raise StuckTerm(f'value {value} returned to an argument')
        return self.resume(frame, value, stack[1:])

    @memoize_method
    def resume(self, frame, value, rest):
        body = S.substitute(frame.cont, frame.x, quote(value))
        return self.pre(body, frame.n, rest)

    @memoize_method
    def unfold(self, fix, n, stack):
        if n <= 0:
            return ZERO
        return self.pre(S.unfold(fix), n - 1, stack)

def as_reward(reward):
    '''
    Normalize a reward to a function from runtime values to rationals. Dicts
    map values to rewards with default 0; ``None`` is the zero reward.
    '''
    if reward is None:
        return lambda value: ZERO
    if callable(reward):
        return reward
    table = dict(reward)
    return lambda value: Fraction(table.get(value, 0))

def eval_pre(t, reward=None, depth=12, args=()):
    '''
    Pre-expectation of ``reward`` for a closed discrete program: expected
    accrued cost plus expected reward of the result.

    Example::
        >>> from cert.syntax import parse
        >>> eval_pre(parse('charge(3); produce 7'), None, 1)
        Fraction(3, 1)

    :param t: Closed computation at a returner type after ``args``
    :type t: cert.syntax.CompTerm
    :param reward: Reward function or finite map, default 0
    :type reward: callable|dict
    :param depth: Number of ``fix`` unfoldings allowed
    :type depth: int
    :returns: Pre-expectation
    :rtype: Fraction
    '''
    values = [value_of(a) for a in quoted(args)]
    return PreEvaluator(as_reward(reward)).run(t, depth, values)

Factorization = col.namedtuple('Factorization', [
    'equal',
    'discrepancy',
    'pre',
    'ec',
    'integral'
])
'''
Result of ``check_factorization``: ``pre`` is computed directly, ``ec`` and
``integral`` come from the expected-cost semantics.
'''

def check_factorization(t, reward=None, depth=12, args=()):
    '''
    Compare the pre-expectation with the expected cost plus the integral of
    the reward against the output distribution, at the same depth.

    :returns: Equality flag and exact discrepancy
    :rtype: Factorization
    '''
    fn = as_reward(reward)
    direct = eval_pre(t, fn, depth, args)
    r = eval_ec(t, depth, args)
    integral = r.dist.expect(fn)
    discrepancy = direct - (r.ec + integral)
    return Factorization(discrepancy == 0, discrepancy, direct, r.ec, integral)

# --- commutation ---------------------------------------------------------

Commutation = col.namedtuple('Commutation', [
    'cost_equal',
    'ec_equal',
    'left',
    'right'
])
'''
Result of ``check_commutation``; ``left``/``right`` are the ECResults of the
two orders.
'''

def swapped_pair(t, u, k, x='x', y='y'):
    '''
    The two programs ``x <- t; y <- u; k`` and ``y <- u; x <- t; k``.
    '''
    return S.Bind(x, t, S.Bind(y, u, k)), S.Bind(y, u, S.Bind(x, t, k))

def check_commutation(t, u, k, depth, x='x', y='y'):
    '''
    Compare both semantics of ``x <- t; y <- u; k`` and
    ``y <- u; x <- t; k``. The cost semantics always agrees; the
    expected-cost semantics only when the swapped computation terminates
    almost surely at zero expected cost.
    '''
    from cert.costdist import eval_cost
    a, b = swapped_pair(t, u, k, x, y)
    ec_a, ec_b = eval_ec(a, depth), eval_ec(b, depth)
    return Commutation(eval_cost(a, depth) == eval_cost(b, depth), ec_a == ec_b, ec_a, ec_b)

def is_central_candidate(t, depth):
    '''
    True when ``t`` is fix-free, charge-free and terminates with probability
    one at zero expected cost, i.e. it commutes with everything under the
    expected-cost semantics.
    '''
    if not (S.is_fix_free(t) and S.is_charge_free(t) and S.is_discrete(t)):
        return False
    r = eval_ec(t, depth)
    return r.ec == 0 and r.dist.mass() == 1

from cert.expected.laws import monad_law_suite
