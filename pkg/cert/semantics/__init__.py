import logging
from fractions import Fraction

import cert.syntax as S
import cert.commons as commons
from cert.functools import memoize_method
from cert.typecheck import check_program, check_arguments
from cert.dist import value_of, quote, apply_op, NatV, CostV
from cert.exceptions import StuckTerm, CertArithmeticError, ContinuousUnsupported

logger = logging.getLogger(__name__)

RECURSION_LIMIT = 100000

class Evaluator(object):
    '''
    Depth-bounded denotational evaluator for the discrete fragment,
    parameterized by a monad. Subclasses supply ``unit``, ``bind``,
    ``charge``, ``mix`` and ``bottom``.

    Closed values are substituted eagerly. Pending arguments travel on an
    explicit stack so that ``bind``, ``choose`` and ``if0`` at arrow types act
    pointwise. The budget ``n`` is the number of ``fix`` unfoldings still
    allowed; unfolding at budget 0 is bottom. Every other construct keeps the
    current budget.
    '''
    def unit(self, value):
        raise NotImplementedError()

    def bind(self, m, kernel):
        raise NotImplementedError()

    def charge(self, amount):
        raise NotImplementedError()

    def mix(self, branches):
        raise NotImplementedError()

    def bottom(self):
        raise NotImplementedError()

    def uniform(self):
        raise ContinuousUnsupported('uniform has no finite denotation; use the sampler')

    def evaluate(self, t, depth, args=()):
        '''
        Evaluate a closed program at ``depth``, supplying ``args`` first.
        '''
        with commons.recursion_limit(RECURSION_LIMIT):
            return self.eval(t, depth, tuple(args))

    def eval(self, t, n, args):
        while True:
            if isinstance(t, S.Produce):
                self._saturated(t, args)
                return self.unit(value_of(t.v))
            if isinstance(t, S.App):
                args = (value_of(t.arg),) + args
                t = t.fn
                continue
            if isinstance(t, S.Lam):
                if not args:
                    return Closure(self, t, n)
                t = S.substitute(t.body, t.x, quote(args[0]))
                args = args[1:]
                continue
            if isinstance(t, S.Force):
                if not isinstance(t.v, S.Thunk):
                    raise StuckTerm(f'force of a non-thunk: {t.v}')
                t = t.v.body
                continue
            if isinstance(t, S.Bind):
                m = self.eval(t.bound, n, ())
                x, cont = t.x, t.cont
                return self.bind(m, lambda v: self.eval(S.substitute(cont, x, quote(v)), n, args))
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
            if isinstance(t, S.Choose):
                if t.p == 1:
                    t = t.left
                    continue
                if t.p == 0:
                    t = t.right
                    continue
                return self.mix([(t.p, self.eval(t.left, n, args)),
                                 (1 - t.p, self.eval(t.right, n, args))])
            if isinstance(t, S.Fix):
                return self.unfold(t, n, args)
            if isinstance(t, S.Charge):
                self._saturated(t, args)
                amount = value_of(t.c)
                if not isinstance(amount, CostV):
                    raise StuckTerm(f'charge of a non-cost: {amount}')
                return self.charge(amount.c)
            if isinstance(t, S.RandNat):
                self._saturated(t, args)
                bound = value_of(t.n)
                if not isinstance(bound, NatV):
                    raise StuckTerm(f'rand of a non-natural: {bound}')
                if bound.n == 0:
                    raise CertArithmeticError('rand 0 has no outcomes')
                w = Fraction(1, bound.n)
                return self.mix([(w, self.unit(NatV(i))) for i in range(bound.n)])
            if isinstance(t, S.PrimOp):
                self._saturated(t, args)
                return self.unit(apply_op(t.op, [value_of(a) for a in t.args]))
            if isinstance(t, S.Uniform):
                self._saturated(t, args)
                return self.uniform()
            if isinstance(t, S.Var):
                raise StuckTerm(f'free variable {t.name}')
            raise StuckTerm(f'not a computation: {t!r}')

    @memoize_method
    def unfold(self, fix, n, args):
        if n <= 0:
            return self.bottom()
        return self.eval(S.unfold(fix), n - 1, args)

    def _saturated(self, t, args):
        if args:
            raise StuckTerm(f'{type(t).__name__} applied to an argument')

class Closure(object):
    '''
    Semantic function at an arrow type: a lambda reached with no pending
    argument, closed over the budget it was produced at.
    '''
    def __init__(self, evaluator, lam, n):
        self.evaluator = evaluator
        self.lam = lam
        self.n = n

    def __call__(self, rv):
        body = S.substitute(self.lam.body, self.lam.x, quote(rv))
        with commons.recursion_limit(RECURSION_LIMIT):
            return self.evaluator.eval(body, self.n, ())

class Curried(object):
    '''
    Semantic object of a whole program at an arrow type: calling it supplies
    the next argument.
    '''
    def __init__(self, evaluator, t, depth, args, ty):
        self.evaluator = evaluator
        self.t = t
        self.depth = depth
        self.args = tuple(args)
        self.ty = ty

    def __call__(self, rv):
        args = self.args + (rv,)
        if isinstance(self.ty.out, S.Arrow):
            return Curried(self.evaluator, self.t, self.depth, args, self.ty.out)
        return self.evaluator.evaluate(self.t, self.depth, args)

def quoted(args):
    '''
    Normalize an argument list of runtime values or closed value terms to
    value terms.
    '''
    result = []
    for a in args:
        result.append(a if isinstance(a, S.ValueTerm) else quote(a))
    return result

def run(evaluator, t, depth, args=(), ty=None):
    '''
    Evaluate a program with a fresh evaluator state, returning a callable
    when arguments remain to be supplied.

    :param evaluator: Monad-specific evaluator
    :type evaluator: Evaluator
    :param t: Closed computation
    :type t: cert.syntax.CompTerm
    :param depth: Unfold budget
    :type depth: int
    :param args: Arguments, as runtime values or closed value terms
    :type args: sequence
    :param ty: Program type when already known
    :type ty: cert.syntax.CompType
    '''
    if depth < 0:
        raise ValueError(f'depth must be nonnegative, got {depth}')
    terms = quoted(args)
    if ty is None:
        ty = check_program(t)
    remaining = check_arguments(ty, terms)
    values = [value_of(a) for a in terms]
    if isinstance(remaining, S.Arrow):
        return Curried(evaluator, t, depth, values, remaining)
    return evaluator.evaluate(t, depth, values)
