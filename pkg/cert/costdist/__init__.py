import logging
from fractions import Fraction

from cert.semantics import Evaluator, run
from cert.dist import SubDist, UNIT, EMPTY, ZERO

logger = logging.getLogger(__name__)

class CostEvaluator(Evaluator):
    '''
    Cost semantics: a computation of type ``F t`` denotes a subprobability
    distribution over ``(cost, value)`` pairs. Binding adds costs and
    multiplies probabilities.
    '''
    def unit(self, value):
        return SubDist.point((0, value))

    def bind(self, m, kernel):
        if not isinstance(m, SubDist):
            raise TypeError(f'bind expects a distribution, got {m!r}')
        results = dict()
        acc = dict()
        for (cost, value), w in m.items():
            if value not in results:
                results[value] = kernel(value)
            for (cost2, value2), w2 in results[value].items():
                key = (cost + cost2, value2)
                acc[key] = acc.get(key, ZERO) + w * w2
        return SubDist(acc)

    def charge(self, amount):
        return SubDist.point((amount, UNIT))

    def mix(self, branches):
        return SubDist.mixture(branches)

    def bottom(self):
        return EMPTY

def eval_cost(t, depth, args=(), ty=None):
    '''
    Depth-bounded cost semantics of a closed discrete program.

    Example::
        >>> from cert.syntax import parse
        >>> d = eval_cost(parse('charge(2); produce 0'), 4)
        >>> expected_of_marginal(d)
        Fraction(2, 1)

    :param t: Closed computation without ``uniform``
    :type t: cert.syntax.CompTerm
    :param depth: Number of ``fix`` unfoldings allowed
    :type depth: int
    :param args: Arguments for a program of arrow type
    :type args: sequence
    :returns: Distribution over ``(cost, value)``, or a function of the
              remaining arguments at arrow types
    :rtype: cert.dist.SubDist
    :raises cert.exceptions.ContinuousUnsupported: on ``uniform``
    '''
    return run(CostEvaluator(), t, depth, args, ty)

def expected_of_marginal(d):
    '''
    Expected value of the cost marginal.
    '''
    return d.expect(lambda outcome: outcome[0])

def mass(d):
    return d.mass()

def cost_marginal(d):
    return d.map(lambda outcome: outcome[0])

def value_marginal(d):
    return d.map(lambda outcome: outcome[1])

def shift(d, amount):
    '''
    Add ``amount`` to every cost in the support.
    '''
    return d.map(lambda outcome: (outcome[0] + amount, outcome[1]))

def le(d1, d2):
    '''
    Pointwise order on ``(cost, value)`` weights.
    '''
    return d1.le(d2)

def is_monotone(t, depths, args=()):
    '''
    Check that the approximants at increasing ``depths`` grow pointwise.
    '''
    previous = None
    for depth in sorted(depths):
        current = eval_cost(t, depth, args)
        if previous is not None and not previous.le(current):
            logger.warning('approximant at depth %s is not above its predecessor', depth)
            return False
        previous = current
    return True

def table(d):
    '''
    Report rows ``(cost, value, weight)`` sorted by cost then value.
    '''
    return [(cost, value, Fraction(w)) for (cost, value), w in d.rows()]
