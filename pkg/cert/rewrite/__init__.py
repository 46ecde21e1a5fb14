import logging
import collections as col
from fractions import Fraction

import cert.syntax as S
from cert.dist import value_of, CostV
from cert.typecheck import check_program
from cert.exceptions import CertError, CertTypeError, NoMatch, TypeRegression, UsageError

logger = logging.getLogger(__name__)

RewriteRule = col.namedtuple('RewriteRule', [
    'name',
    'match'
])
'''
A directed equation. ``match(term)`` returns the rewritten term when the
rule's left-hand side matches at the root of ``term`` and None otherwise.
'''

RewriteStep = col.namedtuple('RewriteStep', [
    'rule',
    'path',
    'before',
    'after'
])
'''
One logged rewrite: rule name, path of child indices from the root, and the
subterm before and after.
'''

def _closed_cost(v):
    '''
    The amount of a closed cost value, else None.
    '''
    if S.free_vars(v):
        return None
    try:
        amount = value_of(v)
    except CertError:
        return None
    return amount.c if isinstance(amount, CostV) else None

def _drop_unit(x, t):
    # a bound unit variable may still occur in t
    return S.substitute(t, x, S.UNIT)

# --- rules ---------------------------------------------------------------

def beta(t):
    if isinstance(t, S.App) and isinstance(t.fn, S.Lam):
        return S.substitute(t.fn.body, t.fn.x, t.arg)

def eta_arrow(t):
    '''
    ``\\x. t x -> t`` when ``x`` is not free in ``t``.
    '''
    if isinstance(t, S.Lam) and isinstance(t.body, S.App):
        arg = t.body.arg
        if isinstance(arg, S.Var) and arg.name == t.x and t.x not in S.free_vars(t.body.fn):
            return t.body.fn

def let_beta(t):
    if isinstance(t, S.LetVal):
        return S.substitute(t.body, t.x, t.v)

def thunk_force(t):
    if isinstance(t, S.Force) and isinstance(t.v, S.Thunk):
        return t.v.body

def force_thunk_value(t):
    if isinstance(t, S.Thunk) and isinstance(t.body, S.Force):
        return t.body.v

def seq_return(t):
    if isinstance(t, S.Bind) and isinstance(t.bound, S.Produce):
        return S.substitute(t.cont, t.x, t.bound.v)

def seq_eta(t):
    if isinstance(t, S.Bind) and isinstance(t.cont, S.Produce):
        v = t.cont.v
        if isinstance(v, S.Var) and v.name == t.x and t.x != '_':
            return t.bound

def if_zero(t):
    if isinstance(t, S.IfZero) and isinstance(t.guard, S.NatLit) and t.guard.n == 0:
        return t.zero

def if_succ(t):
    if isinstance(t, S.IfZero) and isinstance(t.guard, S.NatLit) and t.guard.n > 0:
        return t.succ

def if_same(t):
    if isinstance(t, S.IfZero) and S.alpha_equal(t.zero, t.succ):
        return t.zero

def case_nil(t):
    if isinstance(t, S.CaseList) and isinstance(t.v, S.Nil):
        return t.nil

def case_cons(t):
    if isinstance(t, S.CaseList) and isinstance(t.v, S.Cons):
        return S.subst_many(t.cons, {t.hd: t.v.head, t.tl: t.v.tail})

def unpair_beta(t):
    if isinstance(t, S.Unpair) and isinstance(t.v, S.Pair):
        return S.subst_many(t.body, {t.x: t.v.left, t.y: t.v.right})

def charge_zero(t):
    if isinstance(t, S.Bind) and isinstance(t.bound, S.Charge) and _closed_cost(t.bound.c) == 0:
        return _drop_unit(t.x, t.cont)

def _sum(a, b):
    m, n = _closed_cost(a), _closed_cost(b)
    if m is not None and n is not None:
        return S.CostLit(m + n)
    return S.CostAdd(a, b)

def charge_merge(t):
    '''
    ``charge a; charge b; k -> charge (a + b); k`` and
    ``charge a; charge b -> charge (a + b)``.
    '''
    if not (isinstance(t, S.Bind) and isinstance(t.bound, S.Charge)):
        return None
    rest = _drop_unit(t.x, t.cont)
    if isinstance(rest, S.Charge):
        return S.Charge(_sum(t.bound.c, rest.c))
    if isinstance(rest, S.Bind) and isinstance(rest.bound, S.Charge):
        return S.Bind(rest.x, S.Charge(_sum(t.bound.c, rest.bound.c)), rest.cont)

def charge_swap(t):
    '''
    ``charge n; charge m; k -> charge m; charge n; k`` for closed amounts
    with ``n > m``.
    '''
    if not (isinstance(t, S.Bind) and isinstance(t.bound, S.Charge)):
        return None
    rest = _drop_unit(t.x, t.cont)
    if not (isinstance(rest, S.Bind) and isinstance(rest.bound, S.Charge)):
        return None
    n, m = _closed_cost(t.bound.c), _closed_cost(rest.bound.c)
    if n is None or m is None or n <= m:
        return None
    return S.Bind(t.x, rest.bound, S.Bind(rest.x, t.bound, rest.cont))

def choose_unit(t):
    if isinstance(t, S.Choose):
        if t.p == 1:
            return t.left
        if t.p == 0:
            return t.right

def choose_sym(t):
    if isinstance(t, S.Choose):
        return S.Choose(1 - t.p, t.right, t.left)

def choose_idem(t):
    if isinstance(t, S.Choose) and S.alpha_equal(t.left, t.right):
        return t.left

def choose_assoc(t):
    '''
    Re-associate a right-nested choice to the left, keeping the probability
    of each of the three branches:

    ``choose p {t} {choose q {u} {v}} -> choose s {choose p/s {t} {u}} {v}``
    with ``s = 1 - (1 - p)(1 - q)``.
    '''
    if isinstance(t, S.Choose) and isinstance(t.right, S.Choose):
        p, q = t.p, t.right.p
        s = 1 - (1 - p) * (1 - q)
        if s == 0:
            return None
        return S.Choose(s, S.Choose(Fraction(p) / s, t.left, t.right.left), t.right.right)

def fix_unfold(t):
    if isinstance(t, S.Fix):
        return S.unfold(t)

RULES = col.OrderedDict((r.name, r) for r in [
    RewriteRule('Beta', beta),
    RewriteRule('EtaArrow', eta_arrow),
    RewriteRule('LetBeta', let_beta),
    RewriteRule('ThunkForce', thunk_force),
    RewriteRule('ForceThunkValue', force_thunk_value),
    RewriteRule('SeqReturn', seq_return),
    RewriteRule('SeqEta', seq_eta),
    RewriteRule('IfZ', if_zero),
    RewriteRule('IfS', if_succ),
    RewriteRule('IfSame', if_same),
    RewriteRule('CaseNil', case_nil),
    RewriteRule('CaseCons', case_cons),
    RewriteRule('UnpairBeta', unpair_beta),
    RewriteRule('ChargeZero', charge_zero),
    RewriteRule('ChargeMerge', charge_merge),
    RewriteRule('ChargeSwap', charge_swap),
    RewriteRule('ChooseUnit', choose_unit),
    RewriteRule('ChooseSym', choose_sym),
    RewriteRule('ChooseIdem', choose_idem),
    RewriteRule('ChooseAssoc', choose_assoc),
    RewriteRule('FixUnfold', fix_unfold),
])

EXPANDING = {'ChooseSym', 'FixUnfold', 'EtaArrow', 'ForceThunkValue'}

DEFAULT_RULES = [name for name in RULES if name not in EXPANDING]

def resolve(rules):
    '''
    Turn rule names (or a comma separated string of names) into rules.
    '''
    if rules is None:
        rules = DEFAULT_RULES
    if isinstance(rules, str):
        rules = [r.strip() for r in rules.split(',') if r.strip()]
    result = []
    for r in rules:
        if isinstance(r, RewriteRule):
            result.append(r)
            continue
        if r not in RULES:
            raise UsageError(f'unknown rewrite rule {r!r}; known rules: {", ".join(RULES)}')
        result.append(RULES[r])
    return result

def _type_of(t):
    if not S.is_closed(t):
        return None
    return check_program(t)

def apply_rule(t, rule, path=()):
    '''
    Rewrite the subterm of ``t`` at ``path`` with ``rule``. The result is
    type checked against the type of ``t`` when ``t`` is closed.

    Example::
        >>> from cert.syntax import parse, pretty
        >>> pretty(apply_rule(parse('charge(2); charge(3); produce ()'), 'ChargeMerge'))
        'charge(5); produce ()'

    :param t: Well-typed computation
    :type t: cert.syntax.CompTerm
    :param rule: Rule or rule name
    :type rule: RewriteRule|str
    :param path: Child indices from the root
    :type path: sequence
    :returns: Rewritten term
    :rtype: cert.syntax.CompTerm
    :raises cert.exceptions.NoMatch: when the rule does not apply there
    :raises cert.exceptions.TypeRegression: when the result changes type
    '''
    rule, = resolve([rule])
    path = tuple(path)
    try:
        sub = S.subterm_at(t, path)
    except IndexError as e:
        raise NoMatch(str(e)) from None
    new = rule.match(sub)
    if new is None:
        raise NoMatch(f'{rule.name} does not match at {list(path)}')
    result = S.replace_at(t, path, new)
    before = _type_of(t)
    if before is not None:
        try:
            after = check_program(result)
        except CertTypeError as e:
            raise TypeRegression(f'{rule.name} at {list(path)} broke typing: {e}') from e
        if after != before:
            raise TypeRegression(f'{rule.name} at {list(path)} changed the type from {before} to {after}')
    return result

def find_redex(t, rules):
    '''
    Leftmost-outermost ``(path, rule, result)`` for the first matching rule,
    or None.
    '''
    for path, sub in S.positions(t):
        for rule in rules:
            new = rule.match(sub)
            if new is not None:
                return path, rule, new
    return None

def normalize(t, rules=None, fuel=1000):
    '''
    Rewrite leftmost-outermost until no rule matches or ``fuel`` steps have
    been taken.

    :param t: Computation
    :type t: cert.syntax.CompTerm
    :param rules: Rules or rule names, default ``DEFAULT_RULES``
    :type rules: list|str
    :param fuel: Maximum number of steps
    :type fuel: int
    :returns: Final term and the step log
    :rtype: tuple
    '''
    rules = resolve(rules)
    steps = []
    while len(steps) < fuel:
        found = find_redex(t, rules)
        if found is None:
            return t, steps
        path, rule, _ = found
        before = S.subterm_at(t, path)
        t = apply_rule(t, rule, path)
        after = S.subterm_at(t, path)
        logger.debug('%s at %s', rule.name, list(path))
        steps.append(RewriteStep(rule.name, path, before, after))
    if find_redex(t, rules) is not None:
        logger.warning('rewriting stopped after %s steps with redexes left', fuel)
    return t, steps

def replay(t, steps):
    '''
    Re-apply a step log to ``t``.

    :raises cert.exceptions.NoMatch: when a step no longer applies
    '''
    for step in steps:
        if not S.alpha_equal(S.subterm_at(t, step.path), step.before):
            raise NoMatch(f'step {step.rule} at {list(step.path)} does not fit the term')
        t = apply_rule(t, step.rule, step.path)
    return t

PreservationReport = col.namedtuple('PreservationReport', [
    'equal',
    'cost_equal',
    'ec_equal',
    'left',
    'right',
    'mode'
])
'''
Result of ``check_preservation``. In ``exact`` mode ``left``/``right`` are
the ECResults of both programs; in ``limit`` mode they are the
AnalysisReports.
'''

def check_preservation(t, u, depth=12, shift=0, limit=False, tol=Fraction(1, 10**6),
                       max_depth=2**20, args=()):
    '''
    Compare two programs under both semantics.

    In exact mode ``t`` is evaluated at ``depth + shift`` and ``u`` at
    ``depth``; both the cost distributions and the expected-cost results must
    coincide. ``shift=1`` compares a program with its top-level unfolding.
    In limit mode the ``analyze`` limits are compared within ``tol``.

    :param t: Closed discrete program
    :type t: cert.syntax.CompTerm
    :param u: Closed discrete program of the same type
    :type u: cert.syntax.CompTerm
    :returns: Report; mismatches never raise
    :rtype: PreservationReport
    '''
    from cert.costdist import eval_cost
    from cert.expected import eval_ec, analyze
    if limit:
        a = analyze(t, tol, max_depth, args)
        b = analyze(u, tol, max_depth, args)
        tol = Fraction(tol)
        equal = abs(a.ec - b.ec) <= tol and abs(a.mass - b.mass) <= tol
        return PreservationReport(equal, None, equal, a, b, 'limit')
    cost_equal = eval_cost(t, depth + shift, args) == eval_cost(u, depth, args)
    left, right = eval_ec(t, depth + shift, args), eval_ec(u, depth, args)
    ec_equal = left == right
    if not (cost_equal and ec_equal):
        logger.info('semantics differ: ec %s vs %s', left.ec, right.ec)
    return PreservationReport(cost_equal and ec_equal, cost_equal, ec_equal, left, right, 'exact')
