from fractions import Fraction

from hypothesis import strategies

import cert.syntax as S

PROBS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)]

NAT = S.Nat()

def nats(env):
    options = [strategies.integers(0, 3).map(S.NatLit)]
    if env:
        options.append(strategies.sampled_from(list(env)).map(S.Var))
    return strategies.one_of(options)

def costs():
    lit = strategies.integers(0, 3).map(S.CostLit)
    return strategies.one_of(lit, strategies.tuples(lit, lit).map(lambda p: S.CostAdd(*p)))

def geometric(p):
    step = S.Bind('y', S.Force(S.Var('g')), S.PrimOp(S.Op.Succ, (S.Var('y'),)))
    return S.Fix('g', S.Choose(p, S.Produce(S.NatLit(0)), step), S.F(NAT))

DIVERGE = S.Fix('z', S.Force(S.Var('z')), S.F(NAT))

@strategies.composite
def programs(draw, depth=3, env=(), charges=True, fixes=False):
    '''
    Closed (under ``env``) discrete computations of type ``F nat``.
    '''
    leaves = ['produce', 'rand', 'op']
    if charges:
        leaves.append('charge')
    if fixes:
        leaves += ['geometric', 'diverge']
    nodes = ['choose', 'bind', 'if0', 'let', 'beta', 'thunk_force', 'unpair', 'case']
    if charges:
        nodes.append('seq_charge')
    kind = draw(strategies.sampled_from(leaves if depth == 0 else leaves + nodes))

    def sub(extra=()):
        return draw(programs(depth - 1, env + tuple(extra), charges, fixes))

    fresh = f'x{len(env)}'
    if kind == 'produce':
        return S.Produce(draw(nats(env)))
    if kind == 'rand':
        return S.RandNat(S.NatLit(draw(strategies.integers(1, 3))))
    if kind == 'op':
        op = draw(strategies.sampled_from([S.Op.Succ, S.Op.Pred, S.Op.AddNat, S.Op.Monus, S.Op.LeqNat]))
        return S.PrimOp(op, tuple(draw(nats(env)) for _ in range(op.arity)))
    if kind == 'charge':
        return S.seq(S.Charge(draw(costs())), S.Produce(draw(nats(env))))
    if kind == 'geometric':
        return geometric(draw(strategies.sampled_from([Fraction(1, 2), Fraction(2, 3)])))
    if kind == 'diverge':
        return DIVERGE
    if kind == 'seq_charge':
        return S.seq(S.Charge(draw(costs())), sub())
    if kind == 'choose':
        return S.Choose(draw(strategies.sampled_from(PROBS)), sub(), sub())
    if kind == 'bind':
        return S.Bind(fresh, sub(), sub([fresh]))
    if kind == 'if0':
        return S.IfZero(draw(nats(env)), sub(), sub())
    if kind == 'let':
        return S.LetVal(fresh, draw(nats(env)), sub([fresh]))
    if kind == 'beta':
        return S.App(S.Lam(fresh, sub([fresh]), NAT), draw(nats(env)))
    if kind == 'thunk_force':
        return S.Force(S.Thunk(sub()))
    if kind == 'unpair':
        other = f'x{len(env) + 1}'
        pair = S.Pair(draw(nats(env)), draw(nats(env)))
        return S.Unpair(fresh, other, pair, draw(programs(depth - 1, env + (fresh, other), charges, fixes)))
    if kind == 'case':
        tail = f'l{len(env)}'
        lst = draw(strategies.sampled_from([
            S.Nil(NAT),
            S.Cons(S.NatLit(1), S.Nil(NAT)),
            S.Cons(S.NatLit(0), S.Cons(S.NatLit(2), S.Nil(NAT)))]))
        return S.CaseList(lst, sub(), fresh, tail, sub([fresh]))
    raise AssertionError(kind)

def closed_programs(depth=3, charges=True, fixes=False):
    return programs(depth, (), charges, fixes)
