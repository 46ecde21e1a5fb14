import logging
from fractions import Fraction

import cert.syntax as S

logger = logging.getLogger(__name__)

# computation forms that extend as far right as possible and therefore need
# parentheses anywhere but in tail position
_OPEN = (S.Lam, S.Fix, S.Bind, S.IfZero, S.LetVal, S.Unpair, S.CaseList)

def pretty_print(t):
    '''
    Render a computation in concrete syntax. ``parse(pretty_print(t))`` is
    structurally equal to ``t``.

    Example::
        >>> from cert.syntax import Charge, CostLit, pretty_print
        >>> pretty_print(Charge(CostLit(2)))
        'charge(2)'

    :param t: Computation
    :type t: cert.syntax.CompTerm
    :returns: Program text
    :rtype: str
    '''
    return comp(t)

def pretty(node):
    '''
    Render any syntax node: computation, value or type.
    '''
    if isinstance(node, S.CompTerm):
        return comp(node)
    if isinstance(node, S.ValueTerm):
        return value(node)
    if isinstance(node, S.ValueType):
        return vtype(node)
    if isinstance(node, S.CompType):
        return ctype(node)
    raise TypeError(f'not a syntax node: {node!r}')

def rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f'{q.numerator}/{q.denominator}'

def real(q):
    q = Fraction(q)
    if q.denominator == 1:
        return f'{q.numerator}.0'
    return f'{q.numerator}/{q.denominator}'

# computations

def comp(t):
    if isinstance(t, S.Lam):
        if t.ann is None:
            return f'\\{t.x} . {comp(t.body)}'
        return f'\\{t.x} : {vtype(t.ann)} . {comp(t.body)}'
    if isinstance(t, S.Fix):
        if t.ann is None:
            return f'fix {t.x} . {comp(t.body)}'
        return f'fix {t.x} : {ctype(t.ann)} . {comp(t.body)}'
    if isinstance(t, S.Bind):
        if t.x == '_':
            return f'{simple(t.bound)}; {comp(t.cont)}'
        return f'{t.x} <- {simple(t.bound)}; {comp(t.cont)}'
    if isinstance(t, S.IfZero):
        return f'if0 {value(t.guard)} then {comp(t.zero)} else {comp(t.succ)}'
    if isinstance(t, S.LetVal):
        return f'let {t.x} = {value(t.v)} in {comp(t.body)}'
    if isinstance(t, S.Unpair):
        return f'unpair {value(t.v)} as ({t.x}, {t.y}) in {comp(t.body)}'
    if isinstance(t, S.CaseList):
        return (f'case {value(t.v)} of nil => {comp(t.nil)} '
                f'| cons {t.hd} {t.tl} => {comp(t.cons)}')
    return simple(t)

def simple(t):
    if isinstance(t, _OPEN):
        return f'({comp(t)})'
    if isinstance(t, S.App):
        return f'{simple(t.fn)} {vatom(t.arg)}'
    if isinstance(t, S.Force):
        return f'force {vatom(t.v)}'
    if isinstance(t, S.Produce):
        return f'produce {vatom(t.v)}'
    if isinstance(t, S.Charge):
        return f'charge({cvalue(t.c)})'
    if isinstance(t, S.Uniform):
        return 'uniform'
    if isinstance(t, S.RandNat):
        return f'rand {vatom(t.n)}'
    if isinstance(t, S.Choose):
        return f'choose {rational(t.p)} {{ {comp(t.left)} }} {{ {comp(t.right)} }}'
    if isinstance(t, S.PrimOp):
        args = ' '.join(vatom(a) for a in t.args)
        return f'{t.op.keyword} {args}'
    raise TypeError(f'not a computation: {t!r}')

# values

def cvalue(v):
    # inside charge(...) numerals are costs
    if isinstance(v, S.CostAdd):
        return f'{cvalue(v.left)} + {catom(v.right)}'
    return catom(v)

def catom(v):
    if isinstance(v, S.CostLit):
        return str(v.c)
    if isinstance(v, S.NatLit):
        return f'nat({v.n})'
    if isinstance(v, S.CostAdd):
        return f'({catom(v.left)} + {catom(v.right)})'
    return value(v)

def value(v):
    if isinstance(v, S.Cons):
        return f'cons {vatom(v.head)} {vatom(v.tail)}'
    return vatom(v)

def vatom(v):
    if isinstance(v, S.Var):
        return v.name
    if isinstance(v, S.NatLit):
        return str(v.n)
    if isinstance(v, S.RealLit):
        return real(v.q)
    if isinstance(v, S.CostLit):
        return f'cost({v.c})'
    if isinstance(v, S.UnitLit):
        return '()'
    if isinstance(v, S.Nil):
        if v.elem is None:
            return 'nil'
        return f'(nil : {vtype(S.List(v.elem))})'
    if isinstance(v, S.Thunk):
        return f'thunk ({comp(v.body)})'
    if isinstance(v, S.Pair):
        return f'({value(v.left)}, {value(v.right)})'
    if isinstance(v, S.CostAdd):
        return f'({value(v.left)} + {value(v.right)})'
    if isinstance(v, S.Cons):
        return f'({value(v)})'
    raise TypeError(f'not a value: {v!r}')

# types

def vtype(ty):
    if isinstance(ty, S.Prod):
        return f'{vtunary(ty.left)} * {vtype(ty.right)}'
    return vtunary(ty)

def vtunary(ty):
    if isinstance(ty, S.List):
        return f'list {vtunary(ty.elem)}'
    return vtatom(ty)

def vtatom(ty):
    if isinstance(ty, S.Unit):
        return 'unit'
    if isinstance(ty, S.Nat):
        return 'nat'
    if isinstance(ty, S.Real):
        return 'real'
    if isinstance(ty, S.Cost):
        return 'cost'
    if isinstance(ty, S.U):
        return f'U ({ctype(ty.body)})'
    if isinstance(ty, (S.Prod, S.List)):
        return f'({vtype(ty)})'
    raise TypeError(f'not a value type: {ty!r}')

def ctype(ty):
    if isinstance(ty, S.F):
        return f'F {vtatom(ty.out)}'
    if isinstance(ty, S.Arrow):
        return f'{vtype(ty.arg)} -> {ctype(ty.out)}'
    raise TypeError(f'not a computation type: {ty!r}')
