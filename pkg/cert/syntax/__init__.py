import re
import logging
import itertools
from enum import Enum
from fractions import Fraction
from dataclasses import dataclass
from typing import Optional, Tuple

logger = logging.getLogger(__name__)

IDENTIFIER = re.compile(r'^[A-Za-z][A-Za-z0-9_]*$')

class Node(object):
    '''
    Base class for every syntax node (types, values and computations).

    Nodes are immutable dataclasses. Equality is structural, and the hash is
    computed once and cached on the instance, along with the free variable
    set. Annotation fields take part in equality.
    '''
    _subterms = ()
    _scope = {}

    def _key(self):
        return tuple(getattr(self, name) for name in self.__dataclass_fields__)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        h = self.__dict__.get('_hash')
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, '_hash', h)
        return h

    def __getstate__(self):
        # cached hashes depend on the interpreter's hash seed
        return {k: v for k, v in self.__dict__.items() if not k.startswith('_')}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)

    def _replace(self, **changes):
        kwargs = {name: getattr(self, name) for name in self.__dataclass_fields__}
        kwargs.update(changes)
        return type(self)(**kwargs)

    def __str__(self):
        from cert.syntax.printer import pretty
        return pretty(self)

# --- types ---------------------------------------------------------------

class Type(Node):
    pass

class ValueType(Type):
    pass

class CompType(Type):
    pass

@dataclass(frozen=True, eq=False, repr=False)
class Unit(ValueType):
    def __repr__(self):
        return 'Unit()'

@dataclass(frozen=True, eq=False, repr=False)
class Nat(ValueType):
    def __repr__(self):
        return 'Nat()'

@dataclass(frozen=True, eq=False, repr=False)
class Real(ValueType):
    def __repr__(self):
        return 'Real()'

@dataclass(frozen=True, eq=False, repr=False)
class Cost(ValueType):
    def __repr__(self):
        return 'Cost()'

@dataclass(frozen=True, eq=False)
class Prod(ValueType):
    left: ValueType
    right: ValueType

@dataclass(frozen=True, eq=False)
class List(ValueType):
    elem: ValueType

@dataclass(frozen=True, eq=False)
class U(ValueType):
    body: CompType

@dataclass(frozen=True, eq=False)
class F(CompType):
    out: ValueType

@dataclass(frozen=True, eq=False)
class Arrow(CompType):
    arg: ValueType
    out: CompType

def is_ground(ty):
    '''
    Ground value types are built from unit, nat, real, cost, products and
    lists; they contain no thunks.
    '''
    if isinstance(ty, (Unit, Nat, Real, Cost)):
        return True
    if isinstance(ty, Prod):
        return is_ground(ty.left) and is_ground(ty.right)
    if isinstance(ty, List):
        return is_ground(ty.elem)
    return False

# --- operators -----------------------------------------------------------

class Op(Enum):
    '''
    Primitive operators. The value is the concrete-syntax keyword.
    '''
    AddNat = 'add'
    Monus = 'monus'
    MulNat = 'mul'
    LeqNat = 'leq'
    AddReal = 'addr'
    SubReal = 'subr'
    MulReal = 'mulr'
    LeqReal = 'leqr'
    FloorToNat = 'floor'
    Succ = 'succ'
    Pred = 'pred'
    EqNat = 'eq'
    ToCost = 'tocost'
    ToReal = 'toreal'

    @property
    def keyword(self):
        return self.value

    @property
    def signature(self):
        return SIGNATURES[self]

    @property
    def arity(self):
        return len(SIGNATURES[self][0])

SIGNATURES = {
    Op.AddNat: ((Nat(), Nat()), Nat()),
    Op.Monus: ((Nat(), Nat()), Nat()),
    Op.MulNat: ((Nat(), Nat()), Nat()),
    Op.LeqNat: ((Nat(), Nat()), Nat()),
    Op.AddReal: ((Real(), Real()), Real()),
    Op.SubReal: ((Real(), Real()), Real()),
    Op.MulReal: ((Real(), Real()), Real()),
    Op.LeqReal: ((Real(), Real()), Nat()),
    Op.FloorToNat: ((Real(),), Nat()),
    Op.Succ: ((Nat(),), Nat()),
    Op.Pred: ((Nat(),), Nat()),
    Op.EqNat: ((Nat(), Nat()), Nat()),
    Op.ToCost: ((Nat(),), Cost()),
    Op.ToReal: ((Nat(),), Real()),
}
'''
Operator table: input value types and output value type of each operator.
'''

OPS_BY_KEYWORD = {op.value: op for op in Op}

# --- value terms ---------------------------------------------------------

class Term(Node):
    pass

class ValueTerm(Term):
    pass

class CompTerm(Term):
    pass

@dataclass(frozen=True, eq=False)
class Var(ValueTerm):
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError(f'bad variable name {self.name!r}')

@dataclass(frozen=True, eq=False, repr=False)
class UnitLit(ValueTerm):
    def __repr__(self):
        return 'UnitLit()'

@dataclass(frozen=True, eq=False)
class NatLit(ValueTerm):
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f'natural literal must be a nonnegative integer, got {self.n!r}')

@dataclass(frozen=True, eq=False)
class RealLit(ValueTerm):
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'q', Fraction(self.q))

@dataclass(frozen=True, eq=False)
class CostLit(ValueTerm):
    c: int

    def __post_init__(self):
        if isinstance(self.c, bool) or not isinstance(self.c, int) or self.c < 0:
            raise ValueError(f'cost literal must be a nonnegative integer, got {self.c!r}')

@dataclass(frozen=True, eq=False)
class CostAdd(ValueTerm):
    left: ValueTerm
    right: ValueTerm
    _subterms = ('left', 'right')

@dataclass(frozen=True, eq=False)
class Thunk(ValueTerm):
    body: CompTerm
    _subterms = ('body',)

@dataclass(frozen=True, eq=False)
class Pair(ValueTerm):
    left: ValueTerm
    right: ValueTerm
    _subterms = ('left', 'right')

@dataclass(frozen=True, eq=False)
class Nil(ValueTerm):
    elem: Optional[ValueType] = None

@dataclass(frozen=True, eq=False)
class Cons(ValueTerm):
    head: ValueTerm
    tail: ValueTerm
    _subterms = ('head', 'tail')

# --- computation terms ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class Lam(CompTerm):
    x: str
    body: CompTerm
    ann: Optional[ValueType] = None
    _subterms = ('body',)
    _scope = {'body': ('x',)}

@dataclass(frozen=True, eq=False)
class App(CompTerm):
    fn: CompTerm
    arg: ValueTerm
    _subterms = ('fn', 'arg')

@dataclass(frozen=True, eq=False)
class IfZero(CompTerm):
    guard: ValueTerm
    zero: CompTerm
    succ: CompTerm
    _subterms = ('guard', 'zero', 'succ')

@dataclass(frozen=True, eq=False)
class Force(CompTerm):
    v: ValueTerm
    _subterms = ('v',)

@dataclass(frozen=True, eq=False)
class Bind(CompTerm):
    x: str
    bound: CompTerm
    cont: CompTerm
    _subterms = ('bound', 'cont')
    _scope = {'cont': ('x',)}

@dataclass(frozen=True, eq=False)
class Produce(CompTerm):
    v: ValueTerm
    _subterms = ('v',)

@dataclass(frozen=True, eq=False)
class LetVal(CompTerm):
    x: str
    v: ValueTerm
    body: CompTerm
    _subterms = ('v', 'body')
    _scope = {'body': ('x',)}

@dataclass(frozen=True, eq=False)
class Unpair(CompTerm):
    x: str
    y: str
    v: ValueTerm
    body: CompTerm
    _subterms = ('v', 'body')
    _scope = {'body': ('x', 'y')}

@dataclass(frozen=True, eq=False)
class CaseList(CompTerm):
    v: ValueTerm
    nil: CompTerm
    hd: str
    tl: str
    cons: CompTerm
    _subterms = ('v', 'nil', 'cons')
    _scope = {'cons': ('hd', 'tl')}

@dataclass(frozen=True, eq=False)
class Charge(CompTerm):
    c: ValueTerm
    _subterms = ('c',)

@dataclass(frozen=True, eq=False, repr=False)
class Uniform(CompTerm):
    def __repr__(self):
        return 'Uniform()'

@dataclass(frozen=True, eq=False)
class RandNat(CompTerm):
    n: ValueTerm
    _subterms = ('n',)

@dataclass(frozen=True, eq=False)
class Choose(CompTerm):
    '''
    Biased choice: takes ``left`` with probability ``p`` and ``right`` with
    probability ``1 - p``.
    '''
    p: Fraction
    left: CompTerm
    right: CompTerm
    _subterms = ('left', 'right')

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 <= p <= 1:
            raise ValueError(f'choice probability must lie in [0, 1], got {p}')
        object.__setattr__(self, 'p', p)

@dataclass(frozen=True, eq=False)
class Fix(CompTerm):
    x: str
    body: CompTerm
    ann: Optional[CompType] = None
    _subterms = ('body',)
    _scope = {'body': ('x',)}

@dataclass(frozen=True, eq=False)
class PrimOp(CompTerm):
    op: Op
    args: Tuple[ValueTerm, ...]
    _subterms = ('args',)

    def __post_init__(self):
        object.__setattr__(self, 'args', tuple(self.args))

UNIT = UnitLit()

def seq(first, then):
    '''
    ``first; then``, i.e. a bind whose result is discarded.
    '''
    return Bind('_', first, then)

# --- traversal -----------------------------------------------------------

def children(t):
    '''
    Immediate subterms of ``t`` in path order. Operator arguments are
    flattened into the list.

    :param t: Term
    :type t: Term
    :returns: Child terms
    :rtype: list
    '''
    result = []
    for name in t._subterms:
        child = getattr(t, name)
        if isinstance(child, tuple):
            result.extend(child)
        else:
            result.append(child)
    return result

def with_child(t, index, new):
    '''
    Copy of ``t`` with its ``index``-th child replaced by ``new``.
    '''
    i = 0
    for name in t._subterms:
        child = getattr(t, name)
        if isinstance(child, tuple):
            if index < i + len(child):
                args = list(child)
                args[index - i] = new
                return t._replace(**{name: tuple(args)})
            i += len(child)
        else:
            if i == index:
                return t._replace(**{name: new})
            i += 1
    raise IndexError(f'{type(t).__name__} has no child {index}')

def subterm_at(t, path):
    for index in path:
        kids = children(t)
        if not 0 <= index < len(kids):
            raise IndexError(f'path {tuple(path)} leaves the term at {type(t).__name__}')
        t = kids[index]
    return t

def replace_at(t, path, new):
    if not path:
        return new
    head, rest = path[0], path[1:]
    return with_child(t, head, replace_at(children(t)[head], rest, new))

def positions(t, path=()):
    '''
    Pre-order (outermost first, left to right) enumeration of
    ``(path, subterm)`` pairs.
    '''
    yield path, t
    for i, child in enumerate(children(t)):
        yield from positions(child, path + (i,))

def subterms(t):
    for _, s in positions(t):
        yield s

def size(t):
    return sum(1 for _ in subterms(t))

def is_fix_free(t):
    return not any(isinstance(s, Fix) for s in subterms(t))

def is_discrete(t):
    '''
    True when ``t`` never draws from the continuous uniform distribution.
    '''
    return not any(isinstance(s, Uniform) for s in subterms(t))

def is_charge_free(t):
    return not any(isinstance(s, Charge) for s in subterms(t))

# --- variables and substitution ------------------------------------------

def free_vars(t):
    '''
    Free variables of a term, cached on the node.

    :param t: Term
    :type t: Term
    :returns: Free variable names
    :rtype: frozenset
    '''
    fv = t.__dict__.get('_fv')
    if fv is not None:
        return fv
    if isinstance(t, Var):
        fv = frozenset([t.name])
    else:
        acc = set()
        for name in t._subterms:
            child = getattr(t, name)
            if isinstance(child, tuple):
                for c in child:
                    acc |= free_vars(c)
                continue
            inner = free_vars(child)
            binders = t._scope.get(name)
            if binders:
                inner = inner - {getattr(t, b) for b in binders}
            acc |= inner
        fv = frozenset(acc)
    object.__setattr__(t, '_fv', fv)
    return fv

def is_closed(t):
    return not free_vars(t)

def fresh_name(base, avoid):
    '''
    A variable name derived from ``base`` that does not occur in ``avoid``.

    Example::
        >>> fresh_name('x', {'x', 'x1'})
        'x2'
    '''
    stem = base.rstrip('0123456789') or 'x'
    if not stem[0].isalpha():
        stem = 'x'
    if base not in avoid and IDENTIFIER.match(base):
        return base
    for i in itertools.count(1):
        name = f'{stem}{i}'
        if name not in avoid:
            return name

def subst_many(t, mapping):
    '''
    Simultaneous capture-avoiding substitution of values for variables.

    :param t: Term
    :type t: Term
    :param mapping: Variable name to replacement value
    :type mapping: dict
    :returns: Term with every free occurrence replaced
    :rtype: Term
    '''
    fv = free_vars(t)
    mapping = {k: v for k, v in mapping.items() if k in fv}
    if not mapping:
        return t
    if isinstance(t, Var):
        return mapping[t.name]
    changes = {}
    for name in t._subterms:
        child = getattr(t, name)
        if isinstance(child, tuple):
            changes[name] = tuple(subst_many(c, mapping) for c in child)
            continue
        binders = t._scope.get(name, ())
        if not binders:
            changes[name] = subst_many(child, mapping)
            continue
        inner = dict(mapping)
        bound = [getattr(t, b) for b in binders]
        for b in bound:
            inner.pop(b, None)
        if inner:
            incoming = set()
            for v in inner.values():
                incoming |= free_vars(v)
            avoid = incoming | free_vars(child) | set(inner) | set(bound)
            for field in binders:
                b = getattr(t, field)
                if b in incoming:
                    new = fresh_name(b, avoid)
                    avoid.add(new)
                    changes[field] = new
                    inner[b] = Var(new)
        changes[name] = subst_many(child, inner)
    return t._replace(**changes)

def substitute(t, x, v):
    '''
    Capture-avoiding substitution ``t[v/x]``.

    Example::
        >>> substitute(Produce(Var('x')), 'x', NatLit(3))
        Produce(v=NatLit(n=3))
    '''
    return subst_many(t, {x: v})

def unfold(fix):
    '''
    One unfolding of a recursive computation: ``body[thunk(fix x. body)/x]``.
    '''
    return substitute(fix.body, fix.x, Thunk(fix))

def canonical(t, env=None, depth=0):
    '''
    Rename every binder of ``t`` to a positional name so that alpha-equivalent
    terms become structurally equal. The result is cached for closed terms.
    Canonical names are not valid identifiers and never leak into printed
    programs.
    '''
    if env is None:
        cached = t.__dict__.get('_canon')
        if cached is not None:
            return cached
        result = canonical(t, {}, 0)
        if not free_vars(t):
            object.__setattr__(t, '_canon', result)
        return result
    if isinstance(t, Var):
        name = env.get(t.name)
        return t if name is None else Var(name)
    if not t._subterms:
        return t
    changes = {}
    for name in t._subterms:
        child = getattr(t, name)
        if isinstance(child, tuple):
            changes[name] = tuple(canonical(c, env, depth) for c in child)
            continue
        binders = t._scope.get(name, ())
        if not binders:
            changes[name] = canonical(child, env, depth)
            continue
        inner = dict(env)
        d = depth
        for field in binders:
            new = f'%{d}'
            inner[getattr(t, field)] = new
            changes[field] = new
            d += 1
        changes[name] = canonical(child, inner, d)
    return t._replace(**changes)

def alpha_equal(a, b):
    return canonical(a) == canonical(b)

# --- desugaring ----------------------------------------------------------

def desugar(t, lower=False):
    '''
    Identity unless ``lower`` is set, in which case every ``rand`` and
    ``choose`` is rewritten in terms of ``uniform``:

    * ``rand n`` becomes ``x <- uniform; y <- mulr n x; floor y``
    * ``choose p {t} {u}`` becomes ``x <- uniform; c <- leqr x p; if0 c then t else u``

    :param t: Term
    :type t: Term
    :param lower: Lower the discrete samplers
    :type lower: bool
    :returns: Desugared term
    :rtype: Term
    '''
    if not lower:
        return t
    kids = children(t)
    if kids:
        lowered = [desugar(k, lower=True) for k in kids]
        for i, (old, new) in enumerate(zip(kids, lowered)):
            if old is not new:
                t = with_child(t, i, new)
    if isinstance(t, RandNat):
        avoid = set(free_vars(t.n))
        x = fresh_name('u', avoid)
        y = fresh_name('s', avoid | {x})
        if isinstance(t.n, NatLit):
            scaled = PrimOp(Op.MulReal, (RealLit(t.n.n), Var(x)))
            return Bind(x, Uniform(), Bind(y, scaled, PrimOp(Op.FloorToNat, (Var(y),))))
        r = fresh_name('r', avoid | {x, y})
        return Bind(x, Uniform(),
                    Bind(r, PrimOp(Op.ToReal, (t.n,)),
                         Bind(y, PrimOp(Op.MulReal, (Var(r), Var(x))),
                              PrimOp(Op.FloorToNat, (Var(y),)))))
    if isinstance(t, Choose):
        avoid = set(free_vars(t.left) | free_vars(t.right))
        x = fresh_name('u', avoid)
        c = fresh_name('c', avoid | {x})
        return Bind(x, Uniform(),
                    Bind(c, PrimOp(Op.LeqReal, (Var(x), RealLit(t.p))),
                         IfZero(Var(c), t.left, t.right)))
    return t

from cert.syntax.parser import parse, parse_file, parse_value, parse_type, parse_with_spans
from cert.syntax.printer import pretty_print, pretty
