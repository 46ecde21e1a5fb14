import logging

import cert.syntax as S
from cert.exceptions import CertTypeError
from cert.syntax.parser import NO_SPANS

logger = logging.getLogger(__name__)

class Kind(object):
    '''
    Type error kinds.
    '''
    UnboundVariable = 'UnboundVariable'
    Mismatch = 'Mismatch'
    NotAFunction = 'NotAFunction'
    NotAThunk = 'NotAThunk'
    NotF = 'NotF'
    NotList = 'NotList'
    NotProd = 'NotProd'
    ArityError = 'ArityError'
    MissingAnnotation = 'MissingAnnotation'

class Context(object):
    '''
    Ordered typing context of ``(name, ValueType)`` bindings. Lookup returns
    the rightmost binding. Contexts are immutable; ``extend`` returns a new
    context.
    '''
    __slots__ = ('_bindings',)

    def __init__(self, bindings=()):
        self._bindings = tuple(bindings)

    def extend(self, name, ty):
        if name == '_':
            return self
        return Context(self._bindings + ((name, ty),))

    def lookup(self, name):
        for bound, ty in reversed(self._bindings):
            if bound == name:
                return ty
        return None

    def names(self):
        return [name for name, _ in self._bindings]

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self):
        return len(self._bindings)

    def __repr__(self):
        inner = ', '.join(f'{n} : {t}' for n, t in self._bindings)
        return f'Context({inner})'

EMPTY = Context()

class Checker(object):
    '''
    Type checker for values and computations. Synthesis is the default mode;
    an expected type flows into lambda binders, ``nil``, and unannotated
    ``fix`` when the surrounding term fixes it.
    '''
    def __init__(self, spans=None):
        self.spans = spans or NO_SPANS

    def fail(self, kind, node, expected=None, found=None, detail=None):
        raise CertTypeError(kind, self.spans.location(node), expected, found, detail)

    def equal(self, node, expected, found):
        if expected != found:
            self.fail(Kind.Mismatch, node, expected, found)
        return found

    # values

    def value(self, ctx, v, expected=None):
        if isinstance(v, S.Var):
            ty = ctx.lookup(v.name)
            if ty is None:
                self.fail(Kind.UnboundVariable, v, detail=v.name)
            return ty
        if isinstance(v, S.UnitLit):
            return S.Unit()
        if isinstance(v, S.NatLit):
            return S.Nat()
        if isinstance(v, S.RealLit):
            return S.Real()
        if isinstance(v, S.CostLit):
            return S.Cost()
        if isinstance(v, S.CostAdd):
            self.equal(v.left, S.Cost(), self.value(ctx, v.left, S.Cost()))
            self.equal(v.right, S.Cost(), self.value(ctx, v.right, S.Cost()))
            return S.Cost()
        if isinstance(v, S.Thunk):
            hint = expected.body if isinstance(expected, S.U) else None
            return S.U(self.comp(ctx, v.body, hint))
        if isinstance(v, S.Pair):
            lhint = rhint = None
            if isinstance(expected, S.Prod):
                lhint, rhint = expected.left, expected.right
            return S.Prod(self.value(ctx, v.left, lhint), self.value(ctx, v.right, rhint))
        if isinstance(v, S.Nil):
            if v.elem is not None:
                ty = S.List(v.elem)
                if isinstance(expected, S.List):
                    self.equal(v, expected, ty)
                return ty
            if isinstance(expected, S.List):
                return expected
            self.fail(Kind.MissingAnnotation, v, detail='nil needs an element type')
        if isinstance(v, S.Cons):
            hint = expected.elem if isinstance(expected, S.List) else None
            head = self.value(ctx, v.head, hint)
            tail = self.value(ctx, v.tail, S.List(head))
            if not isinstance(tail, S.List):
                self.fail(Kind.NotList, v.tail, S.List(head), tail)
            return S.List(self.equal(v.tail, S.List(head), tail).elem)
        raise TypeError(f'not a value term: {v!r}')

    # computations

    def comp(self, ctx, t, expected=None):
        if isinstance(t, S.Lam):
            arg = out = None
            if isinstance(expected, S.Arrow):
                arg, out = expected.arg, expected.out
            if t.ann is not None:
                if arg is not None:
                    self.equal(t, arg, t.ann)
                arg = t.ann
            if arg is None:
                self.fail(Kind.MissingAnnotation, t, detail=f'binder {t.x} needs a type')
            body = self.comp(ctx.extend(t.x, arg), t.body, out)
            return S.Arrow(arg, body)
        if isinstance(t, S.App):
            fn = self.comp(ctx, t.fn)
            if not isinstance(fn, S.Arrow):
                self.fail(Kind.NotAFunction, t.fn, found=fn)
            self.equal(t.arg, fn.arg, self.value(ctx, t.arg, fn.arg))
            return fn.out
        if isinstance(t, S.IfZero):
            self.equal(t.guard, S.Nat(), self.value(ctx, t.guard, S.Nat()))
            zero = self.comp(ctx, t.zero, expected)
            succ = self.comp(ctx, t.succ, expected or zero)
            return self.equal(t.succ, zero, succ)
        if isinstance(t, S.Force):
            hint = S.U(expected) if expected is not None else None
            ty = self.value(ctx, t.v, hint)
            if not isinstance(ty, S.U):
                self.fail(Kind.NotAThunk, t.v, found=ty)
            return ty.body
        if isinstance(t, S.Bind):
            bound = self.comp(ctx, t.bound)
            if not isinstance(bound, S.F):
                self.fail(Kind.NotF, t.bound, found=bound)
            return self.comp(ctx.extend(t.x, bound.out), t.cont, expected)
        if isinstance(t, S.Produce):
            hint = expected.out if isinstance(expected, S.F) else None
            return S.F(self.value(ctx, t.v, hint))
        if isinstance(t, S.LetVal):
            ty = self.value(ctx, t.v)
            return self.comp(ctx.extend(t.x, ty), t.body, expected)
        if isinstance(t, S.Unpair):
            ty = self.value(ctx, t.v)
            if not isinstance(ty, S.Prod):
                self.fail(Kind.NotProd, t.v, found=ty)
            inner = ctx.extend(t.x, ty.left).extend(t.y, ty.right)
            return self.comp(inner, t.body, expected)
        if isinstance(t, S.CaseList):
            ty = self.value(ctx, t.v)
            if not isinstance(ty, S.List):
                self.fail(Kind.NotList, t.v, found=ty)
            nil = self.comp(ctx, t.nil, expected)
            inner = ctx.extend(t.hd, ty.elem).extend(t.tl, ty)
            cons = self.comp(inner, t.cons, expected or nil)
            return self.equal(t.cons, nil, cons)
        if isinstance(t, S.Charge):
            self.equal(t.c, S.Cost(), self.value(ctx, t.c, S.Cost()))
            return S.F(S.Unit())
        if isinstance(t, S.Uniform):
            return S.F(S.Real())
        if isinstance(t, S.RandNat):
            self.equal(t.n, S.Nat(), self.value(ctx, t.n, S.Nat()))
            return S.F(S.Nat())
        if isinstance(t, S.Choose):
            left = self.comp(ctx, t.left, expected)
            right = self.comp(ctx, t.right, expected or left)
            return self.equal(t.right, left, right)
        if isinstance(t, S.Fix):
            ann = t.ann if t.ann is not None else expected
            if ann is None:
                self.fail(Kind.MissingAnnotation, t, detail=f'fix {t.x} needs a type ascription')
            if t.ann is not None and expected is not None:
                self.equal(t, expected, t.ann)
            body = self.comp(ctx.extend(t.x, S.U(ann)), t.body, ann)
            return self.equal(t.body, ann, body)
        if isinstance(t, S.PrimOp):
            inputs, output = t.op.signature
            if len(t.args) != len(inputs):
                self.fail(Kind.ArityError, t, detail=f'{t.op.keyword} takes {len(inputs)} '
                                                     f'argument(s), got {len(t.args)}')
            for arg, ty in zip(t.args, inputs):
                self.equal(arg, ty, self.value(ctx, arg, ty))
            return S.F(output)
        raise TypeError(f'not a computation term: {t!r}')

def check_value(ctx, v, expected=None, spans=None):
    '''
    Synthesize the type of a value.

    Example::
        >>> from cert.syntax import Pair, NatLit, UnitLit
        >>> str(check_value(EMPTY, Pair(NatLit(1), UnitLit())))
        'nat * unit'

    :param ctx: Typing context
    :type ctx: Context
    :param v: Value term
    :type v: cert.syntax.ValueTerm
    :param expected: Optional expected type, used for ``nil``
    :type expected: cert.syntax.ValueType
    :returns: Value type
    :rtype: cert.syntax.ValueType
    :raises cert.exceptions.CertTypeError: when ill-typed
    '''
    return Checker(spans).value(ctx or EMPTY, v, expected)

def check_comp(ctx, t, expected=None, spans=None):
    '''
    Synthesize the computation type of ``t`` under ``ctx``.

    :param ctx: Typing context
    :type ctx: Context
    :param t: Computation
    :type t: cert.syntax.CompTerm
    :returns: Computation type
    :rtype: cert.syntax.CompType
    :raises cert.exceptions.CertTypeError: when ill-typed
    '''
    return Checker(spans).comp(ctx or EMPTY, t, expected)

def check_program(t, spans=None):
    '''
    Type check a closed program.

    :param t: Computation
    :type t: cert.syntax.CompTerm
    :param spans: Position table from the parser
    :type spans: cert.syntax.parser.SpanTable
    :returns: Computation type
    :rtype: cert.syntax.CompType
    :raises cert.exceptions.CertTypeError: when ill-typed or open
    '''
    ty = check_comp(EMPTY, t, spans=spans)
    logger.debug('program has type %s', ty)
    return ty

def applied_type(ty, nargs):
    '''
    Computation type left after supplying ``nargs`` arguments to a program of
    type ``ty``.
    '''
    for _ in range(nargs):
        if not isinstance(ty, S.Arrow):
            raise CertTypeError(Kind.NotAFunction, ('<input>', 0, 0), found=ty,
                                detail='too many arguments supplied')
        ty = ty.out
    return ty

def check_arguments(ty, args):
    '''
    Check closed argument values against the domains of an arrow type and
    return the resulting computation type.
    '''
    for arg in args:
        if not isinstance(ty, S.Arrow):
            raise CertTypeError(Kind.NotAFunction, ('<input>', 0, 0), found=ty,
                                detail='too many arguments supplied')
        found = check_value(EMPTY, arg, ty.arg)
        if found != ty.arg:
            raise CertTypeError(Kind.Mismatch, ('<input>', 0, 0), ty.arg, found,
                                detail='argument')
        ty = ty.out
    return ty
