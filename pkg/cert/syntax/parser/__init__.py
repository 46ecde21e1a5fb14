import os
import logging
from fractions import Fraction

import lark as L

import cert.syntax as S
from cert.exceptions import ParseError

logger = logging.getLogger(__name__)

GRAMMAR = r'''
?comp: "\\" NAME [":" vtype] "." comp                  -> lam
     | "fix" NAME [":" ctype] "." comp                 -> fix
     | NAME "<-" simple ";" comp                       -> bind
     | simple ";" comp                                 -> seq
     | "if0" value "then" comp "else" comp             -> if0
     | "let" NAME "=" value "in" comp                  -> letval
     | "unpair" value "as" "(" NAME "," NAME ")" "in" comp  -> unpair
     | "case" value "of" "nil" "=>" comp "|" "cons" NAME NAME "=>" comp  -> caselist
     | simple

?simple: simple vatom                                  -> app
       | head

?head: "force" vatom                                   -> force
     | "produce" vatom                                 -> produce
     | "produce" "(" primop ")"
     | "charge" "(" cvalue ")"                         -> charge
     | "uniform"                                       -> uniform
     | "rand" vatom                                    -> rand
     | "choose" prob "{" comp "}" "{" comp "}"         -> choose
     | primop
     | "(" comp ")"

primop: op1 vatom
      | op2 vatom vatom

!op1: "succ" | "pred" | "floor" | "tocost" | "toreal"
!op2: "addr" | "add" | "monus" | "mulr" | "mul" | "leqr" | "leq" | "subr" | "eq"

prob: INT | REAL

cvalue: value ("+" value)*

?value: vatom
      | "cons" vatom vatom                             -> cons

?vatom: NAME                                           -> var
      | INT                                            -> numeral
      | REAL                                           -> reallit
      | "(" ")"                                        -> unitlit
      | "nil"                                          -> nil
      | "(" "nil" ":" vtype ")"                        -> nil_ann
      | "thunk" "(" comp ")"                           -> thunk
      | "cost" "(" INT ")"                             -> costlit
      | "nat" "(" INT ")"                              -> natlit
      | "(" value "," value ")"                        -> pair
      | "(" value "+" value ")"                        -> costadd
      | "(" value ")"

?vtype: vtunary "*" vtype                              -> prod_t
      | vtunary

?vtunary: "list" vtunary                               -> list_t
        | vtatom

?vtatom: "unit"                                        -> unit_t
       | "nat"                                         -> nat_t
       | "real"                                        -> real_t
       | "cost"                                        -> cost_t
       | "U" "(" ctype ")"                             -> u_t
       | "(" vtype ")"

?ctype: "F" vtatom                                     -> f_t
      | vtype "->" ctype                               -> arrow_t

NAME: /[A-Za-z][A-Za-z0-9_]*/
REAL.2: /-?\d+\/\d+/ | /-?\d+\.\d+/
INT: /\d+/

COMMENT: /--[^\n]*/
%import common.WS
%ignore WS
%ignore COMMENT
'''

KEYWORDS = {
    'fix', 'if0', 'then', 'else', 'let', 'in', 'unpair', 'as', 'case', 'of',
    'nil', 'cons', 'force', 'produce', 'charge', 'uniform', 'rand', 'choose',
    'thunk', 'cost', 'nat', 'unit', 'real', 'list', 'U', 'F'
} | set(S.OPS_BY_KEYWORD)

_parser = None

def _get_parser():
    global _parser
    if _parser is None:
        logger.debug('building lalr parser')
        _parser = L.Lark(
            GRAMMAR,
            start=['comp', 'value', 'vtype', 'ctype'],
            parser='lalr',
            propagate_positions=True,
            maybe_placeholders=True
        )
    return _parser

class SpanTable(object):
    '''
    Side table from parsed nodes to their source position. Nodes are keyed
    by identity so that structurally equal nodes keep distinct positions.
    '''
    def __init__(self, filename='<input>'):
        self.filename = filename
        self._spans = dict()

    def record(self, node, line, column):
        self._spans[id(node)] = (node, line, column)
        return node

    def location(self, node):
        '''
        Location of ``node`` as ``(filename, line, column)``; nodes built
        outside the parser report ``('<input>', 0, 0)``.
        '''
        entry = self._spans.get(id(node))
        if entry is None or entry[0] is not node:
            return ('<input>', 0, 0)
        return (self.filename, entry[1], entry[2])

    def __len__(self):
        return len(self._spans)

NO_SPANS = SpanTable()

@L.v_args(meta=True)
class ToAst(L.Transformer):
    '''
    Turn the lark parse tree into syntax nodes, recording positions.
    '''
    def __init__(self, spans):
        super().__init__()
        self.spans = spans
        self.numerals = set()

    def _mark(self, meta, node):
        if not getattr(meta, 'empty', True):
            self.spans.record(node, meta.line, meta.column)
        return node

    # computations

    def lam(self, meta, children):
        name, ann, body = children
        return self._mark(meta, S.Lam(str(name), body, ann))

    def fix(self, meta, children):
        name, ann, body = children
        return self._mark(meta, S.Fix(str(name), body, ann))

    def bind(self, meta, children):
        name, bound, cont = children
        return self._mark(meta, S.Bind(str(name), bound, cont))

    def seq(self, meta, children):
        bound, cont = children
        return self._mark(meta, S.Bind('_', bound, cont))

    def if0(self, meta, children):
        guard, zero, succ = children
        return self._mark(meta, S.IfZero(guard, zero, succ))

    def letval(self, meta, children):
        name, v, body = children
        return self._mark(meta, S.LetVal(str(name), v, body))

    def unpair(self, meta, children):
        v, x, y, body = children
        return self._mark(meta, S.Unpair(str(x), str(y), v, body))

    def caselist(self, meta, children):
        v, nil, hd, tl, cons = children
        return self._mark(meta, S.CaseList(v, nil, str(hd), str(tl), cons))

    def app(self, meta, children):
        fn, arg = children
        return self._mark(meta, S.App(fn, arg))

    def force(self, meta, children):
        return self._mark(meta, S.Force(children[0]))

    def produce(self, meta, children):
        return self._mark(meta, S.Produce(children[0]))

    def charge(self, meta, children):
        return self._mark(meta, S.Charge(self._as_cost(children[0])))

    def uniform(self, meta, children):
        return self._mark(meta, S.Uniform())

    def rand(self, meta, children):
        return self._mark(meta, S.RandNat(children[0]))

    def choose(self, meta, children):
        p, left, right = children
        if not 0 <= p <= 1:
            raise ParseError(f'choice probability {p} outside [0, 1]',
                             meta.line, meta.column, filename=self.spans.filename)
        return self._mark(meta, S.Choose(p, left, right))

    def primop(self, meta, children):
        op = S.OPS_BY_KEYWORD[str(children[0])]
        return self._mark(meta, S.PrimOp(op, tuple(children[1:])))

    def op1(self, meta, children):
        return str(children[0])

    def op2(self, meta, children):
        return str(children[0])

    def prob(self, meta, children):
        return Fraction(str(children[0]))

    def cvalue(self, meta, children):
        v = children[0]
        for right in children[1:]:
            v = self._mark(meta, S.CostAdd(v, right))
        return v

    def _as_cost(self, v):
        # bare numerals inside charge(...) are cost literals
        if isinstance(v, S.NatLit) and id(v) in self.numerals:
            line, column = self._position(v)
            node = S.CostLit(v.n)
            if line:
                self.spans.record(node, line, column)
            return node
        if isinstance(v, S.CostAdd):
            return S.CostAdd(self._as_cost(v.left), self._as_cost(v.right))
        return v

    def _position(self, node):
        _, line, column = self.spans.location(node)
        return line, column

    # values

    def var(self, meta, children):
        name = str(children[0])
        return self._mark(meta, S.Var(name))

    def numeral(self, meta, children):
        node = self._mark(meta, S.NatLit(int(children[0])))
        self.numerals.add(id(node))
        return node

    def natlit(self, meta, children):
        return self._mark(meta, S.NatLit(int(children[0])))

    def reallit(self, meta, children):
        return self._mark(meta, S.RealLit(Fraction(str(children[0]))))

    def costlit(self, meta, children):
        return self._mark(meta, S.CostLit(int(children[0])))

    def unitlit(self, meta, children):
        return self._mark(meta, S.UnitLit())

    def nil(self, meta, children):
        return self._mark(meta, S.Nil())

    def nil_ann(self, meta, children):
        ty = children[0]
        if not isinstance(ty, S.List):
            raise ParseError(f'nil annotation must be a list type, found {ty}',
                             meta.line, meta.column, filename=self.spans.filename)
        return self._mark(meta, S.Nil(ty.elem))

    def thunk(self, meta, children):
        return self._mark(meta, S.Thunk(children[0]))

    def pair(self, meta, children):
        return self._mark(meta, S.Pair(children[0], children[1]))

    def costadd(self, meta, children):
        return self._mark(meta, S.CostAdd(children[0], children[1]))

    def cons(self, meta, children):
        return self._mark(meta, S.Cons(children[0], children[1]))

    # types

    def prod_t(self, meta, children):
        return S.Prod(children[0], children[1])

    def list_t(self, meta, children):
        return S.List(children[0])

    def unit_t(self, meta, children):
        return S.Unit()

    def nat_t(self, meta, children):
        return S.Nat()

    def real_t(self, meta, children):
        return S.Real()

    def cost_t(self, meta, children):
        return S.Cost()

    def u_t(self, meta, children):
        return S.U(children[0])

    def f_t(self, meta, children):
        return S.F(children[0])

    def arrow_t(self, meta, children):
        return S.Arrow(children[0], children[1])

def _expected(parser, names):
    rendered = set()
    for name in names or ():
        try:
            pattern = parser.get_terminal(name).pattern
            if pattern.type == 'str':
                rendered.add(repr(pattern.value))
            else:
                rendered.add(name)
        except KeyError:
            rendered.add(name)
    return rendered

def _parse(source, start, filename='<input>'):
    parser = _get_parser()
    spans = SpanTable(filename)
    try:
        tree = parser.parse(source, start=start)
    except L.exceptions.UnexpectedToken as e:
        if e.token.type == '$END':
            raise ParseError('unexpected end of input', e.line, e.column,
                             _expected(parser, e.expected), filename) from None
        raise ParseError(f'unexpected token {e.token!r}', e.line, e.column,
                         _expected(parser, e.expected), filename) from None
    except L.exceptions.UnexpectedCharacters as e:
        raise ParseError(f'unexpected character {source[e.pos_in_stream]!r}', e.line, e.column,
                         _expected(parser, e.allowed), filename) from None
    except L.exceptions.UnexpectedEOF as e:
        raise ParseError('unexpected end of input', 0, 0,
                         _expected(parser, e.expected), filename) from None
    try:
        node = ToAst(spans).transform(tree)
    except L.exceptions.VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        raise ParseError(str(e.orig_exc), 0, 0, filename=filename) from None
    return node, spans

def parse_with_spans(source, filename='<input>'):
    '''
    Parse a program and return it along with its position table.

    :param source: Program text
    :type source: str
    :param filename: Name used in error locations
    :type filename: str
    :returns: Computation and span table
    :rtype: tuple
    '''
    return _parse(source, 'comp', filename)

def parse(source, filename='<input>'):
    '''
    Parse a computation.

    Example::
        >>> from cert.syntax import parse
        >>> parse('produce 0')
        Produce(v=NatLit(n=0))

    :param source: Program text
    :type source: str
    :returns: Computation
    :rtype: cert.syntax.CompTerm
    :raises cert.exceptions.ParseError: on malformed input
    '''
    term, _ = _parse(source, 'comp', filename)
    return term

def parse_value(source):
    '''
    Parse a value literal, e.g. a command line argument ``cons 1 (cons 2 nil)``.
    '''
    term, _ = _parse(source, 'value')
    return term

def parse_type(source):
    '''
    Parse a value type (``nat * list nat``) or, failing that, a computation
    type (``nat -> F nat``).
    '''
    try:
        ty, _ = _parse(source, 'vtype')
    except ParseError:
        ty, _ = _parse(source, 'ctype')
    return ty

def parse_file(path):
    '''
    Read and parse a ``.cert`` file.

    :param path: File path
    :type path: str
    :returns: Computation and span table
    :rtype: tuple
    '''
    path = os.path.expanduser(path)
    with open(path, 'r', encoding='utf-8') as fo:
        source = fo.read()
    logger.debug('parsing %s', path)
    return parse_with_spans(source, filename=path)
