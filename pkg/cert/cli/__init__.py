import os
import sys
import json
import logging
import argparse as ap
from fractions import Fraction

import cert
import cert.syntax as S
import cert.corpus as corpus
import cert.commons as commons
import cert.harness as harness
from cert.__version__ import __version__
from cert.dist import numeric, value_of
from cert.costdist import table
from cert.exceptions import ( CertError, ParseError, CertTypeError, UsageError,
                              CorpusError, ContinuousUnsupported )

logger = logging.getLogger(__name__)

OK = 0
VIOLATION = 1
USAGE = 2

def main(argv=None):
    # parse arguments and configure logging
    args = parse_args(argv)
    if args.debug:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)
    try:
        ses = cert.session(seed=args.seed, lower=args.lower)
        with ses:
            return COMMANDS[args.command](ses, args)
    except CertTypeError as e:
        report_error(args, e.render(), e.as_dict())
        return USAGE
    except ParseError as e:
        report_error(args, str(e), e.as_dict())
        return USAGE
    except (UsageError, CorpusError, ContinuousUnsupported) as e:
        report_error(args, str(e), {'error': type(e).__name__, 'message': str(e)})
        return USAGE
    except CertError as e:
        report_error(args, str(e), {'error': type(e).__name__, 'message': str(e)})
        return VIOLATION

def report_error(args, text, payload):
    if args.json:
        print(json.dumps(payload))
    else:
        print(text, file=sys.stderr)

def emit(args, text, payload):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)

def load(args, path=None):
    '''
    Parse and type check the program named on the command line, returning
    it with its ``--arg`` values.
    '''
    path = path or args.file
    if not os.path.exists(path):
        raise UsageError(f'no such file: {path}')
    term, spans = S.parse_file(path)
    ty = cert.check_program(term, spans)
    term = S.desugar(term, lower=args.lower)
    values = [S.parse_value(a) for a in args.arg or []]
    return term, ty, values

def q(x):
    return commons.rational_json(x)

# --- subcommands ---------------------------------------------------------

def do_typecheck(ses, args):
    term, ty, _ = load(args)
    emit(args, str(ty), {'file': args.file, 'type': str(ty)})
    return OK

def do_run(ses, args):
    term, _, values = load(args)
    fuel = args.fuel if args.fuel is not None else ses.settings.fuel
    outcome = ses.run_once(term, fuel=fuel, args=values)
    terminal = None if outcome.terminal is None else S.pretty_print(outcome.terminal)
    text = f'{outcome.status} cost={outcome.cost} steps={outcome.steps}'
    if terminal is not None:
        text += f'\n{terminal}'
    emit(args, text, {
        'status': outcome.status,
        'cost': outcome.cost,
        'terminal': terminal,
        'steps': outcome.steps,
        'seed': ses.seed,
        'fuel': fuel
    })
    return OK

def do_estimate(ses, args):
    term, _, values = load(args)
    kwargs = {k: v for k, v in (('samples', args.samples), ('fuel', args.fuel)) if v is not None}
    if args.seeds:
        result = ses.estimate_parallel(term, args.seeds, workers=args.workers, args=values, **kwargs)
    else:
        result = ses.estimate(term, args=values, **kwargs)
    lo, hi = result.interval()
    text = (f'mean={result.mean:.6f} stddev={result.stddev:.6f} 99%=[{lo:.6f}, {hi:.6f}] '
            f'terminated={result.terminated} exhausted={result.exhausted}')
    if result.value_mean is not None:
        text += f' value_mean={result.value_mean:.6f}'
    emit(args, text, result.as_dict())
    return OK

def do_dist(ses, args):
    term, _, values = load(args)
    depth = args.depth if args.depth is not None else ses.settings.depth
    d = ses.eval_cost(term, depth=depth, args=values)
    rows = table(d)
    lines = [f'{cost}\t{value}\t{commons.render_rational(w)}' for cost, value, w in rows]
    lines.append(f'mass {commons.render_rational(d.mass())}')
    lines.append(f'expected cost {commons.render_rational(cert.expected_of_marginal(d))}')
    emit(args, '\n'.join(lines), {
        'depth': depth,
        'rows': [{'cost': c, 'value': str(v), 'weight': q(w)} for c, v, w in rows],
        'mass': q(d.mass()),
        'expected_cost': q(cert.expected_of_marginal(d))
    })
    return OK

def do_analyze(ses, args):
    term, _, values = load(args)
    if args.threshold is not None:
        max_depth = args.max_depth or ses.settings.max_depth
        report = harness.divergence_check(term, args.threshold, max_depth, values)
        text = f'exceeded={report.exceeded} depth={report.depth} ec={float(report.ec):.6f}'
        emit(args, text, {'exceeded': report.exceeded, 'depth': report.depth, 'ec': q(report.ec)})
        return OK
    kwargs = {'args': values}
    if args.tol is not None:
        kwargs['tol'] = commons.rational(args.tol)
    if args.max_depth is not None:
        kwargs['max_depth'] = args.max_depth
    report = ses.analyze(term, **kwargs)
    text = (f'ec={float(report.ec):.6f} ({commons.render_rational(report.ec)}) '
            f'mass={float(report.mass):.6f} depth={report.depth} converged={report.converged}')
    emit(args, text, {
        'ec': q(report.ec),
        'mass': q(report.mass),
        'depth': report.depth,
        'converged': report.converged
    })
    return OK if report.converged else VIOLATION

def reward(text):
    '''
    Reward from the command line: ``zero``, ``identity`` (the number carried
    by a numeric result), ``indicator:VALUE``, or the name of a JSON file
    holding a list of ``[value, rational]`` pairs. Values missing from the
    file have reward 0.
    '''
    if text in (None, 'zero'):
        return None
    if text == 'identity':
        return lambda v: numeric(v) or 0
    if text.startswith('indicator:'):
        target = value_of(S.parse_value(text.split(':', 1)[1]))
        return lambda v: 1 if v == target else 0
    if os.path.isfile(text):
        return reward_table(text)
    raise UsageError(f'unknown reward {text!r}; use zero, identity, indicator:VALUE or a JSON file')

def reward_table(filename):
    '''
    Read a reward table from a JSON list of ``[value, rational]`` pairs.

    :param filename: JSON file
    :type filename: str
    :returns: Map from runtime values to rewards
    :rtype: dict
    :raises cert.exceptions.UsageError: on a malformed table
    '''
    with open(filename, 'r') as fo:
        try:
            rows = json.load(fo)
        except ValueError as e:
            raise UsageError(f'{filename}: not a JSON document ({e})') from None
    if not isinstance(rows, list):
        raise UsageError(f'{filename}: expected a list of [value, rational] pairs')
    table = dict()
    for row in rows:
        if not isinstance(row, list) or len(row) != 2:
            raise UsageError(f'{filename}: bad reward entry {row!r}')
        try:
            w = commons.rational(row[1])
        except (TypeError, ValueError) as e:
            raise UsageError(f'{filename}: {e}') from None
        table[value_of(S.parse_value(str(row[0])))] = w
    logger.debug('loaded %s rewards from %s', len(table), filename)
    return table

def do_pre(ses, args):
    term, _, values = load(args)
    depth = args.depth if args.depth is not None else ses.settings.depth
    fn = reward(args.reward)
    if args.check:
        f = ses.check_factorization(term, fn, depth=depth, args=values)
        text = f'pre={commons.render_rational(f.pre)} ec={commons.render_rational(f.ec)} ' \
               f'integral={commons.render_rational(f.integral)} equal={f.equal}'
        emit(args, text, {'pre': q(f.pre), 'ec': q(f.ec), 'integral': q(f.integral),
                          'discrepancy': q(f.discrepancy), 'equal': f.equal})
        return OK if f.equal else VIOLATION
    value = ses.eval_pre(term, fn, depth=depth, args=values)
    emit(args, commons.render_rational(value), {'pre': q(value), 'depth': depth})
    return OK

def do_rewrite(ses, args):
    term, _, _ = load(args)
    result, steps = ses.normalize(term, args.rules, args.fuel or 1000)
    lines = [S.pretty_print(result)]
    for step in steps:
        lines.append(f'{step.rule} at {list(step.path)}')
    emit(args, '\n'.join(lines), {
        'result': S.pretty_print(result),
        'steps': [{'rule': s.rule, 'path': list(s.path),
                   'before': S.pretty_print(s.before), 'after': S.pretty_print(s.after)}
                  for s in steps]
    })
    return OK

def do_check_eq(ses, args):
    left, _, values = load(args, args.left)
    right, _, _ = load(args, args.right)
    kwargs = {'args': values, 'shift': args.shift, 'limit': args.limit}
    if args.depth is not None:
        kwargs['depth'] = args.depth
    report = ses.check_preservation(left, right, **kwargs)
    text = f'equal={report.equal} cost_equal={report.cost_equal} ec_equal={report.ec_equal}'
    emit(args, text, {'equal': report.equal, 'cost_equal': report.cost_equal,
                      'ec_equal': report.ec_equal, 'mode': report.mode,
                      'left_ec': q(report.left.ec), 'right_ec': q(report.right.ec)})
    return OK if report.equal else VIOLATION

def do_crosscheck(ses, args):
    s = ses.settings
    depth = args.depth if args.depth is not None else s.depth
    samples = args.samples if args.samples is not None else s.samples
    fuel = args.fuel if args.fuel is not None else s.fuel
    path = args.path or corpus.DEFAULT_DIR
    if os.path.isdir(path):
        entries = corpus.load(path)
        for entry in entries:
            corpus.check(entry)
        reports = [ses.crosscheck(e, depth=depth, samples=samples, fuel=fuel) for e in entries]
    else:
        term, _, values = load(args, path)
        reports = [ses.crosscheck(term, depth=depth, samples=samples, fuel=fuel, args=values)]
    passed = all(r.passed for r in reports)
    if args.oracles:
        oracles = harness.oracle_suite()
        passed = passed and oracles.passed
        for row in oracles.rows:
            if not row.ok:
                logger.warning('oracle mismatch: %s(%s) expected %s found %s',
                               row.name, row.n, float(row.expected), float(row.found))
    if args.output:
        harness.write_report(reports, args.output)
    lines = []
    for r in reports:
        ec = '-' if r.ec is None else f'{float(r.ec):.6f}'
        lines.append(f'{r.name}\tec={ec}\tinequality={r.inequality_holds}\t'
                     f'ci={r.ci_consistent}\tadequacy={r.adequacy_consistent}\tpassed={r.passed}')
    if args.json:
        print(harness.render_json(reports))
    else:
        print('\n'.join(lines))
    return OK if passed else VIOLATION

def do_laws(ses, args):
    kwargs = {}
    if args.instances is not None:
        kwargs['instances'] = args.instances
    report = ses.monad_law_suite(**kwargs)
    lhs, rhs, strict = report.counterexample
    lines = [f'{name}\t{p}/{t}' for name, (p, t) in report.checks.items()]
    lines.append(f'counterexample\t{commons.render_rational(lhs.ec)} < '
                 f'{commons.render_rational(rhs.ec)}\t{strict}')
    emit(args, '\n'.join(lines), {
        'passed': report.passed,
        'checks': {name: {'passed': p, 'total': t} for name, (p, t) in report.checks.items()},
        'counterexample': {'lhs': q(lhs.ec), 'rhs': q(rhs.ec), 'strict': strict},
        'seed': report.seed
    })
    return OK if report.passed else VIOLATION

COMMANDS = {
    'typecheck': do_typecheck,
    'run': do_run,
    'estimate': do_estimate,
    'dist': do_dist,
    'analyze': do_analyze,
    'pre': do_pre,
    'rewrite': do_rewrite,
    'check-eq': do_check_eq,
    'crosscheck': do_crosscheck,
    'laws': do_laws,
}

class ArgumentParser(ap.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, f'{self.prog}: error: {message}\n')

def parse_args(argv=None):
    common = ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true',
        help='Machine readable output')
    common.add_argument('--debug', action='store_true',
        help='Enable debug messages')
    common.add_argument('--seed', type=int,
        help='Random seed (default: $CERT_SEED or 0)')
    common.add_argument('--arg', action='append',
        help='Argument value applied to the program, repeatable')
    common.add_argument('--lower', action='store_true',
        help='Lower rand and choose to uniform before running')

    parser = ArgumentParser(description='Expected cost toolkit for call-by-push-value programs')
    parser.add_argument('--version', action='version', version=__version__)
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('typecheck', parents=[common], help='Type check a program')
    p.add_argument('file')

    p = sub.add_parser('run', parents=[common], help='Sample one run')
    p.add_argument('file')
    p.add_argument('--fuel', type=int)

    p = sub.add_parser('estimate', parents=[common], help='Monte-Carlo expected cost')
    p.add_argument('file')
    p.add_argument('--samples', type=int)
    p.add_argument('--fuel', type=int)
    p.add_argument('--seeds', type=int, nargs='+',
        help='Independent streams to split the samples over')
    p.add_argument('--workers', type=int, default=1)

    p = sub.add_parser('dist', parents=[common], help='Exact cost distribution')
    p.add_argument('file')
    p.add_argument('--depth', type=int)

    p = sub.add_parser('analyze', parents=[common], help='Expected cost by depth doubling')
    p.add_argument('file')
    p.add_argument('--tol')
    p.add_argument('--max-depth', type=int)
    p.add_argument('--threshold', type=Fraction,
        help='Report whether the expected cost exceeds this value instead')

    p = sub.add_parser('pre', parents=[common], help='Pre-expectation of a reward')
    p.add_argument('file')
    p.add_argument('--depth', type=int)
    p.add_argument('--reward', default='zero',
        help='zero, identity, indicator:VALUE or a JSON file of [value, rational] pairs')
    p.add_argument('--check', action='store_true',
        help='Check the factorization through the expected-cost semantics')

    p = sub.add_parser('rewrite', parents=[common], help='Normalize with rewrite rules')
    p.add_argument('file')
    p.add_argument('--rules',
        help='Comma separated rule names')
    p.add_argument('--fuel', type=int)

    p = sub.add_parser('check-eq', parents=[common], help='Compare two programs semantically')
    p.add_argument('left')
    p.add_argument('right')
    p.add_argument('--depth', type=int)
    p.add_argument('--shift', type=int, default=0,
        help='Evaluate the left program this many levels deeper')
    p.add_argument('--limit', action='store_true',
        help='Compare analyze limits instead of fixed-depth results')

    p = sub.add_parser('crosscheck', parents=[common], help='Cross-check all engines')
    p.add_argument('path', nargs='?',
        help='Corpus directory or program file (default: bundled corpus)')
    p.add_argument('--depth', type=int)
    p.add_argument('--samples', type=int)
    p.add_argument('--fuel', type=int)
    p.add_argument('--oracles', action='store_true',
        help='Also compare against the closed-form oracles')
    p.add_argument('-o', '--output',
        help='Write the JSON report to this file')

    p = sub.add_parser('laws', parents=[common], help='Monad law suite')
    p.add_argument('--instances', type=int)

    return parser.parse_args(argv)
