from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies

import cert.syntax as S
from cert.exceptions import NoMatch, TypeRegression, UsageError
from cert.rewrite import ( RULES, DEFAULT_RULES, RewriteRule, apply_rule, find_redex, normalize,
                           replay, resolve, check_preservation )
from strategies import closed_programs

P = S.parse

@pytest.mark.parametrize('rule,before,after', [
    ('Beta', '(\\x : nat . produce x) 3', 'produce 3'),
    ('LetBeta', 'let x = 2 in succ x', 'succ 2'),
    ('ThunkForce', 'force thunk(produce 1)', 'produce 1'),
    ('SeqReturn', 'x <- produce 4; succ x', 'succ 4'),
    ('SeqEta', 'x <- rand 3; produce x', 'rand 3'),
    ('IfZ', 'if0 0 then produce 1 else produce 2', 'produce 1'),
    ('IfS', 'if0 3 then produce 1 else produce 2', 'produce 2'),
    ('IfSame', 'if0 3 then charge(1); produce 0 else charge(1); produce 0', 'charge(1); produce 0'),
    ('CaseNil', 'case (nil : list nat) of nil => produce 0 | cons h t => produce h', 'produce 0'),
    ('CaseCons', 'case cons 5 (nil : list nat) of nil => produce 0 | cons h t => produce h', 'produce 5'),
    ('UnpairBeta', 'unpair (1, 2) as (a, b) in add a b', 'add 1 2'),
    ('ChargeZero', 'charge(0); produce 1', 'produce 1'),
    ('ChargeMerge', 'charge(2); charge(3); produce ()', 'charge(5); produce ()'),
    ('ChargeMerge', 'charge(2); charge(3)', 'charge(5)'),
    ('ChargeSwap', 'charge(3); charge(1); produce ()', 'charge(1); charge(3); produce ()'),
    ('ChooseUnit', 'choose 1 { produce 0 } { produce 1 }', 'produce 0'),
    ('ChooseUnit', 'choose 0 { produce 0 } { produce 1 }', 'produce 1'),
    ('ChooseSym', 'choose 1/3 { produce 0 } { produce 1 }', 'choose 2/3 { produce 1 } { produce 0 }'),
    ('ChooseIdem', 'choose 1/3 { x <- rand 2; produce x } { y <- rand 2; produce y }', 'x <- rand 2; produce x'),
    ('ChooseAssoc', 'choose 1/2 { produce 0 } { choose 1/2 { produce 1 } { produce 2 } }',
                    'choose 3/4 { choose 2/3 { produce 0 } { produce 1 } } { produce 2 }'),
])
def test_rule(rule, before, after):
    t = P(before)
    result = apply_rule(t, rule)
    assert result == P(after)
    assert check_preservation(t, result, depth=4).equal

def test_eta_contraction():
    t = P('fix f : nat -> F nat . \\x : nat . (\\y : nat . produce y) x')
    result = apply_rule(t, 'EtaArrow', (0,))
    assert result == P('fix f : nat -> F nat . \\y : nat . produce y')

def test_eta_needs_the_bound_variable():
    with pytest.raises(NoMatch):
        apply_rule(P('\\x : nat . (\\y : nat . produce x) 0'), 'EtaArrow')

def test_charge_merge_with_open_amounts():
    t = P('\\c : cost . charge(c); charge(2); produce ()')
    result = apply_rule(t, 'ChargeMerge', (0,))
    assert result.body.bound == S.Charge(S.CostAdd(S.Var('c'), S.CostLit(2)))

def test_charge_swap_needs_decreasing_amounts():
    with pytest.raises(NoMatch):
        apply_rule(P('charge(1); charge(3); produce ()'), 'ChargeSwap')

def test_choose_assoc_with_zero_weights():
    with pytest.raises(NoMatch):
        apply_rule(P('choose 0 { produce 0 } { choose 0 { produce 1 } { produce 2 } }'), 'ChooseAssoc')

def test_no_match():
    with pytest.raises(NoMatch):
        apply_rule(P('produce 0'), 'Beta')
    with pytest.raises(NoMatch):
        apply_rule(P('produce 0'), 'Beta', (5,))

def test_unknown_rule():
    with pytest.raises(UsageError):
        apply_rule(P('produce 0'), 'Teleport')
    with pytest.raises(UsageError):
        resolve('Beta,Nope')

def test_resolve():
    assert [r.name for r in resolve('Beta, ChargeZero')] == ['Beta', 'ChargeZero']
    assert [r.name for r in resolve(None)] == DEFAULT_RULES
    assert 'FixUnfold' not in DEFAULT_RULES

def test_type_regression():
    bad = RewriteRule('Bad', lambda t: S.Produce(S.UNIT) if isinstance(t, S.Produce) else None)
    with pytest.raises(TypeRegression):
        apply_rule(P('produce 0'), bad)

def test_find_redex_is_leftmost_outermost():
    t = P('charge(1); (\\x : nat . produce x) 3')
    path, rule, _ = find_redex(t, resolve(['Beta', 'ChargeZero']))
    assert (path, rule.name) == ((1,), 'Beta')

def test_normalize_merges_charges():
    t = P('charge(1); charge(2); charge(3); produce 0')
    result, steps = normalize(t)
    assert result == P('charge(6); produce 0')
    assert [s.rule for s in steps] == ['ChargeMerge', 'ChargeMerge']
    assert replay(t, steps) == result

def test_normalize_respects_fuel():
    t = P('charge(1); charge(2); charge(3); produce 0')
    result, steps = normalize(t, fuel=1)
    assert len(steps) == 1
    assert result == P('charge(3); charge(3); produce 0')

def test_replay_rejects_foreign_log():
    _, steps = normalize(P('charge(1); charge(2); produce 0'))
    with pytest.raises(NoMatch):
        replay(P('produce 0'), steps)

@pytest.mark.parametrize('name', ['geometric', 'geometric_charge', 'factorial', 'length', 'bifilter',
                                  'coin_tosses', 'qck_nat', 'random_walk', 'diverge'])
def test_unfolding_shifts_depth(entries, program, name):
    t = program(name)
    u = apply_rule(t, 'FixUnfold')
    report = check_preservation(t, u, depth=6, shift=1, args=entries[name].args)
    assert report.equal
    assert report.mode == 'exact'

def test_unfolding_at_equal_depth_differs(geometric):
    u = apply_rule(geometric, 'FixUnfold')
    assert not check_preservation(geometric, u, depth=6).equal

def test_unfolding_preserves_the_limit(geometric):
    u = apply_rule(geometric, 'FixUnfold')
    report = check_preservation(geometric, u, limit=True)
    assert report.equal
    assert report.mode == 'limit'

def test_detects_inequivalence():
    report = check_preservation(P('charge(1); produce 0'), P('produce 0'), depth=1)
    assert not report.equal
    assert not report.cost_equal
    assert (report.left.ec, report.right.ec) == (1, 0)

@settings(max_examples=200)
@given(strategies.data())
def test_normalize_preserves_semantics(data):
    t = data.draw(closed_programs(depth=4, fixes=True))
    u, steps = normalize(t, fuel=200)
    assert check_preservation(t, u, depth=5).equal
    assert replay(t, steps) == u

NONEXPANDING = [name for name in RULES if name != 'FixUnfold']

@settings(max_examples=200)
@given(strategies.data())
def test_every_rule_preserves_semantics(data):
    t = data.draw(closed_programs(depth=4, fixes=True))
    name = data.draw(strategies.sampled_from(NONEXPANDING))
    rule = RULES[name]
    for path, sub in S.positions(t):
        if rule.match(sub) is None:
            continue
        u = apply_rule(t, rule, path)
        assert check_preservation(t, u, depth=5).equal, (name, path)
