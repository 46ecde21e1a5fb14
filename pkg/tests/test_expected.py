from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies

import cert.syntax as S
import cert.corpus as corpus
from cert.dist import NatV, UNIT, numeric, SubDist
from cert.costdist import eval_cost, expected_of_marginal, value_marginal
from cert.expected import ( ECResult, eval_ec, analyze, eval_pre, check_factorization,
                            check_commutation, is_central_candidate, unit, bind, charge, mix )
from strategies import closed_programs, programs

TOL = Fraction(1, 10**4)

EXACT = [e.name for e in corpus.load() if e.support == 'all']

def test_charges():
    assert eval_ec(S.parse('charge(2); charge(3); produce ()'), 1).ec == 5

def test_monad_operations():
    m = mix([(Fraction(1, 2), charge(2)), (Fraction(1, 2), unit(NatV(1)))])
    assert m == ECResult(Fraction(1), SubDist({UNIT: Fraction(1, 2), NatV(1): Fraction(1, 2)}))
    assert bind(charge(3), lambda v: unit(NatV(0))) == ECResult(Fraction(3), SubDist.point(NatV(0)))

def test_geometric_at_depth_ten(geometric):
    r = eval_ec(geometric, 10)
    assert r.ec == Fraction(1023, 512)
    assert r.dist.mass() == Fraction(1023, 1024)

def test_charge_before_divergence_counts(program):
    assert eval_ec(program('charge_then_bottom'), 16).ec == 1
    assert eval_ec(program('bottom_then_charge'), 16).ec == 0
    r = eval_ec(program('diverge'), 16)
    assert r.ec == 0
    assert r.dist.mass() == 0

def test_analyze_geometric(geometric):
    report = analyze(geometric)
    assert report.converged
    assert 2 - TOL <= report.ec <= 2
    assert report.mass >= 1 - Fraction(1, 10**6)
    depths = [d for d, _, _ in report.history]
    assert depths == sorted(depths)
    assert depths[0] == 1

@pytest.mark.parametrize('name,expected', [
    ('geometric_charge', Fraction(2)),
    ('geometric_quarter', Fraction(4)),
    ('geometric_third', Fraction(3)),
    ('geometric_three_quarters', Fraction(4, 3)),
])
def test_analyze_biased_geometric(program, name, expected):
    report = analyze(program(name))
    assert report.converged
    assert abs(report.ec - expected) <= TOL

@pytest.mark.parametrize('n,expected', [(0, 0), (1, 2), (2, 6), (3, 14), (4, 30), (5, 62), (6, 126)])
def test_analyze_coin_tosses(program, n, expected):
    report = analyze(program('coin_tosses'), args=[S.NatLit(n)])
    assert report.converged
    assert abs(report.ec - expected) <= TOL

@pytest.mark.parametrize('n', range(11))
def test_analyze_qck_is_exact(program, n):
    report = analyze(program('qck_nat'), args=[S.NatLit(n)])
    assert report.converged
    assert report.ec == corpus.qck_cost(n)
    assert report.mass == 1

def test_qck_three(program):
    assert eval_ec(program('qck_nat'), 8, [S.NatLit(3)]).ec == Fraction(8, 3)

def test_analyze_stops_at_max_depth(program):
    report = analyze(program('random_walk'), max_depth=16, args=[S.NatLit(2), S.NatLit(1)])
    assert not report.converged
    assert report.depth == 16

def test_eval_pre():
    t = S.parse('charge(3); produce 7')
    assert eval_pre(t, None, 1) == 3
    assert eval_pre(t, lambda v: numeric(v), 1) == 10
    assert eval_pre(t, {NatV(7): 2}, 1) == 5

def capped_identity(depth):
    def reward(v):
        q = numeric(v)
        return min(q, depth) if q is not None else 0
    return reward

def rewards(r, depth):
    yield None
    if not r.dist.is_empty():
        likely, _ = max(r.dist.items(), key=lambda item: item[1])
        yield {likely: 1}
    yield capped_identity(depth)

@pytest.mark.parametrize('depth', [4, 8, 16])
@pytest.mark.parametrize('name', EXACT)
def test_factorization(entries, program, name, depth):
    entry = entries[name]
    t = program(name)
    r = eval_ec(t, depth, entry.args)
    for reward in rewards(r, depth):
        f = check_factorization(t, reward, depth, entry.args)
        assert f.equal, (name, depth, f.discrepancy)
        assert f.discrepancy == 0

@pytest.mark.parametrize('depth', [4, 8, 16])
@pytest.mark.parametrize('name', EXACT)
def test_soundness_on_corpus(entries, program, name, depth):
    entry = entries[name]
    t = program(name)
    d = eval_cost(t, depth, entry.args)
    r = eval_ec(t, depth, entry.args)
    assert expected_of_marginal(d) <= r.ec
    assert value_marginal(d) == r.dist

@settings(max_examples=500)
@given(strategies.data())
def test_recursion_free_equality(data):
    t = data.draw(closed_programs())
    d = eval_cost(t, 0)
    r = eval_ec(t, 0)
    assert expected_of_marginal(d) == r.ec
    assert value_marginal(d) == r.dist

@settings(max_examples=200)
@given(strategies.data())
def test_soundness_with_recursion(data):
    t = data.draw(closed_programs(fixes=True))
    depth = data.draw(strategies.integers(0, 6))
    d = eval_cost(t, depth)
    r = eval_ec(t, depth)
    assert expected_of_marginal(d) <= r.ec
    assert d.mass() == r.dist.mass()

def test_commutation_counterexample():
    t = S.parse('charge(1); produce ()')
    u = S.parse('fix z : F unit . force z')
    k = S.parse('produce 0')
    c = check_commutation(t, u, k, 8)
    assert c.cost_equal
    assert not c.ec_equal
    assert (c.left.ec, c.right.ec) == (1, 0)
    assert c.left.dist.is_empty() and c.right.dist.is_empty()

@settings(max_examples=200)
@given(strategies.data())
def test_cost_semantics_commutes(data):
    t = data.draw(closed_programs(depth=2, fixes=True))
    u = data.draw(closed_programs(depth=2, fixes=True))
    k = data.draw(programs(depth=2, env=('a', 'b')))
    assert check_commutation(t, u, k, 5, x='a', y='b').cost_equal

@settings(max_examples=200)
@given(strategies.data())
def test_central_terms_commute(data):
    t = data.draw(closed_programs(depth=2, fixes=True))
    u = data.draw(closed_programs(depth=2, charges=False))
    k = data.draw(programs(depth=2, env=('a', 'b')))
    assert is_central_candidate(u, 5)
    c = check_commutation(t, u, k, 5, x='a', y='b')
    assert c.cost_equal and c.ec_equal

def test_charging_term_is_not_central():
    assert not is_central_candidate(S.parse('charge(1); produce 0'), 4)
    assert is_central_candidate(S.parse('rand 3'), 4)
