import math
from fractions import Fraction

import numpy as np
import pytest

import cert.syntax as S
from cert.dist import NatV
from cert.exceptions import CertArithmeticError, CertTypeError, StuckTerm
from cert.sampler import ( RngState, run_once, result_value, estimate, estimate_parallel,
                           frequency_table, partition, BatchStats, TERMINATED, EXHAUSTED )

FUEL = 10000

def test_charge_then_produce():
    outcome = run_once(S.parse('charge(2); produce 0'), 10, RngState(0))
    assert outcome.status == TERMINATED
    assert outcome.cost == 2
    assert outcome.terminal == S.Produce(S.NatLit(0))
    assert result_value(outcome) == NatV(0)

def test_produce_needs_no_fuel():
    outcome = run_once(S.parse('produce 3'), 0, RngState(0))
    assert outcome.status == TERMINATED
    assert outcome.cost == 0

def test_bind_at_zero_fuel_is_exhausted():
    outcome = run_once(S.parse('charge(1); produce 0'), 0, RngState(0))
    assert outcome.status == EXHAUSTED
    assert outcome.terminal is None

def test_lambda_is_terminal():
    t = S.parse('\\x : nat . produce x')
    outcome = run_once(t, 5, RngState(0))
    assert outcome.status == TERMINATED
    assert outcome.terminal == t
    assert result_value(outcome) is None

def test_geometric_at_fuel_one(program):
    t = program('geometric')
    statuses = set()
    for seed in range(100):
        outcome = run_once(t, 1, RngState(seed))
        statuses.add(outcome.status)
        if outcome.status == TERMINATED:
            assert result_value(outcome) == NatV(0)
    assert statuses == {TERMINATED, EXHAUSTED}

def test_diverge_always_exhausts(diverge):
    result = estimate(diverge, 200, 50, seed=0)
    assert result.terminated == 0
    assert result.exhausted == 200
    assert math.isnan(result.mean)
    assert result.exhaustion_rate == 1.0

def test_constant_charge_is_exact():
    result = estimate(S.parse('charge(5); produce ()'), 100, 10)
    assert result.mean == 5.0
    assert result.stddev == 0.0
    assert result.exhausted == 0

def test_arguments(program):
    result = estimate(program('factorial'), 50, FUEL, args=[S.NatLit(5)])
    assert result.mean == 5.0
    assert result.value_mean == 120.0

def test_geometric_mean(geometric):
    result = estimate(geometric, 20000, FUEL, seed=0)
    assert result.exhausted == 0
    assert abs(result.mean - 2.0) <= 4 * result.stderr
    lo, hi = result.interval()
    assert lo < result.mean < hi

def test_uniform_value_mean(program):
    result = estimate(program('uniform_mean'), 5000, 100, seed=1)
    assert result.mean == 0.0
    assert result.value_mean == pytest.approx(0.5, abs=0.03)

def test_same_seed_replays(geometric):
    a = [run_once(geometric, FUEL, RngState(3)) for _ in range(3)]
    b = [run_once(geometric, FUEL, RngState(3)) for _ in range(3)]
    assert a == b
    assert estimate(geometric, 500, FUEL, seed=9) == estimate(geometric, 500, FUEL, seed=9)

def test_more_fuel_keeps_finished_runs(geometric):
    for seed in range(50):
        low = run_once(geometric, 8, RngState(seed))
        high = run_once(geometric, 800, RngState(seed))
        if low.status == TERMINATED:
            assert (high.status, high.cost, high.terminal) == (low.status, low.cost, low.terminal)

def test_cost_prefix_adds(geometric):
    prefixed = S.seq(S.Charge(S.CostLit(3)), geometric)
    for seed in range(20):
        a = run_once(geometric, FUEL, RngState(seed))
        b = run_once(prefixed, FUEL, RngState(seed))
        assert b.cost == a.cost + 3

def test_rand_zero():
    with pytest.raises(CertArithmeticError):
        run_once(S.parse('rand 0'), 10, RngState(0))

def test_estimate_checks_types():
    with pytest.raises(CertTypeError):
        estimate(S.parse('(produce 0) 1'), 10, 10)

def test_estimate_needs_returner(program):
    with pytest.raises(StuckTerm):
        estimate(program('factorial'), 10, 10)

def test_negative_fuel():
    with pytest.raises(ValueError):
        run_once(S.parse('produce 0'), -1, RngState(0))

def test_rng_draws_are_dyadic():
    rng = RngState(5)
    for _ in range(100):
        u = rng.uniform()
        assert 0 <= u < 1
        assert (2**53) % u.denominator == 0
    assert rng.position == 100
    assert all(0 <= rng.below(3) < 3 for _ in range(50))
    assert not rng.coin(Fraction(0))
    assert rng.coin(Fraction(1))

def test_single_seed_parallel_matches_sequential(geometric):
    a = estimate(geometric, 1000, FUEL, seed=7)
    b = estimate_parallel(geometric, 1000, FUEL, seeds=[7])
    assert a == b

def test_parallel_seeds(geometric):
    result = estimate_parallel(geometric, 3000, FUEL, seeds=[1, 2, 3])
    assert result.samples == 3000
    assert result.seed == (1, 2, 3)
    assert abs(result.mean - 2.0) <= 4 * result.stderr

def test_parallel_workers(geometric):
    a = estimate_parallel(geometric, 600, FUEL, seeds=[1, 2], workers=1)
    b = estimate_parallel(geometric, 600, FUEL, seeds=[1, 2], workers=2)
    assert a.mean == pytest.approx(b.mean)
    assert a.terminated == b.terminated

def test_parallel_rejects_repeated_seeds(geometric):
    with pytest.raises(ValueError):
        estimate_parallel(geometric, 100, FUEL, seeds=[1, 1])

def test_partition():
    assert partition(10, 3) == [4, 3, 3]
    assert sum(partition(7, 7)) == 7

def test_merge_matches_pooled():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 20, size=137).tolist()
    b = rng.integers(0, 20, size=58).tolist()
    merged = BatchStats.of(a, 2).merge(BatchStats.of(b, 1))
    pooled = BatchStats.of(a + b, 3)
    assert merged.count == pooled.count
    assert merged.exhausted == 3
    assert merged.mean == pytest.approx(pooled.mean)
    assert merged.m2 == pytest.approx(pooled.m2)

def test_merge_with_empty_batch():
    a = BatchStats.of([1, 2, 3])
    empty = BatchStats.of([])
    assert a.merge(empty).mean == pytest.approx(a.mean)
    assert empty.merge(a).m2 == pytest.approx(a.m2)

def test_frequency_table():
    t = S.parse('choose 1/2 { charge(1); produce 0 } { produce 2 }')
    counts, exhausted = frequency_table(t, 1000, 10, seed=0)
    assert exhausted == 0
    assert set(counts) == {(1, NatV(0)), (0, NatV(2))}
    assert sum(counts.values()) == 1000
