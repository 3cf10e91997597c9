"""Seeded bit source: determinism, exact accounting, and distribution."""

import math
from collections import Counter

import pytest
from scipy.stats import chisquare

from linext import BitStream, LinextError, StepDraw


# -- next_bit ------------------------------------------------------------------

def test_next_bit_reproducible():
    a = BitStream(12345)
    b = BitStream(12345)
    assert [a.next_bit() for _ in range(64)] == [b.next_bit() for _ in range(64)]


def test_next_bit_counts():
    s = BitStream(1)
    for _ in range(1000):
        s.next_bit()
    assert s.bits_consumed == 1000


def test_next_bit_mean_band():
    s = BitStream(2)
    n = 100_000
    mean = sum(s.next_bit() for _ in range(n)) / n
    assert 0.49 <= mean <= 0.51


# -- uniform_int ---------------------------------------------------------------

def test_uniform_int_m1_free():
    s = BitStream(3)
    assert s.uniform_int(1) == 1
    assert s.bits_consumed == 0


def test_uniform_int_power_of_two_exact_cost():
    s = BitStream(4)
    for _ in range(100):
        before = s.bits_consumed
        v = s.uniform_int(4)
        assert 1 <= v <= 4
        assert s.bits_consumed - before == 2


def test_uniform_int_m3_distribution_and_cost():
    s = BitStream(5)
    n = 100_000
    counts = Counter()
    for _ in range(n):
        counts[s.uniform_int(3)] += 1
    mean_bits = s.bits_consumed / n
    assert mean_bits <= 3.7
    sigma = math.sqrt(n * (1 / 3) * (2 / 3))
    for v in (1, 2, 3):
        assert abs(counts[v] - n / 3) <= 3 * sigma


def test_uniform_int_expected_cost_within_bound():
    # entropy recycling keeps every m within ceil(log2 m) + 2 expected bits
    for m in (3, 5, 6, 9, 17, 100):
        s = BitStream(6, label=f"m{m}")
        n = 20_000
        for _ in range(n):
            s.uniform_int(m)
        assert s.bits_consumed / n <= math.ceil(math.log2(m)) + 2


def test_uniform_int_chi_square():
    s = BitStream(7)
    n = 100_000
    counts = Counter(s.uniform_int(6) for _ in range(n))
    _, p = chisquare([counts[v] for v in range(1, 7)])
    assert p >= 0.01


def test_uniform_int_rejects_bad_m():
    with pytest.raises(LinextError):
        BitStream(8).uniform_int(0)


# -- bernoulli -------------------------------------------------------------------

def test_bernoulli_degenerate_free():
    s = BitStream(9)
    assert s.bernoulli(1.0) == 1
    assert s.bernoulli(0.0) == 0
    assert s.bits_consumed == 0


def test_bernoulli_half_costs_one_bit():
    s = BitStream(10)
    for _ in range(200):
        before = s.bits_consumed
        s.bernoulli(0.5)
        assert s.bits_consumed - before == 1


def test_bernoulli_p03():
    s = BitStream(11)
    n = 100_000
    total = sum(s.bernoulli(0.3) for _ in range(n))
    sigma = math.sqrt(n * 0.3 * 0.7)
    assert abs(total - 0.3 * n) <= 3 * sigma
    assert s.bits_consumed / n <= 2.1


def test_bernoulli_dyadic_costs():
    # p = 0.25 = 0.01 in binary: decided within two bits
    s = BitStream(12)
    n = 10_000
    total = sum(s.bernoulli(0.25) for _ in range(n))
    assert s.bits_consumed <= 2 * n
    sigma = math.sqrt(n * 0.25 * 0.75)
    assert abs(total - 0.25 * n) <= 3 * sigma


def test_bernoulli_rejects_bad_p():
    with pytest.raises(LinextError):
        BitStream(13).bernoulli(1.5)


# -- fork -------------------------------------------------------------------------

def test_fork_is_deterministic():
    a = BitStream(99).fork("run/1")
    b = BitStream(99).fork("run/1")
    assert [a.next_bit() for _ in range(128)] == [b.next_bit() for _ in range(128)]


def test_fork_labels_differ():
    root = BitStream(99)
    a = root.fork("run/1")
    b = root.fork("run/2")
    assert [a.next_bit() for _ in range(128)] != [b.next_bit() for _ in range(128)]


def test_fork_duplicate_label_rejected():
    root = BitStream(99)
    root.fork("run/1")
    with pytest.raises(LinextError):
        root.fork("run/1")


def test_fork_counters_independent():
    root = BitStream(99)
    child = root.fork("child")
    child.next_bit()
    assert root.bits_consumed == 0
    assert child.bits_consumed == 1


# -- draw_step ----------------------------------------------------------------------

def test_draw_step_pen_one_skips_c2_bits():
    s = BitStream(14)
    d = s.draw_step(2, 1.0)
    assert d == StepDraw(1, d.c1, 1)
    assert s.bits_consumed == 1  # i over {1} is free; c1 costs one; c2 free


def test_draw_step_matches_component_draws():
    # eager composition: i, then c1 = bernoulli(1/2), then c2 = bernoulli(pen)
    a = BitStream(15)
    b = BitStream(15)
    for _ in range(200):
        d = a.draw_step(7, 0.3)
        expect = StepDraw(b.uniform_int(6), b.bernoulli(0.5), b.bernoulli(0.3))
        assert d == expect
    assert a.bits_consumed == b.bits_consumed


def test_transcript_replay_identical():
    s = BitStream(16)
    recorded = [s.draw_step(5, 0.7) for _ in range(50)]
    replayed = list(recorded)
    assert replayed == recorded
    s2 = BitStream(16)
    assert [s2.draw_step(5, 0.7) for _ in range(50)] == recorded


# -- uniform_real ----------------------------------------------------------------------

def test_uniform_real_range_and_tally():
    s = BitStream(17)
    values = [s.uniform_real() for _ in range(1000)]
    assert all(0.0 < v <= 1.0 for v in values)
    assert s.bits_continuous == 53 * 1000
    assert s.bits_consumed == 0  # continuous draws are tallied separately


def test_uniform_real_mean():
    s = BitStream(18)
    n = 50_000
    mean = sum(s.uniform_real() for _ in range(n)) / n
    assert abs(mean - 0.5) <= 3 * math.sqrt(1 / 12 / n)
