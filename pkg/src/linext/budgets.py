"""A priori budget formulas for random bits and poset comparisons.

These are the analytic upper bounds the samplers are benchmarked against:
per-sample bounds on the expected work of one perfect draw at beta = n, and
two variants of the total budget of a full two-phase estimate (the second is
the as-printed restatement that multiplies where the schedule divides; both
are surfaced for side-by-side comparison).
"""

from __future__ import annotations

import math


def sample_steps_bound(n: int) -> float:
    """Bound on the expected chain steps of one perfect draw: 4.3 n^3 ln n."""
    if n < 2:
        return 0.0
    return 4.3 * n ** 3 * math.log(n)


def sample_bits_bound(n: int) -> float:
    """Bound on expected random bits per perfect draw:
    4.3 n^3 (ln n) (ceil(log2 n) + 3)."""
    if n < 2:
        return 0.0
    return 4.3 * n ** 3 * math.log(n) * (math.ceil(math.log2(n)) + 3)


def sample_comparisons_bound(n: int) -> float:
    """Bound on expected poset comparisons per perfect draw: 8.6 n^3 ln n."""
    if n < 2:
        return 0.0
    return 8.6 * n ** 3 * math.log(n)


def _phase_samples(a: float, epsilon: float, delta: float) -> tuple[float, float]:
    ep = math.log1p(epsilon)
    pilot = 2.0 * (a + 1.0) * math.log(2.0 / delta)
    main = (a + 1.0) * (a + 3.0 * math.sqrt(2.0 * a) + 2.0) * math.log(4.0 / delta)
    return pilot, main / (ep * ep - ep ** 3)


def total_bits_bound(n: int, a: float, epsilon: float, delta: float) -> float:
    """Schedule-consistent bound on total expected bits of a two-phase
    estimate with true log-count a: per-sample bits times expected samples
    (pilot plus sized main phase, the latter divided by e'^2 - e'^3)."""
    pilot, main = _phase_samples(a, epsilon, delta)
    return sample_bits_bound(n) * (pilot + 2.0 * main)


def total_bits_bound_as_printed(n: int, a: float, epsilon: float, delta: float) -> float:
    """The restated total-budget expression taken literally: no factor 2 on
    the main phase and (e'^2 - e'^3) as a multiplier rather than a divisor."""
    ep = math.log1p(epsilon)
    pilot = 2.0 * (a + 1.0) * math.log(2.0 / delta)
    main = (a + 1.0) * (a + 3.0 * math.sqrt(2.0 * a) + 2.0) \
        * (ep * ep - ep ** 3) * math.log(4.0 / delta)
    return sample_bits_bound(n) * (pilot + main)
