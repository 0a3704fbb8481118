#!/usr/bin/python3
#
#   Copyright (C) 2026   Free Software Foundation, Inc.
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# Foundation, Inc., 51 Franklin St, Fifth Floor, Boston, MA  02110-1301  USA
#

import os
import sys
import math
sys.path.append(os.path.dirname(os.path.abspath(__file__)) + '/..')

import numpy as np
import pytest

from balmodlib import dejagnu
from balmodlib.channel import (ERASED, DriftModel, analytic_ber, analytic_ber_mean_drift,
                               analytic_ber_variance_growth, apply_bec, apply_bsc, bsc_llr,
                               make_rng, model_thresholds, random_balanced_word, sample_levels)
from balmodlib.core import BitWord
from balmodlib.thresholding import (balancing_threshold_exact, bit_error_rate,
                                    optimal_threshold_oracle, read_with_threshold)

dj = dejagnu.dejagnu()

T_GRID = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]


def phi(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def test_drift_model():
    with pytest.raises(ValueError):
        DriftModel('mean_drift', 0.0)
    with pytest.raises(ValueError):
        DriftModel('retention', 0.1)


def test_sample_levels():
    n = 100000
    zeros = sample_levels(np.zeros(n, dtype=np.uint8), DriftModel('mean_drift', 0.2), 0.3, 1)
    mean = zeros.levels.levels.mean()
    assert dj.istrue(abs(mean) < 5 * 0.2 / math.sqrt(n), "zeros do not drift")
    ones = sample_levels(np.ones(n, dtype=np.uint8), DriftModel('mean_drift', 0.1), 0.4, 2)
    assert dj.close(ones.levels.levels.mean(), 0.6, 5 * 0.1 / math.sqrt(n), "ones drift to 1 - t")
    x = random_balanced_word(64, make_rng(3))
    a = sample_levels(x, DriftModel('variance_growth', 0.1), 0.2, 9)
    b = sample_levels(x, DriftModel('variance_growth', 0.1), 0.2, 9)
    assert dj.istrue(np.array_equal(a.levels.levels, b.levels.levels), "same seed, same block")
    assert dj.equals(a.truth, x, "block keeps the stored word")


def test_make_rng():
    a = make_rng(1, 2, 3).random(4)
    b = make_rng(1, 2, 3).random(4)
    c = make_rng(1, 2, 4).random(4)
    assert dj.istrue(np.array_equal(a, b), "same stream")
    assert dj.istrue(not np.array_equal(a, c), "different stream")


def test_analytic_mean_drift():
    assert dj.close(analytic_ber_mean_drift(0.5, 0.0, 0.2), phi(-2.5), 1e-14, "t=0 at 1/2")
    assert dj.close(analytic_ber_mean_drift(0.5, 0.0, 0.2), 6.21e-3, 1e-5, "about 6.21e-3")
    for v in (0.1, 0.3, 0.55):
        assert dj.close(analytic_ber_mean_drift(v, 0.2, 0.15), analytic_ber_mean_drift(0.8 - v, 0.2, 0.15),
                        1e-12, "symmetric about (1 - t)/2, v=%r" % v)
    assert dj.istrue(analytic_ber_mean_drift(0.4, 0.1, 1e-3) < 1e-100, "no errors without noise")


def test_analytic_variance_growth():
    assert dj.close(analytic_ber_variance_growth(0.5, 0.0, 0.25), phi(-2.0), 1e-14, "Phi(-2)")
    assert dj.close(analytic_ber_variance_growth(0.5, 0.0, 0.25), 2.275e-2, 1e-5, "about 2.275e-2")
    assert dj.close(analytic_ber_variance_growth(0.5, 0.25, 0.25), 0.5 * phi(-2.0) + 0.5 * phi(-1.0),
                    1e-14, "t=0.25")
    assert dj.close(analytic_ber_variance_growth(0.5, 0.25, 0.25), 9.07e-2, 1e-4, "about 9.07e-2")
    rates = [analytic_ber_variance_growth(0.4, t, 0.2) for t in T_GRID]
    assert dj.istrue(all(a < b for a, b in zip(rates, rates[1:])), "grows with t")


def test_model_thresholds():
    vb, vo, vf = model_thresholds(DriftModel('mean_drift', 0.2), 0.3)
    assert dj.close(vb, 0.35, 1e-15, "mean drift vb")
    assert dj.close(vo, 0.35, 1e-15, "mean drift vo")
    assert dj.equals(vf, 0.5, "fixed threshold")
    vb, vo, vf = model_thresholds(DriftModel('variance_growth', 0.2), 0.0)
    assert dj.close(vb, 0.5, 1e-15, "variance growth at t=0")
    sigma, t = 0.2, 0.2
    vb, vo, vf = model_thresholds(DriftModel('variance_growth', sigma), t)
    assert dj.close(vb, 1.0 / 3.0, 1e-15, "variance growth vb")
    lhs = math.exp(-vo * vo / (2 * sigma * sigma))
    rhs = sigma / (sigma + t) * math.exp(-(1 - vo) ** 2 / (2 * (sigma + t) ** 2))
    assert dj.close(lhs, rhs, 1e-10, "optimal threshold equalizes the densities")
    model = DriftModel('variance_growth', sigma)
    for v in np.linspace(0.05, 0.95, 19):
        assert analytic_ber(model, vo, t) <= analytic_ber(model, v, t) + 1e-15


def test_bsc():
    x = random_balanced_word(1000, make_rng(4))
    assert dj.equals(apply_bsc(x, 0.0, 1), x, "p=0 is the identity")
    assert dj.matches(apply_bsc(x, 1.0, 1), BitWord(1 - x.bits), "p=1 complements")
    n, p = 1000000, 0.03
    y = apply_bsc(np.zeros(n, dtype=np.uint8), p, 5)
    assert dj.close(y.weight / n, p, 4 * math.sqrt(p * (1 - p) / n), "flip rate")
    assert dj.equals(apply_bsc(x, 0.2, 6), apply_bsc(x, 0.2, 6), "same seed, same flips")


def test_bec():
    x = random_balanced_word(1000, make_rng(4))
    y = apply_bec(x, 0.0, 1)
    assert dj.istrue(np.array_equal(y, x.bits), "p=0 keeps every bit")
    assert dj.istrue(np.all(apply_bec(x, 1.0, 1) == ERASED), "p=1 erases every bit")
    n, p = 1000000, 0.35
    y = apply_bec(np.zeros(n, dtype=np.uint8), p, 7)
    rate = np.count_nonzero(y == ERASED) / n
    assert dj.close(rate, p, 4 * math.sqrt(p * (1 - p) / n), "erasure rate")


def test_bsc_llr():
    llr = bsc_llr([0, 1, ERASED], 0.1)
    assert dj.close(llr[0], math.log(9.0), 1e-12, "0 read")
    assert dj.close(llr[1], -math.log(9.0), 1e-12, "1 read")
    assert dj.equals(llr[2], 0.0, "erased")


@pytest.mark.parametrize("kind,sigma", [('mean_drift', 0.2), ('variance_growth', 0.1)])
def test_empirical_ber_matches_analytic(kind, sigma):
    model = DriftModel(kind, sigma)
    n = 10000
    for point, t in enumerate(T_GRID):
        vb, vo, vf = model_thresholds(model, t)
        rng = make_rng(21, point)
        x = random_balanced_word(n, rng)
        block = sample_levels(x, model, t, rng)
        ber = bit_error_rate(x, read_with_threshold(block.levels, vb))
        expected = analytic_ber(model, vb, t)
        se = math.sqrt(expected * (1 - expected) / n)
        assert dj.close(ber, expected, 3 * se, "%s t=%r" % (kind, t))


def test_mean_drift_ordering():
    model = DriftModel('mean_drift', 0.2)
    n = 10000
    for point, t in enumerate(T_GRID[1:]):
        balanced, fixed = 0, 0
        for trial in range(10):
            rng = make_rng(22, point, trial)
            x = random_balanced_word(n, rng)
            block = sample_levels(x, model, t, rng)
            vb = balancing_threshold_exact(block.levels)[0]
            balanced += bit_error_rate(x, read_with_threshold(block.levels, vb))
            fixed += bit_error_rate(x, read_with_threshold(block.levels, 0.5))
        assert dj.istrue(balanced <= fixed, "balancing beats fixed at t=%r" % t)


def test_variance_growth_ordering():
    model = DriftModel('variance_growth', 0.1)
    n = 10000
    for point, t in enumerate(T_GRID[1:]):
        optimal, balanced, fixed = 0, 0, 0
        for trial in range(10):
            rng = make_rng(23, point, trial)
            x = random_balanced_word(n, rng)
            block = sample_levels(x, model, t, rng)
            vb = balancing_threshold_exact(block.levels)[0]
            optimal += optimal_threshold_oracle(block.levels, x)[1].total / n
            balanced += bit_error_rate(x, read_with_threshold(block.levels, vb))
            fixed += bit_error_rate(x, read_with_threshold(block.levels, 0.5))
        assert dj.istrue(optimal <= balanced <= fixed, "optimal, balancing, fixed at t=%r" % t)


if __name__ == '__main__':
    dj.verbose_level(2)
    for name, test in list(globals().items()):
        if name.startswith('test_') and callable(test):
            if name == 'test_empirical_ber_matches_analytic':
                test('mean_drift', 0.2)
                test('variance_growth', 0.1)
            else:
                test()
    dj.totals()
