#
# Copyright (C) 2026   Free Software Foundation, Inc.
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

# Drift channels. Cells storing 0 sit near level 0 and cells storing 1 near
# level 1; as time t passes the distribution of the 1 cells moves. Two
# models are supported:
#
#   mean_drift       zeros ~ N(0, sigma), ones ~ N(1 - t, sigma)
#   variance_growth  zeros ~ N(0, sigma), ones ~ N(1, sigma + t)
#
# Also the binary symmetric and erasure channels used by the code
# experiments, and the seeded generator every simulation draws from.

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import ndtr

from balmodlib.core import BitWord
from balmodlib.thresholding import CellLevelVector


MODELS = ('mean_drift', 'variance_growth')

# An erased position in a word read from the erasure channel
ERASED = -1


def make_rng(seed, *stream):
    """Counter based generator for one (seed, stream...) lineage."""
    key = [int(seed)] + [int(s) for s in stream]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return make_rng(seed)


@dataclass(frozen=True)
class DriftModel:
    kind: str
    sigma: float

    def __post_init__(self):
        if self.kind not in MODELS:
            raise ValueError("unknown drift model %r, expected one of %s" % (self.kind, ', '.join(MODELS)))
        if not self.sigma > 0:
            raise ValueError("sigma must be positive, got %r" % self.sigma)

    def zero_params(self, t):
        return 0.0, self.sigma

    def one_params(self, t):
        if t < 0:
            raise ValueError("time must be non-negative, got %r" % t)
        if self.kind == 'mean_drift':
            return 1.0 - t, self.sigma
        return 1.0, self.sigma + t


@dataclass(frozen=True)
class AgedBlock:
    """A stored word and the cell levels it has drifted to at time t."""
    truth: BitWord
    levels: CellLevelVector
    t: float

    def __post_init__(self):
        if len(self.truth) != len(self.levels):
            raise ValueError("block has %d bits but %d levels" % (len(self.truth), len(self.levels)))


def random_balanced_word(n, rng):
    """A uniformly chosen balanced word of length n."""
    if n % 2 != 0:
        raise ValueError("balanced words need an even length, got %d" % n)
    bits = np.zeros(n, dtype=np.uint8)
    bits[: n // 2] = 1
    return BitWord(_rng(rng).permutation(bits))


def sample_levels(x, model, t, seed):
    """Program x and let it age to time t."""
    x = BitWord(x)
    u0, s0 = model.zero_params(t)
    u1, s1 = model.one_params(t)
    rng = _rng(seed)
    noise = rng.standard_normal(len(x))
    ones = x.bits == 1
    levels = np.where(ones, u1 + s1 * noise, u0 + s0 * noise)
    return AgedBlock(x, CellLevelVector(levels), float(t))


def analytic_ber_mean_drift(v, t, sigma):
    return 0.5 * ndtr(-v / sigma) + 0.5 * ndtr(-(1.0 - t - v) / sigma)


def analytic_ber_variance_growth(v, t, sigma):
    return 0.5 * ndtr(-v / sigma) + 0.5 * ndtr(-(1.0 - v) / (sigma + t))


def analytic_ber(model, v, t):
    """Bit error rate of a read at threshold v, for either model."""
    if math.isinf(v):
        return 0.5
    if model.kind == 'mean_drift':
        return float(analytic_ber_mean_drift(v, t, model.sigma))
    return float(analytic_ber_variance_growth(v, t, model.sigma))


def _log_density_gap(v, sigma, spread):
    # log g(v) - log h(v) for zeros ~ N(0, sigma), ones ~ N(1, spread)
    return (-v * v / (2 * sigma * sigma) - math.log(sigma)
            + (1 - v) ** 2 / (2 * spread * spread) + math.log(spread))


def _variance_growth_optimum(model, t, points=1001):
    sigma = model.sigma
    spread = sigma + t
    grid = np.linspace(0.0, 1.0, points)
    gaps = [_log_density_gap(v, sigma, spread) for v in grid]
    candidates = [-math.inf, math.inf]
    for lo, hi, glo, ghi in zip(grid[:-1], grid[1:], gaps[:-1], gaps[1:]):
        if glo == 0.0:
            candidates.append(float(lo))
        elif glo * ghi < 0:
            root = optimize.bisect(_log_density_gap, lo, hi, args=(sigma, spread), xtol=1e-14)
            candidates.append(root)
    best = min(candidates, key=lambda v: analytic_ber(model, v, t))
    logging.debug("optimal threshold t=%r: %d candidates, chose %r" % (t, len(candidates), best))
    return best


def model_thresholds(model, t):
    """Population (balancing, optimal, fixed) thresholds at time t."""
    if t < 0:
        raise ValueError("time must be non-negative, got %r" % t)
    fixed = 0.5
    if model.kind == 'mean_drift':
        balancing = (1.0 - t) / 2.0
        return balancing, balancing, fixed
    balancing = 1.0 / (2.0 + t / model.sigma)
    return balancing, _variance_growth_optimum(model, t), fixed


def _check_probability(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1], got %r" % p)


def apply_bsc(x, p, seed):
    """Flip every bit independently with probability p."""
    _check_probability(p)
    x = BitWord(x)
    flips = _rng(seed).random(len(x)) < p
    return BitWord(x.bits ^ flips.astype(np.uint8))


def apply_bec(x, p, seed):
    """Erase every bit independently with probability p; erased bits are ERASED."""
    _check_probability(p)
    x = BitWord(x)
    erased = _rng(seed).random(len(x)) < p
    y = x.bits.astype(np.int8)
    y[erased] = ERASED
    return y


def bsc_llr(y, p):
    """Hard decision LLRs, positive for 0. Erased positions get 0."""
    if not 0.0 < p < 0.5:
        raise ValueError("crossover probability must lie in (0, 1/2), got %r" % p)
    y = np.asarray(y, dtype=np.int8)
    mag = math.log((1.0 - p) / p)
    llr = np.where(y == 0, mag, -mag).astype(np.float64)
    llr[y == ERASED] = 0.0
    return llr
