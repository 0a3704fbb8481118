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

# Read thresholds. A cell reads as 1 when its level is at or above the
# threshold. The balancing threshold is the one that makes the read word
# balanced; when the stored word is balanced too, it never makes more than
# twice the errors of the best threshold in hindsight.

import logging
from dataclasses import dataclass

import numpy as np

from balmodlib.core import BitWord


FIXED_THRESHOLD = 0.5


class CellLevelVector(object):
    """Real valued levels of the cells in one block."""
    __slots__ = ('levels',)

    def __init__(self, levels):
        if isinstance(levels, CellLevelVector):
            levels = levels.levels
        arr = np.array(levels, dtype=np.float64).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("cell levels must be finite")
        arr.flags.writeable = False
        self.levels = arr

    def __len__(self):
        return int(self.levels.size)

    def __getitem__(self, index):
        return self.levels[index]

    def __repr__(self):
        return "CellLevelVector(%r)" % self.levels.tolist()


@dataclass(frozen=True)
class ErrorCounts:
    """1->0 and 0->1 error counts of a read."""
    n10: int
    n01: int

    @property
    def total(self):
        return self.n10 + self.n01


def _levels(c):
    if isinstance(c, CellLevelVector):
        return c.levels
    return CellLevelVector(c).levels


def _weight_at(levels, v):
    return int(np.count_nonzero(levels >= v))


def _midpoint(lo, hi):
    """A threshold strictly above lo and at most hi."""
    v = (lo + hi) / 2.0
    if v <= lo:
        v = hi
    return v


def read_with_threshold(c, v):
    """Bit i is 1 iff level i >= v."""
    return BitWord((_levels(c) >= v).astype(np.uint8))


def error_counts(x, y):
    x = BitWord(x).bits
    y = BitWord(y).bits
    if x.size != y.size:
        raise ValueError("length mismatch: stored %d, read %d" % (x.size, y.size))
    n10 = int(np.count_nonzero((x == 1) & (y == 0)))
    n01 = int(np.count_nonzero((x == 0) & (y == 1)))
    return ErrorCounts(n10, n01)


def bit_error_rate(x, y):
    counts = error_counts(x, y)
    return counts.total / float(len(BitWord(x)))


def balancing_threshold_exact(c):
    """Threshold splitting the block into n/2 high and n/2 low cells.

    Returns (threshold, balanced). When equal levels straddle the median the
    split is impossible; the threshold closest to balance is returned with
    balanced=False.
    """
    levels = _levels(c)
    n = levels.size
    if n % 2 != 0:
        raise ValueError("balancing needs an even number of cells, got %d" % n)
    ordered = np.sort(levels)[::-1]
    half = n // 2
    hi = ordered[half - 1]
    lo = ordered[half]
    if hi > lo:
        return float(_midpoint(lo, hi)), True

    # Ties across the median, take the closest candidate cut.
    distinct = np.unique(levels)
    candidates = [distinct[0]]
    candidates += [_midpoint(a, b) for a, b in zip(distinct[:-1], distinct[1:])]
    candidates.append(np.nextafter(distinct[-1], np.inf))
    best = min(candidates, key=lambda v: (abs(_weight_at(levels, v) - half), v))
    logging.warning("balancing threshold: ties at the median, weight %d instead of %d"
                    % (_weight_at(levels, best), half))
    return float(best), False


def balancing_threshold_bisect(c, lo=0.0, hi=1.0, eps=1e-9):
    """Half-interval search for a balancing threshold inside [lo, hi]."""
    if not lo < hi:
        raise ValueError("empty search interval [%r, %r]" % (lo, hi))
    if eps <= 0:
        raise ValueError("eps must be positive, got %r" % eps)
    levels = _levels(c)
    target = levels.size // 2
    while hi - lo > eps:
        mid = (lo + hi) / 2.0
        w = _weight_at(levels, mid)
        if w == target:
            return mid
        if w > target:
            lo = mid
        else:
            hi = mid
    return min((lo, hi), key=lambda v: (abs(_weight_at(levels, v) - target), v))


def relaxed_threshold_mean(c):
    levels = _levels(c)
    if levels.size == 0:
        raise ValueError("no cells")
    return float(levels.mean())


def relaxed_threshold_second_order(c, a=0.0):
    """mean(c) + a (1/2 - mean(c))^2; a depends on the noise model."""
    mean = relaxed_threshold_mean(c)
    return mean + a * (0.5 - mean) ** 2


def optimal_threshold_oracle(c, x):
    """Threshold minimizing the errors against the stored word x.

    Only cuts between distinct sorted levels matter, plus -inf and +inf.
    Ties go to the lowest threshold.
    """
    levels = _levels(c)
    x = BitWord(x).bits
    n = levels.size
    if x.size != n:
        raise ValueError("length mismatch: %d levels, %d bits" % (n, x.size))
    order = np.argsort(levels, kind='stable')
    ordered = levels[order]
    ones_below = np.concatenate(([0], np.cumsum(x[order].astype(np.int64))))
    below = np.arange(n + 1)
    n10 = ones_below
    n01 = (n - int(x.sum())) - (below - ones_below)
    valid = np.ones(n + 1, dtype=bool)
    valid[1:n] = ordered[:-1] < ordered[1:]
    totals = np.where(valid, n10 + n01, n + 1)
    k = int(np.argmin(totals))
    if k == 0:
        v = -np.inf
    elif k == n:
        v = np.inf
    else:
        v = float(_midpoint(ordered[k - 1], ordered[k]))
    return v, ErrorCounts(int(n10[k]), int(n01[k]))


def threshold_report(c, x=None, a=0.0, lo=0.0, hi=1.0, eps=1e-9):
    """Threshold per strategy, for the CLI and the comparison experiment."""
    report = dict()
    report['fixed'] = FIXED_THRESHOLD
    report['balancing'] = balancing_threshold_exact(c)[0]
    report['bisect'] = balancing_threshold_bisect(c, lo, hi, eps)
    report['mean'] = relaxed_threshold_mean(c)
    report['second-order'] = relaxed_threshold_second_order(c, a)
    if x is not None:
        report['optimal'] = optimal_threshold_oracle(c, x)[0]
    return report
