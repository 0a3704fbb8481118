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

# Soft reads. The levels of a balanced block form a two component mixture
# with equal weights, so EM can learn both components from the block alone
# and hand the decoder a log-likelihood ratio per cell.

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from balmodlib.thresholding import CellLevelVector


VARIANCE_FLOOR = 1e-9
WEIGHT_FLOOR = 1e-9


class ComponentCollapse(ValueError):
    """A mixture component lost (almost) all of its cells."""


@dataclass(frozen=True)
class MixtureParams:
    u0: float
    sigma0: float
    u1: float
    sigma1: float

    def __post_init__(self):
        if not (self.sigma0 > 0 and self.sigma1 > 0):
            raise ValueError("standard deviations must be positive, got %r and %r"
                             % (self.sigma0, self.sigma1))

    def sorted(self):
        """The same mixture with the labels ordered so u0 <= u1."""
        if self.u0 <= self.u1:
            return self
        return MixtureParams(self.u1, self.sigma1, self.u0, self.sigma0)


@dataclass(frozen=True)
class Responsibilities:
    """P(x_i = 0 | c_i) and P(x_i = 1 | c_i) for every cell."""
    p0: np.ndarray
    p1: np.ndarray


def _levels(c):
    return CellLevelVector(c).levels


def _log_densities(levels, params):
    l0 = norm.logpdf(levels, loc=params.u0, scale=params.sigma0)
    l1 = norm.logpdf(levels, loc=params.u1, scale=params.sigma1)
    return l0, l1


def default_init(c):
    """Means of the lowest and highest quartiles, pooled spread."""
    levels = np.sort(_levels(c))
    n = levels.size
    if n < 2:
        raise ValueError("need at least two cells to start EM, got %d" % n)
    quarter = max(1, n // 4)
    low = levels[:quarter]
    high = levels[n - quarter:]
    u0 = float(low.mean())
    u1 = float(high.mean())
    pooled = math.sqrt((low.var() + high.var()) / 2.0)
    if pooled <= 0:
        pooled = max(float(levels.std()), math.sqrt(VARIANCE_FLOOR))
    return MixtureParams(u0, pooled, u1, pooled)


def e_step(c, params):
    levels = _levels(c)
    l0, l1 = _log_densities(levels, params)
    total = np.logaddexp(l0, l1)
    return Responsibilities(np.exp(l0 - total), np.exp(l1 - total))


def _component(levels, weights, label):
    total = float(weights.sum())
    if total < WEIGHT_FLOOR:
        logging.error("EM component %d collapsed (total responsibility %r)" % (label, total))
        raise ComponentCollapse("component %d has total responsibility %r" % (label, total))
    mean = float(np.dot(weights, levels) / total)
    var = float(np.dot(weights, (levels - mean) ** 2) / total)
    return mean, math.sqrt(max(var, VARIANCE_FLOOR))


def m_step(c, r):
    levels = _levels(c)
    u0, sigma0 = _component(levels, np.asarray(r.p0, dtype=np.float64), 0)
    u1, sigma1 = _component(levels, np.asarray(r.p1, dtype=np.float64), 1)
    return MixtureParams(u0, sigma0, u1, sigma1)


def log_likelihood(c, params):
    """Log-likelihood of the block under the equal weight mixture."""
    levels = _levels(c)
    l0, l1 = _log_densities(levels, params)
    return float(np.sum(np.logaddexp(l0, l1)) - levels.size * math.log(2.0))


def fit(c, init=None, max_iter=200, tol=1e-9, history=None):
    """Alternate E and M steps until the mean log-likelihood gains less than tol.

    If history is a list, the log-likelihood after each iteration is
    appended to it, starting with the value at init.
    """
    levels = _levels(c)
    params = init if init is not None else default_init(levels)
    current = log_likelihood(levels, params)
    if history is not None:
        history.append(current)
    for iteration in range(max_iter):
        params = m_step(levels, e_step(levels, params))
        previous, current = current, log_likelihood(levels, params)
        if history is not None:
            history.append(current)
        if (current - previous) / levels.size < tol:
            logging.debug("EM converged after %d iterations" % (iteration + 1))
            break
    return params.sorted()


def per_cell_llr(c, params):
    """log f(c_i | 0) - log f(c_i | 1); positive values favour 0."""
    l0, l1 = _log_densities(_levels(c), params)
    return l0 - l1


def soft_llr(c, max_iter=200, tol=1e-9):
    """Fit the block and return its per-cell LLRs."""
    params = fit(c, max_iter=max_iter, tol=tol)
    logging.debug("soft read fit: %r" % (params,))
    return per_cell_llr(c, params)
