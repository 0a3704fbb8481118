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

# Balanced LDPC codes. A codeword z of a regular Gallager code is stored as
# x = z with its first i bits inverted, i the smallest index that balances
# it. The index is not stored, so decoders have to find it:
#
#   erasure channel    the inversion set, a union of intervals holding the
#                      values of i still consistent with the known bits,
#                      shrinks while peeling runs
#   symmetric channel  a cheap BP score of every shift picks a few
#                      candidates, each candidate gets a full BP decode

import bisect
import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import io, sparse

from balmodlib.channel import ERASED, make_rng
from balmodlib.core import BalancedWord, BitWord, find_balancing_index, invert_prefix


LLR_CLIP = 30.0
MAX_REDRAWS = 20
DEFAULT_BUDGET = 64

_TANH_CLIP = math.tanh(LLR_CLIP / 2.0)
# Every finite double is an integer multiple of 2**-1074
_SCALE = 1 << 1074


class InversionSet(object):
    """A union of disjoint half-open integer intervals, kept sorted."""
    __slots__ = ('intervals', '_starts')

    def __init__(self, intervals=()):
        merged = []
        for lo, hi in sorted((int(lo), int(hi)) for lo, hi in intervals):
            if lo >= hi:
                continue
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        self.intervals = tuple(merged)
        self._starts = [lo for lo, hi in merged]

    @classmethod
    def full(cls, n):
        """Every shift 0..n."""
        return cls([(0, n + 1)])

    @classmethod
    def single(cls, i):
        return cls([(i, i + 1)])

    def __contains__(self, i):
        k = bisect.bisect_right(self._starts, i) - 1
        return k >= 0 and i < self.intervals[k][1]

    def __len__(self):
        return sum(hi - lo for lo, hi in self.intervals)

    def __iter__(self):
        for lo, hi in self.intervals:
            yield from range(lo, hi)

    def __eq__(self, other):
        if not isinstance(other, InversionSet):
            return NotImplemented
        return self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __repr__(self):
        return "InversionSet(%r)" % (list(self.intervals),)

    def intersect(self, other):
        out = []
        a, b = 0, 0
        while a < len(self.intervals) and b < len(other.intervals):
            lo = max(self.intervals[a][0], other.intervals[b][0])
            hi = min(self.intervals[a][1], other.intervals[b][1])
            if lo < hi:
                out.append((lo, hi))
            if self.intervals[a][1] < other.intervals[b][1]:
                a += 1
            else:
                b += 1
        return InversionSet(out)

    def issubset(self, other):
        return self.intersect(other) == self

    def clip(self, n):
        """The members below n."""
        return self.intersect(InversionSet([(0, n)]))


def check_interval_sets(positions, values, n):
    """Shifts consistent with one fully known check.

    positions are the 0-based cells of the check, values the bits read
    there. A cell at position p is inverted by every shift i > p, so an even
    read parity leaves [0, p1+1) U [p2+1, p3+1) U ... and an odd one the
    complementary intervals, all inside [0, n].
    """
    values = [int(v) for v in values]
    if any(v == ERASED for v in values):
        raise ValueError("check has unassigned neighbours: %r" % (values,))
    parity = sum(values) % 2
    return _parity_set(sorted(int(p) for p in positions), parity, n)


def _parity_set(positions, parity, n):
    bounds = [0] + [p + 1 for p in positions] + [n + 1]
    return InversionSet(zip(bounds[parity::2], bounds[parity + 1::2]))


def _gf2_rref(M):
    """Reduced row echelon form over GF(2); returns (rows, pivot columns)."""
    M = (np.array(M, dtype=np.uint8) & 1)
    rows, cols = M.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.flatnonzero(M[row:, col])
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            M[[row, pivot]] = M[[pivot, row]]
        others = np.flatnonzero(M[:, col])
        others = others[others != row]
        M[others] ^= M[row]
        pivots.append(col)
        row += 1
    return M[:row], pivots


def _gallager_matrix(n, a, b, rng):
    per_block = n // b
    first = np.zeros((per_block, n), dtype=np.uint8)
    for row in range(per_block):
        first[row, row * b:(row + 1) * b] = 1
    blocks = [first]
    for _ in range(a - 1):
        blocks.append(first[:, rng.permutation(n)])
    return np.vstack(blocks)


class LdpcCode(object):
    """A regular (n, a, b) LDPC code with its systematic generator and graph."""

    def __init__(self, H, a, b, seed):
        dense = np.array(H.toarray() if sparse.issparse(H) else H, dtype=np.uint8)
        self.r, self.n = dense.shape
        self.a = a
        self.b = b
        self.seed = seed
        self.H = sparse.csr_matrix(dense)
        if np.any(dense.sum(axis=0) != a) or np.any(dense.sum(axis=1) != b):
            raise ValueError("parity check matrix is not (%d, %d) regular" % (a, b))

        reduced, pivots = _gf2_rref(dense)
        self.rank = len(pivots)
        self.k = self.n - self.rank
        self.pivot_cols = np.array(pivots, dtype=np.int64)
        self.info_cols = np.setdiff1d(np.arange(self.n), self.pivot_cols)
        self.G = np.zeros((self.n, self.k), dtype=np.uint8)
        self.G[self.info_cols] = np.eye(self.k, dtype=np.uint8)
        self.G[self.pivot_cols] = reduced[:, self.info_cols]

        # Edges are numbered check by check, neighbours in column order.
        self.check_nbrs = np.array([np.flatnonzero(row) for row in dense], dtype=np.int64)
        self.edge_var = self.check_nbrs.ravel()
        self.edge_check = np.repeat(np.arange(self.r), b)
        self.var_edges = np.array([np.flatnonzero(self.edge_var == v) for v in range(self.n)],
                                  dtype=np.int64)
        self.var_nbrs = self.edge_check[self.var_edges]
        self._parity_sets = [(_parity_set(list(nbrs), 0, self.n), _parity_set(list(nbrs), 1, self.n))
                             for nbrs in self.check_nbrs]

    def __repr__(self):
        return "LdpcCode(n=%d, k=%d, a=%d, b=%d, seed=%d)" % (self.n, self.k, self.a, self.b, self.seed)

    def parity_sets(self, c):
        """(S0, S1) of check c: the shifts giving an even or an odd read parity."""
        return self._parity_sets[c]


def build_gallager(n, a, b, seed):
    """Stack a randomly column permuted copies of the band matrix.

    A Gallager matrix always loses a - 1 in rank, since every block sums to
    the all-ones row; anything worse is drawn again with the next seed.
    """
    if a < 2 or b < 2:
        raise ValueError("column and row degree must be at least 2, got a=%d b=%d" % (a, b))
    if n % b != 0:
        raise ValueError("block length %d is not a multiple of the row degree %d" % (n, b))
    for attempt in range(MAX_REDRAWS):
        s = seed + attempt
        H = _gallager_matrix(n, a, b, make_rng(s))
        code = LdpcCode(H, a, b, s)
        if code.rank >= code.r - (a - 1):
            logging.info("built %r, rank %d of %d rows" % (code, code.rank, code.r))
            return code
        logging.warning("LDPC seed %d: rank %d, need %d; drawing again"
                        % (s, code.rank, code.r - (a - 1)))
    raise ValueError("no (%d, %d, %d) code of full enough rank after %d draws"
                     % (n, a, b, MAX_REDRAWS))


def syndrome(code, z):
    z = np.asarray(BitWord(z).bits, dtype=np.int64)
    return (code.H.dot(z) % 2).astype(np.uint8)


def encode(code, u):
    u = BitWord(u)
    if len(u) != code.k:
        raise ValueError("message has %d bits, the code carries %d" % (len(u), code.k))
    z = code.G.astype(np.int64) @ u.bits.astype(np.int64) % 2
    return BitWord(z)


def extract(code, z):
    """The message bits of a codeword."""
    return BitWord(BitWord(z).bits[code.info_cols])


def balanced_encode(code, u):
    """Encode u and balance the codeword; the shift is returned, never stored."""
    if code.n % 2 != 0:
        raise ValueError("balanced codes need an even length, got %d" % code.n)
    z = encode(code, u)
    i = find_balancing_index(z)
    return BalancedWord(invert_prefix(z, i)), i


#
# Erasure channel
#

@dataclass
class BecResult:
    status: str                 # unique, ambiguous or failure
    z: BitWord = None
    i: int = None
    feasible: list = field(default_factory=list)
    residual: int = 0


def _propagate(code, x, inv):
    """Peel erasures and shrink the inversion set until nothing moves.

    x is updated in place. Returns the final set, empty on a contradiction.
    """
    settled = set()
    progress = True
    while progress and len(inv) > 0:
        progress = False
        for c in range(code.r):
            if c in settled:
                continue
            nbrs = code.check_nbrs[c]
            vals = x[nbrs]
            erased = np.flatnonzero(vals == ERASED)
            if erased.size == 0:
                s0, s1 = code.parity_sets(c)
                narrowed = inv.intersect(s1 if int(vals.sum()) % 2 else s0)
                settled.add(c)
                if narrowed != inv:
                    inv = narrowed
                    progress = True
                    if len(inv) == 0:
                        break
            elif erased.size == 1:
                s0, s1 = code.parity_sets(c)
                if inv.issubset(s0):
                    parity = 0
                elif inv.issubset(s1):
                    parity = 1
                else:
                    continue
                known = int(vals[vals != ERASED].sum())
                x[nbrs[erased[0]]] = (parity + known) % 2
                progress = True
    return inv


def _feasible(code, x, inv, i):
    """The codeword for shift i, or None when i is not consistent."""
    filled = x.copy()
    if len(_propagate(code, filled, inv.intersect(InversionSet.single(i)))) == 0:
        return None
    if np.any(filled == ERASED) or int(filled.sum()) * 2 != code.n:
        return None
    z = invert_prefix(filled.astype(np.uint8), i)
    if np.any(syndrome(code, z)) or find_balancing_index(z) != i:
        return None
    return z


def bec_decode(code, y, budget=DEFAULT_BUDGET):
    """Decode a balanced codeword read through the erasure channel."""
    x = np.array(y, dtype=np.int8)
    if x.size != code.n:
        raise ValueError("received %d symbols for a code of length %d" % (x.size, code.n))
    # The smallest balancing shift is always below n
    inv = _propagate(code, x, InversionSet.full(code.n).clip(code.n))
    candidates = inv.clip(code.n)
    residual = len(candidates)
    logging.debug("BEC stall: %d erasures left, %d shifts left"
                  % (int(np.count_nonzero(x == ERASED)), residual))

    # Every shift left is tried; the budget caps the feasible ones kept
    feasible = []
    for i in candidates:
        z = _feasible(code, x, inv, i)
        if z is None:
            continue
        if len(feasible) == budget:
            logging.warning("BEC decode: more than %d of %d shifts are feasible" % (budget, residual))
            return BecResult('ambiguous', feasible=feasible, residual=residual)
        feasible.append((i, z))

    if not feasible:
        return BecResult('failure', residual=residual)
    words = {str(z) for i, z in feasible}
    if len(words) > 1:
        logging.warning("BEC decode: %d different codewords fit the erasures" % len(words))
        return BecResult('ambiguous', feasible=feasible, residual=residual)
    i, z = feasible[0]
    return BecResult('unique', z=z, i=i, feasible=feasible, residual=residual)


def genie_bec_decode(code, y, i):
    """Plain peeling with the shift known; returns the codeword or None."""
    x = np.array(y, dtype=np.int8)
    if len(_propagate(code, x, InversionSet.single(i))) == 0 or np.any(x == ERASED):
        return None
    z = invert_prefix(x.astype(np.uint8), i)
    if np.any(syndrome(code, z)):
        return None
    return z


def ambiguous_shift_fraction(code, trials, rng):
    """How often some other shift of a balanced codeword is a codeword too.

    The shifted words differ by H 1^j, so two shifts collide exactly when
    their prefix syndromes agree.
    """
    rng = rng if isinstance(rng, np.random.Generator) else make_rng(rng)
    columns = code.H.toarray().T.astype(np.uint8)
    prefix = np.zeros((code.n + 1, code.r), dtype=np.uint8)
    prefix[1:] = np.bitwise_xor.accumulate(columns, axis=0)
    keys = [row.tobytes() for row in prefix[:code.n]]
    counts = dict()
    for key in keys:
        counts[key] = counts.get(key, 0) + 1
    hits = 0
    for _ in range(trials):
        u = rng.integers(0, 2, code.k, dtype=np.uint8)
        x, i = balanced_encode(code, u)
        if counts[keys[i]] > 1:
            hits += 1
    return hits / float(trials)


#
# Symmetric channels
#

def _check_outputs(tanhs, width):
    """Products over all the other edges of each check (prefix and suffix)."""
    shape = tanhs.shape[:-1] + (-1, width)
    t = tanhs.reshape(shape)
    ones = np.ones(t.shape[:-1] + (1,))
    before = np.cumprod(np.concatenate((ones, t[..., :-1]), axis=-1), axis=-1)
    after = np.cumprod(np.concatenate((ones, t[..., :0:-1]), axis=-1), axis=-1)[..., ::-1]
    product = np.clip(before * after, -_TANH_CLIP, _TANH_CLIP)
    return (2.0 * np.arctanh(product)).reshape(tanhs.shape)


def bp_decode_batch(code, llrs, max_iter=50):
    """Flooding sum-product BP on many words at once.

    Returns (hard decisions, parity satisfied, iterations used) per row.
    """
    llrs = np.clip(np.atleast_2d(np.asarray(llrs, dtype=np.float64)), -LLR_CLIP, LLR_CLIP)
    batch = llrs.shape[0]
    if llrs.shape[1] != code.n:
        raise ValueError("received %d LLRs for a code of length %d" % (llrs.shape[1], code.n))
    words = (llrs < 0).astype(np.uint8)
    satisfied = np.zeros(batch, dtype=bool)
    iterations = np.full(batch, max_iter, dtype=np.int64)
    active = np.arange(batch)
    c2v = np.zeros((batch, code.edge_var.size))
    for iteration in range(1, max_iter + 1):
        llr = llrs[active]
        incoming = c2v[active]
        total = llr + incoming[:, code.var_edges].sum(axis=2)
        v2c = total[:, code.edge_var] - incoming
        incoming = _check_outputs(np.tanh(v2c / 2.0), code.b)
        c2v[active] = incoming
        total = llr + incoming[:, code.var_edges].sum(axis=2)
        hard = (total < 0).astype(np.uint8)
        words[active] = hard
        done = ~np.any(hard[:, code.check_nbrs].sum(axis=2) % 2, axis=1)
        satisfied[active[done]] = True
        iterations[active[done]] = iteration
        active = active[~done]
        if active.size == 0:
            break
    return words, satisfied, iterations


def bp_decode(code, llr, max_iter=50):
    words, satisfied, iterations = bp_decode_batch(code, [llr], max_iter)
    return BitWord(words[0]), bool(satisfied[0])


@dataclass
class ShiftScore:
    scores: np.ndarray
    ell: int

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, j):
        return self.scores[j]


def _exact(value):
    num, den = value.as_integer_ratio()
    return num * (_SCALE // den)


class _ShiftScorer(object):
    """BP messages for the score of a word, re-propagated one flip at a time.

    Messages are plain floats updated by the same helpers whatever the
    order, and the check terms are summed exactly, so a score reached by
    flips equals the score computed from scratch bit for bit.
    """

    def __init__(self, code, llr, ell):
        if not 1 <= ell <= 3:
            raise ValueError("score depth must be 1, 2 or 3, got %r" % ell)
        self.code = code
        self.ell = ell
        self.llr = [float(v) for v in llr]
        if len(self.llr) != code.n:
            raise ValueError("received %d LLRs for a code of length %d" % (len(self.llr), code.n))
        self.var_edges = code.var_edges.tolist()
        self.check_edges = np.arange(code.edge_var.size).reshape(code.r, code.b).tolist()
        self.edge_var = code.edge_var.tolist()
        self.edge_check = code.edge_check.tolist()
        edges = code.edge_var.size
        self.tanhs = [[0.0] * edges for _ in range(ell)]
        self.c2v = [[0.0] * edges for _ in range(ell - 1)]
        for level in range(ell):
            for v in range(code.n):
                self._var_update(level, v)
            if level < ell - 1:
                for c in range(code.r):
                    self._check_update(level, c)
        self.terms = [self._term(c) for c in range(code.r)]
        self.total = sum(_exact(t) for t in self.terms)

    def _var_update(self, level, v):
        out = self.tanhs[level]
        edges = self.var_edges[v]
        if level == 0:
            t = math.tanh(self.llr[v] / 2.0)
            for e in edges:
                out[e] = t
            return
        incoming = self.c2v[level - 1]
        for e in edges:
            m = self.llr[v]
            for f in edges:
                if f != e:
                    m += incoming[f]
            out[e] = math.tanh(m / 2.0)

    def _check_update(self, level, c):
        tanhs = self.tanhs[level]
        out = self.c2v[level]
        edges = self.check_edges[c]
        for e in edges:
            p = 1.0
            for f in edges:
                if f != e:
                    p *= tanhs[f]
            out[e] = 2.0 * math.atanh(min(max(p, -_TANH_CLIP), _TANH_CLIP))

    def _term(self, c):
        tanhs = self.tanhs[self.ell - 1]
        p = 1.0
        for e in self.check_edges[c]:
            p *= tanhs[e]
        return p

    def score(self):
        return self.total / _SCALE

    def flip(self, j):
        """Negate the LLR of cell j and refresh what depends on it."""
        self.llr[j] = -self.llr[j]
        dirty_vars = {j}
        for level in range(self.ell):
            for v in dirty_vars:
                self._var_update(level, v)
            dirty_checks = {self.edge_check[e] for v in dirty_vars for e in self.var_edges[v]}
            if level < self.ell - 1:
                for c in dirty_checks:
                    self._check_update(level, c)
                dirty_vars = {j} | {self.edge_var[e] for c in dirty_checks for e in self.check_edges[c]}
        for c in dirty_checks:
            term = self._term(c)
            self.total += _exact(term) - _exact(self.terms[c])
            self.terms[c] = term


def lambda_score(code, llr, ell):
    """Sum over checks of the product of tanh(m/2) after ell rounds, from scratch."""
    return _ShiftScorer(code, llr, ell).score()


def lambda_scores_all_shifts(code, llr, ell):
    """Score of every prefix inversion j = 0..n-1, one flip at a time."""
    scorer = _ShiftScorer(code, llr, ell)
    scores = np.empty(code.n)
    for j in range(code.n):
        scores[j] = scorer.score()
        if j + 1 < code.n:
            scorer.flip(j)
    return ShiftScore(scores, ell)


def candidate_inversions(scores, c):
    """Up to c local maxima of the shift scores, best first."""
    if c < 1:
        raise ValueError("need at least one candidate, got %r" % c)
    s = list(scores.scores if isinstance(scores, ShiftScore) else scores)
    n = len(s)
    peaks = [j for j in range(n)
             if (j == 0 or s[j] > s[j - 1]) and (j == n - 1 or s[j] >= s[j + 1])]
    peaks.sort(key=lambda j: (-s[j], j))
    return peaks[:c]


@dataclass
class SymmetricResult:
    u: BitWord = None
    z: BitWord = None
    i: int = None
    candidates: list = field(default_factory=list)

    @property
    def ok(self):
        return self.u is not None


def _shifted(llr, shifts):
    llr = np.asarray(llr, dtype=np.float64)
    rows = np.tile(llr, (len(shifts), 1))
    for row, j in enumerate(shifts):
        rows[row, :j] = -rows[row, :j]
    return rows


def _decode_shifts(code, llr, shifts, max_iter):
    """Decode each shift, keep the codeword whose stored form is most likely.

    A shift next to the true one often decodes to the true codeword, so a
    codeword is scored by its own balanced form, whatever shift found it.
    """
    result = SymmetricResult(candidates=list(shifts))
    if not shifts:
        return result
    clipped = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    rows = _shifted(llr, shifts)
    words, satisfied, iterations = bp_decode_batch(code, rows, max_iter)
    best = None
    for row, j in enumerate(shifts):
        if not satisfied[row]:
            continue
        z = BitWord(words[row])
        i = find_balancing_index(z)
        if i != j:
            logging.debug("shift %d decoded to a codeword balanced at %d" % (j, i))
        stored = invert_prefix(z, i)
        likelihood = float(np.dot(clipped, 1.0 - 2.0 * stored.bits) / 2.0)
        if best is None or likelihood > best[0]:
            best = (likelihood, i, z)
    if best is not None:
        likelihood, result.i, result.z = best
        result.u = extract(code, result.z)
    return result


def balanced_decode_symmetric(code, llr, ell=2, c=4, max_iter=50):
    """Score all shifts, then decode the c best candidates."""
    shifts = candidate_inversions(lambda_scores_all_shifts(code, llr, ell), c)
    logging.debug("candidate shifts: %r" % shifts)
    return _decode_shifts(code, llr, shifts, max_iter)


def exhaustive_decode_symmetric(code, llr, max_iter=50):
    """Decode every shift; the reference the scored decoder is measured against."""
    return _decode_shifts(code, llr, list(range(code.n)), max_iter)


#
# Storage
#

_HEADER = re.compile(r'balmod\s+n=(\d+)\s+a=(\d+)\s+b=(\d+)\s+seed=(-?\d+)')


def save(code, path):
    """Write H as a Matrix Market pattern file with the code parameters."""
    comment = " balmod n=%d a=%d b=%d seed=%d" % (code.n, code.a, code.b, code.seed)
    io.mmwrite(path, sparse.coo_matrix(code.H), comment=comment, field='pattern')
    logging.info("Wrote parity check matrix to %s" % path)


def load(path):
    header = None
    with open(path, 'r') as file:
        for line in file:
            if not line.startswith('%'):
                break
            match = _HEADER.search(line)
            if match:
                header = [int(g) for g in match.groups()]
    if header is None:
        raise ValueError("%s has no balmod code header" % path)
    n, a, b, seed = header
    H = io.mmread(path)
    code = LdpcCode(sparse.csr_matrix(H).astype(np.uint8), a, b, seed)
    if code.n != n:
        raise ValueError("%s: header says n=%d, matrix has %d columns" % (path, n, code.n))
    return code
