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

# Experiments. Every trial draws from its own generator, keyed by the run
# seed, the index of the point on the x axis and the trial number, so a
# table depends only on its spec.

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from balmodlib import channel, csvfile, em_soft, ldpc, thresholding
from balmodlib.config import DEFAULTS
from balmodlib.core import BitWord


COLUMNS = ('x', 'strategy', 'metric', 'value', 'stderr', 'trials', 'seed')


@dataclass
class ExperimentSpec:
    kind: str
    seed: int = 1
    trials: int = 100
    params: dict = field(default_factory=dict)
    out: str = "balmod.csv"

    def __post_init__(self):
        if self.kind not in EXPERIMENTS:
            raise ValueError("unknown experiment %r, expected one of %s"
                             % (self.kind, ', '.join(sorted(EXPERIMENTS))))
        if self.trials < 1:
            raise ValueError("need at least one trial, got %r" % self.trials)

    def get(self, key):
        if key in self.params:
            return self.params[key]
        return DEFAULTS[key]

    def header(self):
        """The spec as sorted key=value lines."""
        lines = ["kind=%s" % self.kind, "seed=%d" % self.seed, "trials=%d" % self.trials]
        for key in sorted(self.params):
            value = self.params[key]
            if isinstance(value, (list, tuple)):
                value = ",".join(csvfile.field(v) for v in value)
            lines.append("%s=%s" % (key, csvfile.field(value)))
        return lines


@dataclass
class ResultTable:
    spec: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def add(self, x, strategy, metric, value, stderr, trials, seed):
        self.rows.append((float(x), str(strategy), str(metric), float(value),
                          float(stderr), int(trials), int(seed)))

    def select(self, strategy, metric):
        """(x, value) pairs of one curve."""
        return [(row[0], row[3]) for row in self.rows if row[1] == strategy and row[2] == metric]


def _mean_stderr(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def _rate_stderr(failures, trials):
    rate = failures / float(trials)
    return rate, math.sqrt(rate * (1.0 - rate) / trials)


def _model(spec):
    kind = spec.get('model')
    sigma = spec.get('sigma_variance') if kind == 'variance_growth' else spec.get('sigma')
    return channel.DriftModel(kind, sigma)


def run_ber_curve(spec):
    """Bit error rate against time for the fixed, balancing and optimal thresholds."""
    model = _model(spec)
    cells = spec.get('cells')
    table = ResultTable(spec.header())
    for point, t in enumerate(spec.get('t_grid')):
        vb, vo, vf = channel.model_thresholds(model, t)
        errors = {'fixed': [], 'balancing': [], 'optimal': []}
        for trial in range(spec.trials):
            rng = channel.make_rng(spec.seed, point, trial)
            x = channel.random_balanced_word(cells, rng)
            block = channel.sample_levels(x, model, t, rng)
            vbal = thresholding.balancing_threshold_exact(block.levels)[0]
            for name, v in (('fixed', vf), ('balancing', vbal)):
                y = thresholding.read_with_threshold(block.levels, v)
                errors[name].append(thresholding.bit_error_rate(x, y))
            counts = thresholding.optimal_threshold_oracle(block.levels, x)[1]
            errors['optimal'].append(counts.total / float(cells))
        for name, rates in errors.items():
            mean, stderr = _mean_stderr(rates)
            table.add(t, name, 'ber', mean, stderr, spec.trials, spec.seed)
        for name, v in (('fixed', vf), ('balancing', vb), ('optimal', vo)):
            table.add(t, name, 'analytic', channel.analytic_ber(model, v, t), 0.0, spec.trials, spec.seed)
        logging.info("ber %s t=%r done" % (model.kind, t))
    return table


def _bec_trial(code, p, budget, rng):
    u = rng.integers(0, 2, code.k, dtype=np.uint8)
    x, i = ldpc.balanced_encode(code, u)
    z = ldpc.encode(code, u)
    y = channel.apply_bec(x, p, rng)
    result = ldpc.bec_decode(code, y, budget)
    genie = ldpc.genie_bec_decode(code, y, i)
    balanced_ok = result.status == 'unique' and result.z == z
    genie_ok = genie is not None and genie == z
    return balanced_ok, genie_ok, result.residual


def run_wer_bec(spec):
    """Balanced against known-shift decoding on the erasure channel, per block length."""
    p = spec.get('p')
    budget = spec.get('budget')
    table = ResultTable(spec.header())
    for point, n in enumerate(spec.get('lengths')):
        code = ldpc.build_gallager(n, spec.get('bec_a'), spec.get('bec_b'), spec.get('code_seed'))
        failures = {'balanced': 0, 'genie': 0}
        residual = []
        for trial in range(spec.trials):
            rng = channel.make_rng(spec.seed, point, trial)
            balanced_ok, genie_ok, size = _bec_trial(code, p, budget, rng)
            failures['balanced'] += not balanced_ok
            failures['genie'] += not genie_ok
            residual.append(size)
        for name, count in failures.items():
            rate, stderr = _rate_stderr(count, spec.trials)
            table.add(n, name, 'wer', rate, stderr, spec.trials, spec.seed)
        mean, stderr = _mean_stderr(residual)
        table.add(n, 'balanced', 'inversion-set', mean, stderr, spec.trials, spec.seed)
        logging.info("wer-bec n=%d p=%r: balanced %d genie %d failures"
                     % (n, p, failures['balanced'], failures['genie']))
    return table


def run_inversion_set(spec):
    """Mean size of the inversion set left when peeling stalls."""
    budget = spec.get('budget')
    table = ResultTable(spec.header())
    lengths = spec.get('lengths')
    codes = [ldpc.build_gallager(n, spec.get('bec_a'), spec.get('bec_b'), spec.get('code_seed'))
             for n in lengths]
    for point, p in enumerate(spec.get('bec_p_grid')):
        for code in codes:
            sizes = []
            for trial in range(spec.trials):
                rng = channel.make_rng(spec.seed, point, code.n, trial)
                sizes.append(_bec_trial(code, p, budget, rng)[2])
            mean, stderr = _mean_stderr(sizes)
            table.add(p, "n%d" % code.n, 'inversion-set', mean, stderr, spec.trials, spec.seed)
    return table


def run_wer_bsc(spec):
    """Word error rate on the BSC: unbalanced BP against the balanced decoders."""
    code = ldpc.build_gallager(spec.get('n'), spec.get('a'), spec.get('b'), spec.get('code_seed'))
    ell = spec.get('ell')
    c = spec.get('c')
    max_iter = spec.get('max_iter')
    exhaustive = bool(spec.get('exhaustive'))
    table = ResultTable(spec.header())
    for point, p in enumerate(spec.get('p_grid')):
        failures = {'unbalanced': 0, 'balanced': 0}
        if exhaustive:
            failures['exhaustive'] = 0
        for trial in range(spec.trials):
            rng = channel.make_rng(spec.seed, point, trial)
            u = BitWord(rng.integers(0, 2, code.k, dtype=np.uint8))
            z = ldpc.encode(code, u)
            x, i = ldpc.balanced_encode(code, u)
            flips = channel.apply_bsc(np.zeros(code.n, dtype=np.uint8), p, rng).bits
            word, ok = ldpc.bp_decode(code, channel.bsc_llr(z.bits ^ flips, p), max_iter)
            failures['unbalanced'] += not (ok and word == z)
            llr = channel.bsc_llr(x.bits ^ flips, p)
            result = ldpc.balanced_decode_symmetric(code, llr, ell, c, max_iter)
            failures['balanced'] += not (result.ok and result.u == u)
            if exhaustive:
                result = ldpc.exhaustive_decode_symmetric(code, llr, max_iter)
                failures['exhaustive'] += not (result.ok and result.u == u)
        for name, count in failures.items():
            rate, stderr = _rate_stderr(count, spec.trials)
            table.add(p, name, 'wer', rate, stderr, spec.trials, spec.seed)
        logging.info("wer-bsc p=%r: %r" % (p, failures))
    return table


def _soft_read(levels):
    try:
        return em_soft.soft_llr(levels)
    except em_soft.ComponentCollapse as inst:
        logging.warning("soft read failed: %s" % inst)
        return None


def run_wer_soft(spec):
    """Word error rate of balanced LDPC words stored in drifting cells.

    The hard read cuts the block at its balancing threshold and uses the
    crossover of the model at that time; the soft read fits the block by
    EM and hands the per-cell LLRs to the same decoder.
    """
    code = ldpc.build_gallager(spec.get('n'), spec.get('a'), spec.get('b'), spec.get('code_seed'))
    model = _model(spec)
    ell = spec.get('ell')
    c = spec.get('c')
    max_iter = spec.get('max_iter')
    table = ResultTable(spec.header())
    for point, t in enumerate(spec.get('t_grid')):
        vb = channel.model_thresholds(model, t)[0]
        p = min(max(channel.analytic_ber(model, vb, t), 1e-6), 0.49)
        failures = {'hard': 0, 'soft': 0}
        for trial in range(spec.trials):
            rng = channel.make_rng(spec.seed, point, trial)
            u = BitWord(rng.integers(0, 2, code.k, dtype=np.uint8))
            x, i = ldpc.balanced_encode(code, u)
            block = channel.sample_levels(x, model, t, rng)
            v = thresholding.balancing_threshold_exact(block.levels)[0]
            y = thresholding.read_with_threshold(block.levels, v)
            reads = {'hard': channel.bsc_llr(y.bits, p), 'soft': _soft_read(block.levels)}
            for name, llr in reads.items():
                if llr is None:
                    failures[name] += 1
                    continue
                result = ldpc.balanced_decode_symmetric(code, llr, ell, c, max_iter)
                failures[name] += not (result.ok and result.u == u)
        for name, count in failures.items():
            rate, stderr = _rate_stderr(count, spec.trials)
            table.add(t, name, 'wer', rate, stderr, spec.trials, spec.seed)
        logging.info("wer-soft %s t=%r: %r" % (model.kind, t, failures))
    return table


STRATEGIES = ('fixed', 'balancing', 'bisect', 'mean', 'second-order', 'optimal')


def run_threshold_compare(spec):
    """Errors of every threshold strategy, and how often balancing loses by more than 2x."""
    model = _model(spec)
    cells = spec.get('cells')
    a = spec.get('a_const')
    eps = spec.get('eps')
    table = ResultTable(spec.header())
    for point, t in enumerate(spec.get('t_grid')):
        errors = dict((name, []) for name in STRATEGIES)
        violations = 0
        for trial in range(spec.trials):
            rng = channel.make_rng(spec.seed, point, trial)
            x = channel.random_balanced_word(cells, rng)
            block = channel.sample_levels(x, model, t, rng)
            lo = float(block.levels.levels.min())
            hi = float(block.levels.levels.max())
            report = thresholding.threshold_report(block.levels, x, a, lo, hi, eps)
            for name in STRATEGIES:
                y = thresholding.read_with_threshold(block.levels, report[name])
                errors[name].append(thresholding.error_counts(x, y).total)
            if errors['balancing'][-1] > 2 * errors['optimal'][-1]:
                violations += 1
        for name in STRATEGIES:
            mean, stderr = _mean_stderr(errors[name])
            table.add(t, name, 'errors', mean, stderr, spec.trials, spec.seed)
        table.add(t, 'balancing', 'violations', violations, 0.0, spec.trials, spec.seed)
    return table


EXPERIMENTS = {
    'ber': run_ber_curve,
    'wer-bec': run_wer_bec,
    'wer-bsc': run_wer_bsc,
    'wer-soft': run_wer_soft,
    'inversion-set': run_inversion_set,
    'threshold-compare': run_threshold_compare,
}


def run(spec):
    logging.info("Running %s, seed %d, %d trials" % (spec.kind, spec.seed, spec.trials))
    return EXPERIMENTS[spec.kind](spec)


def _emit_csv(table, path):
    out = csvfile.csvfile(path)
    try:
        out.comment(table.spec)
        out.header(COLUMNS)
        for row in table.rows:
            out.entry(row)
    finally:
        out.close()


def _emit_svg(table, path):
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    matplotlib.rcParams['svg.hashsalt'] = 'balmod'
    fig, ax = plt.subplots(figsize=(6, 4))
    curves = []
    for row in table.rows:
        if (row[1], row[2]) not in curves:
            curves.append((row[1], row[2]))
    positive = all(row[3] > 0 for row in table.rows)
    for strategy, metric in curves:
        points = table.select(strategy, metric)
        style = '--' if metric == 'analytic' else '-o'
        ax.plot([p[0] for p in points], [p[1] for p in points], style, label="%s %s" % (strategy, metric))
    if positive:
        ax.set_yscale('log')
    ax.set_xlabel('x')
    ax.set_ylabel('value')
    ax.grid(True, which='major', linestyle='-')
    ax.legend(fontsize='small')
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)


def emit(table, path, format='csv'):
    """Write the table as CSV, or plot it as a single SVG file."""
    if format == 'csv':
        _emit_csv(table, path)
    elif format == 'svg':
        _emit_svg(table, path)
    else:
        raise ValueError("unknown output format %r" % format)
    logging.info("Wrote %d rows to %s" % (len(table.rows), path))


def load(path):
    comments, header, rows = csvfile.read(path)
    if tuple(header) != COLUMNS:
        raise ValueError("%s: unexpected columns %r" % (path, header))
    table = ResultTable(comments)
    for row in rows:
        x, strategy, metric, value, stderr, trials, seed = row
        table.add(float(x), strategy, metric, float(value), float(stderr), int(trials), int(seed))
    return table
