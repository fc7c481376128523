"""
harness - experiment batteries.

A battery is a JSON document:

  {
    "schema_version": 1,
    "name": "coprime-dichotomy",
    "seed": 20240501,
    "samples": 20000,
    "thresholds": { "hi": 0.95, "lo": 0.05 },
    "experiments": [
      { "name": "divergent-2d", "kind": "dichotomy",
        "family": { "name": "power_log", "c": 0.25, "a": 1, "b": 0 },
        "n": 2, "mode": "product", "coprime": false,
        "Q0": 1, "Q": 10000, "grid_ratio": 2,
        "expect": "expect-full" },
      ...
    ]
  }

Experiment kinds are dichotomy, bc_evidence and padic.  Per-experiment
samples and seed default to the battery values.  An expect-full entry
must sit on a known-divergent criterion and an expect-null entry on a
known-convergent one.

Results are plain dictionaries ready for the CSV and JSON renderers.
"""
import math
import json
import hashlib
import logging
import numpy as np

from mdalab import config
from mdalab.core import arith, psi as psimod, regions, sampler, borel_cantelli as bc
from mdalab.errors import ConfigError, DomainError, MdalabError
from mdalab.values import MeasureEstimate

logger = logging.getLogger(__name__)

KINDS = ('dichotomy', 'bc_evidence', 'padic')
EXPECTATIONS = ('expect-full', 'expect-null', 'exploratory')
PAIR_SOURCES = ('independence', 'exact', 'monte-carlo')
FULL = 'full-trending'
NULL = 'null-trending'
INCONCLUSIVE = 'inconclusive'
DISCLAIMER = ('Finite-truncation numerical evidence only: a full- or null-trending '
              'classification at finite Q does not establish full or null measure.')

#
# configuration
#

def _get(d, key, kind, field, default=None, required=False):
  if key not in d:
    if required:
      raise ConfigError('missing required field', field='{}.{}'.format(field, key)
                        if field else key)
    return default
  v = d[key]
  ok = {
    'int': lambda x: isinstance(x, int) and not isinstance(x, bool),
    'num': lambda x: isinstance(x, (int, float)) and not isinstance(x, bool),
    'bool': lambda x: isinstance(x, bool),
    'str': lambda x: isinstance(x, str),
    'list': lambda x: isinstance(x, list),
    'dict': lambda x: isinstance(x, dict),
  }[kind](v)
  if not ok:
    raise ConfigError('expected {}, got {!r}'.format(kind, v),
                      field='{}.{}'.format(field, key) if field else key)
  return v

class Experiment:
  """
  One battery entry: an ExperimentConfig plus what to run and expect.
  """
  FIELDS = ('name', 'kind', 'family', 'n', 'mode', 'coprime', 'Q0', 'Q', 'Q_grid',
            'grid_ratio', 'samples', 'seed', 'expect', 'criterion', 'pairs',
            'method', 'tail_bound', 'primes', 'weights', 'quasi_pairs')

  def __init__(self, d, field, battery_seed, battery_samples):
    if not isinstance(d, dict):
      raise ConfigError('experiment must be an object', field=field)
    for k in d:
      if k not in self.FIELDS:
        raise ConfigError('unknown field', field='{}.{}'.format(field, k))
    self.raw = dict(d)
    self.field = field
    self.name = _get(d, 'name', 'str', field, required=True)
    self.kind = _get(d, 'kind', 'str', field, 'dichotomy')
    if self.kind not in KINDS:
      raise ConfigError('kind must be one of {}'.format(KINDS), field=field + '.kind')
    family = psimod.from_spec(_get(d, 'family', 'dict', field, required=True),
                              field + '.family')
    n = _get(d, 'n', 'int', field, 1)
    mode = _get(d, 'mode', 'str', field, 'product')
    coprime = _get(d, 'coprime', 'bool', field, False)
    Q0 = _get(d, 'Q0', 'int', field, 1)
    Q = _get(d, 'Q', 'int', field, required=True)
    samples = _get(d, 'samples', 'int', field, battery_samples)
    seed = _get(d, 'seed', 'int', field, battery_seed)
    grid = _get(d, 'Q_grid', 'list', field, None)
    ratio = _get(d, 'grid_ratio', 'num', field, 2)
    try:
      if grid is None:
        grid = psimod.geometric_grid(Q0, Q, ratio)
      self.cfg = sampler.ExperimentConfig(family, n, mode, coprime, Q0, Q,
                                          samples, seed, grid)
    except (DomainError, TypeError) as e:
      raise ConfigError(str(e), field=field)

    self.expect = _get(d, 'expect', 'str', field, 'exploratory')
    if self.expect not in EXPECTATIONS:
      raise ConfigError('expect must be one of {}'.format(EXPECTATIONS),
                        field=field + '.expect')
    kind = _get(d, 'criterion', 'str', field, None)
    try:
      self.criterion = psimod.SumCriterion(kind, n) if kind else \
                       psimod.default_criterion(n, mode, coprime)
    except DomainError as e:
      raise ConfigError(str(e), field=field + '.criterion')
    self.metadata = psimod.classify(family, self.criterion)
    self.justification = '{} under {}'.format(self.metadata, self.criterion.kind)
    needed = { 'expect-full': psimod.DIVERGENT, 'expect-null': psimod.CONVERGENT }
    if self.expect in needed and self.metadata != needed[self.expect]:
      raise ConfigError('{} needs {} metadata for {}, family has {}'.format(
                        self.expect, needed[self.expect], self.criterion.kind,
                        self.metadata), field=field + '.expect')

    self.pairs = _get(d, 'pairs', 'str', field, 'independence')
    if self.pairs not in PAIR_SOURCES:
      raise ConfigError('pairs must be one of {}'.format(PAIR_SOURCES),
                        field=field + '.pairs')
    if self.pairs == 'exact' and (n != 1 or mode != 'product'):
      raise ConfigError('exact pair tables exist only for n = 1', field=field + '.pairs')
    self.method = _get(d, 'method', 'str', field, 'monte-carlo')
    if self.method not in ('monte-carlo', 'exact'):
      raise ConfigError('method must be monte-carlo or exact', field=field + '.method')
    if self.method == 'exact' and n != 1:
      raise ConfigError('exact unions exist only for n = 1', field=field + '.method')
    self.tail_bound = _get(d, 'tail_bound', 'bool', field, False)
    self.quasi_pairs = [ tuple(p) for p in _get(d, 'quasi_pairs', 'list', field, []) ]

    self.padic_family = None
    if self.kind == 'padic':
      primes = _get(d, 'primes', 'list', field, required=True)
      ws = _get(d, 'weights', 'list', field, required=True)
      try:
        weights = [ psimod.Weight(w['kind'], **{ k: v for k, v in w.items() if k != 'kind' })
                    for w in ws ]
        self.padic_family = psimod.padic_weighted_psi(family, primes, weights)
      except (DomainError, KeyError, TypeError, AttributeError) as e:
        raise ConfigError('bad p-adic weighting: {}'.format(e), field=field + '.weights')

  def as_dict(self):
    d = dict(self.raw)
    d['family'] = self.cfg.family.spec()
    d['samples'] = self.cfg.samples
    d['seed'] = self.cfg.seed
    d['Q_grid'] = list(self.cfg.Q_grid)
    d.pop('grid_ratio', None)
    return d

class Battery:
  def __init__(self, name, experiments, seed=0, samples=10000,
               hi=config.THRESHOLD_HI, lo=config.THRESHOLD_LO):
    self.name = name
    self.experiments = experiments
    self.seed = seed
    self.samples = samples
    self.hi = hi
    self.lo = lo
    self.dag = None

  @classmethod
  def from_dict(cls, d, seed=None, samples=None):
    """
    Parse a battery; seed/samples given here override the file.
    """
    if not isinstance(d, dict):
      raise ConfigError('battery must be a JSON object')
    version = _get(d, 'schema_version', 'int', '', required=True)
    if version != config.SCHEMA_VERSION:
      raise ConfigError('unsupported schema version {}'.format(version),
                        field='schema_version')
    name = _get(d, 'name', 'str', '', required=True)
    bseed = seed if seed is not None else _get(d, 'seed', 'int', '', required=True)
    bsamples = samples if samples is not None else _get(d, 'samples', 'int', '', 10000)
    th = _get(d, 'thresholds', 'dict', '', {})
    hi = _get(th, 'hi', 'num', 'thresholds', config.THRESHOLD_HI)
    lo = _get(th, 'lo', 'num', 'thresholds', config.THRESHOLD_LO)
    if not 0 <= lo < hi <= 1:
      raise ConfigError('need 0 <= lo < hi <= 1', field='thresholds')
    exps = []
    for i, e in enumerate(_get(d, 'experiments', 'list', '', [])):
      if seed is not None and isinstance(e, dict):
        e = dict(e, seed=seed)
      if samples is not None and isinstance(e, dict):
        e = dict(e, samples=samples)
      exps.append(Experiment(e, 'experiments[{}]'.format(i), bseed, bsamples))
    names = [ e.name for e in exps ]
    if len(set(names)) != len(names):
      raise ConfigError('experiment names must be unique', field='experiments')
    b = cls(name, exps, bseed, bsamples, hi, lo)
    b.dag = _get(d, 'dag', 'list', '', None)
    return b

  @classmethod
  def loads(cls, text, **overrides):
    try:
      d = json.loads(text)
    except json.JSONDecodeError as e:
      raise ConfigError(e.msg, line=e.lineno, column=e.colno)
    return cls.from_dict(d, **overrides)

  @classmethod
  def load(cls, path, **overrides):
    with open(path, 'r') as f:
      return cls.loads(f.read(), **overrides)

  def as_dict(self):
    d = { 'schema_version': config.SCHEMA_VERSION, 'name': self.name,
          'seed': self.seed, 'samples': self.samples,
          'thresholds': { 'hi': self.hi, 'lo': self.lo },
          'experiments': [ e.as_dict() for e in self.experiments ] }
    if self.dag:
      d['dag'] = self.dag
    return d

  def config_hash(self):
    text = json.dumps(self.as_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()

#
# rows
#

def row(q, f, estimate):
  """
  One CSV row: q, phi_q, psi_q, measure, provenance, ci_low, ci_high.
  """
  if estimate.rational is None:
    measure = estimate.value
  else:
    measure = str(estimate.rational)
  return { 'q': int(q), 'phi_q': arith.euler_phi(int(q)),
           'psi_q': float(f(int(q))), 'measure': measure,
           'provenance': estimate.provenance,
           'ci_low': estimate.ci_low, 'ci_high': estimate.ci_high }

def classify_estimate(value, hi, lo):
  if value >= hi:
    return FULL
  if value <= lo:
    return NULL
  return INCONCLUSIVE

def _result(exp):
  return { 'name': exp.name, 'kind': exp.kind, 'expect': exp.expect,
           'justification': exp.justification, 'config': exp.as_dict(),
           'rows': [], 'extras': {}, 'anomalies': [] }

def _anomaly(res, message):
  logger.warning('[{}] {}'.format(res['name'], message))
  res['anomalies'].append(message)

def union_curve(exp, workers=None):
  """
  (Qc, MeasureEstimate) for the union over [Q0, Qc].
  """
  cfg = exp.cfg
  if exp.method == 'exact':
    return regions.truncated_union_scan(cfg.family, cfg.Q0, cfg.Q_grid, cfg.coprime)
  return sampler.estimate_union_measure(cfg, workers)

def convergence_tail_check(cfg, workers=None, estimate=None):
  """
  Union estimate at Q against sum of slice measures over [Q0, Q].
  Returns (estimate, tail sum, ok); ok allows the CI to straddle the sum.
  """
  if estimate is None:
    estimate = sampler.estimate_union_measure(cfg, workers)[-1][1]
  tail, err = regions.tail_measure_sum(cfg.family, cfg.n, cfg.Q0, cfg.Q,
                                       cfg.mode, cfg.coprime)
  low = estimate.ci_low if estimate.ci_low is not None else estimate.value
  return estimate, tail, low <= tail + err

def run_dichotomy(exp, hi, lo, workers=None):
  res = _result(exp)
  f = exp.cfg.family
  curve = union_curve(exp, workers)
  for Qc, est in curve:
    res['rows'].append(row(Qc, f, est))
    logger.debug('[{}] Q={} measure {}'.format(exp.name, Qc, est))
  final = curve[-1][1].value if curve else 0.0
  cls = classify_estimate(final, hi, lo)
  res['extras']['classification'] = cls
  if exp.expect == 'expect-full' and cls != FULL:
    _anomaly(res, 'expected full-trending, got {} ({:.6g})'.format(cls, final))
  if exp.expect == 'expect-null' and cls != NULL:
    _anomaly(res, 'expected null-trending, got {} ({:.6g})'.format(cls, final))
  if exp.tail_bound:
    est, tail, ok = convergence_tail_check(exp.cfg, workers, curve[-1][1])
    res['extras']['tail_sum'] = tail
    if not ok:
      _anomaly(res, 'union estimate {:.6g} exceeds tail sum {:.6g}'.format(est.value, tail))
  return res

def run_dichotomy_scan(b, workers=None):
  """
  Every dichotomy experiment of a battery; one result per experiment.
  """
  return [ run_dichotomy(e, b.hi, b.lo, workers)
           for e in b.experiments if e.kind == 'dichotomy' ]

def _event_stats(exp):
  cfg = exp.cfg
  qs, vals = sampler.active_slices(cfg.family, cfg.Q0, cfg.Q)
  if exp.pairs == 'exact':
    return bc.exact_pair_stats_1d(cfg.family, qs, cfg.coprime)
  if exp.pairs == 'monte-carlo':
    return bc.mc_pair_stats(cfg.family, qs, cfg.n, cfg.mode, cfg.coprime,
                            cfg.samples, cfg.seed)
  mu = [ regions.region_measure(regions.RegionSpec(int(q), cfg.n, float(v), cfg.mode,
                                                   cfg.coprime)).value
         for q, v in zip(qs, vals) ]
  return bc.independence_stats(mu, qs)

def sumcon_table(cfg):
  """
  |H(psi, q)| against (phi(q)/q)^n psi(q) (ln q)^(n-1) at grid points.
  For plain sets the phi factor is 1.
  """
  rows = []
  for q in cfg.Q_grid:
    delta = float(cfg.family(q))
    m = regions.region_measure(regions.RegionSpec(q, cfg.n, delta, cfg.mode, cfg.coprime))
    phi = arith.euler_phi(q) / q if cfg.coprime else 1.0
    scale = phi ** cfg.n * delta * math.log(q) ** (cfg.n - 1)
    rows.append({ 'q': q, 'measure': m.value, 'scale': scale,
                  'ratio': m.value / scale if scale > 0 else None })
  return rows

def run_bc_evidence(exp, workers=None):
  """
  Second-moment bound curve, union curve and the slice-measure table for one
  experiment.  A bound above the union estimate by more than three CI
  widths is an anomaly.
  """
  res = _result(exp)
  cfg = exp.cfg
  f = cfg.family
  qs, _ = sampler.active_slices(f, cfg.Q0, cfg.Q)
  if qs.size == 0:
    res['extras'].update({ 'bound_curve': [], 'union_curve': [], 'sumcon': [],
                           'pairs': exp.pairs })
    return res
  stats = _event_stats(exp)
  scan = bc.bc_scan(stats, cfg.Q_grid)
  if stats.source == 'monte-carlo':
    M = stats.membership
    curve = []
    for Qc in cfg.Q_grid:
      hits = int(np.count_nonzero(M[:, :stats.prefix(Qc)].any(axis=1)))
      curve.append((Qc, MeasureEstimate.from_hits(hits, cfg.samples, cfg.seed,
                                                  config.GENERATOR_ID)))
  else:
    curve = union_curve(exp, workers)
  for Qc, est in curve:
    res['rows'].append(row(Qc, f, est))
  res['extras']['pairs'] = stats.source
  res['extras']['bound_curve'] = [ { 'Q': Q, 'bound': b, 'running_max': m,
                                     'low': lo, 'high': hi }
                                   for Q, b, m, lo, hi in scan ]
  res['extras']['union_curve'] = [ dict(Q=Qc, **est.as_dict()) for Qc, est in curve ]
  for (Q, b, _, lo, _), (_, est) in zip(scan, curve):
    if b is None:
      continue
    slack = 3.0 * est.ci_width() + 1e-12
    if b > est.value + slack:
      _anomaly(res, 'bound {:.6g} above union estimate {:.6g} at Q={}'.format(
               b, est.value, Q))
  res['extras']['sumcon'] = sumcon_table(cfg)
  ratios = [ r['ratio'] for r in res['extras']['sumcon'] if r['ratio'] ]
  if ratios:
    res['extras']['sumcon_band'] = [ min(ratios), max(ratios) ]
  quasi = []
  for q, r in exp.quasi_pairs:
    est = sampler.estimate_pairwise_intersection(q, r, f, cfg.n, cfg.mode, cfg.coprime,
                                                 cfg.samples, cfg.seed)
    try:
      ratio = bc.quasi_independence_ratio(q, r, f, cfg.n, est)
    except MdalabError as e:
      _anomaly(res, 'quasi-independence ({}, {}): {}'.format(q, r, e))
      continue
    quasi.append({ 'q': q, 'r': r, 'intersection': est.as_dict(), 'ratio': ratio })
  if quasi:
    res['extras']['quasi_independence'] = quasi
  return res

def solution_table(pts, f, grid, mode, coprime):
  """
  Cumulative non-strict solution counts per sampled point at each checkpoint.
  """
  Q = grid[-1]
  vals = f.values(Q)
  counts = np.zeros((len(pts), len(grid)), dtype=np.int64)
  idx = np.asarray(grid, dtype=np.int64) - 1
  for i, x in enumerate(pts):
    hits = sampler.solution_hits(x, f, Q, mode, coprime, strict=False, vals=vals)
    counts[i] = np.cumsum(hits)[idx]
  return counts

def run_padic(exp, workers=None):
  """
  Weighted (non-strict) solution counts for sampled alpha, alongside the
  weighted divergence sum.
  """
  res = _result(exp)
  cfg = exp.cfg
  f = exp.padic_family
  grid = cfg.Q_grid
  pts = sampler.points(cfg.seed, 0, cfg.samples, cfg.n)
  counts = solution_table(pts, f, grid, cfg.mode, cfg.coprime)
  sums = psimod.partial_sums(f, psimod.SumCriterion('log_weighted', cfg.n), cfg.Q)
  prev = np.zeros(counts.shape[0], dtype=np.int64)
  for j, Qc in enumerate(grid):
    fresh = int(np.count_nonzero(counts[:, j] > prev))
    prev = counts[:, j]
    res['rows'].append(row(Qc, f, MeasureEstimate.from_hits(fresh, cfg.samples, cfg.seed,
                                                            config.GENERATOR_ID)))
  if np.any(np.diff(counts, axis=1) < 0):
    _anomaly(res, 'solution counts decreased along the grid')
  res['extras']['partial_sums'] = [ { 'Q': Qc, 'sum': float(sums[Qc - 1]) } for Qc in grid ]
  res['extras']['mean_counts'] = [ { 'Q': Qc, 'mean': float(counts[:, j].mean()) }
                                   for j, Qc in enumerate(grid) ]
  shown = min(len(pts), 32)
  res['extras']['points'] = [ { 'alpha': [ float(v) for v in pts[i] ],
                                'counts': [ int(c) for c in counts[i] ] }
                              for i in range(shown) ]
  return res

RUNNERS = {
  'dichotomy': lambda e, b, w: run_dichotomy(e, b.hi, b.lo, w),
  'bc_evidence': lambda e, b, w: run_bc_evidence(e, w),
  'padic': lambda e, b, w: run_padic(e, w),
}

def run_experiment(exp, battery, workers=None):
  """
  Run one experiment, turning library errors into an anomaly.
  """
  try:
    return RUNNERS[exp.kind](exp, battery, workers)
  except MdalabError as e:
    res = _result(exp)
    _anomaly(res, '{}: {}'.format(type(e).__name__, e))
    return res

def run_battery(b, workers=None):
  logger.info('battery {}: {} experiments'.format(b.name, len(b.experiments)))
  return [ run_experiment(e, b, workers) for e in b.experiments ]

def summary(b, results):
  """
  JSON summary document.  Its "config" entry parses back into the battery.
  """
  anomalies = [ '{}: {}'.format(r['name'], a) for r in results for a in r['anomalies'] ]
  return { 'schema_version': config.SCHEMA_VERSION, 'battery': b.name,
           'config': b.as_dict(), 'config_hash': b.config_hash(),
           'seed': b.seed, 'generator': config.GENERATOR_ID,
           'experiments': results, 'anomalies': anomalies,
           'disclaimer': DISCLAIMER }
