"""
mdalab application.

  python -m mdalab [--log LEVEL] [--workers N] <command> ...

Commands:
  measure      single-slice measures for (q, n, delta, mode, coprime)
  union        truncated union estimates over [Q0, Q] at grid checkpoints
  sums         divergence-sum partial values and the cond1 ratio scan
  bc-bound     Borel-Cantelli lower bound scan
  fiber-check  cross fibering report for a matrix file, or exhaustive search
  experiment   run a battery file through the DAG, writing CSV/JSON
  padic        weighted solution counts for sampled points

Families on the command line are JSON objects, e.g.
  --family '{"name": "power_log", "c": 0.25, "a": 1}'

Exit status: 0 success, 1 anomalies flagged, 2 usage or configuration error.
"""
import os
import sys
import json
import argparse
import importlib
import logging
from fractions import Fraction

from mdalab import config, harness
from mdalab.core import psi as psimod, regions, sampler, fibering, borel_cantelli as bc
from mdalab.errors import ConfigError, DomainError, ValidationError, MdalabError
from mdalab.plugins.renderers.CsvTable import COLUMNS, fmt

logger = logging.getLogger(__name__)

DEFAULT_DAG = [
  { 'name': 'input', 'class': 'ExperimentInput' },
  { 'name': 'dichotomy', 'class': 'DichotomyScan', 'observe': [ 'input' ] },
  { 'name': 'bc', 'class': 'BCEvidence', 'observe': [ 'input' ] },
  { 'name': 'padic', 'class': 'PadicScan', 'observe': [ 'input' ] },
  { 'name': 'results', 'class': 'Accumulator', 'observe': [ 'dichotomy', 'bc', 'padic' ] },
  { 'name': 'csv', 'class': 'renderers.CsvTable', 'observe': [ 'results' ] },
  { 'name': 'summary', 'class': 'renderers.JsonSummary', 'observe': [ 'results' ] },
]

#
# DAG construction
#

def find_class(name):
  s = name.split('.')
  path = '.'.join([ 'mdalab', 'plugins' ] + s[:-1])
  try:
    mod = importlib.import_module(path)
  except ImportError:
    raise ConfigError('unknown plugin module {}'.format(path), field='dag')
  if not hasattr(mod, s[-1]):
    raise ConfigError('unknown class {} in {}'.format(s[-1], path), field='dag')
  return getattr(mod, s[-1])

def configure(nodespecs, defaults=None):
  """
  Build the DAG from node specs: name, class, optional kwargs and observe.
  defaults: { class name: kwargs } merged under each spec's kwargs.
  """
  nodes = {}
  for i, spec in enumerate(nodespecs):
    field = 'dag[{}]'.format(i)
    if 'class' not in spec:
      raise ConfigError('no class in node specification', field=field)
    if 'name' not in spec:
      raise ConfigError('no name in node specification', field=field)
    name = spec['name']
    if name in nodes:
      raise ConfigError('duplicate node name {}'.format(name), field=field)
    c = find_class(spec['class'])
    kwargs = dict((defaults or {}).get(spec['class'], {}))
    kwargs.update(spec.get('kwargs', {}))
    kwargs['name'] = name
    try:
      nodes[name] = c(**kwargs)
    except (TypeError, ValueError) as e:
      raise ConfigError('while creating node {}: {}'.format(name, e), field=field)
    for obs in spec.get('observe', []):
      if obs not in nodes:
        raise ConfigError('{} observing unknown node {}'.format(name, obs), field=field)
      nodes[obs].attach(nodes[name])
  return nodes

def inject(nodes, data):
  """
  Send one payload, or a list of them, to the node named in each.
  """
  for d in (data if isinstance(data, list) else [ data ]):
    if d.get('name') not in nodes:
      raise ConfigError('payload for unknown node {!r}'.format(d.get('name')))
    nodes[d['name']].update(d)

#
# helpers
#

def parse_family(text, field='--family'):
  try:
    spec = json.loads(text)
  except json.JSONDecodeError as e:
    raise ConfigError(e.msg, field=field, line=e.lineno, column=e.colno)
  return psimod.from_spec(spec, field)

def parse_delta(text):
  """
  Decimal or p/q; rationals stay exact.
  """
  if '/' in text:
    return Fraction(text)
  return float(text)

def print_rows(rows):
  print(','.join(COLUMNS))
  for r in rows:
    print(','.join(fmt(r[c]) for c in COLUMNS))

def add_range(p, samples=True):
  p.add_argument('--family', required=True, help='family JSON object')
  p.add_argument('--n', type=int, default=1, help='dimension')
  p.add_argument('--mode', choices=regions.MODES, default='product')
  p.add_argument('--coprime', action='store_true', help='coprime numerators')
  p.add_argument('--Q0', type=int, default=1)
  p.add_argument('--Q', type=int, required=True)
  p.add_argument('--grid-ratio', type=float, default=2.0)
  if samples:
    p.add_argument('--samples', type=int, default=10000)
    p.add_argument('--seed', type=int, required=True, help='64-bit seed')

def experiment_config(args):
  f = parse_family(args.family)
  grid = psimod.geometric_grid(args.Q0, args.Q, args.grid_ratio)
  return sampler.ExperimentConfig(f, args.n, args.mode, args.coprime, args.Q0, args.Q,
                                  getattr(args, 'samples', 1), getattr(args, 'seed', 0),
                                  grid)

#
# commands
#

def cmd_measure(args):
  for q in args.q:
    for d in args.delta:
      spec = regions.RegionSpec(q, args.n, d, args.mode, args.coprime)
      m = regions.region_measure(spec, args.tol)
      extra = ' +- {:.3g}'.format(m.error) if m.error else ''
      value = m.rational if m.rational is not None else m.value
      print('q={} n={} delta={} {}{}: {} ({}{})'.format(q, args.n, d, args.mode,
            ' coprime' if args.coprime else '', fmt(value), m.provenance, extra))
  return 0

def cmd_union(args):
  cfg = experiment_config(args)
  if args.exact:
    if cfg.n != 1:
      raise ConfigError('--exact needs --n 1', field='--exact')
    curve = regions.truncated_union_scan(cfg.family, cfg.Q0, cfg.Q_grid, cfg.coprime)
  else:
    curve = sampler.estimate_union_measure(cfg, args.workers)
  print_rows([ harness.row(Qc, cfg.family, est) for Qc, est in curve ])
  return 0

def cmd_sums(args):
  f = parse_family(args.family)
  kinds = args.criterion or psimod.CRITERIA
  print('criterion,n,Q,partial_sum,metadata')
  for k in kinds:
    c = psimod.SumCriterion(k, args.n)
    print('{},{},{},{},{}'.format(k, args.n, args.Q, fmt(psimod.partial_sum(f, c, args.Q)),
                                  psimod.classify(f, c)))
  if args.cond1:
    grid = psimod.geometric_grid(1, args.Q, 2)
    print('Q,cond1_ratio,running_max')
    for Q, r, best in psimod.cond1_scan(f, args.n, grid):
      print('{},{},{}'.format(Q, fmt(r), fmt(best)))
  return 0

def cmd_bc_bound(args):
  if args.harmonic:
    mu = [ 1.0 / k for k in range(1, args.harmonic + 1) ]
    stats = bc.independence_stats(mu)
    grid = psimod.geometric_grid(1, args.harmonic, 2)
  else:
    if args.family is None or args.Q is None:
      raise ConfigError('--family and --Q are required without --harmonic')
    cfg = experiment_config(args)
    qs, vals = sampler.active_slices(cfg.family, cfg.Q0, cfg.Q)
    if args.pairs == 'exact':
      stats = bc.exact_pair_stats_1d(cfg.family, qs, cfg.coprime)
    elif args.pairs == 'monte-carlo':
      stats = bc.mc_pair_stats(cfg.family, qs, cfg.n, cfg.mode, cfg.coprime,
                               args.samples, args.seed)
    else:
      mu = [ regions.region_measure(regions.RegionSpec(int(q), cfg.n, float(v), cfg.mode,
                                                       cfg.coprime)).value
             for q, v in zip(qs, vals) ]
      stats = bc.independence_stats(mu, qs)
    grid = cfg.Q_grid
  print('Q,bound,running_max,low,high')
  for Q, b, best, lo, hi in bc.bc_scan(stats, grid):
    print('{},{},{},{},{}'.format(Q, fmt(b), fmt(best), fmt(lo), fmt(hi)))
  return 0

def cmd_fiber_check(args):
  if args.exhaustive:
    rep = fibering.exhaustive_check(args.exhaustive, args.weight_samples, args.seed)
    print(rep.summary())
    return 0 if rep.ok() else 1
  if not args.matrix:
    raise ConfigError('give a matrix file or --exhaustive k')
  with open(args.matrix, 'r') as f:
    try:
      spec = json.loads(f.read())
    except json.JSONDecodeError as e:
      raise ConfigError(e.msg, line=e.lineno, column=e.colno)
  S = fibering.product_set_from_spec(spec)
  rep = fibering.cross_fibering_check(S)
  d = fibering.decompose(S)
  print(rep.verdict())
  print('measure {}  right_x {}  right_y {}'.format(rep.left.measure, rep.right_x,
                                                    rep.right_y))
  print('X0 {} X1 {} Xnt {} Y0 {} Y1 {} Ynt {}'.format(*d.as_tuple()))
  print('S n (X0 x Y1): {} by rows, {} by columns'.format(d.by_x, d.by_y))
  return 0 if rep.equivalence_holds else 1

def cmd_padic(args):
  base = parse_family(args.family)
  try:
    ws = json.loads(args.weights)
  except json.JSONDecodeError as e:
    raise ConfigError(e.msg, field='--weights', line=e.lineno, column=e.colno)
  spec = { 'name': 'cli', 'kind': 'padic', 'family': base.spec(), 'n': args.n,
           'mode': args.mode, 'coprime': args.coprime, 'Q0': 1, 'Q': args.Q,
           'grid_ratio': args.grid_ratio, 'primes': args.primes, 'weights': ws }
  exp = harness.Experiment(spec, 'padic', args.seed, args.samples)
  res = harness.run_padic(exp)
  print('Q,partial_sum,mean_count')
  for s, m in zip(res['extras']['partial_sums'], res['extras']['mean_counts']):
    print('{},{},{}'.format(s['Q'], fmt(s['sum']), fmt(m['mean'])))
  return 1 if res['anomalies'] else 0

def sidecar_log(path):
  h = logging.FileHandler(path, mode='w')
  h.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s %(message)s'))
  h.setLevel(logging.INFO)
  logging.getLogger().addHandler(h)
  if logging.getLogger().level > logging.INFO or logging.getLogger().level == 0:
    logging.getLogger().setLevel(logging.INFO)
  return h

def run_battery_dag(b, out_dir, workers=None):
  """
  Push a battery through its DAG; returns the JSON summary.
  """
  defaults = { 'renderers.CsvTable': { 'out_dir': out_dir },
               'renderers.JsonSummary': { 'out_dir': out_dir } }
  nodes = configure(b.dag or DEFAULT_DAG, defaults)
  entry = (b.dag or DEFAULT_DAG)[0]['name']
  inject(nodes, [ { 'name': entry, 'action': 'alert', 'battery': b, 'workers': workers },
                  { 'name': entry, 'action': 'report' } ])
  for n in nodes.values():
    if getattr(n, 'summary', None) is not None:
      return n.summary
  return harness.summary(b, [])

def cmd_experiment(args):
  b = harness.Battery.load(args.config, seed=args.seed, samples=args.samples)
  os.makedirs(args.out, exist_ok=True)
  h = sidecar_log(os.path.join(args.out, '{}.log'.format(b.name)))
  try:
    summary = run_battery_dag(b, args.out, args.workers)
  finally:
    logging.getLogger().removeHandler(h)
    h.close()
  for a in summary['anomalies']:
    print('anomaly: {}'.format(a))
  print('{}: {} experiments, {} anomalies'.format(b.name, len(summary['experiments']),
                                                  len(summary['anomalies'])))
  return 1 if summary['anomalies'] else 0

#
# entry point
#

def parser():
  p = argparse.ArgumentParser(prog='mdalab')
  p.add_argument('--log', help='logging level')
  p.add_argument('--workers', type=int, default=None,
                 help='sampler worker threads (default MDALAB_WORKERS or 1)')
  sub = p.add_subparsers(dest='command', required=True)

  m = sub.add_parser('measure', help='single-slice measures')
  m.add_argument('--q', type=int, nargs='+', default=[ 1 ])
  m.add_argument('--n', type=int, default=1)
  m.add_argument('--delta', type=parse_delta, nargs='+', required=True)
  m.add_argument('--mode', choices=regions.MODES, default='product')
  g = m.add_mutually_exclusive_group()
  g.add_argument('--coprime', action='store_true')
  g.add_argument('--plain', dest='coprime', action='store_false')
  m.add_argument('--tol', type=float, default=config.CONVOLUTION_TOL)
  m.set_defaults(func=cmd_measure)

  u = sub.add_parser('union', help='truncated union measures')
  add_range(u)
  u.add_argument('--exact', action='store_true', help='exact interval sweep (n = 1)')
  u.set_defaults(func=cmd_union)

  s = sub.add_parser('sums', help='divergence-sum partial values')
  s.add_argument('--family', required=True)
  s.add_argument('--n', type=int, default=1)
  s.add_argument('--Q', type=int, required=True)
  s.add_argument('--criterion', choices=psimod.CRITERIA, action='append')
  s.add_argument('--cond1', action='store_true', help='cond1 ratio scan')
  s.set_defaults(func=cmd_sums)

  b = sub.add_parser('bc-bound', help='Borel-Cantelli lower bound scan')
  b.add_argument('--family')
  b.add_argument('--n', type=int, default=1)
  b.add_argument('--mode', choices=regions.MODES, default='product')
  b.add_argument('--coprime', action='store_true')
  b.add_argument('--Q0', type=int, default=1)
  b.add_argument('--Q', type=int)
  b.add_argument('--grid-ratio', type=float, default=2.0)
  b.add_argument('--pairs', choices=harness.PAIR_SOURCES, default='independence')
  b.add_argument('--samples', type=int, default=10000)
  b.add_argument('--seed', type=int, default=0)
  b.add_argument('--harmonic', type=int, metavar='Q',
                 help='synthetic independent events with mu_k = 1/k up to Q')
  b.set_defaults(func=cmd_bc_bound)

  f = sub.add_parser('fiber-check', help='cross fibering check')
  f.add_argument('matrix', nargs='?', help='JSON file with weights and 0/1 matrix')
  f.add_argument('--exhaustive', type=int, metavar='K')
  f.add_argument('--weight-samples', type=int, default=25)
  f.add_argument('--seed', type=int, default=0)
  f.set_defaults(func=cmd_fiber_check)

  e = sub.add_parser('experiment', help='run a battery')
  e.add_argument('config', help='battery JSON file')
  e.add_argument('--out', default='output', help='output directory')
  e.add_argument('--seed', type=int, default=None, help='override battery seed')
  e.add_argument('--samples', type=int, default=None, help='override sample counts')
  e.set_defaults(func=cmd_experiment)

  a = sub.add_parser('padic', help='weighted p-adic solution counts')
  add_range(a)
  a.add_argument('--primes', type=int, nargs='+', required=True)
  a.add_argument('--weights', required=True, help='JSON list of weight objects')
  a.set_defaults(func=cmd_padic)
  return p

def main(argv=None):
  args = parser().parse_args(argv)
  if args.log:
    numeric_level = getattr(logging, args.log.upper(), None)
    if not isinstance(numeric_level, int):
      raise ValueError('Invalid log level {}'.format(args.log))
    logging.basicConfig(level=numeric_level)
  try:
    if args.workers is not None:
      config.override(workers=args.workers)
    return args.func(args)
  except (ConfigError, ValidationError, DomainError) as e:
    logger.error('{}: {}'.format(type(e).__name__, e))
    print('error: {}'.format(e), file=sys.stderr)
    return 2
  except MdalabError as e:
    logger.error('{}: {}'.format(type(e).__name__, e))
    print('error: {}'.format(e), file=sys.stderr)
    return 1
  except OSError as e:
    print('error: {}'.format(e), file=sys.stderr)
    return 2

def run():
  sys.exit(main())
