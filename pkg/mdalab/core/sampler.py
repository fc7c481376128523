"""
sampler - Monte Carlo measures of truncated limsup sets.

Sample i is a pure function of (seed, i): a Philox 4x64-10 stream keyed
by the seed and positioned at counter i * ceil(n/4), so every sample owns
a whole number of counter blocks.  Coordinates take the top 53 bits of
each 64-bit word, giving points in [0,1)^n.

Samples are processed in fixed-size chunks.  Each chunk produces an
integer HitCounter; counters add in any order, so the worker count
changes throughput and never results.
"""
import math
import logging
import numbers
from concurrent.futures import ThreadPoolExecutor
import numpy as np

from mdalab import config
from mdalab.core import arith, psi as psimod
from mdalab.errors import DomainError, ResourceError
from mdalab.values import HitCounter, MeasureEstimate

logger = logging.getLogger(__name__)

MODES = ('product', 'max')

#
# random points
#

def points(seed, start, count, n):
  """
  Points for sample indices start .. start+count-1, shape (count, n).
  """
  if seed < 0 or seed >= 2**64:
    raise DomainError('seed must be a 64-bit unsigned integer, got {}'.format(seed))
  blocks = -(-n // 4)
  bg = np.random.Philox(key=int(seed))
  if start > 0:
    bg.advance(int(start) * blocks)
  raw = bg.random_raw(int(count) * blocks * 4).reshape(int(count), blocks * 4)
  return (raw[:, :n] >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)

#
# membership
#

def _check_mode(mode):
  if mode not in MODES:
    raise DomainError('mode must be one of {}, got {!r}'.format(MODES, mode))

def _finite(delta, q):
  if not math.isfinite(delta):
    raise DomainError('psi({}) is infinite; membership needs a finite value'.format(q))
  return delta

def slice_distances(pts, q, coprime):
  """
  ||q x_i|| (or ||q x_i||') for every coordinate of every point.
  """
  pts = np.asarray(pts, dtype=np.float64)
  if coprime:
    return arith.dist_nearest_coprime_array(q, pts)
  return arith.dist_nearest_array(q, pts)

def _inside(d, delta, mode):
  # d: (..., n) distances
  if mode == 'product':
    return np.prod(d, axis=-1) < delta
  return np.max(d, axis=-1) ** d.shape[-1] < delta

def membership_array(pts, q, delta, mode, coprime):
  """
  Vectorized strict membership of points (shape (N, n)) in one q-slice.
  """
  _check_mode(mode)
  pts = np.asarray(pts, dtype=np.float64)
  if delta <= 0:
    return np.zeros(pts.shape[0], dtype=bool)
  if coprime:
    # ||qx|| <= ||qx||': only points inside the plain slice need the coprime search
    near = _inside(arith.dist_nearest_array(q, pts), delta, mode)
    out = np.zeros(pts.shape[0], dtype=bool)
    if near.any():
      out[near] = _inside(slice_distances(pts[near], q, True), delta, mode)
    return out
  return _inside(slice_distances(pts, q, False), delta, mode)

def membership(x, q, f, mode='product', coprime=False):
  """
  True when x lies in the q-slice of the set defined by f.
  """
  _check_mode(mode)
  delta = _finite(f(q), q)
  if delta <= 0:
    return False
  dist = arith.dist_nearest_coprime if coprime else arith.dist_nearest
  d = [ dist(q, xi) for xi in x ]
  if mode == 'product':
    return math.prod(d) < delta
  return max(d) ** len(d) < delta

def membership_matrix(pts, qs, f, mode='product', coprime=False):
  """
  Boolean matrix M[i, j]: sample i lies in the slice of qs[j].
  """
  qs = np.asarray(qs, dtype=np.int64)
  vals = f.values_at(qs)
  M = np.zeros((np.shape(pts)[0], qs.size), dtype=bool)
  for j, (q, delta) in enumerate(zip(qs, vals)):
    M[:, j] = membership_array(pts, int(q), _finite(float(delta), q), mode, coprime)
  return M

#
# experiment configuration
#

class ExperimentConfig:
  """
  One sampled experiment: a family on [Q0, Q] in dimension n, with
  checkpoints Q_grid (sorted, inside [Q0, Q], Q always last).
  """
  def __init__(self, family, n=1, mode='product', coprime=False, Q0=1, Q=1,
               samples=1000, seed=0, Q_grid=None):
    _check_mode(mode)
    if int(n) != n or n < 1:
      raise DomainError('n must be a positive integer, got {}'.format(n))
    if int(Q0) != Q0 or int(Q) != Q or Q0 < 1 or Q < Q0:
      raise DomainError('need 1 <= Q0 <= Q, got Q0={} Q={}'.format(Q0, Q))
    if int(samples) != samples or samples < 1:
      raise DomainError('samples must be >= 1, got {}'.format(samples))
    if not isinstance(seed, numbers.Integral) or seed < 0 or seed >= 2**64:
      raise DomainError('seed must be a 64-bit unsigned integer, got {!r}'.format(seed))
    self.family = family
    self.n = int(n)
    self.mode = mode
    self.coprime = bool(coprime)
    self.Q0 = int(Q0)
    self.Q = int(Q)
    self.samples = int(samples)
    self.seed = int(seed)
    grid = sorted(set(int(x) for x in (Q_grid or [ Q ])))
    if grid[0] < self.Q0 or grid[-1] > self.Q:
      raise DomainError('Q_grid must lie within [{}, {}]'.format(self.Q0, self.Q))
    if grid[-1] != self.Q:
      grid.append(self.Q)
    self.Q_grid = grid

  def as_dict(self):
    return { 'family': self.family.spec(), 'n': self.n, 'mode': self.mode,
             'coprime': self.coprime, 'Q0': self.Q0, 'Q': self.Q,
             'samples': self.samples, 'seed': self.seed,
             'Q_grid': list(self.Q_grid) }

  def __repr__(self):
    return 'ExperimentConfig({})'.format(self.as_dict())

#
# union estimates
#

def _first_hits(pts, qs, vals, mode, coprime):
  """
  Smallest q (from increasing qs) whose slice holds each point; 0 if none.
  """
  first = np.zeros(pts.shape[0], dtype=np.int64)
  alive = np.arange(pts.shape[0])
  for q, delta in zip(qs, vals):
    if alive.size == 0:
      break
    hit = membership_array(pts[alive], int(q), float(delta), mode, coprime)
    if hit.any():
      first[alive[hit]] = q
      alive = alive[~hit]
  return first

def _chunk_counter(cfg, qs, vals, start, count):
  pts = points(cfg.seed, start, count, cfg.n)
  hc = HitCounter(cfg.Q_grid)
  hc.fill(_first_hits(pts, qs, vals, cfg.mode, cfg.coprime))
  logger.debug('chunk at {}: {} of {} samples hit'.format(start,
               int(hc.bins.sum()), count))
  return hc

def active_slices(f, Q0, Q):
  """
  (qs, values) with psi(q) > 0 over [Q0, Q].
  """
  vals = f.values(Q)[Q0 - 1:]
  if not np.all(np.isfinite(vals)):
    bad = Q0 + int(np.flatnonzero(~np.isfinite(vals))[0])
    raise DomainError('psi({}) is infinite; cannot sample its slice'.format(bad))
  qs = np.arange(Q0, Q + 1, dtype=np.int64)
  keep = vals > 0
  return qs[keep], vals[keep]

def estimate_union_measure(cfg, workers=None):
  """
  Estimates of |union of slices over [Q0, Qc]| at every checkpoint Qc.
  Returns a list of (Qc, MeasureEstimate).
  """
  qs, vals = active_slices(cfg.family, cfg.Q0, cfg.Q)
  if qs.size == 0:
    return [ (Qc, MeasureEstimate.exact(0.0)) for Qc in cfg.Q_grid ]
  s = config.settings()
  workers = workers or s.workers
  starts = range(0, cfg.samples, s.chunk)
  total = HitCounter(cfg.Q_grid)
  def job(start):
    return _chunk_counter(cfg, qs, vals, start, min(s.chunk, cfg.samples - start))
  if workers > 1:
    with ThreadPoolExecutor(max_workers=workers) as pool:
      for hc in pool.map(job, starts):
        total.add(hc)
  else:
    for start in starts:
      total.add(job(start))
  cum = total.cumulative()
  return [ (int(Qc), MeasureEstimate.from_hits(int(h), cfg.samples, cfg.seed,
                                               config.GENERATOR_ID))
           for Qc, h in zip(total.checkpoints, cum) ]

def estimate_pairwise_intersection(q, r, f, n, mode, coprime, samples, seed):
  """
  Hit-fraction estimate of |H(q) n H(r)|.
  """
  _check_mode(mode)
  dq = _finite(f(q), q)
  dr = _finite(f(r), r)
  if dq <= 0 or dr <= 0:
    return MeasureEstimate.exact(0.0)
  chunk = config.settings().chunk
  hits = 0
  for start in range(0, samples, chunk):
    pts = points(seed, start, min(chunk, samples - start), n)
    a = membership_array(pts, q, dq, mode, coprime)
    if q != r:
      a &= membership_array(pts, r, dr, mode, coprime)
    hits += int(np.count_nonzero(a))
  return MeasureEstimate.from_hits(hits, samples, seed, config.GENERATOR_ID)

#
# counting
#

def solution_hits(x, f, Q, mode='product', coprime=False, strict=True, vals=None):
  """
  Boolean array over q = 1..Q: x lies in the q-slice.  strict=False
  uses <= (weighted p-adic counting); psi(q) = 0 never counts.
  """
  _check_mode(mode)
  x = np.asarray(x, dtype=np.float64)
  if vals is None:
    vals = f.values(Q)
  if not np.all(np.isfinite(vals)):
    raise DomainError('psi is infinite below Q={}'.format(Q))
  qs = np.arange(1, Q + 1, dtype=np.int64)
  active = vals > 0
  if coprime:
    d = np.ones((Q, x.size))
    for q in qs[active]:
      d[q - 1] = arith.dist_nearest_coprime_array(int(q), x)
  else:
    t = qs[:, None].astype(np.float64) * x[None, :]
    d = np.abs(t - np.rint(t))
  stat = np.prod(d, axis=1) if mode == 'product' else np.max(d, axis=1) ** x.size
  ok = stat < vals if strict else stat <= vals
  return ok & active

def solution_count(x, f, Q, mode='product', coprime=False, strict=True):
  """
  #{q <= Q : x in the q-slice}.
  """
  return int(np.count_nonzero(solution_hits(x, f, Q, mode, coprime, strict)))

class RadialPsi:
  """
  Psi(q) = psi(||q||_inf) for integer vectors q.
  """
  def __init__(self, f):
    self.f = f

  def __call__(self, qvecs):
    norms = np.max(np.abs(np.asarray(qvecs, dtype=np.int64)), axis=-1)
    out = np.zeros(norms.shape)
    nz = norms > 0
    if nz.any():
      out[nz] = self.f.values(int(norms.max()))[norms[nz] - 1]
    return out

  def spec(self):
    return { 'radial': self.f.spec() }

def radial_Psi(f):
  return RadialPsi(f)

def linear_forms_count(X, Psi, Qbound, coprime=False):
  """
  Number of nonzero q in Z^m with ||q||_inf <= Qbound and
  prod_i |(qX)_i + p_i| < Psi(q), p chosen per coordinate to minimize
  the distance.  With coprime set, p_i must satisfy
  gcd(p_i, gcd(q_1..q_m)) = 1.
  """
  X = np.atleast_2d(np.asarray(X, dtype=np.float64))
  m = X.shape[0]
  if Qbound < 1:
    raise DomainError('Qbound must be >= 1, got {}'.format(Qbound))
  needed = (2 * int(Qbound) + 1) ** m - 1
  budget = config.settings().enum_budget
  if needed > budget:
    raise ResourceError('linear-forms enumeration', needed, budget)
  axes = [ np.arange(-Qbound, Qbound + 1, dtype=np.int64) ] * m
  Qv = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, m)
  Qv = Qv[np.any(Qv != 0, axis=1)]
  Y = Qv.astype(np.float64) @ X
  bound = Psi(Qv)
  if coprime:
    g = np.gcd.reduce(np.abs(Qv), axis=1)
    D = np.empty_like(Y)
    for gv in np.unique(g):
      sel = g == gv
      D[sel] = arith.coprime_distance_t(Y[sel], int(gv))
  else:
    D = np.abs(Y - np.rint(Y))
  return int(np.count_nonzero((np.prod(D, axis=1) < bound) & (bound > 0)))

def fiber_slice_consistency(x, q, f, coprime=False):
  """
  For x = (x1, y): x lies in the n-dimensional product q-slice of psi
  exactly when y lies in the (n-1)-dimensional q-slice of the
  conditional function psi_(x1).  Returns (joint, fibered).
  """
  x = [ float(v) for v in x ]
  if len(x) < 2:
    raise DomainError('fiber consistency needs n >= 2')
  joint = membership(x, q, f, 'product', coprime)
  dist = arith.dist_nearest_coprime if coprime else arith.dist_nearest
  if coprime:
    d1 = dist(q, x[0])
    base = f(q)
    cond = (math.inf if base > 0 else 0.0) if d1 == 0 else base / d1
  else:
    cond = psimod.conditional_psi(f, [ x[0] ])(q)
  rest = math.prod(dist(q, v) for v in x[1:])
  fibered = cond > 0 and rest < cond
  return joint, fibered
