"""
borel_cantelli - the divergence Borel-Cantelli lower bound

    |limsup E_q| >= limsup_Q (sum_{s<=Q} mu(E_s))^2 / sum_{s,t<=Q} mu(E_s n E_t)

evaluated at finite truncations.  Pair measures come from one of three
sources, recorded in EventStats.source:

  exact         1-D interval intersections
  monte-carlo   one sample set, pairs = M^T M / samples
  independence  mu(E_s n E_t) = mu(E_s) mu(E_t) for s != t

For Monte Carlo stats the bound is also given as an interval: with
Z = number of events holding a sample, the numerator is E[Z]^2 and the
denominator E[Z^2], and both means carry a 95% normal interval.
"""
import math
import logging
import numpy as np
from scipy.stats import norm

from mdalab.core import regions, sampler
from mdalab.errors import DomainError, UndefinedRatioError, ValidationError
from mdalab.values import MeasureEstimate

logger = logging.getLogger(__name__)

SOURCES = ('exact', 'monte-carlo', 'independence')
TOL = 1e-12
CLIP_TOL = 1e-9

class EventStats:
  def __init__(self, qs, singles, pairs=None, source='independence', membership=None):
    if source not in SOURCES:
      raise DomainError('unknown pair source {!r}'.format(source))
    self.qs = np.asarray(qs, dtype=np.int64)
    self.singles = np.asarray(singles, dtype=np.float64)
    if self.qs.shape != self.singles.shape:
      raise ValidationError('{} events but {} single measures'.format(
                            self.qs.size, self.singles.size))
    if np.any(np.diff(self.qs) <= 0):
      raise ValidationError('event indices must increase')
    if np.any(self.singles < 0) or np.any(self.singles > 1):
      raise ValidationError('single measures must lie in [0,1]')
    self.source = source
    self.pairs = None
    if source != 'independence':
      if pairs is None:
        raise ValidationError('{} stats need a pair table'.format(source))
      self.pairs = np.asarray(pairs, dtype=np.float64)
      k = self.qs.size
      if self.pairs.shape != (k, k):
        raise ValidationError('pair table shape {} != ({}, {})'.format(
                              self.pairs.shape, k, k))
      if not np.allclose(self.pairs, self.pairs.T, atol=TOL, rtol=0):
        raise ValidationError('pair table must be symmetric')
      if not np.allclose(np.diag(self.pairs), self.singles, atol=TOL, rtol=0):
        raise ValidationError('pair table diagonal must equal the single measures')
      cap = np.minimum.outer(self.singles, self.singles)
      if np.any(self.pairs > cap + TOL) or np.any(self.pairs < -TOL):
        raise ValidationError('pair measure outside [0, min(mu_s, mu_t)]')
    self.membership = membership

  @classmethod
  def from_membership(cls, qs, M):
    """
    Monte Carlo stats from a boolean samples x events matrix.
    """
    M = np.asarray(M, dtype=bool)
    N = M.shape[0]
    Mf = M.astype(np.float64)
    pairs = (Mf.T @ Mf) / N
    return cls(qs, Mf.mean(axis=0), pairs, 'monte-carlo', membership=M)

  def __len__(self):
    return self.qs.size

  def prefix(self, Q):
    """
    Number of events with index <= Q.
    """
    return int(np.searchsorted(self.qs, Q, side='right'))

  def pair(self, i, j):
    if self.pairs is not None:
      return float(self.pairs[i, j])
    return float(self.singles[i]) if i == j else float(self.singles[i] * self.singles[j])

  def _cumulative(self):
    """
    Running sum_{s} mu_s and sum_{s,t} mu(E_s n E_t) over prefixes.
    """
    S = np.cumsum(self.singles)
    if self.pairs is None:
      sq = np.cumsum(self.singles ** 2)
      D = S + S * S - sq
    else:
      lower = np.tril(self.pairs, -1).sum(axis=1)
      D = np.cumsum(2.0 * lower + np.diag(self.pairs))
    return S, D

def bc_lower_bound(stats, Q):
  """
  (sum mu)^2 / (double sum of pair measures) over events with index <= Q.
  """
  k = stats.prefix(Q)
  if k == 0:
    raise UndefinedRatioError('no events up to Q={}'.format(Q))
  S, D = stats._cumulative()
  if D[k - 1] <= 0:
    raise UndefinedRatioError('Borel-Cantelli bound undefined at Q={}: zero denominator'.format(Q))
  raw = float(S[k - 1] ** 2 / D[k - 1])
  if raw > 1.0 + CLIP_TOL:
    # sum of squares above the pair sum: the pair table is not from one measure
    logger.warning('bound {:.12g} above 1 at Q={} ({} stats); clipped'.format(
                   raw, Q, stats.source))
  return min(1.0, raw)

def bc_bound_interval(stats, Q, confidence=0.95):
  """
  (low, high) for the bound.  A point interval unless the stats are
  Monte Carlo, where the sample means of Z and Z^2 carry normal intervals.
  """
  b = bc_lower_bound(stats, Q)
  if stats.source != 'monte-carlo' or stats.membership is None:
    return (b, b)
  k = stats.prefix(Q)
  Z = stats.membership[:, :k].sum(axis=1).astype(np.float64)
  N = Z.size
  z = float(norm.ppf(0.5 + confidence / 2))
  def band(v):
    m = v.mean()
    h = z * v.std(ddof=1) / math.sqrt(N) if N > 1 else m
    return max(0.0, m - h), m + h
  s_lo, s_hi = band(Z)
  d_lo, d_hi = band(Z * Z)
  lo = s_lo ** 2 / d_hi if d_hi > 0 else 0.0
  hi = min(1.0, s_hi ** 2 / d_lo) if d_lo > 0 else 1.0
  return (min(lo, b), max(hi, b))

def bc_scan(stats, grid):
  """
  Bound at each grid point with the running max as the limsup proxy.
  Rows: (Q, bound, running max, low, high); bound is None where undefined.
  """
  rows = []
  best = None
  for Q in sorted(int(Q) for Q in grid):
    try:
      b = bc_lower_bound(stats, Q)
      lo, hi = bc_bound_interval(stats, Q)
    except UndefinedRatioError:
      rows.append((Q, None, best, None, None))
      continue
    best = b if best is None else max(best, b)
    rows.append((Q, b, best, lo, hi))
  return rows

#
# building stats
#

def independence_stats(mu, qs=None):
  mu = np.asarray(mu, dtype=np.float64)
  if qs is None:
    qs = np.arange(1, mu.size + 1)
  return EventStats(qs, mu, source='independence')

def independence_bound(mu):
  """
  Closed form S^2 / (S + S^2 - sum mu^2) for independent events.
  """
  mu = np.asarray(mu, dtype=np.float64)
  S = math.fsum(mu)
  den = S + S * S - math.fsum(mu * mu)
  if den <= 0:
    raise UndefinedRatioError('independence bound undefined: zero denominator')
  return S * S / den

def exact_pair_stats_1d(f, qs, coprime):
  """
  Exact 1-D stats: single slices and all pairwise intersections.
  """
  qs = np.asarray(sorted(int(q) for q in qs), dtype=np.int64)
  unions = [ regions.interval_union_for_q(f, int(q), coprime) for q in qs ]
  singles = np.asarray([ float(u.measure()) for u in unions ])
  k = qs.size
  pairs = np.zeros((k, k))
  for i in range(k):
    pairs[i, i] = singles[i]
    for j in range(i):
      v = float(unions[i].intersection_measure(unions[j]))
      pairs[i, j] = pairs[j, i] = min(v, singles[i], singles[j])
  logger.debug('exact 1-D pair table for {} events'.format(k))
  return EventStats(qs, singles, pairs, 'exact')

def mc_pair_stats(f, qs, n, mode, coprime, samples, seed):
  """
  Monte Carlo stats from one sample set over all events at once.
  """
  qs = np.asarray(sorted(int(q) for q in qs), dtype=np.int64)
  pts = sampler.points(seed, 0, samples, n)
  M = sampler.membership_matrix(pts, qs, f, mode, coprime)
  return EventStats.from_membership(qs, M)

def quasi_independence_ratio(q, r, f, n, intersection):
  """
  |H(q) n H(r)| / (psi(q) ln(q)^(n-1) psi(r) ln(r)^(n-1)).
  """
  if q == r:
    raise DomainError('quasi-independence ratio needs q != r')
  value = intersection.value if isinstance(intersection, MeasureEstimate) else float(intersection)
  e = n - 1
  den = f(q) * math.log(q) ** e * f(r) * math.log(r) ** e
  if not den > 0 or not math.isfinite(den):
    raise UndefinedRatioError('quasi-independence ratio undefined at ({}, {})'.format(q, r))
  return value / den
