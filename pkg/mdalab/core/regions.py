"""
regions - measures of single approximation domains and 1-D unions.

A RegionSpec is one q-slice: the set of x in [0,1]^n with
  product mode:  prod ||q x_i|| < delta
  max mode:      (max ||q x_i||)^n < delta
where ||.|| is replaced by ||.||' (nearest integer coprime to q) when the
coprime flag is set.  Minimizing over p coordinate by coordinate makes
this the same set as the union of the hyperbolic (or cubical) domains
around the rational points p/q.

Product-mode coprime measures come from the exact law of ||qx||' (a
piecewise-linear CDF built from the coprime gap table).  Dimension 2 is
integrated analytically panel by panel; dimension 3 and up use scipy's
adaptive quadrature on the same panels.
"""
import math
import logging
import warnings
import functools
from fractions import Fraction
import numpy as np
from scipy import integrate

from mdalab import config
from mdalab.core import arith
from mdalab.errors import DomainError, ConvergenceError, ResourceError
from mdalab.values import MeasureEstimate, IntervalUnion, PiecewiseCdf

logger = logging.getLogger(__name__)

MODES = ('product', 'max')

class RegionSpec:
  def __init__(self, q, n, delta, mode='product', coprime=False):
    if int(q) != q or q < 1:
      raise DomainError('q must be a positive integer, got {}'.format(q))
    if int(n) != n or n < 1:
      raise DomainError('dimension must be a positive integer, got {}'.format(n))
    if mode not in MODES:
      raise DomainError('mode must be one of {}, got {!r}'.format(MODES, mode))
    if not delta >= 0 or (isinstance(delta, float) and math.isinf(delta)):
      raise DomainError('delta must be finite and >= 0, got {}'.format(delta))
    self.q = int(q)
    self.n = int(n)
    self.delta = delta
    self.mode = mode
    self.coprime = bool(coprime)

  def __repr__(self):
    return 'RegionSpec(q={}, n={}, delta={}, mode={}, coprime={})'.format(
           self.q, self.n, self.delta, self.mode, self.coprime)

#
# one dimension
#

def _slice_centers(q, delta, coprime):
  """
  Integers p whose interval (p - delta, p + delta)/q can meet [0,1].
  """
  reach = int(math.ceil(delta))
  p = np.arange(-reach, q + reach + 1, dtype=np.int64)
  if coprime and q > 1:
    p = p[np.gcd(p, q) == 1]
  return p

def slice_union_1d(q, delta, coprime):
  """
  IntervalUnion of { x : ||qx|| < delta } (or ||qx||').
  Exact rational endpoints when delta is an int or a Fraction.
  """
  if delta <= 0:
    return IntervalUnion()
  p = _slice_centers(q, delta, coprime)
  if isinstance(delta, (int, Fraction)):
    r = Fraction(delta) / q
    return IntervalUnion([ Fraction(int(a), q) - r for a in p ],
                         [ Fraction(int(a), q) + r for a in p ], exact=True)
  return IntervalUnion.around(p / q, float(delta) / q, exact=False)

def interval_union_for_q(f, q, coprime):
  return slice_union_1d(q, f(q), coprime)

def region_measure_1d(spec):
  """
  Exact measure of a one-dimensional q-slice.
  """
  if spec.n != 1:
    raise DomainError('region_measure_1d needs n = 1, got {}'.format(spec.n))
  delta = spec.delta
  if delta <= 0:
    return MeasureEstimate.exact(0.0)
  if isinstance(delta, (int, Fraction)):
    if not spec.coprime:
      return MeasureEstimate.exact(min(Fraction(1), 2 * Fraction(delta)))
    if delta < Fraction(1, 2):
      return MeasureEstimate.exact(2 * Fraction(delta) * arith.euler_phi(spec.q) / spec.q)
    return MeasureEstimate.exact(slice_union_1d(spec.q, delta, True).measure())
  if not spec.coprime:
    return MeasureEstimate.exact(min(1.0, 2.0 * float(delta)))
  if delta < 0.5:
    return MeasureEstimate.exact(2.0 * float(delta) * arith.euler_phi(spec.q) / spec.q)
  return MeasureEstimate.exact(float(slice_union_1d(spec.q, delta, True).measure()))

def pair_intersection_1d(f, q, r, coprime):
  """
  Exact |H(q) n H(r)| in dimension 1.
  """
  a = interval_union_for_q(f, q, coprime)
  if q == r:
    return MeasureEstimate.exact(float(a.measure()))
  b = interval_union_for_q(f, r, coprime)
  return MeasureEstimate.exact(float(a.intersection_measure(b)))

def _interval_demand(vals, Q0, coprime):
  qs = np.arange(Q0, Q0 + len(vals), dtype=np.int64)
  active = np.asarray([ v > 0 for v in vals ], dtype=bool)
  if coprime:
    counts = arith.phi_table(int(qs[-1]) if qs.size else 1).values[qs].astype(np.float64)
  else:
    counts = qs.astype(np.float64) + 1.0
  reach = np.ceil(np.asarray([ float(v) for v in vals ])) * 2.0
  return int(np.sum((counts + reach)[active]))

def truncated_union_scan(f, Q0, grid, coprime):
  """
  Exact measure of the union of 1-D slices over [Q0, Qc] for every
  checkpoint Qc in grid.  Returns a list of (Qc, MeasureEstimate).
  """
  grid = sorted(int(Qc) for Qc in grid)
  if not grid:
    return []
  Q = grid[-1]
  if Q0 < 1 or Q < Q0:
    raise DomainError('bad union range [{}, {}]'.format(Q0, Q))
  rational = f.is_rational()
  if rational:
    vals = [ f(q) for q in range(Q0, Q + 1) ]
  else:
    vals = list(f.values(Q)[Q0 - 1:])
  for i, v in enumerate(vals):
    if isinstance(v, float) and not math.isfinite(v):
      raise DomainError('psi is infinite at q={}'.format(Q0 + i))
  budget = config.settings().interval_budget
  needed = _interval_demand(vals, Q0, coprime)
  if needed > budget:
    raise ResourceError('1-D interval sweep', needed, budget)

  rows = []
  union = IntervalUnion(exact=rational)
  gi = 0
  pending = []
  for q in range(Q0, Q + 1):
    delta = vals[q - Q0]
    if delta > 0:
      pending.append(slice_union_1d(q, delta, coprime))
    while gi < len(grid) and grid[gi] == q:
      if pending:
        union = IntervalUnion.merge([ union ] + pending)
        pending = []
      m = union.measure()
      rows.append((q, MeasureEstimate.exact(m)))
      logger.debug('1-D union up to Q={}: {} intervals, measure {}'.format(
                   q, len(union), float(m)))
      gi += 1
  return rows

def truncated_union_1d(f, Q0, Q, coprime):
  """
  Exact measure of the union of H(psi, q) for Q0 <= q <= Q, n = 1.
  """
  return truncated_union_scan(f, Q0, [ Q ], coprime)[0][1]

#
# products of distances
#

def plain_product_cdf(n, t):
  """
  P(prod U_i < t) for n independent uniforms on [0,1]:
  t * sum_{k<n} ln(1/t)^k / k!, clipped to [0,1].  Vectorized over t.
  """
  scalar = np.ndim(t) == 0
  t = np.atleast_1d(np.asarray(t, dtype=np.float64))
  out = np.where(t >= 1.0, 1.0, 0.0)
  inside = (t > 0.0) & (t < 1.0)
  tt = t[inside]
  L = -np.log(tt)
  term = np.ones_like(tt)
  acc = np.ones_like(tt)
  for k in range(1, n):
    term = term * L / k
    acc = acc + term
  out[inside] = np.minimum(1.0, tt * acc)
  return float(out[0]) if scalar else out

def product_region_measure_plain(n, delta):
  """
  |{x : prod ||q x_i|| < delta}|, the same for every q.
  """
  if int(n) != n or n < 1:
    raise DomainError('dimension must be a positive integer, got {}'.format(n))
  if delta <= 0:
    return MeasureEstimate.closed_form(0.0)
  return MeasureEstimate.closed_form(plain_product_cdf(int(n), 2.0 ** n * float(delta)))

@functools.lru_cache(maxsize=1024)
def coprime_dist_cdf(q):
  """
  Exact law of ||qx||' for x uniform on [0,1].
  """
  if int(q) != q or q < 1:
    raise DomainError('q must be a positive integer, got {}'.format(q))
  return PiecewiseCdf.from_gaps(int(q), arith.gap_counts(int(q)))

class _ProductCdf:
  """
  G_k(s) = P(D_1 ... D_k < s) for D_i i.i.d. with a piecewise-linear CDF F.
  Accumulates the quadrature error estimate of every evaluation.
  """
  def __init__(self, cdf, tol):
    self.cdf = cdf
    self.bps = cdf.breakpoints
    self.dens = cdf.densities()
    self.vals = cdf.values
    self.top = cdf.top
    self.tol = tol
    self.error = 0.0
    self.evaluations = 0

  def __call__(self, k, s):
    if s <= 0.0:
      return 0.0
    if s >= self.top ** k:
      return 1.0
    if k == 1:
      return float(self.cdf(s))
    if k == 2:
      return self._g2(s)
    return self._gk(k, s)

  def _linear(self, s):
    # F(s) = alpha + beta * s on the panel holding s
    j = int(np.searchsorted(self.bps, s, side='right')) - 1
    j = min(max(j, 0), self.dens.size - 1)
    beta = float(self.dens[j])
    return float(self.vals[j]) - beta * float(self.bps[j]), beta

  def _cuts(self, s, k):
    """
    Outer-panel boundaries plus the t where s/t crosses a kink of G_{k-1}.
    """
    pts = set(float(b) for b in self.bps)
    inner = [ float(b) for b in self.bps[1:] ]
    if k == 2:
      for b in inner:
        pts.add(s / b)
    else:
      pts.add(s / self.top ** (k - 1))
    pts = sorted(p for p in pts if 0.0 <= p <= self.top)
    return pts

  def _g2(self, s):
    total = 0.0
    pts = self._cuts(s, 2)
    for u, v in zip(pts[:-1], pts[1:]):
      if v <= u:
        continue
      m = 0.5 * (u + v)
      c = float(self.dens[min(int(np.searchsorted(self.bps, m, side='right')) - 1,
                              self.dens.size - 1)])
      if c == 0.0:
        continue
      sm = s / m
      if sm >= self.top:
        total += c * (v - u)
      else:
        alpha, beta = self._linear(sm)
        total += c * (alpha * (v - u) + beta * s * math.log(v / u))
    return min(1.0, max(0.0, total))

  def _gk(self, k, s):
    total = 0.0
    pts = self._cuts(s, k)
    inner_points = sorted(set(s / float(b) ** (k - 1) for b in self.bps[1:]))
    for u, v in zip(pts[:-1], pts[1:]):
      if v <= u:
        continue
      m = 0.5 * (u + v)
      c = float(self.dens[min(int(np.searchsorted(self.bps, m, side='right')) - 1,
                              self.dens.size - 1)])
      if c == 0.0:
        continue
      if s / m >= self.top ** (k - 1):
        total += c * (v - u)
        continue
      brk = [ p for p in inner_points if u < p < v ]
      with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        val, err = integrate.quad(lambda t: self(k - 1, s / t), u, v,
                                  points=brk or None, epsabs=self.tol / 8,
                                  epsrel=0.0, limit=200)
      self.evaluations += 1
      total += c * val
      self.error += c * err
    return min(1.0, max(0.0, total))

def product_region_measure_coprime(q, n, delta, tol=config.CONVOLUTION_TOL):
  """
  |{x : prod ||q x_i||' < delta}| by recursive integration over the
  exact marginal law of ||qx||'.
  """
  if int(n) != n or n < 1:
    raise DomainError('dimension must be a positive integer, got {}'.format(n))
  if not tol > 0:
    raise DomainError('tolerance must be positive, got {}'.format(tol))
  if delta <= 0:
    return MeasureEstimate.numeric(0.0, 0.0)
  n = int(n)
  cdf = coprime_dist_cdf(int(q))
  if n == 1:
    return MeasureEstimate.numeric(float(cdf(float(delta))), 0.0)
  g = _ProductCdf(cdf, tol)
  value = g(n, float(delta))
  # analytic panels carry rounding error only
  error = g.error + 16 * np.finfo(float).eps * cdf.breakpoints.size ** 2
  if error > tol:
    raise ConvergenceError('product CDF q={} n={} delta={} missed tolerance {}'.format(
                           q, n, delta, tol),
                           max(0.0, value - error), min(1.0, value + error))
  return MeasureEstimate.numeric(value, error)

#
# cubical domains
#

def max_region_measure(q, n, delta, coprime):
  """
  |{x : (max ||q x_i||)^n < delta}|: every coordinate within delta^(1/n).
  """
  if int(n) != n or n < 1:
    raise DomainError('dimension must be a positive integer, got {}'.format(n))
  if delta <= 0:
    return MeasureEstimate.exact(0.0)
  r = float(delta) ** (1.0 / n)
  if coprime:
    return MeasureEstimate.exact(float(coprime_dist_cdf(int(q))(r)) ** n)
  return MeasureEstimate.closed_form(min(1.0, 2.0 * r) ** n)

def region_measure(spec, tol=config.CONVOLUTION_TOL):
  """
  Measure of any RegionSpec by the most exact method available.
  """
  if spec.mode == 'max':
    return max_region_measure(spec.q, spec.n, spec.delta, spec.coprime)
  if spec.n == 1:
    return region_measure_1d(spec)
  if spec.coprime:
    return product_region_measure_coprime(spec.q, spec.n, spec.delta, tol)
  return product_region_measure_plain(spec.n, spec.delta)

def tail_measure_sum(f, n, Q0, Q, mode='product', coprime=False, tol=config.CONVOLUTION_TOL):
  """
  sum_{Q0 <= q <= Q} |H(psi, q)|, an upper bound on the measure of the
  union over the same range.  Returns (sum, accumulated error bound).
  """
  if Q0 < 1 or Q < Q0:
    raise DomainError('bad tail range [{}, {}]'.format(Q0, Q))
  vals = f.values(Q)[Q0 - 1:]
  if not np.all(np.isfinite(vals)):
    raise DomainError('psi is infinite in [{}, {}]'.format(Q0, Q))
  if mode == 'product' and not coprime:
    return float(math.fsum(plain_product_cdf(n, 2.0 ** n * vals))), 0.0
  if mode == 'max' and not coprime:
    return float(math.fsum(np.minimum(1.0, 2.0 * vals ** (1.0 / n)) ** n)), 0.0
  terms = []
  error = 0.0
  for q, delta in zip(range(Q0, Q + 1), vals):
    if delta <= 0:
      continue
    m = region_measure(RegionSpec(q, n, float(delta), mode, coprime), tol)
    terms.append(m.value)
    error += m.error or 0.0
  return float(math.fsum(terms)), error
