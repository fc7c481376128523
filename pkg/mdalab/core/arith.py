"""
arith - number-theoretic kernel.

Totient table, distances to the nearest (coprime) integer, coprime residue
gaps and the p-adic absolute value.  Scalars are double precision; the
*_array variants are the vectorized forms the sampler uses.

The totient table is a prime-strided numpy sieve: for every prime p the
slice phi[p::p] is multiplied by (1 - 1/p).  It gives the same table a
linear sieve does and runs in C.
"""
import math
import logging
from fractions import Fraction
import numpy as np

from mdalab import config
from mdalab.errors import DomainError

logger = logging.getLogger(__name__)

class PhiTable:
  """
  Euler phi for 1 <= q <= limit.  values[q] = phi(q); values[0] is 0.
  Immutable after construction.
  """
  def __init__(self, limit):
    if limit < 1:
      raise DomainError('PhiTable limit must be >= 1, got {}'.format(limit))
    self.limit = int(limit)
    phi = np.arange(self.limit + 1, dtype=np.int64)
    is_p = np.ones(self.limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(math.isqrt(self.limit)) + 1):
      if is_p[p]:
        is_p[p*p::p] = False
    for p in np.flatnonzero(is_p):
      phi[p::p] -= phi[p::p] // p
    phi.flags.writeable = False
    is_p.flags.writeable = False
    self.values = phi
    self.prime_mask = is_p

  def __call__(self, q):
    return int(self.values[q])

  def ratios(self, Q):
    """
    phi(q)/q for q = 1..Q as a float array.
    """
    qs = np.arange(1, Q + 1, dtype=np.float64)
    return self.values[1:Q + 1] / qs

_tables = {}

def phi_table(limit=None):
  """
  Shared PhiTable covering at least `limit` (default: configured Q_max).
  """
  limit = max(limit or 1, config.settings().phi_limit)
  for lim, t in _tables.items():
    if lim >= limit:
      return t
  logger.debug('building totient table up to {}'.format(limit))
  t = PhiTable(limit)
  _tables.clear()
  _tables[limit] = t
  return t

def factorize(q):
  """
  Trial-division factorization, returns { prime: exponent }.
  """
  if q < 1:
    raise DomainError('factorize: q must be >= 1, got {}'.format(q))
  f = {}
  n = int(q)
  p = 2
  while p * p <= n:
    while n % p == 0:
      f[p] = f.get(p, 0) + 1
      n //= p
    p += 1 if p == 2 else 2
  if n > 1:
    f[n] = f.get(n, 0) + 1
  return f

def is_prime(p):
  if p < 2:
    return False
  return factorize(p) == { p: 1 }

def primorial(k):
  """
  Product of the first k primes (primorial(0) = 1).
  """
  prod, count, c = 1, 0, 2
  while count < k:
    if is_prime(c):
      prod *= c
      count += 1
    c += 1
  return prod

def euler_phi(q):
  """
  phi(q); table lookup within Q_max, factorization beyond it.
  """
  if q < 1:
    raise DomainError('euler_phi: q must be >= 1, got {}'.format(q))
  q = int(q)
  t = phi_table()
  if q <= t.limit:
    return t(q)
  result = q
  for p in factorize(q):
    result -= result // p
  return result

def dist_nearest(q, x):
  """
  ||qx|| = min |qx - p| over integers p.  Always in [0, 1/2].
  """
  if q < 1:
    raise DomainError('dist_nearest: q must be >= 1, got {}'.format(q))
  t = q * x
  return abs(t - math.floor(t + 0.5))

def _nearest_coprime_side(start, q, step):
  # cap: q consecutive integers always contain a residue coprime to q
  p = start
  for _ in range(q + 1):
    if math.gcd(abs(p), q) == 1:
      return p
    p += step
  raise RuntimeError('no integer coprime to {} within {} steps'.format(q, q))

def dist_nearest_coprime(q, x):
  """
  ||qx||' = min |qx - p| over p with gcd(p, q) = 1.
  May exceed 1/2 when q has gaps between coprime residues.
  """
  if q < 1:
    raise DomainError('dist_nearest_coprime: q must be >= 1, got {}'.format(q))
  q = int(q)
  t = q * x
  lo = _nearest_coprime_side(math.floor(t), q, -1)
  hi = _nearest_coprime_side(math.ceil(t), q, +1)
  return min(t - lo, hi - t)

def dist_nearest_array(q, x):
  """
  Vectorized ||qx|| over an array of x.
  """
  t = q * np.asarray(x, dtype=np.float64)
  return np.abs(t - np.rint(t))

def coprime_distance_t(t, g):
  """
  Distance from each real t to the nearest integer coprime to g.
  Outward search on both sides; iterations are bounded by the
  largest gap between residues coprime to g.
  """
  t = np.asarray(t, dtype=np.float64)
  g = int(g)
  if g == 1:
    return np.abs(t - np.rint(t))
  flat = t.reshape(-1)
  # flat copies so the index lists below work for any input shape
  lo = np.floor(flat).astype(np.int64)
  hi = np.ceil(flat).astype(np.int64)
  for side, step in ((lo, -1), (hi, 1)):
    bad = np.flatnonzero(np.gcd(side, g) != 1)
    steps = 0
    while bad.size > 0:
      side[bad] += step
      bad = bad[np.gcd(side[bad], g) != 1]
      steps += 1
      if steps > g:
        raise RuntimeError('coprime search exceeded {} steps'.format(g))
  return np.minimum(flat - lo, hi - flat).reshape(t.shape)

def dist_nearest_coprime_array(q, x):
  """
  Vectorized ||qx||' over an array of x.
  """
  if q < 1:
    raise DomainError('q must be >= 1, got {}'.format(q))
  return coprime_distance_t(q * np.asarray(x, dtype=np.float64), q)

def coprime_residues(q):
  """
  Sorted residues r in [0, q) with gcd(r, q) = 1, as an int64 array.
  For q = 1 this is [0].
  """
  if q < 1:
    raise DomainError('q must be >= 1, got {}'.format(q))
  mask = np.ones(q, dtype=bool)
  for p in factorize(q):
    mask[::p] = False
  return np.flatnonzero(mask).astype(np.int64)

def coprime_gaps(q):
  """
  List of (residue, gap to the next coprime residue, cyclically).
  Gaps sum to q and there are phi(q) entries.
  """
  r = coprime_residues(q)
  gaps = np.diff(np.append(r, r[0] + q))
  return [ (int(a), int(b)) for a, b in zip(r, gaps) ]

def gap_counts(q):
  """
  Multiset of cyclic coprime gaps as { gap: multiplicity }.
  """
  r = coprime_residues(q)
  c = np.bincount(np.diff(np.append(r, r[0] + q)))
  return { int(g): int(c[g]) for g in np.flatnonzero(c) }

def padic_abs(q, p):
  """
  |q|_p = p^(-v) where p^v exactly divides q.  Returned as a Fraction.
  """
  if q < 1:
    raise DomainError('padic_abs: q must be >= 1, got {}'.format(q))
  if not is_prime(p):
    raise DomainError('padic_abs: {} is not prime'.format(p))
  v = 0
  while q % p == 0:
    q //= p
    v += 1
  return Fraction(1, p**v)

def padic_abs_array(qs, p):
  """
  |q|_p for an integer array qs, as floats.
  """
  qs = np.asarray(qs, dtype=np.int64).copy()
  out = np.ones(qs.shape, dtype=np.float64)
  m = qs % p == 0
  while m.any():
    out[m] /= p
    qs[m] //= p
    m = qs % p == 0
  return out
