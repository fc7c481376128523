"""
IntervalUnion - sorted disjoint closed subintervals of [0,1].

Endpoints are floats (numpy arrays) or, when every input endpoint is a
Fraction, exact rationals.  Float merging joins intervals separated by
no more than MERGE_EPS so rounding does not leave micro-gaps.
"""
from fractions import Fraction
import numpy as np

from mdalab import config

class IntervalUnion:
  def __init__(self, lo=(), hi=(), exact=None):
    if exact is None:
      exact = len(lo) > 0 and all(isinstance(v, (int, Fraction)) for v in lo) \
                          and all(isinstance(v, (int, Fraction)) for v in hi)
    self.exact = exact
    if exact:
      self.lo, self.hi = _merge_exact(lo, hi)
    else:
      self.lo, self.hi = _merge_float(np.asarray(lo, dtype=np.float64),
                                      np.asarray(hi, dtype=np.float64))

  @classmethod
  def around(cls, centers, radius, exact=None):
    """
    Union of [c - radius, c + radius] clipped to [0,1].
    """
    if exact or (exact is None and isinstance(radius, Fraction)):
      return cls([ c - radius for c in centers ], [ c + radius for c in centers ],
                 exact=True)
    c = np.asarray(centers, dtype=np.float64)
    return cls(c - radius, c + radius, exact=False)

  @classmethod
  def merge(cls, unions):
    """
    One union of many; exact only if every part is exact.
    """
    unions = list(unions)
    if unions and all(u.exact for u in unions):
      lo = [ a for u in unions for a in u.lo ]
      hi = [ b for u in unions for b in u.hi ]
      return cls(lo, hi, exact=True)
    lo = np.concatenate([ np.asarray(u.lo, dtype=np.float64) for u in unions ] or [ np.zeros(0) ])
    hi = np.concatenate([ np.asarray(u.hi, dtype=np.float64) for u in unions ] or [ np.zeros(0) ])
    return cls(lo, hi, exact=False)

  def __len__(self):
    return len(self.lo)

  @property
  def intervals(self):
    return list(zip(self.lo, self.hi))

  def measure(self):
    if self.exact:
      return sum((b - a for a, b in zip(self.lo, self.hi)), Fraction(0))
    return float(np.sum(self.hi - self.lo))

  def union(self, other):
    if self.exact and other.exact:
      return IntervalUnion(list(self.lo) + list(other.lo),
                           list(self.hi) + list(other.hi), exact=True)
    return IntervalUnion(np.concatenate([ np.asarray(self.lo, dtype=np.float64),
                                          np.asarray(other.lo, dtype=np.float64) ]),
                         np.concatenate([ np.asarray(self.hi, dtype=np.float64),
                                          np.asarray(other.hi, dtype=np.float64) ]),
                         exact=False)

  def intersection_measure(self, other):
    """
    |A n B| = |A| + |B| - |A u B| for unions of disjoint intervals.
    """
    m = self.measure() + other.measure() - self.union(other).measure()
    return m if self.exact and other.exact else max(0.0, float(m))

  def contains(self, x):
    if len(self.lo) == 0:
      return False
    if self.exact:
      return any(a <= x <= b for a, b in zip(self.lo, self.hi))
    i = np.searchsorted(self.lo, x, side='right') - 1
    return bool(i >= 0 and x <= self.hi[i])

  def __repr__(self):
    return 'IntervalUnion({} intervals, measure {})'.format(len(self), self.measure())

def _merge_float(lo, hi):
  lo = np.clip(lo, 0.0, 1.0)
  hi = np.clip(hi, 0.0, 1.0)
  keep = hi > lo
  lo = lo[keep]
  hi = hi[keep]
  if lo.size == 0:
    return np.zeros(0), np.zeros(0)
  order = np.argsort(lo, kind='stable')
  lo = lo[order]
  hi = hi[order]
  reach = np.maximum.accumulate(hi)
  starts = np.ones(lo.size, dtype=bool)
  starts[1:] = lo[1:] > reach[:-1] + config.MERGE_EPS
  idx = np.flatnonzero(starts)
  mlo = lo[idx]
  mhi = np.maximum.reduceat(hi, idx)
  mlo.flags.writeable = False
  mhi.flags.writeable = False
  return mlo, mhi

def _merge_exact(lo, hi):
  pairs = []
  for a, b in zip(lo, hi):
    a = max(Fraction(a), Fraction(0))
    b = min(Fraction(b), Fraction(1))
    if b > a:
      pairs.append((a, b))
  pairs.sort()
  mlo, mhi = [], []
  for a, b in pairs:
    if mhi and a <= mhi[-1]:
      if b > mhi[-1]:
        mhi[-1] = b
    else:
      mlo.append(a)
      mhi.append(b)
  return tuple(mlo), tuple(mhi)
