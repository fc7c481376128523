"""
Unit tests for the Borel-Cantelli lower bound
"""
import math
import unittest
import numpy as np

from mdalab.core import borel_cantelli as bc, psi, regions
from mdalab.errors import DomainError, UndefinedRatioError, ValidationError

class TestIndependence(unittest.TestCase):

  def test_harmonic(self):
    mu = 1.0 / np.arange(1, 2001)
    stats = bc.independence_stats(mu)
    for Q in (1, 10, 100, 2000):
      S = math.fsum(mu[:Q])
      expect = S * S / (S + S * S - math.fsum(mu[:Q] ** 2))
      self.assertAlmostEqual(bc.bc_lower_bound(stats, Q), min(1.0, expect), delta=1e-12)
      self.assertAlmostEqual(bc.independence_bound(mu[:Q]), expect, delta=1e-12)

  def test_tends_to_one(self):
    mu = 1.0 / np.arange(1, 100001)
    stats = bc.independence_stats(mu)
    # mu_1 = 1 pins the bound at 1; it dips before the sum takes over
    self.assertEqual(bc.bc_lower_bound(stats, 1), 1.0)
    self.assertAlmostEqual(bc.bc_lower_bound(stats, 2), 0.9, delta=1e-12)
    self.assertAlmostEqual(bc.bc_lower_bound(stats, 4), 0.868055555556, delta=1e-11)
    rows = bc.bc_scan(stats, psi.geometric_grid(8, 100000))
    bounds = [ r[1] for r in rows ]
    self.assertEqual(bounds, sorted(bounds))
    self.assertLess(bounds[0], 0.87)
    self.assertGreaterEqual(bounds[-1], 0.9)
    self.assertEqual(rows[-1][2], bounds[-1])
    self.assertEqual(rows[-1][3], rows[-1][4])

  def test_clipped_bound_warns(self):
    # two events of measure 0.9 cannot be disjoint
    stats = bc.EventStats([ 1, 2 ], [ 0.9, 0.9 ], [[ 0.9, 0.0 ], [ 0.0, 0.9 ]], 'exact')
    with self.assertLogs('mdalab.core.borel_cantelli', 'WARNING') as cm:
      self.assertEqual(bc.bc_lower_bound(stats, 2), 1.0)
    self.assertIn('clipped', cm.output[0])

  def test_undefined(self):
    stats = bc.independence_stats(np.zeros(5))
    with self.assertRaises(UndefinedRatioError):
      bc.bc_lower_bound(stats, 5)
    rows = bc.bc_scan(stats, [ 2, 5 ])
    self.assertEqual(rows, [ (2, None, None, None, None), (5, None, None, None, None) ])
    with self.assertRaises(UndefinedRatioError):
      bc.bc_lower_bound(bc.independence_stats([ 0.5 ], qs=[ 3 ]), 2)
    with self.assertRaises(UndefinedRatioError):
      bc.independence_bound([ 0.0, 0.0 ])

class TestEventStats(unittest.TestCase):

  def test_validation(self):
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1, 2 ], [ 0.5 ])
    with self.assertRaises(ValidationError):
      bc.EventStats([ 2, 1 ], [ 0.5, 0.5 ])
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1 ], [ 1.5 ])
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1, 2 ], [ 0.5, 0.5 ], source='exact')
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1, 2 ], [ 0.5, 0.5 ], [[ 0.5, 0.1 ], [ 0.2, 0.5 ]], 'exact')
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1, 2 ], [ 0.5, 0.5 ], [[ 0.4, 0.1 ], [ 0.1, 0.5 ]], 'exact')
    with self.assertRaises(ValidationError):
      bc.EventStats([ 1, 2 ], [ 0.5, 0.2 ], [[ 0.5, 0.3 ], [ 0.3, 0.2 ]], 'exact')
    with self.assertRaises(DomainError):
      bc.EventStats([ 1 ], [ 0.5 ], source='guess')

  def test_disjoint_events(self):
    # two disjoint halves: S = 1, D = 1
    stats = bc.EventStats([ 1, 2 ], [ 0.5, 0.5 ], [[ 0.5, 0.0 ], [ 0.0, 0.5 ]], 'exact')
    self.assertEqual(bc.bc_lower_bound(stats, 2), 1.0)
    self.assertEqual(bc.bc_lower_bound(stats, 1), 0.5)
    self.assertEqual(bc.bc_bound_interval(stats, 2), (1.0, 1.0))

  def test_from_membership(self):
    M = np.array([[ 1, 1, 0 ], [ 1, 0, 0 ], [ 0, 1, 1 ], [ 0, 0, 0 ]], dtype=bool)
    stats = bc.EventStats.from_membership([ 1, 2, 3 ], M)
    np.testing.assert_allclose(stats.singles, [ 0.5, 0.5, 0.25 ])
    self.assertEqual(stats.pair(0, 1), 0.25)
    self.assertEqual(stats.pair(1, 2), 0.25)
    self.assertEqual(stats.pair(0, 2), 0.0)
    # Z = 2, 1, 2, 0: E[Z]^2 / E[Z^2] = 1.5625 / 2.25
    self.assertAlmostEqual(bc.bc_lower_bound(stats, 3), 1.5625 / 2.25)
    lo, hi = bc.bc_bound_interval(stats, 3)
    self.assertLessEqual(lo, bc.bc_lower_bound(stats, 3))
    self.assertGreaterEqual(hi, bc.bc_lower_bound(stats, 3))

class TestOneDimension(unittest.TestCase):

  def test_exact_bound_below_union(self):
    for coprime in (False, True):
      f = psi.PowerLog(0.25, 1.0)
      stats = bc.exact_pair_stats_1d(f, range(1, 41), coprime)
      self.assertEqual(stats.source, 'exact')
      for Q in (5, 20, 40):
        union = regions.truncated_union_1d(f, 1, Q, coprime).value
        self.assertLessEqual(bc.bc_lower_bound(stats, Q), union + 1e-12)

  def test_monte_carlo_agrees(self):
    f = psi.PowerLog(0.25, 1.0)
    exact = bc.exact_pair_stats_1d(f, range(1, 11), False)
    mc = bc.mc_pair_stats(f, range(1, 11), 1, 'product', False, 20000, 3)
    self.assertEqual(mc.source, 'monte-carlo')
    self.assertAlmostEqual(bc.bc_lower_bound(mc, 10), bc.bc_lower_bound(exact, 10),
                           delta=0.05)
    lo, hi = bc.bc_bound_interval(mc, 10)
    self.assertLess(lo, hi)

class TestQuasiIndependence(unittest.TestCase):

  def test_ratio(self):
    f = psi.PowerLog(0.25, 1.0)
    r = bc.quasi_independence_ratio(2, 3, f, 2, 0.01)
    self.assertAlmostEqual(r, 0.01 / (f(2) * math.log(2) * f(3) * math.log(3)))
    one = bc.quasi_independence_ratio(2, 3, f, 1, regions.pair_intersection_1d(f, 2, 3, False))
    self.assertGreater(one, 0.0)
    with self.assertRaises(DomainError):
      bc.quasi_independence_ratio(2, 2, f, 1, 0.1)
    with self.assertRaises(UndefinedRatioError):
      bc.quasi_independence_ratio(1, 3, f, 2, 0.1)
