"""
Unit tests for slice measures and 1-D truncated unions
"""
import os
import math
import unittest
from fractions import Fraction
import numpy as np

from mdalab import config
from mdalab.core import arith, psi, regions, sampler
from mdalab.core.regions import RegionSpec
from mdalab.errors import DomainError, ResourceError

ACCEPTANCE = os.environ.get('MDALAB_ACCEPTANCE')

class TestOneDimension(unittest.TestCase):

  def test_examples(self):
    self.assertAlmostEqual(regions.region_measure_1d(RegionSpec(5, 1, 0.1)).value, 0.2)
    m = regions.region_measure_1d(RegionSpec(12, 1, 0.1, coprime=True))
    self.assertAlmostEqual(m.value, 2 * 0.1 * 4 / 12)
    self.assertEqual(m.provenance, 'exact')
    self.assertEqual(regions.region_measure_1d(RegionSpec(7, 1, 0.0)).value, 0.0)
    with self.assertRaises(DomainError):
      regions.region_measure_1d(RegionSpec(7, 2, 0.1))

  def test_rational_delta_stays_exact(self):
    m = regions.region_measure_1d(RegionSpec(12, 1, Fraction(1, 10), coprime=True))
    self.assertEqual(m.rational, Fraction(1, 15))
    self.assertEqual(regions.slice_union_1d(12, Fraction(1, 10), True).measure(),
                     Fraction(1, 15))

  def test_large_coprime_delta(self):
    # ||4x||' < 3/4: x within 3/16 of 1/4 or 3/4
    m = regions.region_measure_1d(RegionSpec(4, 1, Fraction(3, 4), coprime=True))
    self.assertEqual(m.rational, Fraction(3, 4))
    self.assertEqual(regions.coprime_dist_cdf(4).exact(Fraction(3, 4)), Fraction(3, 4))
    f = regions.region_measure_1d(RegionSpec(4, 1, 0.75, coprime=True))
    self.assertAlmostEqual(f.value, 0.75)

  def test_union_matches_phi_formula(self):
    for q in range(1, 1001):
      for delta in (1e-3, 1e-1):
        u = regions.slice_union_1d(q, delta, True)
        self.assertAlmostEqual(u.measure(), 2 * delta * arith.euler_phi(q) / q, delta=1e-12)

  @unittest.skipUnless(ACCEPTANCE, 'acceptance scale')
  def test_union_matches_phi_formula_full(self):
    for q in range(1, 10001):
      for delta in (1e-3, 1e-1):
        u = regions.slice_union_1d(q, delta, True)
        self.assertAlmostEqual(u.measure(), 2 * delta * arith.euler_phi(q) / q, delta=1e-12)

  def test_pair_intersection(self):
    f = psi.Table([ '1/4', '1/8' ])
    self.assertEqual(regions.pair_intersection_1d(f, 1, 1, False).value, 0.5)
    # ||x|| < 1/4 and ||2x|| < 1/8 overlap on [0, 1/16] and [15/16, 1]
    self.assertAlmostEqual(regions.pair_intersection_1d(f, 1, 2, False).value, 0.125)

class TestPlainProduct(unittest.TestCase):

  def test_examples(self):
    self.assertAlmostEqual(regions.product_region_measure_plain(1, 0.1).value, 0.2)
    m = regions.product_region_measure_plain(2, 0.125)
    self.assertAlmostEqual(m.value, 0.5 * (1 + math.log(2)), places=12)
    self.assertEqual(m.provenance, 'closed-form')
    for n in (1, 2, 3, 5):
      self.assertEqual(regions.product_region_measure_plain(n, 2.0 ** -n).value, 1.0)
      self.assertEqual(regions.product_region_measure_plain(n, 0.0).value, 0.0)

  def test_monotone(self):
    ds = np.linspace(0, 0.2, 101)
    for n in (2, 3, 4):
      v = [ regions.product_region_measure_plain(n, d).value for d in ds ]
      self.assertTrue(np.all(np.diff(v) >= -1e-15))

  def test_cdf_vectorized(self):
    t = np.array([ -1.0, 0.0, 0.25, 0.5, 1.0, 2.0 ])
    out = regions.plain_product_cdf(3, t)
    for a, b in zip(out, t):
      self.assertAlmostEqual(a, regions.plain_product_cdf(3, float(b)))
    self.assertEqual(out[0], 0.0)
    self.assertEqual(out[-1], 1.0)

  def _check_q_independence(self, n, delta, samples, sigmas):
    exact = regions.product_region_measure_plain(n, delta).value
    pts = sampler.points(12345, 0, samples, n)
    sd = math.sqrt(exact * (1 - exact) / samples)
    for q in (1, 2, 7, 360):
      hits = sampler.membership_array(pts, q, delta, 'product', False)
      self.assertLess(abs(hits.mean() - exact), sigmas * sd, 'q={}'.format(q))

  def test_monte_carlo(self):
    self._check_q_independence(2, 0.125, 50000, 5)
    self._check_q_independence(3, 0.01, 50000, 5)

  @unittest.skipUnless(ACCEPTANCE, 'acceptance scale')
  def test_monte_carlo_full(self):
    self._check_q_independence(2, 0.125, 10**6, 4)
    self._check_q_independence(3, 0.01, 10**6, 4)

class TestCoprimeProduct(unittest.TestCase):

  def test_cdf(self):
    F = regions.coprime_dist_cdf(1)
    self.assertEqual(F.top, 0.5)
    self.assertAlmostEqual(F(0.2), 0.4)
    G = regions.coprime_dist_cdf(4)
    for t in (0.1, 0.5, 0.9):
      self.assertAlmostEqual(G(t), t)
    for q in (1, 2, 12, 30, 97, 210):
      F = regions.coprime_dist_cdf(q)
      self.assertAlmostEqual(F(F.top), 1.0, places=12)
      self.assertEqual(F(F.top + 1.0), 1.0)
      self.assertEqual(F.exact(Fraction(1, 2)), Fraction(arith.euler_phi(q), q))

  def test_n1_matches_1d(self):
    for q in (1, 6, 12, 97):
      for delta in (0.01, 0.3):
        a = regions.product_region_measure_coprime(q, 1, delta).value
        b = regions.region_measure_1d(RegionSpec(q, 1, delta, coprime=True)).value
        self.assertAlmostEqual(a, b, delta=1e-12)

  def test_q1_matches_plain(self):
    for n, delta in ((2, 0.125), (2, 0.01), (3, 0.01), (3, 0.1)):
      a = regions.product_region_measure_coprime(1, n, delta)
      b = regions.product_region_measure_plain(n, delta)
      self.assertEqual(a.provenance, 'numeric-exact')
      self.assertAlmostEqual(a.value, b.value, delta=1e-7)
      self.assertLessEqual(a.error, 1e-9)

  def test_subset_of_plain(self):
    for q in (2, 6, 12, 30):
      for n, delta in ((2, 0.01), (2, 0.1), (3, 0.01)):
        a = regions.product_region_measure_coprime(q, n, delta).value
        b = regions.product_region_measure_plain(n, delta).value
        self.assertLessEqual(a, b + 1e-9)

  def test_monte_carlo(self):
    samples = 100000
    pts = sampler.points(99, 0, samples, 2)
    for q, delta in ((6, 0.1), (12, 0.01)):
      exact = regions.product_region_measure_coprime(q, 2, delta).value
      hits = sampler.membership_array(pts, q, delta, 'product', True).mean()
      sd = math.sqrt(exact * (1 - exact) / samples)
      self.assertLess(abs(hits - exact), 5 * sd, 'q={}'.format(q))

  def test_bad(self):
    with self.assertRaises(DomainError):
      regions.product_region_measure_coprime(6, 2, 0.1, tol=0.0)
    self.assertEqual(regions.product_region_measure_coprime(6, 2, 0.0).value, 0.0)

class TestMax(unittest.TestCase):

  def test_cubical(self):
    m = regions.max_region_measure(5, 2, 0.01, False)
    self.assertAlmostEqual(m.value, 0.04)
    self.assertAlmostEqual(regions.max_region_measure(1, 2, 0.01, True).value, 0.04)
    # small delta: each coordinate contributes 2 delta^(1/n) phi(q)/q
    self.assertAlmostEqual(regions.max_region_measure(12, 2, 0.01, True).value,
                           (2 * 0.1 * 4 / 12) ** 2)
    spec = RegionSpec(12, 2, 0.01, mode='max', coprime=True)
    self.assertEqual(regions.region_measure(spec).value,
                     regions.max_region_measure(12, 2, 0.01, True).value)

class TestTruncatedUnion(unittest.TestCase):

  def test_examples(self):
    zero = psi.PowerLog(0.0)
    self.assertEqual(regions.truncated_union_1d(zero, 1, 50, False).value, 0.0)
    m = regions.truncated_union_1d(psi.Table([ 0.1 ]), 1, 1, False)
    self.assertAlmostEqual(m.value, 0.2)
    e = regions.truncated_union_1d(psi.Table([ '1/4', '1/8' ]), 1, 2, False)
    self.assertEqual(e.rational, Fraction(5, 8))
    self.assertEqual(e.provenance, 'exact')

  def test_scan_bounds(self):
    f = psi.PowerLog(0.25, 1.0)
    grid = [ 1, 10, 50, 100, 200 ]
    rows = regions.truncated_union_scan(f, 1, grid, True)
    self.assertEqual([ Q for Q, _ in rows ], grid)
    vals = [ m.value for _, m in rows ]
    self.assertTrue(np.all(np.diff(vals) >= 0))
    single = [ regions.region_measure_1d(RegionSpec(q, 1, f(q), coprime=True)).value
               for q in range(1, 201) ]
    self.assertGreaterEqual(vals[-1], max(single) - 1e-15)
    self.assertLessEqual(vals[-1], math.fsum(single) + 1e-12)
    self.assertAlmostEqual(regions.truncated_union_1d(f, 1, 200, True).value, vals[-1],
                           delta=1e-12)

  def test_tail_range(self):
    f = psi.PowerLog(0.25, 1.0)
    a = regions.truncated_union_1d(f, 20, 100, False).value
    b = regions.truncated_union_1d(f, 1, 100, False).value
    self.assertLessEqual(a, b + 1e-15)

  def test_budget(self):
    saved = config.settings()
    try:
      config.override(interval_budget=10)
      with self.assertRaises(ResourceError) as cm:
        regions.truncated_union_1d(psi.PowerLog(0.25, 1.0), 1, 100, False)
      self.assertEqual(cm.exception.budget, 10)
    finally:
      config._settings = saved

  def test_bad_range(self):
    with self.assertRaises(DomainError):
      regions.truncated_union_1d(psi.PowerLog(), 10, 5, False)

class TestTailSum(unittest.TestCase):

  def test_plain(self):
    f = psi.PowerLog(0.25, 1.0)
    s, err = regions.tail_measure_sum(f, 2, 10, 40)
    expect = math.fsum(regions.product_region_measure_plain(2, f(q)).value
                       for q in range(10, 41))
    self.assertAlmostEqual(s, expect, places=12)
    self.assertEqual(err, 0.0)

  def test_coprime(self):
    f = psi.PowerLog(1.0, 1.0, 3.0)
    s, err = regions.tail_measure_sum(f, 2, 100, 120, coprime=True)
    expect = math.fsum(regions.product_region_measure_coprime(q, 2, f(q)).value
                       for q in range(100, 121))
    self.assertAlmostEqual(s, expect, places=12)
    self.assertLess(err, 1e-6)
