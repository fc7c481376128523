"""
Unit tests for the Monte Carlo sampler and counting helpers
"""
import math
import unittest
import numpy as np

from mdalab import config
from mdalab.core import psi, sampler
from mdalab.core.sampler import ExperimentConfig
from mdalab.errors import DomainError, ResourceError

class TestPoints(unittest.TestCase):

  def test_pure_function_of_index(self):
    a = sampler.points(7, 0, 20, 3)
    b = sampler.points(7, 10, 10, 3)
    self.assertEqual(a.shape, (20, 3))
    np.testing.assert_array_equal(a[10:], b)
    np.testing.assert_array_equal(a, sampler.points(7, 0, 20, 3))
    self.assertTrue(np.all((a >= 0.0) & (a < 1.0)))
    # five coordinates take two counter blocks per sample
    c = sampler.points(7, 0, 6, 5)
    np.testing.assert_array_equal(c[4:], sampler.points(7, 4, 2, 5))

  def test_seeds_differ(self):
    self.assertFalse(np.array_equal(sampler.points(1, 0, 8, 2), sampler.points(2, 0, 8, 2)))
    with self.assertRaises(DomainError):
      sampler.points(-1, 0, 4, 1)

class TestMembership(unittest.TestCase):

  def test_scalar(self):
    f = psi.PowerLog(0.01, 0.0)
    # ||1.04|| ||2.04|| = 0.0016
    self.assertTrue(sampler.membership([ 0.26, 0.51 ], 4, f))
    # nearest odd integers: 1 and 1 or 3, so 0.04 * 0.96
    self.assertFalse(sampler.membership([ 0.26, 0.51 ], 4, f, coprime=True))
    with self.assertRaises(DomainError):
      sampler.membership([ 0.2 ], 1, f, mode='sum')

  def test_array_matches_scalar(self):
    f = psi.PowerLog(0.05, 0.0)
    pts = sampler.points(3, 0, 300, 2)
    for q in (1, 6, 10):
      for coprime in (False, True):
        for mode in ('product', 'max'):
          arr = sampler.membership_array(pts, q, f(q), mode, coprime)
          one = [ sampler.membership(x, q, f, mode, coprime) for x in pts ]
          np.testing.assert_array_equal(arr, one)

  def test_matrix(self):
    f = psi.PowerLog(0.1, 1.0)
    pts = sampler.points(3, 0, 50, 1)
    M = sampler.membership_matrix(pts, [ 1, 2, 5 ], f)
    self.assertEqual(M.shape, (50, 3))
    np.testing.assert_array_equal(M[:, 2], sampler.membership_array(pts, 5, f(5),
                                                                    'product', False))

  def test_infinite_psi(self):
    g = psi.conditional_psi(psi.PowerLog(0.1, 0.0), [ 0.5 ])
    with self.assertRaises(DomainError):
      sampler.membership([ 0.3 ], 2, g)

class TestUnionEstimate(unittest.TestCase):

  def setUp(self):
    self.saved = config.settings()

  def tearDown(self):
    config._settings = self.saved

  def _cfg(self, **kw):
    d = dict(family=psi.PowerLog(0.25, 1.0), n=2, coprime=True, Q0=1, Q=64,
             samples=3000, seed=42, Q_grid=[ 4, 16, 64 ])
    d.update(kw)
    return ExperimentConfig(**d)

  def test_worker_and_chunk_invariance(self):
    for coprime in (False, True):
      # psi(q) = 0.02/q is below 1/2 from q = 2 on, so no slice is everything
      cfg = self._cfg(family=psi.PowerLog(0.02, 1.0), coprime=coprime, Q0=2)
      config.override(chunk=256)
      one = sampler.estimate_union_measure(cfg, workers=1)
      hits = [ (Q, m.hits) for Q, m in one ]
      self.assertGreater(hits[-1][1], 0)
      self.assertLess(hits[-1][1], cfg.samples)
      for workers in (4, 16):
        rows = sampler.estimate_union_measure(cfg, workers=workers)
        self.assertEqual([ (Q, m.hits) for Q, m in rows ], hits)
      config.override(chunk=1000)
      for workers in (1, 4, 16):
        rows = sampler.estimate_union_measure(cfg, workers=workers)
        self.assertEqual([ (Q, m.hits) for Q, m in rows ], hits)

  def test_coprime_single_slice(self):
    # q = 12 has coprime residues 1, 5, 7, 11: measure 4 * 2 * 0.1 / 12
    cfg = ExperimentConfig(psi.Table([ 0.1 ] * 12), n=1, coprime=True, Q0=12, Q=12,
                           samples=20000, seed=8)
    [(Q, m)] = sampler.estimate_union_measure(cfg)
    self.assertEqual(Q, 12)
    p = 1.0 / 15
    self.assertLess(abs(m.value - p), 5 * math.sqrt(p * (1 - p) / 20000))

  def test_interval_coverage(self):
    covered = 0
    for seed in range(300):
      cfg = ExperimentConfig(psi.Table([ 0.1 ]), n=1, Q=1, samples=2000, seed=seed)
      [(_, m)] = sampler.estimate_union_measure(cfg)
      covered += m.ci_low <= 0.2 <= m.ci_high
    self.assertGreaterEqual(covered, 270)

  def test_monotone(self):
    rows = sampler.estimate_union_measure(self._cfg())
    self.assertEqual([ Q for Q, _ in rows ], [ 4, 16, 64 ])
    hits = [ m.hits for _, m in rows ]
    self.assertEqual(hits, sorted(hits))
    for _, m in rows:
      self.assertEqual(m.provenance, 'monte-carlo')
      self.assertEqual(m.samples, 3000)
      self.assertLessEqual(m.ci_low, m.value)
      self.assertLessEqual(m.value, m.ci_high)

  def test_single_slice(self):
    cfg = ExperimentConfig(psi.Table([ 0.1 ]), n=1, Q=1, samples=20000, seed=5)
    [(Q, m)] = sampler.estimate_union_measure(cfg)
    self.assertEqual(Q, 1)
    self.assertLess(abs(m.value - 0.2), 5 * math.sqrt(0.16 / 20000))

  def test_zero_family(self):
    cfg = self._cfg(family=psi.PowerLog(0.0))
    for _, m in sampler.estimate_union_measure(cfg):
      self.assertEqual(m.value, 0.0)
      self.assertEqual(m.provenance, 'exact')

  def test_pairwise(self):
    f = psi.Table([ 0.25, 0.125 ])
    m = sampler.estimate_pairwise_intersection(1, 2, f, 1, 'product', False, 20000, 9)
    self.assertLess(abs(m.value - 0.125), 5 * math.sqrt(0.125 * 0.875 / 20000))
    z = sampler.estimate_pairwise_intersection(1, 3, f, 1, 'product', False, 100, 9)
    self.assertEqual(z.value, 0.0)

  def test_config_checks(self):
    f = psi.PowerLog()
    with self.assertRaises(DomainError):
      ExperimentConfig(f, Q0=10, Q=5)
    with self.assertRaises(DomainError):
      ExperimentConfig(f, Q=10, Q_grid=[ 20 ])
    with self.assertRaises(DomainError):
      ExperimentConfig(f, Q=10, seed=-3)
    with self.assertRaises(DomainError):
      ExperimentConfig(f, mode='sum')
    self.assertEqual(ExperimentConfig(f, Q=10, Q_grid=[ 2, 5 ]).Q_grid, [ 2, 5, 10 ])

class TestCounting(unittest.TestCase):

  def test_solution_count(self):
    f = psi.PowerLog(0.01, 0.0)
    self.assertEqual(sampler.solution_count([ 0.5 ], f, 10), 5)
    quarter = psi.Table([ 0.25 ] * 4)
    # ||q/4|| = 0.25, 0.5, 0.25, 0
    self.assertEqual(sampler.solution_count([ 0.25 ], quarter, 4), 1)
    self.assertEqual(sampler.solution_count([ 0.25 ], quarter, 4, strict=False), 3)
    # psi(q) = 0 never counts, even at distance 0
    self.assertEqual(sampler.solution_count([ 0.0 ], psi.Table([ 0.0, 0.25 ]), 2,
                                            strict=False), 1)

  def test_solution_hits_coprime(self):
    f = psi.PowerLog(0.05, 0.0)
    x = sampler.points(11, 0, 1, 2)[0]
    hits = sampler.solution_hits(x, f, 40, coprime=True)
    expect = [ sampler.membership(x, q, f, coprime=True) for q in range(1, 41) ]
    np.testing.assert_array_equal(hits, expect)

  def test_linear_forms(self):
    Psi = sampler.radial_Psi(psi.PowerLog(0.5, 0.0))
    self.assertEqual(sampler.linear_forms_count([[ 0.0 ]], Psi, 3), 6)
    # only q = +-1 reach an integer coprime to gcd(q)
    self.assertEqual(sampler.linear_forms_count([[ 0.0 ]], Psi, 3, coprime=True), 2)
    self.assertEqual(Psi.spec(), { 'radial': psi.PowerLog(0.5, 0.0).spec() })
    # q/2 is an integer for even q: q = +-2, +-4, ..., +-10
    Psi = sampler.radial_Psi(psi.PowerLog(0.3, 0.0))
    self.assertEqual(sampler.linear_forms_count([[ 0.5 ]], Psi, 10), 10)

  def test_linear_forms_two_rows(self):
    Psi = sampler.radial_Psi(psi.PowerLog(0.3, 0.0))
    # q1/2 + q2/4 misses only when 2 q1 + q2 = 2 mod 4: 8 of the 24 vectors
    self.assertEqual(sampler.linear_forms_count([[ 0.5 ], [ 0.25 ]], Psi, 2), 16)
    Psi = sampler.radial_Psi(psi.PowerLog(0.5, 0.0))
    self.assertEqual(sampler.linear_forms_count([[ 0.0 ], [ 0.0 ]], Psi, 2), 24)
    # gcd(q) = 2 leaves the nearest admissible p at distance 1
    self.assertEqual(sampler.linear_forms_count([[ 0.0 ], [ 0.0 ]], Psi, 2,
                                                coprime=True), 16)

  def test_linear_forms_one_row_counts_solutions(self):
    f = psi.PowerLog(0.3, 1.0)
    Psi = sampler.radial_Psi(f)
    for x in sampler.points(23, 0, 12, 1)[:, 0]:
      for coprime in (False, True):
        self.assertEqual(sampler.linear_forms_count([[ x ]], Psi, 50, coprime),
                         2 * sampler.solution_count([ x ], f, 50, coprime=coprime))

  def test_linear_forms_budget(self):
    Psi = sampler.radial_Psi(psi.PowerLog())
    with self.assertRaises(ResourceError):
      sampler.linear_forms_count([[ 0.1 ], [ 0.2 ]], Psi, 10**4)
    with self.assertRaises(DomainError):
      sampler.linear_forms_count([[ 0.1 ]], Psi, 0)

  def test_fiber_slice_consistency(self):
    f = psi.PowerLog(0.25, 1.0)
    pts = sampler.points(17, 0, 200, 3)
    seen = set()
    for x in pts:
      for q in (1, 3, 8):
        for coprime in (False, True):
          joint, fibered = sampler.fiber_slice_consistency(x, q, f, coprime)
          self.assertEqual(joint, fibered)
          seen.add(joint)
    self.assertEqual(seen, { True, False })
    with self.assertRaises(DomainError):
      sampler.fiber_slice_consistency([ 0.3 ], 2, f)
