"""
Unit tests for cross fibering on finite spaces
"""
import os
import json
import unittest
from fractions import Fraction
import numpy as np

from mdalab.core import fibering
from mdalab.errors import ValidationError
from mdalab.values import DiscreteSpace, ProductSet

DATA = os.path.join(os.path.dirname(__file__), '..', 'data')

def load(name):
  with open(os.path.join(DATA, name)) as f:
    return fibering.product_set_from_spec(json.load(f))

class TestCheck(unittest.TestCase):

  def test_full(self):
    S = load('fiber-full.json')
    rep = fibering.cross_fibering_check(S)
    self.assertEqual(rep.left.kind, 'Full')
    self.assertEqual((rep.right_x, rep.right_y), (1, 1))
    self.assertTrue(rep.equivalence_holds)
    self.assertEqual(fibering.product_measure(S), 1)

  def test_diagonal(self):
    S = load('fiber-diagonal.json')
    rep = fibering.cross_fibering_check(S)
    self.assertEqual(rep.left.measure, Fraction(1, 3))
    self.assertEqual(rep.right_x, 0)
    self.assertTrue(rep.equivalence_holds)
    self.assertEqual(fibering.fiber_x(S, 'b'), [ 1 ])
    self.assertEqual(fibering.fiber_y(S, 'c'), [ 2 ])
    self.assertEqual(rep.as_dict()['measure'], '1/3')

  def test_witness(self):
    # every S_x is trivial, no S^y is
    S = fibering.non_reversibility_witness()
    rep = fibering.cross_fibering_check(S)
    self.assertEqual(rep.left.measure, Fraction(1, 2))
    self.assertEqual(rep.right_x, 1)
    self.assertEqual(rep.right_y, 0)
    self.assertTrue(rep.equivalence_holds)
    self.assertEqual(rep.verdict(), 'Nontrivial / equivalence holds')

  def test_zero_weight_atom(self):
    X = DiscreteSpace([ 1, 0 ])
    S = ProductSet(X, DiscreteSpace.uniform(2), [ [ 1, 1 ], [ 1, 0 ] ])
    rep = fibering.cross_fibering_check(S)
    self.assertEqual(rep.left.kind, 'Full')
    self.assertEqual((rep.right_x, rep.right_y), (1, 1))

  def test_bad_input(self):
    with self.assertRaises(ValidationError):
      load('fiber-bad-weights.json')
    with self.assertRaises(ValidationError):
      fibering.product_set_from_spec({ 'x_weights': [ 1 ], 'member': [ [ 1 ] ] })
    with self.assertRaises(ValidationError):
      fibering.product_set_from_spec({ 'x_weights': [ 'half' ], 'y_weights': [ 1 ],
                                       'member': [ [ 1 ] ] })
    with self.assertRaises(ValidationError):
      fibering.product_set_from_spec({ 'x_weights': [ 1 ], 'y_weights': [ 1 ],
                                       'member': [ [ 1, 0 ] ] })

class TestDecompose(unittest.TestCase):

  def test_column(self):
    X = DiscreteSpace.uniform(2)
    S = ProductSet(X, DiscreteSpace.uniform(2), [ [ 1, 0 ], [ 1, 0 ] ])
    d = fibering.decompose(S)
    self.assertEqual(d.as_tuple(), ([], [], [ 0, 1 ], [ 1 ], [ 0 ], []))
    self.assertEqual(d.by_x, d.by_y)
    self.assertEqual(d.rectangle, 0)
    self.assertFalse(d.impossible_case)

  def test_mixed(self):
    # row 0 null, row 1 full, column 1 nontrivial
    S = ProductSet(DiscreteSpace.uniform(2), DiscreteSpace.uniform(2),
                   [ [ 0, 0 ], [ 1, 1 ] ])
    d = fibering.decompose(S)
    self.assertEqual((d.X0, d.X1, d.Xnt), ([ 0 ], [ 1 ], []))
    self.assertEqual(d.Ynt, [ 0, 1 ])
    self.assertEqual(d.by_x, 0)
    self.assertEqual(d.by_y, 0)

  def test_orders_agree(self):
    cases = [ load('fiber-full.json'), load('fiber-diagonal.json'),
              fibering.non_reversibility_witness(),
              ProductSet(DiscreteSpace.uniform(2), DiscreteSpace.uniform(2),
                         [ [ 0, 0 ], [ 1, 1 ] ]),
              ProductSet(DiscreteSpace([ 1, 0 ]), DiscreteSpace([ 1, 0 ]),
                         [ [ 0, 1 ], [ 1, 1 ] ]) ]
    # the last set misses only the one atom of positive weight
    measures = [ 1, Fraction(1, 3), Fraction(1, 2), Fraction(1, 2), 0 ]
    for S, m in zip(cases, measures):
      self.assertEqual(fibering.fubini_orders(S), (m, m))
      self.assertEqual(fibering.product_measure(S), m)
      d = fibering.decompose(S)
      self.assertTrue(d.consistent)
      self.assertEqual(d.restricted, d.by_x)

  def test_orders_agree_random(self):
    rng = np.random.default_rng(12)
    for k in (4, 7, 12):
      a = fibering.random_weights(rng, k, zero=True)
      b = fibering.random_weights(rng, k)
      X, Y = fibering.space_pair(a, b)
      member = (rng.random((k, k)) < 0.5).tolist()
      S = ProductSet(X, Y, member)
      expect = sum(Fraction(int(a[i] * b[j]), int(a.sum() * b.sum()))
                   for i in range(k) for j in range(k) if member[i][j])
      self.assertEqual(fibering.fubini_orders(S), (expect, expect))
      self.assertTrue(fibering.decompose(S).consistent)

class TestExhaustive(unittest.TestCase):

  def test_three_by_three(self):
    rep = fibering.exhaustive_check(3, weight_samples=25, seed=0)
    self.assertTrue(rep.ok(), rep.summary())
    self.assertEqual(rep.subsets, 512)
    self.assertEqual(rep.checked, 512 * 25)
    self.assertGreater(rep.zero_atom_samples, 0)
    self.assertEqual(rep.as_dict()['equivalence_failures'], 0)
    self.assertEqual(rep.exact_checks, 512 * 25)
    self.assertEqual(rep.exact_failures, 0)
    self.assertEqual(fibering.exhaustive_check(2, weight_samples=2).exact_checks, 32)
    self.assertEqual(fibering.exhaustive_check(4, weight_samples=1).exact_checks, 0)

  def test_matches_exact_check(self):
    rng = np.random.default_rng(4)
    masks = fibering.all_subsets(2)
    self.assertEqual(masks.shape, (16, 2, 2))
    for _ in range(5):
      a = fibering.random_weights(rng, 2, zero=True)
      b = fibering.random_weights(rng, 2)
      X, Y = fibering.space_pair(a, b)
      for m in masks:
        rep = fibering.cross_fibering_check(ProductSet(X, Y, m.tolist()))
        self.assertTrue(rep.equivalence_holds)

  def test_size_limits(self):
    with self.assertRaises(ValidationError):
      fibering.exhaustive_check(5)
    with self.assertRaises(ValidationError):
      fibering.exhaustive_check(0)
